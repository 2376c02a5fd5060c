#include "magenta/cli.hpp"

#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "magenta/bench.hpp"
#include "magenta/core_types.hpp"
#include "magenta/gradcheck.hpp"
#include "magenta/losses.hpp"
#include "magenta/metrics.hpp"
#include "magenta/priors.hpp"
#include "magenta/report.hpp"

namespace magenta::cli {

namespace {

struct GlobalOptions {
    std::string log_base = "e";
    std::uint64_t seed = 7;
    bool quiet = false;

    LogBase base() const { return log_base == "10" ? LogBase::base10 : LogBase::natural; }
};

struct PriorArgs {
    std::string counts;
    std::string json;
};

struct LossArgs {
    std::string variant;
    std::string frames;
    std::string counts;
};

struct GradCheckArgs {
    std::size_t cells = 1000;
    double step = 1e-6;
    double tolerance = 1e-5;
    double fault = 0.0;
};

struct EvalArgs {
    std::string frames;
    std::string counts;
    std::string report;
    double threshold_deg = 20.0;
    double activity_threshold = 0.5;
};

struct BenchArgs {
    std::size_t classes = 5;
    std::size_t frames = 2000;
    double ir = 100.0;
    int epochs = 300;
    double lr = 5.0;
    double momentum = 0.9;
    std::size_t feature_dim = 24;
    double feature_noise = 0.06;
    double doa_noise_deg = 5.0;
    std::size_t hidden = 0;
    std::string variants = "A0,I0,A1,A2,A3,A4,M1,M2,M3,M4";
    std::string out;
};

void write_json_file(const std::string& path, const report::Json& j) {
    std::ofstream file(path, std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    file << j.dump(2) << '\n';
    if (!file) throw IoError("write to '" + path + "' failed");
}

void emit(std::ostream& out, const GlobalOptions& g, const report::Json& j) {
    if (!g.quiet) out << j.dump(2) << '\n';
}

int run_prior(const PriorArgs& args, const GlobalOptions& g, std::ostream& out) {
    const ClassCounts counts = load_counts(args.counts);
    const ClassPriorTable table = build_priors(counts.counts, g.base());
    if (!g.quiet) {
        out << "# IR=" << format_real(table.ir) << " gamma=" << format_real(table.gamma)
            << " log_base=" << report::log_base_label(table.log_base) << '\n';
        out << "class,name,count,pi,w\n";
        for (std::size_t c = 0; c < table.num_classes(); ++c) {
            out << c << ',' << counts.names[c] << ',' << table.counts[c] << ',' << format_real(table.pi[c]) << ','
                << format_real(table.w[c]) << '\n';
        }
    }
    if (!args.json.empty()) write_json_file(args.json, report::to_json(table, counts.names));
    return kOk;
}

int run_loss(const LossArgs& args, const GlobalOptions& g, std::ostream& out) {
    const LossConfig config = LossConfig::for_variant(parse_variant(args.variant), g.base());
    const Dataset dataset = load_frames(args.frames);
    const ClassCounts counts = load_counts(args.counts);
    if (counts.counts.size() != dataset.num_classes()) {
        throw ValidationError("count file lists " + std::to_string(counts.counts.size()) + " classes, frames have " +
                              std::to_string(dataset.num_classes()));
    }
    const ClassPriorTable priors = build_priors(counts.counts, g.base());
    emit(out, g, report::to_json(total_loss(dataset, priors, config), config));
    return kOk;
}

int run_grad_check_cmd(const GradCheckArgs& args, const GlobalOptions& g, std::ostream& out) {
    GradCheckOptions options;
    options.seed = g.seed;
    options.num_cells = args.cells;
    options.step = args.step;
    options.tolerance = args.tolerance;
    options.log_base = g.base();
    options.fault_injection = args.fault;
    const auto checks = run_grad_check(options);
    emit(out, g, report::to_json(checks, options.tolerance));
    for (const auto& check : checks) {
        if (!check.passed) return kCheckFailed;
    }
    return kOk;
}

int run_eval(const EvalArgs& args, const GlobalOptions& g, std::ostream& out) {
    Dataset dataset = load_frames(args.frames);
    if (!args.counts.empty()) {
        const ClassCounts counts = load_counts(args.counts);
        if (counts.names.size() != dataset.num_classes()) {
            throw ValidationError("count file lists " + std::to_string(counts.names.size()) + " classes, frames have " +
                                  std::to_string(dataset.num_classes()));
        }
        dataset.class_names = counts.names;
    }
    const SeldMetrics metrics = evaluate(dataset, {args.threshold_deg, args.activity_threshold});
    emit(out, g, report::to_json(metrics));
    if (!args.report.empty()) save_report(metrics, args.report);
    return kOk;
}

int run_bench(const BenchArgs& args, const GlobalOptions& g, std::ostream& out) {
    bench::SynthConfig synth;
    synth.num_classes = args.classes;
    synth.frames = args.frames;
    synth.imbalance_ratio = args.ir;
    synth.feature_dim = args.feature_dim;
    synth.feature_noise = args.feature_noise;
    synth.doa_noise_deg = args.doa_noise_deg;
    synth.seed = g.seed;
    const std::vector<long long> counts = bench::class_frame_counts(synth);

    bench::LadderOptions options;
    options.variants = parse_variant_list(args.variants);
    options.hidden = args.hidden;
    options.momentum = args.momentum;
    options.log_base = g.base();
    const auto results = bench::run_ladder(synth, args.epochs, args.lr, options);

    if (!args.out.empty()) bench::write_bench_outputs(results, counts, args.out);

    report::Json table = report::Json::array();
    for (const auto& r : results) {
        report::Json row;
        row["experiment"] = std::string(to_string(r.config.variant));
        row["ER20"] = r.metrics.er20;
        row["F20"] = r.metrics.f20;
        row["LE_CD"] = r.metrics.le_cd;
        row["LR_CD"] = r.metrics.lr_cd;
        row["E_SELD"] = r.metrics.e_seld;
        row["rarest_class_recall"] = r.per_class_recall.back();
        table.push_back(std::move(row));
    }
    emit(out, g, table);
    return kOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Geometry- and rarity-aware ACCDOA losses, SELD metrics and a long-tailed benchmark", "magenta"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--log-base", g.log_base, "Logarithm base for the prior exponent")
        ->check(CLI::IsMember({"e", "10"}))
        ->capture_default_str();
    app.add_option("--seed", g.seed, "Random seed (grad-check, bench)")->capture_default_str();
    app.add_flag("--quiet", g.quiet, "Suppress stdout output");

    PriorArgs prior_args;
    auto* prior = app.add_subcommand("prior", "Print the class prior table built from a count CSV");
    prior->add_option("--counts", prior_args.counts, "CSV with header class,name,count")
        ->required()
        ->check(CLI::ExistingFile);
    prior->add_option("--json", prior_args.json, "Also write the table as JSON");

    LossArgs loss_args;
    auto* loss = app.add_subcommand("loss", "Evaluate a loss variant on a frame file and print its breakdown");
    loss->add_option("--variant", loss_args.variant, "A0, I0, A1..A4, M1..M4")
        ->required()
        ->check(CLI::IsMember({"A0", "I0", "A1", "A2", "A3", "A4", "M1", "M2", "M3", "M4"}));
    loss->add_option("--frames", loss_args.frames, "Frame file (.csv dense or .jsonl)")
        ->required()
        ->check(CLI::ExistingFile);
    loss->add_option("--counts", loss_args.counts, "Training-split count CSV")->required()->check(CLI::ExistingFile);

    GradCheckArgs gc_args;
    auto* gc = app.add_subcommand("grad-check", "Compare analytic gradients with central finite differences");
    gc->add_option("--cells", gc_args.cells, "Cells per variant")->check(CLI::Range(1, 10000000))->capture_default_str();
    gc->add_option("--step", gc_args.step, "Finite-difference step")
        ->check(CLI::Range(1e-12, 1e-2))
        ->capture_default_str();
    gc->add_option("--tolerance", gc_args.tolerance, "Max relative error")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    // Hidden: perturbs the analytic gradient to exercise the failure exit code.
    gc->add_option("--fault-injection", gc_args.fault)->group("");

    EvalArgs eval_args;
    auto* ev = app.add_subcommand("eval", "Score predictions with frame-level SELD metrics");
    ev->add_option("--frames", eval_args.frames, "Frame file (.csv dense or .jsonl)")
        ->required()
        ->check(CLI::ExistingFile);
    ev->add_option("--counts", eval_args.counts, "Optional count CSV supplying class names")->check(CLI::ExistingFile);
    ev->add_option("--threshold-deg", eval_args.threshold_deg, "Angular gate for location-dependent metrics")
        ->check(CLI::Range(0.0, 180.0))
        ->capture_default_str();
    ev->add_option("--activity-threshold", eval_args.activity_threshold, "Norm above which a class is detected")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    ev->add_option("--report", eval_args.report, "Write the per-class CSV report here");

    BenchArgs bench_args;
    auto* bn = app.add_subcommand("bench", "Train the variant ladder on a synthetic long-tailed set");
    bn->add_option("--classes", bench_args.classes, "Number of classes")->check(CLI::Range(2, 1000))->capture_default_str();
    bn->add_option("--frames", bench_args.frames, "Frames per split")->check(CLI::Range(2, 10000000))->capture_default_str();
    bn->add_option("--ir", bench_args.ir, "Target imbalance ratio")->check(CLI::Range(1.0, 1e9))->capture_default_str();
    bn->add_option("--epochs", bench_args.epochs, "Training epochs")->check(CLI::Range(0, 1000000))->capture_default_str();
    bn->add_option("--lr", bench_args.lr, "Learning rate")->check(CLI::NonNegativeNumber)->capture_default_str();
    bn->add_option("--momentum", bench_args.momentum, "Momentum")->check(CLI::Range(0.0, 0.999))->capture_default_str();
    bn->add_option("--feature-dim", bench_args.feature_dim, "Feature dimension")
        ->check(CLI::Range(1, 100000))
        ->capture_default_str();
    bn->add_option("--feature-noise", bench_args.feature_noise, "Feature noise std")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    bn->add_option("--doa-noise-deg", bench_args.doa_noise_deg, "DOA jitter std in degrees")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    bn->add_option("--hidden", bench_args.hidden, "Hidden width (0 = linear model)")->capture_default_str();
    bn->add_option("--variants", bench_args.variants, "Comma-separated variant list")->capture_default_str();
    bn->add_option("--out", bench_args.out, "Directory for result JSON and CSV tables");

    for (auto* sub : {prior, loss, gc, ev, bn}) sub->fallthrough();

    std::vector<const char*> raw;
    raw.reserve(argv.size());
    for (const auto& a : argv) raw.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsageOrValidation;
    }

    // CLI11 lets an activity threshold of exactly 0 or 1 through Range.
    if (ev->parsed() && !(eval_args.activity_threshold > 0.0 && eval_args.activity_threshold < 1.0)) {
        err << "error: --activity-threshold must lie strictly between 0 and 1\n";
        return kUsageOrValidation;
    }

    try {
        if (prior->parsed()) return run_prior(prior_args, g, out);
        if (loss->parsed()) return run_loss(loss_args, g, out);
        if (gc->parsed()) return run_grad_check_cmd(gc_args, g, out);
        if (ev->parsed()) return run_eval(eval_args, g, out);
        if (bn->parsed()) return run_bench(bench_args, g, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsageOrValidation;
    }
    err << "error: no subcommand\n";
    return kUsageOrValidation;
}

}  // namespace magenta::cli
