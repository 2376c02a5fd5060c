// One PASS/FAIL line per criterion; exits non-zero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "magenta/bench.hpp"
#include "magenta/cli.hpp"
#include "magenta/geometry.hpp"
#include "magenta/gradcheck.hpp"
#include "magenta/losses.hpp"
#include "magenta/metrics.hpp"
#include "magenta/priors.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace magenta;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

struct TableRow {
    const char* name;
    double er, f, le, lr, e_seld;
};

constexpr TableRow kTable[] = {
    {"A0", 0.625, 0.2777, 50.5, 0.4029, 0.556}, {"I0", 0.661, 0.2568, 35.7, 0.4077, 0.549},
    {"A1", 0.619, 0.2792, 42.9, 0.4049, 0.543}, {"M1", 0.644, 0.2787, 41.6, 0.4075, 0.547},
    {"A2", 0.638, 0.3095, 20.7, 0.4846, 0.490}, {"M2", 0.637, 0.3167, 21.1, 0.4903, 0.487},
    {"A3", 0.626, 0.3121, 20.6, 0.5065, 0.480}, {"M3", 0.633, 0.3110, 20.9, 0.5213, 0.479},
    {"A4", 0.636, 0.3057, 19.8, 0.5013, 0.485}, {"M4", 0.620, 0.3172, 19.1, 0.5112, 0.474},
};

Outcome table_arithmetic() {
    double worst = 0.0;
    for (const auto& row : kTable) {
        worst = std::max(worst, std::abs(aggregate_seld_error(row.er, row.f, row.le, row.lr) - row.e_seld));
    }
    return {worst <= 0.001, "10 rows, max |diff| = " + fmt("%.6f", worst)};
}

Outcome relative_improvement() {
    const double rel = 100.0 * (0.556 - 0.474) / 0.556;
    return {std::abs(rel - 14.7) <= 0.1, "relative improvement = " + fmt("%.3f", rel) + "%"};
}

Outcome geometry_suite() {
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 p = oracle::random_unit(rng);
        const Vec3 q = oracle::random_in_ball(rng, 2.0);
        const auto d = decompose(p, q);
        const double orth = squared_norm(d.e) - squared_norm(d.e_par) - squared_norm(d.e_perp);
        const double ident = squared_norm(d.e_perp) - (d.r * d.r - d.a * d.a);
        const auto rot = oracle::random_rotation(rng);
        const auto dr = decompose(oracle::rotate(rot, p), oracle::rotate(rot, q));
        const double eq = std::max({norm(dr.e_par - oracle::rotate(rot, d.e_par)),
                                    norm(dr.e_perp - oracle::rotate(rot, d.e_perp)), std::abs(dr.a - d.a),
                                    std::abs(dr.r - d.r)});
        worst = std::max({worst, std::abs(orth), std::abs(ident), eq});
    }
    return {worst <= 1e-10, "1e4 cells, max deviation = " + fmt("%.3e", worst)};
}

Outcome prior_suite() {
    std::mt19937_64 rng(202);
    std::uniform_int_distribution<int> classes(2, 20);
    std::uniform_int_distribution<long long> count(1, 100000);
    std::uniform_int_distribution<long long> scale(2, 50);
    double mean_dev = 0.0, scale_dev = 0.0;
    bool monotone = true;
    for (int i = 0; i < 1000; ++i) {
        std::vector<long long> n(static_cast<std::size_t>(classes(rng)));
        for (auto& v : n) v = count(rng);
        const auto t = build_priors(n);
        double mean = 0.0;
        for (double v : t.pi) mean += v / static_cast<double>(n.size());
        mean_dev = std::max(mean_dev, std::abs(mean - 1.0));

        const long long k = scale(rng);
        std::vector<long long> scaled = n;
        for (auto& v : scaled) v *= k;
        const auto ts = build_priors(scaled);
        for (std::size_t c = 0; c < n.size(); ++c) scale_dev = std::max(scale_dev, std::abs(ts.pi[c] - t.pi[c]));

        for (std::size_t a = 0; a < n.size(); ++a) {
            for (std::size_t b = 0; b < n.size(); ++b) {
                if (n[a] < n[b] && !(t.pi[a] >= t.pi[b])) monotone = false;
            }
        }
    }
    std::vector<long long> flat(7, 321);
    const auto tf = build_priors(flat);
    double flat_dev = 0.0;
    for (double v : tf.pi) flat_dev = std::max(flat_dev, std::abs(v - 1.0));

    const bool pass = mean_dev < 1e-9 && scale_dev < 1e-9 && flat_dev == 0.0 && monotone;
    return {pass, "mean dev " + fmt("%.2e", mean_dev) + ", scale dev " + fmt("%.2e", scale_dev) + ", IR=1 dev " +
                      fmt("%.1e", flat_dev) + ", monotone " + (monotone ? "yes" : "no")};
}

Outcome gradient_check() {
    GradCheckOptions opts;
    opts.num_cells = 1000;
    opts.step = 1e-6;
    const auto checks = run_grad_check(opts);
    double worst = 0.0;
    bool pass = checks.size() == kAllVariants.size();
    for (const auto& c : checks) {
        worst = std::max(worst, c.max_relative_error);
        pass = pass && c.passed && c.cells >= 1000 && c.max_relative_error < 1e-5;
    }

    // Independent reference: finite differences of the scalar formulas.
    std::mt19937_64 rng(303);
    double worst_ref = 0.0;
    for (Variant v : kAllVariants) {
        const auto cfg = LossConfig::for_variant(v);
        const std::string label(to_string(v));
        for (int i = 0; i < 1000; ++i) {
            const Vec3 p = oracle::random_unit(rng);
            const Vec3 q = oracle::smooth_prediction(p, rng);
            const double pi = 0.2 + 1.5 * std::uniform_real_distribution<double>(0, 1)(rng);
            const double w = 1.0 / (1.0 + pi);
            const Vec3 g = cell_gradient(p, q, pi, w, cfg);
            const Vec3 fd = oracle::central_difference(
                [&](const Vec3& x) { return oracle::cell_loss(label, p, x, pi, w); }, q, 1e-6);
            worst_ref = std::max(worst_ref, oracle::relative_error(g, fd));
        }
    }
    pass = pass && worst_ref < 1e-5;
    return {pass, "10 variants x 1000 cells, max rel err " + fmt("%.2e", worst) + " (batched), " +
                      fmt("%.2e", worst_ref) + " (reference)"};
}

Outcome mse_equivalence() {
    std::mt19937_64 rng(404);
    const auto cfg = LossConfig::for_variant(Variant::A1);
    double worst = 0.0;
    int cells = 0;
    while (cells < 10000) {
        const Vec3 p = oracle::random_unit(rng);
        const Vec3 q = oracle::random_in_ball(rng, 2.0);
        if (dot(p, q) > 1.0) continue;
        ++cells;
        const double mse = squared_norm(p - q);
        worst = std::max(worst, std::abs(active_loss(decompose(p, q), 1.0, cfg) - mse));
    }
    return {worst <= 1e-10, "1e4 cells with a <= 1, max |diff| = " + fmt("%.3e", worst)};
}

Outcome timidity() {
    int wins = 0;
    double e_a0 = 0.0, e_m4 = 0.0;
    std::string recalls;
    bench::LadderOptions opts;
    opts.variants = {Variant::A0, Variant::A2, Variant::A3, Variant::M4};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        bench::SynthConfig cfg;
        cfg.num_classes = 5;
        cfg.frames = 2000;
        cfg.imbalance_ratio = 100.0;
        cfg.seed = seed;
        const auto r = bench::run_ladder(cfg, 300, 5.0, opts);
        const double a0 = r[0].per_class_recall.back();
        if (a0 < r[1].per_class_recall.back() && a0 < r[2].per_class_recall.back() && a0 < r[3].per_class_recall.back()) {
            ++wins;
        }
        e_a0 += r[0].metrics.e_seld / 5.0;
        e_m4 += r[3].metrics.e_seld / 5.0;
        recalls += (seed ? " " : "") + fmt("%.2f", a0) + "/" + fmt("%.2f", r[3].per_class_recall.back());
    }
    const bool pass = wins >= 4 && e_m4 <= e_a0;
    return {pass, "rarest recall A0 below A2/A3/M4 in " + std::to_string(wins) + "/5 seeds (A0/M4: " + recalls +
                      "); mean E_SELD A0 " + fmt("%.4f", e_a0) + ", M4 " + fmt("%.4f", e_m4)};
}

Outcome determinism() {
    TempDir dir("accept");
    auto bench_into = [&](const std::string& sub) {
        std::ostringstream out, err;
        return cli::dispatch({"magenta", "--seed", "0", "--quiet", "bench", "--variants", "A0,A2,A3,M4", "--out",
                              dir.file(sub).string()},
                             out, err);
    };
    if (bench_into("first") != 0 || bench_into("second") != 0) return {false, "bench run failed"};
    int files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir.file("first"))) {
        const auto name = entry.path().filename();
        const auto other = dir.file("second") / name;
        if (!std::filesystem::exists(other) || read_file(entry.path()) != read_file(other)) {
            return {false, name.string() + " differs between runs"};
        }
        ++files;
    }
    return {files >= 6, std::to_string(files) + " files byte-identical across two runs"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"aggregate arithmetic on reported rows", table_arithmetic},
        {"relative improvement of M4 over A0", relative_improvement},
        {"residual geometry", geometry_suite},
        {"class priors", prior_suite},
        {"gradient check", gradient_check},
        {"MSE equivalence below the target", mse_equivalence},
        {"rare-class timidity on the synthetic ladder", timidity},
        {"bench determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
