#include "magenta/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>

#include "magenta/report.hpp"

namespace magenta::bench {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over a combined key.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Vec3 uniform_on_sphere(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> z_dist(-1.0, 1.0);
    std::uniform_real_distribution<double> phi_dist(0.0, 2.0 * std::numbers::pi);
    const double z = z_dist(rng);
    const double phi = phi_dist(rng);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
}

// Rotates a unit vector by |N(0, std_deg)| degrees about a random axis
// orthogonal to it.
Vec3 jitter(const Vec3& d, double std_deg, std::mt19937_64& rng) {
    if (std_deg <= 0.0) return d;
    const double angle = std::abs(std::normal_distribution<double>(0.0, std_deg)(rng)) * std::numbers::pi / 180.0;
    Vec3 u = uniform_on_sphere(rng);
    u -= dot(u, d) * d;
    const double n = norm(u);
    if (n < 1e-9) return d;
    u *= 1.0 / n;
    return std::cos(angle) * d + std::sin(angle) * u;
}

void validate(const SynthConfig& config) {
    if (config.num_classes < 2) throw ValidationError("synthetic set needs at least 2 classes");
    if (config.frames < config.num_classes) throw ValidationError("synthetic set needs frames >= classes");
    if (!(config.imbalance_ratio >= 1.0) || !std::isfinite(config.imbalance_ratio)) {
        throw ValidationError("imbalance ratio must be finite and >= 1");
    }
    if (config.feature_dim == 0) throw ValidationError("feature_dim must be positive");
    if (!(config.head_fraction > 0.0 && config.head_fraction <= 1.0)) {
        throw ValidationError("head_fraction must lie in (0, 1]");
    }
    if (!(config.feature_noise >= 0.0) || !(config.doa_noise_deg >= 0.0)) {
        throw ValidationError("noise levels must be non-negative");
    }
}

Dataset subset(const Dataset& data, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.class_names = data.class_names;
    out.frames.reserve(rows.size());
    for (std::size_t t : rows) out.frames.push_back(data.frames[t]);
    return out;
}

std::vector<double> subset_features(const SynthData& data, const std::vector<std::size_t>& rows) {
    std::vector<double> out;
    out.reserve(rows.size() * data.feature_dim);
    for (std::size_t t : rows) {
        const auto begin = data.features.begin() + static_cast<std::ptrdiff_t>(t * data.feature_dim);
        out.insert(out.end(), begin, begin + static_cast<std::ptrdiff_t>(data.feature_dim));
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

std::vector<long long> class_frame_counts(const SynthConfig& config) {
    validate(config);
    const double head = std::round(config.head_fraction * static_cast<double>(config.frames));
    const auto last = static_cast<double>(config.num_classes - 1);
    std::vector<long long> counts(config.num_classes);
    for (std::size_t c = 0; c < config.num_classes; ++c) {
        const double ratio = std::pow(config.imbalance_ratio, -static_cast<double>(c) / last);
        counts[c] = static_cast<long long>(std::llround(head * ratio));
    }
    if (counts.back() < 1) {
        throw ValidationError("infeasible synthetic config: rarest class would have " +
                              std::to_string(counts.back()) + " active frames");
    }
    return counts;
}

SynthData generate_synthetic(const SynthConfig& config, std::uint64_t split) {
    const std::vector<long long> counts = class_frame_counts(config);
    const std::size_t num_classes = config.num_classes;
    const std::size_t dim = config.feature_dim;
    const std::size_t signal_dim = 3 * num_classes;

    // Embedding shared by every split of this seed.
    std::mt19937_64 embed_rng(mix_seed(config.seed, 0));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> embedding(dim * signal_dim);
    const double embed_scale = 1.0 / std::sqrt(static_cast<double>(dim));
    for (double& v : embedding) v = gauss(embed_rng) * embed_scale;

    std::mt19937_64 rng(mix_seed(config.seed, split + 1));
    SynthData data;
    data.feature_dim = dim;
    data.dataset.class_names.reserve(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) data.dataset.class_names.push_back("class_" + std::to_string(c));
    data.dataset.frames.resize(config.frames);
    for (std::size_t t = 0; t < config.frames; ++t) {
        auto& frame = data.dataset.frames[t];
        frame.frame_index = static_cast<long long>(t);
        frame.targets.assign(num_classes, Vec3{});
        frame.predictions.assign(num_classes, Vec3{});
    }

    std::vector<std::size_t> order(config.frames);
    for (std::size_t c = 0; c < num_classes; ++c) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (long long i = 0; i < counts[c]; ++i) {
            data.dataset.frames[order[static_cast<std::size_t>(i)]].targets[c] = uniform_on_sphere(rng);
        }
    }

    data.features.assign(config.frames * dim, 0.0);
    std::vector<double> signal(signal_dim);
    for (std::size_t t = 0; t < config.frames; ++t) {
        const auto& frame = data.dataset.frames[t];
        for (std::size_t c = 0; c < num_classes; ++c) {
            const Vec3 seen = frame.is_active(c) ? jitter(frame.targets[c], config.doa_noise_deg, rng) : Vec3{};
            for (std::size_t i = 0; i < 3; ++i) signal[3 * c + i] = seen[i];
        }
        double* x = &data.features[t * dim];
        for (std::size_t k = 0; k < dim; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < signal_dim; ++j) acc += embedding[k * signal_dim + j] * signal[j];
            x[k] = acc + config.feature_noise * gauss(rng);
        }
    }

    validate_and_count(data.dataset);
    return data;
}

ToyModel::ToyModel(std::size_t input_dim, std::size_t num_classes, std::size_t hidden)
    : input_dim_(input_dim), num_classes_(num_classes), hidden_(hidden) {
    if (input_dim == 0 || num_classes == 0) throw ValidationError("model dimensions must be positive");
    std::size_t size = first_layer_size();
    if (hidden_) size += output_dim() * (hidden_ + 1);
    params_.assign(size, 0.0);
}

void ToyModel::initialize(std::uint64_t seed, double scale) {
    std::mt19937_64 rng(mix_seed(seed, 0x5eedULL));
    std::normal_distribution<double> gauss(0.0, scale);
    const std::size_t rows1 = hidden_ ? hidden_ : output_dim();
    std::size_t k = 0;
    for (std::size_t row = 0; row < rows1; ++row) {
        for (std::size_t i = 0; i < input_dim_; ++i) params_[k++] = gauss(rng);
        params_[k++] = 0.0;
    }
    if (hidden_) {
        for (std::size_t row = 0; row < output_dim(); ++row) {
            for (std::size_t i = 0; i < hidden_; ++i) params_[k++] = gauss(rng);
            params_[k++] = 0.0;
        }
    }
}

void ToyModel::hidden_activations(const double* x, std::vector<double>& h) const {
    h.resize(hidden_);
    for (std::size_t j = 0; j < hidden_; ++j) {
        const double* w = &params_[j * (input_dim_ + 1)];
        double z = w[input_dim_];
        for (std::size_t i = 0; i < input_dim_; ++i) z += w[i] * x[i];
        h[j] = std::tanh(z);
    }
}

void ToyModel::predict(const std::vector<double>& features, Dataset& dataset) const {
    const std::size_t frames = dataset.frames.size();
    if (features.size() != frames * input_dim_) throw ValidationError("feature matrix does not match frame count");
    std::vector<double> h;
    for (std::size_t t = 0; t < frames; ++t) {
        const double* x = &features[t * input_dim_];
        auto& preds = dataset.frames[t].predictions;
        preds.resize(num_classes_);
        const double* in = x;
        std::size_t in_dim = input_dim_;
        std::size_t offset = 0;
        if (hidden_) {
            hidden_activations(x, h);
            in = h.data();
            in_dim = hidden_;
            offset = first_layer_size();
        }
        for (std::size_t o = 0; o < output_dim(); ++o) {
            const double* w = &params_[offset + o * (in_dim + 1)];
            double z = w[in_dim];
            for (std::size_t i = 0; i < in_dim; ++i) z += w[i] * in[i];
            preds[o / 3][o % 3] = z;
        }
    }
}

std::vector<double> ToyModel::backward(const std::vector<double>& features, const GradientField& output_grad) const {
    const std::size_t frames = output_grad.size();
    if (features.size() != frames * input_dim_) throw ValidationError("feature matrix does not match gradient field");
    std::vector<double> grad(params_.size(), 0.0);
    std::vector<double> h;
    std::vector<double> dh(hidden_);
    for (std::size_t t = 0; t < frames; ++t) {
        const double* x = &features[t * input_dim_];
        const auto& g = output_grad[t];
        if (!hidden_) {
            for (std::size_t o = 0; o < output_dim(); ++o) {
                const double go = g[o / 3][o % 3];
                double* dw = &grad[o * (input_dim_ + 1)];
                for (std::size_t i = 0; i < input_dim_; ++i) dw[i] += go * x[i];
                dw[input_dim_] += go;
            }
            continue;
        }
        hidden_activations(x, h);
        std::fill(dh.begin(), dh.end(), 0.0);
        const std::size_t offset = first_layer_size();
        for (std::size_t o = 0; o < output_dim(); ++o) {
            const double go = g[o / 3][o % 3];
            const double* w = &params_[offset + o * (hidden_ + 1)];
            double* dw = &grad[offset + o * (hidden_ + 1)];
            for (std::size_t j = 0; j < hidden_; ++j) {
                dw[j] += go * h[j];
                dh[j] += go * w[j];
            }
            dw[hidden_] += go;
        }
        for (std::size_t j = 0; j < hidden_; ++j) {
            const double dz = dh[j] * (1.0 - h[j] * h[j]);
            double* dw = &grad[j * (input_dim_ + 1)];
            for (std::size_t i = 0; i < input_dim_; ++i) dw[i] += dz * x[i];
            dw[input_dim_] += dz;
        }
    }
    return grad;
}

TrainOutcome train(ToyModel model, const SynthData& data, const LossConfig& config, int epochs, double lr,
                   std::uint64_t seed, const TrainOptions& options) {
    if (epochs < 0) throw ValidationError("epochs must be non-negative");
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw ValidationError("learning rate must be finite and >= 0");
    if (!(options.momentum >= 0.0 && options.momentum < 1.0)) throw ValidationError("momentum must lie in [0, 1)");
    if (model.input_dim() != data.feature_dim || model.num_classes() != data.dataset.num_classes()) {
        throw ValidationError("model dimensions do not match the training data");
    }

    const ClassPriorTable priors = build_priors(data.dataset.frame_counts, config.log_base);
    const std::size_t frames = data.dataset.num_frames();
    const bool full_batch = options.batch_frames == 0 || options.batch_frames >= frames;

    Dataset work = data.dataset;
    std::vector<double> velocity(model.num_parameters(), 0.0);
    std::mt19937_64 rng(mix_seed(seed, 0xba7cULL));
    std::vector<std::size_t> order(frames);
    std::iota(order.begin(), order.end(), std::size_t{0});

    auto step = [&](const std::vector<double>& features, Dataset& batch) {
        const GradientField grad_out = grad_total_loss(batch, priors, config);
        const std::vector<double> grad = model.backward(features, grad_out);
        auto& params = model.parameters();
        for (std::size_t k = 0; k < params.size(); ++k) {
            velocity[k] = options.momentum * velocity[k] - lr * grad[k];
            params[k] += velocity[k];
        }
    };

    auto check_finite = [&](double total, int epoch) {
        if (!std::isfinite(total)) {
            throw Error("training diverged at epoch " + std::to_string(epoch) + " for variant " +
                        std::string(to_string(config.variant)));
        }
    };

    BenchResult result;
    result.config = config;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        model.predict(data.features, work);
        const double total = total_loss(work, priors, config).total;
        check_finite(total, epoch);
        result.loss_curve.emplace_back(epoch, total);

        if (full_batch) {
            step(data.features, work);
            continue;
        }
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < frames; start += options.batch_frames) {
            const std::size_t end = std::min(frames, start + options.batch_frames);
            const std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                                order.begin() + static_cast<std::ptrdiff_t>(end));
            Dataset batch = subset(work, rows);
            const std::vector<double> features = subset_features(data, rows);
            model.predict(features, batch);
            step(features, batch);
        }
    }
    model.predict(data.features, work);
    const double final_total = total_loss(work, priors, config).total;
    check_finite(final_total, epochs);
    result.loss_curve.emplace_back(epochs, final_total);

    const SynthData& scored = options.eval ? *options.eval : data;
    Dataset eval_set = scored.dataset;
    model.predict(scored.features, eval_set);
    result.metrics = evaluate(eval_set, options.eval_options);
    result.per_class_recall.reserve(result.metrics.per_class.size());
    for (const ClassMetrics& cm : result.metrics.per_class) result.per_class_recall.push_back(cm.lr_cd);

    return {std::move(model), std::move(result)};
}

std::vector<BenchResult> run_ladder(const SynthConfig& synth, int epochs, double lr, const LadderOptions& options) {
    const SynthData train_set = generate_synthetic(synth, 0);
    const SynthData eval_set = generate_synthetic(synth, 1);

    ToyModel init(synth.feature_dim, synth.num_classes, options.hidden);
    init.initialize(synth.seed, options.init_scale);

    TrainOptions train_options;
    train_options.momentum = options.momentum;
    train_options.eval = &eval_set;
    train_options.eval_options = options.eval_options;

    std::vector<BenchResult> results;
    results.reserve(options.variants.size());
    for (Variant v : options.variants) {
        const LossConfig config = LossConfig::for_variant(v, options.log_base);
        results.push_back(train(init, train_set, config, epochs, lr, synth.seed, train_options).result);
    }
    return results;
}

void write_bench_outputs(const std::vector<BenchResult>& results, const std::vector<long long>& train_counts,
                         const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

    std::string table = "experiment,ER20,F20,LE_CD,LR_CD,E_SELD\n";
    std::string per_class = "experiment,class,train_count,F20,LR_CD\n";
    for (const BenchResult& r : results) {
        const std::string label(to_string(r.config.variant));
        write_text(dir / ("result_" + label + ".json"), report::to_json(r).dump(2) + "\n");

        const SeldMetrics& m = r.metrics;
        table += label + ',' + format_real(m.er20) + ',' + format_real(m.f20) + ',' + format_real(m.le_cd) + ',' +
                 format_real(m.lr_cd) + ',' + format_real(m.e_seld) + '\n';
        for (std::size_t c = 0; c < m.per_class.size(); ++c) {
            const long long count = c < train_counts.size() ? train_counts[c] : 0;
            per_class += label + ',' + m.class_names[c] + ',' + std::to_string(count) + ',' +
                         format_real(m.per_class[c].f20) + ',' + format_real(m.per_class[c].lr_cd) + '\n';
        }
    }
    write_text(dir / "table.csv", table);
    write_text(dir / "per_class.csv", per_class);
}

}  // namespace magenta::bench
