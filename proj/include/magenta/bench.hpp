#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "magenta/core_types.hpp"
#include "magenta/losses.hpp"
#include "magenta/metrics.hpp"
#include "magenta/priors.hpp"

namespace magenta::bench {

struct SynthConfig {
    std::size_t num_classes = 5;
    std::size_t frames = 2000;
    double imbalance_ratio = 100.0;
    // Angular jitter (std, degrees) of the DOA seen by the features
    // relative to the target DOA.
    double doa_noise_deg = 5.0;
    // Std of the additive Gaussian noise on every feature.
    double feature_noise = 0.06;
    std::size_t feature_dim = 24;
    // Fraction of frames in which the most frequent class is active.
    double head_fraction = 0.5;
    std::uint64_t seed = 0;
};

// Frames with zero predictions plus a row-major [frames x feature_dim]
// feature matrix.
struct SynthData {
    Dataset dataset;
    std::vector<double> features;
    std::size_t feature_dim = 0;
};

// Active-frame count per class: a geometric progression from the head
// class (index 0) down to the rarest class (index C-1).
std::vector<long long> class_frame_counts(const SynthConfig& config);

// The feature embedding depends only on config.seed; `split` selects an
// independent draw of frames (0 = train, 1 = evaluation, ...). Throws
// ValidationError for an infeasible config.
SynthData generate_synthetic(const SynthConfig& config, std::uint64_t split = 0);

// Linear map from features to C prediction vectors, optionally through one
// tanh hidden layer.
class ToyModel {
public:
    ToyModel() = default;
    ToyModel(std::size_t input_dim, std::size_t num_classes, std::size_t hidden = 0);

    // Gaussian weights with the given std; biases start at zero.
    void initialize(std::uint64_t seed, double scale = 0.01);

    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t num_classes() const noexcept { return num_classes_; }
    std::size_t hidden() const noexcept { return hidden_; }
    std::size_t num_parameters() const noexcept { return params_.size(); }

    std::vector<double>& parameters() noexcept { return params_; }
    const std::vector<double>& parameters() const noexcept { return params_; }

    // Writes predictions for every frame into dataset.frames[t].predictions.
    void predict(const std::vector<double>& features, Dataset& dataset) const;

    // Gradient of the loss with respect to every parameter, given the loss
    // gradient with respect to each prediction vector.
    std::vector<double> backward(const std::vector<double>& features, const GradientField& output_grad) const;

    friend bool operator==(const ToyModel&, const ToyModel&) = default;

private:
    std::size_t output_dim() const noexcept { return 3 * num_classes_; }
    std::size_t first_layer_size() const noexcept { return (hidden_ ? hidden_ : output_dim()) * (input_dim_ + 1); }
    void hidden_activations(const double* x, std::vector<double>& h) const;

    std::size_t input_dim_ = 0;
    std::size_t num_classes_ = 0;
    std::size_t hidden_ = 0;
    // Layer-major: [W1 | b1] per output row, then [W2 | b2] when hidden > 0.
    std::vector<double> params_;
};

struct TrainOptions {
    double momentum = 0.9;
    std::size_t batch_frames = 0;  // 0 = full batch
    // Scored after training; the training data is scored when absent.
    const SynthData* eval = nullptr;
    EvalOptions eval_options{};
};

struct BenchResult {
    LossConfig config;
    SeldMetrics metrics;
    std::vector<double> per_class_recall;
    std::vector<std::pair<int, double>> loss_curve;  // (epoch, training total loss)
};

struct TrainOutcome {
    ToyModel model;
    BenchResult result;
};

// Gradient descent with momentum on the chosen loss. Priors are frozen from
// the training counts. Throws Error naming the epoch and variant if the
// loss becomes non-finite.
TrainOutcome train(ToyModel model, const SynthData& data, const LossConfig& config, int epochs, double lr,
                   std::uint64_t seed, const TrainOptions& options = {});

struct LadderOptions {
    std::vector<Variant> variants{kAllVariants.begin(), kAllVariants.end()};
    std::size_t hidden = 0;
    double init_scale = 0.01;
    double momentum = 0.9;
    LogBase log_base = LogBase::natural;
    EvalOptions eval_options{};
};

// One model per variant, all from the same initialization and data;
// scored on a held-out draw from the same generator.
std::vector<BenchResult> run_ladder(const SynthConfig& synth, int epochs, double lr, const LadderOptions& options = {});

// result_<variant>.json per run, table.csv (one row per variant) and
// per_class.csv (per-class F20 and recall per variant).
void write_bench_outputs(const std::vector<BenchResult>& results, const std::vector<long long>& train_counts,
                         const std::filesystem::path& dir);

}  // namespace magenta::bench
