#include "magenta/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace magenta {

namespace {

constexpr std::size_t kBatchFrames = 4;
constexpr std::size_t kBatchClasses = 5;

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (true) {
        const Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
        const double n = norm(v);
        if (n > 1e-6) return v * (1.0 / n);
    }
}

// Prediction for an active cell with |a - 1|, |r - 1| and r all above margin.
Vec3 smooth_prediction(const Vec3& target, double margin, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> radius(0.0, 2.5);
    while (true) {
        const Vec3 p = radius(rng) * random_unit(rng);
        // Bias half the samples toward the target so aligned cases appear.
        const Vec3 q = (rng() & 1U) ? p : p + target * 0.8;
        const double r = norm(q);
        const double a = dot(q, target);
        if (r > margin && std::abs(r - 1.0) > margin && std::abs(a - 1.0) > margin) return q;
    }
}

Dataset random_batch(std::mt19937_64& rng, double margin) {
    Dataset batch;
    batch.class_names.resize(kBatchClasses);
    for (std::size_t t = 0; t < kBatchFrames; ++t) {
        AccdoaFrame frame;
        frame.frame_index = static_cast<long long>(t);
        for (std::size_t c = 0; c < kBatchClasses; ++c) {
            const bool active = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.7;
            const Vec3 target = active ? random_unit(rng) : Vec3{};
            const Vec3 pred = active ? smooth_prediction(target, margin, rng)
                                     : std::uniform_real_distribution<double>(0.05, 1.5)(rng) * random_unit(rng);
            frame.targets.push_back(target);
            frame.predictions.push_back(pred);
        }
        batch.frames.push_back(std::move(frame));
    }
    return batch;
}

}  // namespace

double relative_error(const Vec3& g, const Vec3& ref) noexcept {
    const double denom = std::max({norm(g), norm(ref), 1e-12});
    return norm(g - ref) / denom;
}

std::vector<VariantCheck> run_grad_check(const GradCheckOptions& options) {
    std::vector<VariantCheck> results;
    for (Variant variant : kAllVariants) {
        const LossConfig config = LossConfig::for_variant(variant, options.log_base);
        // Same cells for every variant.
        std::mt19937_64 rng(options.seed);
        VariantCheck check{variant};

        while (check.cells < options.num_cells) {
            std::vector<long long> counts(kBatchClasses);
            for (auto& n : counts) n = std::uniform_int_distribution<long long>(1, 5000)(rng);
            const ClassPriorTable priors = build_priors(counts, options.log_base);
            Dataset batch = random_batch(rng, options.kink_margin);
            const GradientField analytic = grad_total_loss(batch, priors, config);

            for (std::size_t t = 0; t < kBatchFrames && check.cells < options.num_cells; ++t) {
                for (std::size_t c = 0; c < kBatchClasses && check.cells < options.num_cells; ++c) {
                    Vec3& pred = batch.frames[t].predictions[c];
                    Vec3 numeric;
                    for (std::size_t i = 0; i < 3; ++i) {
                        const double saved = pred[i];
                        pred[i] = saved + options.step;
                        const double up = total_loss(batch, priors, config).total;
                        pred[i] = saved - options.step;
                        const double down = total_loss(batch, priors, config).total;
                        pred[i] = saved;
                        numeric[i] = (up - down) / (2.0 * options.step);
                    }
                    Vec3 g = analytic[t][c];
                    g += Vec3{options.fault_injection, options.fault_injection, options.fault_injection};
                    check.max_relative_error = std::max(check.max_relative_error, relative_error(g, numeric));
                    ++check.cells;
                }
            }
        }
        check.passed = check.max_relative_error < options.tolerance;
        results.push_back(check);
    }
    return results;
}

}  // namespace magenta
