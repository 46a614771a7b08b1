#pragma once

#include <functional>

#include "fairtl/data.hpp"
#include "fairtl/gan.hpp"
#include "fairtl/numerics.hpp"

namespace fairtl {

/// Joint-label classifier used for fairness evaluation. Three flavors:
/// the analytic Bayes oracle for the gaussian-mixture family (nearest
/// component mean), a trained MLP, and arbitrary stubs for tests.
class AttrClassifier {
public:
    enum class Kind { BayesOracle, LearnedMlp, Stub };

    static AttrClassifier bayes_oracle(const SyntheticFamily& family, const AttributeSpec& spec);
    static AttrClassifier learned(MlpParams net, AttributeSpec spec, double accuracy,
                                  double min_accuracy);
    static AttrClassifier stub(AttributeSpec spec,
                               std::function<std::size_t(std::span<const double>)> fn);

    Kind kind() const { return kind_; }
    std::size_t joint_cardinality() const { return spec_.joint_cardinality(); }
    const AttributeSpec& spec() const { return spec_; }
    double accuracy() const { return accuracy_; }

    std::size_t classify(std::span<const double> features) const;
    std::vector<double> one_hot(std::span<const double> features) const;

    /// A learned classifier below its accuracy gate may not be used for FD.
    bool usable_for_fd() const { return accuracy_ >= min_accuracy_; }
    double min_accuracy() const { return min_accuracy_; }

private:
    AttrClassifier() = default;

    Kind kind_ = Kind::Stub;
    AttributeSpec spec_;
    std::vector<std::vector<double>> component_means_;                // oracle
    MlpParams net_;                                                   // learned
    std::function<std::size_t(std::span<const double>)> stub_;        // stub
    double accuracy_ = 1.0;
    double min_accuracy_ = 0.0;
};

/// Fairness Discrepancy from per-class counts: the Euclidean distance
/// between the uniform vector and the empirical one-hot mean.
double fd_from_counts(const std::vector<std::size_t>& counts);

/// Classifies each row of `samples` and computes FD.
double compute_fd_from_samples(const Matrix& samples, const AttrClassifier& classifier);

/// Draws n latents, generates, classifies, returns FD.
double compute_fd(const GanState& state, const AttrClassifier& classifier, std::size_t n,
                  Rng& rng);

/// Maximum attainable FD for joint cardinality k: all mass on one class.
double fd_upper_bound(std::size_t k);

/// Gaussian moment fit of a sample set.
struct GaussStats {
    std::vector<double> mean;
    Matrix covariance;        // symmetric, unbiased
    std::size_t n = 0;
    bool degenerate = false;  // fewer than dim+1 samples

    std::size_t dim() const { return mean.size(); }
};

/// Sample mean and unbiased covariance; needs at least 2 samples.
GaussStats fit_gauss_stats(const Matrix& samples);

/// Squared Frechet distance between two Gaussians:
///   |mu_a - mu_b|^2 + tr(Sa + Sb - 2 (Sa Sb)^{1/2}).
/// The cross term is evaluated as tr((Sa^{1/2} Sb Sa^{1/2})^{1/2}) via
/// symmetric eigendecompositions, eigenvalues clamped at zero.
double frechet_sq(const GaussStats& a, const GaussStats& b);

/// Resamples the holdout to exactly per_class samples of every joint label
/// and fits Gaussian moments; the quality metric references these stats.
GaussStats balanced_reference_stats(const SampleSet& eval_holdout, const AttributeSpec& spec,
                                    std::size_t per_class, Rng& rng);

struct ClassifierConfig {
    std::vector<std::size_t> hidden = {32, 32};
    std::size_t epochs = 60;
    std::size_t batch_size = 64;
    double lr = 1e-3;
    double val_fraction = 0.25;
    double min_accuracy = 0.95;
    std::uint64_t seed = 0;
};

/// Trains a softmax MLP on the labeled evaluation split; the returned
/// classifier records its held-out accuracy and refuses FD duty below
/// config.min_accuracy.
AttrClassifier train_attr_classifier(const SampleSet& eval_split, const AttributeSpec& spec,
                                     const ClassifierConfig& config);

/// One evaluated model.
struct MetricsReport {
    double fd = 0.0;
    double frechet = 0.0;  // squared Frechet distance vs the balanced reference
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::size_t epoch = 0;  // training epoch the snapshot was taken at
};

/// Samples the generator and computes both metrics against fixed reference
/// statistics.
MetricsReport evaluate_gan(const GanState& state, const AttrClassifier& classifier,
                           const GaussStats& reference, std::size_t n, Rng& rng);

}  // namespace fairtl
