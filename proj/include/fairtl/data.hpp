#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fairtl/numerics.hpp"

namespace fairtl {

/// Declares the sensitive attributes under study. The joint label space is
/// the cross product of all attribute values; fairness is always evaluated
/// over joint labels.
struct AttributeSpec {
    struct Attribute {
        std::string name;
        std::size_t cardinality;  // >= 2
    };

    std::vector<Attribute> attributes;

    AttributeSpec() = default;
    explicit AttributeSpec(std::vector<Attribute> attrs);

    static AttributeSpec single(const std::string& name, std::size_t cardinality);

    std::size_t joint_cardinality() const;
    std::string describe() const;
};

struct LabeledSample {
    std::vector<double> features;
    std::size_t joint_label;
};

using SampleSet = std::vector<LabeledSample>;

/// Feature-only view over labeled samples. Training code accepts only this
/// type, so labels cannot leak into any fairness-enforcement path.
class FeatureView {
public:
    FeatureView() = default;
    explicit FeatureView(const SampleSet& samples);

    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }
    std::size_t feature_dim() const { return feature_dim_; }
    std::span<const double> row(std::size_t i) const { return {rows_[i], feature_dim_}; }

    /// Gathers the given rows into a dense batch.
    Matrix gather(std::span<const std::size_t> indices) const;
    Matrix all_rows() const;

private:
    std::vector<const double*> rows_;
    std::size_t feature_dim_ = 0;
};

FeatureView strip_labels(const SampleSet& samples);
inline FeatureView strip_labels(const FeatureView& view) { return view; }  // idempotent

/// Per-joint-label synthetic data recipes. Two families:
///  - gaussian-mixture-2d: component means on a circle of radius `radius`,
///    identity covariance, feature_dim 2. The Bayes-optimal attribute
///    classifier is nearest-mean, which the metrics module exploits.
///  - procedural-image-8x8: 64-dim grayscale images on a mid-gray
///    background; even labels draw a bright disk, odd labels a dark square,
///    with the shade band alternating every two labels. Position jittered
///    by one pixel, plus light pixel noise.
struct SyntheticFamily {
    enum class Kind { GaussianMixture2d, ProceduralImage8x8 };

    struct GaussComponent {
        std::vector<double> mean;  // identity covariance
    };

    struct ImageRecipe {
        bool disk = true;       // false = square
        double shade_lo = 0.7;  // shade drawn uniformly from [lo, hi]
        double shade_hi = 0.9;
    };

    Kind kind = Kind::GaussianMixture2d;
    std::size_t feature_dim = 2;
    std::vector<GaussComponent> components;   // gaussian family
    std::vector<ImageRecipe> image_recipes;   // image family

    static SyntheticFamily gaussian_ring(const AttributeSpec& spec, double radius = 2.0);
    static SyntheticFamily procedural_images(const AttributeSpec& spec);
    static SyntheticFamily from_kind(Kind kind, const AttributeSpec& spec);

    static Kind kind_from_name(const std::string& name);
    static std::string kind_name(Kind kind);

    /// One recipe per joint label, consistent feature_dim.
    void validate(const AttributeSpec& spec) const;
};

/// Draws n samples stratified uniformly over joint labels (largest-remainder
/// apportionment of the uniform target), features from each label's
/// component; sample order is shuffled.
SampleSet generate_base(const SyntheticFamily& family, const AttributeSpec& spec, std::size_t n,
                        Rng& rng);

/// The constructed biased/reference split plus a disjoint evaluation holdout.
struct DatasetPair {
    SampleSet d_bias;
    SampleSet d_ref;
    SampleSet eval_holdout;
    std::vector<double> bias_vector;
    double perc = 0.0;
};

/// Exact integer apportionment of `total` over `probs` (largest remainder,
/// ties broken by lowest index).
std::vector<std::size_t> largest_remainder_counts(const std::vector<double>& probs,
                                                  std::size_t total);

/// Splits `base` into a biased set with per-class counts
/// largest_remainder(size_bias * bias_vector), a reference set of
/// round(perc * size_bias) samples spread uniformly over classes, and a
/// holdout taking everything left over. The three parts draw disjoint
/// samples; an insufficient class is reported by name.
DatasetPair build_dataset_pair(const SampleSet& base, const std::vector<double>& bias_vector,
                               std::size_t size_bias, double perc, Rng& rng);

std::vector<std::size_t> class_counts(const SampleSet& samples, std::size_t joint_cardinality);

/// Columnar text cache. Line 1: "fairtl-dataset 1", line 2:
/// "<feature_dim> <joint_cardinality> <count>", then one sample per line as
/// hex-float features followed by the label. Round-trips doubles exactly.
void save_samples(const std::filesystem::path& path, const SampleSet& samples,
                  std::size_t joint_cardinality);
SampleSet load_samples(const std::filesystem::path& path, std::size_t* joint_cardinality_out);

}  // namespace fairtl
