#include "fairtl/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fairtl {

AttributeSpec::AttributeSpec(std::vector<Attribute> attrs) : attributes(std::move(attrs)) {
    if (attributes.empty()) {
        throw std::invalid_argument("AttributeSpec: at least one attribute required");
    }
    for (const auto& a : attributes) {
        if (a.cardinality < 2) {
            throw std::invalid_argument("AttributeSpec: attribute '" + a.name +
                                        "' needs cardinality >= 2");
        }
        if (a.name.empty()) throw std::invalid_argument("AttributeSpec: empty attribute name");
    }
}

AttributeSpec AttributeSpec::single(const std::string& name, std::size_t cardinality) {
    return AttributeSpec({{name, cardinality}});
}

std::size_t AttributeSpec::joint_cardinality() const {
    std::size_t k = 1;
    for (const auto& a : attributes) k *= a.cardinality;
    return k;
}

std::string AttributeSpec::describe() const {
    std::string s;
    for (const auto& a : attributes) {
        if (!s.empty()) s += ",";
        s += a.name + ":" + std::to_string(a.cardinality);
    }
    return s;
}

FeatureView::FeatureView(const SampleSet& samples) {
    rows_.reserve(samples.size());
    for (const auto& s : samples) {
        if (rows_.empty()) {
            feature_dim_ = s.features.size();
        } else if (s.features.size() != feature_dim_) {
            throw std::invalid_argument("FeatureView: inconsistent feature dims");
        }
        rows_.push_back(s.features.data());
    }
}

Matrix FeatureView::gather(std::span<const std::size_t> indices) const {
    Matrix m(indices.size(), feature_dim_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        std::copy_n(rows_[indices[i]], feature_dim_, m.data() + i * feature_dim_);
    }
    return m;
}

Matrix FeatureView::all_rows() const {
    Matrix m(rows_.size(), feature_dim_);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        std::copy_n(rows_[i], feature_dim_, m.data() + i * feature_dim_);
    }
    return m;
}

FeatureView strip_labels(const SampleSet& samples) { return FeatureView(samples); }

SyntheticFamily SyntheticFamily::gaussian_ring(const AttributeSpec& spec, double radius) {
    SyntheticFamily f;
    f.kind = Kind::GaussianMixture2d;
    f.feature_dim = 2;
    const std::size_t k = spec.joint_cardinality();
    for (std::size_t c = 0; c < k; ++c) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(k);
        f.components.push_back({{radius * std::cos(angle), radius * std::sin(angle)}});
    }
    return f;
}

SyntheticFamily SyntheticFamily::procedural_images(const AttributeSpec& spec) {
    const std::size_t k = spec.joint_cardinality();
    if (k > 4) {
        throw std::invalid_argument(
            "procedural-image-8x8 family defines recipes for at most 4 joint labels");
    }
    SyntheticFamily f;
    f.kind = Kind::ProceduralImage8x8;
    f.feature_dim = 64;
    for (std::size_t c = 0; c < k; ++c) {
        ImageRecipe r;
        r.disk = c % 2 == 0;
        if (r.disk) {
            r.shade_lo = 0.7;
            r.shade_hi = 0.9;
        } else {
            r.shade_lo = 0.1;
            r.shade_hi = 0.3;
        }
        // labels 2 and 3 use the inner band of the same shade range
        if (c >= 2) {
            const double mid = 0.5 * (r.shade_lo + r.shade_hi);
            if (r.disk) r.shade_hi = mid; else r.shade_lo = mid;
        }
        f.image_recipes.push_back(r);
    }
    return f;
}

SyntheticFamily SyntheticFamily::from_kind(Kind kind, const AttributeSpec& spec) {
    return kind == Kind::GaussianMixture2d ? gaussian_ring(spec) : procedural_images(spec);
}

SyntheticFamily::Kind SyntheticFamily::kind_from_name(const std::string& name) {
    if (name == "gauss2d" || name == "gaussian-mixture-2d") return Kind::GaussianMixture2d;
    if (name == "image8x8" || name == "procedural-image-8x8") return Kind::ProceduralImage8x8;
    throw std::invalid_argument("unknown family: " + name);
}

std::string SyntheticFamily::kind_name(Kind kind) {
    return kind == Kind::GaussianMixture2d ? "gauss2d" : "image8x8";
}

void SyntheticFamily::validate(const AttributeSpec& spec) const {
    const std::size_t k = spec.joint_cardinality();
    if (kind == Kind::GaussianMixture2d) {
        if (components.size() != k) {
            throw std::invalid_argument("family/spec mismatch: need one component per joint label");
        }
        for (const auto& c : components) {
            if (c.mean.size() != feature_dim) {
                throw std::invalid_argument("family: component mean dim != feature_dim");
            }
        }
    } else {
        if (image_recipes.size() != k) {
            throw std::invalid_argument("family/spec mismatch: need one recipe per joint label");
        }
        if (feature_dim != 64) {
            throw std::invalid_argument("image family: feature_dim must be 64");
        }
    }
}

namespace {

std::vector<double> draw_image(const SyntheticFamily::ImageRecipe& r, Rng& rng) {
    constexpr int kSide = 8;
    std::vector<double> px(kSide * kSide, 0.5);
    const double shade = r.shade_lo + (r.shade_hi - r.shade_lo) * rng.uniform01();
    const int jx = static_cast<int>(rng.below(3)) - 1;
    const int jy = static_cast<int>(rng.below(3)) - 1;
    const double cx = 3.5 + jx, cy = 3.5 + jy;
    for (int y = 0; y < kSide; ++y) {
        for (int x = 0; x < kSide; ++x) {
            bool inside;
            if (r.disk) {
                const double dx = x - cx, dy = y - cy;
                inside = dx * dx + dy * dy <= 2.2 * 2.2;
            } else {
                inside = std::abs(x - cx) <= 2.0 && std::abs(y - cy) <= 2.0;
            }
            if (inside) px[y * kSide + x] = shade;
        }
    }
    for (double& v : px) v += 0.02 * rng.normal();
    return px;
}

}  // namespace

SampleSet generate_base(const SyntheticFamily& family, const AttributeSpec& spec, std::size_t n,
                        Rng& rng) {
    if (n == 0) throw std::invalid_argument("generate_base: n must be positive");
    family.validate(spec);
    const std::size_t k = spec.joint_cardinality();
    const std::vector<std::size_t> counts =
        largest_remainder_counts(std::vector<double>(k, 1.0 / static_cast<double>(k)), n);

    SampleSet out;
    out.reserve(n);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < counts[c]; ++i) {
            LabeledSample s;
            s.joint_label = c;
            if (family.kind == SyntheticFamily::Kind::GaussianMixture2d) {
                s.features.resize(family.feature_dim);
                for (std::size_t d = 0; d < family.feature_dim; ++d) {
                    s.features[d] = family.components[c].mean[d] + rng.normal();
                }
            } else {
                s.features = draw_image(family.image_recipes[c], rng);
            }
            out.push_back(std::move(s));
        }
    }
    rng.shuffle(out);
    return out;
}

std::vector<std::size_t> largest_remainder_counts(const std::vector<double>& probs,
                                                  std::size_t total) {
    double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("probability vector must sum to 1 within 1e-9");
    }
    const std::size_t k = probs.size();
    std::vector<std::size_t> counts(k);
    std::vector<std::pair<double, std::size_t>> remainders(k);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (probs[i] < 0.0) throw std::invalid_argument("negative probability");
        const double exact = probs[i] * static_cast<double>(total);
        counts[i] = static_cast<std::size_t>(std::floor(exact));
        assigned += counts[i];
        remainders[i] = {exact - std::floor(exact), i};
    }
    // biggest remainder first; ties by lowest class index
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t i = 0; assigned < total; ++i, ++assigned) {
        counts[remainders[i % k].second] += 1;
    }
    return counts;
}

std::vector<std::size_t> class_counts(const SampleSet& samples, std::size_t joint_cardinality) {
    std::vector<std::size_t> counts(joint_cardinality, 0);
    for (const auto& s : samples) {
        if (s.joint_label >= joint_cardinality) {
            throw std::invalid_argument("sample label out of range");
        }
        counts[s.joint_label] += 1;
    }
    return counts;
}

DatasetPair build_dataset_pair(const SampleSet& base, const std::vector<double>& bias_vector,
                               std::size_t size_bias, double perc, Rng& rng) {
    if (perc <= 0.0 || perc > 1.0) throw std::invalid_argument("perc must be in (0, 1]");
    if (size_bias == 0) throw std::invalid_argument("size_bias must be positive");
    const std::size_t k = bias_vector.size();

    const std::vector<std::size_t> bias_counts = largest_remainder_counts(bias_vector, size_bias);
    const std::size_t n_ref =
        static_cast<std::size_t>(std::llround(perc * static_cast<double>(size_bias)));
    const std::vector<std::size_t> ref_counts =
        largest_remainder_counts(std::vector<double>(k, 1.0 / static_cast<double>(k)), n_ref);

    // per-class index pools, shuffled so draws are random but reproducible
    std::vector<std::vector<std::size_t>> pools(k);
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (base[i].joint_label >= k) {
            throw std::invalid_argument("build_dataset_pair: label outside bias vector range");
        }
        pools[base[i].joint_label].push_back(i);
    }
    for (auto& pool : pools) rng.shuffle(pool);

    for (std::size_t c = 0; c < k; ++c) {
        if (pools[c].size() < bias_counts[c] + ref_counts[c]) {
            throw std::invalid_argument("build_dataset_pair: class " + std::to_string(c) +
                                        " has " + std::to_string(pools[c].size()) +
                                        " base samples, needs " +
                                        std::to_string(bias_counts[c] + ref_counts[c]));
        }
    }

    DatasetPair pair;
    pair.bias_vector = bias_vector;
    pair.perc = perc;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t next = 0;
        for (std::size_t i = 0; i < bias_counts[c]; ++i) pair.d_bias.push_back(base[pools[c][next++]]);
        for (std::size_t i = 0; i < ref_counts[c]; ++i) pair.d_ref.push_back(base[pools[c][next++]]);
        for (; next < pools[c].size(); ++next) pair.eval_holdout.push_back(base[pools[c][next]]);
    }
    rng.shuffle(pair.d_bias);
    rng.shuffle(pair.d_ref);
    rng.shuffle(pair.eval_holdout);
    return pair;
}

void save_samples(const std::filesystem::path& path, const SampleSet& samples,
                  std::size_t joint_cardinality) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    const std::size_t dim = samples.empty() ? 0 : samples.front().features.size();
    out << "fairtl-dataset 1\n";
    out << dim << " " << joint_cardinality << " " << samples.size() << "\n";
    char buf[40];
    for (const auto& s : samples) {
        if (s.features.size() != dim) {
            throw std::invalid_argument("save_samples: inconsistent feature dims");
        }
        for (double v : s.features) {
            std::snprintf(buf, sizeof(buf), "%a", v);
            out << buf << " ";
        }
        out << s.joint_label << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

SampleSet load_samples(const std::filesystem::path& path, std::size_t* joint_cardinality_out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string magic, version;
    in >> magic >> version;
    if (magic != "fairtl-dataset" || version != "1") {
        throw std::runtime_error("not a fairtl-dataset v1 file: " + path.string());
    }
    std::size_t dim = 0, k = 0, n = 0;
    in >> dim >> k >> n;
    if (!in) throw std::runtime_error("bad dataset header: " + path.string());
    SampleSet samples;
    samples.reserve(n);
    std::string tok;
    for (std::size_t i = 0; i < n; ++i) {
        LabeledSample s;
        s.features.resize(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            in >> tok;
            if (!in) throw std::runtime_error("truncated dataset file: " + path.string());
            s.features[d] = std::strtod(tok.c_str(), nullptr);
        }
        in >> s.joint_label;
        if (!in) throw std::runtime_error("truncated dataset file: " + path.string());
        if (s.joint_label >= k) throw std::runtime_error("label out of range in " + path.string());
        samples.push_back(std::move(s));
    }
    if (joint_cardinality_out) *joint_cardinality_out = k;
    return samples;
}

}  // namespace fairtl
