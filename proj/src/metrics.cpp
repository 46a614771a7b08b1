#include "fairtl/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fairtl {

AttrClassifier AttrClassifier::bayes_oracle(const SyntheticFamily& family,
                                            const AttributeSpec& spec) {
    if (family.kind != SyntheticFamily::Kind::GaussianMixture2d) {
        throw std::invalid_argument(
            "bayes oracle is analytic only for the gaussian-mixture family");
    }
    family.validate(spec);
    AttrClassifier c;
    c.kind_ = Kind::BayesOracle;
    c.spec_ = spec;
    for (const auto& comp : family.components) c.component_means_.push_back(comp.mean);
    return c;
}

AttrClassifier AttrClassifier::learned(MlpParams net, AttributeSpec spec, double accuracy,
                                       double min_accuracy) {
    net.validate();
    if (net.output_dim() != spec.joint_cardinality()) {
        throw std::invalid_argument("classifier output dim != joint cardinality");
    }
    AttrClassifier c;
    c.kind_ = Kind::LearnedMlp;
    c.spec_ = std::move(spec);
    c.net_ = std::move(net);
    c.accuracy_ = accuracy;
    c.min_accuracy_ = min_accuracy;
    return c;
}

AttrClassifier AttrClassifier::stub(AttributeSpec spec,
                                    std::function<std::size_t(std::span<const double>)> fn) {
    AttrClassifier c;
    c.kind_ = Kind::Stub;
    c.spec_ = std::move(spec);
    c.stub_ = std::move(fn);
    return c;
}

std::size_t AttrClassifier::classify(std::span<const double> features) const {
    std::size_t label = 0;
    switch (kind_) {
        case Kind::BayesOracle: {
            // equal priors, identity covariances: nearest component mean
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < component_means_.size(); ++c) {
                double d2 = 0.0;
                for (std::size_t i = 0; i < features.size(); ++i) {
                    const double d = features[i] - component_means_[c][i];
                    d2 += d * d;
                }
                if (d2 < best) {
                    best = d2;
                    label = c;
                }
            }
            break;
        }
        case Kind::LearnedMlp: {
            Matrix x(1, features.size());
            std::copy(features.begin(), features.end(), x.data());
            Matrix logits = mlp_forward(net_, x);
            label = static_cast<std::size_t>(
                std::max_element(logits.data(), logits.data() + logits.cols()) - logits.data());
            break;
        }
        case Kind::Stub:
            label = stub_(features);
            break;
    }
    if (label >= joint_cardinality()) {
        throw std::runtime_error("classifier produced an out-of-range label");
    }
    return label;
}

std::vector<double> AttrClassifier::one_hot(std::span<const double> features) const {
    std::vector<double> v(joint_cardinality(), 0.0);
    v[classify(features)] = 1.0;
    return v;
}

double fd_from_counts(const std::vector<std::size_t>& counts) {
    const std::size_t k = counts.size();
    if (k < 2) throw std::invalid_argument("fd_from_counts: need at least 2 classes");
    const std::size_t n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    if (n == 0) throw std::invalid_argument("fd_from_counts: no samples");
    const double uniform = 1.0 / static_cast<double>(k);
    double sum_sq = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        const double diff = uniform - static_cast<double>(counts[c]) / static_cast<double>(n);
        sum_sq += diff * diff;
    }
    return std::sqrt(sum_sq);
}

double compute_fd_from_samples(const Matrix& samples, const AttrClassifier& classifier) {
    if (!classifier.usable_for_fd()) {
        throw std::runtime_error("classifier accuracy " + std::to_string(classifier.accuracy()) +
                                 " below required " + std::to_string(classifier.min_accuracy()) +
                                 "; refusing FD computation");
    }
    std::vector<std::size_t> counts(classifier.joint_cardinality(), 0);
    for (std::size_t i = 0; i < samples.rows(); ++i) {
        counts[classifier.classify(samples.row(i))] += 1;
    }
    return fd_from_counts(counts);
}

double compute_fd(const GanState& state, const AttrClassifier& classifier, std::size_t n,
                  Rng& rng) {
    if (n == 0) throw std::invalid_argument("compute_fd: n must be at least 1");
    Matrix z = gauss_sample(rng, n, state.latent_dim());
    Matrix samples = mlp_forward(state.generator, z);
    return compute_fd_from_samples(samples, classifier);
}

double fd_upper_bound(std::size_t k) {
    return std::sqrt(static_cast<double>(k - 1) / static_cast<double>(k));
}

GaussStats fit_gauss_stats(const Matrix& samples) {
    const std::size_t n = samples.rows(), d = samples.cols();
    if (n < 2) throw std::invalid_argument("fit_gauss_stats: need at least 2 samples");
    GaussStats s;
    s.n = n;
    s.degenerate = n < d + 1;
    s.mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = samples.data() + i * d;
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += row[j];
    }
    for (double& m : s.mean) m /= static_cast<double>(n);
    s.covariance = Matrix(d, d);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = samples.data() + i * d;
        for (std::size_t a = 0; a < d; ++a) {
            const double da = row[a] - s.mean[a];
            double* cov_a = s.covariance.data() + a * d;
            for (std::size_t b = a; b < d; ++b) cov_a[b] += da * (row[b] - s.mean[b]);
        }
    }
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            const double v = s.covariance(a, b) / static_cast<double>(n - 1);
            s.covariance(a, b) = v;
            s.covariance(b, a) = v;
        }
    }
    return s;
}

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
    return e;
}

// PSD square root by symmetric eigendecomposition, eigenvalues clamped at 0.
Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("frechet_sq: eigendecomposition failed");
    }
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double frechet_sq(const GaussStats& a, const GaussStats& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("frechet_sq: dimension mismatch");
    const std::size_t d = a.dim();

    double mean_sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = a.mean[i] - b.mean[i];
        mean_sq += diff * diff;
    }

    const Eigen::MatrixXd sa = to_eigen(a.covariance);
    const Eigen::MatrixXd sb = to_eigen(b.covariance);
    const Eigen::MatrixXd root_a = sqrt_psd(sa);
    // tr((Sa Sb)^{1/2}) == tr((Sa^{1/2} Sb Sa^{1/2})^{1/2}); the inner
    // product is symmetric PSD, so one more clamped eigendecomposition does it.
    Eigen::MatrixXd inner = root_a * sb * root_a;
    inner = 0.5 * (inner + inner.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inner);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("frechet_sq: eigendecomposition failed");
    }
    const double tr_cross = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

    const double result = mean_sq + sa.trace() + sb.trace() - 2.0 * tr_cross;
    if (!std::isfinite(result)) {
        throw std::runtime_error("frechet_sq: non-finite result (trace cross term " +
                                 std::to_string(tr_cross) + ")");
    }
    return std::max(result, 0.0);
}

GaussStats balanced_reference_stats(const SampleSet& eval_holdout, const AttributeSpec& spec,
                                    std::size_t per_class, Rng& rng) {
    if (per_class == 0) throw std::invalid_argument("per_class must be positive");
    const std::size_t k = spec.joint_cardinality();
    std::vector<std::vector<std::size_t>> pools(k);
    for (std::size_t i = 0; i < eval_holdout.size(); ++i) {
        if (eval_holdout[i].joint_label >= k) {
            throw std::invalid_argument("holdout label out of range");
        }
        pools[eval_holdout[i].joint_label].push_back(i);
    }
    std::vector<std::size_t> chosen;
    chosen.reserve(per_class * k);
    for (std::size_t c = 0; c < k; ++c) {
        if (pools[c].size() < per_class) {
            throw std::invalid_argument("balanced_reference_stats: class " + std::to_string(c) +
                                        " has only " + std::to_string(pools[c].size()) +
                                        " holdout samples, needs " + std::to_string(per_class));
        }
        if (pools[c].size() > per_class) rng.shuffle(pools[c]);
        chosen.insert(chosen.end(), pools[c].begin(), pools[c].begin() + per_class);
    }
    const std::size_t dim = eval_holdout.front().features.size();
    Matrix m(chosen.size(), dim);
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        std::copy_n(eval_holdout[chosen[i]].features.data(), dim, m.data() + i * dim);
    }
    return fit_gauss_stats(m);
}

namespace {

double mlp_accuracy(const MlpParams& net, const SampleSet& samples,
                    const std::vector<std::size_t>& idx) {
    std::size_t correct = 0;
    for (std::size_t i : idx) {
        Matrix x(1, samples[i].features.size());
        std::copy(samples[i].features.begin(), samples[i].features.end(), x.data());
        Matrix logits = mlp_forward(net, x);
        const std::size_t pred = static_cast<std::size_t>(
            std::max_element(logits.data(), logits.data() + logits.cols()) - logits.data());
        if (pred == samples[i].joint_label) ++correct;
    }
    return idx.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(idx.size());
}

}  // namespace

AttrClassifier train_attr_classifier(const SampleSet& eval_split, const AttributeSpec& spec,
                                     const ClassifierConfig& config) {
    if (eval_split.size() < 4) {
        throw std::invalid_argument("train_attr_classifier: too few labeled samples");
    }
    const std::size_t k = spec.joint_cardinality();
    const std::size_t dim = eval_split.front().features.size();

    Rng rng(config.seed);
    std::vector<std::size_t> order(eval_split.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    const std::size_t n_val =
        std::max<std::size_t>(1, static_cast<std::size_t>(config.val_fraction *
                                                          static_cast<double>(order.size())));
    std::vector<std::size_t> val_idx(order.begin(), order.begin() + n_val);
    std::vector<std::size_t> train_idx(order.begin() + n_val, order.end());

    std::vector<std::size_t> dims = {dim};
    dims.insert(dims.end(), config.hidden.begin(), config.hidden.end());
    dims.push_back(k);
    std::vector<LayerSpec> acts(dims.size() - 1, LayerSpec{Activation::LeakyRelu, 0.2});
    acts.back() = LayerSpec{Activation::Identity};
    MlpParams net = mlp_init(dims, acts, rng);

    AdamState mom = AdamState::zeros_like(net);
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(train_idx);
        for (std::size_t start = 0; start < train_idx.size(); start += config.batch_size) {
            const std::size_t bs = std::min(config.batch_size, train_idx.size() - start);
            Matrix x(bs, dim);
            std::vector<std::size_t> labels(bs);
            for (std::size_t i = 0; i < bs; ++i) {
                const auto& s = eval_split[train_idx[start + i]];
                std::copy(s.features.begin(), s.features.end(), x.data() + i * dim);
                labels[i] = s.joint_label;
            }
            ForwardCache cache;
            Matrix logits = mlp_forward(net, x, &cache);
            // softmax cross-entropy: upstream = (softmax - onehot) / batch
            Matrix up(bs, k);
            for (std::size_t i = 0; i < bs; ++i) {
                const double* row = logits.data() + i * k;
                const double mx = *std::max_element(row, row + k);
                double z = 0.0;
                for (std::size_t c = 0; c < k; ++c) z += std::exp(row[c] - mx);
                for (std::size_t c = 0; c < k; ++c) {
                    const double p = std::exp(row[c] - mx) / z;
                    up(i, c) = (p - (c == labels[i] ? 1.0 : 0.0)) / static_cast<double>(bs);
                }
            }
            MlpGradients grads;
            mlp_backward(net, cache, up, grads);
            mom.step += 1;
            const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(mom.step));
            const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(mom.step));
            for (std::size_t l = 0; l < net.num_layers(); ++l) {
                double* w = net.weights[l].data();
                double* mw = mom.m_w[l].data();
                double* vw = mom.v_w[l].data();
                const double* gw = grads.weights[l].data();
                for (std::size_t j = 0; j < net.weights[l].size(); ++j) {
                    mw[j] = beta1 * mw[j] + (1.0 - beta1) * gw[j];
                    vw[j] = beta2 * vw[j] + (1.0 - beta2) * gw[j] * gw[j];
                    w[j] -= config.lr * (mw[j] / bc1) / (std::sqrt(vw[j] / bc2) + eps);
                }
                for (std::size_t j = 0; j < net.biases[l].size(); ++j) {
                    double& mb = mom.m_b[l][j];
                    double& vb = mom.v_b[l][j];
                    const double gb = grads.biases[l][j];
                    mb = beta1 * mb + (1.0 - beta1) * gb;
                    vb = beta2 * vb + (1.0 - beta2) * gb * gb;
                    net.biases[l][j] -= config.lr * (mb / bc1) / (std::sqrt(vb / bc2) + eps);
                }
            }
        }
    }
    const double acc = mlp_accuracy(net, eval_split, val_idx);
    return AttrClassifier::learned(std::move(net), spec, acc, config.min_accuracy);
}

MetricsReport evaluate_gan(const GanState& state, const AttrClassifier& classifier,
                           const GaussStats& reference, std::size_t n, Rng& rng) {
    MetricsReport rep;
    rep.n_samples = n;
    rep.seed = rng.seed();
    Matrix z = gauss_sample(rng, n, state.latent_dim());
    Matrix samples = mlp_forward(state.generator, z);
    rep.fd = compute_fd_from_samples(samples, classifier);
    rep.frechet = frechet_sq(fit_gauss_stats(samples), reference);
    return rep;
}

}  // namespace fairtl
