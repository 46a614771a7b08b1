#include "fairtl/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fairtl/hash.hpp"

namespace fairtl {

namespace {

[[noreturn]] void shape_error(const std::string& what) {
    throw std::invalid_argument("shape error: " + what);
}

}  // namespace

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t r = 0;
    for (const auto& row : rows) {
        if (row.size() != m.cols()) shape_error("ragged initializer rows");
        std::size_t c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

bool Matrix::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) shape_error("matmul_nt inner dims");
    const std::size_t n = a.rows(), m = b.rows(), k = a.cols();
    Matrix c(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        const double* ai = a.data() + i * k;
        double* ci = c.data() + i * m;
        for (std::size_t j = 0; j < m; ++j) {
            const double* bj = b.data() + j * k;
            double acc = 0.0;
            for (std::size_t l = 0; l < k; ++l) acc += ai[l] * bj[l];
            ci[j] = acc;
        }
    }
    return c;
}

Matrix matmul_nn(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) shape_error("matmul_nn inner dims");
    const std::size_t n = a.rows(), m = a.cols(), k = b.cols();
    Matrix c(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        const double* ai = a.data() + i * m;
        double* ci = c.data() + i * k;
        for (std::size_t j = 0; j < m; ++j) {
            const double aij = ai[j];
            const double* bj = b.data() + j * k;
            for (std::size_t l = 0; l < k; ++l) ci[l] += aij * bj[l];
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) shape_error("matmul_tn inner dims");
    const std::size_t n = a.rows(), m = a.cols(), k = b.cols();
    Matrix c(m, k);
    for (std::size_t i = 0; i < n; ++i) {
        const double* ai = a.data() + i * m;
        const double* bi = b.data() + i * k;
        for (std::size_t j = 0; j < m; ++j) {
            const double aij = ai[j];
            double* cj = c.data() + j * k;
            for (std::size_t l = 0; l < k; ++l) cj[l] += aij * bi[l];
        }
    }
    return c;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // u1 in (0, 1] so log is finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

Rng Rng::split(std::uint64_t stream) const { return Rng(mix64(seed_, stream)); }

Matrix gauss_sample(Rng& rng, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("gauss_sample: rows and cols must be positive");
    }
    Matrix m(rows, cols);
    for (double& v : m.values()) v = rng.normal();
    return m;
}

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::LeakyRelu: return "leaky-relu";
        case Activation::Tanh: return "tanh";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Identity: return "identity";
    }
    return "?";
}

Activation activation_from_name(const std::string& name) {
    if (name == "leaky-relu") return Activation::LeakyRelu;
    if (name == "tanh") return Activation::Tanh;
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "identity") return Activation::Identity;
    throw std::invalid_argument("unknown activation: " + name);
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < num_layers(); ++i) n += weights[i].size() + biases[i].size();
    return n;
}

void MlpParams::validate() const {
    if (layer_dims.size() < 3) {
        throw std::invalid_argument("MlpParams: need at least 2 layers (one hidden)");
    }
    const std::size_t L = layer_dims.size() - 1;
    if (weights.size() != L || biases.size() != L || activations.size() != L) {
        throw std::invalid_argument("MlpParams: per-layer containers disagree with layer_dims");
    }
    for (std::size_t i = 0; i < L; ++i) {
        if (layer_dims[i] == 0) throw std::invalid_argument("MlpParams: zero-width layer");
        if (weights[i].rows() != layer_dims[i + 1] || weights[i].cols() != layer_dims[i]) {
            shape_error("weights[" + std::to_string(i) + "]");
        }
        if (biases[i].size() != layer_dims[i + 1]) {
            shape_error("biases[" + std::to_string(i) + "]");
        }
    }
    if (layer_dims.back() == 0) throw std::invalid_argument("MlpParams: zero-width layer");
}

MlpParams mlp_init(const std::vector<std::size_t>& layer_dims,
                   const std::vector<LayerSpec>& layer_acts, Rng& rng) {
    if (layer_dims.size() < 3) {
        throw std::invalid_argument("mlp_init: need at least 2 layers (one hidden)");
    }
    if (layer_acts.size() != layer_dims.size() - 1) {
        throw std::invalid_argument("mlp_init: one activation per layer required");
    }
    MlpParams net;
    net.layer_dims = layer_dims;
    net.activations = layer_acts;
    for (std::size_t i = 0; i + 1 < layer_dims.size(); ++i) {
        const std::size_t fan_in = layer_dims[i];
        const double std_dev = layer_acts[i].act == Activation::LeakyRelu
                                   ? std::sqrt(2.0 / static_cast<double>(fan_in))
                                   : std::sqrt(1.0 / static_cast<double>(fan_in));
        Matrix w(layer_dims[i + 1], layer_dims[i]);
        for (double& v : w.values()) v = rng.normal() * std_dev;
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(layer_dims[i + 1], 0.0);
    }
    net.validate();
    return net;
}

namespace {

void apply_activation(const LayerSpec& spec, Matrix& m) {
    switch (spec.act) {
        case Activation::LeakyRelu: {
            const double s = spec.leaky_slope;
            for (double& v : m.values()) v = v >= 0.0 ? v : s * v;
            break;
        }
        case Activation::Tanh:
            for (double& v : m.values()) v = std::tanh(v);
            break;
        case Activation::Sigmoid:
            for (double& v : m.values()) v = 1.0 / (1.0 + std::exp(-v));
            break;
        case Activation::Identity:
            break;
    }
}

// Multiplies `g` in place by act'(pre), using post where that is cheaper.
void apply_activation_grad(const LayerSpec& spec, const Matrix& pre, const Matrix& post,
                           Matrix& g) {
    switch (spec.act) {
        case Activation::LeakyRelu: {
            const double s = spec.leaky_slope;
            const double* p = pre.data();
            double* gv = g.data();
            for (std::size_t i = 0; i < g.size(); ++i) gv[i] *= p[i] >= 0.0 ? 1.0 : s;
            break;
        }
        case Activation::Tanh: {
            const double* y = post.data();
            double* gv = g.data();
            for (std::size_t i = 0; i < g.size(); ++i) gv[i] *= 1.0 - y[i] * y[i];
            break;
        }
        case Activation::Sigmoid: {
            const double* y = post.data();
            double* gv = g.data();
            for (std::size_t i = 0; i < g.size(); ++i) gv[i] *= y[i] * (1.0 - y[i]);
            break;
        }
        case Activation::Identity:
            break;
    }
}

}  // namespace

Matrix mlp_forward(const MlpParams& net, const Matrix& input, ForwardCache* cache) {
    net.validate();
    if (input.cols() != net.input_dim()) {
        shape_error("mlp_forward: input cols " + std::to_string(input.cols()) +
                    " != input dim " + std::to_string(net.input_dim()));
    }
    if (cache) {
        cache->input = input;
        cache->pre.clear();
        cache->post.clear();
    }
    Matrix x = input;
    for (std::size_t i = 0; i < net.num_layers(); ++i) {
        Matrix z = matmul_nt(x, net.weights[i]);
        const std::vector<double>& b = net.biases[i];
        for (std::size_t r = 0; r < z.rows(); ++r) {
            double* zr = z.data() + r * z.cols();
            for (std::size_t c = 0; c < z.cols(); ++c) zr[c] += b[c];
        }
        if (cache) cache->pre.push_back(z);
        apply_activation(net.activations[i], z);
        if (cache) cache->post.push_back(z);
        x = std::move(z);
    }
    if (!x.all_finite()) {
        throw std::runtime_error("mlp_forward: non-finite output");
    }
    return x;
}

MlpGradients MlpGradients::zeros_like(const MlpParams& net) {
    MlpGradients g;
    for (std::size_t i = 0; i < net.num_layers(); ++i) {
        g.weights.emplace_back(net.weights[i].rows(), net.weights[i].cols());
        g.biases.emplace_back(net.biases[i].size(), 0.0);
    }
    return g;
}

void MlpGradients::scale(double s) {
    for (auto& w : weights)
        for (double& v : w.values()) v *= s;
    for (auto& b : biases)
        for (double& v : b) v *= s;
}

void MlpGradients::add_scaled(const MlpGradients& other, double s) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double* ov = other.weights[i].data();
        double* wv = weights[i].data();
        for (std::size_t j = 0; j < weights[i].size(); ++j) wv[j] += s * ov[j];
        for (std::size_t j = 0; j < biases[i].size(); ++j) biases[i][j] += s * other.biases[i][j];
    }
}

Matrix mlp_backward(const MlpParams& net, const ForwardCache& cache, const Matrix& upstream,
                    MlpGradients& grads) {
    const std::size_t L = net.num_layers();
    if (cache.pre.size() != L || cache.post.size() != L) {
        shape_error("mlp_backward: cache does not match network");
    }
    if (!upstream.same_shape(cache.post.back())) {
        shape_error("mlp_backward: upstream shape");
    }
    grads.weights.assign(L, Matrix());
    grads.biases.assign(L, {});

    Matrix g = upstream;
    for (std::size_t i = L; i-- > 0;) {
        apply_activation_grad(net.activations[i], cache.pre[i], cache.post[i], g);
        const Matrix& layer_in = i == 0 ? cache.input : cache.post[i - 1];
        grads.weights[i] = matmul_tn(g, layer_in);
        std::vector<double> db(g.cols(), 0.0);
        for (std::size_t r = 0; r < g.rows(); ++r) {
            const double* gr = g.data() + r * g.cols();
            for (std::size_t c = 0; c < g.cols(); ++c) db[c] += gr[c];
        }
        grads.biases[i] = std::move(db);
        g = matmul_nn(g, net.weights[i]);
    }
    return g;
}

std::uint64_t params_checksum(const MlpParams& net) {
    std::uint64_t h = kFnvOffset;
    h = fnv1a64_values(std::span<const std::size_t>(net.layer_dims), h);
    for (std::size_t i = 0; i < net.num_layers(); ++i) {
        h = fnv1a64_values(net.weights[i].values(), h);
        h = fnv1a64_values(std::span<const double>(net.biases[i]), h);
    }
    return h;
}

}  // namespace fairtl
