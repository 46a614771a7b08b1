#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace fairtl {

/// Dense row-major matrix of doubles. The workhorse container for batches,
/// weights and gradients; shape is fixed at construction.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const {
        return {values_.data() + r * cols_, cols_};
    }

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    bool all_finite() const;
    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

// C = A * B^T, A: n x k, B: m x k  ->  n x m
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// C = A * B, A: n x m, B: m x k  ->  n x k
Matrix matmul_nn(const Matrix& a, const Matrix& b);
// C = A^T * B, A: n x m, B: n x k  ->  m x k
Matrix matmul_tn(const Matrix& a, const Matrix& b);

/// Seeded pseudo-random source. Engine is std::mt19937_64 (output sequence
/// fixed by the C++ standard); all conversions to doubles are implemented
/// here so that streams are identical across platforms and compilers.
/// All stochastic operations in this project draw from an explicitly
/// passed Rng; there is no ambient random state anywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the second variate of each pair is
    /// cached, so state = (engine, spare).
    double normal();

    /// Uniform integer in [0, n). Rejection sampling, bias-free.
    std::uint64_t below(std::uint64_t n);

    /// Derive an independently seeded stream; deterministic in (seed, stream).
    Rng split(std::uint64_t stream) const;

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
        }
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Matrix of i.i.d. standard normal draws, consumed row by row.
Matrix gauss_sample(Rng& rng, std::size_t rows, std::size_t cols);

enum class Activation { LeakyRelu, Tanh, Sigmoid, Identity };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct LayerSpec {
    Activation act = Activation::Identity;
    double leaky_slope = 0.2;  // only used by LeakyRelu

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Parameters of a dense multi-layer perceptron.
/// weights[i] has shape layer_dims[i+1] x layer_dims[i] (row-major, one row
/// per output unit), biases[i] has length layer_dims[i+1]. At least two
/// layers (one hidden layer) are required.
struct MlpParams {
    std::vector<std::size_t> layer_dims;
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    std::vector<LayerSpec> activations;  // one per layer

    std::size_t num_layers() const { return weights.size(); }
    std::size_t input_dim() const { return layer_dims.front(); }
    std::size_t output_dim() const { return layer_dims.back(); }
    std::size_t parameter_count() const;

    /// Throws std::invalid_argument if shapes are inconsistent or fewer than
    /// two layers are present.
    void validate() const;

    friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

/// Random-normal init: He scaling for leaky-relu layers, Xavier otherwise;
/// biases zero. `hidden_acts` applies to all but the last layer.
MlpParams mlp_init(const std::vector<std::size_t>& layer_dims,
                   const std::vector<LayerSpec>& layer_acts, Rng& rng);

struct ForwardCache {
    Matrix input;
    std::vector<Matrix> pre;   // pre-activations per layer
    std::vector<Matrix> post;  // post-activations per layer; post.back() is the output
};

/// Batched forward pass; rows of `input` are samples. When `cache` is given,
/// per-layer pre/post activations are stored for backward().
Matrix mlp_forward(const MlpParams& net, const Matrix& input, ForwardCache* cache = nullptr);

struct MlpGradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    static MlpGradients zeros_like(const MlpParams& net);
    void scale(double s);
    void add_scaled(const MlpGradients& other, double s);
};

/// Exact gradients of the forward map. `upstream` is dL/d(output) with the
/// same shape as the forward output; returns dL/d(input) so callers can
/// chain networks (generator through discriminator).
Matrix mlp_backward(const MlpParams& net, const ForwardCache& cache, const Matrix& upstream,
                    MlpGradients& grads);

/// FNV-1a checksum over a network's raw parameter bytes.
std::uint64_t params_checksum(const MlpParams& net);

}  // namespace fairtl
