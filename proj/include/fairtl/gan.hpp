#pragma once

#include <optional>
#include <string>

#include "fairtl/numerics.hpp"

namespace fairtl {

enum class Stage { Pretrained, FairTL, FairTLpp };

std::string stage_name(Stage s);
Stage stage_from_name(const std::string& name);

/// Per-parameter first/second moment accumulators (adaptive moment
/// estimation) for one network.
struct AdamState {
    std::vector<Matrix> m_w, v_w;
    std::vector<std::vector<double>> m_b, v_b;
    std::int64_t step = 0;

    static AdamState zeros_like(const MlpParams& net);
    bool initialized() const { return !m_w.empty(); }
};

struct OptimizerState {
    AdamState gen;
    AdamState disc;
};

/// Generator + target discriminator, plus (fairTL++ only) a frozen copy of
/// the source discriminator that is scored but never updated.
struct GanState {
    MlpParams generator;
    MlpParams discriminator;
    std::optional<MlpParams> frozen_source_discriminator;
    Stage stage = Stage::Pretrained;
    OptimizerState opt;

    std::size_t latent_dim() const { return generator.input_dim(); }
    std::size_t data_dim() const { return generator.output_dim(); }

    /// frozen_source_discriminator present iff stage == FairTLpp.
    void validate() const;
};

/// Linear-Probing mask: per-discriminator-layer freeze flags that are live
/// only while epoch < active_until_epoch. Generator layers are never frozen.
struct FreezeMask {
    std::vector<bool> frozen_layers;
    std::size_t active_until_epoch = 0;

    bool layer_frozen(std::size_t layer, std::size_t epoch) const {
        return epoch < active_until_epoch && layer < frozen_layers.size() &&
               frozen_layers[layer];
    }
    bool any_active(std::size_t epoch) const;

    static FreezeMask none();
    /// Freeze the two layers nearest the discriminator input for T epochs.
    static FreezeMask input_nearest_two(std::size_t num_disc_layers, std::size_t lp_epochs);

    /// Zeroes gradient entries of layers frozen at `epoch`.
    void zero_frozen(MlpGradients& disc_grads, std::size_t epoch) const;
};

enum class GenLossForm { Saturating, NonSaturating };

struct LossConfig {
    /// Weight on the target-discriminator fake term of the two-discriminator
    /// generator objective; the frozen source discriminator gets 1 - lambda.
    /// Ignored (treated as 1) outside the fairTL++ stage.
    double lambda = 0.6;
    GenLossForm form = GenLossForm::NonSaturating;
    std::size_t batch_size = 64;
    double lr_g = 2e-4;
    double lr_d = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double adam_eps = 1e-8;

    void validate() const;
};

/// Discriminator outputs are clamped into [kProbEps, 1-kProbEps] before any
/// log; clamps are counted in LossDiagnostics.
inline constexpr double kProbEps = 1e-7;

struct LossDiagnostics {
    std::size_t clamped_outputs = 0;
};

struct DiscLossResult {
    double value = 0.0;       // E[log D_t(x)] + E[log(1 - D_t(fake))], maximized by D_t
    MlpGradients grads;       // d(value)/d(theta_Dt); ascent direction
    LossDiagnostics diag;
};

/// Scores a real and an already-generated fake batch. Only the target
/// discriminator receives gradients; the frozen source discriminator plays
/// no part in the discriminator update.
DiscLossResult discriminator_loss(const GanState& state, const Matrix& real_batch,
                                  const Matrix& fake_batch);

struct GenLossResult {
    double value = 0.0;       // generator objective, minimized by G_t
    MlpGradients grads;       // d(value)/d(theta_Gt); descent direction
    LossDiagnostics diag;
};

/// Generator objective on a noise batch. In the fairTL++ stage the fake
/// samples are scored by both discriminators and the two terms mixed by
/// lambda; otherwise only the target discriminator scores them. Saturating
/// form uses E[log(1 - D(G(z)))], non-saturating uses E[-log D(G(z))];
/// the lambda mixture is the same in both forms.
GenLossResult generator_loss(const GanState& state, const Matrix& noise_batch,
                             const LossConfig& config);

struct GanGradients {
    std::optional<MlpGradients> gen;   // descent (present when updating G)
    std::optional<MlpGradients> disc;  // ascent (present when updating D)
};

/// One optimizer step. Discriminator layers frozen by `mask` at `epoch` are
/// left bit-for-bit unchanged (parameters and moments); the frozen source
/// discriminator is never touched.
void apply_update(GanState& state, const GanGradients& grads, const FreezeMask& mask,
                  std::size_t epoch, const LossConfig& config);

/// Per-layer mean absolute difference over all weight and bias entries.
std::vector<double> layer_weight_change(const MlpParams& before, const MlpParams& after);

}  // namespace fairtl
