#pragma once

#include <functional>

#include "fairtl/data.hpp"
#include "fairtl/gan.hpp"
#include "fairtl/metrics.hpp"

namespace fairtl {

/// Network shapes for one experiment. Defaults are the 2d-benchmark sizes;
/// for_family() widens them for the image family.
struct ArchSpec {
    std::size_t latent_dim = 8;
    std::vector<std::size_t> gen_hidden = {32, 64};
    std::vector<std::size_t> disc_hidden = {64, 32};
    std::size_t data_dim = 2;
    double leaky_slope = 0.2;

    static ArchSpec for_family(const SyntheticFamily& family);

    MlpParams make_generator(Rng& rng) const;
    MlpParams make_discriminator(Rng& rng) const;
};

/// Parameters of one training stage (pretraining or adaptation).
struct StageConfig {
    std::size_t epochs = 100;
    LossConfig loss;
    std::optional<FreezeMask> freeze;  // fairTL++ adaptation only
    std::uint64_t seed = 0;
    std::size_t eval_every = 10;
    /// Adaptation reinitializes optimizer moments by default; set to carry
    /// them over from the source state instead.
    bool carry_optimizer_state = false;
};

struct EpochLoss {
    std::size_t epoch;
    double disc_loss;
    double gen_loss;
};

/// Optional per-eval callback: (state, completed epochs) -> report.
using Evaluator = std::function<MetricsReport(const GanState&, std::size_t)>;

struct RunRecord {
    std::vector<EpochLoss> losses;
    std::vector<MetricsReport> metrics;
    std::uint64_t config_hash = 0;
};

/// Trains a fresh GAN on the full available data (the biased set united
/// with the reference set) with the plain adversarial objective.
GanState pretrain(const FeatureView& train_features, const ArchSpec& arch,
                  const StageConfig& config, RunRecord* record = nullptr,
                  const Evaluator* evaluator = nullptr);

/// Fine-tunes every generator and discriminator parameter on the reference
/// set alone. The source state is copied, never mutated.
GanState adapt_fairtl(const GanState& source, const FeatureView& d_ref,
                      const StageConfig& config, RunRecord* record = nullptr,
                      const Evaluator* evaluator = nullptr);

/// fairTL++ adaptation: captures a frozen copy of the source discriminator
/// before any update, freezes the masked discriminator layers for the
/// Linear-Probing epochs, and trains the generator against both
/// discriminators mixed by lambda for the whole run.
GanState adapt_fairtlpp(const GanState& source, const FeatureView& d_ref,
                        const StageConfig& config, RunRecord* record = nullptr,
                        const Evaluator* evaluator = nullptr);

enum class AdaptMethod { FairTL, FairTLpp };

AdaptMethod adapt_method_from_name(const std::string& name);
std::string adapt_method_name(AdaptMethod m);

/// Setup 2: starts from a loaded (possibly biased) checkpoint with no access
/// to any pretraining data; only reference features are accepted.
GanState debias_pretrained(const GanState& checkpoint, const FeatureView& d_ref,
                           AdaptMethod method, const StageConfig& config,
                           RunRecord* record = nullptr, const Evaluator* evaluator = nullptr);

/// Samples both models with one shared noise matrix; pairs align by row.
struct GalleryResult {
    Matrix noise;
    Matrix before_samples;
    Matrix after_samples;
};

GalleryResult fixed_noise_gallery(const GanState& before, const GanState& after, std::size_t n,
                                  Rng& rng);

/// Which layers move during adaptation? Pretrains, adapts with fairTL on a
/// large reference set, and reports the mean per-layer weight change for
/// every generator and discriminator layer.
struct LayerChangeRow {
    char network;  // 'G' or 'D'
    std::size_t layer;
    double mean_abs_change;
};

struct LayerChangeStudy {
    std::vector<LayerChangeRow> rows;
};

/// `min_ref_ratio`: required |ref| / |pretrain set| (the study is only
/// meaningful with a large reference set).
LayerChangeStudy layer_change_study(const FeatureView& pretrain_features,
                                    const FeatureView& large_ref, const ArchSpec& arch,
                                    const StageConfig& pretrain_config,
                                    const StageConfig& adapt_config,
                                    double min_ref_ratio = 0.5);

}  // namespace fairtl
