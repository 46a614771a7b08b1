#include "fairtl/pipeline.hpp"

#include <numeric>
#include <stdexcept>

#include "fairtl/hash.hpp"

namespace fairtl {

ArchSpec ArchSpec::for_family(const SyntheticFamily& family) {
    ArchSpec a;
    a.data_dim = family.feature_dim;
    if (family.kind == SyntheticFamily::Kind::ProceduralImage8x8) {
        a.latent_dim = 16;
        a.gen_hidden = {64, 64};
        a.disc_hidden = {64, 64};
    }
    return a;
}

MlpParams ArchSpec::make_generator(Rng& rng) const {
    std::vector<std::size_t> dims = {latent_dim};
    dims.insert(dims.end(), gen_hidden.begin(), gen_hidden.end());
    dims.push_back(data_dim);
    std::vector<LayerSpec> acts(dims.size() - 1, LayerSpec{Activation::LeakyRelu, leaky_slope});
    acts.back() = LayerSpec{Activation::Identity};
    return mlp_init(dims, acts, rng);
}

MlpParams ArchSpec::make_discriminator(Rng& rng) const {
    std::vector<std::size_t> dims = {data_dim};
    dims.insert(dims.end(), disc_hidden.begin(), disc_hidden.end());
    dims.push_back(1);
    std::vector<LayerSpec> acts(dims.size() - 1, LayerSpec{Activation::LeakyRelu, leaky_slope});
    acts.back() = LayerSpec{Activation::Sigmoid};
    return mlp_init(dims, acts, rng);
}

AdaptMethod adapt_method_from_name(const std::string& name) {
    if (name == "fairtl") return AdaptMethod::FairTL;
    if (name == "fairtlpp") return AdaptMethod::FairTLpp;
    throw std::invalid_argument("unknown adaptation method: " + name);
}

std::string adapt_method_name(AdaptMethod m) {
    return m == AdaptMethod::FairTL ? "fairtl" : "fairtlpp";
}

namespace {

// One D step then one G step per batch. All randomness flows from `rng`;
// evaluation callbacks must bring their own seeds so that the trajectory is
// independent of the eval cadence.
void train_loop(GanState& state, const FeatureView& data, const StageConfig& config,
                const FreezeMask& mask, RunRecord* record, const Evaluator* evaluator) {
    config.loss.validate();
    if (data.empty()) throw std::invalid_argument("training data is empty");
    if (data.feature_dim() != state.data_dim()) {
        throw std::invalid_argument("training data feature dim != generator output dim");
    }

    Rng rng(config.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t bs = config.loss.batch_size;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        double d_sum = 0.0, g_sum = 0.0;
        std::size_t steps = 0;
        for (std::size_t start = 0; start < order.size(); start += bs) {
            const std::size_t b = std::min(bs, order.size() - start);
            Matrix real = data.gather(std::span(order).subspan(start, b));

            Matrix z = gauss_sample(rng, b, state.latent_dim());
            Matrix fake = mlp_forward(state.generator, z);
            DiscLossResult d = discriminator_loss(state, real, fake);
            apply_update(state, GanGradients{.gen = std::nullopt, .disc = std::move(d.grads)},
                         mask, epoch, config.loss);

            Matrix z2 = gauss_sample(rng, b, state.latent_dim());
            GenLossResult g = generator_loss(state, z2, config.loss);
            apply_update(state, GanGradients{.gen = std::move(g.grads), .disc = std::nullopt},
                         mask, epoch, config.loss);

            d_sum += d.value;
            g_sum += g.value;
            ++steps;
        }
        if (record) {
            record->losses.push_back({epoch, d_sum / static_cast<double>(steps),
                                      g_sum / static_cast<double>(steps)});
        }
        if (record && evaluator && config.eval_every > 0 && (epoch + 1) % config.eval_every == 0) {
            MetricsReport rep = (*evaluator)(state, epoch + 1);
            rep.epoch = epoch + 1;
            record->metrics.push_back(rep);
        }
    }
}

void require_pretrained_source(const GanState& source) {
    if (source.stage != Stage::Pretrained) {
        throw std::invalid_argument("adaptation requires a pretrained source state, got stage " +
                                    stage_name(source.stage));
    }
}

}  // namespace

GanState pretrain(const FeatureView& train_features, const ArchSpec& arch,
                  const StageConfig& config, RunRecord* record, const Evaluator* evaluator) {
    if (train_features.empty()) throw std::invalid_argument("pretrain: empty dataset");
    if (arch.data_dim != train_features.feature_dim()) {
        throw std::invalid_argument("pretrain: arch data_dim != dataset feature dim");
    }
    Rng init_rng = Rng(config.seed).split(0x1417);
    GanState state;
    state.generator = arch.make_generator(init_rng);
    state.discriminator = arch.make_discriminator(init_rng);
    state.stage = Stage::Pretrained;
    train_loop(state, train_features, config, FreezeMask::none(), record, evaluator);
    return state;
}

GanState adapt_fairtl(const GanState& source, const FeatureView& d_ref,
                      const StageConfig& config, RunRecord* record, const Evaluator* evaluator) {
    require_pretrained_source(source);
    if (d_ref.empty()) throw std::invalid_argument("adapt_fairtl: empty reference set");
    GanState state = source;
    state.stage = Stage::FairTL;
    state.frozen_source_discriminator.reset();
    if (!config.carry_optimizer_state) state.opt = OptimizerState{};
    train_loop(state, d_ref, config, FreezeMask::none(), record, evaluator);
    return state;
}

GanState adapt_fairtlpp(const GanState& source, const FeatureView& d_ref,
                        const StageConfig& config, RunRecord* record,
                        const Evaluator* evaluator) {
    require_pretrained_source(source);
    if (d_ref.empty()) throw std::invalid_argument("adapt_fairtlpp: empty reference set");

    FreezeMask mask = config.freeze
                          ? *config.freeze
                          : FreezeMask::input_nearest_two(
                                source.discriminator.num_layers(),
                                config.epochs / 5);  // default T = 20% of adaptation epochs
    if (mask.active_until_epoch >= config.epochs) {
        throw std::invalid_argument(
            "adapt_fairtlpp: Linear-Probing epochs must be < total epochs (freezing for the "
            "whole adaptation destabilizes training)");
    }
    if (mask.frozen_layers.size() > source.discriminator.num_layers()) {
        throw std::invalid_argument("adapt_fairtlpp: freeze mask longer than discriminator");
    }

    GanState state = source;
    state.stage = Stage::FairTLpp;
    // the frozen copy is captured before any update and never touched again
    state.frozen_source_discriminator = source.discriminator;
    if (!config.carry_optimizer_state) state.opt = OptimizerState{};
    train_loop(state, d_ref, config, mask, record, evaluator);
    return state;
}

GanState debias_pretrained(const GanState& checkpoint, const FeatureView& d_ref,
                           AdaptMethod method, const StageConfig& config, RunRecord* record,
                           const Evaluator* evaluator) {
    checkpoint.validate();  // both methods need the discriminator for adaptation
    return method == AdaptMethod::FairTL
               ? adapt_fairtl(checkpoint, d_ref, config, record, evaluator)
               : adapt_fairtlpp(checkpoint, d_ref, config, record, evaluator);
}

GalleryResult fixed_noise_gallery(const GanState& before, const GanState& after, std::size_t n,
                                  Rng& rng) {
    if (before.latent_dim() != after.latent_dim()) {
        throw std::invalid_argument("fixed_noise_gallery: latent dims differ");
    }
    if (before.data_dim() != after.data_dim()) {
        throw std::invalid_argument("fixed_noise_gallery: data dims differ");
    }
    GalleryResult result;
    if (n == 0) {
        result.noise = Matrix(0, before.latent_dim());
        result.before_samples = Matrix(0, before.data_dim());
        result.after_samples = Matrix(0, before.data_dim());
        return result;
    }
    result.noise = gauss_sample(rng, n, before.latent_dim());
    result.before_samples = mlp_forward(before.generator, result.noise);
    result.after_samples = mlp_forward(after.generator, result.noise);
    return result;
}

LayerChangeStudy layer_change_study(const FeatureView& pretrain_features,
                                    const FeatureView& large_ref, const ArchSpec& arch,
                                    const StageConfig& pretrain_config,
                                    const StageConfig& adapt_config, double min_ref_ratio) {
    if (static_cast<double>(large_ref.size()) <
        min_ref_ratio * static_cast<double>(pretrain_features.size())) {
        throw std::invalid_argument(
            "layer_change_study: reference set too small (need >= " +
            std::to_string(min_ref_ratio) + " of the pretraining set)");
    }
    GanState source = pretrain(pretrain_features, arch, pretrain_config);
    GanState adapted = adapt_fairtl(source, large_ref, adapt_config);

    LayerChangeStudy study;
    const std::vector<double> g_change = layer_weight_change(source.generator, adapted.generator);
    for (std::size_t i = 0; i < g_change.size(); ++i) study.rows.push_back({'G', i, g_change[i]});
    const std::vector<double> d_change =
        layer_weight_change(source.discriminator, adapted.discriminator);
    for (std::size_t i = 0; i < d_change.size(); ++i) study.rows.push_back({'D', i, d_change[i]});
    return study;
}

}  // namespace fairtl
