#include "fairtl/gan.hpp"

#include <cmath>
#include <stdexcept>

namespace fairtl {

std::string stage_name(Stage s) {
    switch (s) {
        case Stage::Pretrained: return "pretrained";
        case Stage::FairTL: return "fairtl";
        case Stage::FairTLpp: return "fairtlpp";
    }
    return "?";
}

Stage stage_from_name(const std::string& name) {
    if (name == "pretrained") return Stage::Pretrained;
    if (name == "fairtl") return Stage::FairTL;
    if (name == "fairtlpp") return Stage::FairTLpp;
    throw std::invalid_argument("unknown stage: " + name);
}

AdamState AdamState::zeros_like(const MlpParams& net) {
    AdamState s;
    for (std::size_t i = 0; i < net.num_layers(); ++i) {
        s.m_w.emplace_back(net.weights[i].rows(), net.weights[i].cols());
        s.v_w.emplace_back(net.weights[i].rows(), net.weights[i].cols());
        s.m_b.emplace_back(net.biases[i].size(), 0.0);
        s.v_b.emplace_back(net.biases[i].size(), 0.0);
    }
    return s;
}

void GanState::validate() const {
    generator.validate();
    discriminator.validate();
    if (generator.output_dim() != discriminator.input_dim()) {
        throw std::invalid_argument("GanState: generator output dim != discriminator input dim");
    }
    const bool has_ds = frozen_source_discriminator.has_value();
    if (has_ds != (stage == Stage::FairTLpp)) {
        throw std::invalid_argument(
            "GanState: frozen source discriminator must be present exactly in the fairtlpp stage");
    }
    if (has_ds) frozen_source_discriminator->validate();
}

bool FreezeMask::any_active(std::size_t epoch) const {
    if (epoch >= active_until_epoch) return false;
    for (bool f : frozen_layers)
        if (f) return true;
    return false;
}

FreezeMask FreezeMask::none() { return FreezeMask{}; }

FreezeMask FreezeMask::input_nearest_two(std::size_t num_disc_layers, std::size_t lp_epochs) {
    if (num_disc_layers < 2) {
        throw std::invalid_argument("FreezeMask: discriminator has fewer than two layers");
    }
    FreezeMask m;
    m.frozen_layers.assign(num_disc_layers, false);
    m.frozen_layers[0] = true;
    m.frozen_layers[1] = true;
    m.active_until_epoch = lp_epochs;
    return m;
}

void FreezeMask::zero_frozen(MlpGradients& disc_grads, std::size_t epoch) const {
    for (std::size_t i = 0; i < disc_grads.weights.size(); ++i) {
        if (!layer_frozen(i, epoch)) continue;
        for (double& v : disc_grads.weights[i].values()) v = 0.0;
        for (double& v : disc_grads.biases[i]) v = 0.0;
    }
}

void LossConfig::validate() const {
    if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lambda must be in [0,1]");
    if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
    if (lr_g <= 0.0 || lr_d <= 0.0) throw std::invalid_argument("learning rates must be positive");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
        throw std::invalid_argument("adam betas must be in [0,1)");
    }
}

namespace {

// Clamps a probability column into [kProbEps, 1-kProbEps], counting clamps.
// Entries that were clamped get zero gradient (the clamp is flat there).
struct ClampedProbs {
    std::vector<double> p;
    std::vector<bool> clamped;
    std::size_t n_clamped = 0;
};

ClampedProbs clamp_probs(const Matrix& disc_out) {
    if (disc_out.cols() != 1) {
        throw std::invalid_argument("discriminator must have a single output unit");
    }
    ClampedProbs cp;
    cp.p.resize(disc_out.rows());
    cp.clamped.assign(disc_out.rows(), false);
    for (std::size_t i = 0; i < disc_out.rows(); ++i) {
        double y = disc_out(i, 0);
        if (y < kProbEps) {
            y = kProbEps;
            cp.clamped[i] = true;
            ++cp.n_clamped;
        } else if (y > 1.0 - kProbEps) {
            y = 1.0 - kProbEps;
            cp.clamped[i] = true;
            ++cp.n_clamped;
        }
        cp.p[i] = y;
    }
    return cp;
}

}  // namespace

DiscLossResult discriminator_loss(const GanState& state, const Matrix& real_batch,
                                  const Matrix& fake_batch) {
    state.validate();
    if (real_batch.rows() == 0 || fake_batch.rows() == 0) {
        throw std::invalid_argument("discriminator_loss: empty batch");
    }
    if (real_batch.cols() != state.data_dim() || fake_batch.cols() != state.data_dim()) {
        throw std::invalid_argument("discriminator_loss: batch feature dim mismatch");
    }

    DiscLossResult res;
    const double n_real = static_cast<double>(real_batch.rows());
    const double n_fake = static_cast<double>(fake_batch.rows());

    ForwardCache cache_real;
    Matrix out_real = mlp_forward(state.discriminator, real_batch, &cache_real);
    ClampedProbs pr = clamp_probs(out_real);

    ForwardCache cache_fake;
    Matrix out_fake = mlp_forward(state.discriminator, fake_batch, &cache_fake);
    ClampedProbs pf = clamp_probs(out_fake);
    res.diag.clamped_outputs = pr.n_clamped + pf.n_clamped;

    double value = 0.0;
    Matrix up_real(real_batch.rows(), 1);
    for (std::size_t i = 0; i < pr.p.size(); ++i) {
        value += std::log(pr.p[i]) / n_real;
        up_real(i, 0) = pr.clamped[i] ? 0.0 : 1.0 / (n_real * pr.p[i]);
    }
    Matrix up_fake(fake_batch.rows(), 1);
    for (std::size_t i = 0; i < pf.p.size(); ++i) {
        value += std::log(1.0 - pf.p[i]) / n_fake;
        up_fake(i, 0) = pf.clamped[i] ? 0.0 : -1.0 / (n_fake * (1.0 - pf.p[i]));
    }
    res.value = value;

    MlpGradients g_real, g_fake;
    mlp_backward(state.discriminator, cache_real, up_real, g_real);
    mlp_backward(state.discriminator, cache_fake, up_fake, g_fake);
    g_real.add_scaled(g_fake, 1.0);
    res.grads = std::move(g_real);
    return res;
}

GenLossResult generator_loss(const GanState& state, const Matrix& noise_batch,
                             const LossConfig& config) {
    state.validate();
    config.validate();
    if (noise_batch.rows() == 0) throw std::invalid_argument("generator_loss: empty noise batch");
    if (noise_batch.cols() != state.latent_dim()) {
        throw std::invalid_argument("generator_loss: noise dim != latent dim");
    }

    const bool dual = state.stage == Stage::FairTLpp;
    const double lam = dual ? config.lambda : 1.0;
    const double n = static_cast<double>(noise_batch.rows());
    const bool saturating = config.form == GenLossForm::Saturating;

    GenLossResult res;
    ForwardCache cache_g;
    Matrix fake = mlp_forward(state.generator, noise_batch, &cache_g);

    // One discriminator pass: returns its weighted loss contribution and
    // accumulates the weighted gradient w.r.t. the fake batch.
    auto score = [&](const MlpParams& disc, double weight, Matrix& input_grad_acc) -> double {
        ForwardCache cache_d;
        Matrix out = mlp_forward(disc, fake, &cache_d);
        ClampedProbs cp = clamp_probs(out);
        res.diag.clamped_outputs += cp.n_clamped;
        double value = 0.0;
        Matrix up(fake.rows(), 1);
        for (std::size_t i = 0; i < cp.p.size(); ++i) {
            if (saturating) {
                value += weight * std::log(1.0 - cp.p[i]) / n;
                up(i, 0) = cp.clamped[i] ? 0.0 : -weight / (n * (1.0 - cp.p[i]));
            } else {
                value += weight * -std::log(cp.p[i]) / n;
                up(i, 0) = cp.clamped[i] ? 0.0 : -weight / (n * cp.p[i]);
            }
        }
        MlpGradients unused;
        Matrix gi = mlp_backward(disc, cache_d, up, unused);
        if (input_grad_acc.empty()) {
            input_grad_acc = std::move(gi);
        } else {
            double* acc = input_grad_acc.data();
            const double* src = gi.data();
            for (std::size_t i = 0; i < input_grad_acc.size(); ++i) acc[i] += src[i];
        }
        return value;
    };

    Matrix fake_grad;
    res.value = score(state.discriminator, lam, fake_grad);
    if (dual) {
        res.value += score(*state.frozen_source_discriminator, 1.0 - lam, fake_grad);
    }
    mlp_backward(state.generator, cache_g, fake_grad, res.grads);
    return res;
}

namespace {

void check_grad_shapes(const MlpParams& net, const MlpGradients& g, const char* which) {
    if (g.weights.size() != net.num_layers() || g.biases.size() != net.num_layers()) {
        throw std::invalid_argument(std::string("apply_update: ") + which +
                                    " gradient layer count mismatch");
    }
    for (std::size_t i = 0; i < net.num_layers(); ++i) {
        if (!g.weights[i].same_shape(net.weights[i]) ||
            g.biases[i].size() != net.biases[i].size()) {
            throw std::invalid_argument(std::string("apply_update: ") + which +
                                        " gradient shape mismatch");
        }
    }
}

// direction +1 ascends (discriminator), -1 descends (generator)
void adam_step(MlpParams& net, AdamState& mom, const MlpGradients& g, double lr, double beta1,
               double beta2, double eps, double direction,
               const FreezeMask* mask, std::size_t epoch) {
    if (!mom.initialized()) mom = AdamState::zeros_like(net);
    mom.step += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(mom.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(mom.step));
    for (std::size_t i = 0; i < net.num_layers(); ++i) {
        if (mask && mask->layer_frozen(i, epoch)) continue;
        double* w = net.weights[i].data();
        double* mw = mom.m_w[i].data();
        double* vw = mom.v_w[i].data();
        const double* gw = g.weights[i].data();
        for (std::size_t j = 0; j < net.weights[i].size(); ++j) {
            mw[j] = beta1 * mw[j] + (1.0 - beta1) * gw[j];
            vw[j] = beta2 * vw[j] + (1.0 - beta2) * gw[j] * gw[j];
            w[j] += direction * lr * (mw[j] / bc1) / (std::sqrt(vw[j] / bc2) + eps);
        }
        for (std::size_t j = 0; j < net.biases[i].size(); ++j) {
            double& mb = mom.m_b[i][j];
            double& vb = mom.v_b[i][j];
            const double gb = g.biases[i][j];
            mb = beta1 * mb + (1.0 - beta1) * gb;
            vb = beta2 * vb + (1.0 - beta2) * gb * gb;
            net.biases[i][j] += direction * lr * (mb / bc1) / (std::sqrt(vb / bc2) + eps);
        }
    }
}

}  // namespace

void apply_update(GanState& state, const GanGradients& grads, const FreezeMask& mask,
                  std::size_t epoch, const LossConfig& config) {
    config.validate();
    if (grads.gen) {
        check_grad_shapes(state.generator, *grads.gen, "generator");
        adam_step(state.generator, state.opt.gen, *grads.gen, config.lr_g, config.beta1,
                  config.beta2, config.adam_eps, -1.0, nullptr, epoch);
    }
    if (grads.disc) {
        check_grad_shapes(state.discriminator, *grads.disc, "discriminator");
        adam_step(state.discriminator, state.opt.disc, *grads.disc, config.lr_d, config.beta1,
                  config.beta2, config.adam_eps, +1.0, &mask, epoch);
    }
}

std::vector<double> layer_weight_change(const MlpParams& before, const MlpParams& after) {
    if (before.layer_dims != after.layer_dims) {
        throw std::invalid_argument("layer_weight_change: layer shapes differ");
    }
    std::vector<double> changes(before.num_layers());
    for (std::size_t i = 0; i < before.num_layers(); ++i) {
        double sum = 0.0;
        const double* wb = before.weights[i].data();
        const double* wa = after.weights[i].data();
        for (std::size_t j = 0; j < before.weights[i].size(); ++j) {
            sum += std::abs(wa[j] - wb[j]);
        }
        for (std::size_t j = 0; j < before.biases[i].size(); ++j) {
            sum += std::abs(after.biases[i][j] - before.biases[i][j]);
        }
        const std::size_t count = before.weights[i].size() + before.biases[i].size();
        changes[i] = sum / static_cast<double>(count);
    }
    return changes;
}

}  // namespace fairtl
