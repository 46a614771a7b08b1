// Seeded training-behavior checks: directional properties of pretraining and
// adaptation on the 2d benchmark at reduced budgets. Exact contracts live in
// the other suites; these assert the statistical direction over 5 seeds.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairtl/hash.hpp"
#include "fairtl/metrics.hpp"
#include "fairtl/pipeline.hpp"

using namespace fairtl;

namespace {

const AttributeSpec kSpec = AttributeSpec::single("Gender", 2);
const SyntheticFamily kFamily = SyntheticFamily::gaussian_ring(kSpec);

struct Run {
    DatasetPair pair;
    GanState pretrained;
};

Run pretrain_run(std::uint64_t seed, const std::vector<double>& bias, std::size_t size_bias,
                 double perc, std::size_t epochs) {
    Rng rng(seed);
    const SampleSet base = generate_base(kFamily, kSpec, size_bias * 3 + 1200, rng);
    Run run;
    run.pair = build_dataset_pair(base, bias, size_bias, perc, rng);
    SampleSet union_set = run.pair.d_bias;
    union_set.insert(union_set.end(), run.pair.d_ref.begin(), run.pair.d_ref.end());
    StageConfig cfg;
    cfg.epochs = epochs;
    cfg.seed = mix64(seed, 3);
    run.pretrained = pretrain(strip_labels(union_set), ArchSpec{}, cfg);
    return run;
}

double majority_share(const GanState& state, std::uint64_t seed) {
    const AttrClassifier oracle = AttrClassifier::bayes_oracle(kFamily, kSpec);
    Rng rng(seed);
    Matrix z = gauss_sample(rng, 4096, state.latent_dim());
    const Matrix samples = mlp_forward(state.generator, z);
    std::size_t majority = 0;
    for (std::size_t i = 0; i < samples.rows(); ++i) {
        if (oracle.classify(samples.row(i)) == 0) ++majority;
    }
    return static_cast<double>(majority) / static_cast<double>(samples.rows());
}

double oracle_fd(const GanState& state, std::uint64_t seed) {
    const AttrClassifier oracle = AttrClassifier::bayes_oracle(kFamily, kSpec);
    Rng rng(seed);
    return compute_fd(state, oracle, 4096, rng);
}

}  // namespace

TEST_CASE("pretraining on balanced data yields a roughly balanced generator") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        const Run run = pretrain_run(seed, {0.5, 0.5}, 1000, 0.1, 100);
        const double share = majority_share(run.pretrained, 900 + seed);
        CAPTURE(seed);
        CHECK(share > 0.4);
        CHECK(share < 0.6);
    }
}

TEST_CASE("pretraining on 90/10 data skews toward the majority class") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        const Run run = pretrain_run(seed, {0.9, 0.1}, 1000, 0.1, 100);
        const double share = majority_share(run.pretrained, 900 + seed);
        CAPTURE(seed);
        CHECK(share > 0.6);
    }
}

TEST_CASE("fairtl adaptation on a uniform reference set reduces FD") {
    int improved = 0;
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        const Run run = pretrain_run(seed, {0.9, 0.1}, 1000, 0.1, 100);
        const double fd_before = oracle_fd(run.pretrained, 700 + seed);
        StageConfig cfg;
        cfg.epochs = 150;
        cfg.seed = mix64(seed, 4);
        const GanState adapted = adapt_fairtl(run.pretrained, strip_labels(run.pair.d_ref), cfg);
        const double fd_after = oracle_fd(adapted, 800 + seed);
        if (fd_after < fd_before) ++improved;
    }
    CHECK(improved >= 4);  // strictly decreases in at least 4 of 5 seeds
}

TEST_CASE("debiasing a saved biased checkpoint cuts FD by at least 30 percent") {
    const Run run = pretrain_run(77, {0.9, 0.1}, 1000, 0.1, 100);
    double reduction_sum = 0.0;
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        const double fd_before = oracle_fd(run.pretrained, 600 + seed);
        StageConfig cfg;
        cfg.epochs = 150;
        cfg.seed = mix64(seed, 5);
        cfg.freeze = FreezeMask::input_nearest_two(3, 15);
        const GanState debiased = debias_pretrained(
            run.pretrained, strip_labels(run.pair.d_ref), AdaptMethod::FairTLpp, cfg);
        const double fd_after = oracle_fd(debiased, 650 + seed);
        reduction_sum += (fd_before - fd_after) / fd_before;
    }
    CHECK(reduction_sum / 5.0 >= 0.30);
}
