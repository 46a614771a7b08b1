#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairtl/metrics.hpp"

using namespace fairtl;

namespace {

const AttributeSpec kBinary = AttributeSpec::single("Gender", 2);

Matrix index_column(std::size_t n) {
    Matrix m(n, 1);
    for (std::size_t i = 0; i < n; ++i) m(i, 0) = static_cast<double>(i);
    return m;
}

GaussStats stats_1d(double mean, double var) {
    GaussStats s;
    s.mean = {mean};
    s.covariance = Matrix(1, 1);
    s.covariance(0, 0) = var;
    s.n = 1000;
    return s;
}

}  // namespace

TEST_CASE("FD is zero for a perfectly alternating classifier") {
    const AttrClassifier alternating = AttrClassifier::stub(
        kBinary, [](std::span<const double> f) {
            return static_cast<std::size_t>(f[0]) % 2;
        });
    CHECK(compute_fd_from_samples(index_column(1000), alternating) == 0.0);
}

TEST_CASE("FD of a constant classifier is sqrt(1/2)") {
    const AttrClassifier constant =
        AttrClassifier::stub(kBinary, [](std::span<const double>) { return std::size_t{0}; });
    const double fd = compute_fd_from_samples(index_column(64), constant);
    CHECK(fd == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(fd == doctest::Approx(0.7071068).epsilon(1e-6));
}

TEST_CASE("FD of the four-class frequency vector from the multi-attribute setting") {
    const AttributeSpec four({{"Gender", 2}, {"BlackHair", 2}});
    // exactly 437 / 63 / 415 / 85 samples out of 1000, classified by index range
    const AttrClassifier by_range = AttrClassifier::stub(four, [](std::span<const double> f) {
        const double v = f[0];
        if (v < 437) return std::size_t{0};
        if (v < 500) return std::size_t{1};
        if (v < 915) return std::size_t{2};
        return std::size_t{3};
    });
    const double fd = compute_fd_from_samples(index_column(1000), by_range);

    // independent route: the norm formula applied to the frequency vector
    const std::vector<double> freq = {0.437, 0.063, 0.415, 0.085};
    double expect_sq = 0.0;
    for (double q : freq) expect_sq += (0.25 - q) * (0.25 - q);
    CHECK(fd == doctest::Approx(std::sqrt(expect_sq)).epsilon(1e-9));
    CHECK(fd == doctest::Approx(0.35269).epsilon(1e-4));
}

TEST_CASE("FD range and the all-mass-on-one-class upper bound") {
    CHECK(fd_from_counts({10, 10}) == 0.0);
    CHECK(fd_from_counts({20, 0}) == doctest::Approx(fd_upper_bound(2)).epsilon(1e-12));
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = 2 + rng.below(5);
        std::vector<std::size_t> counts(k);
        for (auto& c : counts) c = rng.below(100);
        counts[0] += 1;  // non-empty
        const double fd = fd_from_counts(counts);
        CHECK(fd >= 0.0);
        CHECK(fd <= fd_upper_bound(k) + 1e-12);
    }
}

TEST_CASE("the bayes oracle is nearest-mean on the gaussian ring") {
    const SyntheticFamily family = SyntheticFamily::gaussian_ring(kBinary);
    const AttrClassifier oracle = AttrClassifier::bayes_oracle(family, kBinary);
    const double right[2] = {1.5, 0.3};
    const double left[2] = {-0.7, -0.1};
    CHECK(oracle.classify({right, 2}) == 0);
    CHECK(oracle.classify({left, 2}) == 1);

    const SyntheticFamily images = SyntheticFamily::procedural_images(kBinary);
    CHECK_THROWS_AS(AttrClassifier::bayes_oracle(images, kBinary), std::invalid_argument);
}

TEST_CASE("FD consistency against a known attribute distribution") {
    // sampler with attribute distribution q = (0.7, 0.3), bypassing any GAN
    const SyntheticFamily family = SyntheticFamily::gaussian_ring(kBinary);
    const AttrClassifier oracle = AttrClassifier::bayes_oracle(family, kBinary);
    Rng rng(1234);
    const std::size_t n = 10000;
    Matrix samples(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t label = rng.uniform01() < 0.7 ? 0 : 1;
        samples(i, 0) = family.components[label].mean[0] + rng.normal();
        samples(i, 1) = family.components[label].mean[1] + rng.normal();
    }
    const double fd = compute_fd_from_samples(samples, oracle);
    const double expect = std::sqrt(2.0) * 0.2;  // |p_bar - q|_2 = sqrt(2) * 0.2
    CHECK(std::abs(fd - expect) <= 0.02);
}

TEST_CASE("fit_gauss_stats closed forms") {
    Matrix constant(5, 2, 3.0);
    const GaussStats cs = fit_gauss_stats(constant);
    CHECK(cs.mean[0] == 3.0);
    CHECK(cs.covariance(0, 0) == 0.0);
    CHECK(cs.covariance(0, 1) == 0.0);

    const GaussStats two = fit_gauss_stats(Matrix::from_rows({{0.0}, {2.0}}));
    CHECK(two.mean[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(two.covariance(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(two.degenerate == false);

    CHECK(fit_gauss_stats(Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}})).degenerate);
    CHECK_THROWS_AS(fit_gauss_stats(Matrix(1, 2)), std::invalid_argument);
}

TEST_CASE("fit_gauss_stats approaches the true moments") {
    Rng rng(7);
    Matrix samples = gauss_sample(rng, 20000, 2);
    for (std::size_t i = 0; i < samples.rows(); ++i) {
        samples(i, 0) = 1.0 + 2.0 * samples(i, 0);  // N(1, 4)
        samples(i, 1) = -0.5 + samples(i, 1);       // N(-0.5, 1), independent
    }
    const GaussStats s = fit_gauss_stats(samples);
    CHECK(std::abs(s.mean[0] - 1.0) < 0.05);
    CHECK(std::abs(s.mean[1] + 0.5) < 0.05);
    CHECK(std::abs(s.covariance(0, 0) - 4.0) < 0.15);
    CHECK(std::abs(s.covariance(1, 1) - 1.0) < 0.05);
    CHECK(std::abs(s.covariance(0, 1)) < 0.05);
}

TEST_CASE("frechet_sq closed forms") {
    const GaussStats a = stats_1d(0.0, 1.0);
    CHECK(frechet_sq(a, a) == doctest::Approx(0.0).epsilon(1e-9));

    const GaussStats b = stats_1d(1.0, 1.0);
    CHECK(frechet_sq(a, b) == doctest::Approx(1.0).epsilon(1e-9));

    GaussStats da, db;
    da.mean = {0.0, 0.0};
    db.mean = {0.0, 0.0};
    da.covariance = Matrix::from_rows({{1.0, 0.0}, {0.0, 4.0}});
    db.covariance = Matrix::from_rows({{4.0, 0.0}, {0.0, 1.0}});
    da.n = db.n = 100;
    // commuting diagonal case: (1+4) + (4+1) - 2*(2+2) = 2
    CHECK(frechet_sq(da, db) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("frechet_sq metric properties over random PSD pairs") {
    Rng rng(9);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = 1 + rng.below(4);
        auto random_stats = [&] {
            GaussStats s;
            s.mean.resize(d);
            for (double& v : s.mean) v = 2.0 * rng.normal();
            const Matrix a = gauss_sample(rng, d, d);
            s.covariance = Matrix(d, d);
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    double acc = 0.0;
                    for (std::size_t l = 0; l < d; ++l) acc += a(l, i) * a(l, j);
                    s.covariance(i, j) = acc;  // A^T A is PSD
                }
                s.covariance(i, i) += 1e-6;
            }
            s.n = 100;
            return s;
        };
        const GaussStats a = random_stats();
        const GaussStats b = random_stats();
        const double ab = frechet_sq(a, b);
        const double ba = frechet_sq(b, a);
        CHECK(ab >= 0.0);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-7));
        CHECK(frechet_sq(a, a) == doctest::Approx(0.0).epsilon(1e-8));
    }
}

TEST_CASE("frechet_sq grows strictly with the mean distance at fixed covariance") {
    Rng rng(10);
    GaussStats base;
    base.mean = {0.0, 0.0};
    base.covariance = Matrix::from_rows({{1.5, 0.3}, {0.3, 0.8}});
    base.n = 50;
    double previous = -1.0;
    for (double shift : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        GaussStats moved = base;
        moved.mean = {shift, -shift};
        const double f = frechet_sq(base, moved);
        CHECK(f > previous);
        previous = f;
    }
    CHECK_THROWS_AS(frechet_sq(base, stats_1d(0.0, 1.0)), std::invalid_argument);
}

TEST_CASE("balanced reference stats resample exactly per_class of each label") {
    const SyntheticFamily family = SyntheticFamily::gaussian_ring(kBinary);
    Rng rng(21);
    SampleSet holdout = generate_base(family, kBinary, 300, rng);  // 150 per class

    // per_class equal to the class size uses every sample exactly once
    Rng ref_rng(1);
    const GaussStats all = balanced_reference_stats(holdout, kBinary, 150, ref_rng);
    const GaussStats direct = fit_gauss_stats(strip_labels(holdout).all_rows());
    CHECK(all.n == holdout.size());
    CHECK(all.mean[0] == doctest::Approx(direct.mean[0]).epsilon(1e-12));
    CHECK(all.covariance(0, 0) == doctest::Approx(direct.covariance(0, 0)).epsilon(1e-12));

    // subsampling is deterministic in the rng seed
    Rng r1(5), r2(5), r3(6);
    const GaussStats s1 = balanced_reference_stats(holdout, kBinary, 50, r1);
    const GaussStats s2 = balanced_reference_stats(holdout, kBinary, 50, r2);
    const GaussStats s3 = balanced_reference_stats(holdout, kBinary, 50, r3);
    CHECK(s1.mean == s2.mean);
    CHECK(s1.n == 100);
    CHECK(s1.mean != s3.mean);

    try {
        balanced_reference_stats(holdout, kBinary, 151, r1);
        FAIL("expected deficiency error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("class") != std::string::npos);
    }
}

TEST_CASE("the learned classifier tracks the bayes oracle on separated components") {
    const SyntheticFamily family = SyntheticFamily::gaussian_ring(kBinary);
    Rng rng(31);
    const SampleSet train = generate_base(family, kBinary, 1200, rng);
    ClassifierConfig cc;
    cc.seed = 7;
    cc.epochs = 40;
    const AttrClassifier learned = train_attr_classifier(train, kBinary, cc);
    CHECK(learned.accuracy() >= 0.95);
    CHECK(learned.usable_for_fd());

    const AttrClassifier oracle = AttrClassifier::bayes_oracle(family, kBinary);
    const SampleSet fresh = generate_base(family, kBinary, 1000, rng);
    std::size_t agree = 0;
    for (const auto& s : fresh) {
        if (learned.classify(s.features) == oracle.classify(s.features)) ++agree;
    }
    CHECK(static_cast<double>(agree) / static_cast<double>(fresh.size()) >= 0.98);
}

TEST_CASE("classifier training is deterministic in its seed") {
    const SyntheticFamily family = SyntheticFamily::gaussian_ring(kBinary);
    Rng rng(37);
    const SampleSet train = generate_base(family, kBinary, 400, rng);
    ClassifierConfig cc;
    cc.seed = 11;
    cc.epochs = 10;
    const AttrClassifier a = train_attr_classifier(train, kBinary, cc);
    const AttrClassifier b = train_attr_classifier(train, kBinary, cc);
    CHECK(a.accuracy() == b.accuracy());
    Rng probe(1);
    const Matrix x = gauss_sample(probe, 50, 2);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        CHECK(a.classify(x.row(i)) == b.classify(x.row(i)));
    }
}

TEST_CASE("a classifier below its accuracy gate refuses FD duty") {
    Rng rng(41);
    MlpParams net = mlp_init({2, 8, 2}, {{Activation::LeakyRelu, 0.2}, {Activation::Identity}},
                             rng);
    const AttrClassifier weak = AttrClassifier::learned(std::move(net), kBinary,
                                                        /*accuracy=*/0.6, /*min_accuracy=*/0.95);
    CHECK_FALSE(weak.usable_for_fd());
    try {
        compute_fd_from_samples(Matrix(10, 2), weak);
        FAIL("expected the accuracy gate to fire");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("0.6") != std::string::npos);
    }
}
