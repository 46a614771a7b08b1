#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "fairtl/data.hpp"

using namespace fairtl;

namespace {

// label firewall: the feature view must not expose labels in any form
template <typename T>
concept ExposesLabels = requires(const T& t) { t.joint_label(0); } ||
                        requires(const T& t) { t.labels(); };
static_assert(!ExposesLabels<FeatureView>);

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("attribute spec validation and joint cardinality") {
    CHECK_THROWS_AS(AttributeSpec::single("Gender", 1), std::invalid_argument);
    CHECK_THROWS_AS(AttributeSpec(std::vector<AttributeSpec::Attribute>{}),
                    std::invalid_argument);
    const AttributeSpec multi({{"Gender", 2}, {"BlackHair", 2}});
    CHECK(multi.joint_cardinality() == 4);
    CHECK(AttributeSpec::single("Race", 3).joint_cardinality() == 3);
}

TEST_CASE("largest remainder apportionment") {
    CHECK(largest_remainder_counts({0.9, 0.1}, 1000) == std::vector<std::size_t>{900, 100});
    CHECK(largest_remainder_counts({0.437, 0.063, 0.415, 0.085}, 2000) ==
          std::vector<std::size_t>{874, 126, 830, 170});
    // remainders: ties broken by class index
    CHECK(largest_remainder_counts({0.5, 0.5}, 3) == std::vector<std::size_t>{2, 1});
    CHECK_THROWS_AS(largest_remainder_counts({0.5, 0.4}, 10), std::invalid_argument);
}

TEST_CASE("generate_base stratifies uniformly") {
    const AttributeSpec spec = AttributeSpec::single("Gender", 2);
    const SyntheticFamily family = SyntheticFamily::gaussian_ring(spec);
    Rng rng(1);
    const SampleSet base = generate_base(family, spec, 400, rng);
    const auto counts = class_counts(base, 2);
    CHECK(counts[0] == 200);
    CHECK(counts[1] == 200);
}

TEST_CASE("gaussian ring per-label means land on the components") {
    const AttributeSpec spec = AttributeSpec::single("Gender", 2);
    const SyntheticFamily family = SyntheticFamily::gaussian_ring(spec);
    // k=2 ring: components at (2, 0) and (-2, 0)
    CHECK(family.components[0].mean[0] == doctest::Approx(2.0));
    CHECK(family.components[1].mean[0] == doctest::Approx(-2.0));

    Rng rng(2);
    const SampleSet base = generate_base(family, spec, 1000, rng);
    for (std::size_t label = 0; label < 2; ++label) {
        double mx = 0.0, my = 0.0;
        std::size_t n = 0;
        for (const auto& s : base) {
            if (s.joint_label != label) continue;
            mx += s.features[0];
            my += s.features[1];
            ++n;
        }
        mx /= static_cast<double>(n);
        my /= static_cast<double>(n);
        CHECK(std::abs(mx - family.components[label].mean[0]) < 0.15);
        CHECK(std::abs(my - family.components[label].mean[1]) < 0.15);
    }
}

TEST_CASE("generate_base is deterministic in the seed") {
    const AttributeSpec spec = AttributeSpec::single("A", 2);
    const SyntheticFamily family = SyntheticFamily::gaussian_ring(spec);
    Rng r1(5), r2(5);
    const SampleSet a = generate_base(family, spec, 100, r1);
    const SampleSet b = generate_base(family, spec, 100, r2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].joint_label == b[i].joint_label);
        CHECK(a[i].features == b[i].features);
    }
}

TEST_CASE("generate_base rejects a family/spec mismatch") {
    const AttributeSpec two = AttributeSpec::single("A", 2);
    const AttributeSpec four({{"A", 2}, {"B", 2}});
    const SyntheticFamily family = SyntheticFamily::gaussian_ring(two);
    Rng rng(1);
    CHECK_THROWS_AS(generate_base(family, four, 100, rng), std::invalid_argument);
}

TEST_CASE("image family recipes") {
    const AttributeSpec spec = AttributeSpec::single("Shape", 2);
    const SyntheticFamily family = SyntheticFamily::procedural_images(spec);
    CHECK(family.feature_dim == 64);
    CHECK(family.image_recipes[0].disk);
    CHECK_FALSE(family.image_recipes[1].disk);
    CHECK(family.image_recipes[0].shade_lo > family.image_recipes[1].shade_hi);

    Rng rng(3);
    const SampleSet base = generate_base(family, spec, 50, rng);
    for (const auto& s : base) CHECK(s.features.size() == 64);

    CHECK_THROWS_AS(SyntheticFamily::procedural_images(AttributeSpec::single("X", 5)),
                    std::invalid_argument);
}

TEST_CASE("dataset pair: exact counts, uniform reference, disjoint parts") {
    const AttributeSpec spec = AttributeSpec::single("Gender", 2);
    const SyntheticFamily family = SyntheticFamily::gaussian_ring(spec);
    Rng rng(7);
    const SampleSet base = generate_base(family, spec, 12000, rng);

    const DatasetPair pair = build_dataset_pair(base, {0.9, 0.1}, 4000, 0.025, rng);
    const auto bias_counts = class_counts(pair.d_bias, 2);
    CHECK(bias_counts[0] == 3600);
    CHECK(bias_counts[1] == 400);
    CHECK(pair.d_ref.size() == 100);
    const auto ref_counts = class_counts(pair.d_ref, 2);
    CHECK(ref_counts[0] == 50);
    CHECK(ref_counts[1] == 50);

    // disjointness via feature identity (features are continuous draws)
    std::set<std::vector<double>> bias_set, ref_set, hold_set;
    for (const auto& s : pair.d_bias) bias_set.insert(s.features);
    for (const auto& s : pair.d_ref) ref_set.insert(s.features);
    for (const auto& s : pair.eval_holdout) hold_set.insert(s.features);
    CHECK(bias_set.size() == pair.d_bias.size());
    for (const auto& f : ref_set) CHECK(bias_set.count(f) == 0);
    for (const auto& f : hold_set) {
        CHECK(bias_set.count(f) == 0);
        CHECK(ref_set.count(f) == 0);
    }
}

TEST_CASE("dataset pair invariants over random configurations") {
    Rng rng(11);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t k = 2 + rng.below(3);
        std::vector<AttributeSpec::Attribute> attrs = {{"A", k}};
        const AttributeSpec spec(attrs);
        const SyntheticFamily family = SyntheticFamily::gaussian_ring(spec);

        std::vector<double> bias(k);
        double total = 0.0;
        for (double& b : bias) total += (b = 0.1 + rng.uniform01());
        for (double& b : bias) b /= total;

        const std::size_t size_bias = 200 + rng.below(400);
        const double perc = 0.05 + 0.5 * rng.uniform01();
        const SampleSet base = generate_base(family, spec, size_bias * 4 + 2000, rng);
        const DatasetPair pair = build_dataset_pair(base, bias, size_bias, perc, rng);

        CHECK(pair.d_bias.size() == size_bias);
        const std::size_t n_ref = static_cast<std::size_t>(
            std::llround(perc * static_cast<double>(size_bias)));
        CHECK(pair.d_ref.size() == n_ref);
        CHECK(class_counts(pair.d_bias, k) == largest_remainder_counts(bias, size_bias));

        const auto ref_counts = class_counts(pair.d_ref, k);
        const double uniform = 1.0 / static_cast<double>(k);
        for (std::size_t c = 0; c < k; ++c) {
            const double freq =
                static_cast<double>(ref_counts[c]) / static_cast<double>(pair.d_ref.size());
            CHECK(std::abs(freq - uniform) <= 1.0 / static_cast<double>(pair.d_ref.size()));
        }
    }
}

TEST_CASE("dataset pair names the deficient class") {
    const AttributeSpec spec = AttributeSpec::single("Gender", 2);
    const SyntheticFamily family = SyntheticFamily::gaussian_ring(spec);
    Rng rng(13);
    const SampleSet base = generate_base(family, spec, 1000, rng);
    try {
        build_dataset_pair(base, {0.9, 0.1}, 1000, 0.1, rng);
        FAIL("expected a deficiency error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("class 0") != std::string::npos);
    }
}

TEST_CASE("strip_labels preserves features and is idempotent") {
    const AttributeSpec spec = AttributeSpec::single("A", 2);
    const SyntheticFamily family = SyntheticFamily::gaussian_ring(spec);
    Rng rng(17);
    const SampleSet base = generate_base(family, spec, 40, rng);
    const FeatureView view = strip_labels(base);
    CHECK(view.size() == base.size());
    CHECK(view.feature_dim() == 2);
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(view.row(i)[0] == base[i].features[0]);
        CHECK(view.row(i)[1] == base[i].features[1]);
    }
    const FeatureView twice = strip_labels(view);
    CHECK(twice.size() == view.size());
    CHECK(twice.row(0)[0] == view.row(0)[0]);
}

TEST_CASE("sample cache round-trips doubles exactly") {
    SampleSet samples;
    samples.push_back({{1.0 / 3.0, -0.0}, 0});
    samples.push_back({{5e-324, 1.7976931348623157e308}, 1});  // denormal and max double
    samples.push_back({{-2.2250738585072014e-308, 0.1}, 0});
    const auto path = temp_file("fairtl_cache_test.txt");
    save_samples(path, samples, 2);
    std::size_t k = 0;
    const SampleSet loaded = load_samples(path, &k);
    CHECK(k == 2);
    REQUIRE(loaded.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(loaded[i].joint_label == samples[i].joint_label);
        for (std::size_t d = 0; d < samples[i].features.size(); ++d) {
            // bit-level equality, including the sign of zero
            CHECK(std::signbit(loaded[i].features[d]) == std::signbit(samples[i].features[d]));
            CHECK(loaded[i].features[d] == samples[i].features[d]);
        }
    }
    std::filesystem::remove(path);
}

TEST_CASE("sample cache round-trips random datasets") {
    const AttributeSpec spec = AttributeSpec::single("A", 3);
    const SyntheticFamily family = SyntheticFamily::gaussian_ring(spec);
    Rng rng(23);
    const SampleSet base = generate_base(family, spec, 200, rng);
    const auto path = temp_file("fairtl_cache_roundtrip.txt");
    save_samples(path, base, 3);
    const SampleSet loaded = load_samples(path, nullptr);
    REQUIRE(loaded.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(loaded[i].features == base[i].features);
        CHECK(loaded[i].joint_label == base[i].joint_label);
    }
    std::filesystem::remove(path);
}

TEST_CASE("sample cache rejects corrupt input") {
    const auto path = temp_file("fairtl_cache_bad.txt");
    {
        std::ofstream f(path);
        f << "not-a-dataset 9\n";
    }
    CHECK_THROWS_AS(load_samples(path, nullptr), std::runtime_error);
    {
        std::ofstream f(path);
        f << "fairtl-dataset 1\n2 2 5\n0x1p+0 0x1p+0 0\n";  // claims 5 rows, has 1
    }
    CHECK_THROWS_AS(load_samples(path, nullptr), std::runtime_error);
    std::filesystem::remove(path);
}
