#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fairtl/harness.hpp"
#include "fairtl/hash.hpp"

namespace py = pybind11;
using namespace fairtl;

namespace {

Matrix matrix_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> arr) {
    if (arr.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
    Matrix m(static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)));
    std::copy_n(arr.data(), m.size(), m.data());
    return m;
}

py::array_t<double> array_from_matrix(const Matrix& m) {
    py::array_t<double> arr({m.rows(), m.cols()});
    std::copy_n(m.data(), m.size(), arr.mutable_data());
    return arr;
}

// A dataset bundle: family + attribute spec + the constructed split.
struct PyDataset {
    SyntheticFamily::Kind kind;
    AttributeSpec spec;
    DatasetPair pair;

    SyntheticFamily family() const { return SyntheticFamily::from_kind(kind, spec); }
};

PyDataset build_dataset(const std::string& family,
                        const std::vector<std::pair<std::string, std::size_t>>& attributes,
                        const std::vector<double>& bias, std::size_t size_bias, double perc,
                        std::size_t holdout_per_class, std::uint64_t seed) {
    PyDataset d;
    d.kind = SyntheticFamily::kind_from_name(family);
    std::vector<AttributeSpec::Attribute> attrs;
    for (const auto& [name, card] : attributes) attrs.push_back({name, card});
    d.spec = AttributeSpec(attrs);
    const SyntheticFamily fam = d.family();
    const std::size_t k = d.spec.joint_cardinality();

    const auto bias_counts = largest_remainder_counts(bias, size_bias);
    const std::size_t n_ref =
        static_cast<std::size_t>(std::llround(perc * static_cast<double>(size_bias)));
    const auto ref_counts = largest_remainder_counts(
        std::vector<double>(k, 1.0 / static_cast<double>(k)), n_ref);
    std::size_t max_required = 0;
    for (std::size_t c = 0; c < k; ++c) {
        max_required = std::max(max_required, bias_counts[c] + ref_counts[c] + holdout_per_class);
    }
    Rng rng(seed);
    const SampleSet base = generate_base(fam, d.spec, k * max_required, rng);
    d.pair = build_dataset_pair(base, bias, size_bias, perc, rng);
    return d;
}

py::array_t<double> features_of(const SampleSet& samples) {
    return array_from_matrix(strip_labels(samples).all_rows());
}

py::array_t<std::int64_t> labels_of(const SampleSet& samples) {
    py::array_t<std::int64_t> arr(
        std::vector<py::ssize_t>{static_cast<py::ssize_t>(samples.size())});
    auto* out = arr.mutable_data();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out[i] = static_cast<std::int64_t>(samples[i].joint_label);
    }
    return arr;
}

StageConfig make_stage_config(std::size_t epochs, std::size_t batch_size, double lr,
                              double lambda, const std::string& loss_form, std::uint64_t seed) {
    StageConfig cfg;
    cfg.epochs = epochs;
    cfg.loss.batch_size = batch_size;
    cfg.loss.lr_g = cfg.loss.lr_d = lr;
    cfg.loss.lambda = lambda;
    if (loss_form == "saturating") {
        cfg.loss.form = GenLossForm::Saturating;
    } else if (loss_form == "non-saturating") {
        cfg.loss.form = GenLossForm::NonSaturating;
    } else {
        throw std::invalid_argument("loss_form must be saturating or non-saturating");
    }
    cfg.seed = seed;
    return cfg;
}

GanState run_adapt(const GanState& source, const FeatureView& ref, const std::string& method,
                   StageConfig cfg, std::optional<std::size_t> lp_epochs) {
    const AdaptMethod m = adapt_method_from_name(method);
    if (m == AdaptMethod::FairTLpp) {
        const std::size_t lp = lp_epochs.value_or(cfg.epochs / 5);
        cfg.freeze = FreezeMask::input_nearest_two(source.discriminator.num_layers(), lp);
    }
    return debias_pretrained(source, ref, m, cfg);
}

AttrClassifier classifier_for(const PyDataset& d, const std::string& kind, std::uint64_t seed) {
    if (kind == "oracle") return AttrClassifier::bayes_oracle(d.family(), d.spec);
    if (kind != "mlp") throw std::invalid_argument("classifier must be oracle or mlp");
    ClassifierConfig cc;
    cc.seed = seed;
    cc.min_accuracy = d.kind == SyntheticFamily::Kind::GaussianMixture2d ? 0.95 : 0.9;
    return train_attr_classifier(d.pair.eval_holdout, d.spec, cc);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "fair GAN training via transfer learning (fairTL / fairTL++)";

    py::class_<PyDataset>(m, "Dataset")
        .def_property_readonly("joint_cardinality",
                               [](const PyDataset& d) { return d.spec.joint_cardinality(); })
        .def_property_readonly("feature_dim",
                               [](const PyDataset& d) { return d.family().feature_dim; })
        .def_property_readonly("n_bias", [](const PyDataset& d) { return d.pair.d_bias.size(); })
        .def_property_readonly("n_ref", [](const PyDataset& d) { return d.pair.d_ref.size(); })
        .def_property_readonly("n_holdout",
                               [](const PyDataset& d) { return d.pair.eval_holdout.size(); })
        .def("bias_features", [](const PyDataset& d) { return features_of(d.pair.d_bias); })
        .def("ref_features", [](const PyDataset& d) { return features_of(d.pair.d_ref); })
        .def("holdout_features",
             [](const PyDataset& d) { return features_of(d.pair.eval_holdout); })
        .def("holdout_labels", [](const PyDataset& d) { return labels_of(d.pair.eval_holdout); });

    py::class_<GanState>(m, "Gan")
        .def_property_readonly("stage", [](const GanState& s) { return stage_name(s.stage); })
        .def_property_readonly("latent_dim", &GanState::latent_dim)
        .def_property_readonly("data_dim", &GanState::data_dim)
        .def("sample", [](const GanState& s, std::size_t n, std::uint64_t seed) {
            Rng rng(seed);
            Matrix z = gauss_sample(rng, n, s.latent_dim());
            return array_from_matrix(mlp_forward(s.generator, z));
        }, py::arg("n"), py::arg("seed"));

    m.def("build_dataset", &build_dataset, py::arg("family"), py::arg("attributes"),
          py::arg("bias"), py::arg("size_bias"), py::arg("perc"),
          py::arg("holdout_per_class") = 500, py::arg("seed") = 1);

    m.def("pretrain",
          [](const PyDataset& d, std::size_t epochs, std::size_t batch_size, double lr,
             const std::string& loss_form, std::uint64_t seed) {
              SampleSet union_set = d.pair.d_bias;
              union_set.insert(union_set.end(), d.pair.d_ref.begin(), d.pair.d_ref.end());
              const StageConfig cfg =
                  make_stage_config(epochs, batch_size, lr, 1.0, loss_form, seed);
              const ArchSpec arch = ArchSpec::for_family(d.family());
              return pretrain(strip_labels(union_set), arch, cfg);
          },
          py::arg("dataset"), py::arg("epochs") = 200, py::arg("batch_size") = 64,
          py::arg("lr") = 2e-4, py::arg("loss_form") = "non-saturating", py::arg("seed") = 1);

    m.def("adapt",
          [](const GanState& source, const PyDataset& d, const std::string& method,
             double lambda, std::optional<std::size_t> lp_epochs, std::size_t epochs,
             std::size_t batch_size, double lr, const std::string& loss_form,
             std::uint64_t seed) {
              const StageConfig cfg =
                  make_stage_config(epochs, batch_size, lr, lambda, loss_form, seed);
              return run_adapt(source, strip_labels(d.pair.d_ref), method, cfg, lp_epochs);
          },
          py::arg("gan"), py::arg("dataset"), py::arg("method") = "fairtlpp",
          py::arg("lambda_") = 0.6, py::arg("lp_epochs") = py::none(), py::arg("epochs") = 100,
          py::arg("batch_size") = 64, py::arg("lr") = 2e-4,
          py::arg("loss_form") = "non-saturating", py::arg("seed") = 2);

    m.def("debias",
          [](const GanState& source,
             py::array_t<double, py::array::c_style | py::array::forcecast> ref_features,
             const std::string& method, double lambda, std::optional<std::size_t> lp_epochs,
             std::size_t epochs, std::size_t batch_size, double lr, std::uint64_t seed) {
              const Matrix ref = matrix_from_array(ref_features);
              SampleSet samples(ref.rows());
              for (std::size_t i = 0; i < ref.rows(); ++i) {
                  samples[i].features.assign(ref.row(i).begin(), ref.row(i).end());
              }
              const StageConfig cfg =
                  make_stage_config(epochs, batch_size, lr, lambda, "non-saturating", seed);
              return run_adapt(source, strip_labels(samples), method, cfg, lp_epochs);
          },
          py::arg("gan"), py::arg("ref_features"), py::arg("method") = "fairtlpp",
          py::arg("lambda_") = 0.6, py::arg("lp_epochs") = py::none(), py::arg("epochs") = 100,
          py::arg("batch_size") = 64, py::arg("lr") = 2e-4, py::arg("seed") = 2);

    m.def("evaluate",
          [](const GanState& state, const PyDataset& d, std::size_t n, std::uint64_t seed,
             const std::string& classifier) {
              const AttrClassifier cls = classifier_for(d, classifier, mix64(seed, 6));
              const auto counts = class_counts(d.pair.eval_holdout, d.spec.joint_cardinality());
              const std::size_t per_class = *std::min_element(counts.begin(), counts.end());
              Rng ref_rng(mix64(seed, 2));
              const GaussStats ref =
                  balanced_reference_stats(d.pair.eval_holdout, d.spec, per_class, ref_rng);
              Rng rng(seed);
              const MetricsReport rep = evaluate_gan(state, cls, ref, n, rng);
              py::dict out;
              out["fd"] = rep.fd;
              out["frechet_sq"] = rep.frechet;
              out["n_samples"] = rep.n_samples;
              out["seed"] = rep.seed;
              return out;
          },
          py::arg("gan"), py::arg("dataset"), py::arg("n") = 4096, py::arg("seed") = 3,
          py::arg("classifier") = "oracle");

    m.def("save_checkpoint",
          [](const GanState& state, const std::string& path, std::uint64_t seed) {
              save_checkpoint(state, path, CheckpointMeta{1, state.stage, 0, seed});
          },
          py::arg("gan"), py::arg("path"), py::arg("seed") = 0);

    m.def("load_checkpoint",
          [](const std::string& path) { return load_checkpoint(path, nullptr); },
          py::arg("path"));

    m.def("gallery",
          [](const GanState& before, const GanState& after, std::size_t n, std::uint64_t seed) {
              Rng rng(seed);
              const GalleryResult gal = fixed_noise_gallery(before, after, n, rng);
              return py::make_tuple(array_from_matrix(gal.noise),
                                    array_from_matrix(gal.before_samples),
                                    array_from_matrix(gal.after_samples));
          },
          py::arg("before"), py::arg("after"), py::arg("n") = 16, py::arg("seed") = 7);

    m.def("fd_from_counts", [](const std::vector<std::size_t>& counts) {
        return fd_from_counts(counts);
    });

    m.def("frechet_sq",
          [](py::array_t<double, py::array::c_style | py::array::forcecast> a,
             py::array_t<double, py::array::c_style | py::array::forcecast> b) {
              return frechet_sq(fit_gauss_stats(matrix_from_array(a)),
                                fit_gauss_stats(matrix_from_array(b)));
          },
          py::arg("samples_a"), py::arg("samples_b"),
          "Squared Frechet distance between Gaussian fits of two sample sets");
}
