#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fairtl/harness.hpp"
#include "fairtl/hash.hpp"

using namespace fairtl;

namespace {

// exit codes: 0 ok, 1 validation error, 2 runtime failure, 3 partial grid failure
constexpr int kOk = 0;
constexpr int kValidationError = 1;
constexpr int kRuntimeError = 2;
constexpr int kPartialFailure = 3;

AttributeSpec parse_attrs(const std::vector<std::string>& specs) {
    std::vector<AttributeSpec::Attribute> attrs;
    for (const auto& s : specs) {
        const auto colon = s.find(':');
        if (colon == std::string::npos) {
            throw std::invalid_argument("attribute must look like Name:cardinality, got " + s);
        }
        attrs.push_back({s.substr(0, colon),
                         static_cast<std::size_t>(std::stoul(s.substr(colon + 1)))});
    }
    return AttributeSpec(attrs);
}

std::vector<double> parse_bias(const std::string& csv) {
    std::vector<double> v;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    return v;
}

struct DatasetDir {
    SyntheticFamily::Kind family;
    AttributeSpec spec;
    std::vector<double> bias;
    double perc;
    std::size_t size_bias;
    std::uint64_t seed;
    SampleSet d_bias, d_ref, eval_holdout;
};

void write_manifest(const std::filesystem::path& dir, const DatasetDir& d) {
    std::ofstream f(dir / "manifest");
    f << "fairtl-dataset-dir 1\n";
    f << "family " << SyntheticFamily::kind_name(d.family) << "\n";
    f << "attributes " << d.spec.describe() << "\n";
    f << "bias";
    char buf[40];
    for (double v : d.bias) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        f << " " << buf;
    }
    f << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", d.perc);
    f << "perc " << buf << "\n";
    f << "size_bias " << d.size_bias << "\n";
    f << "seed " << d.seed << "\n";
    if (!f) throw std::runtime_error("cannot write manifest in " + dir.string());
}

DatasetDir load_dataset_dir(const std::filesystem::path& dir, bool need_bias = true) {
    std::ifstream f(dir / "manifest");
    if (!f) throw std::runtime_error("no dataset manifest in " + dir.string());
    DatasetDir d;
    std::string key;
    std::string magic, version;
    f >> magic >> version;
    if (magic != "fairtl-dataset-dir" || version != "1") {
        throw std::runtime_error("unrecognized dataset manifest in " + dir.string());
    }
    std::string line;
    std::getline(f, line);
    while (std::getline(f, line)) {
        std::istringstream ls(line);
        if (!(ls >> key)) continue;
        if (key == "family") {
            std::string v;
            ls >> v;
            d.family = SyntheticFamily::kind_from_name(v);
        } else if (key == "attributes") {
            std::string v;
            ls >> v;
            std::vector<std::string> parts;
            std::stringstream ss(v);
            std::string tok;
            while (std::getline(ss, tok, ',')) parts.push_back(tok);
            d.spec = parse_attrs(parts);
        } else if (key == "bias") {
            double v;
            while (ls >> v) d.bias.push_back(v);
        } else if (key == "perc") {
            ls >> d.perc;
        } else if (key == "size_bias") {
            ls >> d.size_bias;
        } else if (key == "seed") {
            ls >> d.seed;
        }
    }
    std::size_t k = 0;
    d.d_ref = load_samples(dir / "d_ref.txt", &k);
    d.eval_holdout = load_samples(dir / "eval_holdout.txt", &k);
    if (need_bias) d.d_bias = load_samples(dir / "d_bias.txt", &k);
    return d;
}

AttrClassifier make_classifier(const DatasetDir& d, const std::string& kind, std::uint64_t seed) {
    const SyntheticFamily family = SyntheticFamily::from_kind(d.family, d.spec);
    if (kind == "oracle") return AttrClassifier::bayes_oracle(family, d.spec);
    if (kind != "mlp") throw std::invalid_argument("classifier must be oracle or mlp");
    ClassifierConfig cc;
    cc.seed = seed;
    cc.min_accuracy = d.family == SyntheticFamily::Kind::GaussianMixture2d ? 0.95 : 0.9;
    return train_attr_classifier(d.eval_holdout, d.spec, cc);
}

std::size_t holdout_per_class_available(const DatasetDir& d) {
    const auto counts = class_counts(d.eval_holdout, d.spec.joint_cardinality());
    std::size_t m = counts.empty() ? 0 : counts[0];
    for (std::size_t c : counts) m = std::min(m, c);
    return m;
}

void print_report(const MetricsReport& rep) {
    std::printf("fd %.17g\n", rep.fd);
    std::printf("frechet_sq %.17g\n", rep.frechet);
    std::printf("n_samples %zu\n", rep.n_samples);
    std::printf("seed %llu\n", static_cast<unsigned long long>(rep.seed));
    std::printf("config_hash %016llx\n", static_cast<unsigned long long>(rep.config_hash));
}

void write_gallery(const GalleryResult& gal, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::ofstream f(out_dir / "pairs.txt");
    f << "# z... | before... | after...\n";
    char buf[40];
    auto put_row = [&](std::span<const double> row) {
        for (double v : row) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            f << buf << " ";
        }
    };
    for (std::size_t i = 0; i < gal.noise.rows(); ++i) {
        put_row(gal.noise.row(i));
        f << "| ";
        put_row(gal.before_samples.row(i));
        f << "| ";
        put_row(gal.after_samples.row(i));
        f << "\n";
    }
    if (gal.before_samples.cols() != 2) return;
    // 2d data: scatter of before (hollow) -> after (filled), pairs joined
    std::ofstream svg(out_dir / "gallery.svg");
    double lo = -4.5, hi = 4.5;
    auto sx = [&](double v) { return 20.0 + (v - lo) / (hi - lo) * 400.0; };
    auto sy = [&](double v) { return 420.0 - (v - lo) / (hi - lo) * 400.0; };
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"440\" height=\"440\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < gal.before_samples.rows(); ++i) {
        const double x0 = sx(gal.before_samples(i, 0)), y0 = sy(gal.before_samples(i, 1));
        const double x1 = sx(gal.after_samples(i, 0)), y1 = sy(gal.after_samples(i, 1));
        svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y1
            << "\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>\n";
        svg << "<circle cx=\"" << x0 << "\" cy=\"" << y0
            << "\" r=\"3\" fill=\"none\" stroke=\"#1f77b4\"/>\n";
        svg << "<circle cx=\"" << x1 << "\" cy=\"" << y1 << "\" r=\"3\" fill=\"#d62728\"/>\n";
    }
    svg << "</svg>\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairtl: fair generative-model training via transfer learning"};
    app.require_subcommand(1);

    // ---- dataset build ----
    auto* dataset = app.add_subcommand("dataset", "dataset construction");
    dataset->require_subcommand(1);
    auto* ds_build = dataset->add_subcommand("build", "build a (D_bias, D_ref, holdout) triple");
    std::string ds_family = "gauss2d";
    std::vector<std::string> ds_attrs = {"Gender:2"};
    std::string ds_bias = "0.9,0.1";
    std::size_t ds_size_bias = 4000, ds_holdout = 500;
    double ds_perc = 0.1;
    std::uint64_t ds_seed = 1;
    std::string ds_out;
    ds_build->add_option("--family", ds_family, "gauss2d or image8x8");
    ds_build->add_option("--attr", ds_attrs, "sensitive attribute Name:cardinality (repeatable)");
    ds_build->add_option("--bias", ds_bias, "joint-label probabilities, comma separated");
    ds_build->add_option("--size-bias", ds_size_bias, "|D_bias|");
    ds_build->add_option("--perc", ds_perc, "|D_ref| / |D_bias|");
    ds_build->add_option("--holdout-per-class", ds_holdout, "eval holdout size per joint label");
    ds_build->add_option("--seed", ds_seed, "rng seed");
    ds_build->add_option("--out", ds_out, "output directory")->required();

    // ---- pretrain ----
    auto* pre = app.add_subcommand("pretrain", "pretrain a GAN on D_bias union D_ref");
    std::string pre_data, pre_out;
    std::size_t pre_epochs = 200, pre_batch = 64;
    double pre_lr = 2e-4;
    std::uint64_t pre_seed = 1;
    std::string pre_loss_form = "non-saturating";
    pre->add_option("--data", pre_data, "dataset directory")->required();
    pre->add_option("--out", pre_out, "output checkpoint")->required();
    pre->add_option("--epochs", pre_epochs, "training epochs");
    pre->add_option("--batch", pre_batch, "batch size");
    pre->add_option("--lr", pre_lr, "learning rate (both networks)");
    pre->add_option("--seed", pre_seed, "rng seed");
    pre->add_option("--loss-form", pre_loss_form, "saturating or non-saturating");

    // ---- adapt ----
    auto* adapt = app.add_subcommand("adapt", "adapt a pretrained checkpoint on D_ref");
    std::string ad_ckpt, ad_data, ad_out, ad_method = "fairtlpp";
    std::size_t ad_epochs = 100, ad_batch = 64;
    double ad_lr = 2e-4, ad_lambda = 0.6;
    long long ad_lp_epochs = -1;
    std::uint64_t ad_seed = 2;
    std::string ad_loss_form = "non-saturating";
    adapt->add_option("--checkpoint", ad_ckpt, "pretrained checkpoint")->required();
    adapt->add_option("--data", ad_data, "dataset directory (only d_ref is read)")->required();
    adapt->add_option("--method", ad_method, "fairtl or fairtlpp");
    adapt->add_option("--lambda", ad_lambda, "target-discriminator weight (fairtlpp)");
    adapt->add_option("--lp-epochs", ad_lp_epochs,
                      "Linear-Probing epochs T (fairtlpp; default 20% of epochs)");
    adapt->add_option("--epochs", ad_epochs, "adaptation epochs");
    adapt->add_option("--batch", ad_batch, "batch size");
    adapt->add_option("--lr", ad_lr, "learning rate");
    adapt->add_option("--seed", ad_seed, "rng seed");
    adapt->add_option("--loss-form", ad_loss_form, "saturating or non-saturating");
    adapt->add_option("--out", ad_out, "output checkpoint")->required();

    // ---- debias (Setup 2) ----
    auto* debias = app.add_subcommand(
        "debias", "debias a pretrained checkpoint with only a reference-set file");
    std::string db_ckpt, db_ref, db_out, db_method = "fairtlpp";
    std::size_t db_epochs = 100, db_batch = 64;
    double db_lr = 2e-4, db_lambda = 0.6;
    long long db_lp_epochs = -1;
    std::uint64_t db_seed = 2;
    debias->add_option("--checkpoint", db_ckpt, "pretrained checkpoint")->required();
    debias->add_option("--ref", db_ref, "reference sample file (dataset cache format)")
        ->required();
    debias->add_option("--method", db_method, "fairtl or fairtlpp");
    debias->add_option("--lambda", db_lambda, "target-discriminator weight (fairtlpp)");
    debias->add_option("--lp-epochs", db_lp_epochs, "Linear-Probing epochs T");
    debias->add_option("--epochs", db_epochs, "adaptation epochs");
    debias->add_option("--batch", db_batch, "batch size");
    debias->add_option("--lr", db_lr, "learning rate");
    debias->add_option("--seed", db_seed, "rng seed");
    debias->add_option("--out", db_out, "output checkpoint")->required();

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "compute FD and Frechet metrics for a checkpoint");
    std::string ev_ckpt, ev_data, ev_classifier = "oracle";
    std::size_t ev_n = 4096;
    std::uint64_t ev_seed = 3;
    eval->add_option("--checkpoint", ev_ckpt, "checkpoint to evaluate")->required();
    eval->add_option("--data", ev_data, "dataset directory (holdout gives reference stats)")
        ->required();
    eval->add_option("--n", ev_n, "generator samples");
    eval->add_option("--seed", ev_seed, "rng seed");
    eval->add_option("--classifier", ev_classifier, "oracle or mlp");

    // ---- grid run ----
    auto* grid = app.add_subcommand("grid", "experiment grids");
    grid->require_subcommand(1);
    auto* grid_run_cmd = grid->add_subcommand("run", "run a method x perc x bias x seed grid");
    std::string gr_config, gr_out;
    std::size_t gr_par = 1;
    grid_run_cmd->add_option("--config", gr_config, "grid config file")->required();
    grid_run_cmd->add_option("--out", gr_out, "output directory")->required();
    grid_run_cmd->add_option("--parallelism", gr_par, "worker threads");

    // ---- layer-study ----
    auto* study = app.add_subcommand(
        "layer-study", "per-layer weight change of fairTL adaptation with a large D_ref");
    std::string ls_family = "gauss2d";
    std::vector<std::string> ls_attrs = {"Gender:2"};
    std::string ls_bias = "0.9,0.1", ls_out;
    std::size_t ls_size_bias = 2000, ls_pre_epochs = 100, ls_adapt_epochs = 50, ls_batch = 64;
    double ls_ref_ratio = 1.0, ls_lr = 2e-4;
    std::uint64_t ls_seed = 1;
    study->add_option("--family", ls_family, "gauss2d or image8x8");
    study->add_option("--attr", ls_attrs, "sensitive attribute Name:cardinality (repeatable)");
    study->add_option("--bias", ls_bias, "pretraining bias vector");
    study->add_option("--size-bias", ls_size_bias, "|D_bias|");
    study->add_option("--ref-ratio", ls_ref_ratio, "|D_ref| as a fraction of the pretraining set");
    study->add_option("--pretrain-epochs", ls_pre_epochs, "pretraining epochs");
    study->add_option("--adapt-epochs", ls_adapt_epochs, "adaptation epochs");
    study->add_option("--batch", ls_batch, "batch size");
    study->add_option("--lr", ls_lr, "learning rate");
    study->add_option("--seed", ls_seed, "rng seed");
    study->add_option("--out", ls_out, "output CSV (default stdout)");

    // ---- gallery ----
    auto* gallery = app.add_subcommand("gallery",
                                       "paired before/after samples from one noise batch");
    std::string ga_before, ga_after, ga_out;
    std::size_t ga_n = 16;
    std::uint64_t ga_seed = 7;
    gallery->add_option("--before", ga_before, "checkpoint sampled as 'before'")->required();
    gallery->add_option("--after", ga_after, "checkpoint sampled as 'after'")->required();
    gallery->add_option("--n", ga_n, "number of pairs");
    gallery->add_option("--seed", ga_seed, "noise seed");
    gallery->add_option("--out", ga_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ds_build) {
            const AttributeSpec spec = parse_attrs(ds_attrs);
            const auto family_kind = SyntheticFamily::kind_from_name(ds_family);
            const SyntheticFamily family = SyntheticFamily::from_kind(family_kind, spec);
            const std::vector<double> bias = parse_bias(ds_bias);
            const std::size_t k = spec.joint_cardinality();

            const auto bias_counts = largest_remainder_counts(bias, ds_size_bias);
            const std::size_t n_ref = static_cast<std::size_t>(
                std::llround(ds_perc * static_cast<double>(ds_size_bias)));
            const auto ref_counts = largest_remainder_counts(
                std::vector<double>(k, 1.0 / static_cast<double>(k)), n_ref);
            std::size_t max_required = 0;
            for (std::size_t c = 0; c < k; ++c) {
                max_required = std::max(max_required, bias_counts[c] + ref_counts[c] + ds_holdout);
            }
            Rng rng(ds_seed);
            const SampleSet base = generate_base(family, spec, k * max_required, rng);
            const DatasetPair pair = build_dataset_pair(base, bias, ds_size_bias, ds_perc, rng);

            std::filesystem::create_directories(ds_out);
            save_samples(std::filesystem::path(ds_out) / "d_bias.txt", pair.d_bias, k);
            save_samples(std::filesystem::path(ds_out) / "d_ref.txt", pair.d_ref, k);
            save_samples(std::filesystem::path(ds_out) / "eval_holdout.txt", pair.eval_holdout, k);
            DatasetDir d{family_kind, spec, bias, ds_perc, ds_size_bias, ds_seed, {}, {}, {}};
            write_manifest(ds_out, d);
            std::printf("wrote %zu bias / %zu ref / %zu holdout samples to %s\n",
                        pair.d_bias.size(), pair.d_ref.size(), pair.eval_holdout.size(),
                        ds_out.c_str());
        } else if (*pre) {
            DatasetDir d = load_dataset_dir(pre_data);
            SampleSet union_set = d.d_bias;
            union_set.insert(union_set.end(), d.d_ref.begin(), d.d_ref.end());
            StageConfig cfg;
            cfg.epochs = pre_epochs;
            cfg.loss.batch_size = pre_batch;
            cfg.loss.lr_g = cfg.loss.lr_d = pre_lr;
            cfg.loss.form = pre_loss_form == "saturating" ? GenLossForm::Saturating
                                                          : GenLossForm::NonSaturating;
            cfg.seed = pre_seed;
            const ArchSpec arch = ArchSpec::for_family(SyntheticFamily::from_kind(d.family, d.spec));
            GanState state = pretrain(strip_labels(union_set), arch, cfg);
            save_checkpoint(state, pre_out, {1, Stage::Pretrained, 0, pre_seed});
            std::printf("pretrained %zu epochs on %zu samples -> %s\n", pre_epochs,
                        union_set.size(), pre_out.c_str());
        } else if (*adapt) {
            DatasetDir d = load_dataset_dir(ad_data, /*need_bias=*/false);
            GanState source = load_checkpoint(ad_ckpt);
            StageConfig cfg;
            cfg.epochs = ad_epochs;
            cfg.loss.batch_size = ad_batch;
            cfg.loss.lr_g = cfg.loss.lr_d = ad_lr;
            cfg.loss.lambda = ad_lambda;
            cfg.loss.form = ad_loss_form == "saturating" ? GenLossForm::Saturating
                                                         : GenLossForm::NonSaturating;
            cfg.seed = ad_seed;
            const AdaptMethod method = adapt_method_from_name(ad_method);
            GanState adapted;
            if (method == AdaptMethod::FairTLpp) {
                const std::size_t lp = ad_lp_epochs >= 0
                                           ? static_cast<std::size_t>(ad_lp_epochs)
                                           : ad_epochs / 5;
                cfg.freeze =
                    FreezeMask::input_nearest_two(source.discriminator.num_layers(), lp);
            }
            adapted = method == AdaptMethod::FairTL
                          ? adapt_fairtl(source, strip_labels(d.d_ref), cfg)
                          : adapt_fairtlpp(source, strip_labels(d.d_ref), cfg);
            save_checkpoint(adapted, ad_out, {1, adapted.stage, 0, ad_seed});
            std::printf("%s adaptation done -> %s\n", ad_method.c_str(), ad_out.c_str());
        } else if (*debias) {
            GanState source = load_checkpoint(db_ckpt);
            std::size_t k = 0;
            const SampleSet ref = load_samples(db_ref, &k);
            StageConfig cfg;
            cfg.epochs = db_epochs;
            cfg.loss.batch_size = db_batch;
            cfg.loss.lr_g = cfg.loss.lr_d = db_lr;
            cfg.loss.lambda = db_lambda;
            cfg.seed = db_seed;
            const AdaptMethod method = adapt_method_from_name(db_method);
            if (method == AdaptMethod::FairTLpp) {
                const std::size_t lp = db_lp_epochs >= 0
                                           ? static_cast<std::size_t>(db_lp_epochs)
                                           : db_epochs / 5;
                cfg.freeze =
                    FreezeMask::input_nearest_two(source.discriminator.num_layers(), lp);
            }
            GanState adapted = debias_pretrained(source, strip_labels(ref), method, cfg);
            save_checkpoint(adapted, db_out, {1, adapted.stage, 0, db_seed});
            std::printf("debiased with %s using %zu reference samples -> %s\n", db_method.c_str(),
                        ref.size(), db_out.c_str());
        } else if (*eval) {
            DatasetDir d = load_dataset_dir(ev_data, /*need_bias=*/false);
            GanState state = load_checkpoint(ev_ckpt);
            AttrClassifier classifier = make_classifier(d, ev_classifier, mix64(ev_seed, 6));
            Rng ref_rng(mix64(ev_seed, 2));
            const GaussStats ref_stats = balanced_reference_stats(
                d.eval_holdout, d.spec, holdout_per_class_available(d), ref_rng);
            Rng rng(ev_seed);
            MetricsReport rep = evaluate_gan(state, classifier, ref_stats, ev_n, rng);
            print_report(rep);
        } else if (*grid_run_cmd) {
            const ExperimentGrid g = parse_grid_config(gr_config);
            const GridOutcome outcome = run_grid(g, gr_par, gr_out);
            std::printf("%zu cells, %zu report rows -> %s\n", outcome.cells.size(),
                        outcome.rows.size(), gr_out.c_str());
            if (outcome.partial_failure) {
                std::fprintf(stderr, "some grid cells failed; see grid_errors.txt\n");
                return kPartialFailure;
            }
        } else if (*study) {
            const AttributeSpec spec = parse_attrs(ls_attrs);
            const auto family_kind = SyntheticFamily::kind_from_name(ls_family);
            const SyntheticFamily family = SyntheticFamily::from_kind(family_kind, spec);
            const std::vector<double> bias = parse_bias(ls_bias);
            const std::size_t k = spec.joint_cardinality();

            Rng rng(ls_seed);
            const std::size_t n_ref = static_cast<std::size_t>(
                std::llround(ls_ref_ratio * static_cast<double>(ls_size_bias)));
            const auto bias_counts = largest_remainder_counts(bias, ls_size_bias);
            std::size_t max_required = 0;
            for (std::size_t c = 0; c < k; ++c) {
                max_required = std::max(max_required, bias_counts[c] + n_ref / k + 1);
            }
            const SampleSet base = generate_base(family, spec, k * max_required, rng);
            const DatasetPair pair = build_dataset_pair(
                base, bias, ls_size_bias,
                std::min(1.0, static_cast<double>(n_ref) / static_cast<double>(ls_size_bias)),
                rng);
            SampleSet union_set = pair.d_bias;
            union_set.insert(union_set.end(), pair.d_ref.begin(), pair.d_ref.end());

            StageConfig pre_cfg, ad_cfg;
            pre_cfg.epochs = ls_pre_epochs;
            pre_cfg.loss.batch_size = ls_batch;
            pre_cfg.loss.lr_g = pre_cfg.loss.lr_d = ls_lr;
            pre_cfg.seed = mix64(ls_seed, 3);
            ad_cfg = pre_cfg;
            ad_cfg.epochs = ls_adapt_epochs;
            ad_cfg.seed = mix64(ls_seed, 4);

            const ArchSpec arch = ArchSpec::for_family(family);
            const LayerChangeStudy result =
                layer_change_study(strip_labels(union_set), strip_labels(pair.d_ref), arch,
                                   pre_cfg, ad_cfg, /*min_ref_ratio=*/0.0);
            std::string csv = "network,layer,mean_abs_change\n";
            char buf[64];
            for (const auto& row : result.rows) {
                std::snprintf(buf, sizeof(buf), "%c,%zu,%.17g\n", row.network, row.layer,
                              row.mean_abs_change);
                csv += buf;
            }
            if (ls_out.empty()) {
                std::fputs(csv.c_str(), stdout);
            } else {
                std::ofstream f(ls_out, std::ios::binary | std::ios::trunc);
                f << csv;
                if (!f) throw std::runtime_error("cannot write " + ls_out);
            }
        } else if (*gallery) {
            GanState before = load_checkpoint(ga_before);
            GanState after = load_checkpoint(ga_after);
            Rng rng(ga_seed);
            const GalleryResult gal = fixed_noise_gallery(before, after, ga_n, rng);
            write_gallery(gal, ga_out);
            std::printf("wrote %zu sample pairs to %s\n", gal.noise.rows(), ga_out.c_str());
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kValidationError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntimeError;
    }
    return kOk;
}
