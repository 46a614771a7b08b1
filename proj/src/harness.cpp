#include "fairtl/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fairtl/hash.hpp"

namespace fairtl {

std::string method_name(Method m) {
    switch (m) {
        case Method::PretrainedOnly: return "pretrained";
        case Method::FairTL: return "fairtl";
        case Method::FairTLpp: return "fairtlpp";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "pretrained" || name == "pretrained-only") return Method::PretrainedOnly;
    if (name == "fairtl") return Method::FairTL;
    if (name == "fairtlpp" || name == "fairtl++") return Method::FairTLpp;
    throw std::invalid_argument("unknown method: " + name);
}

void ExperimentGrid::validate() const {
    if (biases.empty() || percs.empty() || methods.empty() || seeds.empty()) {
        throw std::invalid_argument("grid: every dimension must be non-empty");
    }
    const std::size_t k = spec.joint_cardinality();
    for (const auto& b : biases) {
        if (b.vector.size() != k) {
            throw std::invalid_argument("grid: bias '" + b.id + "' has " +
                                        std::to_string(b.vector.size()) + " entries, expected " +
                                        std::to_string(k));
        }
        if (b.id.empty() || b.id.find(',') != std::string::npos) {
            throw std::invalid_argument("grid: bias id must be non-empty and comma-free");
        }
    }
    for (double p : percs) {
        if (p <= 0.0 || p > 1.0) throw std::invalid_argument("grid: percs must lie in (0,1]");
    }
    if (size_bias == 0 || pretrain_epochs == 0 || adapt_epochs == 0 || batch_size == 0) {
        throw std::invalid_argument("grid: counts must be positive");
    }
    if (lr <= 0.0 || adapt_lr <= 0.0) throw std::invalid_argument("grid: learning rates must be positive");
    if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("grid: lambda must be in [0,1]");
    if (lp_fraction < 0.0 || lp_fraction >= 1.0) {
        throw std::invalid_argument("grid: lp_fraction must be in [0,1)");
    }
    if (use_oracle_classifier && family != SyntheticFamily::Kind::GaussianMixture2d) {
        throw std::invalid_argument("grid: the oracle classifier exists only for gauss2d");
    }
}

ArchSpec ExperimentGrid::arch() const {
    return ArchSpec::for_family(SyntheticFamily::from_kind(family, spec));
}

namespace {

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string ExperimentGrid::resolved_config_text() const {
    std::string s;
    s += "family " + SyntheticFamily::kind_name(family) + "\n";
    s += "attributes " + spec.describe() + "\n";
    for (const auto& b : biases) {
        s += "bias " + b.id;
        for (double v : b.vector) s += " " + fmt_g(v);
        s += "\n";
    }
    s += "percs";
    for (double p : percs) s += " " + fmt_g(p);
    s += "\n";
    s += "methods";
    for (Method m : methods) s += " " + method_name(m);
    s += "\n";
    s += "seeds";
    for (std::uint64_t v : seeds) s += " " + std::to_string(v);
    s += "\n";
    s += "size_bias " + std::to_string(size_bias) + "\n";
    s += "holdout_per_class " + std::to_string(holdout_per_class) + "\n";
    s += "pretrain_epochs " + std::to_string(pretrain_epochs) + "\n";
    s += "adapt_epochs " + std::to_string(adapt_epochs) + "\n";
    s += "batch_size " + std::to_string(batch_size) + "\n";
    s += "lr " + fmt_g(lr) + "\n";
    s += "adapt_lr " + fmt_g(adapt_lr) + "\n";
    s += "lambda " + fmt_g(lambda) + "\n";
    s += "lp_fraction " + fmt_g(lp_fraction) + "\n";
    s += std::string("loss_form ") +
         (loss_form == GenLossForm::NonSaturating ? "non-saturating" : "saturating") + "\n";
    s += "metric_samples " + std::to_string(metric_samples) + "\n";
    s += "eval_every " + std::to_string(eval_every) + "\n";
    s += "grid_seed " + std::to_string(grid_seed) + "\n";
    s += std::string("classifier ") + (use_oracle_classifier ? "oracle" : "mlp") + "\n";
    const ArchSpec a = arch();
    s += "arch latent " + std::to_string(a.latent_dim) + " gen";
    for (std::size_t d : a.gen_hidden) s += " " + std::to_string(d);
    s += " disc";
    for (std::size_t d : a.disc_hidden) s += " " + std::to_string(d);
    s += " data " + std::to_string(a.data_dim) + "\n";
    return s;
}

std::uint64_t ExperimentGrid::config_hash() const { return fnv1a64(resolved_config_text()); }

ExperimentGrid parse_grid_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    ExperimentGrid g;
    std::vector<AttributeSpec::Attribute> attrs;
    g.methods.clear();
    g.seeds.clear();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        auto fail = [&](const std::string& why) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": " + why);
        };
        if (key == "family") {
            std::string v;
            ls >> v;
            g.family = SyntheticFamily::kind_from_name(v);
        } else if (key == "attr") {
            std::string name;
            std::size_t card = 0;
            if (!(ls >> name >> card)) fail("attr needs: name cardinality");
            attrs.push_back({name, card});
        } else if (key == "bias") {
            BiasSetting b;
            if (!(ls >> b.id)) fail("bias needs: id p0 p1 ...");
            double v;
            while (ls >> v) b.vector.push_back(v);
            if (b.vector.empty()) fail("bias needs probabilities");
            g.biases.push_back(std::move(b));
        } else if (key == "percs") {
            g.percs.clear();
            double v;
            while (ls >> v) g.percs.push_back(v);
        } else if (key == "methods") {
            std::string m;
            while (ls >> m) g.methods.push_back(method_from_name(m));
        } else if (key == "seeds") {
            std::uint64_t v;
            while (ls >> v) g.seeds.push_back(v);
        } else if (key == "size_bias") {
            ls >> g.size_bias;
        } else if (key == "holdout_per_class") {
            ls >> g.holdout_per_class;
        } else if (key == "pretrain_epochs") {
            ls >> g.pretrain_epochs;
        } else if (key == "adapt_epochs") {
            ls >> g.adapt_epochs;
        } else if (key == "batch_size") {
            ls >> g.batch_size;
        } else if (key == "lr") {
            ls >> g.lr;
        } else if (key == "adapt_lr") {
            ls >> g.adapt_lr;
        } else if (key == "lambda") {
            ls >> g.lambda;
        } else if (key == "lp_fraction") {
            ls >> g.lp_fraction;
        } else if (key == "loss_form") {
            std::string v;
            ls >> v;
            if (v == "non-saturating") g.loss_form = GenLossForm::NonSaturating;
            else if (v == "saturating") g.loss_form = GenLossForm::Saturating;
            else fail("loss_form must be saturating or non-saturating");
        } else if (key == "metric_samples") {
            ls >> g.metric_samples;
        } else if (key == "eval_every") {
            ls >> g.eval_every;
        } else if (key == "grid_seed") {
            ls >> g.grid_seed;
        } else if (key == "classifier") {
            std::string v;
            ls >> v;
            if (v == "oracle") g.use_oracle_classifier = true;
            else if (v == "mlp") g.use_oracle_classifier = false;
            else fail("classifier must be oracle or mlp");
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    if (!attrs.empty()) g.spec = AttributeSpec(std::move(attrs));
    if (g.methods.empty()) {
        g.methods = {Method::PretrainedOnly, Method::FairTL, Method::FairTLpp};
    }
    if (g.seeds.empty()) g.seeds = {1, 2, 3, 4, 5};
    g.validate();
    return g;
}

namespace {

struct CellContext {
    const ExperimentGrid& grid;
    std::filesystem::path out_dir;
    std::uint64_t config_hash;
};

LossConfig make_loss_config(const ExperimentGrid& g, double lr) {
    LossConfig c;
    c.lambda = g.lambda;
    c.form = g.loss_form;
    c.batch_size = g.batch_size;
    c.lr_g = lr;
    c.lr_d = lr;
    return c;
}

std::string cell_dir_name(const ExperimentGrid& g, const CellKey& key) {
    char perc_buf[32];
    std::snprintf(perc_buf, sizeof(perc_buf), "%g", g.percs[key.perc_idx]);
    return g.biases[key.bias_idx].id + "_perc" + perc_buf + "_seed" +
           std::to_string(g.seeds[key.seed_idx]);
}

void write_series_csv(const std::filesystem::path& path, const RunRecord& record) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "epoch,fd,frechet,n_samples\n";
    for (const auto& m : record.metrics) {
        f << m.epoch << "," << fmt_g(m.fd) << "," << fmt_g(m.frechet) << "," << m.n_samples
          << "\n";
    }
}

CellResult run_cell(const CellContext& ctx, const CellKey& key) {
    const ExperimentGrid& g = ctx.grid;
    CellResult result;
    result.key = key;
    result.config_hash = ctx.config_hash;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const std::vector<double>& bias = g.biases[key.bias_idx].vector;
        const double perc = g.percs[key.perc_idx];
        const std::uint64_t seed_value = g.seeds[key.seed_idx];
        const std::size_t k = g.spec.joint_cardinality();

        std::uint64_t h = mix64(g.grid_seed, 0xce11);
        h = mix64(h, key.bias_idx);
        h = mix64(h, key.perc_idx);
        h = mix64(h, seed_value);

        const SyntheticFamily family = SyntheticFamily::from_kind(g.family, g.spec);

        // base pool sized so that every class covers bias + ref + holdout
        const auto bias_counts = largest_remainder_counts(bias, g.size_bias);
        const std::size_t n_ref = static_cast<std::size_t>(
            std::llround(perc * static_cast<double>(g.size_bias)));
        const auto ref_counts = largest_remainder_counts(
            std::vector<double>(k, 1.0 / static_cast<double>(k)), n_ref);
        std::size_t max_required = 0;
        for (std::size_t c = 0; c < k; ++c) {
            max_required =
                std::max(max_required, bias_counts[c] + ref_counts[c] + g.holdout_per_class);
        }
        Rng data_rng(mix64(h, 1));
        const SampleSet base = generate_base(family, g.spec, k * max_required, data_rng);
        const DatasetPair pair = build_dataset_pair(base, bias, g.size_bias, perc, data_rng);

        SampleSet union_set = pair.d_bias;
        union_set.insert(union_set.end(), pair.d_ref.begin(), pair.d_ref.end());
        const FeatureView union_view = strip_labels(union_set);
        const FeatureView ref_view = strip_labels(pair.d_ref);

        AttrClassifier classifier = [&] {
            if (g.use_oracle_classifier) return AttrClassifier::bayes_oracle(family, g.spec);
            ClassifierConfig cc;
            cc.seed = mix64(h, 6);
            cc.min_accuracy =
                g.family == SyntheticFamily::Kind::GaussianMixture2d ? 0.95 : 0.9;
            return train_attr_classifier(pair.eval_holdout, g.spec, cc);
        }();
        Rng ref_rng(mix64(h, 2));
        const GaussStats ref_stats =
            balanced_reference_stats(pair.eval_holdout, g.spec, g.holdout_per_class, ref_rng);

        const std::filesystem::path cell_dir = ctx.out_dir / "cells" / cell_dir_name(g, key);
        std::filesystem::create_directories(cell_dir);

        auto evaluator_for = [&](std::uint64_t stream) {
            return Evaluator([&, stream](const GanState& s, std::size_t epoch) {
                Rng eval_rng(mix64(mix64(h, stream), epoch));
                MetricsReport rep =
                    evaluate_gan(s, classifier, ref_stats, g.metric_samples, eval_rng);
                rep.config_hash = ctx.config_hash;
                return rep;
            });
        };

        auto timed = [&](Method m, auto&& fn) {
            const auto s0 = std::chrono::steady_clock::now();
            fn();
            result.runtimes[m] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - s0).count();
        };

        StageConfig pre_cfg;
        pre_cfg.epochs = g.pretrain_epochs;
        pre_cfg.loss = make_loss_config(g, g.lr);
        pre_cfg.seed = mix64(h, 3);
        pre_cfg.eval_every = g.eval_every;

        GanState pretrained;
        {
            RunRecord rec;
            const Evaluator ev = evaluator_for(20);
            timed(Method::PretrainedOnly,
                  [&] { pretrained = pretrain(union_view, g.arch(), pre_cfg, &rec, &ev); });
            write_series_csv(cell_dir / "series_pretrained.csv", rec);
        }
        save_checkpoint(pretrained, cell_dir / "pretrained.ckpt",
                        {1, Stage::Pretrained, ctx.config_hash, seed_value});

        for (Method m : g.methods) {
            if (m == Method::PretrainedOnly) {
                Rng eval_rng(mix64(h, 10));
                MetricsReport rep =
                    evaluate_gan(pretrained, classifier, ref_stats, g.metric_samples, eval_rng);
                rep.config_hash = ctx.config_hash;
                rep.epoch = g.pretrain_epochs;
                result.reports[m] = rep;
                continue;
            }
            StageConfig cfg;
            cfg.epochs = g.adapt_epochs;
            cfg.loss = make_loss_config(g, g.adapt_lr);
            cfg.eval_every = g.eval_every;
            GanState adapted;
            RunRecord rec;
            if (m == Method::FairTL) {
                cfg.seed = mix64(h, 4);
                const Evaluator ev = evaluator_for(21);
                timed(m, [&] { adapted = adapt_fairtl(pretrained, ref_view, cfg, &rec, &ev); });
            } else {
                cfg.seed = mix64(h, 5);
                const std::size_t lp_epochs = static_cast<std::size_t>(
                    std::llround(g.lp_fraction * static_cast<double>(g.adapt_epochs)));
                cfg.freeze = FreezeMask::input_nearest_two(
                    pretrained.discriminator.num_layers(), lp_epochs);
                const Evaluator ev = evaluator_for(22);
                timed(m, [&] { adapted = adapt_fairtlpp(pretrained, ref_view, cfg, &rec, &ev); });
            }
            write_series_csv(cell_dir / ("series_" + method_name(m) + ".csv"), rec);
            save_checkpoint(adapted, cell_dir / (method_name(m) + ".ckpt"),
                            {1, adapted.stage, ctx.config_hash, seed_value});
            Rng eval_rng(mix64(h, m == Method::FairTL ? 11 : 12));
            MetricsReport rep =
                evaluate_gan(adapted, classifier, ref_stats, g.metric_samples, eval_rng);
            rep.config_hash = ctx.config_hash;
            rep.epoch = g.adapt_epochs;
            result.reports[m] = rep;
        }
    } catch (const std::exception& e) {
        result.error = e.what();
    }
    result.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace

std::vector<ReportRow> aggregate_cells(const ExperimentGrid& grid,
                                       const std::vector<CellResult>& cells, bool force) {
    const std::uint64_t expected = grid.config_hash();
    for (const auto& c : cells) {
        if (c.config_hash != expected && !force) {
            throw std::invalid_argument(
                "aggregate_cells: config hash mismatch (pass force to override)");
        }
    }
    std::vector<ReportRow> rows;
    for (Method m : grid.methods) {
        for (std::size_t bi = 0; bi < grid.biases.size(); ++bi) {
            for (std::size_t pi = 0; pi < grid.percs.size(); ++pi) {
                std::vector<double> fds, frechets, runtimes;
                for (const auto& c : cells) {
                    if (c.failed() || c.key.bias_idx != bi || c.key.perc_idx != pi) continue;
                    const auto it = c.reports.find(m);
                    if (it == c.reports.end()) continue;
                    fds.push_back(it->second.fd);
                    frechets.push_back(it->second.frechet);
                    const auto rt = c.runtimes.find(m);
                    runtimes.push_back(rt == c.runtimes.end() ? 0.0 : rt->second);
                }
                if (fds.empty()) continue;
                auto mean = [](const std::vector<double>& v) {
                    double s = 0.0;
                    for (double x : v) s += x;
                    return s / static_cast<double>(v.size());
                };
                auto stddev = [&](const std::vector<double>& v, double mu) {
                    if (v.size() < 2) return 0.0;
                    double s = 0.0;
                    for (double x : v) s += (x - mu) * (x - mu);
                    return std::sqrt(s / static_cast<double>(v.size() - 1));
                };
                ReportRow row;
                row.method = method_name(m);
                row.perc = grid.percs[pi];
                row.bias_id = grid.biases[bi].id;
                row.seeds = fds.size();
                row.fd_mean = mean(fds);
                row.fd_std = stddev(fds, row.fd_mean);
                row.frechet_mean = mean(frechets);
                row.frechet_std = stddev(frechets, row.frechet_mean);
                row.runtime_s = mean(runtimes);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

GridOutcome run_grid(const ExperimentGrid& grid, std::size_t parallelism,
                     const std::filesystem::path& out_dir) {
    grid.validate();
    if (parallelism == 0) throw std::invalid_argument("run_grid: parallelism must be positive");
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream f(out_dir / "config.resolved", std::ios::binary | std::ios::trunc);
        f << grid.resolved_config_text();
        if (!f) throw std::runtime_error("cannot write resolved config");
    }

    std::vector<CellKey> keys;
    for (std::size_t bi = 0; bi < grid.biases.size(); ++bi) {
        for (std::size_t pi = 0; pi < grid.percs.size(); ++pi) {
            for (std::size_t si = 0; si < grid.seeds.size(); ++si) {
                keys.push_back({bi, pi, si});
            }
        }
    }

    const CellContext ctx{grid, out_dir, grid.config_hash()};
    GridOutcome outcome;
    outcome.cells.resize(keys.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= keys.size()) break;
            outcome.cells[i] = run_cell(ctx, keys[i]);
        }
    };
    const std::size_t n_threads = std::min(parallelism, keys.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    std::string errors;
    for (const auto& c : outcome.cells) {
        if (c.failed()) {
            outcome.partial_failure = true;
            errors += cell_dir_name(grid, c.key) + ": " + c.error + "\n";
        }
    }
    if (!errors.empty()) {
        std::ofstream f(out_dir / "grid_errors.txt", std::ios::binary | std::ios::trunc);
        f << errors;
    }

    outcome.rows = aggregate_cells(grid, outcome.cells);
    if (!outcome.rows.empty()) emit_reports(outcome.rows, out_dir);
    return outcome;
}

}  // namespace fairtl
