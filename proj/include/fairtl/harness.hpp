#pragma once

#include <filesystem>
#include <map>

#include "fairtl/checkpoint.hpp"
#include "fairtl/pipeline.hpp"
#include "fairtl/report.hpp"

namespace fairtl {

enum class Method { PretrainedOnly, FairTL, FairTLpp };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct BiasSetting {
    std::string id;
    std::vector<double> vector;
};

/// Full experiment description: method x perc x bias x seed, plus every
/// training / evaluation default, resolved before hashing.
struct ExperimentGrid {
    SyntheticFamily::Kind family = SyntheticFamily::Kind::GaussianMixture2d;
    AttributeSpec spec = AttributeSpec::single("Attr", 2);
    std::vector<BiasSetting> biases;
    std::vector<double> percs;
    std::vector<Method> methods = {Method::PretrainedOnly, Method::FairTL, Method::FairTLpp};
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};

    std::size_t size_bias = 4000;
    std::size_t holdout_per_class = 500;
    std::size_t pretrain_epochs = 200;
    std::size_t adapt_epochs = 100;
    std::size_t batch_size = 64;
    double lr = 2e-4;        // pretraining
    double adapt_lr = 2e-4;  // adaptation stages
    double lambda = 0.6;
    double lp_fraction = 0.2;  // T = round(lp_fraction * adapt_epochs)
    GenLossForm loss_form = GenLossForm::NonSaturating;
    std::size_t metric_samples = 4096;
    std::size_t eval_every = 10;
    std::uint64_t grid_seed = 0;
    bool use_oracle_classifier = true;  // gaussian family only

    void validate() const;
    ArchSpec arch() const;

    /// Canonical key-value rendering of every resolved setting; its FNV
    /// hash is embedded in all artifacts of a run.
    std::string resolved_config_text() const;
    std::uint64_t config_hash() const;
};

ExperimentGrid parse_grid_config(const std::filesystem::path& path);

struct CellKey {
    std::size_t bias_idx = 0;
    std::size_t perc_idx = 0;
    std::size_t seed_idx = 0;
};

struct CellResult {
    CellKey key;
    std::map<Method, MetricsReport> reports;
    std::map<Method, double> runtimes;  // per-stage wall time
    double runtime_s = 0.0;             // whole cell
    std::uint64_t config_hash = 0;
    std::string error;  // empty on success

    bool failed() const { return !error.empty(); }
};

struct GridOutcome {
    std::vector<CellResult> cells;
    std::vector<ReportRow> rows;
    bool partial_failure = false;
};

/// Executes every cell exactly once (worker pool of `parallelism` threads;
/// every cell derives its RNG from (grid seed, cell coordinates), so results
/// are independent of scheduling), persists per-cell checkpoints and metric
/// time series under out_dir/cells/, aggregates rows over seeds, and writes
/// CSV + SVG reports plus the resolved config.
GridOutcome run_grid(const ExperimentGrid& grid, std::size_t parallelism,
                     const std::filesystem::path& out_dir);

/// Mean/std aggregation over seeds. Refuses to mix cells whose config
/// hashes differ unless `force`.
std::vector<ReportRow> aggregate_cells(const ExperimentGrid& grid,
                                       const std::vector<CellResult>& cells, bool force = false);

}  // namespace fairtl
