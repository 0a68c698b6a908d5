#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "optimizer.hpp"

namespace dxnesici::harness
{
    /// 6, 8, ..., 30.
    std::vector<std::size_t> default_lambdas();

    struct ExperimentSpec
    {
        std::string function;
        std::size_t dim = 20;
        Variant variant = Variant::dxnesici;
        std::vector<std::size_t> lambdas = default_lambdas();
        std::size_t trials = 100;
        std::uint64_t base_seed = 0;
        double sigma0 = 1.0;
        std::optional<double> alpha;
        std::optional<double> initial_mean;  // constant m0 in every coordinate instead of the benchmark rule
        std::optional<std::size_t> max_evals;
        CoefficientSet coefficients = CoefficientSet::reference;
        bool trace = false;
        unsigned jobs = 1;

        /// Throws std::invalid_argument describing the first problem found.
        void validate() const;
    };

    /// splitmix64 chain over (base seed, function, dim, lambda, trial).
    std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view function, std::size_t dim,
                              std::size_t lambda, std::size_t trial);

    struct TrialRow
    {
        std::string function;
        std::size_t dim = 0;
        std::string variant;
        std::size_t lambda = 0;
        std::size_t trial = 0;
        std::uint64_t seed = 0;
        bool success = false;
        std::size_t evals = 0;
        double best_f = 0.0;
        std::string reason;

        bool operator==(const TrialRow&) const = default;
    };

    struct TrialOutcome
    {
        TrialRow row;
        RunResult result;
    };

    /// Runs one (lambda, trial) cell entry from its derived seed. Traces are kept when spec.trace is set.
    TrialOutcome run_trial(const ExperimentSpec& spec, std::size_t lambda, std::size_t trial);

    struct CellSummary
    {
        std::string function;
        std::size_t dim = 0;
        std::string variant;
        std::size_t lambda = 0;
        std::size_t n_trials = 0;
        std::size_t n_success = 0;
        std::optional<double> mean_evals;  // over successful trials only
        std::optional<double> iqr;

        bool operator==(const CellSummary&) const = default;
    };

    /// Quantile with linear interpolation between order statistics (position q * (n - 1)).
    double quantile_linear(std::vector<double> values, double q);
    double interquartile_range(const std::vector<double>& values);

    /// Groups rows by (function, dim, variant, lambda), ordered by first appearance of the group key then lambda.
    std::vector<CellSummary> summarize(std::span<const TrialRow> rows);

    /// Most successes first, then fewest mean evaluations. Empty input gives nullopt.
    std::optional<std::size_t> select_best(std::span<const CellSummary> cells);

    struct ExperimentResult
    {
        std::vector<TrialRow> rows;  // ordered by (lambda position, trial)
        std::vector<CellSummary> cells;
        std::optional<std::size_t> best;
    };

    /// Called once per finished trial, serialized across workers.
    using TrialSink = std::function<void(const TrialOutcome&)>;

    ExperimentResult run_experiment(const ExperimentSpec& spec, const TrialSink& sink = {});

    std::string format_double(double v);

    void write_trials_csv(std::ostream& out, std::span<const TrialRow> rows);
    /// Throws std::runtime_error on a malformed header or row.
    std::vector<TrialRow> read_trials_csv(std::istream& in);

    /// Summary document: every cell plus the selected best cell per (function, dim, variant) group.
    nlohmann::json summary_json(std::span<const CellSummary> cells);

    void write_trace_csv(std::ostream& out, const RunResult& result, std::size_t n_co);

    /// Writes trials.csv and summary.json into out_dir (created if needed).
    /// Throws std::runtime_error naming the path on I/O failure.
    void export_results(const ExperimentResult& result, const std::filesystem::path& out_dir);

    std::filesystem::path trace_path(const std::filesystem::path& out_dir, const TrialRow& row);
    void export_trace(const TrialOutcome& outcome, const std::filesystem::path& out_dir);
}
