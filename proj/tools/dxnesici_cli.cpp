// Command-line driver for benchmark experiments.
//
//   dxnesici run --function sphere-onemax --dim 20 --algorithm dxnesici --lambda 8 --trials 100 --seed 1 --out results
//   dxnesici run ... --lambda sweep            (6, 8, ..., 30)
//   dxnesici replay --function ... --lambda 8 --trial 17 --seed 1 --out replay
//   dxnesici summarize results/trials.csv

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dxnesici/benchmarks.hpp"
#include "dxnesici/harness.hpp"

namespace
{
    using namespace dxnesici;

    std::vector<std::size_t> parse_lambdas(const std::string& text)
    {
        if (text == "sweep")
            return harness::default_lambdas();
        std::vector<std::size_t> out;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ','))
        {
            std::size_t used = 0;
            const auto value = std::stoull(item, &used);
            if (used != item.size())
                throw std::invalid_argument("bad lambda value '" + item + "'");
            out.push_back(value);
        }
        return out;
    }

    struct CommonOptions
    {
        std::string function;
        std::size_t dim = 20;
        std::string algorithm = "dxnesici";
        std::string lambda = "sweep";
        std::uint64_t seed = 0;
        double sigma0 = 1.0;
        double alpha = 0.0;
        double m0 = 0.0;
        std::size_t max_evals = 0;
        bool fallback = false;
        std::string out = "results";
    };

    void add_common(CLI::App* cmd, CommonOptions& o)
    {
        cmd->add_option("--function", o.function, "Benchmark function")
            ->required()
            ->check(CLI::IsMember(benchmarks::names()));
        cmd->add_option("--dim", o.dim, "Dimension N (even)")->capture_default_str();
        cmd->add_option("--algorithm", o.algorithm, "dxnesici | dxnesic-leap | dxnesic")
            ->check(CLI::IsMember({"dxnesici", "dxnesic-leap", "dxnesic"}))
            ->capture_default_str();
        cmd->add_option("--lambda", o.lambda, "Comma-separated population sizes or 'sweep'")->capture_default_str();
        cmd->add_option("--seed", o.seed, "Base seed")->capture_default_str();
        cmd->add_option("--sigma0", o.sigma0, "Initial step size")->capture_default_str();
        cmd->add_option("--alpha", o.alpha, "Minimum marginal probability (default 1/(N*lambda))");
        cmd->add_option("--m0", o.m0, "Constant initial mean instead of the benchmark rule");
        cmd->add_option("--max-evals", o.max_evals, "Evaluation budget (default N*10^4)");
        cmd->add_flag("--fallback-coefficients", o.fallback, "Use rank weights and constant xNES learning rates");
        cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
    }

    harness::ExperimentSpec make_spec(const CLI::App* cmd, const CommonOptions& o)
    {
        harness::ExperimentSpec spec;
        spec.function = o.function;
        spec.dim = o.dim;
        spec.variant = parse_variant(o.algorithm);
        spec.lambdas = parse_lambdas(o.lambda);
        spec.base_seed = o.seed;
        spec.sigma0 = o.sigma0;
        if (cmd->count("--alpha"))
            spec.alpha = o.alpha;
        if (cmd->count("--m0"))
            spec.initial_mean = o.m0;
        if (cmd->count("--max-evals"))
            spec.max_evals = o.max_evals;
        if (o.fallback)
            spec.coefficients = CoefficientSet::xnes_fallback;
        return spec;
    }

    void print_cells(const std::vector<harness::CellSummary>& cells)
    {
        for (const auto& c : cells)
        {
            std::cout << c.function << " N=" << c.dim << " " << c.variant << " lambda=" << c.lambda << ": "
                      << c.n_success << "/" << c.n_trials;
            if (c.mean_evals)
                std::cout << "  mean evals " << *c.mean_evals << "  IQR " << *c.iqr;
            std::cout << '\n';
        }
    }
}

int main(int argc, char** argv)
{
    CLI::App app{"DX-NES-ICI benchmark harness"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    std::size_t trials = 100;
    bool trace = false;
    unsigned jobs = 1;
    auto* run = app.add_subcommand("run", "Run trials over a lambda list and export results");
    add_common(run, run_opts);
    run->add_option("--trials", trials, "Trials per lambda")->capture_default_str();
    run->add_flag("--trace", trace, "Write per-generation traces");
    run->add_option("--jobs", jobs, "Worker threads")->capture_default_str();

    CommonOptions replay_opts;
    std::size_t trial_index = 0;
    auto* replay = app.add_subcommand("replay", "Re-run a single trial from its derived seed, with trace");
    add_common(replay, replay_opts);
    replay->add_option("--trial", trial_index, "Trial index")->required();

    std::string csv_path;
    auto* summarize = app.add_subcommand("summarize", "Recompute cell summaries from a trials CSV");
    summarize->add_option("csv", csv_path, "Trials CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            auto spec = make_spec(run, run_opts);
            spec.trials = trials;
            spec.trace = trace;
            spec.jobs = jobs;
            spec.validate();
            const std::filesystem::path out_dir = run_opts.out;
            harness::TrialSink sink;
            if (trace)
                sink = [&](const harness::TrialOutcome& o) { harness::export_trace(o, out_dir); };
            const auto result = harness::run_experiment(spec, sink);
            harness::export_results(result, out_dir);
            print_cells(result.cells);
            if (result.best)
                std::cout << "best lambda: " << result.cells[*result.best].lambda << '\n';
        }
        else if (*replay)
        {
            auto spec = make_spec(replay, replay_opts);
            if (spec.lambdas.size() != 1)
                throw std::invalid_argument("replay needs exactly one lambda");
            spec.trials = trial_index + 1;
            spec.trace = true;
            spec.validate();
            const auto outcome = harness::run_trial(spec, spec.lambdas.front(), trial_index);
            const std::filesystem::path out_dir = replay_opts.out;
            harness::export_trace(outcome, out_dir);
            harness::write_trials_csv(std::cout, std::span(&outcome.row, 1));
        }
        else if (*summarize)
        {
            std::ifstream in(csv_path);
            if (!in)
                throw std::runtime_error("cannot open '" + csv_path + "'");
            const auto rows = harness::read_trials_csv(in);
            const auto cells = harness::summarize(rows);
            std::cout << harness::summary_json(cells).dump(2) << '\n';
        }
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
