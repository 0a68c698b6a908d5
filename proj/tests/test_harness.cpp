#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "dxnesici/harness.hpp"

using namespace dxnesici;
using namespace dxnesici::harness;
namespace fs = std::filesystem;

namespace
{
    CellSummary cell(std::size_t lambda, std::size_t success, std::optional<double> mean)
    {
        CellSummary c;
        c.function = "f";
        c.dim = 4;
        c.variant = "dxnesici";
        c.lambda = lambda;
        c.n_trials = 10;
        c.n_success = success;
        c.mean_evals = mean;
        return c;
    }

    ExperimentSpec small_spec()
    {
        ExperimentSpec spec;
        spec.function = "sphere-onemax";
        spec.dim = 4;
        spec.lambdas = {6, 8};
        spec.trials = 3;
        spec.base_seed = 11;
        return spec;
    }

    fs::path scratch_dir(const std::string& name)
    {
        const fs::path p = fs::temp_directory_path() / ("dxnesici_test_" + name);
        fs::remove_all(p);
        return p;
    }

    std::string slurp(const fs::path& p)
    {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
}

TEST_CASE("quantiles and IQR")
{
    CHECK(interquartile_range({10, 20, 30, 40}) == doctest::Approx(15.0));
    CHECK(quantile_linear({10, 20, 30, 40}, 0.25) == doctest::Approx(17.5));
    CHECK(quantile_linear({40, 10, 30, 20}, 0.75) == doctest::Approx(32.5));
    CHECK(quantile_linear({7}, 0.3) == 7.0);
    CHECK(interquartile_range({5, 5, 5}) == 0.0);
}

TEST_CASE("best cell selection")
{
    const std::vector<CellSummary> cells = {cell(6, 9, 1000.0), cell(8, 10, 1200.0), cell(10, 10, 1100.0),
                                            cell(12, 0, std::nullopt)};
    CHECK(select_best(cells) == std::optional<std::size_t>(2));
    CHECK_FALSE(select_best(std::span<const CellSummary>{}).has_value());
    const std::vector<CellSummary> none = {cell(6, 0, std::nullopt), cell(8, 0, std::nullopt)};
    CHECK(select_best(none).has_value());
}

TEST_CASE("summaries count successes and average successful runs only")
{
    std::vector<TrialRow> rows;
    const std::size_t evals[] = {100, 200, 300, 400, 999};
    for (std::size_t t = 0; t < 5; ++t)
        rows.push_back({"f", 4, "dxnesici", 6, t, t, t < 4, evals[t], t < 4 ? 0.0 : 1.0, t < 4 ? "success" : "eval_budget"});
    rows.push_back({"f", 4, "dxnesici", 8, 0, 9, true, 50, 0.0, "success"});
    rows.push_back({"g", 4, "dxnesici", 6, 0, 9, false, 50, 1.0, "eval_budget"});
    const auto cells = summarize(rows);
    REQUIRE(cells.size() == 3);
    CHECK(cells[0].lambda == 6);
    CHECK(cells[0].n_trials == 5);
    CHECK(cells[0].n_success == 4);
    CHECK(*cells[0].mean_evals == doctest::Approx(250.0));
    CHECK(*cells[0].iqr == doctest::Approx(150.0));
    CHECK(cells[1].lambda == 8);
    CHECK(cells[2].function == "g");
    CHECK_FALSE(cells[2].mean_evals.has_value());
    CHECK_FALSE(cells[2].iqr.has_value());
}

TEST_CASE("seed derivation")
{
    std::set<std::uint64_t> seen;
    for (std::size_t lambda : {6, 8})
        for (std::size_t t = 0; t < 100; ++t)
            seen.insert(derive_seed(1, "sphere-onemax", 20, lambda, t));
    CHECK(seen.size() == 200);
    CHECK(derive_seed(1, "a", 20, 6, 0) == derive_seed(1, "a", 20, 6, 0));
    CHECK(derive_seed(1, "a", 20, 6, 0) != derive_seed(2, "a", 20, 6, 0));
    CHECK(derive_seed(1, "a", 20, 6, 0) != derive_seed(1, "b", 20, 6, 0));
    CHECK(derive_seed(1, "a", 20, 6, 0) != derive_seed(1, "a", 22, 6, 0));
}

TEST_CASE("spec validation")
{
    auto spec = small_spec();
    CHECK_NOTHROW(spec.validate());
    spec.function = "nope";
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = small_spec();
    spec.dim = 5;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = small_spec();
    spec.lambdas = {7};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = small_spec();
    spec.lambdas.clear();
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = small_spec();
    spec.trials = 0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("single trial experiment")
{
    auto spec = small_spec();
    spec.lambdas = {8};
    spec.trials = 1;
    const auto result = run_experiment(spec);
    REQUIRE(result.rows.size() == 1);
    REQUIRE(result.cells.size() == 1);
    CHECK(result.best == std::optional<std::size_t>(0));
    CHECK(result.rows[0].success);
    CHECK(result.rows[0].reason == "success");
    CHECK(result.cells[0].n_success == 1);
    CHECK(*result.cells[0].iqr == 0.0);
    CHECK(*result.cells[0].mean_evals == static_cast<double>(result.rows[0].evals));
}

TEST_CASE("trials are reproducible and independent of scheduling")
{
    auto spec = small_spec();
    const auto serial = run_experiment(spec);
    spec.jobs = 3;
    const auto parallel = run_experiment(spec);
    CHECK(serial.rows == parallel.rows);
    CHECK(serial.cells == parallel.cells);

    REQUIRE(serial.rows.size() == 6);
    for (const auto& row : serial.rows)
    {
        const auto alone = run_trial(spec, row.lambda, row.trial);
        CHECK(alone.row == row);
        CHECK(row.seed == derive_seed(spec.base_seed, spec.function, spec.dim, row.lambda, row.trial));
    }

    // Extra trials leave the earlier ones untouched.
    spec.trials = 5;
    const auto more = run_experiment(spec);
    CHECK(more.rows[0] == serial.rows[0]);
    CHECK(more.rows[5] == serial.rows[3]);

    std::size_t calls = 0;
    run_experiment(small_spec(), [&](const TrialOutcome&) { ++calls; });
    CHECK(calls == 6);
}

TEST_CASE("CSV round trip")
{
    const auto result = run_experiment(small_spec());
    std::stringstream ss;
    write_trials_csv(ss, result.rows);
    const auto back = read_trials_csv(ss);
    CHECK(back == result.rows);
    CHECK(summarize(back) == result.cells);

    std::stringstream header_only;
    write_trials_csv(header_only, {});
    CHECK(read_trials_csv(header_only).empty());
    CHECK(summarize(std::vector<TrialRow>{}).empty());

    std::stringstream bad("function,N\n");
    CHECK_THROWS_AS(read_trials_csv(bad), std::runtime_error);
    std::stringstream short_row("function,N,variant,lambda,trial,seed,success,evals,best_f,reason\nf,4,x\n");
    CHECK_THROWS_AS(read_trials_csv(short_row), std::runtime_error);
    std::stringstream bad_number("function,N,variant,lambda,trial,seed,success,evals,best_f,reason\nf,four,x,6,0,1,1,10,0,success\n");
    CHECK_THROWS_AS(read_trials_csv(bad_number), std::runtime_error);
}

TEST_CASE("summary JSON")
{
    const std::vector<CellSummary> cells = {cell(6, 9, 1000.0), cell(8, 10, 1200.0)};
    const auto doc = summary_json(cells);
    REQUIRE(doc["experiments"].size() == 1);
    const auto& e = doc["experiments"][0];
    CHECK(e["function"] == "f");
    CHECK(e["N"] == 4);
    CHECK(e["cells"].size() == 2);
    CHECK(e["best"]["lambda"] == 8);
    CHECK(e["cells"][0]["iqr"].is_null());
    CHECK(doc.contains("iqr_convention"));
}

TEST_CASE("export writes trials, summary and traces")
{
    const fs::path dir = scratch_dir("export");
    auto spec = small_spec();
    spec.trace = true;
    const auto result = run_experiment(spec, [&](const TrialOutcome& o) { export_trace(o, dir); });
    export_results(result, dir);

    std::ifstream trials(dir / "trials.csv");
    CHECK(read_trials_csv(trials) == result.rows);
    const auto doc = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(doc["experiments"][0]["cells"].size() == 2);

    const fs::path trace = trace_path(dir, result.rows[0]);
    CHECK(trace.filename() == "sphere-onemax_N4_dxnesici_lambda6_trial0.csv");
    REQUIRE(fs::exists(trace));
    std::ifstream tin(trace);
    std::string header;
    std::getline(tin, header);
    CHECK(header == "g,evals,m_1,m_2,m_3,m_4,sigma,scale_1,scale_2,scale_3,scale_4,path_norm,phase,best_f,leap_3,leap_4");
    std::size_t lines = 0;
    for (std::string line; std::getline(tin, line);)
    {
        ++lines;
        CHECK(std::count(line.begin(), line.end(), ',') == 15);
    }
    const auto replay = run_trial(spec, 6, 0);
    CHECK(lines == replay.result.generations);
    fs::remove_all(dir);
}

TEST_CASE("export reports unwritable destinations")
{
    const fs::path dir = scratch_dir("blocked");
    fs::create_directories(dir);
    std::ofstream(dir / "file") << "x";
    const auto result = run_experiment(small_spec());
    try
    {
        export_results(result, dir / "file" / "sub");
        FAIL("expected an exception");
    }
    catch (const std::runtime_error& e)
    {
        CHECK(std::string(e.what()).find("file") != std::string::npos);
    }
    fs::remove_all(dir);
}
