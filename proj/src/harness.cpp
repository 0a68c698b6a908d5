#include "dxnesici/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dxnesici/benchmarks.hpp"

namespace dxnesici::harness
{
    namespace
    {
        std::uint64_t splitmix64(std::uint64_t x)
        {
            x += 0x9e3779b97f4a7c15ULL;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            return x ^ (x >> 31);
        }

        std::uint64_t fnv1a(std::string_view s)
        {
            std::uint64_t h = 0xcbf29ce484222325ULL;
            for (const unsigned char c : s)
            {
                h ^= c;
                h *= 0x100000001b3ULL;
            }
            return h;
        }

        const char* const trials_header = "function,N,variant,lambda,trial,seed,success,evals,best_f,reason";

        std::vector<std::string> split(const std::string& line, char sep)
        {
            std::vector<std::string> out;
            std::string field;
            std::istringstream ss(line);
            while (std::getline(ss, field, sep))
                out.push_back(field);
            if (!line.empty() && line.back() == sep)
                out.emplace_back();
            return out;
        }

        std::ofstream open_for_write(const std::filesystem::path& path)
        {
            std::ofstream out(path);
            if (!out)
                throw std::runtime_error("cannot open '" + path.string() + "' for writing");
            return out;
        }

        void check_written(std::ofstream& out, const std::filesystem::path& path)
        {
            out.flush();
            if (!out)
                throw std::runtime_error("failed writing '" + path.string() + "'");
        }

        char leap_code(LeapKind kind)
        {
            switch (kind)
            {
            case LeapKind::correction:
                return 'C';
            case LeapKind::leap_low:
                return 'L';
            case LeapKind::leap_up:
                return 'U';
            default:
                return '-';
            }
        }
    }

    std::vector<std::size_t> default_lambdas()
    {
        std::vector<std::size_t> out;
        for (std::size_t l = 6; l <= 30; l += 2)
            out.push_back(l);
        return out;
    }

    void ExperimentSpec::validate() const
    {
        if (trials < 1)
            throw std::invalid_argument("trials must be at least 1");
        if (lambdas.empty())
            throw std::invalid_argument("lambda list is empty");
        for (const auto l : lambdas)
            if (l < 2 || l % 2 != 0)
                throw std::invalid_argument("lambda values must be even and >= 2 (got " + std::to_string(l) + ")");
        if (!(sigma0 > 0.0))
            throw std::invalid_argument("sigma0 must be positive");
        if (jobs < 1)
            throw std::invalid_argument("jobs must be at least 1");
        // Throws for unknown function names and odd dimensions.
        (void)benchmarks::make_problem(function, dim);
    }

    std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view function, std::size_t dim,
                              std::size_t lambda, std::size_t trial)
    {
        std::uint64_t h = splitmix64(base_seed);
        h = splitmix64(h ^ fnv1a(function));
        h = splitmix64(h ^ static_cast<std::uint64_t>(dim));
        h = splitmix64(h ^ static_cast<std::uint64_t>(lambda));
        h = splitmix64(h ^ static_cast<std::uint64_t>(trial));
        return h;
    }

    TrialOutcome run_trial(const ExperimentSpec& spec, std::size_t lambda, std::size_t trial)
    {
        auto bench = benchmarks::make_problem(spec.function, spec.dim);
        const std::uint64_t seed = derive_seed(spec.base_seed, spec.function, spec.dim, lambda, trial);

        // The initial mean is drawn from the same stream the optimizer continues.
        Rng rng(seed);
        OptimizerConfig cfg;
        cfg.variant = spec.variant;
        cfg.lambda = lambda;
        cfg.sigma0 = spec.sigma0;
        cfg.m0 = spec.initial_mean ? Vector::Constant(static_cast<Eigen::Index>(spec.dim), *spec.initial_mean)
                                   : bench.initial_mean(rng);
        cfg.alpha = spec.alpha;
        cfg.max_evals = spec.max_evals;
        cfg.seed = seed;
        cfg.record_trace = spec.trace;
        cfg.coefficients = spec.coefficients;

        TrialOutcome out;
        out.result = Optimizer(std::move(bench.problem), std::move(cfg), std::move(rng)).run();
        out.row.function = spec.function;
        out.row.dim = spec.dim;
        out.row.variant = to_string(spec.variant);
        out.row.lambda = lambda;
        out.row.trial = trial;
        out.row.seed = seed;
        out.row.success = out.result.terminated_as == Termination::success;
        out.row.evals = out.result.evaluations_used;
        out.row.best_f = out.result.best_f;
        out.row.reason = to_string(out.result.terminated_as);
        return out;
    }

    double quantile_linear(std::vector<double> values, double q)
    {
        if (values.empty())
            throw std::invalid_argument("quantile of an empty sample");
        std::sort(values.begin(), values.end());
        const double pos = q * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] + frac * (values[hi] - values[lo]);
    }

    double interquartile_range(const std::vector<double>& values)
    {
        return quantile_linear(values, 0.75) - quantile_linear(values, 0.25);
    }

    std::vector<CellSummary> summarize(std::span<const TrialRow> rows)
    {
        using GroupKey = std::tuple<std::string, std::size_t, std::string>;
        std::vector<GroupKey> group_order;
        std::map<GroupKey, std::map<std::size_t, std::vector<const TrialRow*>>> groups;
        for (const auto& r : rows)
        {
            GroupKey key{r.function, r.dim, r.variant};
            if (!groups.contains(key))
                group_order.push_back(key);
            groups[key][r.lambda].push_back(&r);
        }

        std::vector<CellSummary> cells;
        for (const auto& key : group_order)
        {
            for (const auto& [lambda, members] : groups[key])
            {
                CellSummary c;
                std::tie(c.function, c.dim, c.variant) = key;
                c.lambda = lambda;
                c.n_trials = members.size();
                std::vector<double> evals;
                for (const auto* r : members)
                    if (r->success)
                        evals.push_back(static_cast<double>(r->evals));
                c.n_success = evals.size();
                if (!evals.empty())
                {
                    double sum = 0.0;
                    for (const double e : evals)
                        sum += e;
                    c.mean_evals = sum / static_cast<double>(evals.size());
                    c.iqr = interquartile_range(evals);
                }
                cells.push_back(std::move(c));
            }
        }
        return cells;
    }

    std::optional<std::size_t> select_best(std::span<const CellSummary> cells)
    {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            if (!best)
            {
                best = i;
                continue;
            }
            const auto& a = cells[i];
            const auto& b = cells[*best];
            if (a.n_success > b.n_success
                || (a.n_success == b.n_success && a.mean_evals && (!b.mean_evals || *a.mean_evals < *b.mean_evals)))
                best = i;
        }
        return best;
    }

    ExperimentResult run_experiment(const ExperimentSpec& spec, const TrialSink& sink)
    {
        spec.validate();
        const std::size_t total = spec.lambdas.size() * spec.trials;
        std::vector<TrialRow> rows(total);
        std::atomic<std::size_t> next{0};
        std::mutex sink_mutex;
        std::exception_ptr failure;

        auto worker = [&] {
            for (std::size_t task = next++; task < total; task = next++)
            {
                try
                {
                    TrialOutcome out = run_trial(spec, spec.lambdas[task / spec.trials], task % spec.trials);
                    if (sink)
                    {
                        std::lock_guard lock(sink_mutex);
                        sink(out);
                    }
                    rows[task] = std::move(out.row);
                }
                catch (...)
                {
                    std::lock_guard lock(sink_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = total;
                }
            }
        };

        const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(spec.jobs, total));
        if (n_workers <= 1)
            worker();
        else
        {
            std::vector<std::jthread> pool;
            for (unsigned i = 0; i < n_workers; ++i)
                pool.emplace_back(worker);
        }
        if (failure)
            std::rethrow_exception(failure);

        ExperimentResult result;
        result.rows = std::move(rows);
        result.cells = summarize(result.rows);
        result.best = select_best(result.cells);
        return result;
    }

    std::string format_double(double v)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    void write_trials_csv(std::ostream& out, std::span<const TrialRow> rows)
    {
        out << trials_header << '\n';
        for (const auto& r : rows)
        {
            out << r.function << ',' << r.dim << ',' << r.variant << ',' << r.lambda << ',' << r.trial << ','
                << r.seed << ',' << (r.success ? 1 : 0) << ',' << r.evals << ',' << format_double(r.best_f) << ','
                << r.reason << '\n';
        }
    }

    std::vector<TrialRow> read_trials_csv(std::istream& in)
    {
        std::string line;
        if (!std::getline(in, line) || line != trials_header)
            throw std::runtime_error("unexpected trials CSV header");
        std::vector<TrialRow> rows;
        std::size_t line_no = 1;
        while (std::getline(in, line))
        {
            ++line_no;
            if (line.empty())
                continue;
            const auto f = split(line, ',');
            if (f.size() != 10)
                throw std::runtime_error("trials CSV line " + std::to_string(line_no) + ": expected 10 fields");
            try
            {
                TrialRow r;
                r.function = f[0];
                r.dim = std::stoull(f[1]);
                r.variant = f[2];
                r.lambda = std::stoull(f[3]);
                r.trial = std::stoull(f[4]);
                r.seed = std::stoull(f[5]);
                r.success = f[6] == "1";
                r.evals = std::stoull(f[7]);
                r.best_f = std::stod(f[8]);
                r.reason = f[9];
                rows.push_back(std::move(r));
            }
            catch (const std::logic_error&)
            {
                throw std::runtime_error("trials CSV line " + std::to_string(line_no) + ": malformed field");
            }
        }
        return rows;
    }

    nlohmann::json summary_json(std::span<const CellSummary> cells)
    {
        auto cell_json = [](const CellSummary& c) {
            nlohmann::json j;
            j["lambda"] = c.lambda;
            j["n_trials"] = c.n_trials;
            j["n_success"] = c.n_success;
            j["mean_evals"] = c.mean_evals ? nlohmann::json(*c.mean_evals) : nlohmann::json(nullptr);
            j["iqr"] = c.iqr ? nlohmann::json(*c.iqr) : nlohmann::json(nullptr);
            return j;
        };

        nlohmann::json doc;
        doc["iqr_convention"] = "linear interpolation between order statistics, position q*(n-1), successful trials only";
        doc["experiments"] = nlohmann::json::array();

        std::size_t begin = 0;
        while (begin < cells.size())
        {
            std::size_t end = begin;
            while (end < cells.size() && cells[end].function == cells[begin].function
                   && cells[end].dim == cells[begin].dim && cells[end].variant == cells[begin].variant)
                ++end;
            const auto group = cells.subspan(begin, end - begin);
            nlohmann::json e;
            e["function"] = group.front().function;
            e["N"] = group.front().dim;
            e["variant"] = group.front().variant;
            e["cells"] = nlohmann::json::array();
            for (const auto& c : group)
                e["cells"].push_back(cell_json(c));
            const auto best = select_best(group);
            e["best"] = best ? cell_json(group[*best]) : nlohmann::json(nullptr);
            doc["experiments"].push_back(std::move(e));
            begin = end;
        }
        return doc;
    }

    void write_trace_csv(std::ostream& out, const RunResult& result, std::size_t n_co)
    {
        if (result.trace.empty())
        {
            out << "g,evals,sigma,path_norm,phase,best_f\n";
            return;
        }
        const auto n = static_cast<std::size_t>(result.trace.front().mean.size());
        out << "g,evals";
        for (std::size_t j = 1; j <= n; ++j)
            out << ",m_" << j;
        out << ",sigma";
        for (std::size_t j = 1; j <= n; ++j)
            out << ",scale_" << j;
        out << ",path_norm,phase,best_f";
        for (std::size_t j = n_co + 1; j <= n; ++j)
            out << ",leap_" << j;
        out << '\n';

        std::string flags;
        for (const auto& rec : result.trace)
        {
            out << rec.generation << ',' << rec.evaluations;
            for (Eigen::Index j = 0; j < rec.mean.size(); ++j)
                out << ',' << format_double(rec.mean[j]);
            out << ',' << format_double(rec.sigma);
            for (Eigen::Index j = 0; j < rec.axis_scales.size(); ++j)
                out << ',' << format_double(rec.axis_scales[j]);
            out << ',' << format_double(rec.path_norm) << ',' << to_string(rec.phase) << ','
                << format_double(rec.best_f);
            flags.assign(n - n_co, '-');
            for (const auto& d : rec.decisions)
                flags[d.dim - n_co] = leap_code(d.kind);
            for (const char c : flags)
                out << ',' << c;
            out << '\n';
        }
    }

    void export_results(const ExperimentResult& result, const std::filesystem::path& out_dir)
    {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec)
            throw std::runtime_error("cannot create '" + out_dir.string() + "': " + ec.message());

        const auto trials = out_dir / "trials.csv";
        auto csv = open_for_write(trials);
        write_trials_csv(csv, result.rows);
        check_written(csv, trials);

        const auto summary = out_dir / "summary.json";
        auto js = open_for_write(summary);
        js << summary_json(result.cells).dump(2) << '\n';
        check_written(js, summary);
    }

    std::filesystem::path trace_path(const std::filesystem::path& out_dir, const TrialRow& row)
    {
        return out_dir / "traces"
               / (row.function + "_N" + std::to_string(row.dim) + "_" + row.variant + "_lambda"
                  + std::to_string(row.lambda) + "_trial" + std::to_string(row.trial) + ".csv");
    }

    void export_trace(const TrialOutcome& outcome, const std::filesystem::path& out_dir)
    {
        const auto path = trace_path(out_dir, outcome.row);
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            throw std::runtime_error("cannot create '" + path.parent_path().string() + "': " + ec.message());
        auto out = open_for_write(path);
        write_trace_csv(out, outcome.result, outcome.row.dim / 2);
        check_written(out, path);
    }
}
