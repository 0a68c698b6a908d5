#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "integer_domain.hpp"
#include "mi_control.hpp"
#include "nes_engine.hpp"
#include "types.hpp"

namespace dxnesici
{
    enum class Variant
    {
        dxnesici,      // bias + leap/correction
        dxnesic_leap,  // leap/correction only
        dxnesic,       // plain continuous search through the encoding
    };

    const char* to_string(Variant variant);
    /// Accepts the CLI identifiers dxnesici, dxnesic-leap, dxnesic.
    Variant parse_variant(const std::string& name);

    bool uses_bias(Variant variant);
    bool uses_leap(Variant variant);

    using Objective = std::function<double(const Vector&)>;

    /// Objective over encoded points; continuous variables first, integer variables last.
    struct Problem
    {
        Objective objective;
        std::size_t n_co = 0;
        IntegerDomain domain;

        std::size_t dim() const { return n_co + domain.size(); }
    };

    struct OptimizerConfig
    {
        Variant variant = Variant::dxnesici;
        std::size_t lambda = 8;
        double sigma0 = 1.0;
        Vector m0;
        std::optional<double> alpha;  // default 1 / (N lambda)
        double target_f = 1e-10;
        std::optional<std::size_t> max_evals;  // default N * 10^4
        double min_eigenvalue = 1e-30;
        double max_condition = 1e14;
        std::uint64_t seed = 0;
        bool record_trace = false;
        CoefficientSet coefficients = CoefficientSet::reference;
    };

    enum class Termination
    {
        success,
        eval_budget,
        degenerate_covariance,
        ill_conditioned,
        non_finite,
    };

    const char* to_string(Termination reason);

    struct GenerationRecord
    {
        std::size_t generation = 0;  // value of g after the step
        std::size_t evaluations = 0;
        Vector mean;
        double sigma = 0.0;
        Vector axis_scales;
        double path_norm = 0.0;
        Phase phase = Phase::convergence;
        double best_f = 0.0;  // best of this generation
        std::vector<LeapDecision> decisions;
    };

    struct RunResult
    {
        Termination terminated_as = Termination::eval_budget;
        std::size_t evaluations_used = 0;
        std::size_t generations = 0;
        double best_f = 0.0;
        Vector best_x_bar;
        std::vector<GenerationRecord> trace;
    };

    /**
     * One run of the generation loop. The optimizer owns its distribution
     * state and RNG stream; identical problem, config and stream give
     * bit-identical results.
     */
    class Optimizer
    {
    public:
        /// Seeds the stream from config.seed.
        Optimizer(Problem problem, OptimizerConfig config);
        /// Continues an existing stream (e.g. one that already drew the initial mean).
        Optimizer(Problem problem, OptimizerConfig config, Rng rng);

        /// Executes one generation. Sets the termination reason if the objective returns a non-finite value.
        GenerationRecord step();

        /// One generation from supplied standardized draws (N x lambda columns) instead of sampling.
        GenerationRecord step_with_draws(const Matrix& z);

        /// Termination test on the current state; first satisfied criterion wins.
        std::optional<Termination> check_termination() const;

        RunResult run();

        /// Replaces the distribution state (e.g. to resume a saved run). Counters are kept.
        void restore(DistributionState state);

        const DistributionState& state() const { return state_; }
        const StrategyParams& params() const { return params_; }
        const OptimizerConfig& config() const { return config_; }
        std::size_t evaluations() const { return evaluations_; }
        double best_f() const { return best_f_; }
        const Vector& best_x_bar() const { return best_x_bar_; }

    private:
        void refresh_eigensystem();

        Problem problem_;
        OptimizerConfig config_;
        StrategyParams params_;
        Rng rng_;
        DistributionState state_;
        std::size_t max_evals_;

        // Eigensystem of B B^T for the current state.
        Matrix axes_;
        Vector axis_eigenvalues_;

        std::size_t evaluations_ = 0;
        double best_f_;
        Vector best_x_bar_;
        bool non_finite_ = false;
    };

    inline RunResult optimize(Problem problem, OptimizerConfig config)
    {
        return Optimizer(std::move(problem), std::move(config)).run();
    }
}
