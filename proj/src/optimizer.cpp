#include "dxnesici/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dxnesici
{
    const char* to_string(Variant variant)
    {
        switch (variant)
        {
        case Variant::dxnesici:
            return "dxnesici";
        case Variant::dxnesic_leap:
            return "dxnesic-leap";
        case Variant::dxnesic:
            return "dxnesic";
        }
        return "unknown";
    }

    Variant parse_variant(const std::string& name)
    {
        for (const auto v : {Variant::dxnesici, Variant::dxnesic_leap, Variant::dxnesic})
            if (name == to_string(v))
                return v;
        throw std::invalid_argument("unknown algorithm '" + name + "' (expected dxnesici, dxnesic-leap or dxnesic)");
    }

    bool uses_bias(Variant variant)
    {
        return variant == Variant::dxnesici;
    }

    bool uses_leap(Variant variant)
    {
        return variant != Variant::dxnesic;
    }

    const char* to_string(Termination reason)
    {
        switch (reason)
        {
        case Termination::success:
            return "success";
        case Termination::eval_budget:
            return "eval_budget";
        case Termination::degenerate_covariance:
            return "degenerate_covariance";
        case Termination::ill_conditioned:
            return "ill_conditioned";
        case Termination::non_finite:
            return "non_finite";
        }
        return "unknown";
    }

    Optimizer::Optimizer(Problem problem, OptimizerConfig config)
        : Optimizer(std::move(problem), config, Rng(config.seed))
    {
    }

    Optimizer::Optimizer(Problem problem, OptimizerConfig config, Rng rng)
        : problem_(std::move(problem)), config_(std::move(config)), rng_(std::move(rng)),
          best_f_(std::numeric_limits<double>::infinity())
    {
        const std::size_t n = problem_.dim();
        if (!problem_.objective)
            throw std::invalid_argument("problem has no objective");
        if (n == 0)
            throw std::invalid_argument("problem has no variables");
        if (static_cast<std::size_t>(config_.m0.size()) != n)
            throw std::invalid_argument("initial mean size does not match the problem dimension");
        if (!config_.m0.allFinite())
            throw std::invalid_argument("initial mean must be finite");

        params_ = StrategyParams::make(n, config_.lambda, config_.alpha, config_.coefficients);
        state_ = DistributionState::initial(config_.m0, config_.sigma0);
        max_evals_ = config_.max_evals.value_or(n * 10000);
        refresh_eigensystem();
    }

    void Optimizer::refresh_eigensystem()
    {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(state_.B * state_.B.transpose());
        axes_ = eig.eigenvectors();
        axis_eigenvalues_ = eig.eigenvalues();
    }

    void Optimizer::restore(DistributionState state)
    {
        if (state.mean.size() != state_.mean.size() || state.B.rows() != state_.B.rows()
            || state.B.cols() != state_.B.cols() || state.p_sigma.size() != state_.p_sigma.size())
            throw std::invalid_argument("restore: state dimensions do not match the problem");
        if (!(state.sigma > 0.0))
            throw std::invalid_argument("restore: step size must be positive");
        state_ = std::move(state);
        refresh_eigensystem();
    }

    GenerationRecord Optimizer::step()
    {
        return step_with_draws(sample_population(state_, config_.lambda, rng_).z);
    }

    GenerationRecord Optimizer::step_with_draws(const Matrix& z)
    {
        const std::size_t lambda = config_.lambda;
        const auto n = static_cast<Eigen::Index>(problem_.dim());
        const auto cols = static_cast<Eigen::Index>(lambda);
        if (z.rows() != n || z.cols() != cols)
            throw std::invalid_argument("step_with_draws: draws must be N x lambda");

        Population pop{z, (state_.sigma * (state_.B * z)).colwise() + state_.mean};
        Matrix x_bar(n, cols);
        Vector f(cols);
        for (Eigen::Index i = 0; i < cols; ++i)
        {
            if (!pop.x.col(i).allFinite())
            {
                f[i] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            x_bar.col(i) = encode(pop.x.col(i), problem_.domain, problem_.n_co);
            f[i] = problem_.objective(x_bar.col(i));
        }
        evaluations_ += lambda;

        GenerationRecord rec;
        if (!f.allFinite())
        {
            non_finite_ = true;
            rec.generation = state_.generation;
            rec.evaluations = evaluations_;
            rec.mean = state_.mean;
            rec.sigma = state_.sigma;
            rec.axis_scales = state_.axis_scales();
            rec.path_norm = state_.p_sigma.norm();
            rec.best_f = std::numeric_limits<double>::quiet_NaN();
            return rec;
        }

        std::vector<Eigen::Index> order(lambda);
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return f[a] < f[b]; });
        if (f[order.front()] < best_f_)
        {
            best_f_ = f[order.front()];
            best_x_bar_ = x_bar.col(order.front());
        }
        const Matrix z_sorted = pop.z(Eigen::all, order);

        const Vector p_sigma = update_evolution_path(state_.p_sigma, z_sorted, params_.w_rank, params_.c_sigma,
                                                     params_.mu_eff);
        const double path_norm = p_sigma.norm();
        const PhaseDecision phase = classify_phase(path_norm, state_.movement_streak, params_);
        const Vector weights = calculate_weights(phase.phase, z_sorted, params_);
        const LearningRates rates = calculate_learning_rates(phase.phase, params_);
        const NaturalGradients grads = natural_gradients(z_sorted, weights);

        Vector eta_m = Vector::Ones(n);
        if (uses_bias(config_.variant) && !problem_.domain.empty())
            eta_m = bias_mean_learning_rate(state_.mean, state_.B * grads.G_delta, state_.covariance_diagonal(),
                                            params_.alpha, problem_.domain, problem_.n_co);

        DistributionState next = update_distribution(state_, grads, rates.eta_sigma, rates.eta_b, eta_m);
        next.p_sigma = p_sigma;
        next.movement_streak = phase.movement_streak;

        const bool expand = params_.coefficients == CoefficientSet::reference ? phase.phase == Phase::movement
                                                                             : path_norm >= params_.epsilon;
        const ExpansionResult expanded = emphasize_expansion(axes_, state_.B, next.sigma, next.B,
                                                             state_.expansion_gamma, params_, expand);
        next.sigma = expanded.sigma;
        next.B = expanded.B;
        next.expansion_gamma = expanded.gamma;

        if (uses_leap(config_.variant) && !problem_.domain.empty())
        {
            LeapResult leap = leap_and_correct(state_.mean, next.mean, next.covariance_diagonal(), params_.alpha,
                                               problem_.domain, problem_.n_co);
            next.mean = std::move(leap.mean);
            rec.decisions = std::move(leap.decisions);
        }

        ++next.generation;
        state_ = std::move(next);
        refresh_eigensystem();

        rec.generation = state_.generation;
        rec.evaluations = evaluations_;
        rec.mean = state_.mean;
        rec.sigma = state_.sigma;
        rec.axis_scales = state_.axis_scales();
        rec.path_norm = path_norm;
        rec.phase = phase.phase;
        rec.best_f = f[order.front()];
        return rec;
    }

    std::optional<Termination> Optimizer::check_termination() const
    {
        if (best_f_ < config_.target_f)
            return Termination::success;
        if (non_finite_ || !std::isfinite(state_.sigma) || !state_.B.allFinite())
            return Termination::non_finite;
        const double min_eig = axis_eigenvalues_.minCoeff();
        const double max_eig = axis_eigenvalues_.maxCoeff();
        if (state_.sigma * state_.sigma * min_eig < config_.min_eigenvalue)
            return Termination::degenerate_covariance;
        if (!(min_eig > 0.0) || max_eig / min_eig > config_.max_condition)
            return Termination::ill_conditioned;
        if (evaluations_ > max_evals_)
            return Termination::eval_budget;
        return std::nullopt;
    }

    RunResult Optimizer::run()
    {
        RunResult result;
        std::optional<Termination> reason;
        while (!(reason = check_termination()))
        {
            GenerationRecord rec = step();
            if (config_.record_trace)
                result.trace.push_back(std::move(rec));
        }
        result.terminated_as = *reason;
        result.evaluations_used = evaluations_;
        result.generations = state_.generation;
        result.best_f = best_f_;
        result.best_x_bar = best_x_bar_;
        return result;
    }
}
