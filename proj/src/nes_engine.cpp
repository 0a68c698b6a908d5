#include "dxnesici/nes_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dxnesici
{
    const char* to_string(Phase phase)
    {
        switch (phase)
        {
        case Phase::movement:
            return "movement";
        case Phase::stagnation:
            return "stagnation";
        case Phase::convergence:
            return "convergence";
        }
        return "unknown";
    }

    RankWeights rank_weights(std::size_t lambda)
    {
        if (lambda < 2)
            throw std::invalid_argument("rank_weights: lambda must be at least 2");
        const double lam = static_cast<double>(lambda);
        Vector w_hat(lambda);
        for (std::size_t i = 0; i < lambda; ++i)
            w_hat[i] = std::max(0.0, std::log(lam / 2.0 + 1.0) - std::log(static_cast<double>(i + 1)));
        const Vector w_rank = (w_hat / w_hat.sum()).array() - 1.0 / lam;
        const double mu_eff = 1.0 / (w_rank.array() + 1.0 / lam).square().sum();
        return {w_hat, w_rank, mu_eff};
    }

    double distance_weight_root(std::size_t dim)
    {
        const double n = static_cast<double>(dim);
        double a = 1.0;
        for (int it = 0; it < 10000; ++it)
        {
            const double e = std::exp(a * a / 2.0);
            const double f = (1.0 + a * a) * e / 0.24 - 10.0 - n;
            const double df = (2.0 * a * e + a * (1.0 + a * a) * e) / 0.24;
            const double step = f / df;
            a -= step;
            if (std::abs(step) < 1e-15)
                break;
        }
        return a;
    }

    double expected_gaussian_norm(std::size_t dim)
    {
        const double n = static_cast<double>(dim);
        return std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
    }

    StrategyParams StrategyParams::make(std::size_t dim, std::size_t lambda, std::optional<double> alpha,
                                        CoefficientSet coefficients)
    {
        if (dim == 0)
            throw std::invalid_argument("dimension must be positive");
        if (lambda < 2 || lambda % 2 != 0)
            throw std::invalid_argument("lambda must be an even number >= 2");

        StrategyParams p;
        p.dim = dim;
        p.lambda = lambda;
        const double n = static_cast<double>(dim);
        const double lam = static_cast<double>(lambda);

        auto rw = rank_weights(lambda);
        p.w_hat = std::move(rw.w_hat);
        p.w_rank = std::move(rw.w_rank);
        p.mu_eff = rw.mu_eff;
        p.c_sigma = ((p.mu_eff + 2.0) / (n + p.mu_eff + 5.0)) / (2.0 * std::log(n + 1.0));
        p.epsilon = expected_gaussian_norm(dim);
        p.alpha = alpha.value_or(1.0 / (n * lam));
        if (!(p.alpha > 0.0 && p.alpha < 0.5))
            throw std::invalid_argument("alpha must lie in (0, 0.5)");

        p.coefficients = coefficients;
        if (coefficients == CoefficientSet::reference)
        {
            p.distance_alpha = distance_weight_root(dim) * std::min(1.0, std::sqrt(lam / n));
            p.eta_sigma = {
                1.0,
                std::tanh((0.024 * lam + 0.7 * n + 20.0) / (n + 12.0)),
                2.0 * std::tanh((0.025 * lam + 0.75 * n + 10.0) / (n + 4.0)),
            };
            const double eta_b_base = 120.0 * n / (47.0 * n * n + 6400.0) * std::tanh(0.02 * lam);
            p.eta_b = {1.5 * eta_b_base, 1.4 * eta_b_base, 0.1 * eta_b_base};
            p.c_gamma = dim > 1 ? 1.0 / (3.0 * (n - 1.0)) : 1.0;
            p.d_gamma = std::min(1.0, n / lam);
        }
        else
        {
            const double eta = (9.0 + 3.0 * std::log(n)) / (5.0 * n * std::sqrt(n));
            p.eta_sigma = {eta, eta, eta};
            p.eta_b = {eta, eta, eta};
        }
        return p;
    }

    DistributionState DistributionState::initial(const Vector& m0, double sigma0)
    {
        if (!(sigma0 > 0.0))
            throw std::invalid_argument("initial step size must be positive");
        const auto n = m0.size();
        DistributionState s;
        s.mean = m0;
        s.sigma = sigma0;
        s.B = Matrix::Identity(n, n);
        s.p_sigma = Vector::Zero(n);
        s.eta_m = Vector::Ones(n);
        return s;
    }

    Vector DistributionState::covariance_diagonal() const
    {
        return sigma * sigma * B.rowwise().squaredNorm();
    }

    Vector DistributionState::axis_scales() const
    {
        return sigma * B.rowwise().norm();
    }

    Population sample_population(const DistributionState& state, std::size_t lambda, Rng& rng)
    {
        if (lambda < 2 || lambda % 2 != 0)
            throw std::invalid_argument("sample_population: lambda must be even");
        const auto n = state.mean.size();
        const auto cols = static_cast<Eigen::Index>(lambda);
        std::normal_distribution<double> gauss;
        Population pop{Matrix(n, cols), Matrix(n, cols)};
        for (Eigen::Index i = 0; i < cols; i += 2)
        {
            for (Eigen::Index k = 0; k < n; ++k)
                pop.z(k, i) = gauss(rng);
            pop.z.col(i + 1) = -pop.z.col(i);
        }
        pop.x = (state.sigma * (state.B * pop.z)).colwise() + state.mean;
        return pop;
    }

    Vector update_evolution_path(const Vector& p_sigma, const Matrix& z_sorted, const Vector& w_rank,
                                 double c_sigma, double mu_eff)
    {
        return (1.0 - c_sigma) * p_sigma + std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * (z_sorted * w_rank);
    }

    PhaseDecision classify_phase(double path_norm, int movement_streak, const StrategyParams& params)
    {
        const bool long_path = path_norm >= params.epsilon;
        const int streak = long_path ? movement_streak + 1 : 0;
        if (long_path && streak >= params.movement_streak_required)
            return {Phase::movement, streak};
        if (path_norm >= params.stagnation_ratio * params.epsilon)
            return {Phase::stagnation, streak};
        return {Phase::convergence, streak};
    }

    Vector calculate_weights(Phase phase, const Matrix& z_sorted, const StrategyParams& params)
    {
        if (phase != Phase::movement || params.coefficients != CoefficientSet::reference)
            return params.w_rank;
        // Distance weighting: favour the far-reaching good draws while moving.
        const double lam = static_cast<double>(params.lambda);
        const Vector raw = params.w_hat.array() * (params.distance_alpha * z_sorted.colwise().norm().transpose().array()).exp();
        return (raw / raw.sum()).array() - 1.0 / lam;
    }

    LearningRates calculate_learning_rates(Phase phase, const StrategyParams& params)
    {
        const auto k = static_cast<std::size_t>(phase);
        return {params.eta_sigma[k], params.eta_b[k]};
    }

    NaturalGradients natural_gradients(const Matrix& z_sorted, const Vector& weights)
    {
        if (z_sorted.cols() != weights.size())
            throw std::invalid_argument("natural_gradients: weight count does not match population");
        const auto n = z_sorted.rows();
        const Matrix weighted = z_sorted * weights.asDiagonal();
        Matrix gm = weighted * z_sorted.transpose();
        gm = 0.5 * (gm + gm.transpose()).eval();
        gm.diagonal().array() -= weights.sum();

        NaturalGradients g;
        g.G_sigma = gm.trace() / static_cast<double>(n);
        g.G_B = gm;
        g.G_B.diagonal().array() -= g.G_sigma;
        g.G_M = std::move(gm);
        g.G_delta = z_sorted * weights;
        return g;
    }

    Matrix sym_matrix_exp(const Matrix& M)
    {
        if (M.rows() != M.cols())
            throw std::invalid_argument("sym_matrix_exp: matrix must be square");
        const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
        if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
            throw std::invalid_argument("sym_matrix_exp: matrix is not symmetric");
        Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
        if (eig.info() != Eigen::Success)
            throw std::runtime_error("sym_matrix_exp: eigendecomposition failed");
        const Matrix& V = eig.eigenvectors();
        Matrix out = V * eig.eigenvalues().array().exp().matrix().asDiagonal() * V.transpose();
        return 0.5 * (out + out.transpose());
    }

    DistributionState update_distribution(const DistributionState& state, const NaturalGradients& grads,
                                          double eta_sigma, double eta_b, const Vector& eta_m)
    {
        DistributionState next = state;
        next.eta_m = eta_m;
        next.mean = state.mean + state.sigma * eta_m.cwiseProduct(state.B * grads.G_delta);
        next.sigma = state.sigma * std::exp(eta_sigma * grads.G_sigma / 2.0);
        if (!grads.G_B.isZero(0.0))
            next.B = state.B * sym_matrix_exp((eta_b / 2.0) * grads.G_B);
        return next;
    }

    ExpansionResult emphasize_expansion(const Matrix& prev_axes, const Matrix& B_prev, double sigma_next,
                                        const Matrix& B_next, double gamma, const StrategyParams& params,
                                        bool apply)
    {
        if (params.coefficients != CoefficientSet::reference)
            return {sigma_next, B_next, gamma};

        const auto n = B_next.rows();
        const Matrix prev_cov = B_prev * B_prev.transpose();
        const Matrix next_cov = B_next * B_next.transpose();

        // Relative growth of B B^T along each previous principal axis.
        Vector tau(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const auto e = prev_axes.col(i);
            tau[i] = e.dot(next_cov * e) / e.dot(prev_cov * e) - 1.0;
        }
        const double next_gamma = std::max(
            1.0, (1.0 - params.c_gamma) * gamma + params.c_gamma * std::sqrt(1.0 + params.d_gamma * tau.maxCoeff()));

        if (!apply)
            return {sigma_next, B_next, next_gamma};

        Matrix Q = Matrix::Identity(n, n);
        Eigen::Index grown = 0;
        for (Eigen::Index i = 0; i < n; ++i)
        {
            if (tau[i] > 0.0)
            {
                Q.noalias() += (next_gamma - 1.0) * prev_axes.col(i) * prev_axes.col(i).transpose();
                ++grown;
            }
        }
        // det(Q) = gamma^grown since the axes are orthonormal.
        const double root_det = std::pow(next_gamma, static_cast<double>(grown) / static_cast<double>(n));
        return {sigma_next * root_det, (Q * B_next) / root_det, next_gamma};
    }

    ExpansionResult emphasize_expansion(const Matrix& B_prev, double sigma_next, const Matrix& B_next,
                                        double gamma, const StrategyParams& params, bool apply)
    {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(B_prev * B_prev.transpose());
        return emphasize_expansion(eig.eigenvectors(), B_prev, sigma_next, B_next, gamma, params, apply);
    }
}
