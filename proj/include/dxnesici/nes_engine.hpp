#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "types.hpp"

namespace dxnesici
{
    /// Source of the phase-dependent coefficients (weights, learning rates, expansion).
    enum class CoefficientSet
    {
        reference,      // distance weighting, three-phase rates, expansion emphasis
        xnes_fallback,  // rank weights, constant xNES rates, no emphasis
    };

    enum class Phase
    {
        movement = 0,
        stagnation = 1,
        convergence = 2,
    };

    const char* to_string(Phase phase);

    struct RankWeights
    {
        Vector w_hat;
        Vector w_rank;
        double mu_eff;
    };

    RankWeights rank_weights(std::size_t lambda);

    /// Root of (1 + a^2) exp(a^2 / 2) / 0.24 = 10 + dim, found by Newton iteration.
    double distance_weight_root(std::size_t dim);

    /// Expected norm of a dim-variate standard normal vector (series approximation).
    double expected_gaussian_norm(std::size_t dim);

    struct StrategyParams
    {
        std::size_t dim = 0;
        std::size_t lambda = 0;
        Vector w_hat;
        Vector w_rank;
        double mu_eff = 0.0;
        double c_sigma = 0.0;
        double epsilon = 0.0;
        double alpha = 0.0;  // minimum marginal probability

        CoefficientSet coefficients = CoefficientSet::reference;
        double distance_alpha = 0.0;
        std::array<double, 3> eta_sigma{};  // indexed by Phase
        std::array<double, 3> eta_b{};
        double c_gamma = 0.0;
        double d_gamma = 0.0;
        int movement_streak_required = 5;
        double stagnation_ratio = 0.1;  // ||p|| >= ratio * epsilon separates stagnation from convergence

        /// Throws std::invalid_argument for odd/zero lambda, dim == 0 or alpha outside (0, 0.5).
        static StrategyParams make(std::size_t dim, std::size_t lambda,
                                   std::optional<double> alpha = std::nullopt,
                                   CoefficientSet coefficients = CoefficientSet::reference);
    };

    struct DistributionState
    {
        Vector mean;
        double sigma = 1.0;
        Matrix B;
        Vector p_sigma;
        std::size_t generation = 0;
        Vector eta_m;  // mean learning rate used by the last update, entries in {1, 2}

        int movement_streak = 0;       // consecutive generations with ||p_sigma|| >= epsilon
        double expansion_gamma = 1.0;  // smoothed expansion factor, >= 1

        static DistributionState initial(const Vector& m0, double sigma0);

        /// Diagonal of sigma^2 B B^T.
        Vector covariance_diagonal() const;
        /// sigma * sqrt(<B B^T>_j) per coordinate.
        Vector axis_scales() const;
    };

    /// Standardized draws z (columns) and their images x = m + sigma B z.
    struct Population
    {
        Matrix z;
        Matrix x;
    };

    /// Mirrored sampling: column 2i+1 is the negation of column 2i.
    Population sample_population(const DistributionState& state, std::size_t lambda, Rng& rng);

    /// Columns of z are expected sorted best-first.
    Vector update_evolution_path(const Vector& p_sigma, const Matrix& z_sorted, const Vector& w_rank,
                                 double c_sigma, double mu_eff);

    struct PhaseDecision
    {
        Phase phase;
        int movement_streak;
    };

    PhaseDecision classify_phase(double path_norm, int movement_streak, const StrategyParams& params);

    Vector calculate_weights(Phase phase, const Matrix& z_sorted, const StrategyParams& params);

    struct LearningRates
    {
        double eta_sigma;
        double eta_b;
    };

    LearningRates calculate_learning_rates(Phase phase, const StrategyParams& params);

    struct NaturalGradients
    {
        Matrix G_M;
        double G_sigma;
        Matrix G_B;
        Vector G_delta;
    };

    NaturalGradients natural_gradients(const Matrix& z_sorted, const Vector& weights);

    /// exp(M) for symmetric M via eigendecomposition. Rejects asymmetric input.
    Matrix sym_matrix_exp(const Matrix& M);

    /**
     * Exponential-map update of sigma and B plus the mean step
     * m + sigma * (eta_m .* B G_delta), all using the pre-update sigma and B.
     * The generation counter is left alone.
     */
    DistributionState update_distribution(const DistributionState& state, const NaturalGradients& grads,
                                          double eta_sigma, double eta_b, const Vector& eta_m);

    struct ExpansionResult
    {
        double sigma;
        Matrix B;
        double gamma;
    };

    /**
     * Tracks the expansion factor gamma from the growth of B B^T along the
     * principal axes of the previous B B^T and, when `apply` is set, stretches
     * the axes that grew by gamma while keeping det(B) = 1 (the scale moves
     * into sigma).
     *
     * prev_axes are orthonormal eigenvectors of B_prev B_prev^T (columns).
     */
    ExpansionResult emphasize_expansion(const Matrix& prev_axes, const Matrix& B_prev, double sigma_next,
                                        const Matrix& B_next, double gamma, const StrategyParams& params,
                                        bool apply);

    /// Convenience overload that decomposes B_prev B_prev^T itself.
    ExpansionResult emphasize_expansion(const Matrix& B_prev, double sigma_next, const Matrix& B_next,
                                        double gamma, const StrategyParams& params, bool apply);
}
