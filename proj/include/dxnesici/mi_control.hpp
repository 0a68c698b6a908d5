#pragma once

#include <cstddef>
#include <vector>

#include "integer_domain.hpp"
#include "types.hpp"

namespace dxnesici
{
    enum class LeapKind
    {
        none,
        correction,  // mean beyond the outermost threshold, pulled back to margin alpha
        leap_low,
        leap_up,
    };

    const char* to_string(LeapKind kind);

    /// One adjusted integer coordinate. `dim` indexes the full vector.
    struct LeapDecision
    {
        std::size_t dim = 0;
        LeapKind kind = LeapKind::none;
        double anchor = 0.0;  // threshold the new mean was placed against
        double new_mean = 0.0;
    };

    /**
     * Per-coordinate mean learning rate. An integer coordinate j gets rate 2
     * when the interval around the current mean holds at most one threshold
     * and the proposed mean step points away from the closest threshold;
     * everything else gets rate 1.
     *
     * mean_step is the direction of the unscaled mean move, B G_delta.
     * cov_diag is the diagonal of sigma^2 B B^T before the update.
     */
    Vector bias_mean_learning_rate(const Vector& mean, const Vector& mean_step, const Vector& cov_diag, double alpha,
                                   const IntegerDomain& domain, std::size_t n_co);

    struct LeapResult
    {
        Vector mean;
        std::vector<LeapDecision> decisions;
    };

    /**
     * Moves integer coordinates whose interval around the updated mean holds no
     * threshold so that exactly alpha of the marginal mass lies across the
     * nearest boundary: back inside the threshold range (correction), or onto
     * the boundary below/above (leap). The leap direction compares the updated
     * mean against the threshold closest to the mean before the update.
     */
    LeapResult leap_and_correct(const Vector& mean_before, const Vector& mean_after, const Vector& cov_diag_after,
                                double alpha, const IntegerDomain& domain, std::size_t n_co);
}
