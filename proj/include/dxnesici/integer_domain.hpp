#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "types.hpp"

namespace dxnesici
{
    /// Upper-tail quantile of the standard normal distribution: the q with P(Z > q) = tail.
    double upper_tail_quantile(double tail);

    /// P(Z > x) for a standard normal Z.
    double upper_tail_probability(double x);

    /**
     * Ordered finite value sets for the integer block of a mixed-integer point.
     *
     * Dimension indices passed to the member functions count from the first
     * integer variable (0-based), not from the start of the full vector.
     * Thresholds are the midpoints between adjacent values; the interval
     * (threshold[k-1], threshold[k]] encodes to value k.
     */
    class IntegerDomain
    {
    public:
        IntegerDomain() = default;

        /// Throws std::invalid_argument on lists shorter than 2, unsorted, duplicate or non-finite values.
        explicit IntegerDomain(std::vector<std::vector<double>> value_lists);

        std::size_t size() const { return values_.size(); }
        bool empty() const { return values_.empty(); }

        std::span<const double> values(std::size_t j) const { return values_.at(j); }
        std::span<const double> thresholds(std::size_t j) const { return thresholds_.at(j); }

        double encode_value(std::size_t j, double x) const;

        /// Largest threshold strictly below m.
        std::optional<double> ell_low(std::size_t j, double m) const;
        /// Smallest threshold greater than or equal to m.
        std::optional<double> ell_up(std::size_t j, double m) const;
        /// Threshold nearest to m; equidistant ties go to the lower one.
        double ell_close(std::size_t j, double m) const;

        /// Number of thresholds in the closed interval [m - half_width, m + half_width].
        std::size_t count_thresholds_within(std::size_t j, double m, double half_width) const;

        bool below_first_threshold(std::size_t j, double m) const { return m <= thresholds_[j].front(); }
        bool above_last_threshold(std::size_t j, double m) const { return m > thresholds_[j].back(); }

    private:
        std::vector<std::vector<double>> values_;
        std::vector<std::vector<double>> thresholds_;
    };

    /// Consecutive integers lo..hi as a value list.
    std::vector<double> integer_range(int lo, int hi);

    /// Same value list repeated for `dims` integer variables.
    IntegerDomain uniform_domain(std::size_t dims, const std::vector<double>& values);

    /**
     * Maps a relaxed point to its mixed-integer counterpart. The first n_co
     * entries are continuous and copied through; the remaining entries snap
     * to their domain value by threshold. Non-finite input is rejected.
     */
    Vector encode(const Vector& x, const IntegerDomain& domain, std::size_t n_co);

    /// Half-width of the level-alpha interval for a coordinate with variance cov_jj.
    /// Requires 0 < alpha < 0.5.
    double ci_halfwidth(double cov_jj, double alpha);

    std::size_t resolution(const IntegerDomain& domain, std::size_t j, double m, double cov_jj, double alpha);

    struct TailProbabilities
    {
        std::optional<double> lower;  // P(x <= ell_low)
        std::optional<double> upper;  // P(x > ell_up)
    };

    TailProbabilities tail_probabilities(const IntegerDomain& domain, std::size_t j, double m, double cov_jj);
}
