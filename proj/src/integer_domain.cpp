#include "dxnesici/integer_domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/erf.hpp>

namespace dxnesici
{
    double upper_tail_quantile(double tail)
    {
        if (!(tail > 0.0 && tail < 1.0))
            throw std::invalid_argument("upper_tail_quantile: tail probability must lie in (0, 1)");
        return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * tail);
    }

    double upper_tail_probability(double x)
    {
        return 0.5 * std::erfc(x / std::numbers::sqrt2);
    }

    IntegerDomain::IntegerDomain(std::vector<std::vector<double>> value_lists)
        : values_(std::move(value_lists))
    {
        thresholds_.reserve(values_.size());
        for (std::size_t j = 0; j < values_.size(); ++j)
        {
            const auto& v = values_[j];
            if (v.size() < 2)
                throw std::invalid_argument("integer variable " + std::to_string(j) + " needs at least two values");
            std::vector<double> t;
            t.reserve(v.size() - 1);
            for (std::size_t k = 0; k < v.size(); ++k)
            {
                if (!std::isfinite(v[k]))
                    throw std::invalid_argument("integer variable " + std::to_string(j) + " has a non-finite value");
                if (k > 0)
                {
                    if (!(v[k - 1] < v[k]))
                        throw std::invalid_argument("integer variable " + std::to_string(j)
                                                    + " values must be strictly increasing");
                    t.push_back((v[k - 1] + v[k]) / 2.0);
                }
            }
            thresholds_.push_back(std::move(t));
        }
    }

    double IntegerDomain::encode_value(std::size_t j, double x) const
    {
        const auto& t = thresholds_[j];
        const auto k = std::lower_bound(t.begin(), t.end(), x) - t.begin();
        return values_[j][static_cast<std::size_t>(k)];
    }

    std::optional<double> IntegerDomain::ell_low(std::size_t j, double m) const
    {
        const auto& t = thresholds_[j];
        const auto it = std::lower_bound(t.begin(), t.end(), m);
        if (it == t.begin())
            return std::nullopt;
        return *(it - 1);
    }

    std::optional<double> IntegerDomain::ell_up(std::size_t j, double m) const
    {
        const auto& t = thresholds_[j];
        const auto it = std::lower_bound(t.begin(), t.end(), m);
        if (it == t.end())
            return std::nullopt;
        return *it;
    }

    double IntegerDomain::ell_close(std::size_t j, double m) const
    {
        const auto low = ell_low(j, m);
        const auto up = ell_up(j, m);
        if (!low)
            return *up;
        if (!up)
            return *low;
        return (m - *low <= *up - m) ? *low : *up;
    }

    std::size_t IntegerDomain::count_thresholds_within(std::size_t j, double m, double half_width) const
    {
        const auto& t = thresholds_[j];
        const auto first = std::lower_bound(t.begin(), t.end(), m - half_width);
        const auto last = std::upper_bound(first, t.end(), m + half_width);
        return static_cast<std::size_t>(last - first);
    }

    std::vector<double> integer_range(int lo, int hi)
    {
        std::vector<double> v;
        for (int k = lo; k <= hi; ++k)
            v.push_back(static_cast<double>(k));
        return v;
    }

    IntegerDomain uniform_domain(std::size_t dims, const std::vector<double>& values)
    {
        return IntegerDomain(std::vector<std::vector<double>>(dims, values));
    }

    Vector encode(const Vector& x, const IntegerDomain& domain, std::size_t n_co)
    {
        if (static_cast<std::size_t>(x.size()) != n_co + domain.size())
            throw std::invalid_argument("encode: point size does not match the variable layout");
        if (!x.allFinite())
            throw std::invalid_argument("encode: non-finite coordinate");
        Vector out = x;
        for (std::size_t j = 0; j < domain.size(); ++j)
            out[n_co + j] = domain.encode_value(j, x[n_co + j]);
        return out;
    }

    double ci_halfwidth(double cov_jj, double alpha)
    {
        if (!(alpha > 0.0 && alpha < 0.5))
            throw std::invalid_argument("ci_halfwidth: alpha must lie in (0, 0.5)");
        if (!(cov_jj >= 0.0))
            throw std::invalid_argument("ci_halfwidth: variance must be non-negative");
        return upper_tail_quantile(alpha) * std::sqrt(cov_jj);
    }

    std::size_t resolution(const IntegerDomain& domain, std::size_t j, double m, double cov_jj, double alpha)
    {
        return domain.count_thresholds_within(j, m, ci_halfwidth(cov_jj, alpha));
    }

    TailProbabilities tail_probabilities(const IntegerDomain& domain, std::size_t j, double m, double cov_jj)
    {
        if (!(cov_jj > 0.0))
            throw std::invalid_argument("tail_probabilities: variance must be positive");
        const double sd = std::sqrt(cov_jj);
        TailProbabilities out;
        if (const auto low = domain.ell_low(j, m))
            out.lower = upper_tail_probability((m - *low) / sd);
        if (const auto up = domain.ell_up(j, m))
            out.upper = upper_tail_probability((*up - m) / sd);
        return out;
    }
}
