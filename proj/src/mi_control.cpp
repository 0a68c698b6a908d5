#include "dxnesici/mi_control.hpp"

#include <stdexcept>
#include <string>

namespace dxnesici
{
    namespace
    {
        int sign(double v)
        {
            return (v > 0.0) - (v < 0.0);
        }

        void check_layout(const Vector& v, const IntegerDomain& domain, std::size_t n_co, const char* what)
        {
            if (static_cast<std::size_t>(v.size()) != n_co + domain.size())
                throw std::invalid_argument(std::string(what) + ": vector size does not match the variable layout");
        }
    }

    const char* to_string(LeapKind kind)
    {
        switch (kind)
        {
        case LeapKind::none:
            return "none";
        case LeapKind::correction:
            return "correction";
        case LeapKind::leap_low:
            return "leap_low";
        case LeapKind::leap_up:
            return "leap_up";
        }
        return "unknown";
    }

    Vector bias_mean_learning_rate(const Vector& mean, const Vector& mean_step, const Vector& cov_diag, double alpha,
                                   const IntegerDomain& domain, std::size_t n_co)
    {
        check_layout(mean, domain, n_co, "bias_mean_learning_rate");
        Vector eta_m = Vector::Ones(mean.size());
        for (std::size_t j = 0; j < domain.size(); ++j)
        {
            const auto k = static_cast<Eigen::Index>(n_co + j);
            if (resolution(domain, j, mean[k], cov_diag[k], alpha) > 1)
                continue;
            const int away = sign(mean[k] - domain.ell_close(j, mean[k]));
            if (away != 0 && sign(mean_step[k]) == away)
                eta_m[k] += 1.0;
        }
        return eta_m;
    }

    LeapResult leap_and_correct(const Vector& mean_before, const Vector& mean_after, const Vector& cov_diag_after,
                                double alpha, const IntegerDomain& domain, std::size_t n_co)
    {
        check_layout(mean_before, domain, n_co, "leap_and_correct");
        check_layout(mean_after, domain, n_co, "leap_and_correct");
        LeapResult out{mean_after, {}};
        for (std::size_t j = 0; j < domain.size(); ++j)
        {
            const auto k = static_cast<Eigen::Index>(n_co + j);
            const double m = mean_after[k];
            const double ci = ci_halfwidth(cov_diag_after[k], alpha);
            if (domain.count_thresholds_within(j, m, ci) != 0)
                continue;

            LeapDecision d;
            d.dim = static_cast<std::size_t>(k);
            if (domain.below_first_threshold(j, m) || domain.above_last_threshold(j, m))
            {
                d.kind = LeapKind::correction;
                d.anchor = domain.ell_close(j, m);
                d.new_mean = d.anchor + sign(m - d.anchor) * ci;
            }
            else if (m <= domain.ell_close(j, mean_before[k]))
            {
                d.kind = LeapKind::leap_low;
                d.anchor = *domain.ell_low(j, m);
                d.new_mean = d.anchor + ci;
            }
            else
            {
                d.kind = LeapKind::leap_up;
                d.anchor = *domain.ell_up(j, m);
                d.new_mean = d.anchor - ci;
            }
            out.mean[k] = d.new_mean;
            out.decisions.push_back(d);
        }
        return out;
    }
}
