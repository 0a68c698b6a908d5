#include "dxnesici/benchmarks.hpp"

#include <cmath>
#include <stdexcept>

namespace dxnesici::benchmarks
{
    namespace
    {
        // 1000^(k / (n - 1)), with the n == 1 degenerate case pinned to 1.
        double ill_scale(std::size_t k, std::size_t n)
        {
            if (n <= 1)
                return 1.0;
            return std::pow(1000.0, static_cast<double>(k) / static_cast<double>(n - 1));
        }
    }

    double nint_tablet(const Vector& x_bar, std::size_t n_co)
    {
        const auto co = static_cast<Eigen::Index>(n_co);
        return x_bar.tail(x_bar.size() - co).squaredNorm() + (100.0 * x_bar.head(co)).squaredNorm();
    }

    double reversed_ellipsoid_int(const Vector& x_bar, std::size_t n_co)
    {
        const std::size_t n = static_cast<std::size_t>(x_bar.size());
        const std::size_t n_int = n - n_co;
        double f = 0.0;
        for (std::size_t j = 0; j < n_int; ++j)
        {
            const double t = ill_scale(j, n) * x_bar[static_cast<Eigen::Index>(n_co + j)];
            f += t * t;
        }
        for (std::size_t j = 0; j < n_co; ++j)
        {
            const double t = ill_scale(n_int + j, n) * x_bar[static_cast<Eigen::Index>(j)];
            f += t * t;
        }
        return f;
    }

    double ellipsoid_int(const Vector& x_bar)
    {
        const std::size_t n = static_cast<std::size_t>(x_bar.size());
        double f = 0.0;
        for (std::size_t j = 0; j < n; ++j)
        {
            const double t = ill_scale(j, n) * x_bar[static_cast<Eigen::Index>(j)];
            f += t * t;
        }
        return f;
    }

    double sphere_one_max(const Vector& x_bar, std::size_t n_co)
    {
        const auto co = static_cast<Eigen::Index>(n_co);
        const auto integer = x_bar.tail(x_bar.size() - co);
        return x_bar.head(co).squaredNorm() + static_cast<double>(integer.size()) - integer.sum();
    }

    const std::vector<std::string>& names()
    {
        static const std::vector<std::string> all{"nint-tablet", "reversed-ellipsoid-int", "ellipsoid-int",
                                                  "sphere-onemax"};
        return all;
    }

    Vector BenchmarkProblem::initial_mean(Rng& rng) const
    {
        std::uniform_real_distribution<double> uniform(1.0, 3.0);
        Vector m(static_cast<Eigen::Index>(dim()));
        for (Eigen::Index j = 0; j < m.size(); ++j)
        {
            const bool integer = static_cast<std::size_t>(j) >= problem.n_co;
            m[j] = (binary && integer) ? 0.5 : uniform(rng);
        }
        return m;
    }

    BenchmarkProblem make_problem(const std::string& name, std::size_t dim)
    {
        if (dim < 2 || dim % 2 != 0)
            throw std::invalid_argument("benchmark dimension must be even and at least 2");
        const std::size_t n_co = dim / 2;
        const std::size_t n_int = dim - n_co;
        const auto n = static_cast<Eigen::Index>(dim);

        BenchmarkProblem b;
        b.name = name;
        b.problem.n_co = n_co;
        b.optimizer = Vector::Zero(n);
        if (name == "nint-tablet")
            b.problem.objective = [n_co](const Vector& x) { return nint_tablet(x, n_co); };
        else if (name == "reversed-ellipsoid-int")
            b.problem.objective = [n_co](const Vector& x) { return reversed_ellipsoid_int(x, n_co); };
        else if (name == "ellipsoid-int")
            b.problem.objective = [](const Vector& x) { return ellipsoid_int(x); };
        else if (name == "sphere-onemax")
        {
            b.problem.objective = [n_co](const Vector& x) { return sphere_one_max(x, n_co); };
            b.binary = true;
            b.optimizer.tail(static_cast<Eigen::Index>(n_int)).setOnes();
        }
        else
            throw std::invalid_argument("unknown benchmark function '" + name + "'");

        b.problem.domain = uniform_domain(n_int, b.binary ? std::vector<double>{0.0, 1.0} : integer_range(-10, 10));
        return b;
    }
}
