#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "optimizer.hpp"
#include "types.hpp"

namespace dxnesici::benchmarks
{
    // Objectives take encoded points laid out as [continuous (n_co), integer (n_int)].

    double nint_tablet(const Vector& x_bar, std::size_t n_co);
    double reversed_ellipsoid_int(const Vector& x_bar, std::size_t n_co);
    double ellipsoid_int(const Vector& x_bar);
    double sphere_one_max(const Vector& x_bar, std::size_t n_co);

    /// Stable CLI identifiers.
    const std::vector<std::string>& names();

    struct BenchmarkProblem
    {
        std::string name;
        Problem problem;
        Vector optimizer;  // an encoded point attaining the optimum value 0
        double optimum_value = 0.0;
        bool binary = false;  // 0-1 integer domain

        std::size_t dim() const { return problem.dim(); }

        /// Integer coordinates of 0-1 problems start at 0.5; everything else uniform in [1, 3].
        Vector initial_mean(Rng& rng) const;
    };

    /// Throws std::invalid_argument on unknown name or odd / non-positive N.
    BenchmarkProblem make_problem(const std::string& name, std::size_t dim);
}
