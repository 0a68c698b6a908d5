#pragma once

#include <Eigen/Dense>
#include <random>

namespace dxnesici
{
    using Vector = Eigen::VectorXd;
    using Matrix = Eigen::MatrixXd;

    // 64-bit Mersenne Twister; per-trial streams are seeded through derive_seed().
    using Rng = std::mt19937_64;
}
