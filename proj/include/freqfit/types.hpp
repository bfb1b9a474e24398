// SPDX-License-Identifier: Apache-2.0

#ifndef FREQFIT_TYPES_HPP
#define FREQFIT_TYPES_HPP

#include <complex>

#include <Eigen/Core>

namespace freqfit
{

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

using namespace std::complex_literals;

/// Relative threshold deciding when an evaluation point counts as one of the
/// interpolation nodes: |s - node| <= kNodeProximity * (1 + |node|).
inline constexpr double kNodeProximity = 1e-14;

/// Condition number above which linear solves in evaluations are rejected.
inline constexpr double kMaxEvalCondition = 1e14;

inline bool near_node(Complex s, Complex node, double scale = kNodeProximity)
{
    return std::abs(s - node) <= scale * (1.0 + std::abs(node));
}

}  // namespace freqfit

#endif  // FREQFIT_TYPES_HPP
