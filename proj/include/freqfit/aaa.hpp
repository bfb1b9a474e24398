// SPDX-License-Identifier: Apache-2.0

#ifndef FREQFIT_AAA_HPP
#define FREQFIT_AAA_HPP

#include <vector>

#include "freqfit/barycentric.hpp"
#include "freqfit/dataset.hpp"
#include "freqfit/types.hpp"

namespace freqfit
{

enum class AaaVariant
{
    Classic,         // proper barycentric ratio, homogeneous weight solve
    StrictlyProper,  // 1 inserted into the denominator, inhomogeneous solve
};

enum class ErrorKind
{
    Absolute,
    Relative,  // scaled by the largest sample magnitude
};

enum class PairMode
{
    Auto,  // on when every sample point lies on the imaginary axis
    On,
    Off,
};

struct AaaConfig
{
    double tol = 1e-8;
    Index max_order = 100;  // cap on the number of support points
    AaaVariant variant = AaaVariant::Classic;
    ErrorKind error_kind = ErrorKind::Relative;
    PairMode pairs = PairMode::Auto;

    void validate() const;
};

struct AaaResult
{
    BarycentricModel model;
    bool converged = false;
    bool rank_deficient = false;         // strictly proper LS lost rank
    std::vector<Index> support_indices;  // dataset indices of the nodes
    std::vector<double> error_history;   // max error after each iteration
};

/// Greedy adaptive barycentric fit of SISO data. Starts from the sample mean,
/// repeatedly promotes the worst-error point (and its conjugate in pair mode)
/// to a support node and re-solves for the weights: the smallest right
/// singular vector of the residual-by-support Loewner matrix (classic), or
/// the least-squares solution of L w = -f over the residual points (strictly
/// proper). Deterministic; ties break toward the smallest sample index.
AaaResult aaa_fit(const FrequencyDataset& d, const AaaConfig& cfg);

/// aaa_fit with the variant forced to StrictlyProper.
AaaResult aaa_fit_strictly_proper(const FrequencyDataset& d, AaaConfig cfg);

}  // namespace freqfit

#endif  // FREQFIT_AAA_HPP
