// SPDX-License-Identifier: Apache-2.0

#ifndef FREQFIT_POLE_PLACEMENT_HPP
#define FREQFIT_POLE_PLACEMENT_HPP

#include <vector>

#include "freqfit/barycentric.hpp"
#include "freqfit/cur.hpp"
#include "freqfit/dataset.hpp"
#include "freqfit/state_space.hpp"
#include "freqfit/types.hpp"

namespace freqfit
{

struct PolePlacementResult
{
    BarycentricModel model;
    double cauchy_condition = 0.0;  // estimate of cond(C_{zeta,lambda})
};

/// Barycentric pole placement (SISO): solves C_{zeta,lambda} w = -1 with
/// (C)_{ij} = 1/(zeta_i - lambda_j) through a pivoted factorization, so the
/// realized A = diag(lambda) - w 1^T has eigenvalues {zeta_j} while the model
/// still interpolates the node values. Refuses cond(C) > 1e14.
PolePlacementResult place_poles(const std::vector<Complex>& nodes,
                                const std::vector<Complex>& node_values,
                                const std::vector<Complex>& poles);

struct DominanceEntry
{
    Complex eigenvalue;
    double dominance = 0.0;
    bool stable = false;
};

struct DominanceTable
{
    std::vector<DominanceEntry> entries;      // sorted by descending dominance
    std::vector<Complex> excluded_imaginary;  // |Re| < 1e-12, skipped
    Index infinite_count = 0;                 // infinite pencil eigenvalues
};

/// Ranks the eigenvalues of (A, E) by d_i = |alpha_i| * ||C x_i y_i^H B||_2 /
/// |Re(alpha_i)| with left/right eigenvectors scaled so y_i^H E x_i = 1.
DominanceTable dominance(const StateSpaceModel& mdl);

enum class LfappMode
{
    Auto,      // poles = most dominant eigenvalues of the Loewner surrogate
    Modified,  // poles matched to user-marked peak frequencies
};

struct LfappOptions
{
    bool stable_only = true;
    LfappMode mode = LfappMode::Auto;
    std::vector<double> peaks;  // peak frequencies (rad/s), Modified mode
    double svd_tol = 1e-12;     // truncation tolerance for the surrogate
    Index surrogate_order = 0;  // >0 truncates the surrogate to this order
                                // instead; on noisy data a small order (say k)
                                // denoises the eigenvalue pool
    PointMode point_mode = PointMode::MergedAlternate;
};

struct LfappResult
{
    BarycentricModel model;
    std::vector<Complex> poles;
    std::vector<Complex> nodes;
    double cauchy_condition = 0.0;
    Index surrogate_rank = 0;
};

/// Automatic pole placement on SISO data: build an SVD-truncated Loewner
/// surrogate, choose k poles (by dominance, or nearest to the marked peaks in
/// Modified mode), choose k nodes (by CUR selection, or at the samples of
/// minimal |H| between consecutive pole frequencies), then place_poles. On
/// conjugate-closed data both lists are conjugate-closed, pairs adjacent.
LfappResult lfapp_fit(const FrequencyDataset& d, Index k,
                      const LfappOptions& opts = {});

/// Projection-based pole placement requiring the original model (test oracle):
/// V = [(lambda_j E - A)^{-1} B], C_zeta a left null vector of V, and W^H rows
/// C_zeta (zeta_j E - A)^{-1}; returns (W^H E V, W^H A V, W^H B, C V). Its
/// transfer function equals the place_poles surrogate built from the same
/// data.
StateSpaceModel intrusive_pp_oracle(const StateSpaceModel& mdl,
                                    const std::vector<Complex>& nodes,
                                    const std::vector<Complex>& poles);

}  // namespace freqfit

#endif  // FREQFIT_POLE_PLACEMENT_HPP
