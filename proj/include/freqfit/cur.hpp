// SPDX-License-Identifier: Apache-2.0

#ifndef FREQFIT_CUR_HPP
#define FREQFIT_CUR_HPP

#include <utility>
#include <vector>

#include "freqfit/barycentric.hpp"
#include "freqfit/dataset.hpp"
#include "freqfit/loewner.hpp"
#include "freqfit/types.hpp"

namespace freqfit
{

/// CUR factorization Mtx ~ C U R where C and R are actual columns and rows of
/// Mtx picked by DEIM on the leading singular vectors, and U is the
/// pseudo-inverse-optimal core for that choice.
struct CurResult
{
    std::vector<Index> row_indices;
    std::vector<Index> col_indices;
    Matrix C;  // selected columns
    Matrix U;
    Matrix R;  // selected rows
    bool rank_warning = false;  // k exceeded the numerical rank

    double residual(const Matrix& mtx) const;  // ||Mtx - C U R||_F
};

CurResult cur_decompose(const Matrix& mtx, Index k);

enum class PointMode
{
    LeftOnly,
    RightOnly,
    MergedAlternate,  // sort selected points by (Im, Re), take every other
};

/// Picks k interpolation points nu from a full-data pencil via CUR/DEIM on L
/// and returns them together with chi, all remaining sample points. On
/// conjugate-paired pencils the selection works on upper-half-plane
/// representatives and mirrors conjugates into nu (pairs adjacent).
std::pair<std::vector<Complex>, std::vector<Complex>> select_points(
    const LoewnerPencil& pen, Index k, PointMode mode);

/// Least-squares barycentric weights: m x m blocks W_i minimizing the
/// linearized residual || sum_i (H(chi_j) - H(nu_i))/(chi_j - nu_i) W_i +
/// H(chi_j) || stacked over all chi_j, solved as one multi-RHS least-squares
/// problem (minimum-norm when rank-deficient, reported via the flag).
std::vector<Matrix> mimo_ls_weights(const std::vector<Complex>& nodes,
                                    const std::vector<Matrix>& node_values,
                                    const std::vector<Complex>& residual_points,
                                    const std::vector<Matrix>& residual_values,
                                    bool* rank_deficient = nullptr);

struct LsLoewnerResult
{
    BarycentricModel model;
    std::vector<Complex> nu;
    std::vector<Complex> chi;
    bool rank_deficient = false;
};

/// Full LS-Loewner pipeline: alternate partition, pencil, CUR point
/// selection, rectangular block Loewner least-squares for the weights, and a
/// strictly proper barycentric model on the nodes nu.
LsLoewnerResult ls_loewner_fit(const FrequencyDataset& d, Index k,
                               PointMode mode = PointMode::MergedAlternate);

}  // namespace freqfit

#endif  // FREQFIT_CUR_HPP
