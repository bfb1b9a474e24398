// SPDX-License-Identifier: Apache-2.0

#ifndef FREQFIT_LOEWNER_HPP
#define FREQFIT_LOEWNER_HPP

#include <string>
#include <vector>

#include "freqfit/dataset.hpp"
#include "freqfit/state_space.hpp"
#include "freqfit/types.hpp"

namespace freqfit
{

enum class PartitionScheme
{
    Alternate,  // conjugate pairs kept together, pairs alternating sides
    HalfHalf,   // first half left, second half right (left gets the extra)
    Custom,     // explicit left index set
};

/// Disjoint split of a dataset into left data (mu_i, v_i) and right data
/// (lambda_j, w_j).
struct Partition
{
    std::vector<Complex> left_nodes;
    std::vector<Matrix> left_values;
    std::vector<Complex> right_nodes;
    std::vector<Matrix> right_values;
    Index m = 1;
    Index p = 1;

    // Both sides consist of adjacent conjugate pairs (realifiable).
    bool conjugate_paired = false;

    Index q() const { return static_cast<Index>(left_nodes.size()); }
    Index k() const { return static_cast<Index>(right_nodes.size()); }

    void validate() const;
};

Partition partition(const FrequencyDataset& d, PartitionScheme scheme,
                    const std::vector<Index>& custom_left = {});

/// Block Loewner pencil. For SISO, L_(i,j) = (v_i - w_j)/(mu_i - lambda_j) and
/// Ls_(i,j) = (mu_i v_i - lambda_j w_j)/(mu_i - lambda_j); MIMO uses full
/// p x m blocks. V stacks the left values (qp x m), W concatenates the right
/// values (p x km).
struct LoewnerPencil
{
    Matrix L;   // qp x km
    Matrix Ls;  // qp x km
    Matrix V;   // qp x m
    Matrix W;   // p x km
    std::vector<Complex> left_nodes;
    std::vector<Complex> right_nodes;
    Index m = 1;
    Index p = 1;
    bool conjugate_paired = false;
    bool real = false;  // realified; node lists describe the pre-transform data

    Index q() const { return static_cast<Index>(left_nodes.size()); }
    Index k() const { return static_cast<Index>(right_nodes.size()); }
};

/// Exact left/right node collisions fail partition validation; nodes closer
/// than the divided-difference gap tolerance raise NumericalError.
LoewnerPencil build_pencil(const Partition& part);

/// Relative Frobenius residuals of the Sylvester identities
///   M L - L Lam = V 1^T - 1 W,
///   Ls = L Lam + V 1^T,
///   Ls = M L + 1 W
/// (block form for MIMO). Requires a non-realified pencil.
struct SylvesterResiduals
{
    double difference;
    double shifted_right;
    double shifted_left;

    double max() const;
};

SylvesterResiduals sylvester_residuals(const LoewnerPencil& pen);

/// Applies the pairing transforms J_mu, J_lam of both node sets to the pencil
/// (L -> J_mu L J_lam^H and so on). The transfer function of derived models
/// is unchanged; all pencil matrices become real.
LoewnerPencil realify_pencil(const LoewnerPencil& pen, double tol = 1e-10);

/// The unprocessed Loewner surrogate E=-L, A=-Ls, B=V, C=W. Requires a square
/// regular pencil; a pencil singular at every probe point is rejected with a
/// hint to use SVD truncation instead.
StateSpaceModel unprocessed_model(const LoewnerPencil& pen);

/// Either a fixed target order r or a relative singular value cutoff tol.
struct TruncationRule
{
    Index r = -1;      // >= 1 when order-driven
    double tol = -1.0;  // > 0 when tolerance-driven

    static TruncationRule order(Index r);
    static TruncationRule tolerance(double tol);
};

struct LoewnerReduction
{
    StateSpaceModel model;
    Index rank = 0;            // retained order
    RealVector svals_row;      // singular values of [L Ls]
    RealVector svals_col;      // singular values of [L; Ls]
    bool clamped = false;      // requested r exceeded the numerical rank
    std::string note;
};

/// SVD-truncated Loewner model: X from [L Ls], Y from [L; Ls], and
/// E=-X^H L Y, A=-X^H Ls Y, B=X^H V, C=W Y. With a tolerance rule the rank is
/// the smaller of the two spectra's counts of sigma >= tol * sigma_max; an
/// explicit r is clamped to the numerical rank with a warning note.
LoewnerReduction truncated_model(const LoewnerPencil& pen, TruncationRule rule);

}  // namespace freqfit

#endif  // FREQFIT_LOEWNER_HPP
