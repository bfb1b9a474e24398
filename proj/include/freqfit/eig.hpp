// SPDX-License-Identifier: Apache-2.0

#ifndef FREQFIT_EIG_HPP
#define FREQFIT_EIG_HPP

#include "freqfit/types.hpp"

namespace freqfit
{

/// Result of the generalized eigenvalue problem A x = lambda E x for complex
/// square matrices. Eigenvalues are returned as (alpha, beta) pairs,
/// lambda_i = alpha_i / beta_i; |beta_i| ~ 0 marks an infinite eigenvalue.
struct GeneralizedEig
{
    Vector alpha;
    Vector beta;
    Matrix left;   // columns y_i with y_i^H A = lambda_i y_i^H E (when requested)
    Matrix right;  // columns x_i with A x_i = lambda_i E x_i (when requested)

    bool finite(Index i, double tol = 1e-12) const;
    Complex eigenvalue(Index i) const { return alpha(i) / beta(i); }
};

/// Computes the generalized eigendecomposition through LAPACK's zggev.
/// Pass an empty E for the standard problem (identity descriptor).
GeneralizedEig generalized_eig(const Matrix& A, const Matrix& E, bool want_left = true,
                               bool want_right = true);

}  // namespace freqfit

#endif  // FREQFIT_EIG_HPP
