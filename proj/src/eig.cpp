// SPDX-License-Identifier: Apache-2.0

#include "freqfit/eig.hpp"

#include <vector>

#include "freqfit/errors.hpp"

// Eigen has no complex-valued generalized eigensolver, so we call LAPACK.
extern "C"
{
    void zggev_(char* jobvl, char* jobvr, int* n, std::complex<double>* a, int* lda,
                std::complex<double>* b, int* ldb, std::complex<double>* alpha,
                std::complex<double>* beta, std::complex<double>* vl, int* ldvl,
                std::complex<double>* vr, int* ldvr, std::complex<double>* work, int* lwork,
                double* rwork, int* info);
}

namespace freqfit
{

bool GeneralizedEig::finite(Index i, double tol) const
{
    return std::abs(beta(i)) > tol * (std::abs(alpha(i)) + 1.0);
}

GeneralizedEig generalized_eig(const Matrix& A, const Matrix& E, bool want_left,
                               bool want_right)
{
    if (A.rows() != A.cols())
    {
        throw ValidationError("generalized_eig: A must be square");
    }
    int n = static_cast<int>(A.rows());

    Matrix a = A;
    Matrix b = E.size() ? E : Matrix(Matrix::Identity(n, n));
    if (b.rows() != n || b.cols() != n)
    {
        throw ValidationError("generalized_eig: E dimension mismatch");
    }

    GeneralizedEig out;
    out.alpha.resize(n);
    out.beta.resize(n);
    out.left.resize(n, want_left ? n : 1);
    out.right.resize(n, want_right ? n : 1);

    char jobvl = want_left ? 'V' : 'N';
    char jobvr = want_right ? 'V' : 'N';
    int lda = n, info = 0, lwork = -1;
    std::vector<double> rwork(8 * std::max(n, 1));
    std::complex<double> wsize;

    zggev_(&jobvl, &jobvr, &n, a.data(), &lda, b.data(), &lda, out.alpha.data(),
           out.beta.data(), out.left.data(), &lda, out.right.data(), &lda, &wsize, &lwork,
           rwork.data(), &info);
    lwork = static_cast<int>(wsize.real());
    std::vector<std::complex<double>> work(std::max(lwork, 1));
    zggev_(&jobvl, &jobvr, &n, a.data(), &lda, b.data(), &lda, out.alpha.data(),
           out.beta.data(), out.left.data(), &lda, out.right.data(), &lda, work.data(),
           &lwork, rwork.data(), &info);

    if (info != 0)
    {
        throw NumericalError("zggev failed to converge (info=" + std::to_string(info) + ")");
    }
    return out;
}

}  // namespace freqfit
