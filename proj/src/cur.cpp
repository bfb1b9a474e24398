// SPDX-License-Identifier: Apache-2.0

#include "freqfit/cur.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "freqfit/errors.hpp"

namespace freqfit
{

namespace
{

// DEIM: greedy index selection on the leading singular vectors. Each new
// index is the largest entry of the current vector's residual against the
// interpolation of the previous vectors at the chosen indices.
std::vector<Index> deim_indices(const Matrix& u)
{
    const Index k = u.cols();
    std::vector<Index> picks(k);
    Index at = 0;
    u.col(0).cwiseAbs().maxCoeff(&at);
    picks[0] = at;
    for (Index j = 1; j < k; j++)
    {
        Matrix sub(j, j);
        Vector rhs(j);
        for (Index t = 0; t < j; t++)
        {
            sub.row(t) = u.row(picks[t]).head(j);
            rhs(t) = u(picks[t], j);
        }
        const Vector c = sub.partialPivLu().solve(rhs);
        const Vector resid = u.col(j) - u.leftCols(j) * c;
        resid.cwiseAbs().maxCoeff(&at);
        picks[j] = at;
    }
    return picks;
}

std::vector<Index> unique_in_order(const std::vector<Index>& v)
{
    std::vector<Index> out;
    for (Index x : v)
    {
        if (std::find(out.begin(), out.end(), x) == out.end())
        {
            out.push_back(x);
        }
    }
    return out;
}

std::vector<Complex> unique_in_order(const std::vector<Complex>& v)
{
    std::vector<Complex> out;
    for (const Complex& x : v)
    {
        if (std::find(out.begin(), out.end(), x) == out.end())
        {
            out.push_back(x);
        }
    }
    return out;
}

}  // namespace

double CurResult::residual(const Matrix& mtx) const
{
    return (mtx - C * U * R).norm();
}

CurResult cur_decompose(const Matrix& mtx, Index k)
{
    if (k < 1 || k > std::min(mtx.rows(), mtx.cols()))
    {
        throw ValidationError("cur_decompose: k must lie in [1, min(rows, cols)]");
    }
    Eigen::BDCSVD<Matrix> svd(mtx, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& svals = svd.singularValues();
    if (svals(0) <= 0.0)
    {
        throw NumericalError("cur_decompose: zero matrix");
    }

    CurResult cur;
    const double cutoff = std::numeric_limits<double>::epsilon() *
                          std::max(mtx.rows(), mtx.cols()) * svals(0);
    cur.rank_warning = svals(k - 1) < cutoff;

    cur.row_indices = deim_indices(svd.matrixU().leftCols(k));
    cur.col_indices = deim_indices(svd.matrixV().leftCols(k));

    cur.C.resize(mtx.rows(), k);
    cur.R.resize(k, mtx.cols());
    for (Index t = 0; t < k; t++)
    {
        cur.C.col(t) = mtx.col(cur.col_indices[t]);
        cur.R.row(t) = mtx.row(cur.row_indices[t]);
    }

    // U = C^+ M R^+ via two least-squares solves (no explicit pseudo-inverse):
    // Y = C^+ M, then U^H = (R^H)^+ Y^H.
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod_c(cur.C);
    const Matrix y = cod_c.solve(mtx);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod_r(cur.R.adjoint());
    cur.U = cod_r.solve(y.adjoint()).adjoint();
    return cur;
}

std::pair<std::vector<Complex>, std::vector<Complex>> select_points(
    const LoewnerPencil& pen, Index k, PointMode mode)
{
    if (pen.real)
    {
        throw ValidationError("select_points: needs the pre-realification pencil");
    }
    const Index total = pen.q() + pen.k();
    if (k < 1 || k >= total)
    {
        throw ValidationError(
            "select_points: k must leave at least one residual point (1 <= k < number "
            "of samples)");
    }

    // A CUR of order k can collapse to fewer than k distinct sample points
    // (block rows of one point, merged-alternate halving), so grow the CUR
    // order until the mode yields k usable points. DEIM indices are nested,
    // which keeps earlier picks stable as the order grows.
    const Index max_cur = std::min(pen.L.rows(), pen.L.cols());
    std::vector<Complex> nu;
    for (Index k_cur = std::min(k, max_cur);; k_cur++)
    {
        const CurResult cur = cur_decompose(pen.L, k_cur);

        // Matrix indices to sample points; repeated block hits collapse.
        std::vector<Complex> picked_left, picked_right;
        for (Index row : unique_in_order(cur.row_indices))
        {
            picked_left.push_back(pen.left_nodes[row / pen.p]);
        }
        for (Index col : unique_in_order(cur.col_indices))
        {
            picked_right.push_back(pen.right_nodes[col / pen.m]);
        }
        picked_left = unique_in_order(picked_left);
        picked_right = unique_in_order(picked_right);

        std::vector<Complex> candidates;
        if (mode == PointMode::LeftOnly)
        {
            candidates = picked_left;
        }
        else if (mode == PointMode::RightOnly)
        {
            candidates = picked_right;
        }
        else
        {
            // Concatenate right (lambda) then left (mu), sort by (Im, Re),
            // keep every other entry starting at index 0.
            std::vector<Complex> merged = picked_right;
            merged.insert(merged.end(), picked_left.begin(), picked_left.end());
            merged = unique_in_order(merged);
            std::sort(merged.begin(), merged.end(), [](Complex a, Complex b) {
                return std::make_pair(a.imag(), a.real()) <
                       std::make_pair(b.imag(), b.real());
            });
            for (size_t t = 0; t < merged.size(); t += 2)
            {
                candidates.push_back(merged[t]);
            }
        }

        nu.clear();
        if (pen.conjugate_paired)
        {
            // Work with upper-half representatives and mirror pairs into nu,
            // keeping pairs adjacent for later realification.
            std::vector<Complex> reps;
            for (const Complex& c : candidates)
            {
                reps.push_back(c.imag() < 0.0 ? std::conj(c) : c);
            }
            reps = unique_in_order(reps);
            for (const Complex& rep : reps)
            {
                const Index slots = (rep.imag() == 0.0) ? 1 : 2;
                if (static_cast<Index>(nu.size()) + slots > k)
                {
                    continue;  // a real point later in the list may still fit
                }
                nu.push_back(rep);
                if (slots == 2)
                {
                    nu.push_back(std::conj(rep));
                }
            }
        }
        else
        {
            for (const Complex& c : candidates)
            {
                if (static_cast<Index>(nu.size()) == k)
                {
                    break;
                }
                nu.push_back(c);
            }
        }
        if (static_cast<Index>(nu.size()) == k || k_cur >= max_cur)
        {
            break;
        }
    }
    if (static_cast<Index>(nu.size()) < k)
    {
        std::ostringstream msg;
        msg << "select_points: only " << nu.size() << " usable interpolation points for "
            << "k = " << k << " after deduplication";
        throw ValidationError(msg.str());
    }

    std::vector<Complex> chi;
    auto in_nu = [&](const Complex& s) {
        return std::find(nu.begin(), nu.end(), s) != nu.end();
    };
    for (const Complex& s : pen.left_nodes)
    {
        if (!in_nu(s))
        {
            chi.push_back(s);
        }
    }
    for (const Complex& s : pen.right_nodes)
    {
        if (!in_nu(s))
        {
            chi.push_back(s);
        }
    }
    return {std::move(nu), std::move(chi)};
}

std::vector<Matrix> mimo_ls_weights(const std::vector<Complex>& nodes,
                                    const std::vector<Matrix>& node_values,
                                    const std::vector<Complex>& residual_points,
                                    const std::vector<Matrix>& residual_values,
                                    bool* rank_deficient)
{
    const Index k = static_cast<Index>(nodes.size());
    const Index nr = static_cast<Index>(residual_points.size());
    if (k < 1 || node_values.size() != nodes.size())
    {
        throw ValidationError("mimo_ls_weights: empty or inconsistent node data");
    }
    if (nr < 1 || residual_values.size() != residual_points.size())
    {
        throw ValidationError("mimo_ls_weights: empty or inconsistent residual data");
    }
    const Index p = node_values[0].rows();
    const Index m = node_values[0].cols();
    for (const Matrix& blk : node_values)
    {
        if (blk.rows() != p || blk.cols() != m)
        {
            throw ValidationError("mimo_ls_weights: inconsistent node value shapes");
        }
    }
    for (const Matrix& blk : residual_values)
    {
        if (blk.rows() != p || blk.cols() != m)
        {
            throw ValidationError("mimo_ls_weights: inconsistent residual value shapes");
        }
    }

    Matrix loewner(nr * p, k * m);
    Matrix rhs(nr * p, m);
    for (Index j = 0; j < nr; j++)
    {
        rhs.middleRows(j * p, p) = -residual_values[j];
        for (Index i = 0; i < k; i++)
        {
            const Complex gap = residual_points[j] - nodes[i];
            if (gap == Complex(0.0))
            {
                throw NumericalError("mimo_ls_weights: residual point equals a node");
            }
            loewner.block(j * p, i * m, p, m) =
                (residual_values[j] - node_values[i]) / gap;
        }
    }

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(loewner);
    const Matrix omega = cod.solve(rhs);
    if (rank_deficient != nullptr)
    {
        *rank_deficient = cod.rank() < k * m;
    }

    std::vector<Matrix> weights(k);
    for (Index i = 0; i < k; i++)
    {
        weights[i] = omega.middleRows(i * m, m);
    }
    return weights;
}

LsLoewnerResult ls_loewner_fit(const FrequencyDataset& d, Index k, PointMode mode)
{
    d.validate();
    if (k < 1 || k >= d.size())
    {
        throw ValidationError("ls_loewner_fit: need 1 <= k < number of samples");
    }

    const Partition part = partition(d, PartitionScheme::Alternate);
    const LoewnerPencil pen = build_pencil(part);

    LsLoewnerResult out;
    std::tie(out.nu, out.chi) = select_points(pen, k, mode);

    std::map<std::pair<double, double>, Index> where;
    for (Index i = 0; i < d.size(); i++)
    {
        where[{d.points[i].real(), d.points[i].imag()}] = i;
    }
    auto values_at = [&](const std::vector<Complex>& pts) {
        std::vector<Matrix> vals;
        vals.reserve(pts.size());
        for (const Complex& s : pts)
        {
            vals.push_back(d.values[where.at({s.real(), s.imag()})]);
        }
        return vals;
    };
    const std::vector<Matrix> nu_values = values_at(out.nu);
    const std::vector<Matrix> chi_values = values_at(out.chi);

    out.model.form = BarycentricForm::StrictlyProper;
    out.model.nodes = out.nu;
    out.model.node_values = nu_values;
    out.model.weights =
        mimo_ls_weights(out.nu, nu_values, out.chi, chi_values, &out.rank_deficient);
    out.model.validate();
    return out;
}

}  // namespace freqfit
