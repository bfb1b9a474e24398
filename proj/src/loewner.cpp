// SPDX-License-Identifier: Apache-2.0

#include "freqfit/loewner.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "freqfit/errors.hpp"

namespace freqfit
{

namespace
{

bool is_adjacent_paired(const std::vector<Complex>& nodes)
{
    if (nodes.size() % 2 != 0)
    {
        return false;
    }
    for (size_t t = 0; t + 1 < nodes.size(); t += 2)
    {
        if (nodes[t].imag() == 0.0 || nodes[t + 1] != std::conj(nodes[t]))
        {
            return false;
        }
    }
    return true;
}

void check_distinct(const std::vector<Complex>& nodes, const char* side)
{
    for (size_t i = 0; i < nodes.size(); i++)
    {
        for (size_t j = i + 1; j < nodes.size(); j++)
        {
            if (nodes[i] == nodes[j])
            {
                throw ValidationError(std::string("Partition: duplicate ") + side +
                                      " node at index " + std::to_string(j));
            }
        }
    }
}

// V (1_k^T (x) I_m): the left value stack tiled k times horizontally.
Matrix tile_right(const Matrix& v, Index k)
{
    Matrix out(v.rows(), v.cols() * k);
    for (Index j = 0; j < k; j++)
    {
        out.middleCols(j * v.cols(), v.cols()) = v;
    }
    return out;
}

// (1_q (x) I_p) W: the right value row tiled q times vertically.
Matrix tile_down(const Matrix& w, Index q)
{
    Matrix out(w.rows() * q, w.cols());
    for (Index i = 0; i < q; i++)
    {
        out.middleRows(i * w.rows(), w.rows()) = w;
    }
    return out;
}

Matrix scale_row_blocks(const Matrix& mat, const std::vector<Complex>& factors, Index p)
{
    Matrix out = mat;
    for (size_t i = 0; i < factors.size(); i++)
    {
        out.middleRows(static_cast<Index>(i) * p, p) *= factors[i];
    }
    return out;
}

Matrix scale_col_blocks(const Matrix& mat, const std::vector<Complex>& factors, Index m)
{
    Matrix out = mat;
    for (size_t j = 0; j < factors.size(); j++)
    {
        out.middleCols(static_cast<Index>(j) * m, m) *= factors[j];
    }
    return out;
}

double max_abs(const std::vector<Complex>& v)
{
    double best = 0.0;
    for (const Complex& z : v)
    {
        best = std::max(best, std::abs(z));
    }
    return best;
}

struct Svd
{
    RealVector svals;
    Matrix left;   // thin U
    Matrix right;  // thin V
};

// SVD that keeps real pencils on an all-real code path, so truncated factors
// carry no stray imaginary phases.
Svd compute_svd(const Matrix& mat, bool real)
{
    Svd out;
    if (real)
    {
        Eigen::BDCSVD<RealMatrix> svd(mat.real(),
                                      Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.svals = svd.singularValues();
        out.left = svd.matrixU().cast<Complex>();
        out.right = svd.matrixV().cast<Complex>();
    }
    else
    {
        Eigen::BDCSVD<Matrix> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.svals = svd.singularValues();
        out.left = svd.matrixU();
        out.right = svd.matrixV();
    }
    return out;
}

Index count_above(const RealVector& svals, double cutoff)
{
    Index n = 0;
    for (Index i = 0; i < svals.size(); i++)
    {
        if (svals(i) >= cutoff)
        {
            n++;
        }
    }
    return n;
}

}  // namespace

void Partition::validate() const
{
    if (m < 1 || p < 1)
    {
        throw ValidationError("Partition: m and p must be positive");
    }
    if (left_nodes.empty() || right_nodes.empty())
    {
        throw ValidationError("Partition: both sides must be nonempty");
    }
    if (left_values.size() != left_nodes.size() ||
        right_values.size() != right_nodes.size())
    {
        throw ValidationError("Partition: node/value count mismatch");
    }
    for (const Matrix& v : left_values)
    {
        if (v.rows() != p || v.cols() != m)
        {
            throw ValidationError("Partition: left value block shape mismatch");
        }
    }
    for (const Matrix& w : right_values)
    {
        if (w.rows() != p || w.cols() != m)
        {
            throw ValidationError("Partition: right value block shape mismatch");
        }
    }
    check_distinct(left_nodes, "left");
    check_distinct(right_nodes, "right");
    for (const Complex& mu : left_nodes)
    {
        for (const Complex& lam : right_nodes)
        {
            if (mu == lam)
            {
                throw ValidationError("Partition: sides are not disjoint");
            }
        }
    }
}

Partition partition(const FrequencyDataset& d, PartitionScheme scheme,
                    const std::vector<Index>& custom_left)
{
    d.validate();
    if (d.size() < 2)
    {
        throw ValidationError("partition: need at least 2 samples");
    }

    Partition part;
    part.m = d.m;
    part.p = d.p;
    auto push = [&](bool left, Index i) {
        if (left)
        {
            part.left_nodes.push_back(d.points[i]);
            part.left_values.push_back(d.values[i]);
        }
        else
        {
            part.right_nodes.push_back(d.points[i]);
            part.right_values.push_back(d.values[i]);
        }
    };

    if (scheme == PartitionScheme::Custom)
    {
        std::vector<bool> is_left(d.size(), false);
        for (Index i : custom_left)
        {
            if (i < 0 || i >= d.size())
            {
                throw ValidationError("partition: custom index out of range");
            }
            if (is_left[i])
            {
                throw ValidationError("partition: custom indices overlap");
            }
            is_left[i] = true;
        }
        for (Index i : custom_left)
        {
            push(true, i);
        }
        for (Index i = 0; i < d.size(); i++)
        {
            if (!is_left[i])
            {
                push(false, i);
            }
        }
    }
    else if (scheme == PartitionScheme::HalfHalf)
    {
        const Index cut = (d.size() + 1) / 2;  // left gets the extra
        for (Index i = 0; i < d.size(); i++)
        {
            push(i < cut, i);
        }
    }
    else if (d.conjugate_closed)
    {
        // Conjugate pairs travel as one unit, upper-half point first, units
        // alternating left/right starting left.
        const std::vector<Index> partner = d.partner_indices();
        std::vector<bool> seen(d.size(), false);
        bool left = true;
        for (Index i = 0; i < d.size(); i++)
        {
            if (seen[i])
            {
                continue;
            }
            seen[i] = true;
            if (d.points[i].imag() == 0.0)
            {
                push(left, i);
            }
            else
            {
                const Index j = partner[i];
                seen[j] = true;
                const Index upper = (d.points[i].imag() > 0.0) ? i : j;
                const Index lower = (upper == i) ? j : i;
                push(left, upper);
                push(left, lower);
            }
            left = !left;
        }
    }
    else
    {
        for (Index i = 0; i < d.size(); i++)
        {
            push(i % 2 == 0, i);
        }
    }

    part.conjugate_paired =
        is_adjacent_paired(part.left_nodes) && is_adjacent_paired(part.right_nodes);
    part.validate();
    return part;
}

LoewnerPencil build_pencil(const Partition& part)
{
    part.validate();
    const Index q = part.q(), k = part.k(), m = part.m, p = part.p;

    LoewnerPencil pen;
    pen.m = m;
    pen.p = p;
    pen.left_nodes = part.left_nodes;
    pen.right_nodes = part.right_nodes;
    pen.conjugate_paired = part.conjugate_paired;
    pen.L.resize(q * p, k * m);
    pen.Ls.resize(q * p, k * m);
    pen.V.resize(q * p, m);
    pen.W.resize(p, k * m);

    for (Index i = 0; i < q; i++)
    {
        pen.V.middleRows(i * p, p) = part.left_values[i];
    }
    for (Index j = 0; j < k; j++)
    {
        pen.W.middleCols(j * m, m) = part.right_values[j];
    }
    for (Index i = 0; i < q; i++)
    {
        const Complex mu = part.left_nodes[i];
        for (Index j = 0; j < k; j++)
        {
            const Complex lam = part.right_nodes[j];
            const Complex gap = mu - lam;
            if (gap == Complex(0.0))
            {
                std::ostringstream msg;
                msg << "build_pencil: left node " << i << " equals right node " << j
                    << " (" << mu << ")";
                throw NumericalError(msg.str());
            }
            pen.L.block(i * p, j * m, p, m) =
                (part.left_values[i] - part.right_values[j]) / gap;
            pen.Ls.block(i * p, j * m, p, m) =
                (mu * part.left_values[i] - lam * part.right_values[j]) / gap;
        }
    }
    return pen;
}

double SylvesterResiduals::max() const
{
    return std::max({difference, shifted_right, shifted_left});
}

SylvesterResiduals sylvester_residuals(const LoewnerPencil& pen)
{
    if (pen.real)
    {
        throw ValidationError(
            "sylvester_residuals: identities are stated for the diagonal node form; "
            "check before realifying");
    }
    const Matrix ml = scale_row_blocks(pen.L, pen.left_nodes, pen.p);
    const Matrix ll = scale_col_blocks(pen.L, pen.right_nodes, pen.m);
    const Matrix v1 = tile_right(pen.V, pen.k());
    const Matrix w1 = tile_down(pen.W, pen.q());

    const double norm_l = pen.L.norm();
    const double norm_v = pen.V.norm();
    const double norm_w = pen.W.norm();
    const double mu_max = max_abs(pen.left_nodes);
    const double lam_max = max_abs(pen.right_nodes);

    SylvesterResiduals res;
    res.difference = (ml - ll - v1 + w1).norm() / (norm_l * mu_max + norm_v);
    res.shifted_right = (pen.Ls - ll - v1).norm() / (norm_l * lam_max + norm_v);
    res.shifted_left = (pen.Ls - ml - w1).norm() / (norm_l * mu_max + norm_w);
    return res;
}

LoewnerPencil realify_pencil(const LoewnerPencil& pen, double tol)
{
    if (pen.real)
    {
        return pen;
    }
    if (!pen.conjugate_paired)
    {
        throw ValidationError(
            "realify_pencil: both node sets must hold adjacent conjugate pairs");
    }
    const Matrix jl = pairing_transform(pen.q(), pen.p);
    const Matrix jr = pairing_transform(pen.k(), pen.m);

    LoewnerPencil out = pen;
    out.L = jl * pen.L * jr.adjoint();
    out.Ls = jl * pen.Ls * jr.adjoint();
    out.V = jl * pen.V;
    out.W = pen.W * jr.adjoint();

    for (const Matrix* mat : {&out.L, &out.Ls, &out.V, &out.W})
    {
        const double residue = mat->imag().cwiseAbs().maxCoeff();
        if (!(residue <= tol * (1.0 + mat->cwiseAbs().maxCoeff())))
        {
            std::ostringstream msg;
            msg << "realify_pencil: imaginary residue " << residue
                << "; data is not conjugate-consistent";
            throw NumericalError(msg.str());
        }
    }
    out.L = out.L.real().cast<Complex>();
    out.Ls = out.Ls.real().cast<Complex>();
    out.V = out.V.real().cast<Complex>();
    out.W = out.W.real().cast<Complex>();
    out.real = true;
    return out;
}

StateSpaceModel unprocessed_model(const LoewnerPencil& pen)
{
    if (pen.L.rows() != pen.L.cols())
    {
        throw ValidationError("unprocessed_model: pencil must be square (qp = km)");
    }
    // Regularity probe: sL - Ls must be invertible somewhere. Three spread-out
    // test points off both node sets are enough to catch a singular pencil.
    const double scale =
        std::max(1.0, std::max(max_abs(pen.left_nodes), max_abs(pen.right_nodes)));
    const Complex probes[] = {Complex(0.31, 0.74) * scale, Complex(-0.52, 1.93) * scale,
                              Complex(1.77, -0.29) * scale};
    bool regular = false;
    for (const Complex& s : probes)
    {
        Eigen::PartialPivLU<Matrix> lu(s * pen.L - pen.Ls);
        if (lu.rcond() > std::numeric_limits<double>::epsilon())
        {
            regular = true;
            break;
        }
    }
    if (!regular)
    {
        throw NumericalError(
            "unprocessed_model: singular Loewner pencil; reduce with SVD truncation "
            "instead");
    }

    StateSpaceModel mdl;
    mdl.E = -pen.L;
    mdl.A = -pen.Ls;
    mdl.B = pen.V;
    mdl.C = pen.W;
    mdl.real = pen.real;
    return mdl;
}

TruncationRule TruncationRule::order(Index r)
{
    if (r < 1)
    {
        throw ValidationError("TruncationRule: order must be at least 1");
    }
    TruncationRule rule;
    rule.r = r;
    return rule;
}

TruncationRule TruncationRule::tolerance(double tol)
{
    if (!(tol > 0.0) || tol >= 1.0)
    {
        throw ValidationError("TruncationRule: tolerance must lie in (0, 1)");
    }
    TruncationRule rule;
    rule.tol = tol;
    return rule;
}

LoewnerReduction truncated_model(const LoewnerPencil& pen, TruncationRule rule)
{
    const bool by_order = rule.r >= 1;
    const bool by_tol = rule.tol > 0.0;
    if (by_order == by_tol)
    {
        throw ValidationError("truncated_model: give exactly one of order r or tol");
    }

    Matrix row_cat(pen.L.rows(), 2 * pen.L.cols());
    row_cat << pen.L, pen.Ls;
    Matrix col_cat(2 * pen.L.rows(), pen.L.cols());
    col_cat << pen.L, pen.Ls;

    const Svd row_svd = compute_svd(row_cat, pen.real);
    const Svd col_svd = compute_svd(col_cat, pen.real);

    LoewnerReduction red;
    red.svals_row = row_svd.svals;
    red.svals_col = col_svd.svals;
    const double sigma_max = std::max(row_svd.svals(0), col_svd.svals(0));
    if (sigma_max <= 0.0)
    {
        throw NumericalError("truncated_model: zero pencil has no reducible content");
    }

    // Numerical rank at machine precision bounds any order request.
    const double eps_cut = std::numeric_limits<double>::epsilon() *
                           std::max(row_cat.rows(), row_cat.cols());
    const Index max_rank =
        std::min(count_above(row_svd.svals, eps_cut * row_svd.svals(0)),
                 count_above(col_svd.svals, eps_cut * col_svd.svals(0)));

    if (by_tol)
    {
        const Index r1 = count_above(row_svd.svals, rule.tol * row_svd.svals(0));
        const Index r2 = count_above(col_svd.svals, rule.tol * col_svd.svals(0));
        red.rank = std::min(r1, r2);
        if (r1 != r2)
        {
            std::ostringstream msg;
            msg << "row/column spectra disagree at tol (" << r1 << " vs " << r2
                << "); keeping the smaller rank";
            red.note = msg.str();
        }
    }
    else
    {
        red.rank = rule.r;
        if (red.rank > max_rank)
        {
            std::ostringstream msg;
            msg << "requested order " << rule.r << " exceeds the numerical rank "
                << max_rank << "; clamped";
            red.note = msg.str();
            red.clamped = true;
            red.rank = max_rank;
        }
    }
    if (red.rank < 1)
    {
        throw NumericalError("truncated_model: selected rank is zero");
    }

    const Matrix x = row_svd.left.leftCols(red.rank);
    const Matrix y = col_svd.right.leftCols(red.rank);
    red.model.E = -(x.adjoint() * pen.L * y);
    red.model.A = -(x.adjoint() * pen.Ls * y);
    red.model.B = x.adjoint() * pen.V;
    red.model.C = pen.W * y;
    red.model.real = pen.real;
    return red;
}

}  // namespace freqfit
