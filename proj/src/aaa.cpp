// SPDX-License-Identifier: Apache-2.0

#include "freqfit/aaa.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "freqfit/errors.hpp"

namespace freqfit
{

namespace
{

struct GreedyState
{
    std::vector<Complex> z;  // all sample points
    std::vector<Complex> f;  // all sample values
    std::vector<Index> support;    // indices into z, pair-adjacent
    std::vector<Index> remaining;  // indices not yet consumed
    Vector weights;                // one scalar per support point
    Complex mean = 0.0;
    double denom = 1.0;  // error scale (1 for absolute)
};

Complex approximant(const GreedyState& st, AaaVariant variant, Index t)
{
    if (st.support.empty())
    {
        return st.mean;
    }
    Complex num = 0.0;
    Complex den = (variant == AaaVariant::StrictlyProper) ? 1.0 : 0.0;
    for (size_t i = 0; i < st.support.size(); i++)
    {
        const Index s = st.support[i];
        const Complex c = st.weights(static_cast<Index>(i)) / (st.z[t] - st.z[s]);
        num += st.f[s] * c;
        den += c;
    }
    return num / den;
}

// Max error over the remaining points; the argmax breaks ties toward the
// smallest sample index.
std::pair<double, Index> worst_point(const GreedyState& st, AaaVariant variant)
{
    double worst = -1.0;
    Index at = -1;
    for (Index t : st.remaining)
    {
        const double err = std::abs(st.f[t] - approximant(st, variant, t)) / st.denom;
        if (err > worst)
        {
            worst = err;
            at = t;
        }
    }
    return {worst, at};
}

void consume(GreedyState& st, Index t)
{
    st.support.push_back(t);
    st.remaining.erase(std::find(st.remaining.begin(), st.remaining.end(), t));
}

}  // namespace

void AaaConfig::validate() const
{
    if (!(tol > 0.0))
    {
        throw ValidationError("AaaConfig: tolerance must be positive");
    }
    if (max_order < 1)
    {
        throw ValidationError("AaaConfig: max_order must be at least 1");
    }
}

AaaResult aaa_fit(const FrequencyDataset& d, const AaaConfig& cfg)
{
    d.validate();
    cfg.validate();
    if (!d.siso())
    {
        throw ValidationError("aaa_fit: SISO data required (use ls_loewner_fit for MIMO)");
    }
    const Index n = d.size();
    if (n < 2)
    {
        throw ValidationError("aaa_fit: need at least 2 samples");
    }

    GreedyState st;
    st.z = d.points;
    st.f.reserve(n);
    for (const Matrix& val : d.values)
    {
        st.f.push_back(val(0, 0));
    }
    st.remaining.resize(n);
    for (Index t = 0; t < n; t++)
    {
        st.remaining[t] = t;
        st.mean += st.f[t];
    }
    st.mean /= double(n);

    if (cfg.error_kind == ErrorKind::Relative)
    {
        double fmax = 0.0;
        for (const Complex& v : st.f)
        {
            fmax = std::max(fmax, std::abs(v));
        }
        st.denom = std::max(fmax, std::numeric_limits<double>::min());
    }

    bool pairs = cfg.pairs == PairMode::On;
    if (cfg.pairs == PairMode::Auto)
    {
        pairs = std::all_of(st.z.begin(), st.z.end(),
                            [](Complex s) { return s.real() == 0.0; });
    }

    AaaResult out;
    bool converged = false;
    while (true)
    {
        // The selected point is the argmax, so the convergence test on it
        // coincides with testing the max error before this iteration.
        auto [err, pick] = worst_point(st, cfg.variant);
        out.error_history.push_back(err);
        if (err <= cfg.tol)
        {
            converged = true;
            break;
        }
        if (static_cast<Index>(st.support.size()) >= cfg.max_order)
        {
            break;
        }
        Index partner = -1;
        if (pairs && st.z[pick].imag() != 0.0)
        {
            const Complex want = std::conj(st.z[pick]);
            for (Index t : st.remaining)
            {
                if (t != pick && st.z[t] == want)
                {
                    partner = t;
                    break;
                }
            }
        }
        // Keep at least one residual point for the weight solve.
        const Index need = (partner >= 0) ? 2 : 1;
        if (static_cast<Index>(st.remaining.size()) - need < 1)
        {
            break;
        }
        consume(st, pick);
        if (partner >= 0)
        {
            consume(st, partner);
        }

        const Index ns = static_cast<Index>(st.support.size());
        const Index nr = static_cast<Index>(st.remaining.size());
        Matrix loewner(nr, ns);
        for (Index row = 0; row < nr; row++)
        {
            const Index t = st.remaining[row];
            for (Index colm = 0; colm < ns; colm++)
            {
                const Index s = st.support[colm];
                loewner(row, colm) = (st.f[t] - st.f[s]) / (st.z[t] - st.z[s]);
            }
        }
        if (cfg.variant == AaaVariant::Classic)
        {
            // Smallest right singular vector; full V covers the wide case.
            Eigen::JacobiSVD<Matrix> svd(loewner, Eigen::ComputeFullV);
            st.weights = svd.matrixV().col(ns - 1);
        }
        else
        {
            Vector rhs(nr);
            for (Index row = 0; row < nr; row++)
            {
                rhs(row) = -st.f[st.remaining[row]];
            }
            Eigen::CompleteOrthogonalDecomposition<Matrix> cod(loewner);
            st.weights = cod.solve(rhs);
            if (cod.rank() < ns)
            {
                out.rank_deficient = true;
            }
        }
    }

    out.converged = converged;
    out.support_indices = st.support;
    out.model.form = (cfg.variant == AaaVariant::StrictlyProper && !st.support.empty())
                         ? BarycentricForm::StrictlyProper
                         : BarycentricForm::Proper;
    out.model.constant = st.mean;
    for (size_t i = 0; i < st.support.size(); i++)
    {
        const Index s = st.support[i];
        out.model.nodes.push_back(st.z[s]);
        out.model.node_values.push_back(Matrix::Constant(1, 1, st.f[s]));
        out.model.weights.push_back(
            Matrix::Constant(1, 1, st.weights(static_cast<Index>(i))));
    }
    out.model.validate();
    return out;
}

AaaResult aaa_fit_strictly_proper(const FrequencyDataset& d, AaaConfig cfg)
{
    cfg.variant = AaaVariant::StrictlyProper;
    return aaa_fit(d, cfg);
}

}  // namespace freqfit
