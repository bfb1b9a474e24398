// SPDX-License-Identifier: Apache-2.0

#include "freqfit/pole_placement.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "freqfit/eig.hpp"
#include "freqfit/errors.hpp"

namespace freqfit
{

namespace
{

void check_distinct(const std::vector<Complex>& v, const char* what)
{
    for (size_t i = 0; i < v.size(); i++)
    {
        for (size_t j = i + 1; j < v.size(); j++)
        {
            if (v[i] == v[j])
            {
                throw ValidationError(std::string("place_poles: duplicate ") + what +
                                      " at index " + std::to_string(j));
            }
        }
    }
}

bool close_to(Complex a, Complex b, double tol = 1e-8)
{
    return std::abs(a - b) <= tol * (1.0 + std::abs(b));
}

// Complex generalized eigenvalues of a reduced surrogate, finite and
// optionally stable only.
std::vector<Complex> finite_eigenvalues(const StateSpaceModel& mdl, bool stable_only)
{
    const GeneralizedEig eig =
        generalized_eig(mdl.A, mdl.identity_E() ? Matrix() : mdl.E, false, false);
    std::vector<Complex> out;
    for (Index i = 0; i < eig.alpha.size(); i++)
    {
        if (!eig.finite(i))
        {
            continue;
        }
        const Complex lam = eig.eigenvalue(i);
        if (stable_only && lam.real() >= 0.0)
        {
            continue;
        }
        out.push_back(lam);
    }
    return out;
}

struct SampleLookup
{
    std::map<std::pair<double, double>, Index> where;

    explicit SampleLookup(const FrequencyDataset& d)
    {
        for (Index i = 0; i < d.size(); i++)
        {
            where[{d.points[i].real(), d.points[i].imag()}] = i;
        }
    }

    Index at(Complex s) const { return where.at({s.real(), s.imag()}); }
};

std::vector<Complex> scalar_values(const FrequencyDataset& d,
                                   const std::vector<Complex>& points)
{
    const SampleLookup lookup(d);
    std::vector<Complex> vals;
    vals.reserve(points.size());
    for (const Complex& s : points)
    {
        vals.push_back(d.values[lookup.at(s)](0, 0));
    }
    return vals;
}

// Poles in Modified mode: for each marked peak frequency, the surrogate
// eigenvalue whose imaginary part is nearest (in magnitude for paired data);
// an eigenvalue already taken falls through to the next-closest.
std::vector<Complex> peak_matched_poles(const std::vector<Complex>& eigs,
                                        const std::vector<double>& peaks, bool paired)
{
    std::vector<Complex> pool = eigs;
    if (paired)
    {
        // Collapse conjugate twins to upper-half representatives.
        std::vector<Complex> reps;
        for (const Complex& lam : pool)
        {
            const Complex rep = (lam.imag() < 0.0) ? std::conj(lam) : lam;
            bool seen = false;
            for (const Complex& r : reps)
            {
                if (close_to(rep, r))
                {
                    seen = true;
                    break;
                }
            }
            if (!seen)
            {
                reps.push_back(rep);
            }
        }
        pool = std::move(reps);
    }

    std::vector<Complex> chosen;
    for (double peak : peaks)
    {
        const double want = std::abs(peak);
        Index best = -1;
        double dist = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < pool.size(); i++)
        {
            const double di = std::abs(std::abs(pool[i].imag()) - want);
            if (di < dist)
            {
                dist = di;
                best = static_cast<Index>(i);
            }
        }
        if (best < 0)
        {
            std::ostringstream msg;
            msg << "lfapp_fit: only " << chosen.size() << " surrogate eigenvalues "
                << "available for " << peaks.size() << " marked peaks";
            throw NumericalError(msg.str());
        }
        chosen.push_back(pool[best]);
        pool.erase(pool.begin() + best);
    }
    return chosen;
}

// Nodes in Modified mode: the minimum-|H| sample strictly between consecutive
// pole frequencies, then past the last one, falling back to below the first.
std::vector<Complex> min_amplitude_nodes(const FrequencyDataset& d,
                                         const std::vector<double>& pole_freqs,
                                         Index count, bool paired)
{
    std::vector<double> freqs = pole_freqs;
    std::sort(freqs.begin(), freqs.end());

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, double>> regions;
    for (size_t t = 0; t + 1 < freqs.size(); t++)
    {
        regions.push_back({freqs[t], freqs[t + 1]});
    }
    regions.push_back({freqs.back(), inf});
    regions.push_back({paired ? 0.0 : -inf, freqs.front()});  // fallback region

    std::vector<bool> taken(d.size(), false);
    auto pick_in = [&](double lo, double hi) -> Index {
        Index best = -1;
        double amp = inf;
        for (Index i = 0; i < d.size(); i++)
        {
            const double im = d.points[i].imag();
            // Paired data is represented by its upper-half samples only.
            if (taken[i] || (paired && im <= 0.0) || im <= lo || im >= hi)
            {
                continue;
            }
            const double a = d.values[i].norm();
            if (a < amp)
            {
                amp = a;
                best = i;
            }
        }
        return best;
    };

    // One pick per region in order; when regions run dry before `count`,
    // sweep again so a crowded region may contribute its next-lowest sample.
    std::vector<Complex> nodes;
    while (static_cast<Index>(nodes.size()) < count)
    {
        bool progressed = false;
        for (const auto& [lo, hi] : regions)
        {
            if (static_cast<Index>(nodes.size()) == count)
            {
                break;
            }
            const Index pick = pick_in(lo, hi);
            if (pick >= 0)
            {
                taken[pick] = true;
                nodes.push_back(d.points[pick]);
                progressed = true;
            }
        }
        if (!progressed)
        {
            std::ostringstream msg;
            msg << "lfapp_fit: found only " << nodes.size() << " usable low-amplitude "
                << "samples between pole frequencies, need " << count;
            throw NumericalError(msg.str());
        }
    }
    return nodes;
}

}  // namespace

PolePlacementResult place_poles(const std::vector<Complex>& nodes,
                                const std::vector<Complex>& node_values,
                                const std::vector<Complex>& poles)
{
    const Index k = static_cast<Index>(nodes.size());
    if (k < 1 || node_values.size() != nodes.size() || poles.size() != nodes.size())
    {
        throw ValidationError(
            "place_poles: nodes, values and poles must have equal positive length");
    }
    check_distinct(nodes, "node");
    check_distinct(poles, "pole");
    for (const Complex& z : poles)
    {
        for (const Complex& lam : nodes)
        {
            if (z == lam)
            {
                std::ostringstream msg;
                msg << "place_poles: pole " << z << " coincides with a node";
                throw ValidationError(msg.str());
            }
        }
    }

    Matrix cauchy(k, k);
    for (Index i = 0; i < k; i++)
    {
        for (Index j = 0; j < k; j++)
        {
            cauchy(i, j) = 1.0 / (poles[i] - nodes[j]);
        }
    }
    Eigen::PartialPivLU<Matrix> lu(cauchy);
    const double rc = lu.rcond();
    if (!(rc > 1.0 / kMaxEvalCondition))
    {
        std::ostringstream msg;
        msg << "place_poles: Cauchy matrix condition estimate "
            << (rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity())
            << " exceeds " << kMaxEvalCondition
            << "; poles and nodes are too close or too clustered";
        throw NumericalError(msg.str());
    }
    const Vector bhat = lu.solve(-Vector::Ones(k));

    PolePlacementResult out;
    out.cauchy_condition = 1.0 / rc;
    out.model.form = BarycentricForm::StrictlyProper;
    out.model.nodes = nodes;
    for (Index i = 0; i < k; i++)
    {
        out.model.node_values.push_back(Matrix::Constant(1, 1, node_values[i]));
        out.model.weights.push_back(Matrix::Constant(1, 1, bhat(i)));
    }
    out.model.validate();
    return out;
}

DominanceTable dominance(const StateSpaceModel& mdl)
{
    mdl.validate();
    const GeneralizedEig eig =
        generalized_eig(mdl.A, mdl.identity_E() ? Matrix() : mdl.E, true, true);

    DominanceTable table;
    for (Index i = 0; i < eig.alpha.size(); i++)
    {
        if (!eig.finite(i))
        {
            table.infinite_count++;
            continue;
        }
        const Complex lam = eig.eigenvalue(i);
        if (std::abs(lam.real()) < 1e-12)
        {
            table.excluded_imaginary.push_back(lam);
            continue;
        }
        const Vector x = eig.right.col(i);
        const Vector y = eig.left.col(i);
        const Complex norm = mdl.identity_E() ? Complex(y.dot(x))
                                              : Complex(y.dot(mdl.E * x));
        if (norm == Complex(0.0))
        {
            throw NumericalError("dominance: defective eigenvalue, y^H E x = 0");
        }
        // Residue with y^H E x = 1 enforced through the explicit divisor.
        const double residue =
            (mdl.C * x).norm() * (y.adjoint() * mdl.B).norm() / std::abs(norm);
        DominanceEntry entry;
        entry.eigenvalue = lam;
        entry.dominance = residue * std::abs(lam) / std::abs(lam.real());
        entry.stable = lam.real() < 0.0;
        table.entries.push_back(entry);
    }
    std::stable_sort(table.entries.begin(), table.entries.end(),
                     [](const DominanceEntry& a, const DominanceEntry& b) {
                         return a.dominance > b.dominance;
                     });
    return table;
}

LfappResult lfapp_fit(const FrequencyDataset& d, Index k, const LfappOptions& opts)
{
    d.validate();
    if (!d.siso())
    {
        throw ValidationError("lfapp_fit: SISO data required");
    }
    if (k < 1 || k >= d.size())
    {
        throw ValidationError("lfapp_fit: need 1 <= k < number of samples");
    }

    const Partition part = partition(d, PartitionScheme::Alternate);
    const LoewnerPencil pen = build_pencil(part);
    const LoewnerReduction red = truncated_model(
        pen, opts.surrogate_order > 0 ? TruncationRule::order(opts.surrogate_order)
                                      : TruncationRule::tolerance(opts.svd_tol));
    const bool paired = d.conjugate_closed;

    LfappResult out;
    out.surrogate_rank = red.rank;

    if (opts.mode == LfappMode::Auto)
    {
        const DominanceTable table = dominance(red.model);
        std::vector<Complex> ranked;
        for (const DominanceEntry& entry : table.entries)
        {
            if (!opts.stable_only || entry.stable)
            {
                ranked.push_back(entry.eigenvalue);
            }
        }
        if (paired)
        {
            for (const Complex& lam : ranked)
            {
                // Conjugate twins appear as separate eigenvalues; keep one.
                bool seen = false;
                for (const Complex& z : out.poles)
                {
                    if (close_to(lam, z) || close_to(lam, std::conj(z)))
                    {
                        seen = true;
                        break;
                    }
                }
                if (seen)
                {
                    continue;
                }
                const bool is_real = std::abs(lam.imag()) <= 1e-12 * (1.0 + std::abs(lam));
                const Index slots = is_real ? 1 : 2;
                if (static_cast<Index>(out.poles.size()) + slots > k)
                {
                    continue;
                }
                if (is_real)
                {
                    out.poles.push_back(Complex(lam.real(), 0.0));
                }
                else
                {
                    const Complex rep = (lam.imag() < 0.0) ? std::conj(lam) : lam;
                    out.poles.push_back(rep);
                    out.poles.push_back(std::conj(rep));
                }
            }
        }
        else
        {
            for (const Complex& lam : ranked)
            {
                if (static_cast<Index>(out.poles.size()) == k)
                {
                    break;
                }
                out.poles.push_back(lam);
            }
        }
        if (static_cast<Index>(out.poles.size()) < k)
        {
            std::ostringstream msg;
            msg << "lfapp_fit: only " << out.poles.size() << " usable "
                << (opts.stable_only ? "stable " : "") << "dominant eigenvalues for k = "
                << k;
            throw NumericalError(msg.str());
        }
        out.nodes = select_points(pen, k, opts.point_mode).first;
    }
    else
    {
        if (opts.peaks.empty())
        {
            throw ValidationError("lfapp_fit: Modified mode needs marked peak frequencies");
        }
        const Index per_peak = paired ? 2 : 1;
        if (static_cast<Index>(opts.peaks.size()) * per_peak != k)
        {
            std::ostringstream msg;
            msg << "lfapp_fit: " << opts.peaks.size() << " peaks place "
                << opts.peaks.size() * per_peak << " poles, but k = " << k;
            throw ValidationError(msg.str());
        }
        std::vector<Complex> pool = finite_eigenvalues(red.model, false);
        if (opts.stable_only)
        {
            // Reflect unstable eigenvalues instead of dropping them: under
            // noise the candidate nearest a marked peak may sit marginally in
            // the right half-plane, and the peak still needs a pole there.
            for (Complex& lam : pool)
            {
                if (lam.real() > 0.0)
                {
                    lam = Complex(-lam.real(), lam.imag());
                }
            }
        }
        const std::vector<Complex> reps = peak_matched_poles(pool, opts.peaks, paired);
        std::vector<double> pole_freqs;
        for (const Complex& rep : reps)
        {
            pole_freqs.push_back(std::abs(rep.imag()));
            if (paired)
            {
                out.poles.push_back(rep);
                out.poles.push_back(std::conj(rep));
            }
            else
            {
                out.poles.push_back(rep);
            }
        }
        const std::vector<Complex> picked =
            min_amplitude_nodes(d, pole_freqs, paired ? k / 2 : k, paired);
        for (const Complex& s : picked)
        {
            out.nodes.push_back(s);
            if (paired)
            {
                out.nodes.push_back(std::conj(s));
            }
        }
    }

    PolePlacementResult pp =
        place_poles(out.nodes, scalar_values(d, out.nodes), out.poles);
    out.model = std::move(pp.model);
    out.cauchy_condition = pp.cauchy_condition;
    return out;
}

StateSpaceModel intrusive_pp_oracle(const StateSpaceModel& mdl,
                                    const std::vector<Complex>& nodes,
                                    const std::vector<Complex>& poles)
{
    mdl.validate();
    if (mdl.inputs() != 1 || mdl.outputs() != 1)
    {
        throw ValidationError("intrusive_pp_oracle: SISO models only");
    }
    const Index n = mdl.order();
    const Index k = static_cast<Index>(nodes.size());
    if (k < 1 || poles.size() != nodes.size())
    {
        throw ValidationError("intrusive_pp_oracle: node/pole count mismatch");
    }
    if (k >= n)
    {
        throw ValidationError(
            "intrusive_pp_oracle: k must be below the model order for a null vector "
            "to exist");
    }
    const Matrix e = mdl.descriptor();

    Matrix v(n, k);
    for (Index j = 0; j < k; j++)
    {
        v.col(j) = (nodes[j] * e - mdl.A).partialPivLu().solve(mdl.B.col(0));
    }

    // C_zeta: a left null vector of V, from the trailing left singular vector.
    Eigen::JacobiSVD<Matrix> svd(v, Eigen::ComputeFullU);
    const Vector czeta = svd.matrixU().col(n - 1);
    if ((czeta.adjoint() * v).norm() > 1e-8 * v.norm())
    {
        throw NumericalError("intrusive_pp_oracle: no usable left null vector of V");
    }

    Matrix w(n, k);
    for (Index j = 0; j < k; j++)
    {
        w.col(j) = (poles[j] * e - mdl.A).adjoint().partialPivLu().solve(czeta);
    }

    StateSpaceModel out;
    out.E = w.adjoint() * e * v;
    out.A = w.adjoint() * mdl.A * v;
    out.B = w.adjoint() * mdl.B;
    out.C = mdl.C * v;
    return out;
}

}  // namespace freqfit
