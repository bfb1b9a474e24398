// SPDX-License-Identifier: Apache-2.0

#include "freqfit/metrics.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "freqfit/eig.hpp"
#include "freqfit/errors.hpp"

namespace freqfit
{

namespace
{

using nlohmann::json;

constexpr double kSkipNodeTol = 1e-12;

double two_norm(const Matrix& mat)
{
    if (mat.size() == 1)
    {
        return std::abs(mat(0, 0));
    }
    return Eigen::JacobiSVD<Matrix>(mat).singularValues()(0);
}

std::string fmt17(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::vector<PoleInfo> report_from_eig(const Matrix& a, const Matrix& e)
{
    const GeneralizedEig eig = generalized_eig(a, e, false, false);
    std::vector<PoleInfo> poles;
    for (Index i = 0; i < eig.alpha.size(); i++)
    {
        PoleInfo info;
        if (!eig.finite(i))
        {
            info.infinite = true;
            info.value = Complex(std::numeric_limits<double>::infinity(), 0.0);
        }
        else
        {
            info.value = eig.eigenvalue(i);
            info.stable = info.value.real() < 0.0;
        }
        poles.push_back(info);
    }
    std::stable_sort(poles.begin(), poles.end(), [](const PoleInfo& a_, const PoleInfo& b_) {
        if (a_.infinite != b_.infinite)
        {
            return b_.infinite;
        }
        return std::make_pair(a_.value.imag(), a_.value.real()) <
               std::make_pair(b_.value.imag(), b_.value.real());
    });
    return poles;
}

}  // namespace

Evaluator evaluator(const StateSpaceModel& mdl)
{
    mdl.validate();
    return [mdl](Complex s) { return eval_state_space(mdl, s); };
}

Evaluator evaluator(const BarycentricModel& b)
{
    b.validate();
    return [b](Complex s) { return eval_barycentric(b, s); };
}

double linf_error(const FrequencyDataset& reference, const Evaluator& eval)
{
    reference.validate();
    double worst = 0.0;
    double scale = 0.0;
    for (Index i = 0; i < reference.size(); i++)
    {
        scale = std::max(scale, two_norm(reference.values[i]));
        worst = std::max(
            worst, two_norm(reference.values[i] - eval(reference.points[i])));
    }
    if (scale <= 0.0)
    {
        throw ValidationError("linf_error: reference data is identically zero");
    }
    return worst / scale;
}

std::vector<PointError> pointwise_errors(const FrequencyDataset& reference,
                                         const Evaluator& eval, bool skip_nodes,
                                         const std::vector<Complex>& nodes)
{
    reference.validate();
    double scale = 0.0;
    for (const Matrix& val : reference.values)
    {
        scale = std::max(scale, two_norm(val));
    }
    if (scale <= 0.0)
    {
        throw ValidationError("pointwise_errors: reference data is identically zero");
    }

    std::vector<PointError> out;
    for (Index i = 0; i < reference.size(); i++)
    {
        const Complex s = reference.points[i];
        if (skip_nodes)
        {
            const bool at_node =
                std::any_of(nodes.begin(), nodes.end(), [&](Complex node) {
                    return near_node(s, node, kSkipNodeTol);
                });
            if (at_node)
            {
                continue;
            }
        }
        PointError pe;
        pe.s = s;
        pe.abs_err = two_norm(reference.values[i] - eval(s));
        pe.rel_err = pe.abs_err / scale;
        out.push_back(pe);
    }
    return out;
}

std::vector<PoleInfo> pole_report(const StateSpaceModel& mdl)
{
    mdl.validate();
    return report_from_eig(mdl.A, mdl.identity_E() ? Matrix() : mdl.E);
}

std::vector<PoleInfo> pole_report(const BarycentricModel& b)
{
    b.validate();
    if (b.nodes.empty())
    {
        return {};
    }
    if (b.form == BarycentricForm::StrictlyProper)
    {
        const StateSpaceModel mdl = realize(b);
        return report_from_eig(mdl.A, Matrix());
    }
    // Proper form: poles are the denominator zeros, the finite eigenvalues of
    // the arrowhead pencil [[0, w^T], [1, diag(lambda)]] vs diag(0, I).
    const Index k = b.size();
    Matrix a = Matrix::Zero(k + 1, k + 1);
    Matrix e = Matrix::Identity(k + 1, k + 1);
    e(0, 0) = 0.0;
    for (Index i = 0; i < k; i++)
    {
        a(0, i + 1) = b.weights[i](0, 0);
        a(i + 1, 0) = 1.0;
        a(i + 1, i + 1) = b.nodes[i];
    }
    std::vector<PoleInfo> poles = report_from_eig(a, e);
    // The pencil carries one spurious infinite eigenvalue per construction.
    std::vector<PoleInfo> finite;
    for (const PoleInfo& info : poles)
    {
        if (!info.infinite)
        {
            finite.push_back(info);
        }
    }
    return finite;
}

void FitReport::validate() const
{
    if (!(linf >= 0.0) || !(ref_scale > 0.0))
    {
        throw ValidationError("FitReport: nonpositive scale or negative error");
    }
    double worst = 0.0;
    for (const PointError& pe : errors)
    {
        worst = std::max(worst, pe.rel_err);
    }
    if (std::abs(worst - linf) > 1e-15 * std::max(1.0, linf))
    {
        throw ValidationError("FitReport: linf does not match the pointwise errors");
    }
}

FitReport make_report(const std::string& method, Index order,
                      const FrequencyDataset& reference, const Evaluator& eval,
                      const std::vector<Complex>& nodes)
{
    FitReport rep;
    rep.method = method;
    rep.order = order;
    for (const Matrix& val : reference.values)
    {
        rep.ref_scale = std::max(rep.ref_scale, two_norm(val));
    }
    rep.errors = pointwise_errors(reference, eval, false, nodes);
    for (const PointError& pe : rep.errors)
    {
        rep.linf = std::max(rep.linf, pe.rel_err);
    }
    rep.validate();
    return rep;
}

std::string to_json(const FitReport& rep)
{
    json doc;
    doc["method"] = rep.method;
    doc["order"] = rep.order;
    doc["eps"] = rep.linf;
    doc["ref_scale"] = rep.ref_scale;
    json errors = json::array();
    for (const PointError& pe : rep.errors)
    {
        errors.push_back(json{{"s", {pe.s.real(), pe.s.imag()}},
                              {"abs", pe.abs_err},
                              {"rel", pe.rel_err}});
    }
    doc["errors"] = std::move(errors);
    json poles = json::array();
    for (const PoleInfo& info : rep.poles)
    {
        json entry;
        entry["infinite"] = info.infinite;
        if (!info.infinite)
        {
            entry["re"] = info.value.real();
            entry["im"] = info.value.imag();
            entry["stable"] = info.stable;
        }
        if (info.dominance >= 0.0)
        {
            entry["dominance"] = info.dominance;
        }
        poles.push_back(std::move(entry));
    }
    doc["poles"] = std::move(poles);
    json diag;
    if (rep.svd_row_spectrum.size())
    {
        diag["svd_row"] = std::vector<double>(
            rep.svd_row_spectrum.data(),
            rep.svd_row_spectrum.data() + rep.svd_row_spectrum.size());
        diag["svd_col"] = std::vector<double>(
            rep.svd_col_spectrum.data(),
            rep.svd_col_spectrum.data() + rep.svd_col_spectrum.size());
    }
    if (rep.cauchy_condition >= 0.0)
    {
        diag["cauchy_condition"] = rep.cauchy_condition;
    }
    doc["diagnostics"] = std::move(diag);
    doc["notes"] = rep.notes;
    return doc.dump(2);
}

void save_report(const FitReport& rep, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
    {
        throw FormatError("Cannot open \"" + path + "\" for writing");
    }
    out << to_json(rep) << '\n';
}

void save_report_csv(const FitReport& rep, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
    {
        throw FormatError("Cannot open \"" + path + "\" for writing");
    }
    out << "omega,abs_err,rel_err\n";
    for (const PointError& pe : rep.errors)
    {
        out << fmt17(pe.s.imag()) << ',' << fmt17(pe.abs_err) << ','
            << fmt17(pe.rel_err) << '\n';
    }
}

}  // namespace freqfit
