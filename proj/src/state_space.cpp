// SPDX-License-Identifier: Apache-2.0

#include "freqfit/state_space.hpp"

#include <Eigen/LU>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "freqfit/errors.hpp"

namespace freqfit
{

namespace
{

using nlohmann::json;

json complex_to_json(Complex z)
{
    return json::array({z.real(), z.imag()});
}

json matrix_to_json(const Matrix& mat)
{
    json rows = json::array();
    for (Index i = 0; i < mat.rows(); i++)
    {
        json row = json::array();
        for (Index j = 0; j < mat.cols(); j++)
        {
            row.push_back(complex_to_json(mat(i, j)));
        }
        rows.push_back(row);
    }
    return rows;
}

Complex complex_from_json(const json& entry)
{
    if (entry.is_number())
    {
        return Complex(entry.get<double>(), 0.0);
    }
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
        !entry[1].is_number())
    {
        throw FormatError("Complex entries must be [re, im] pairs or plain numbers");
    }
    return Complex(entry[0].get<double>(), entry[1].get<double>());
}

Matrix matrix_from_json(const json& rows, const std::string& name)
{
    if (!rows.is_array() || rows.empty())
    {
        throw FormatError("Matrix \"" + name + "\" must be a nonempty array of rows");
    }
    const Index nr = static_cast<Index>(rows.size());
    const Index nc = static_cast<Index>(rows[0].size());
    Matrix mat(nr, nc);
    for (Index i = 0; i < nr; i++)
    {
        const json& row = rows[i];
        if (!row.is_array() || static_cast<Index>(row.size()) != nc)
        {
            throw FormatError("Matrix \"" + name + "\" has ragged rows");
        }
        for (Index j = 0; j < nc; j++)
        {
            mat(i, j) = complex_from_json(row[j]);
        }
    }
    return mat;
}

}  // namespace

Matrix StateSpaceModel::descriptor() const
{
    return identity_E() ? Matrix(Matrix::Identity(order(), order())) : E;
}

void StateSpaceModel::validate() const
{
    if (A.rows() != A.cols())
    {
        throw ValidationError("StateSpaceModel: A must be square");
    }
    if (!identity_E() && (E.rows() != A.rows() || E.cols() != A.cols()))
    {
        throw ValidationError("StateSpaceModel: E must match A in size");
    }
    if (B.rows() != A.rows())
    {
        throw ValidationError("StateSpaceModel: B row count must equal the order");
    }
    if (C.cols() != A.rows())
    {
        throw ValidationError("StateSpaceModel: C column count must equal the order");
    }
    if (real)
    {
        const double residue =
            std::max({A.imag().cwiseAbs().maxCoeff(), B.imag().cwiseAbs().maxCoeff(),
                      C.imag().cwiseAbs().maxCoeff(),
                      identity_E() ? 0.0 : E.imag().cwiseAbs().maxCoeff()});
        if (residue != 0.0)
        {
            throw ValidationError("StateSpaceModel flagged real has nonzero imaginary parts");
        }
    }
}

Matrix eval_state_space(const StateSpaceModel& mdl, Complex s)
{
    const Index r = mdl.order();
    Matrix pencil = -mdl.A;
    if (mdl.identity_E())
    {
        pencil.diagonal().array() += s;
    }
    else
    {
        pencil += s * mdl.E;
    }
    Eigen::PartialPivLU<Matrix> lu(pencil);
    const double rc = lu.rcond();
    if (!(rc > 1.0 / kMaxEvalCondition))
    {
        throw EvaluationError("sE - A is singular or ill-conditioned", s);
    }
    return mdl.C * lu.solve(mdl.B);
}

Matrix pairing_transform(Index k, Index m)
{
    if (k % 2 != 0)
    {
        throw ValidationError("pairing_transform: node block count must be even");
    }
    const double rt = 1.0 / std::sqrt(2.0);
    const Complex mi(0.0, -rt);
    Matrix jmat = Matrix::Zero(k * m, k * m);
    for (Index l = 0; l < k / 2; l++)
    {
        const Index a = 2 * l * m, b = a + m;
        for (Index t = 0; t < m; t++)
        {
            jmat(a + t, a + t) = rt;
            jmat(a + t, b + t) = rt;
            jmat(b + t, a + t) = mi;
            jmat(b + t, b + t) = -mi;
        }
    }
    return jmat;
}

StateSpaceModel realify(const StateSpaceModel& mdl, Index block_size,
                        const std::vector<Index>& node_order, double tol)
{
    mdl.validate();
    const Index m = block_size;
    if (m < 1 || mdl.order() % m != 0)
    {
        throw ValidationError("realify: order is not a multiple of the block size");
    }
    const Index k = mdl.order() / m;
    if (k % 2 != 0)
    {
        throw ValidationError("realify: odd node count, conjugate pairing impossible");
    }

    Matrix jmat = pairing_transform(k, m);
    if (!node_order.empty())
    {
        if (static_cast<Index>(node_order.size()) != k)
        {
            throw ValidationError("realify: node_order must list every node block once");
        }
        // Compose with the block permutation P, (Px)_t = x_{node_order[t]}, so
        // column block node_order[t] of J P is column block t of J.
        std::vector<bool> seen(k, false);
        Matrix permuted(k * m, k * m);
        for (Index t = 0; t < k; t++)
        {
            const Index src = node_order[t];
            if (src < 0 || src >= k || seen[src])
            {
                throw ValidationError("realify: node_order is not a permutation");
            }
            seen[src] = true;
            permuted.middleCols(src * m, m) = jmat.middleCols(t * m, m);
        }
        jmat = permuted;
    }

    StateSpaceModel out;
    out.A = jmat * mdl.A * jmat.adjoint();
    out.B = jmat * mdl.B;
    out.C = mdl.C * jmat.adjoint();
    if (!mdl.identity_E())
    {
        out.E = jmat * mdl.E * jmat.adjoint();
    }

    double residue = std::max({out.A.imag().cwiseAbs().maxCoeff(),
                               out.B.imag().cwiseAbs().maxCoeff(),
                               out.C.imag().cwiseAbs().maxCoeff()});
    if (!mdl.identity_E())
    {
        residue = std::max(residue, out.E.imag().cwiseAbs().maxCoeff());
    }
    if (!(residue <= tol))
    {
        std::ostringstream msg;
        msg << "realify: imaginary residue " << residue
            << " exceeds tolerance; data is not conjugate-consistent";
        throw ValidationError(msg.str());
    }

    out.A = out.A.real().cast<Complex>();
    out.B = out.B.real().cast<Complex>();
    out.C = out.C.real().cast<Complex>();
    if (!mdl.identity_E())
    {
        out.E = out.E.real().cast<Complex>();
    }
    out.real = true;
    return out;
}

std::string to_json(const StateSpaceModel& mdl)
{
    mdl.validate();
    json doc;
    if (!mdl.identity_E())
    {
        doc["E"] = matrix_to_json(mdl.E);
    }
    doc["A"] = matrix_to_json(mdl.A);
    doc["B"] = matrix_to_json(mdl.B);
    doc["C"] = matrix_to_json(mdl.C);
    return doc.dump(2);
}

StateSpaceModel state_space_from_json(const std::string& text)
{
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error& err)
    {
        throw FormatError(std::string("Invalid JSON: ") + err.what());
    }
    for (const char* key : {"A", "B", "C"})
    {
        if (!doc.contains(key))
        {
            throw FormatError(std::string("State-space JSON is missing \"") + key + "\"");
        }
    }

    StateSpaceModel mdl;
    mdl.A = matrix_from_json(doc["A"], "A");
    mdl.B = matrix_from_json(doc["B"], "B");
    mdl.C = matrix_from_json(doc["C"], "C");
    if (doc.contains("E"))
    {
        mdl.E = matrix_from_json(doc["E"], "E");
    }
    mdl.validate();

    double residue = std::max({mdl.A.imag().cwiseAbs().maxCoeff(),
                               mdl.B.imag().cwiseAbs().maxCoeff(),
                               mdl.C.imag().cwiseAbs().maxCoeff()});
    if (!mdl.identity_E())
    {
        residue = std::max(residue, mdl.E.imag().cwiseAbs().maxCoeff());
    }
    mdl.real = (residue == 0.0);
    return mdl;
}

void save_model(const StateSpaceModel& mdl, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
    {
        throw FormatError("Cannot open \"" + path + "\" for writing");
    }
    out << to_json(mdl) << '\n';
}

StateSpaceModel load_state_space(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw FormatError("Cannot open \"" + path + "\" for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return state_space_from_json(buf.str());
}

}  // namespace freqfit
