// SPDX-License-Identifier: Apache-2.0

#include "freqfit/barycentric.hpp"

#include <Eigen/LU>
#include <cmath>
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

Complex complex_from_json(const json& entry, const std::string& what)
{
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
        !entry[1].is_number())
    {
        throw FormatError(what + " entries must be [re, im] pairs");
    }
    return Complex(entry[0].get<double>(), entry[1].get<double>());
}

// Flat column-major complex block <-> JSON array of [re, im] pairs.
json block_to_json(const Matrix& mat)
{
    json out = json::array();
    for (Index j = 0; j < mat.cols(); j++)
    {
        for (Index i = 0; i < mat.rows(); i++)
        {
            out.push_back(complex_to_json(mat(i, j)));
        }
    }
    return out;
}

Matrix block_from_json(const json& arr, Index rows, Index cols, const std::string& what)
{
    if (!arr.is_array() || static_cast<Index>(arr.size()) != rows * cols)
    {
        throw FormatError(what + " must hold " + std::to_string(rows * cols) +
                          " entries (column-major)");
    }
    Matrix mat(rows, cols);
    for (Index t = 0; t < rows * cols; t++)
    {
        mat(t % rows, t / rows) = complex_from_json(arr[t], what);
    }
    return mat;
}

// Right-divides num by den (num * den^{-1}) through a transposed solve.
Matrix right_solve(const Matrix& num, const Matrix& den, Complex s)
{
    Eigen::PartialPivLU<Matrix> lu(den.transpose());
    if (!(lu.rcond() > 1.0 / kMaxEvalCondition))
    {
        throw EvaluationError("barycentric denominator is singular (spurious pole)", s);
    }
    return lu.solve(num.transpose()).transpose();
}

}  // namespace

void BarycentricModel::validate() const
{
    if (nodes.empty())
    {
        if (form != BarycentricForm::Proper)
        {
            throw ValidationError("BarycentricModel: only the proper form may be empty");
        }
        if (!node_values.empty() || !weights.empty())
        {
            throw ValidationError("BarycentricModel: empty model carries no data");
        }
        return;
    }
    if (node_values.size() != nodes.size() || weights.size() != nodes.size())
    {
        throw ValidationError("BarycentricModel: nodes, values, weights length mismatch");
    }
    const Index p = node_values[0].rows();
    const Index m = node_values[0].cols();
    for (const Matrix& val : node_values)
    {
        if (val.rows() != p || val.cols() != m)
        {
            throw ValidationError("BarycentricModel: inconsistent value block shape");
        }
    }
    for (const Matrix& w : weights)
    {
        if (w.rows() != m || w.cols() != m)
        {
            throw ValidationError("BarycentricModel: weight blocks must be m x m");
        }
    }
    if (form == BarycentricForm::Proper && (m != 1 || p != 1))
    {
        throw ValidationError("BarycentricModel: proper form is SISO only");
    }
    for (size_t i = 0; i < nodes.size(); i++)
    {
        for (size_t j = i + 1; j < nodes.size(); j++)
        {
            if (nodes[i] == nodes[j])
            {
                throw ValidationError("BarycentricModel: duplicate node at index " +
                                      std::to_string(j));
            }
        }
    }
}

StateSpaceModel realize(const BarycentricModel& b)
{
    b.validate();
    if (b.form != BarycentricForm::StrictlyProper || b.nodes.empty())
    {
        throw ValidationError("realize: requires a nonempty strictly proper model");
    }
    const Index k = b.size();
    const Index m = b.inputs();
    const Index p = b.outputs();
    const Index r = k * m;

    StateSpaceModel mdl;
    mdl.B = Matrix(r, m);
    mdl.C = Matrix(p, r);
    for (Index i = 0; i < k; i++)
    {
        mdl.B.middleRows(i * m, m) = b.weights[i];
        mdl.C.middleCols(i * m, m) = b.node_values[i];
    }
    // A = diag(lambda) (x) I_m - B (1^T (x) I_m): block (i, j) is
    // delta_ij lambda_i I_m - W_i.
    mdl.A = Matrix::Zero(r, r);
    for (Index i = 0; i < k; i++)
    {
        for (Index j = 0; j < k; j++)
        {
            mdl.A.block(i * m, j * m, m, m) = -b.weights[i];
        }
        mdl.A.block(i * m, i * m, m, m).diagonal().array() += b.nodes[i];
    }
    return mdl;
}

Matrix eval_barycentric(const BarycentricModel& b, Complex s)
{
    b.validate();
    if (b.nodes.empty())
    {
        return Matrix::Constant(1, 1, b.constant);
    }
    for (Index i = 0; i < b.size(); i++)
    {
        if (near_node(s, b.nodes[i]))
        {
            return b.node_values[i];
        }
    }

    const Index m = b.inputs();
    const Index p = b.outputs();
    Matrix num = Matrix::Zero(p, m);
    Matrix den = Matrix::Zero(m, m);
    if (b.form == BarycentricForm::StrictlyProper)
    {
        den = Matrix::Identity(m, m);
    }
    for (Index i = 0; i < b.size(); i++)
    {
        const Complex c = 1.0 / (s - b.nodes[i]);
        num += b.node_values[i] * b.weights[i] * c;
        den += b.weights[i] * c;
    }
    return right_solve(num, den, s);
}

Matrix eval_woodbury(const BarycentricModel& b, Complex s)
{
    b.validate();
    if (b.form != BarycentricForm::StrictlyProper || b.nodes.empty())
    {
        throw ValidationError("eval_woodbury: requires a nonempty strictly proper model");
    }
    for (const Complex& node : b.nodes)
    {
        if (near_node(s, node))
        {
            throw EvaluationError("eval_woodbury: s coincides with a node", s);
        }
    }

    const Index k = b.size();
    const Index m = b.inputs();
    const Index p = b.outputs();
    Matrix bhat(k * m, m);
    Matrix chat(p, k * m);
    for (Index i = 0; i < k; i++)
    {
        bhat.middleRows(i * m, m) = b.weights[i];
        chat.middleCols(i * m, m) = b.node_values[i];
    }
    // Y = (sI - Lambda)^{-1} Bhat, diagonal resolvent applied blockwise.
    Matrix y = bhat;
    for (Index i = 0; i < k; i++)
    {
        y.middleRows(i * m, m) /= (s - b.nodes[i]);
    }
    // G = I_m + R Y with R = 1^T (x) I_m summing the blocks.
    Matrix g = Matrix::Identity(m, m);
    for (Index i = 0; i < k; i++)
    {
        g += y.middleRows(i * m, m);
    }
    return right_solve(chat * y, g, s);
}

std::vector<Index> conjugate_pair_order(const std::vector<Complex>& nodes)
{
    const Index k = static_cast<Index>(nodes.size());
    if (k % 2 != 0)
    {
        throw ValidationError("conjugate_pair_order: odd node count");
    }
    std::vector<bool> used(k, false);
    std::vector<Index> order;
    order.reserve(k);
    for (Index i = 0; i < k; i++)
    {
        if (used[i])
        {
            continue;
        }
        if (nodes[i].imag() == 0.0)
        {
            throw ValidationError("conjugate_pair_order: real node cannot be paired");
        }
        const Complex want = std::conj(nodes[i]);
        Index match = -1;
        double best = 1e-12 * (1.0 + std::abs(nodes[i]));
        for (Index j = i + 1; j < k; j++)
        {
            const double dist = std::abs(nodes[j] - want);
            if (!used[j] && dist <= best)
            {
                match = j;
                best = dist;
            }
        }
        if (match < 0)
        {
            std::ostringstream msg;
            msg << "conjugate_pair_order: node " << nodes[i] << " has no conjugate partner";
            throw ValidationError(msg.str());
        }
        used[i] = used[match] = true;
        order.push_back(i);
        order.push_back(match);
    }
    return order;
}

StateSpaceModel realify(const BarycentricModel& b, double tol)
{
    StateSpaceModel mdl = realize(b);
    return realify(mdl, b.inputs(), conjugate_pair_order(b.nodes), tol);
}

std::string to_json(const BarycentricModel& b)
{
    b.validate();
    json doc;
    doc["form"] = (b.form == BarycentricForm::StrictlyProper) ? "strictly_proper"
                                                              : "proper";
    doc["m"] = b.inputs();
    doc["p"] = b.outputs();
    doc["nodes"] = json::array();
    doc["values"] = json::array();
    doc["weights"] = json::array();
    for (Index i = 0; i < b.size(); i++)
    {
        doc["nodes"].push_back(complex_to_json(b.nodes[i]));
        doc["values"].push_back(block_to_json(b.node_values[i]));
        doc["weights"].push_back(block_to_json(b.weights[i]));
    }
    if (b.nodes.empty())
    {
        doc["constant"] = complex_to_json(b.constant);
    }
    return doc.dump(2);
}

BarycentricModel barycentric_from_json(const std::string& text)
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
    for (const char* key : {"form", "nodes", "values", "weights"})
    {
        if (!doc.contains(key))
        {
            throw FormatError(std::string("Barycentric JSON is missing \"") + key + "\"");
        }
    }

    BarycentricModel b;
    const std::string form = doc["form"].get<std::string>();
    if (form == "strictly_proper")
    {
        b.form = BarycentricForm::StrictlyProper;
    }
    else if (form == "proper")
    {
        b.form = BarycentricForm::Proper;
    }
    else
    {
        throw FormatError("Barycentric JSON: unknown form \"" + form + "\"");
    }

    const json& nodes = doc["nodes"];
    const json& values = doc["values"];
    const json& weights = doc["weights"];
    if (!nodes.is_array() || !values.is_array() || !weights.is_array() ||
        nodes.size() != values.size() || nodes.size() != weights.size())
    {
        throw FormatError("Barycentric JSON: nodes/values/weights must be arrays of "
                          "one length");
    }
    if (nodes.empty())
    {
        if (doc.contains("constant"))
        {
            b.constant = complex_from_json(doc["constant"], "constant");
        }
        b.validate();
        return b;
    }

    Index m = 1, p = 1;
    if (doc.contains("m") && doc.contains("p"))
    {
        m = doc["m"].get<Index>();
        p = doc["p"].get<Index>();
    }
    else if (weights[0].is_array() && values[0].is_array())
    {
        // Shapes are recoverable: |weights_i| = m^2 and |values_i| = p*m.
        m = static_cast<Index>(std::llround(std::sqrt(double(weights[0].size()))));
        p = (m > 0) ? static_cast<Index>(values[0].size()) / m : 0;
    }
    if (m < 1 || p < 1)
    {
        throw FormatError("Barycentric JSON: cannot determine block shape");
    }

    for (size_t i = 0; i < nodes.size(); i++)
    {
        b.nodes.push_back(complex_from_json(nodes[i], "nodes"));
        b.node_values.push_back(block_from_json(values[i], p, m, "values"));
        b.weights.push_back(block_from_json(weights[i], m, m, "weights"));
    }
    b.validate();
    return b;
}

void save_model(const BarycentricModel& b, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
    {
        throw FormatError("Cannot open \"" + path + "\" for writing");
    }
    out << to_json(b) << '\n';
}

BarycentricModel load_barycentric(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw FormatError("Cannot open \"" + path + "\" for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return barycentric_from_json(buf.str());
}

}  // namespace freqfit
