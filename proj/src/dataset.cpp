// SPDX-License-Identifier: Apache-2.0

#include "freqfit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "freqfit/errors.hpp"

namespace freqfit
{

namespace
{

using nlohmann::json;

// Relative tolerance used when checking that partner values are conjugates.
// Points themselves must match exactly (conjugation is lossless in binary).
constexpr double kClosureTol = 1e-12;

std::string fmt17(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double parse_double(const std::string& field, Index row)
{
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && (*begin == ' ' || *begin == '\t'))
    {
        begin++;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    while (ptr < end && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r'))
    {
        ptr++;
    }
    if (ec != std::errc() || ptr != end)
    {
        throw FormatError("Row " + std::to_string(row) + ": cannot parse number \"" +
                          field + "\"");
    }
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line)
    {
        if (c == ',')
        {
            fields.push_back(cur);
            cur.clear();
        }
        else if (c != '\r')
        {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

FrequencyDataset load_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
    {
        throw FormatError("CSV dataset: no samples");
    }
    std::vector<std::string> header = split_csv_line(line);
    if (header.empty() || header[0] != "omega" || header.size() < 3 ||
        header.size() % 2 == 0)
    {
        throw FormatError("CSV dataset: header must be omega,re_1_1,im_1_1,...");
    }

    // The trailing column name im_p_m fixes the block shape.
    Index p = 0, m = 0;
    {
        const std::string& last = header.back();
        unsigned long pi = 0, mi = 0;
        if (std::sscanf(last.c_str(), "im_%lu_%lu", &pi, &mi) != 2 || pi == 0 || mi == 0)
        {
            throw FormatError("CSV dataset: cannot infer block shape from column \"" +
                              last + "\"");
        }
        p = static_cast<Index>(pi);
        m = static_cast<Index>(mi);
    }
    if (static_cast<Index>(header.size()) != 1 + 2 * p * m)
    {
        throw FormatError("CSV dataset: expected " + std::to_string(1 + 2 * p * m) +
                          " columns for a " + std::to_string(p) + "x" + std::to_string(m) +
                          " block, found " + std::to_string(header.size()));
    }
    for (Index j = 0; j < m; j++)
    {
        for (Index i = 0; i < p; i++)
        {
            const std::string suffix =
                "_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
            const Index col = 1 + 2 * (j * p + i);
            if (header[col] != "re" + suffix || header[col + 1] != "im" + suffix)
            {
                throw FormatError("CSV dataset: unexpected column \"" + header[col] +
                                  "\", want re" + suffix);
            }
        }
    }

    FrequencyDataset d;
    d.m = m;
    d.p = p;
    Index row = 1;
    while (std::getline(in, line))
    {
        row++;
        if (line.empty() || line == "\r")
        {
            continue;
        }
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
        {
            throw FormatError("Row " + std::to_string(row) + ": expected " +
                              std::to_string(header.size()) + " fields, found " +
                              std::to_string(fields.size()));
        }
        const double omega = parse_double(fields[0], row);
        Matrix block(p, m);
        for (Index j = 0; j < m; j++)
        {
            for (Index i = 0; i < p; i++)
            {
                const Index col = 1 + 2 * (j * p + i);
                block(i, j) = Complex(parse_double(fields[col], row),
                                      parse_double(fields[col + 1], row));
            }
        }
        d.points.push_back(Complex(0.0, omega));
        d.values.push_back(std::move(block));
    }
    if (d.points.empty())
    {
        throw FormatError("CSV dataset: no samples");
    }
    return d;
}

void save_csv(const FrequencyDataset& d, std::ostream& out)
{
    for (Index i = 0; i < d.size(); i++)
    {
        if (d.points[i].real() != 0.0)
        {
            throw ValidationError(
                "CSV datasets hold imaginary-axis samples only; point with nonzero "
                "real part cannot be stored");
        }
    }
    out << "omega";
    for (Index j = 0; j < d.m; j++)
    {
        for (Index i = 0; i < d.p; i++)
        {
            const std::string suffix =
                "_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
            out << ",re" << suffix << ",im" << suffix;
        }
    }
    out << '\n';
    for (Index n = 0; n < d.size(); n++)
    {
        out << fmt17(d.points[n].imag());
        for (Index j = 0; j < d.m; j++)
        {
            for (Index i = 0; i < d.p; i++)
            {
                out << ',' << fmt17(d.values[n](i, j).real()) << ','
                    << fmt17(d.values[n](i, j).imag());
            }
        }
        out << '\n';
    }
}

FrequencyDataset load_json(std::istream& in)
{
    json doc;
    try
    {
        doc = json::parse(in);
    }
    catch (const json::parse_error& err)
    {
        throw FormatError(std::string("Invalid JSON: ") + err.what());
    }
    if (!doc.contains("m") || !doc.contains("p") || !doc.contains("samples") ||
        !doc["m"].is_number_integer() || !doc["p"].is_number_integer() ||
        !doc["samples"].is_array())
    {
        throw FormatError("JSON dataset: expected { \"m\", \"p\", \"samples\" }");
    }

    FrequencyDataset d;
    d.m = doc["m"].get<Index>();
    d.p = doc["p"].get<Index>();
    if (d.m < 1 || d.p < 1)
    {
        throw FormatError("JSON dataset: m and p must be positive");
    }
    if (doc["samples"].empty())
    {
        throw FormatError("JSON dataset: no samples");
    }
    Index row = 0;
    for (const json& sample : doc["samples"])
    {
        row++;
        if (!sample.contains("s") || !sample.contains("H") || !sample["s"].is_array() ||
            sample["s"].size() != 2 || !sample["H"].is_array())
        {
            throw FormatError("Sample " + std::to_string(row) +
                              ": expected { \"s\":[re,im], \"H\":[[re,im],...] }");
        }
        const json& s = sample["s"];
        if (!s[0].is_number() || !s[1].is_number())
        {
            throw FormatError("Sample " + std::to_string(row) + ": malformed point");
        }
        const json& h = sample["H"];
        if (static_cast<Index>(h.size()) != d.p * d.m)
        {
            throw FormatError("Sample " + std::to_string(row) + ": H must hold " +
                              std::to_string(d.p * d.m) + " entries (column-major)");
        }
        Matrix block(d.p, d.m);
        for (Index t = 0; t < d.p * d.m; t++)
        {
            const json& entry = h[t];
            if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
                !entry[1].is_number())
            {
                throw FormatError("Sample " + std::to_string(row) +
                                  ": H entries must be [re, im] pairs");
            }
            block(t % d.p, t / d.p) =
                Complex(entry[0].get<double>(), entry[1].get<double>());
        }
        d.points.push_back(Complex(s[0].get<double>(), s[1].get<double>()));
        d.values.push_back(std::move(block));
    }
    return d;
}

void save_json(const FrequencyDataset& d, std::ostream& out)
{
    json doc;
    doc["m"] = d.m;
    doc["p"] = d.p;
    json samples = json::array();
    for (Index n = 0; n < d.size(); n++)
    {
        json h = json::array();
        for (Index j = 0; j < d.m; j++)
        {
            for (Index i = 0; i < d.p; i++)
            {
                h.push_back(json::array(
                    {d.values[n](i, j).real(), d.values[n](i, j).imag()}));
            }
        }
        samples.push_back(json{{"s", {d.points[n].real(), d.points[n].imag()}},
                               {"H", std::move(h)}});
    }
    doc["samples"] = std::move(samples);
    out << doc.dump(2) << '\n';
}

}  // namespace

void FrequencyDataset::validate() const
{
    if (m < 1 || p < 1)
    {
        throw ValidationError("FrequencyDataset: m and p must be positive");
    }
    if (points.size() != values.size())
    {
        throw ValidationError("FrequencyDataset: point/value count mismatch");
    }
    if (points.empty())
    {
        throw ValidationError("FrequencyDataset: no samples");
    }
    for (Index i = 0; i < size(); i++)
    {
        if (values[i].rows() != p || values[i].cols() != m)
        {
            throw ValidationError("FrequencyDataset: value block " + std::to_string(i) +
                                  " is not " + std::to_string(p) + "x" +
                                  std::to_string(m));
        }
    }
    std::map<std::pair<double, double>, Index> index;
    for (Index i = 0; i < size(); i++)
    {
        auto key = std::make_pair(points[i].real(), points[i].imag());
        if (!index.emplace(key, i).second)
        {
            throw ValidationError("FrequencyDataset: duplicate point at index " +
                                  std::to_string(i));
        }
    }
    if (conjugate_closed && !detect_conjugate_closed(*this))
    {
        throw ValidationError("FrequencyDataset flagged conjugate-closed is not");
    }
}

std::vector<Index> FrequencyDataset::partner_indices() const
{
    std::map<std::pair<double, double>, Index> index;
    for (Index i = 0; i < size(); i++)
    {
        index[{points[i].real(), points[i].imag()}] = i;
    }
    std::vector<Index> partner(size(), -1);
    for (Index i = 0; i < size(); i++)
    {
        auto it = index.find({points[i].real(), -points[i].imag()});
        if (it != index.end())
        {
            partner[i] = it->second;
        }
    }
    return partner;
}

bool detect_conjugate_closed(const FrequencyDataset& d)
{
    const std::vector<Index> partner = d.partner_indices();
    for (Index i = 0; i < d.size(); i++)
    {
        if (d.points[i].imag() == 0.0)
        {
            continue;
        }
        const Index j = partner[i];
        if (j < 0)
        {
            return false;
        }
        const double scale = 1.0 + d.values[i].cwiseAbs().maxCoeff();
        if ((d.values[j] - d.values[i].conjugate()).cwiseAbs().maxCoeff() >
            kClosureTol * scale)
        {
            return false;
        }
    }
    return true;
}

void NoiseSpec::validate() const
{
    if (!(sigma2 >= 0.0))
    {
        throw ValidationError("NoiseSpec: variance must be nonnegative");
    }
}

FileFormat format_from_path(const std::string& path)
{
    auto dot = path.find_last_of('.');
    std::string ext = (dot == std::string::npos) ? "" : path.substr(dot);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".csv")
    {
        return FileFormat::Csv;
    }
    if (ext == ".json")
    {
        return FileFormat::Json;
    }
    throw FormatError("Cannot deduce dataset format from \"" + path +
                      "\" (use .csv or .json)");
}

FrequencyDataset load_dataset(const std::string& path, FileFormat format)
{
    std::ifstream in(path);
    if (!in)
    {
        throw FormatError("Cannot open \"" + path + "\" for reading");
    }
    FrequencyDataset d = (format == FileFormat::Csv) ? load_csv(in) : load_json(in);
    d.conjugate_closed = detect_conjugate_closed(d);
    d.validate();
    return d;
}

void save_dataset(const FrequencyDataset& d, const std::string& path, FileFormat format)
{
    d.validate();
    std::ofstream out(path);
    if (!out)
    {
        throw FormatError("Cannot open \"" + path + "\" for writing");
    }
    if (format == FileFormat::Csv)
    {
        save_csv(d, out);
    }
    else
    {
        save_json(d, out);
    }
}

FrequencyDataset conjugate_close(const FrequencyDataset& d)
{
    d.validate();
    for (Index i = 0; i < d.size(); i++)
    {
        if (d.points[i].real() < 0.0)
        {
            throw ValidationError(
                "conjugate_close: points strictly in the left half-plane are not "
                "supported");
        }
    }

    FrequencyDataset out = d;
    const std::vector<Index> partner = d.partner_indices();
    for (Index i = 0; i < d.size(); i++)
    {
        if (d.points[i].imag() == 0.0)
        {
            continue;
        }
        const Index j = partner[i];
        if (j >= 0)
        {
            const double scale = 1.0 + d.values[i].cwiseAbs().maxCoeff();
            if ((d.values[j] - d.values[i].conjugate()).cwiseAbs().maxCoeff() >
                kClosureTol * scale)
            {
                throw ValidationError(
                    "conjugate_close: conjugate point present with inconsistent value "
                    "at index " +
                    std::to_string(i));
            }
        }
        else
        {
            out.points.push_back(std::conj(d.points[i]));
            out.values.push_back(d.values[i].conjugate());
        }
    }
    out.conjugate_closed = true;
    out.validate();
    return out;
}

FrequencyDataset add_noise(const FrequencyDataset& d, const NoiseSpec& n)
{
    d.validate();
    n.validate();
    FrequencyDataset out = d;
    if (n.sigma2 == 0.0 && n.mean == Complex(0.0))
    {
        return out;
    }

    std::mt19937_64 gen(n.seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(n.sigma2 / 2.0));
    auto draw = [&]() {
        const double re = normal(gen);
        const double im = normal(gen);
        return n.mean + Complex(re, im);
    };

    if (d.conjugate_closed)
    {
        // Draw once per non-negative-imaginary sample and mirror onto the
        // partner so the perturbed data stays conjugate-closed.
        const std::vector<Index> partner = d.partner_indices();
        for (Index i = 0; i < d.size(); i++)
        {
            if (d.points[i].imag() < 0.0)
            {
                continue;
            }
            const Complex z = draw();
            out.values[i] = d.values[i] * (1.0 + z);
            if (d.points[i].imag() > 0.0 && partner[i] >= 0)
            {
                out.values[partner[i]] = d.values[partner[i]] * (1.0 + std::conj(z));
            }
        }
    }
    else
    {
        for (Index i = 0; i < d.size(); i++)
        {
            out.values[i] = d.values[i] * (1.0 + draw());
        }
        out.conjugate_closed = detect_conjugate_closed(out);
    }
    return out;
}

std::pair<FrequencyDataset, StateSpaceModel> generate_synthetic(
    Index order, Index m, Index p, const std::vector<double>& grid, std::uint64_t seed)
{
    if (order < 1 || m < 1 || p < 1)
    {
        throw ValidationError("generate_synthetic: order, m, p must be positive");
    }
    if (grid.empty())
    {
        throw ValidationError("generate_synthetic: empty frequency grid");
    }

    double gmin = std::abs(grid[0]), gmax = std::abs(grid[0]);
    for (double w : grid)
    {
        gmin = std::min(gmin, std::abs(w));
        gmax = std::max(gmax, std::abs(w));
    }
    if (gmax <= 0.0)
    {
        gmax = 1.0;
    }
    gmin = std::max(gmin, gmax * 1e-3);

    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // Block-diagonal A with 2x2 rotation blocks keeps every eigenvalue at
    // alpha +- i*beta with alpha < 0, so stability holds by construction.
    StateSpaceModel mdl;
    mdl.A = Matrix::Zero(order, order);
    Index filled = 0;
    while (filled + 1 < order)
    {
        const double w0 = gmin * std::pow(gmax / gmin, unif(gen));
        const double damp = 0.05 + 0.45 * unif(gen);
        const double alpha = -damp * w0;
        mdl.A(filled, filled) = alpha;
        mdl.A(filled, filled + 1) = w0;
        mdl.A(filled + 1, filled) = -w0;
        mdl.A(filled + 1, filled + 1) = alpha;
        filled += 2;
    }
    if (filled < order)
    {
        mdl.A(filled, filled) = -(0.05 + 0.95 * unif(gen)) * gmax;
    }
    mdl.B = Matrix::Zero(order, m);
    mdl.C = Matrix::Zero(p, order);
    for (Index i = 0; i < order; i++)
    {
        for (Index j = 0; j < m; j++)
        {
            mdl.B(i, j) = 2.0 * unif(gen) - 1.0;
        }
    }
    for (Index i = 0; i < p; i++)
    {
        for (Index j = 0; j < order; j++)
        {
            mdl.C(i, j) = 2.0 * unif(gen) - 1.0;
        }
    }
    mdl.real = true;

    FrequencyDataset d;
    d.m = m;
    d.p = p;
    for (double w : grid)
    {
        d.points.push_back(Complex(0.0, w));
        d.values.push_back(eval_state_space(mdl, Complex(0.0, w)));
    }
    d.conjugate_closed = detect_conjugate_closed(d);
    d.validate();
    return {std::move(d), std::move(mdl)};
}

}  // namespace freqfit
