// SPDX-License-Identifier: Apache-2.0

// freqfit: command-line front end for the rational-fitting toolkit.
// Subcommands: fit, sweep, noise, eval, poles, gen. Exit codes: 0 success,
// 1 numerical failure, 2 usage or input-format error. All payload output
// goes to files; stdout carries a one-line summary, stderr a JSON error
// object on failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "freqfit/aaa.hpp"
#include "freqfit/barycentric.hpp"
#include "freqfit/cur.hpp"
#include "freqfit/dataset.hpp"
#include "freqfit/errors.hpp"
#include "freqfit/loewner.hpp"
#include "freqfit/metrics.hpp"
#include "freqfit/pole_placement.hpp"
#include "freqfit/state_space.hpp"
#include "freqfit/types.hpp"

namespace
{

using freqfit::BarycentricModel;
using freqfit::Complex;
using freqfit::Error;
using freqfit::Evaluator;
using freqfit::FitReport;
using freqfit::FormatError;
using freqfit::FrequencyDataset;
using freqfit::Index;
using freqfit::StateSpaceModel;
using freqfit::ValidationError;
using json = nlohmann::json;

constexpr double kTwoPi = 6.283185307179586476925286766559;

double parse_double(const std::string& text, const std::string& what)
{
    std::size_t pos = 0;
    double v = 0.0;
    try
    {
        v = std::stod(text, &pos);
    }
    catch (const std::exception&)
    {
        throw ValidationError("cannot parse " + what + " from '" + text + "'");
    }
    if (pos != text.size())
    {
        throw ValidationError("trailing characters in " + what + " '" + text + "'");
    }
    return v;
}

std::string trimmed(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep))
    {
        out.push_back(tok);
    }
    return out;
}

/// Complex literals in `a+bj` form: "3", "2j", "-1+0.5j", "1e-3-2e-4j".
/// A trailing `i` is accepted as a synonym for `j`.
Complex parse_complex(const std::string& raw)
{
    const std::string s = trimmed(raw);
    if (s.empty())
    {
        throw ValidationError("empty complex literal");
    }
    const char tail = s.back();
    if (tail != 'j' && tail != 'i')
    {
        return Complex(parse_double(s, "complex literal"), 0.0);
    }
    const std::string body = s.substr(0, s.size() - 1);
    // Split before the sign of the imaginary part; signs directly after an
    // exponent marker belong to the mantissa.
    std::size_t cut = std::string::npos;
    for (std::size_t t = 1; t < body.size(); t++)
    {
        if ((body[t] == '+' || body[t] == '-') && body[t - 1] != 'e' && body[t - 1] != 'E')
        {
            cut = t;
        }
    }
    auto sign_or_value = [&](const std::string& part) {
        if (part.empty() || part == "+")
        {
            return 1.0;
        }
        if (part == "-")
        {
            return -1.0;
        }
        return parse_double(part, "complex literal");
    };
    if (cut == std::string::npos)
    {
        return Complex(0.0, sign_or_value(body));
    }
    return Complex(parse_double(body.substr(0, cut), "complex literal"),
                   sign_or_value(body.substr(cut)));
}

std::vector<Complex> parse_complex_list(const std::string& text)
{
    std::vector<Complex> out;
    for (const std::string& tok : split(text, ','))
    {
        out.push_back(parse_complex(tok));
    }
    if (out.empty())
    {
        throw ValidationError("empty complex list");
    }
    return out;
}

/// Real-valued lists: comma-separated entries, each a number or an inclusive
/// `start:step:stop` range.
std::vector<double> parse_real_list(const std::string& text)
{
    std::vector<double> out;
    for (const std::string& tok : split(text, ','))
    {
        const std::string t = trimmed(tok);
        if (t.find(':') == std::string::npos)
        {
            out.push_back(parse_double(t, "list entry"));
            continue;
        }
        const std::vector<std::string> parts = split(t, ':');
        if (parts.size() != 3)
        {
            throw ValidationError("range '" + t + "' must be start:step:stop");
        }
        const double start = parse_double(parts[0], "range start");
        const double step = parse_double(parts[1], "range step");
        const double stop = parse_double(parts[2], "range stop");
        if (step == 0.0 || (stop - start) * step < 0.0)
        {
            throw ValidationError("range '" + t + "' does not reach its stop value");
        }
        const auto n = static_cast<std::size_t>((stop - start) / step + 1e-9) + 1;
        for (std::size_t i = 0; i < n; i++)
        {
            out.push_back(start + static_cast<double>(i) * step);
        }
    }
    if (out.empty())
    {
        throw ValidationError("empty list");
    }
    return out;
}

std::vector<Index> parse_order_list(const std::string& text)
{
    std::vector<Index> out;
    for (double v : parse_real_list(text))
    {
        const auto r = static_cast<Index>(std::llround(v));
        if (std::abs(v - static_cast<double>(r)) > 1e-9 || r < 1)
        {
            throw ValidationError("orders must be positive integers");
        }
        out.push_back(r);
    }
    return out;
}

freqfit::PointMode parse_point_mode(const std::string& name)
{
    if (name == "merged")
    {
        return freqfit::PointMode::MergedAlternate;
    }
    if (name == "left")
    {
        return freqfit::PointMode::LeftOnly;
    }
    return freqfit::PointMode::RightOnly;
}

/// A fitted surrogate in whichever representation the pipeline produced.
struct AnyModel
{
    std::optional<StateSpaceModel> ss;
    std::optional<BarycentricModel> bary;

    Evaluator eval() const
    {
        return ss ? freqfit::evaluator(*ss) : freqfit::evaluator(*bary);
    }

    std::vector<freqfit::PoleInfo> poles() const
    {
        return ss ? freqfit::pole_report(*ss) : freqfit::pole_report(*bary);
    }

    Index order() const
    {
        return ss ? ss->order() : static_cast<Index>(bary->size()) * bary->inputs();
    }

    void save(const std::string& path) const
    {
        if (ss)
        {
            freqfit::save_model(*ss, path);
        }
        else
        {
            freqfit::save_model(*bary, path);
        }
    }
};

AnyModel load_any_model(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw FormatError("cannot open model file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::exception& e)
    {
        throw FormatError("model file '" + path + "' is not valid JSON: " + e.what());
    }
    AnyModel mdl;
    if (doc.contains("A"))
    {
        mdl.ss = freqfit::state_space_from_json(text);
    }
    else if (doc.contains("nodes"))
    {
        mdl.bary = freqfit::barycentric_from_json(text);
    }
    else
    {
        throw FormatError("model file '" + path +
                          "' matches neither the state-space ('A') nor the "
                          "barycentric ('nodes') schema");
    }
    return mdl;
}

enum class RealMode
{
    Auto,  // realify when the data supports it, keep complex otherwise
    On,    // realify or fail
    Off,
};

RealMode parse_real_mode(const std::string& name)
{
    if (name == "on")
    {
        return RealMode::On;
    }
    if (name == "off")
    {
        return RealMode::Off;
    }
    return RealMode::Auto;
}

/// Everything `fit` needs beyond the method name.
struct FitConfig
{
    std::string method;
    Index order = -1;
    double tol = -1.0;
    freqfit::PointMode point_mode = freqfit::PointMode::MergedAlternate;
    std::vector<Complex> poles;       // lfpp
    std::vector<Complex> nodes;       // lfpp
    std::vector<double> peaks;        // lfapp modified mode
    double svd_tol = 1e-12;           // lfapp surrogate truncation
    Index surrogate_order = 0;        // lfapp: rank-k truncation instead
    bool absolute_error = false;      // aaa
    bool include_unstable = false;    // lfapp
    RealMode real = RealMode::Auto;
};

struct FitOutcome
{
    AnyModel model;
    Index order = 0;
    freqfit::RealVector svd_row, svd_col;
    double cauchy_condition = -1.0;
    std::vector<std::string> notes;
};

/// Converts a barycentric fit to the requested representation. Auto keeps the
/// complex barycentric form whenever realification is not cleanly possible.
AnyModel finish_barycentric(const BarycentricModel& b, RealMode real,
                            std::vector<std::string>& notes)
{
    AnyModel out;
    if (real == RealMode::Off)
    {
        out.bary = b;
        return out;
    }
    try
    {
        out.ss = freqfit::realify(b);
        notes.push_back("realified to a real state-space model");
        return out;
    }
    catch (const Error& e)
    {
        if (real == RealMode::On)
        {
            throw ValidationError(std::string("--real on: ") + e.what());
        }
    }
    out.bary = b;
    notes.push_back("kept the complex barycentric form");
    return out;
}

FitOutcome run_fit_method(const FrequencyDataset& d, const FitConfig& cfg)
{
    FitOutcome out;
    if (cfg.method == "loewner-svd")
    {
        if ((cfg.order > 0) == (cfg.tol > 0))
        {
            throw ValidationError("loewner-svd needs exactly one of --order and --tol");
        }
        const freqfit::Partition part =
            freqfit::partition(d, freqfit::PartitionScheme::Alternate);
        freqfit::LoewnerPencil pen = freqfit::build_pencil(part);
        if (cfg.real == RealMode::On && !pen.conjugate_paired)
        {
            throw ValidationError(
                "--real on: the data is not conjugate-closed, realification "
                "is unavailable");
        }
        if (cfg.real != RealMode::Off && pen.conjugate_paired)
        {
            pen = freqfit::realify_pencil(pen);
            out.notes.push_back("realified the Loewner pencil");
        }
        const freqfit::TruncationRule rule =
            cfg.order > 0 ? freqfit::TruncationRule::order(cfg.order)
                          : freqfit::TruncationRule::tolerance(cfg.tol);
        freqfit::LoewnerReduction red = freqfit::truncated_model(pen, rule);
        if (!red.note.empty())
        {
            out.notes.push_back(red.note);
        }
        out.order = red.rank;
        out.svd_row = red.svals_row;
        out.svd_col = red.svals_col;
        out.model.ss = std::move(red.model);
        return out;
    }
    if (cfg.method == "ls-loewner")
    {
        if (cfg.order < 1)
        {
            throw ValidationError("ls-loewner is order-driven; give --order");
        }
        if (cfg.order % d.m != 0)
        {
            throw ValidationError(
                "ls-loewner MIMO orders are multiples of the input count m");
        }
        const freqfit::LsLoewnerResult res =
            freqfit::ls_loewner_fit(d, cfg.order / d.m, cfg.point_mode);
        if (res.rank_deficient)
        {
            out.notes.push_back("least-squares weight system was rank deficient");
        }
        out.order = static_cast<Index>(res.model.size()) * d.m;
        out.model = finish_barycentric(res.model, cfg.real, out.notes);
        return out;
    }
    if (cfg.method == "aaa" || cfg.method == "aaa-sp")
    {
        freqfit::AaaConfig acfg;
        acfg.tol = cfg.tol > 0 ? cfg.tol : 1e-8;
        acfg.max_order = cfg.order > 0 ? cfg.order : 100;
        acfg.variant = cfg.method == "aaa" ? freqfit::AaaVariant::Classic
                                           : freqfit::AaaVariant::StrictlyProper;
        acfg.error_kind = cfg.absolute_error ? freqfit::ErrorKind::Absolute
                                             : freqfit::ErrorKind::Relative;
        const freqfit::AaaResult res = freqfit::aaa_fit(d, acfg);
        if (!res.converged)
        {
            out.notes.push_back("aaa stopped at the order cap before reaching tol");
        }
        out.order = res.model.size();
        out.model = finish_barycentric(res.model, cfg.real, out.notes);
        return out;
    }
    if (cfg.method == "lfpp")
    {
        if (cfg.poles.empty() || cfg.nodes.empty())
        {
            throw ValidationError("lfpp needs --poles and --nodes");
        }
        if (!d.siso())
        {
            throw ValidationError("lfpp handles SISO data only");
        }
        // Nodes must be sample points; snap to the stored point so the
        // interpolation property holds exactly.
        std::vector<Complex> nodes, values;
        for (const Complex& z : cfg.nodes)
        {
            Index hit = -1;
            for (Index t = 0; t < d.size(); t++)
            {
                if (std::abs(z - d.points[t]) <= 1e-9 * (1.0 + std::abs(d.points[t])))
                {
                    hit = t;
                    break;
                }
            }
            if (hit < 0)
            {
                std::ostringstream msg;
                msg << "lfpp node " << z << " is not a sample point of the dataset";
                throw ValidationError(msg.str());
            }
            nodes.push_back(d.points[hit]);
            values.push_back(d.values[hit](0, 0));
        }
        const freqfit::PolePlacementResult res =
            freqfit::place_poles(nodes, values, cfg.poles);
        out.cauchy_condition = res.cauchy_condition;
        out.order = res.model.size();
        out.model = finish_barycentric(res.model, cfg.real, out.notes);
        return out;
    }
    if (cfg.method == "lfapp")
    {
        if (cfg.order < 1)
        {
            throw ValidationError("lfapp is order-driven; give --order");
        }
        freqfit::LfappOptions opts;
        opts.stable_only = !cfg.include_unstable;
        opts.svd_tol = cfg.svd_tol;
        opts.surrogate_order = cfg.surrogate_order;
        opts.point_mode = cfg.point_mode;
        if (!cfg.peaks.empty())
        {
            opts.mode = freqfit::LfappMode::Modified;
            opts.peaks = cfg.peaks;
        }
        const freqfit::LfappResult res = freqfit::lfapp_fit(d, cfg.order, opts);
        out.cauchy_condition = res.cauchy_condition;
        out.notes.push_back("loewner surrogate rank " +
                            std::to_string(res.surrogate_rank));
        out.order = res.model.size();
        out.model = finish_barycentric(res.model, cfg.real, out.notes);
        return out;
    }
    throw ValidationError("unknown method '" + cfg.method + "'");
}

// Options bound to CLI11; raw strings are parsed after CLI11 is done.
struct CliOptions
{
    std::string input, output, model_path, report_path, report_csv, model_out;
    std::string method, orders, grid, poles, nodes, peaks, point_mode = "merged";
    std::string real = "auto", methods = "loewner-svd,ls-loewner", mean = "0";
    Index order = -1, surrogate_order = 0;
    double tol = -1.0, svd_tol = 1e-12, sigma2 = -1.0;
    std::uint64_t seed = 0;
    Index gen_order = 0, gen_m = 1, gen_p = 1;
    bool hz = false, absolute_error = false, include_unstable = false;
    bool closed = false, dominance = false;
};

void cmd_fit(const CliOptions& opt)
{
    const FrequencyDataset d =
        freqfit::load_dataset(opt.input, freqfit::format_from_path(opt.input));
    FitConfig cfg;
    cfg.method = opt.method;
    cfg.order = opt.order;
    cfg.tol = opt.tol;
    cfg.point_mode = parse_point_mode(opt.point_mode);
    cfg.svd_tol = opt.svd_tol;
    cfg.surrogate_order = opt.surrogate_order;
    cfg.absolute_error = opt.absolute_error;
    cfg.include_unstable = opt.include_unstable;
    cfg.real = parse_real_mode(opt.real);
    const double unit = opt.hz ? kTwoPi : 1.0;
    if (!opt.poles.empty())
    {
        cfg.poles = parse_complex_list(opt.poles);
        for (Complex& z : cfg.poles)
        {
            z *= unit;
        }
    }
    if (!opt.nodes.empty())
    {
        cfg.nodes = parse_complex_list(opt.nodes);
        for (Complex& z : cfg.nodes)
        {
            z *= unit;
        }
    }
    if (!opt.peaks.empty())
    {
        cfg.peaks = parse_real_list(opt.peaks);
        for (double& w : cfg.peaks)
        {
            w *= unit;
        }
    }

    const FitOutcome res = run_fit_method(d, cfg);
    res.model.save(opt.model_path);

    FitReport rep =
        freqfit::make_report(cfg.method, res.order, d, res.model.eval());
    rep.poles = res.model.poles();
    rep.svd_row_spectrum = res.svd_row;
    rep.svd_col_spectrum = res.svd_col;
    rep.cauchy_condition = res.cauchy_condition;
    rep.notes = res.notes;
    freqfit::save_report(rep, opt.report_path);
    if (!opt.report_csv.empty())
    {
        freqfit::save_report_csv(rep, opt.report_csv);
    }

    std::cout << "fit method=" << cfg.method << " order=" << res.order
              << " eps=" << rep.linf << " model=" << opt.model_path
              << " report=" << opt.report_path << "\n";
}

void cmd_sweep(const CliOptions& opt)
{
    const FrequencyDataset d =
        freqfit::load_dataset(opt.input, freqfit::format_from_path(opt.input));
    const std::vector<Index> orders = parse_order_list(opt.orders);
    std::vector<std::string> methods;
    for (const std::string& tok : split(opt.methods, ','))
    {
        const std::string name = trimmed(tok);
        if (name == "lfpp")
        {
            throw ValidationError("lfpp needs explicit poles; it cannot be swept");
        }
        methods.push_back(name);
    }

    std::ofstream outf(opt.output);
    if (!outf)
    {
        throw FormatError("cannot open '" + opt.output + "' for writing");
    }
    outf << "method,r,eps\n";
    Index failures = 0;
    for (const std::string& method : methods)
    {
        for (Index r : orders)
        {
            FitConfig cfg;
            cfg.method = method;
            cfg.order = r;
            cfg.real = RealMode::Off;
            if (method == "aaa" || method == "aaa-sp")
            {
                cfg.tol = 1e-14;  // drive to the order cap
            }
            double eps = std::nan("");
            try
            {
                const FitOutcome res = run_fit_method(d, cfg);
                eps = freqfit::linf_error(d, res.model.eval());
            }
            catch (const Error&)
            {
                failures++;  // recorded as a NaN row, sweep continues
            }
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", eps);
            outf << method << "," << r << "," << (std::isnan(eps) ? "nan" : buf)
                 << "\n";
        }
    }
    std::cout << "sweep methods=" << methods.size() << " orders=" << orders.size()
              << " failures=" << failures << " output=" << opt.output << "\n";
}

void cmd_noise(const CliOptions& opt)
{
    if (opt.sigma2 < 0)
    {
        throw ValidationError("noise needs --sigma2 >= 0");
    }
    const FrequencyDataset d =
        freqfit::load_dataset(opt.input, freqfit::format_from_path(opt.input));
    freqfit::NoiseSpec spec;
    spec.sigma2 = opt.sigma2;
    spec.mean = parse_complex(opt.mean);
    spec.seed = opt.seed;
    const FrequencyDataset noisy = freqfit::add_noise(d, spec);
    freqfit::save_dataset(noisy, opt.output, freqfit::format_from_path(opt.output));
    std::cout << "noise sigma2=" << opt.sigma2 << " seed=" << opt.seed
              << " samples=" << noisy.size() << " output=" << opt.output << "\n";
}

void cmd_eval(const CliOptions& opt)
{
    const AnyModel mdl = load_any_model(opt.model_path);
    std::vector<double> grid = parse_real_list(opt.grid);
    if (opt.hz)
    {
        for (double& f : grid)
        {
            f *= kTwoPi;
        }
    }
    const Evaluator eval = mdl.eval();
    FrequencyDataset out;
    for (double w : grid)
    {
        const Complex s(0.0, w);
        out.points.push_back(s);
        out.values.push_back(eval(s));
    }
    out.m = out.values.empty() ? 1 : out.values[0].cols();
    out.p = out.values.empty() ? 1 : out.values[0].rows();
    out.conjugate_closed = freqfit::detect_conjugate_closed(out);
    freqfit::save_dataset(out, opt.output, freqfit::format_from_path(opt.output));
    std::cout << "eval points=" << out.size() << " output=" << opt.output << "\n";
}

void cmd_poles(const CliOptions& opt)
{
    const AnyModel mdl = load_any_model(opt.model_path);
    json doc;
    doc["poles"] = json::array();
    Index stable = 0, total = 0;
    if (opt.dominance)
    {
        StateSpaceModel ss;
        if (mdl.ss)
        {
            ss = *mdl.ss;
        }
        else
        {
            ss = freqfit::realize(*mdl.bary);  // strictly proper only
        }
        const freqfit::DominanceTable table = freqfit::dominance(ss);
        for (const freqfit::DominanceEntry& e : table.entries)
        {
            doc["poles"].push_back(json{{"re", e.eigenvalue.real()},
                                        {"im", e.eigenvalue.imag()},
                                        {"stable", e.stable},
                                        {"dominance", e.dominance}});
            stable += e.stable ? 1 : 0;
            total++;
        }
        doc["infinite_count"] = table.infinite_count;
        doc["excluded_imaginary"] = json::array();
        for (const Complex& z : table.excluded_imaginary)
        {
            doc["excluded_imaginary"].push_back(json::array({z.real(), z.imag()}));
        }
    }
    else
    {
        for (const freqfit::PoleInfo& p : mdl.poles())
        {
            doc["poles"].push_back(json{{"re", p.value.real()},
                                        {"im", p.value.imag()},
                                        {"stable", p.stable},
                                        {"infinite", p.infinite}});
            if (!p.infinite)
            {
                stable += p.stable ? 1 : 0;
                total++;
            }
        }
    }
    std::ofstream outf(opt.output);
    if (!outf)
    {
        throw FormatError("cannot open '" + opt.output + "' for writing");
    }
    outf << doc.dump(2) << "\n";
    std::cout << "poles total=" << total << " stable=" << stable
              << " unstable=" << (total - stable) << " output=" << opt.output
              << "\n";
}

void cmd_gen(const CliOptions& opt)
{
    std::vector<double> grid = parse_real_list(opt.grid);
    if (opt.hz)
    {
        for (double& f : grid)
        {
            f *= kTwoPi;
        }
    }
    auto [d, truth] =
        freqfit::generate_synthetic(opt.gen_order, opt.gen_m, opt.gen_p, grid, opt.seed);
    if (opt.closed)
    {
        d = freqfit::conjugate_close(d);
    }
    freqfit::save_dataset(d, opt.output, freqfit::format_from_path(opt.output));
    if (!opt.model_out.empty())
    {
        freqfit::save_model(truth, opt.model_out);
    }
    std::cout << "gen order=" << opt.gen_order << " samples=" << d.size()
              << " seed=" << opt.seed << " output=" << opt.output << "\n";
}

void emit_error(const std::string& type, const std::string& message)
{
    json doc;
    doc["error"] = json{{"type", type}, {"message", message}};
    std::cerr << doc.dump() << "\n";
}

const char* kind_name(Error::Kind k)
{
    switch (k)
    {
        case Error::Kind::Format:
            return "format";
        case Error::Kind::Validation:
            return "validation";
        default:
            return "numerical";
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Rational and LTI surrogate fitting from frequency-response data"};
    app.require_subcommand(1);
    CliOptions opt;

    CLI::App* fit = app.add_subcommand("fit", "Fit a surrogate model to a dataset");
    fit->add_option("-i,--input", opt.input, "dataset file (.csv or .json)")
        ->required();
    fit->add_option("-m,--method", opt.method, "fitting method")
        ->required()
        ->check(CLI::IsMember(
            {"loewner-svd", "ls-loewner", "aaa", "aaa-sp", "lfpp", "lfapp"}));
    fit->add_option("-r,--order", opt.order, "target order (aaa: support cap)");
    fit->add_option("-t,--tol", opt.tol,
                    "truncation tolerance (aaa: convergence tolerance)");
    fit->add_option("-o,--output", opt.model_path, "model output file")
        ->default_val("model.json");
    fit->add_option("--report", opt.report_path, "fit report output (JSON)")
        ->default_val("report.json");
    fit->add_option("--report-csv", opt.report_csv, "pointwise error table (CSV)");
    fit->add_option("--real", opt.real, "realification: auto, on, off")
        ->default_val("auto")
        ->check(CLI::IsMember({"auto", "on", "off"}));
    fit->add_option("--point-mode", opt.point_mode,
                    "CUR point selection: merged, left, right")
        ->default_val("merged")
        ->check(CLI::IsMember({"merged", "left", "right"}));
    fit->add_option("--poles", opt.poles, "lfpp: pole list, a+bj literals");
    fit->add_option("--nodes", opt.nodes, "lfpp: node list, a+bj literals");
    fit->add_option("--peaks", opt.peaks,
                    "lfapp: peak frequencies (switches to the modified mode)");
    fit->add_option("--svd-tol", opt.svd_tol, "lfapp: surrogate truncation tolerance")
        ->default_val(1e-12);
    fit->add_option("--surrogate-order", opt.surrogate_order,
                    "lfapp: truncate the surrogate to this order instead of by "
                    "tolerance (denoises the eigenvalue pool on noisy data)")
        ->check(CLI::NonNegativeNumber);
    fit->add_flag("--absolute", opt.absolute_error, "aaa: absolute error criterion");
    fit->add_flag("--include-unstable", opt.include_unstable,
                  "lfapp: allow unstable surrogate poles");
    fit->add_flag("--hz", opt.hz, "interpret poles, nodes, peaks in Hz (scale by 2*pi)");

    CLI::App* sweep =
        app.add_subcommand("sweep", "Error-versus-order table across methods");
    sweep->add_option("-i,--input", opt.input, "dataset file")->required();
    sweep->add_option("--methods", opt.methods, "comma-separated method list")
        ->default_val("loewner-svd,ls-loewner");
    sweep->add_option("--orders", opt.orders, "orders, e.g. 2,4,6 or 6:2:60")
        ->required();
    sweep->add_option("-o,--output", opt.output, "CSV output file")
        ->default_val("sweep.csv");
    sweep->add_option("--point-mode", opt.point_mode,
                      "CUR point selection: merged, left, right")
        ->default_val("merged")
        ->check(CLI::IsMember({"merged", "left", "right"}));

    CLI::App* noise = app.add_subcommand("noise", "Perturb a dataset multiplicatively");
    noise->add_option("-i,--input", opt.input, "dataset file")->required();
    noise->add_option("-o,--output", opt.output, "perturbed dataset output")
        ->required();
    noise->add_option("--sigma2", opt.sigma2, "noise variance")->required();
    noise->add_option("--mean", opt.mean, "noise mean, a+bj literal")
        ->default_val("0");
    noise->add_option("--seed", opt.seed, "RNG seed")->default_val(0);

    CLI::App* eval = app.add_subcommand("eval", "Evaluate a model on a frequency grid");
    eval->add_option("--model", opt.model_path, "model file")->required();
    eval->add_option("--grid", opt.grid, "frequencies, e.g. 0.1:0.1:100")->required();
    eval->add_option("-o,--output", opt.output, "dataset-format output file")
        ->default_val("eval.csv");
    eval->add_flag("--hz", opt.hz, "grid is in Hz (scale by 2*pi)");

    CLI::App* poles = app.add_subcommand("poles", "List the poles of a model");
    poles->add_option("model", opt.model_path, "model file")->required();
    poles->add_option("-o,--output", opt.output, "pole list output (JSON)")
        ->default_val("poles.json");
    poles->add_flag("--dominance", opt.dominance, "rank by eigenvalue dominance");

    CLI::App* gen = app.add_subcommand("gen", "Sample a random stable synthetic model");
    gen->add_option("--order", opt.gen_order, "true model order")->required();
    gen->add_option("-m,--inputs", opt.gen_m, "input count")->default_val(1);
    gen->add_option("-p,--outputs", opt.gen_p, "output count")->default_val(1);
    gen->add_option("--grid", opt.grid, "sampling frequencies")->required();
    gen->add_option("--seed", opt.seed, "RNG seed")->default_val(0);
    gen->add_option("-o,--output", opt.output, "dataset output file")
        ->default_val("synthetic.json");
    gen->add_option("--model-out", opt.model_out, "also save the generating model");
    gen->add_flag("--closed", opt.closed, "conjugate-close the sampled data");
    gen->add_flag("--hz", opt.hz, "grid is in Hz (scale by 2*pi)");

    try
    {
        app.parse(argc, argv);
        if (fit->parsed())
        {
            cmd_fit(opt);
        }
        else if (sweep->parsed())
        {
            cmd_sweep(opt);
        }
        else if (noise->parsed())
        {
            cmd_noise(opt);
        }
        else if (eval->parsed())
        {
            cmd_eval(opt);
        }
        else if (poles->parsed())
        {
            cmd_poles(opt);
        }
        else if (gen->parsed())
        {
            cmd_gen(opt);
        }
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        if (code == 0)
        {
            return 0;  // --help and friends
        }
        emit_error("usage", e.what());
        return 2;
    }
    catch (const Error& e)
    {
        emit_error(kind_name(e.kind()), e.what());
        return e.kind() == Error::Kind::Numerical ? 1 : 2;
    }
    catch (const std::exception& e)
    {
        emit_error("internal", e.what());
        return 1;
    }
    return 0;
}
