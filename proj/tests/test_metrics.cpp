// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "freqfit/errors.hpp"
#include "freqfit/metrics.hpp"

using namespace freqfit;

namespace
{

StateSpaceModel one_pole()
{
    StateSpaceModel mdl;  // H(s) = 1/(s+1)
    mdl.A = Matrix::Constant(1, 1, -1.0);
    mdl.B = Matrix::Constant(1, 1, 1.0);
    mdl.C = Matrix::Constant(1, 1, 1.0);
    return mdl;
}

FrequencyDataset siso_data(std::vector<Complex> pts, std::vector<Complex> vals)
{
    FrequencyDataset d;
    d.points = std::move(pts);
    for (Complex v : vals)
    {
        d.values.push_back(Matrix::Constant(1, 1, v));
    }
    return d;
}

}  // namespace

TEST_CASE("linf error of a model against its own samples is zero")
{
    const StateSpaceModel mdl = one_pole();
    FrequencyDataset d;
    for (double w : {0.5, 1.0, 2.0, 4.0})
    {
        d.points.push_back(Complex(0, w));
        d.values.push_back(eval_state_space(mdl, d.points.back()));
    }
    CHECK(linf_error(d, evaluator(mdl)) == 0.0);
}

TEST_CASE("relative errors share the largest reference norm as denominator")
{
    // Reference values with norms {4, 2}; approximations off by 0.1 each:
    // rel = 0.1/4 at both points, linf = 0.025.
    const FrequencyDataset d =
        siso_data({Complex(0, 1), Complex(0, 2)}, {Complex(4, 0), Complex(2, 0)});
    const Evaluator approx = [](Complex s) -> Matrix {
        return Matrix::Constant(1, 1, s == Complex(0, 1) ? Complex(4.1, 0)
                                                         : Complex(1.9, 0));
    };
    const std::vector<PointError> errs = pointwise_errors(d, approx);
    REQUIRE(errs.size() == 2);
    CHECK(errs[0].abs_err == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(errs[1].abs_err == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(errs[0].rel_err == doctest::Approx(0.025).epsilon(1e-12));
    CHECK(errs[1].rel_err == doctest::Approx(0.025).epsilon(1e-12));
    CHECK(linf_error(d, approx) == doctest::Approx(0.025).epsilon(1e-12));
}

TEST_CASE("skip_nodes drops points at the interpolation nodes")
{
    const FrequencyDataset d = siso_data({Complex(0, 1), Complex(0, 2), Complex(0, 3)},
                                         {Complex(1, 0), Complex(2, 0), Complex(3, 0)});
    const Evaluator exact = [&d](Complex s) -> Matrix {
        for (Index i = 0; i < d.size(); i++)
        {
            if (d.points[i] == s)
            {
                return d.values[i];
            }
        }
        return Matrix::Constant(1, 1, Complex(0, 0));
    };
    const std::vector<PointError> errs =
        pointwise_errors(d, exact, true, {Complex(0, 2)});
    REQUIRE(errs.size() == 2);
    CHECK(errs[0].s == Complex(0, 1));
    CHECK(errs[1].s == Complex(0, 3));
}

TEST_CASE("pole report for a state-space model lists stability")
{
    StateSpaceModel mdl;
    mdl.A = Matrix::Zero(2, 2);
    mdl.A(0, 0) = Complex(-1, 2);
    mdl.A(1, 1) = Complex(0.5, -1);
    mdl.B = Matrix::Ones(2, 1);
    mdl.C = Matrix::Ones(1, 2);
    const std::vector<PoleInfo> poles = pole_report(mdl);
    REQUIRE(poles.size() == 2);
    int stable = 0, unstable = 0;
    for (const PoleInfo& info : poles)
    {
        CHECK_FALSE(info.infinite);
        (info.stable ? stable : unstable)++;
    }
    CHECK(stable == 1);
    CHECK(unstable == 1);
}

TEST_CASE("pole report for a proper barycentric model finds denominator zeros")
{
    // Nodes {0, 1}, values {2, 3/2}, weights {1, -2} represent (s+2)/(s+1):
    // exactly one finite pole at -1.
    BarycentricModel b;
    b.form = BarycentricForm::Proper;
    b.nodes = {Complex(0, 0), Complex(1, 0)};
    b.node_values = {Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 1.5)};
    b.weights = {Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, -2.0)};
    b.validate();

    const std::vector<PoleInfo> poles = pole_report(b);
    REQUIRE(poles.size() == 1);
    CHECK(std::abs(poles[0].value - Complex(-1, 0)) < 1e-12);
    CHECK(poles[0].stable);
}

TEST_CASE("pole report for a strictly proper model uses the realization")
{
    BarycentricModel b;
    b.form = BarycentricForm::StrictlyProper;
    b.nodes = {Complex(1, 0)};
    b.node_values = {Matrix::Constant(1, 1, 0.5)};
    b.weights = {Matrix::Constant(1, 1, 2.0)};  // realized A = [-1]
    const std::vector<PoleInfo> poles = pole_report(b);
    REQUIRE(poles.size() == 1);
    CHECK(std::abs(poles[0].value - Complex(-1, 0)) < 1e-13);
}

TEST_CASE("fit report validates its own consistency")
{
    const StateSpaceModel mdl = one_pole();
    FrequencyDataset d;
    for (double w : {0.5, 1.5, 3.0})
    {
        d.points.push_back(Complex(0, w));
        d.values.push_back(eval_state_space(mdl, d.points.back()) +
                           Matrix::Constant(1, 1, 0.01));
    }
    FitReport rep = make_report("loewner-svd", 1, d, evaluator(mdl));
    CHECK(rep.linf > 0.0);
    CHECK(rep.errors.size() == 3);
    CHECK_NOTHROW(rep.validate());
    rep.linf *= 2.0;
    CHECK_THROWS_AS(rep.validate(), ValidationError);
}

TEST_CASE("report serialization emits json and csv")
{
    const StateSpaceModel mdl = one_pole();
    FrequencyDataset d;
    for (double w : {0.5, 1.5})
    {
        d.points.push_back(Complex(0, w));
        d.values.push_back(eval_state_space(mdl, d.points.back()));
    }
    FitReport rep = make_report("aaa", 1, d, evaluator(mdl));
    rep.poles = pole_report(mdl);

    const std::string text = to_json(rep);
    CHECK(text.find("\"method\": \"aaa\"") != std::string::npos);
    CHECK(text.find("\"eps\"") != std::string::npos);

    const std::string path = "/tmp/freqfit_test_report.csv";
    save_report_csv(rep, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "omega,abs_err,rel_err");
    std::string row;
    int rows = 0;
    while (std::getline(in, row))
    {
        double w, abs_e, rel_e;
        REQUIRE(std::sscanf(row.c_str(), "%lf,%lf,%lf", &w, &abs_e, &rel_e) == 3);
        rows++;
    }
    CHECK(rows == 2);
    std::remove(path.c_str());
}

TEST_CASE("zero reference data is rejected")
{
    const FrequencyDataset d = siso_data({Complex(0, 1)}, {Complex(0, 0)});
    CHECK_THROWS_AS(linf_error(d, evaluator(one_pole())), ValidationError);
}
