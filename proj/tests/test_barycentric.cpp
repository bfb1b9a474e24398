// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "freqfit/barycentric.hpp"
#include "freqfit/errors.hpp"

#include "test_util.hpp"

using namespace freqfit;

namespace
{

BarycentricModel scalar_model(std::vector<Complex> nodes, std::vector<Complex> values,
                              std::vector<Complex> weights, BarycentricForm form)
{
    BarycentricModel b;
    b.nodes = std::move(nodes);
    b.form = form;
    for (std::size_t i = 0; i < b.nodes.size(); i++)
    {
        b.node_values.push_back(Matrix::Constant(1, 1, values[i]));
        b.weights.push_back(Matrix::Constant(1, 1, weights[i]));
    }
    return b;
}

BarycentricModel random_strictly_proper(Index k, Index m, Index p, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    BarycentricModel b;
    b.form = BarycentricForm::StrictlyProper;
    for (Index i = 0; i < k; i++)
    {
        b.nodes.push_back(Complex(unit(rng), 1.0 + i + 0.3 * unit(rng)));
        Matrix val(p, m), w(m, m);
        for (Index r = 0; r < p; r++)
        {
            for (Index c = 0; c < m; c++)
            {
                val(r, c) = Complex(unit(rng), unit(rng));
            }
        }
        for (Index r = 0; r < m; r++)
        {
            for (Index c = 0; c < m; c++)
            {
                w(r, c) = Complex(unit(rng), unit(rng));
            }
        }
        b.node_values.push_back(val);
        b.weights.push_back(w);
    }
    return b;
}

}  // namespace

TEST_CASE("one-node strictly proper model matches hand values")
{
    // lambda = 1, h = 1/2, w = 2: realization A = [-1], B = [2], C = [1/2].
    const BarycentricModel b =
        scalar_model({Complex(1, 0)}, {Complex(0.5, 0)}, {Complex(2, 0)},
                     BarycentricForm::StrictlyProper);
    b.validate();

    const StateSpaceModel mdl = realize(b);
    CHECK(mdl.A(0, 0) == Complex(-1, 0));
    CHECK(mdl.B(0, 0) == Complex(2, 0));
    CHECK(mdl.C(0, 0) == Complex(0.5, 0));
    CHECK(mdl.identity_E());

    CHECK(eval_barycentric(b, Complex(0, 0))(0, 0) == Complex(1, 0));
    // At s = 1+i: w h/(s-1) / (1 + w/(s-1)) = (2-i)/5.
    const Complex direct = eval_barycentric(b, Complex(1, 1))(0, 0);
    CHECK(std::abs(direct - Complex(0.4, -0.2)) < 1e-15);
    const Complex wood = eval_woodbury(b, Complex(1, 1))(0, 0);
    CHECK(std::abs(wood - Complex(0.4, -0.2)) < 1e-14);
}

TEST_CASE("evaluation at a node returns the node value")
{
    const BarycentricModel b =
        scalar_model({Complex(0, 1), Complex(0, 2)}, {Complex(3, 0), Complex(5, 0)},
                     {Complex(1, 0), Complex(-2, 0)}, BarycentricForm::StrictlyProper);
    CHECK(eval_barycentric(b, Complex(0, 1))(0, 0) == Complex(3, 0));
    // Within the proximity window the node value is still used.
    CHECK(eval_barycentric(b, Complex(0, 1 + 4e-15))(0, 0) == Complex(3, 0));
    CHECK_THROWS_AS(eval_woodbury(b, Complex(0, 1)), EvaluationError);
}

TEST_CASE("three evaluation paths agree on random models")
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (unsigned trial = 0; trial < 60; trial++)
    {
        const Index k = 1 + trial % 5;
        const Index m = 1 + trial % 3;
        const Index p = 1 + (trial / 3) % 3;
        const BarycentricModel b = random_strictly_proper(k, m, p, 500 + trial);
        const StateSpaceModel mdl = realize(b);
        REQUIRE(mdl.order() == k * m);

        for (int rep = 0; rep < 3; rep++)
        {
            const Complex s(3.0 * unit(rng), 3.0 * unit(rng));
            Matrix direct;
            try
            {
                direct = eval_barycentric(b, s);
            }
            catch (const EvaluationError&)
            {
                continue;  // spurious pole or node hit; no comparison to make
            }
            const Matrix wood = eval_woodbury(b, s);
            const Matrix state = eval_state_space(mdl, s);
            const double scale = std::max(1.0, direct.norm());
            CHECK((direct - wood).norm() / scale < 1e-11);
            CHECK((direct - state).norm() / scale < 1e-11);
        }
    }
}

TEST_CASE("proper form evaluates the classic ratio")
{
    // N(s)/D(s) with nodes {0, 1}, values {2, 3/2}, weights {1, -2} equals
    // (s+2)/(s+1): check away from the nodes.
    const BarycentricModel b =
        scalar_model({Complex(0, 0), Complex(1, 0)}, {Complex(2, 0), Complex(1.5, 0)},
                     {Complex(1, 0), Complex(-2, 0)}, BarycentricForm::Proper);
    b.validate();
    for (Complex s : {Complex(0, 1), Complex(2, 0), Complex(-3, 0.5)})
    {
        const Complex expect = (s + 2.0) / (s + 1.0);
        CHECK(std::abs(eval_barycentric(b, s)(0, 0) - expect) < 1e-13);
    }
    CHECK(eval_barycentric(b, Complex(0, 0))(0, 0) == Complex(2, 0));
    CHECK_THROWS_AS(realize(b), ValidationError);
    CHECK_THROWS_AS(eval_woodbury(b, Complex(0, 1)), ValidationError);
}

TEST_CASE("node-free proper model is the constant")
{
    BarycentricModel b;
    b.form = BarycentricForm::Proper;
    b.constant = Complex(3, -1);
    b.validate();
    CHECK(eval_barycentric(b, Complex(0, 7))(0, 0) == Complex(3, -1));
    CHECK_THROWS_AS(realize(b), ValidationError);
}

TEST_CASE("validate rejects malformed models")
{
    BarycentricModel empty_sp;
    empty_sp.form = BarycentricForm::StrictlyProper;
    CHECK_THROWS_AS(empty_sp.validate(), ValidationError);

    BarycentricModel dup = scalar_model({Complex(0, 1), Complex(0, 1)},
                                        {Complex(1, 0), Complex(1, 0)},
                                        {Complex(1, 0), Complex(1, 0)},
                                        BarycentricForm::StrictlyProper);
    CHECK_THROWS_AS(dup.validate(), ValidationError);

    BarycentricModel mimo_proper = random_strictly_proper(2, 2, 1, 3);
    mimo_proper.form = BarycentricForm::Proper;
    CHECK_THROWS_AS(mimo_proper.validate(), ValidationError);
}

TEST_CASE("conjugate_pair_order pairs nodes upper-first")
{
    const std::vector<Complex> nodes = {Complex(1, 2), Complex(0, 3), Complex(1, -2),
                                        Complex(0, -3)};
    const std::vector<Index> order = conjugate_pair_order(nodes);
    REQUIRE(order.size() == 4);
    for (Index t = 0; t < 2; t++)
    {
        const Complex a = nodes[order[2 * t]];
        const Complex c = nodes[order[2 * t + 1]];
        CHECK(c == std::conj(a));
    }
    CHECK(order[0] == 0);
    CHECK(order[1] == 2);
    CHECK(order[2] == 1);
    CHECK(order[3] == 3);

    CHECK_THROWS_AS(conjugate_pair_order({Complex(0, 1)}), ValidationError);
    CHECK_THROWS_AS(conjugate_pair_order({Complex(1, 0), Complex(2, 0)}), ValidationError);
    CHECK_THROWS_AS(conjugate_pair_order({Complex(0, 1), Complex(0, 2)}), ValidationError);
}

TEST_CASE("barycentric realification yields a real equivalent model")
{
    // Conjugate-symmetric data: nodes in pairs, conjugated values and weights.
    BarycentricModel b;
    b.form = BarycentricForm::StrictlyProper;
    const std::vector<Complex> uppers = {Complex(0, 1), Complex(0, 2.5)};
    for (Complex lam : uppers)
    {
        const Complex h(0.7, -0.4), w(1.1, 0.6);
        b.nodes.push_back(lam);
        b.node_values.push_back(Matrix::Constant(1, 1, h));
        b.weights.push_back(Matrix::Constant(1, 1, w));
        b.nodes.push_back(std::conj(lam));
        b.node_values.push_back(Matrix::Constant(1, 1, std::conj(h)));
        b.weights.push_back(Matrix::Constant(1, 1, std::conj(w)));
    }

    const StateSpaceModel real_mdl = realify(b);
    CHECK(real_mdl.real);
    CHECK(real_mdl.A.imag().norm() == 0.0);
    for (double w : {0.4, 1.8, 3.3})
    {
        const Complex s(0, w);
        const Matrix ref = eval_barycentric(b, s);
        const Matrix got = eval_state_space(real_mdl, s);
        CHECK((ref - got).norm() / ref.norm() < 1e-12);
    }
}

TEST_CASE("barycentric json round trip is exact")
{
    const BarycentricModel b = random_strictly_proper(3, 2, 2, 77);
    const std::string path = "/tmp/freqfit_test_bary.json";
    save_model(b, path);
    const BarycentricModel back = load_barycentric(path);
    REQUIRE(back.size() == 3);
    CHECK(back.form == b.form);
    for (Index i = 0; i < 3; i++)
    {
        CHECK(back.nodes[i] == b.nodes[i]);
        CHECK(same(back.node_values[i], b.node_values[i]));
        CHECK(same(back.weights[i], b.weights[i]));
    }
    std::remove(path.c_str());

    // The node-free constant survives the round trip as well.
    BarycentricModel flat;
    flat.form = BarycentricForm::Proper;
    flat.constant = Complex(0.25, -8);
    const BarycentricModel flat_back = barycentric_from_json(to_json(flat));
    CHECK(flat_back.constant == flat.constant);
    CHECK(flat_back.size() == 0);
}
