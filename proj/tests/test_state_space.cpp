// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "freqfit/eig.hpp"
#include "freqfit/errors.hpp"

#include "test_util.hpp"
#include "freqfit/state_space.hpp"

using namespace freqfit;

namespace
{

StateSpaceModel scalar_model(Complex a, Complex b, Complex c)
{
    StateSpaceModel mdl;
    mdl.A = Matrix::Constant(1, 1, a);
    mdl.B = Matrix::Constant(1, 1, b);
    mdl.C = Matrix::Constant(1, 1, c);
    return mdl;
}

// Conjugate-symmetric diagonal model: pairs (lambda, conj lambda) with
// conjugated rows of B and columns of C. Its transfer function is real on the
// real axis and realifies exactly.
StateSpaceModel paired_model(Index pairs, Index m, Index p, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const Index k = 2 * pairs;
    StateSpaceModel mdl;
    mdl.A = Matrix::Zero(k, k);
    mdl.B = Matrix::Zero(k, m);
    mdl.C = Matrix::Zero(p, k);
    for (Index t = 0; t < pairs; t++)
    {
        const Complex lambda(-0.2 - std::abs(unit(rng)), 1.0 + t + 0.3 * unit(rng));
        mdl.A(2 * t, 2 * t) = lambda;
        mdl.A(2 * t + 1, 2 * t + 1) = std::conj(lambda);
        for (Index j = 0; j < m; j++)
        {
            const Complex b(unit(rng), unit(rng));
            mdl.B(2 * t, j) = b;
            mdl.B(2 * t + 1, j) = std::conj(b);
        }
        for (Index i = 0; i < p; i++)
        {
            const Complex c(unit(rng), unit(rng));
            mdl.C(i, 2 * t) = c;
            mdl.C(i, 2 * t + 1) = std::conj(c);
        }
    }
    return mdl;
}

}  // namespace

TEST_CASE("transfer function evaluation matches hand values")
{
    const StateSpaceModel mdl = scalar_model(-1.0, 1.0, 1.0);  // H(s) = 1/(s+1)
    CHECK(eval_state_space(mdl, Complex(1, 0))(0, 0) == Complex(0.5, 0.0));
    CHECK(eval_state_space(mdl, Complex(0, 1))(0, 0) == Complex(0.5, -0.5));
}

TEST_CASE("descriptor E scales the frequency variable")
{
    StateSpaceModel mdl = scalar_model(-1.0, 1.0, 1.0);
    mdl.E = Matrix::Constant(1, 1, 2.0);  // H(s) = 1/(2s+1)
    CHECK_FALSE(mdl.identity_E());
    CHECK(same(mdl.descriptor(), Matrix::Constant(1, 1, 2.0)));
    CHECK(eval_state_space(mdl, Complex(0.5, 0))(0, 0) == Complex(0.5, 0.0));
}

TEST_CASE("evaluation at a pole raises EvaluationError")
{
    const StateSpaceModel mdl = scalar_model(-1.0, 1.0, 1.0);
    CHECK_THROWS_AS(eval_state_space(mdl, Complex(-1, 0)), EvaluationError);
}

TEST_CASE("validate rejects inconsistent shapes")
{
    StateSpaceModel mdl = scalar_model(-1.0, 1.0, 1.0);
    CHECK_NOTHROW(mdl.validate());
    mdl.B = Matrix::Zero(2, 1);
    CHECK_THROWS_AS(mdl.validate(), ValidationError);
}

TEST_CASE("pairing transform is unitary")
{
    for (auto [k, m] : {std::pair<Index, Index>{2, 1}, {4, 2}, {6, 3}})
    {
        const Matrix j = pairing_transform(k, m);
        REQUIRE(j.rows() == k * m);
        REQUIRE(j.cols() == k * m);
        const Matrix gram = j * j.adjoint();
        CHECK((gram - Matrix::Identity(k * m, k * m)).norm() < 1e-14);
    }
}

TEST_CASE("realify produces an equivalent real model")
{
    const StateSpaceModel mdl = paired_model(3, 2, 2, 17);
    const StateSpaceModel real_mdl = realify(mdl, 1);
    CHECK(real_mdl.real);
    CHECK(real_mdl.A.imag().norm() == 0.0);
    CHECK(real_mdl.B.imag().norm() == 0.0);
    CHECK(real_mdl.C.imag().norm() == 0.0);

    for (double w : {0.3, 1.7, 4.2})
    {
        const Complex s(0, w);
        const Matrix before = eval_state_space(mdl, s);
        const Matrix after = eval_state_space(real_mdl, s);
        CHECK((before - after).norm() / before.norm() < 1e-12);
    }
}

TEST_CASE("realify reorders non-adjacent pairs through node_order")
{
    // Interleaved layout: all upper nodes first, conjugates after.
    const StateSpaceModel paired = paired_model(3, 1, 1, 5);
    StateSpaceModel interleaved = paired;
    const std::vector<Index> to_paired = {0, 3, 1, 4, 2, 5};
    for (Index t = 0; t < 6; t++)
    {
        // Position to_paired[t] of the interleaved model holds paired node t.
        interleaved.A(to_paired[t], to_paired[t]) = paired.A(t, t);
        interleaved.B.row(to_paired[t]) = paired.B.row(t);
        interleaved.C.col(to_paired[t]) = paired.C.col(t);
    }

    CHECK_THROWS_AS(realify(interleaved, 1), ValidationError);

    const StateSpaceModel real_mdl = realify(interleaved, 1, to_paired);
    CHECK(real_mdl.real);
    for (double w : {0.9, 2.6})
    {
        const Complex s(0, w);
        const Matrix a = eval_state_space(paired, s);
        const Matrix b = eval_state_space(real_mdl, s);
        CHECK((a - b).norm() / a.norm() < 1e-12);
    }
}

TEST_CASE("realify rejects impossible inputs")
{
    StateSpaceModel odd;
    odd.A = Matrix::Constant(1, 1, Complex(-1, 1));
    odd.B = Matrix::Constant(1, 1, 1.0);
    odd.C = Matrix::Constant(1, 1, 1.0);
    CHECK_THROWS_AS(realify(odd, 1), ValidationError);

    StateSpaceModel broken = paired_model(1, 1, 1, 9);
    broken.B(1, 0) += Complex(0.5, 0.5);  // destroys conjugate symmetry
    CHECK_THROWS_AS(realify(broken, 1), ValidationError);

    const StateSpaceModel ok = paired_model(1, 1, 1, 9);
    CHECK_THROWS_AS(realify(ok, 1, {0, 0}), ValidationError);
}

TEST_CASE("state-space json round trip is exact")
{
    const StateSpaceModel mdl = paired_model(2, 2, 1, 23);
    const std::string path = "/tmp/freqfit_test_model.json";
    save_model(mdl, path);
    const StateSpaceModel back = load_state_space(path);
    CHECK(same(back.A, mdl.A));
    CHECK(same(back.B, mdl.B));
    CHECK(same(back.C, mdl.C));
    CHECK(back.E.size() == 0);
    CHECK(back.real == mdl.real);
    std::remove(path.c_str());
}

TEST_CASE("generalized eigensolver handles diagonal and descriptor pencils")
{
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -2.0;
    const GeneralizedEig eig = generalized_eig(a, Matrix());
    REQUIRE(eig.alpha.size() == 2);
    std::vector<double> re;
    for (Index i = 0; i < 2; i++)
    {
        REQUIRE(eig.finite(i));
        re.push_back(eig.eigenvalue(i).real());
    }
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(-2.0).epsilon(1e-13));
    CHECK(re[1] == doctest::Approx(-1.0).epsilon(1e-13));

    // Singular E produces an infinite eigenvalue.
    Matrix e = Matrix::Zero(2, 2);
    e(0, 0) = 1.0;
    const GeneralizedEig desc = generalized_eig(a, e);
    int infinite = 0;
    for (Index i = 0; i < 2; i++)
    {
        infinite += eig.finite(i) && !desc.finite(i) ? 1 : 0;
    }
    CHECK(infinite == 1);
}

TEST_CASE("generalized eigenvectors satisfy the residual equations")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Matrix a(4, 4), e(4, 4);
    for (Index i = 0; i < 4; i++)
    {
        for (Index j = 0; j < 4; j++)
        {
            a(i, j) = Complex(unit(rng), unit(rng));
            e(i, j) = Complex(unit(rng), unit(rng));
        }
    }
    e += 4.0 * Matrix::Identity(4, 4);  // keep E comfortably regular

    const GeneralizedEig eig = generalized_eig(a, e);
    for (Index i = 0; i < 4; i++)
    {
        REQUIRE(eig.finite(i));
        const Complex lambda = eig.eigenvalue(i);
        const Vector x = eig.right.col(i);
        const Vector y = eig.left.col(i);
        CHECK((a * x - lambda * (e * x)).norm() < 1e-10 * (a.norm() + e.norm()));
        CHECK((y.adjoint() * a - lambda * (y.adjoint() * e)).norm() <
              1e-10 * (a.norm() + e.norm()));
    }
}
