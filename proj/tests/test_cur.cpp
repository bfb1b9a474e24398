// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "freqfit/cur.hpp"
#include "freqfit/errors.hpp"

#include "test_util.hpp"
#include "freqfit/state_space.hpp"

using namespace freqfit;

namespace
{

Matrix random_matrix(Index rows, Index cols, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Matrix mtx(rows, cols);
    for (Index i = 0; i < rows; i++)
    {
        for (Index j = 0; j < cols; j++)
        {
            mtx(i, j) = Complex(unit(rng), unit(rng));
        }
    }
    return mtx;
}

FrequencyDataset sample_siso(const std::function<Complex(Complex)>& f,
                             const std::vector<Complex>& pts)
{
    FrequencyDataset d;
    d.points = pts;
    for (Complex s : pts)
    {
        d.values.push_back(Matrix::Constant(1, 1, f(s)));
    }
    return d;
}

LoewnerPencil pencil_of(const FrequencyDataset& d)
{
    return build_pencil(partition(d, PartitionScheme::Alternate));
}

}  // namespace

TEST_CASE("cur reproduces a low-rank matrix from actual rows and columns")
{
    const Matrix left = random_matrix(8, 2, 1);
    const Matrix right = random_matrix(2, 6, 2);
    const Matrix mtx = left * right;  // rank 2

    const CurResult cur = cur_decompose(mtx, 2);
    REQUIRE(cur.row_indices.size() == 2);
    REQUIRE(cur.col_indices.size() == 2);
    CHECK_FALSE(cur.rank_warning);
    CHECK(cur.residual(mtx) < 1e-12 * mtx.norm());

    for (Index j = 0; j < 2; j++)
    {
        CHECK(same(cur.C.col(j), mtx.col(cur.col_indices[j])));
        CHECK(same(cur.R.row(j), mtx.row(cur.row_indices[j])));
    }
}

TEST_CASE("cur warns when k exceeds the numerical rank")
{
    const Matrix mtx = random_matrix(6, 1, 3) * random_matrix(1, 6, 4);  // rank 1
    const CurResult cur = cur_decompose(mtx, 3);
    CHECK(cur.rank_warning);
    CHECK(cur.residual(mtx) < 1e-10 * mtx.norm());

    CHECK_THROWS_AS(cur_decompose(mtx, 0), ValidationError);
    CHECK_THROWS_AS(cur_decompose(mtx, 7), ValidationError);
    CHECK_THROWS_AS(cur_decompose(Matrix::Zero(3, 3), 1), NumericalError);
}

TEST_CASE("deim-style selection picks distinct indices")
{
    const Matrix mtx = random_matrix(10, 10, 5);
    const CurResult cur = cur_decompose(mtx, 6);
    std::vector<Index> rows = cur.row_indices, cols = cur.col_indices;
    std::sort(rows.begin(), rows.end());
    std::sort(cols.begin(), cols.end());
    CHECK(std::adjacent_find(rows.begin(), rows.end()) == rows.end());
    CHECK(std::adjacent_find(cols.begin(), cols.end()) == cols.end());
}

TEST_CASE("merged alternate selection interleaves the sorted candidates")
{
    // Points i, 2i, 3i, 4i with the alternate partition: left {i, 3i},
    // right {2i, 4i}. With every candidate selected the merged order is
    // (i, 2i, 3i, 4i) and every other point is kept: nu = {i, 3i}.
    const auto f = [](Complex s) { return 1.0 / (s + 1.0) + 2.0 / (s + 3.0); };
    const FrequencyDataset d = sample_siso(
        f, {Complex(0, 1), Complex(0, 2), Complex(0, 3), Complex(0, 4)});
    const LoewnerPencil pen = pencil_of(d);

    const auto [nu, chi] = select_points(pen, 2, PointMode::MergedAlternate);
    REQUIRE(nu.size() == 2);
    CHECK(nu[0] == Complex(0, 1));
    CHECK(nu[1] == Complex(0, 3));
    REQUIRE(chi.size() == 2);
    CHECK(chi[0] == Complex(0, 2));
    CHECK(chi[1] == Complex(0, 4));
}

TEST_CASE("left-only and right-only selections draw from one side")
{
    const auto f = [](Complex s) { return 1.0 / (s + 1.0) + 2.0 / (s + 3.0); };
    std::vector<Complex> pts;
    for (int i = 0; i < 10; i++)
    {
        pts.push_back(Complex(0, 0.5 + i));
    }
    const FrequencyDataset d = sample_siso(f, pts);
    const LoewnerPencil pen = pencil_of(d);

    const auto [nu_l, chi_l] = select_points(pen, 2, PointMode::LeftOnly);
    for (Complex s : nu_l)
    {
        CHECK(std::count(pen.left_nodes.begin(), pen.left_nodes.end(), s) == 1);
    }
    const auto [nu_r, chi_r] = select_points(pen, 2, PointMode::RightOnly);
    for (Complex s : nu_r)
    {
        CHECK(std::count(pen.right_nodes.begin(), pen.right_nodes.end(), s) == 1);
    }
    CHECK(nu_l.size() + chi_l.size() == 10);
    CHECK(nu_r.size() + chi_r.size() == 10);
}

TEST_CASE("selection on a conjugate-paired pencil keeps pairs adjacent")
{
    const auto f = [](Complex s) { return 1.0 / (s + 1.0) + 0.5 / (s * s + s + 4.0); };
    std::vector<Complex> pts;
    for (int i = 0; i < 8; i++)
    {
        pts.push_back(Complex(0, 0.4 + 0.7 * i));
    }
    FrequencyDataset half = sample_siso(
        [&f](Complex s) { return 0.5 * (f(s) + std::conj(f(std::conj(s)))); }, pts);
    const FrequencyDataset d = conjugate_close(half);
    const LoewnerPencil pen = pencil_of(d);
    REQUIRE(pen.conjugate_paired);

    const auto [nu, chi] = select_points(pen, 4, PointMode::MergedAlternate);
    REQUIRE(nu.size() == 4);
    for (Index t = 0; t < 2; t++)
    {
        CHECK(nu[2 * t].imag() > 0.0);
        CHECK(nu[2 * t + 1] == std::conj(nu[2 * t]));
    }
    CHECK(nu.size() + chi.size() == 16);
}

TEST_CASE("select_points validates its arguments")
{
    const auto f = [](Complex s) { return 1.0 / (s + 1.0); };
    const FrequencyDataset d = sample_siso(
        f, {Complex(0, 1), Complex(0, 2), Complex(0, 3), Complex(0, 4)});
    const LoewnerPencil pen = pencil_of(d);
    CHECK_THROWS_AS(select_points(pen, 0, PointMode::MergedAlternate), ValidationError);
    CHECK_THROWS_AS(select_points(pen, 4, PointMode::MergedAlternate), ValidationError);
}

TEST_CASE("least-squares weights recover the one-node closed form")
{
    // H(s) = 1/(s+1) with a single node: the strictly proper one-node model
    // w h/(s - nu) / (1 + w/(s - nu)) equals H exactly when w = nu + 1.
    const auto f = [](Complex s) { return 1.0 / (s + 1.0); };
    std::vector<Complex> pts;
    for (int i = 0; i < 8; i++)
    {
        pts.push_back(Complex(0, 0.3 + 0.9 * i));
    }
    const FrequencyDataset d = sample_siso(f, pts);
    const LsLoewnerResult res = ls_loewner_fit(d, 1);
    REQUIRE(res.nu.size() == 1);
    CHECK_FALSE(res.rank_deficient);
    CHECK(res.model.form == BarycentricForm::StrictlyProper);
    const Complex expect = res.nu[0] + 1.0;
    CHECK(std::abs(res.model.weights[0](0, 0) - expect) < 1e-12);

    for (Complex s : {Complex(0, 0.55), Complex(0, 5.5), Complex(1, 1)})
    {
        CHECK(std::abs(eval_barycentric(res.model, s)(0, 0) - f(s)) < 1e-12);
    }
}

TEST_CASE("ls-loewner fits MIMO data")
{
    // Strictly proper 2x2 rational: H(s) = R1/(s+1) + R2/(s+2+i) + conj pair.
    Matrix r1 = random_matrix(2, 2, 7), r2 = random_matrix(2, 2, 8);
    const auto f = [&](Complex s) {
        Matrix h = r1 / (s + 1.0);
        h += r2 / (s - Complex(-2, 1));
        h += r2.conjugate() / (s - Complex(-2, -1));
        return h;
    };
    FrequencyDataset d;
    d.m = 2;
    d.p = 2;
    for (int i = 0; i < 14; i++)
    {
        d.points.push_back(Complex(0, 0.25 + 0.55 * i));
        d.values.push_back(f(d.points.back()));
    }

    const LsLoewnerResult res = ls_loewner_fit(d, 3);
    CHECK(res.model.inputs() == 2);
    CHECK(res.model.outputs() == 2);
    double worst = 0.0;
    for (Index i = 0; i < d.size(); i++)
    {
        worst = std::max(worst,
                         (eval_barycentric(res.model, d.points[i]) - d.values[i]).norm() /
                             d.values[i].norm());
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("mimo_ls_weights validates block shapes")
{
    const std::vector<Complex> nodes = {Complex(0, 1)};
    const std::vector<Matrix> values = {Matrix::Ones(2, 2)};
    const std::vector<Complex> res_pts = {Complex(0, 2)};
    const std::vector<Matrix> res_vals = {Matrix::Ones(1, 2)};
    CHECK_THROWS_AS(mimo_ls_weights(nodes, values, res_pts, res_vals), ValidationError);
    CHECK_THROWS_AS(mimo_ls_weights(nodes, values, {}, {}), ValidationError);
}
