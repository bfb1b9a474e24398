// SPDX-License-Identifier: Apache-2.0

#ifndef FREQFIT_BARYCENTRIC_HPP
#define FREQFIT_BARYCENTRIC_HPP

#include <string>
#include <vector>

#include "freqfit/state_space.hpp"
#include "freqfit/types.hpp"

namespace freqfit
{

enum class BarycentricForm
{
    StrictlyProper,  // denominator I_m + sum_i W_i/(s - lambda_i)
    Proper,          // classic AAA ratio, SISO scalar weights
};

/// Rational model in barycentric coordinates: nodes lambda_i, node values
/// H(lambda_i) (p x m) and weight blocks W_i (m x m; 1 x 1 for SISO). Both
/// forms interpolate the node values exactly.
struct BarycentricModel
{
    std::vector<Complex> nodes;
    std::vector<Matrix> node_values;  // each p x m
    std::vector<Matrix> weights;      // each m x m
    BarycentricForm form = BarycentricForm::StrictlyProper;

    // Value of the model when there are no nodes (the AAA mean initializer);
    // only a Proper model may be node-free.
    Complex constant = 0.0;

    Index size() const { return static_cast<Index>(nodes.size()); }
    Index inputs() const { return nodes.empty() ? 1 : node_values[0].cols(); }
    Index outputs() const { return nodes.empty() ? 1 : node_values[0].rows(); }

    void validate() const;
};

/// State-space realization of a strictly proper model: C = [H(l_1) ... H(l_k)],
/// B = stacked W_i, A = diag(lambda) (x) I_m - B (1^T (x) I_m), r = k*m.
StateSpaceModel realize(const BarycentricModel& b);

/// Direct barycentric evaluation. Within kNodeProximity of a node the node
/// value is returned (the interpolation limit). Throws EvaluationError at a
/// spurious pole (singular denominator).
Matrix eval_barycentric(const BarycentricModel& b, Complex s);

/// Woodbury-form evaluation C Ls^{-1} B (I_m + R Ls^{-1} B)^{-1}, Ls = sI - L,
/// of a strictly proper model. Must match eval_barycentric to 1e-12.
Matrix eval_woodbury(const BarycentricModel& b, Complex s);

/// Permutation placing the nodes in adjacent conjugate pairs, suitable as
/// `node_order` for realify(). Throws ValidationError when no perfect pairing
/// exists (odd count, unmatched or real node).
std::vector<Index> conjugate_pair_order(const std::vector<Complex>& nodes);

/// Realizes a strictly proper model and converts it to a real state-space
/// form via the pairing transform.
StateSpaceModel realify(const BarycentricModel& b, double tol = 1e-10);

std::string to_json(const BarycentricModel& b);
BarycentricModel barycentric_from_json(const std::string& text);
void save_model(const BarycentricModel& b, const std::string& path);
BarycentricModel load_barycentric(const std::string& path);

}  // namespace freqfit

#endif  // FREQFIT_BARYCENTRIC_HPP
