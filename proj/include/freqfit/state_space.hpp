// SPDX-License-Identifier: Apache-2.0

#ifndef FREQFIT_STATE_SPACE_HPP
#define FREQFIT_STATE_SPACE_HPP

#include <string>
#include <vector>

#include "freqfit/types.hpp"

namespace freqfit
{

/// Descriptor realization (E, A, B, C) with transfer function
/// H(s) = C (sE - A)^{-1} B. An empty E stands for the identity.
struct StateSpaceModel
{
    Matrix E;  // r x r, empty == identity
    Matrix A;  // r x r
    Matrix B;  // r x m
    Matrix C;  // p x r

    bool real = false;  // all imaginary parts are exactly zero

    Index order() const { return A.rows(); }
    Index inputs() const { return B.cols(); }
    Index outputs() const { return C.rows(); }
    bool identity_E() const { return E.size() == 0; }

    /// E as a dense matrix (materializes the identity when absent).
    Matrix descriptor() const;

    void validate() const;
};

/// Evaluates H(s) = C (sE - A)^{-1} B through a pivoted linear solve.
/// Throws EvaluationError when sE - A is singular or has condition
/// estimate beyond kMaxEvalCondition.
Matrix eval_state_space(const StateSpaceModel& mdl, Complex s);

/// The unitary pairing transform J = I_l (x) (1/sqrt(2)) [[I_m, I_m], [-iI_m, iI_m]]
/// for k node blocks of size m (k even, l = k/2).
Matrix pairing_transform(Index k, Index m);

/// Converts a model whose state blocks are arranged in adjacent conjugate
/// pairs into an equivalent real realization via A -> J A J^H, B -> J B,
/// C -> C J^H. `block_size` is the number of states per node (m for
/// barycentric realizations). `node_order` optionally permutes the node
/// blocks first; it must list each block index exactly once, arranged so
/// that blocks (node_order[2i], node_order[2i+1]) are conjugate partners.
/// Throws ValidationError if any imaginary residue exceeds `tol` (the data
/// was not conjugate-consistent).
StateSpaceModel realify(const StateSpaceModel& mdl, Index block_size,
                        const std::vector<Index>& node_order = {}, double tol = 1e-10);

std::string to_json(const StateSpaceModel& mdl);
StateSpaceModel state_space_from_json(const std::string& text);
void save_model(const StateSpaceModel& mdl, const std::string& path);
StateSpaceModel load_state_space(const std::string& path);

}  // namespace freqfit

#endif  // FREQFIT_STATE_SPACE_HPP
