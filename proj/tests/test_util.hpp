// SPDX-License-Identifier: Apache-2.0

#ifndef FREQFIT_TEST_UTIL_HPP
#define FREQFIT_TEST_UTIL_HPP

#include "freqfit/types.hpp"

namespace freqfit
{

// Bit-exact matrix equality, usable inside doctest assertions.
inline bool same(const Matrix& a, const Matrix& b)
{
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           (a.array() == b.array()).all();
}

}  // namespace freqfit

#endif  // FREQFIT_TEST_UTIL_HPP
