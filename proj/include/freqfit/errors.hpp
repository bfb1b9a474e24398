// SPDX-License-Identifier: Apache-2.0

#ifndef FREQFIT_ERRORS_HPP
#define FREQFIT_ERRORS_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace freqfit
{

/// Base class for all toolkit errors. `kind()` distinguishes usage/format
/// problems (exit code 2 at the CLI) from numerical failures (exit code 1).
class Error : public std::runtime_error
{
public:
    enum class Kind
    {
        Format,      // malformed input files
        Validation,  // violated preconditions or invariants
        Numerical,   // singular systems, ill-conditioning, non-convergence
    };

    Error(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

class FormatError : public Error
{
public:
    explicit FormatError(const std::string& msg) : Error(Kind::Format, msg) {}
};

class ValidationError : public Error
{
public:
    explicit ValidationError(const std::string& msg) : Error(Kind::Validation, msg) {}
};

class NumericalError : public Error
{
public:
    explicit NumericalError(const std::string& msg) : Error(Kind::Numerical, msg) {}
};

/// Evaluation failure at a specific point of the complex plane.
class EvaluationError : public NumericalError
{
public:
    EvaluationError(const std::string& msg, std::complex<double> point)
        : NumericalError(msg), point_(point)
    {
    }

    std::complex<double> point() const { return point_; }

private:
    std::complex<double> point_;
};

}  // namespace freqfit

#endif  // FREQFIT_ERRORS_HPP
