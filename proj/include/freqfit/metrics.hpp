// SPDX-License-Identifier: Apache-2.0

#ifndef FREQFIT_METRICS_HPP
#define FREQFIT_METRICS_HPP

#include <functional>
#include <string>
#include <vector>

#include "freqfit/barycentric.hpp"
#include "freqfit/dataset.hpp"
#include "freqfit/state_space.hpp"
#include "freqfit/types.hpp"

namespace freqfit
{

/// Transfer-function evaluation abstraction over the model kinds.
using Evaluator = std::function<Matrix(Complex)>;

Evaluator evaluator(const StateSpaceModel& mdl);
Evaluator evaluator(const BarycentricModel& b);

/// Grid-approximated relative L-infinity error
///   eps = max_i ||H_i - Hhat_i||_2 / max_i ||H_i||_2
/// with matrix 2-norms per frequency.
double linf_error(const FrequencyDataset& reference, const Evaluator& eval);

struct PointError
{
    Complex s;
    double abs_err;  // ||H - Hhat||_2 at s
    double rel_err;  // abs_err / max_i ||H_i||_2
};

/// Per-point errors over the reference grid. With skip_nodes, points within
/// 1e-12 * (1 + |node|) of an interpolation node are left out.
std::vector<PointError> pointwise_errors(const FrequencyDataset& reference,
                                         const Evaluator& eval, bool skip_nodes = false,
                                         const std::vector<Complex>& nodes = {});

struct PoleInfo
{
    Complex value;
    bool stable = false;
    bool infinite = false;       // infinite generalized eigenvalue
    double dominance = -1.0;     // < 0 when not computed
};

std::vector<PoleInfo> pole_report(const StateSpaceModel& mdl);
std::vector<PoleInfo> pole_report(const BarycentricModel& b);

/// Fit summary: epsilon(r), the pointwise errors it was computed from, the
/// surrogate's poles, and conditioning diagnostics.
struct FitReport
{
    std::string method;
    Index order = 0;
    std::vector<PointError> errors;
    double ref_scale = 0.0;  // max_i ||H_i||_2 over the grid
    double linf = 0.0;
    std::vector<PoleInfo> poles;
    RealVector svd_row_spectrum;  // Loewner truncation diagnostics, optional
    RealVector svd_col_spectrum;
    double cauchy_condition = -1.0;  // < 0 when not applicable
    std::vector<std::string> notes;

    /// Checks linf against the stored pointwise errors (recomputability).
    void validate() const;
};

FitReport make_report(const std::string& method, Index order,
                      const FrequencyDataset& reference, const Evaluator& eval,
                      const std::vector<Complex>& nodes = {});

std::string to_json(const FitReport& rep);
void save_report(const FitReport& rep, const std::string& path);

/// Tabular export: omega,abs_err,rel_err rows for plotting.
void save_report_csv(const FitReport& rep, const std::string& path);

}  // namespace freqfit

#endif  // FREQFIT_METRICS_HPP
