// SPDX-License-Identifier: Apache-2.0

#ifndef FREQFIT_DATASET_HPP
#define FREQFIT_DATASET_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "freqfit/state_space.hpp"
#include "freqfit/types.hpp"

namespace freqfit
{

enum class FileFormat
{
    Csv,
    Json,
};

/// Sampled transfer-function data: points s_i (typically i*omega_i) and the
/// corresponding p x m response blocks H(s_i).
struct FrequencyDataset
{
    std::vector<Complex> points;
    std::vector<Matrix> values;  // each p x m
    Index m = 1;                 // inputs
    Index p = 1;                 // outputs

    // Every point with nonzero imaginary part has its conjugate present with
    // the conjugated value. Maintained by loaders and conjugate_close().
    bool conjugate_closed = false;

    Index size() const { return static_cast<Index>(points.size()); }
    bool siso() const { return m == 1 && p == 1; }

    /// Checks all invariants (distinct points, consistent block shapes,
    /// closure when flagged). Throws ValidationError on violation.
    void validate() const;

    /// Index of the conjugate partner of point i, or -1 if none is present.
    /// A real point is its own partner.
    std::vector<Index> partner_indices() const;
};

bool detect_conjugate_closed(const FrequencyDataset& d);

/// Multiplicative complex-normal perturbation H -> H (1 + Z),
/// Z ~ CN(mean, sigma2) with independent Re/Im parts of variance sigma2/2.
struct NoiseSpec
{
    Complex mean = 0.0;
    double sigma2 = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

FrequencyDataset load_dataset(const std::string& path, FileFormat format);
void save_dataset(const FrequencyDataset& d, const std::string& path, FileFormat format);

/// Deduces the format from the file extension (.csv / .json).
FileFormat format_from_path(const std::string& path);

/// Adds the missing conjugate samples so that the result is conjugate-closed.
/// Original samples keep their order; new points are appended. A point whose
/// conjugate is already present with a non-conjugate value raises
/// ValidationError.
FrequencyDataset conjugate_close(const FrequencyDataset& d);

/// Applies multiplicative noise. On conjugate-closed data the draws happen on
/// the upper-half-plane samples only and are mirrored onto the partners, so
/// the result stays conjugate-closed. Deterministic for a fixed seed.
FrequencyDataset add_noise(const FrequencyDataset& d, const NoiseSpec& n);

/// Builds a random stable real LTI model of the requested order and samples
/// its transfer function at s = i*omega over `grid`. Returns the samples and
/// the generating model.
std::pair<FrequencyDataset, StateSpaceModel> generate_synthetic(
    Index order, Index m, Index p, const std::vector<double>& grid, std::uint64_t seed);

}  // namespace freqfit

#endif  // FREQFIT_DATASET_HPP
