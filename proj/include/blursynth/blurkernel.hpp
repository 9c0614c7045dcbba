#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "blursynth/rng.hpp"

namespace blursynth {

/// Odd-sized square point spread function, non-negative with unit mass.
class BlurKernel {
public:
    /// Takes size*size row-major weights. Throws ArgumentError if size is not
    /// a positive odd number, the data length is off, or an entry is negative
    /// or non-finite. The weights are stored as given (not renormalized).
    BlurKernel(int size, std::vector<double> data);

    /// 1x1 identity kernel.
    static BlurKernel delta();

    int size() const noexcept { return size_; }
    int radius() const noexcept { return size_ / 2; }
    double at(int x, int y) const noexcept { return data_[static_cast<std::size_t>(y) * size_ + x]; }
    std::span<const double> data() const noexcept { return data_; }
    double sum() const noexcept;

    friend bool operator==(const BlurKernel&, const BlurKernel&) = default;

private:
    int size_;
    std::vector<double> data_;
};

/// Per-pixel backward offsets over a k x k kernel grid.
struct DisplacementField {
    int size = 0;
    std::vector<double> dx;
    std::vector<double> dy;

    static DisplacementField zero(int size);
    double max_magnitude() const noexcept;
};

enum class BlurKind { defocus, motion };

std::string_view to_string(BlurKind kind) noexcept;
/// Throws ArgumentError for anything other than "defocus" / "motion".
BlurKind parse_blur_kind(std::string_view text);

/// One randomized blur event. The elastic field is carried by its generator
/// parameters (seed, amplitude, smoothness) so the kernel can be re-realized
/// bit-exactly from a manifest record.
struct BlurSpec {
    BlurKind kind = BlurKind::defocus;
    double sigma = 0.0;        // defocus
    int length = 1;            // motion, m
    double angle = 0.0;        // motion, degrees in [0, 360)
    std::uint64_t elastic_seed = 0;
    double elastic_amplitude = 0.0;   // pixels
    double elastic_smoothness = 1.0;  // pixels

    /// Throws ArgumentError when the fields violate the kind's invariants.
    void validate() const;
    DisplacementField elastic_field() const;
    friend bool operator==(const BlurSpec&, const BlurSpec&) = default;
};

/// Parameter ranges for sample_blur_spec. Elastic amplitude and smoothness
/// are fractions of the line length m.
struct BlurRanges {
    double motion_ratio = 0.5;
    double sigma_min = 1.0;
    double sigma_max = 5.0;
    int length_min = 5;
    int length_max = 31;
    double elastic_amplitude_max = 0.25;
    double elastic_smoothness = 0.25;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Sampled Gaussian with radius ceil(3 sigma), renormalized. Built as the
/// outer product of the normalized 1D profile, so it is exactly separable.
BlurKernel gaussian_kernel(double sigma);

/// Horizontal line of m taps of 1/m, centered in a k = m (odd) or m + 1
/// (even) grid; even lengths leave the last column empty.
BlurKernel linear_motion_kernel(int length);

/// Bilinear rotation about the center, counter-clockwise as displayed
/// (y axis pointing down). Multiples of 90 degrees are exact permutations.
BlurKernel rotate_kernel(const BlurKernel& kernel, double degrees);

/// Backward warp out(x,y) = K(x+dx, y+dy), bilinear, zero outside the support.
/// Throws DegenerateKernelError if no mass survives.
BlurKernel elastic_deform_kernel(const BlurKernel& kernel, const DisplacementField& field);

/// Uniform [-1,1] noise (all dx, then all dy), Gaussian-smoothed with
/// reflect-101 borders and rescaled so the largest displacement equals
/// amplitude. amplitude must not exceed size/2.
DisplacementField random_displacement_field(int size, double amplitude, double smoothness, Rng& rng);

/// Draw order: kind; then sigma (defocus) or m, alpha, elastic seed, amplitude
/// scale (motion).
BlurSpec sample_blur_spec(const BlurRanges& ranges, Rng& rng);

BlurKernel realize_kernel(const BlurSpec& spec);

}  // namespace blursynth
