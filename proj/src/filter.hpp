#pragma once

// Internal: 2D correlation of a single plane with reflect-101 borders.

#include <span>
#include <vector>

#include "blursynth/blurkernel.hpp"

namespace blursynth::detail {

/// out(x,y) = sum_ij K(i,j) * src(x+i-r, y+j-r) over a width x height plane
/// stored with the given element stride (channel interleave) and offset.
/// Chooses a separable pass for rank-1 kernels and a sparse tap list for
/// kernels with few non-zero weights; all paths are deterministic.
void correlate_plane(std::span<const double> src, std::span<double> dst, int width, int height, int stride,
                     int offset, const BlurKernel& kernel);

/// Row and column factors when kernel(x,y) == col[y] * row[x] to within
/// relative 1e-12; empty vectors otherwise.
struct SeparableFactors {
    std::vector<double> row;
    std::vector<double> col;
    bool valid() const noexcept { return !row.empty(); }
};
SeparableFactors factorize(const BlurKernel& kernel);

}  // namespace blursynth::detail
