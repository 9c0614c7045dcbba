#pragma once

#include "blursynth/blurkernel.hpp"
#include "blursynth/image.hpp"

namespace blursynth {

/// Per-channel 2D correlation with reflect-101 padding, clamped to [0,1].
/// The kernel must be smaller than twice the image in each dimension.
Image convolve(const Image& img, const BlurKernel& kernel);

/// Per-pixel selection: blurred where mask is true, sharp elsewhere.
Image composite(const Image& sharp, const Image& blurred, const BinaryMask& mask);

/// Fast-marching inpainting (Telea). Hole pixels are visited in order of
/// arrival time of the front leaving the hole boundary; each one becomes the
/// weighted mean of first-order estimates I(q) + grad I(q) . (p - q) over
/// known pixels q within `radius`, weighted by direction, distance and
/// level-set closeness. Pixels outside the hole are untouched.
Image inpaint(const Image& img, const BinaryMask& hole, double radius = 5.0);

/// Blur everything, then paste the sharp region back (halo-prone reference).
Image synthesize_naive(const Image& img, const BinaryMask& mask, const BlurKernel& kernel);

/// Inpaint the sharp region, blur the result, composite with the original.
/// Throws DegenerateMaskError when the mask is all-false or all-true.
Image synthesize_halo_free(const Image& img, const BinaryMask& mask, const BlurKernel& kernel,
                           double inpaint_radius = 5.0);

}  // namespace blursynth
