#pragma once

#include <vector>

#include "blursynth/image.hpp"

namespace blursynth {

/// Non-learned blurriness map in [0,1], higher = more blurred.
///
/// For every scale s the luma is smoothed with gaussian_kernel(s) and the
/// central-difference gradient magnitude e_s is taken; e is the mean over
/// scales, pooled over a Gaussian window of `pooling` pixels (0 disables
/// pooling). The output is 1 - e / (e + eps) with eps the image mean of e,
/// so the map is invariant to global contrast. A gradient-free image maps
/// to 1 everywhere.
Image sharpness_map(const Image& img, const std::vector<double>& scales = {1.0, 2.0}, double pooling = 4.0);

}  // namespace blursynth
