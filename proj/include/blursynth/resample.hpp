#pragma once

#include "blursynth/image.hpp"

namespace blursynth {

/// Reflect-101 border index (…2 1 | 0 1 2 … n-1 | n-2 …); any i, n >= 1.
int reflect101(int i, int n) noexcept;

/// Bilinear read at continuous pixel-center coordinates; reflect-101 outside.
double sample_bilinear(const Image& img, double x, double y, int c) noexcept;

/// Half-pixel-center bilinear resize: src = (dst + 0.5) * scale - 0.5,
/// edge-clamped.
Image resize_bilinear(const Image& img, int width, int height);

/// Nearest-neighbor resize with the same pixel-center mapping.
BinaryMask resize_nearest(const BinaryMask& mask, int width, int height);

Image hflip(const Image& img);
BinaryMask hflip(const BinaryMask& mask);

Image crop(const Image& img, int x0, int y0, int width, int height);
BinaryMask crop(const BinaryMask& mask, int x0, int y0, int width, int height);

/// Exact sine and cosine for multiples of 90 degrees; std::sin/cos otherwise.
void sincos_degrees(double degrees, double& sin_out, double& cos_out) noexcept;

}  // namespace blursynth
