#pragma once

#include <utility>

#include "blursynth/image.hpp"
#include "blursynth/rng.hpp"

namespace blursynth {

struct AffineRanges {
    double max_rotation = 15.0;     // degrees, symmetric
    double max_translation = 0.10;  // fraction of each dimension, symmetric
    double min_scale = 0.9;
    double max_scale = 1.1;
    double hflip_probability = 0.5;

    void validate() const;
};

struct AffineParams {
    double rotation = 0.0;  // degrees, counter-clockwise as displayed
    double tx = 0.0;        // pixels
    double ty = 0.0;
    double scale = 1.0;
    bool hflip = false;
};

struct JitterRanges {
    double brightness_min = 0.8, brightness_max = 1.2;
    double contrast_min = 0.8, contrast_max = 1.2;
    double saturation_min = 0.8, saturation_max = 1.2;

    void validate() const;
};

struct JitterFactors {
    double brightness = 1.0;
    double contrast = 1.0;
    double saturation = 1.0;
};

struct CropRanges {
    double min_fraction = 0.6;
    double max_fraction = 1.0;
    int output_width = 224;
    int output_height = 224;

    void validate() const;
};

struct CropWindow {
    int x0 = 0;
    int y0 = 0;
    int width = 0;
    int height = 0;
};

struct JpegRanges {
    double probability = 0.5;
    int quality_min = 30;
    int quality_max = 95;

    void validate() const;
};

using SamplePairView = std::pair<Image, BinaryMask>;

/// Flip first, then rotate/scale about the center and translate. Image is
/// sampled bilinearly with reflect-101 outside the frame; the mask uses
/// nearest neighbor and reads false outside.
SamplePairView apply_affine(const Image& img, const BinaryMask& mask, const AffineParams& params);

/// Draw order: rotation, tx, ty, scale, flip.
AffineParams sample_affine(const AffineRanges& ranges, int width, int height, Rng& rng);

SamplePairView random_affine(const Image& img, const BinaryMask& mask, const AffineRanges& ranges, Rng& rng);

/// brightness v*b, then contrast 0.5 + c*(v - 0.5), then saturation
/// l + s*(v - l) with l the pixel's luma; clamped after each step.
/// Saturation is skipped for single-channel images.
Image apply_color_jitter(const Image& img, const JitterFactors& factors);

Image color_jitter(const Image& img, const JitterRanges& ranges, Rng& rng);

/// Crop the window, then resize (image bilinear, mask nearest).
SamplePairView crop_resize(const Image& img, const BinaryMask& mask, const CropWindow& window, int out_width,
                           int out_height);

/// Per-axis coverage in [min_fraction, max_fraction], uniformly placed.
/// Throws ArgumentError when either side is below 64 pixels.
CropWindow sample_crop(const CropRanges& ranges, int width, int height, Rng& rng);

SamplePairView random_crop_resize(const Image& img, const BinaryMask& mask, const CropRanges& ranges, Rng& rng);

/// Encode at the given quality and decode back.
Image jpeg_roundtrip(const Image& img, int quality);

Image jpeg_augment(const Image& img, const JpegRanges& ranges, Rng& rng);

}  // namespace blursynth
