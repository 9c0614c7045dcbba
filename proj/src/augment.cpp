#include "blursynth/augment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blursynth/error.hpp"
#include "blursynth/resample.hpp"

namespace blursynth {

namespace {

void require(bool ok, const char* field, const char* why)
{
    if (!ok)
        throw ConfigError(std::string(field) + ": " + why);
}

}  // namespace

void AffineRanges::validate() const
{
    require(max_rotation >= 0.0 && max_rotation <= 180.0, "max_rotation", "must be in [0, 180]");
    require(max_translation >= 0.0 && max_translation <= 1.0, "max_translation", "must be in [0, 1]");
    require(min_scale > 0.0, "min_scale", "must be > 0");
    require(max_scale >= min_scale, "max_scale", "must be >= min_scale");
    require(hflip_probability >= 0.0 && hflip_probability <= 1.0, "hflip_probability", "must be in [0, 1]");
}

void JitterRanges::validate() const
{
    require(brightness_min >= 0.0 && brightness_max >= brightness_min, "brightness", "need 0 <= min <= max");
    require(contrast_min >= 0.0 && contrast_max >= contrast_min, "contrast", "need 0 <= min <= max");
    require(saturation_min >= 0.0 && saturation_max >= saturation_min, "saturation", "need 0 <= min <= max");
}

void CropRanges::validate() const
{
    require(min_fraction > 0.0 && min_fraction <= 1.0, "crop_min", "must be in (0, 1]");
    require(max_fraction >= min_fraction && max_fraction <= 1.0, "crop_max", "must be in [crop_min, 1]");
    require(output_width > 0 && output_height > 0, "output_size", "must be positive");
}

void JpegRanges::validate() const
{
    require(probability >= 0.0 && probability <= 1.0, "jpeg_probability", "must be in [0, 1]");
    require(quality_min >= 1 && quality_max <= 100 && quality_min <= quality_max, "jpeg_quality",
            "need 1 <= min <= max <= 100");
}

SamplePairView apply_affine(const Image& img, const BinaryMask& mask, const AffineParams& params)
{
    if (!mask.same_size(img))
        throw ArgumentError("affine: image and mask dimensions differ");
    if (!(params.scale > 0.0))
        throw ArgumentError("affine scale must be > 0");
    const int w = img.width(), h = img.height();
    const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
    double s = 0.0, c = 1.0;
    sincos_degrees(params.rotation, s, c);

    Image out(w, h, img.channels());
    BinaryMask out_mask(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double ux = (x - cx - params.tx) / params.scale;
            const double uy = (y - cy - params.ty) / params.scale;
            double qx = cx + (c * ux - s * uy);
            const double qy = cy + (s * ux + c * uy);
            if (params.hflip)
                qx = (w - 1) - qx;
            for (int ch = 0; ch < img.channels(); ++ch)
                out.at(x, y, ch) = sample_bilinear(img, qx, qy, ch);
            const double mx = std::floor(qx + 0.5), my = std::floor(qy + 0.5);
            if (mx >= 0 && my >= 0 && mx < w && my < h)
                out_mask.at(x, y) = mask.at(static_cast<int>(mx), static_cast<int>(my)) ? 1 : 0;
        }
    return {std::move(out), std::move(out_mask)};
}

AffineParams sample_affine(const AffineRanges& ranges, int width, int height, Rng& rng)
{
    ranges.validate();
    AffineParams p;
    p.rotation = rng.uniform(-ranges.max_rotation, ranges.max_rotation);
    p.tx = rng.uniform(-ranges.max_translation, ranges.max_translation) * width;
    p.ty = rng.uniform(-ranges.max_translation, ranges.max_translation) * height;
    p.scale = rng.uniform(ranges.min_scale, ranges.max_scale);
    p.hflip = rng.uniform() < ranges.hflip_probability;
    return p;
}

SamplePairView random_affine(const Image& img, const BinaryMask& mask, const AffineRanges& ranges, Rng& rng)
{
    return apply_affine(img, mask, sample_affine(ranges, img.width(), img.height(), rng));
}

Image apply_color_jitter(const Image& img, const JitterFactors& f)
{
    Image out = img;
    for (auto& v : out.data())
        v = std::clamp(v * f.brightness, 0.0, 1.0);
    for (auto& v : out.data())
        v = std::clamp(0.5 + f.contrast * (v - 0.5), 0.0, 1.0);
    if (out.channels() == 3) {
        auto d = out.data();
        for (std::size_t p = 0; p < out.pixel_count(); ++p) {
            double* px = &d[3 * p];
            const double l = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
            for (int c = 0; c < 3; ++c)
                px[c] = std::clamp(l + f.saturation * (px[c] - l), 0.0, 1.0);
        }
    }
    return out;
}

Image color_jitter(const Image& img, const JitterRanges& ranges, Rng& rng)
{
    ranges.validate();
    JitterFactors f;
    f.brightness = rng.uniform(ranges.brightness_min, ranges.brightness_max);
    f.contrast = rng.uniform(ranges.contrast_min, ranges.contrast_max);
    f.saturation = rng.uniform(ranges.saturation_min, ranges.saturation_max);
    return apply_color_jitter(img, f);
}

SamplePairView crop_resize(const Image& img, const BinaryMask& mask, const CropWindow& window, int out_width,
                           int out_height)
{
    if (!mask.same_size(img))
        throw ArgumentError("crop: image and mask dimensions differ");
    return {resize_bilinear(crop(img, window.x0, window.y0, window.width, window.height), out_width, out_height),
            resize_nearest(crop(mask, window.x0, window.y0, window.width, window.height), out_width, out_height)};
}

CropWindow sample_crop(const CropRanges& ranges, int width, int height, Rng& rng)
{
    ranges.validate();
    if (width < 64 || height < 64)
        throw ArgumentError("crop input must be at least 64 pixels per side, got " + std::to_string(width) + "x" +
                            std::to_string(height));
    const double fx = rng.uniform(ranges.min_fraction, ranges.max_fraction);
    const double fy = rng.uniform(ranges.min_fraction, ranges.max_fraction);
    CropWindow win;
    win.width = std::clamp(static_cast<int>(std::lround(fx * width)), 1, width);
    win.height = std::clamp(static_cast<int>(std::lround(fy * height)), 1, height);
    win.x0 = static_cast<int>(rng.uniform_int(0, width - win.width));
    win.y0 = static_cast<int>(rng.uniform_int(0, height - win.height));
    return win;
}

SamplePairView random_crop_resize(const Image& img, const BinaryMask& mask, const CropRanges& ranges, Rng& rng)
{
    const auto win = sample_crop(ranges, img.width(), img.height(), rng);
    return crop_resize(img, mask, win, ranges.output_width, ranges.output_height);
}

Image jpeg_roundtrip(const Image& img, int quality)
{
    return decode_image(encode_image(img, ImageFormat::jpeg, quality));
}

Image jpeg_augment(const Image& img, const JpegRanges& ranges, Rng& rng)
{
    ranges.validate();
    if (rng.uniform() >= ranges.probability)
        return img;
    const int q = static_cast<int>(rng.uniform_int(ranges.quality_min, ranges.quality_max));
    return jpeg_roundtrip(img, q);
}

}  // namespace blursynth
