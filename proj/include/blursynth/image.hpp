#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace blursynth {

/// H x W x C raster of samples in [0,1], row-major with interleaved channels.
/// sRGB code values are used directly as intensities (no linearization).
class Image {
public:
    Image() = default;
    /// Throws ArgumentError on a zero dimension or channels not in {1, 3}.
    Image(int width, int height, int channels, double fill = 0.0);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }

    double& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
    double at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool same_size(const Image& other) const noexcept
    {
        return width_ == other.width_ && height_ == other.height_;
    }

    /// True when every sample is finite and within [0,1].
    bool valid() const noexcept;

    /// Clamp every sample into [0,1].
    void clamp01() noexcept;

    /// Single channel, 0.299 R + 0.587 G + 0.114 B for color input.
    Image luma() const;

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int x, int y, int c) const noexcept
    {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

/// H x W boolean raster; true marks the region to be blurred.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return data_.size(); }

    std::uint8_t& at(int x, int y) noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    bool at(int x, int y) const noexcept { return data_[static_cast<std::size_t>(y) * width_ + x] != 0; }

    /// Flat storage, one byte per pixel holding 0 or 1.
    std::span<std::uint8_t> data() noexcept { return data_; }
    std::span<const std::uint8_t> data() const noexcept { return data_; }

    std::size_t count() const noexcept;
    bool none() const noexcept { return count() == 0; }
    bool all() const noexcept { return count() == data_.size(); }
    BinaryMask complement() const;

    template <class Raster>
    bool same_size(const Raster& other) const noexcept
    {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Integer label raster (class or instance ids), 0 = background.
class LabelMap {
public:
    LabelMap() = default;
    LabelMap(int width, int height, std::uint32_t fill = 0);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    std::uint32_t& at(int x, int y) noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    std::uint32_t at(int x, int y) const noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<std::uint32_t> data() noexcept { return data_; }
    std::span<const std::uint32_t> data() const noexcept { return data_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint32_t> data_;
};

enum class ImageFormat { png, jpeg };

/// Decode a PNG or JPEG file. 8- and 16-bit codes are divided by the type
/// maximum. Gray stays 1-channel; color (alpha dropped) becomes RGB.
Image load_image(const std::filesystem::path& path);

/// Write an 8-bit PNG or JPEG (quality 1..100, ignored for PNG).
void save_image(const Image& img, const std::filesystem::path& path,
                ImageFormat format = ImageFormat::png, int jpeg_quality = 95);

/// pixel -> true iff normalized value >= threshold.
BinaryMask load_mask(const std::filesystem::path& path, double threshold = 0.5);

/// 8-bit grayscale PNG, 0 = sharp, 255 = blurred.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

/// Raw integer codes of a single-channel 8/16-bit PNG.
LabelMap load_label_map(const std::filesystem::path& path);
void save_label_map(const LabelMap& labels, const std::filesystem::path& path);

/// In-memory codecs (used by the record stream and JPEG augmentation).
std::vector<std::uint8_t> encode_image(const Image& img, ImageFormat format = ImageFormat::png,
                                       int jpeg_quality = 95);
std::vector<std::uint8_t> encode_mask(const BinaryMask& mask);
Image decode_image(std::span<const std::uint8_t> bytes);
BinaryMask decode_mask(std::span<const std::uint8_t> bytes, double threshold = 0.5);

/// Round to the nearest 8-bit code and back, as a PNG write/read would.
Image quantize8(const Image& img);

/// Peak signal-to-noise ratio in dB with peak 1.0 (infinity for identical images).
double psnr(const Image& a, const Image& b);

}  // namespace blursynth
