#include "blursynth/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "blursynth/error.hpp"

namespace blursynth {

namespace {

void check_dims(int width, int height)
{
    if (width <= 0 || height <= 0)
        throw ArgumentError("raster dimensions must be positive, got " + std::to_string(width) + "x" +
                            std::to_string(height));
}

std::uint8_t to_code8(double v)
{
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

cv::Mat to_mat8(const Image& img)
{
    cv::Mat out(img.height(), img.width(), img.channels() == 1 ? CV_8UC1 : CV_8UC3);
    for (int y = 0; y < img.height(); ++y) {
        auto* row = out.ptr<std::uint8_t>(y);
        for (int x = 0; x < img.width(); ++x) {
            if (img.channels() == 1) {
                row[x] = to_code8(img.at(x, y));
            } else {
                // OpenCV stores BGR
                row[3 * x + 0] = to_code8(img.at(x, y, 2));
                row[3 * x + 1] = to_code8(img.at(x, y, 1));
                row[3 * x + 2] = to_code8(img.at(x, y, 0));
            }
        }
    }
    return out;
}

cv::Mat to_mat8(const BinaryMask& mask)
{
    cv::Mat out(mask.height(), mask.width(), CV_8UC1);
    for (int y = 0; y < mask.height(); ++y) {
        auto* row = out.ptr<std::uint8_t>(y);
        for (int x = 0; x < mask.width(); ++x)
            row[x] = mask.at(x, y) ? 255 : 0;
    }
    return out;
}

template <class T>
Image from_mat_typed(const cv::Mat& m, double max_code)
{
    const int src_channels = m.channels();
    const int channels = src_channels == 1 ? 1 : 3;
    Image img(m.cols, m.rows, channels);
    for (int y = 0; y < m.rows; ++y) {
        const T* row = m.ptr<T>(y);
        for (int x = 0; x < m.cols; ++x) {
            const T* px = row + static_cast<std::ptrdiff_t>(x) * src_channels;
            if (channels == 1) {
                img.at(x, y) = px[0] / max_code;
            } else {
                img.at(x, y, 0) = px[2] / max_code;
                img.at(x, y, 1) = px[1] / max_code;
                img.at(x, y, 2) = px[0] / max_code;
            }
        }
    }
    return img;
}

Image from_mat(const cv::Mat& m, const std::string& what)
{
    if (m.empty())
        throw DecodeError("cannot decode image: " + what);
    const int ch = m.channels();
    if (ch != 1 && ch != 3 && ch != 4)
        throw DecodeError("unsupported color type (" + std::to_string(ch) + " channels): " + what);
    switch (m.depth()) {
    case CV_8U:
        return from_mat_typed<std::uint8_t>(m, 255.0);
    case CV_16U:
        return from_mat_typed<std::uint16_t>(m, 65535.0);
    default:
        throw DecodeError("unsupported bit depth: " + what);
    }
}

cv::Mat read_mat(const std::filesystem::path& path)
{
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
        throw DecodeError("cannot read file: " + path.string());
    cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (m.empty())
        throw DecodeError("cannot decode image: " + path.string());
    return m;
}

void write_mat(const cv::Mat& m, const std::filesystem::path& path, const std::vector<int>& params)
{
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), m, params);
    } catch (const cv::Exception& e) {
        throw WriteError("cannot write " + path.string() + ": " + e.what());
    }
    if (!ok)
        throw WriteError("cannot write " + path.string());
}

std::vector<int> png_params() { return {cv::IMWRITE_PNG_COMPRESSION, 6}; }

std::vector<int> jpeg_params(int quality)
{
    if (quality < 1 || quality > 100)
        throw ArgumentError("jpeg quality must be in 1..100, got " + std::to_string(quality));
    return {cv::IMWRITE_JPEG_QUALITY, quality};
}

BinaryMask mask_from_gray(const Image& gray, double threshold)
{
    BinaryMask mask(gray.width(), gray.height());
    for (int y = 0; y < gray.height(); ++y)
        for (int x = 0; x < gray.width(); ++x)
            mask.at(x, y) = gray.at(x, y) >= threshold ? 1 : 0;
    return mask;
}

Image single_channel(const Image& img, const std::string& what)
{
    if (img.channels() == 1)
        return img;
    Image out(img.width(), img.height(), 1);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const double r = img.at(x, y, 0);
            if (img.at(x, y, 1) != r || img.at(x, y, 2) != r)
                throw FormatError("mask has unequal color channels: " + what);
            out.at(x, y) = r;
        }
    return out;
}

}  // namespace

Image::Image(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels)
{
    check_dims(width, height);
    if (channels != 1 && channels != 3)
        throw ArgumentError("image channels must be 1 or 3, got " + std::to_string(channels));
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

bool Image::valid() const noexcept
{
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; });
}

void Image::clamp01() noexcept
{
    for (auto& v : data_)
        v = std::clamp(v, 0.0, 1.0);
}

Image Image::luma() const
{
    if (channels_ == 1)
        return *this;
    Image out(width_, height_, 1);
    for (std::size_t i = 0; i < pixel_count(); ++i)
        out.data_[i] = 0.299 * data_[3 * i] + 0.587 * data_[3 * i + 1] + 0.114 * data_[3 * i + 2];
    return out;
}

BinaryMask::BinaryMask(int width, int height, bool fill) : width_(width), height_(height)
{
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t BinaryMask::count() const noexcept
{
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::complement() const
{
    BinaryMask out = *this;
    for (auto& v : out.data_)
        v = v ? 0 : 1;
    return out;
}

LabelMap::LabelMap(int width, int height, std::uint32_t fill) : width_(width), height_(height)
{
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height, fill);
}

Image load_image(const std::filesystem::path& path)
{
    return from_mat(read_mat(path), path.string());
}

void save_image(const Image& img, const std::filesystem::path& path, ImageFormat format, int jpeg_quality)
{
    write_mat(to_mat8(img), path, format == ImageFormat::png ? png_params() : jpeg_params(jpeg_quality));
}

BinaryMask load_mask(const std::filesystem::path& path, double threshold)
{
    return mask_from_gray(single_channel(load_image(path), path.string()), threshold);
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path)
{
    write_mat(to_mat8(mask), path, png_params());
}

LabelMap load_label_map(const std::filesystem::path& path)
{
    const cv::Mat m = read_mat(path);
    if (m.channels() != 1)
        throw FormatError("label map must be single-channel: " + path.string());
    LabelMap labels(m.cols, m.rows);
    for (int y = 0; y < m.rows; ++y)
        for (int x = 0; x < m.cols; ++x) {
            if (m.depth() == CV_8U)
                labels.at(x, y) = m.at<std::uint8_t>(y, x);
            else if (m.depth() == CV_16U)
                labels.at(x, y) = m.at<std::uint16_t>(y, x);
            else
                throw DecodeError("unsupported label bit depth: " + path.string());
        }
    return labels;
}

void save_label_map(const LabelMap& labels, const std::filesystem::path& path)
{
    const auto max_label = *std::max_element(labels.data().begin(), labels.data().end());
    if (max_label > 65535)
        throw ArgumentError("label ids above 65535 cannot be stored as PNG");
    cv::Mat m(labels.height(), labels.width(), max_label > 255 ? CV_16UC1 : CV_8UC1);
    for (int y = 0; y < labels.height(); ++y)
        for (int x = 0; x < labels.width(); ++x) {
            if (m.depth() == CV_8U)
                m.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(labels.at(x, y));
            else
                m.at<std::uint16_t>(y, x) = static_cast<std::uint16_t>(labels.at(x, y));
        }
    write_mat(m, path, png_params());
}

std::vector<std::uint8_t> encode_image(const Image& img, ImageFormat format, int jpeg_quality)
{
    std::vector<std::uint8_t> bytes;
    const auto params = format == ImageFormat::png ? png_params() : jpeg_params(jpeg_quality);
    if (!cv::imencode(format == ImageFormat::png ? ".png" : ".jpg", to_mat8(img), bytes, params))
        throw WriteError("image encoding failed");
    return bytes;
}

std::vector<std::uint8_t> encode_mask(const BinaryMask& mask)
{
    std::vector<std::uint8_t> bytes;
    if (!cv::imencode(".png", to_mat8(mask), bytes, png_params()))
        throw WriteError("mask encoding failed");
    return bytes;
}

Image decode_image(std::span<const std::uint8_t> bytes)
{
    if (bytes.empty())
        throw DecodeError("cannot decode image: empty buffer");
    const cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
    return from_mat(cv::imdecode(buf, cv::IMREAD_UNCHANGED), "in-memory buffer");
}

BinaryMask decode_mask(std::span<const std::uint8_t> bytes, double threshold)
{
    return mask_from_gray(single_channel(decode_image(bytes), "in-memory buffer"), threshold);
}

Image quantize8(const Image& img)
{
    Image out = img;
    for (auto& v : out.data())
        v = to_code8(v) / 255.0;
    return out;
}

double psnr(const Image& a, const Image& b)
{
    if (!a.same_size(b) || a.channels() != b.channels())
        throw ArgumentError("psnr: image shapes differ");
    double se = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        se += d * d;
    }
    if (se == 0.0)
        return std::numeric_limits<double>::infinity();
    const double mse = se / static_cast<double>(a.data().size());
    return 10.0 * std::log10(1.0 / mse);
}

}  // namespace blursynth
