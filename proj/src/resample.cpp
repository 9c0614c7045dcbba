#include "blursynth/resample.hpp"

#include <algorithm>
#include <cmath>

#include "blursynth/error.hpp"

namespace blursynth {

int reflect101(int i, int n) noexcept
{
    if (n == 1)
        return 0;
    const int period = 2 * (n - 1);
    i %= period;
    if (i < 0)
        i += period;
    return i < n ? i : period - i;
}

double sample_bilinear(const Image& img, double x, double y, int c) noexcept
{
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const double ax = x - fx;
    const double ay = y - fy;
    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    const int w = img.width();
    const int h = img.height();
    const int xa = reflect101(x0, w), xb = reflect101(x0 + 1, w);
    const int ya = reflect101(y0, h), yb = reflect101(y0 + 1, h);
    const double top = (1.0 - ax) * img.at(xa, ya, c) + ax * img.at(xb, ya, c);
    const double bottom = (1.0 - ax) * img.at(xa, yb, c) + ax * img.at(xb, yb, c);
    return (1.0 - ay) * top + ay * bottom;
}

namespace {

struct Tap {
    int i0;
    int i1;
    double a;  // weight of i1
};

std::vector<Tap> linear_taps(int src, int dst)
{
    std::vector<Tap> taps(dst);
    const double scale = static_cast<double>(src) / dst;
    for (int d = 0; d < dst; ++d) {
        double s = (d + 0.5) * scale - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(src - 1));
        const int i0 = static_cast<int>(std::floor(s));
        const int i1 = std::min(i0 + 1, src - 1);
        taps[d] = {i0, i1, s - i0};
    }
    return taps;
}

}  // namespace

Image resize_bilinear(const Image& img, int width, int height)
{
    if (width <= 0 || height <= 0)
        throw ArgumentError("resize target must be positive");
    if (width == img.width() && height == img.height())
        return img;
    const auto tx = linear_taps(img.width(), width);
    const auto ty = linear_taps(img.height(), height);
    Image out(width, height, img.channels());
    for (int y = 0; y < height; ++y) {
        const Tap& vy = ty[y];
        for (int x = 0; x < width; ++x) {
            const Tap& vx = tx[x];
            for (int c = 0; c < img.channels(); ++c) {
                const double top = (1.0 - vx.a) * img.at(vx.i0, vy.i0, c) + vx.a * img.at(vx.i1, vy.i0, c);
                const double bot = (1.0 - vx.a) * img.at(vx.i0, vy.i1, c) + vx.a * img.at(vx.i1, vy.i1, c);
                out.at(x, y, c) = (1.0 - vy.a) * top + vy.a * bot;
            }
        }
    }
    return out;
}

BinaryMask resize_nearest(const BinaryMask& mask, int width, int height)
{
    if (width <= 0 || height <= 0)
        throw ArgumentError("resize target must be positive");
    if (width == mask.width() && height == mask.height())
        return mask;
    const double sx = static_cast<double>(mask.width()) / width;
    const double sy = static_cast<double>(mask.height()) / height;
    BinaryMask out(width, height);
    for (int y = 0; y < height; ++y) {
        const int iy = std::min(static_cast<int>(std::floor((y + 0.5) * sy)), mask.height() - 1);
        for (int x = 0; x < width; ++x) {
            const int ix = std::min(static_cast<int>(std::floor((x + 0.5) * sx)), mask.width() - 1);
            out.at(x, y) = mask.at(ix, iy) ? 1 : 0;
        }
    }
    return out;
}

Image hflip(const Image& img)
{
    Image out(img.width(), img.height(), img.channels());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < img.channels(); ++c)
                out.at(x, y, c) = img.at(img.width() - 1 - x, y, c);
    return out;
}

BinaryMask hflip(const BinaryMask& mask)
{
    BinaryMask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            out.at(x, y) = mask.at(mask.width() - 1 - x, y) ? 1 : 0;
    return out;
}

namespace {

template <class Raster>
void check_window(const Raster& r, int x0, int y0, int width, int height)
{
    if (width <= 0 || height <= 0 || x0 < 0 || y0 < 0 || x0 + width > r.width() || y0 + height > r.height())
        throw ArgumentError("crop window outside raster");
}

}  // namespace

Image crop(const Image& img, int x0, int y0, int width, int height)
{
    check_window(img, x0, y0, width, height);
    Image out(width, height, img.channels());
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < img.channels(); ++c)
                out.at(x, y, c) = img.at(x0 + x, y0 + y, c);
    return out;
}

BinaryMask crop(const BinaryMask& mask, int x0, int y0, int width, int height)
{
    check_window(mask, x0, y0, width, height);
    BinaryMask out(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            out.at(x, y) = mask.at(x0 + x, y0 + y) ? 1 : 0;
    return out;
}

void sincos_degrees(double degrees, double& sin_out, double& cos_out) noexcept
{
    double r = std::fmod(degrees, 360.0);
    if (r < 0)
        r += 360.0;
    if (r == 0.0) {
        sin_out = 0.0;
        cos_out = 1.0;
    } else if (r == 90.0) {
        sin_out = 1.0;
        cos_out = 0.0;
    } else if (r == 180.0) {
        sin_out = 0.0;
        cos_out = -1.0;
    } else if (r == 270.0) {
        sin_out = -1.0;
        cos_out = 0.0;
    } else {
        const double rad = r * (M_PI / 180.0);
        sin_out = std::sin(rad);
        cos_out = std::cos(rad);
    }
}

}  // namespace blursynth
