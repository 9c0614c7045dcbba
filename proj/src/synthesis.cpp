#include "blursynth/synthesis.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "blursynth/error.hpp"
#include "filter.hpp"

namespace blursynth {

Image convolve(const Image& img, const BlurKernel& kernel)
{
    if (kernel.size() >= 2 * img.width() || kernel.size() >= 2 * img.height())
        throw ArgumentError("kernel of size " + std::to_string(kernel.size()) + " is too large for a " +
                            std::to_string(img.width()) + "x" + std::to_string(img.height()) + " image");
    Image out(img.width(), img.height(), img.channels());
    for (int c = 0; c < img.channels(); ++c)
        detail::correlate_plane(img.data(), out.data(), img.width(), img.height(), img.channels(), c, kernel);
    out.clamp01();
    return out;
}

Image composite(const Image& sharp, const Image& blurred, const BinaryMask& mask)
{
    if (!sharp.same_size(blurred) || sharp.channels() != blurred.channels() || !mask.same_size(sharp))
        throw ArgumentError("composite: image and mask dimensions differ");
    Image out = sharp;
    const int ch = sharp.channels();
    for (std::size_t p = 0; p < mask.pixel_count(); ++p)
        if (mask.data()[p])
            for (int c = 0; c < ch; ++c)
                out.data()[p * ch + c] = blurred.data()[p * ch + c];
    return out;
}

namespace {

enum : std::uint8_t { known = 0, band = 1, inside = 2, outside = 3 };

class TeleaInpainter {
public:
    TeleaInpainter(const Image& img, const BinaryMask& hole, double radius)
        : out_(img), w_(img.width()), h_(img.height()), ch_(img.channels()), radius_(radius),
          flag_(hole.pixel_count(), known), time_(hole.pixel_count(), 0.0)
    {
        for (std::size_t p = 0; p < flag_.size(); ++p)
            if (hole.data()[p]) {
                flag_[p] = inside;
                time_[p] = kFar;
            }
    }

    Image run()
    {
        using Entry = std::tuple<double, std::size_t>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
        for (int y = 0; y < h_; ++y)
            for (int x = 0; x < w_; ++x) {
                if (flag(x, y) != known)
                    continue;
                if (flag(x - 1, y) == inside || flag(x + 1, y) == inside || flag(x, y - 1) == inside ||
                    flag(x, y + 1) == inside) {
                    flag_[idx(x, y)] = band;
                    heap.emplace(0.0, idx(x, y));
                }
            }

        constexpr int nx[4] = {-1, 1, 0, 0};
        constexpr int ny[4] = {0, 0, -1, 1};
        while (!heap.empty()) {
            const auto [t, p] = heap.top();
            heap.pop();
            if (flag_[p] != band)
                continue;
            flag_[p] = known;
            const int px = static_cast<int>(p % w_);
            const int py = static_cast<int>(p / w_);
            for (int n = 0; n < 4; ++n) {
                const int x = px + nx[n], y = py + ny[n];
                if (flag(x, y) != inside)
                    continue;
                const double arrival = std::min(std::min(solve(x - 1, y, x, y - 1), solve(x + 1, y, x, y - 1)),
                                                std::min(solve(x - 1, y, x, y + 1), solve(x + 1, y, x, y + 1)));
                time_[idx(x, y)] = arrival;
                fill(x, y);
                flag_[idx(x, y)] = band;
                heap.emplace(arrival, idx(x, y));
            }
        }
        out_.clamp01();
        return std::move(out_);
    }

private:
    static constexpr double kFar = 1.0e6;

    std::size_t idx(int x, int y) const noexcept { return static_cast<std::size_t>(y) * w_ + x; }

    std::uint8_t flag(int x, int y) const noexcept
    {
        return (x < 0 || y < 0 || x >= w_ || y >= h_) ? std::uint8_t{outside} : flag_[idx(x, y)];
    }
    bool settled(int x, int y) const noexcept
    {
        const auto f = flag(x, y);
        return f == known || f == band;
    }
    double time(int x, int y) const noexcept { return time_[idx(x, y)]; }

    // first-order upwind Eikonal update from one horizontal and one vertical neighbor
    double solve(int x1, int y1, int x2, int y2) const noexcept
    {
        const bool k1 = settled(x1, y1);
        const bool k2 = settled(x2, y2);
        if (k1 && k2) {
            const double a = time(x1, y1), b = time(x2, y2);
            const double d = a - b;
            if (std::abs(d) >= 1.0)
                return 1.0 + std::min(a, b);
            return 0.5 * (a + b + std::sqrt(2.0 - d * d));
        }
        if (k1)
            return 1.0 + time(x1, y1);
        if (k2)
            return 1.0 + time(x2, y2);
        return kFar;
    }

    // one-sided where only one neighbor is known, central where both are
    template <class Value>
    double gradient(int x, int y, int dx, int dy, Value value) const
    {
        const bool fwd = settled(x + dx, y + dy);
        const bool bwd = settled(x - dx, y - dy);
        if (fwd && bwd)
            return 0.5 * (value(x + dx, y + dy) - value(x - dx, y - dy));
        if (fwd)
            return value(x + dx, y + dy) - value(x, y);
        if (bwd)
            return value(x, y) - value(x - dx, y - dy);
        return 0.0;
    }

    // a weighted average of settled values only; the first-order
    // extrapolation term of the original method copies texture into the
    // hole and can overshoot, so it is left out
    void fill(int x, int y)
    {
        auto tval = [&](int u, int v) { return time(u, v); };
        double gx = gradient(x, y, 1, 0, tval);
        double gy = gradient(x, y, 0, 1, tval);
        const double gn = std::hypot(gx, gy);
        if (gn > 0.0) {
            gx /= gn;
            gy /= gn;
        }

        const int r = static_cast<int>(std::ceil(radius_));
        const double r2 = radius_ * radius_;
        const double tp = time(x, y);
        double acc[3] = {0.0, 0.0, 0.0};
        double total = 0.0;
        for (int qy = y - r; qy <= y + r; ++qy)
            for (int qx = x - r; qx <= x + r; ++qx) {
                if (!settled(qx, qy))
                    continue;
                const double rx = x - qx, ry = y - qy;
                const double d2 = rx * rx + ry * ry;
                if (d2 > r2)
                    continue;
                const double len = std::sqrt(d2);
                double dir = (rx * gx + ry * gy) / len;
                if (std::abs(dir) <= 0.01)
                    dir = 1.0e-6;
                const double lev = 1.0 / (1.0 + std::abs(time(qx, qy) - tp));
                const double weight = std::abs(dir * lev / d2);
                for (int c = 0; c < ch_; ++c)
                    acc[c] += weight * out_.at(qx, qy, c);
                total += weight;
            }
        for (int c = 0; c < ch_; ++c)
            out_.at(x, y, c) = acc[c] / total;
    }

    Image out_;
    int w_;
    int h_;
    int ch_;
    double radius_;
    std::vector<std::uint8_t> flag_;
    std::vector<double> time_;
};

}  // namespace

Image inpaint(const Image& img, const BinaryMask& hole, double radius)
{
    if (!hole.same_size(img))
        throw ArgumentError("inpaint: hole and image dimensions differ");
    if (!(radius >= 1.0))
        throw ArgumentError("inpaint radius must be >= 1");
    if (hole.none())
        return img;
    if (hole.all())
        throw UninpaintableError("inpaint hole covers the entire image");
    return TeleaInpainter(img, hole, radius).run();
}

Image synthesize_naive(const Image& img, const BinaryMask& mask, const BlurKernel& kernel)
{
    return composite(img, convolve(img, kernel), mask);
}

Image synthesize_halo_free(const Image& img, const BinaryMask& mask, const BlurKernel& kernel,
                           double inpaint_radius)
{
    if (!mask.same_size(img))
        throw ArgumentError("synthesize: mask and image dimensions differ");
    if (mask.none())
        throw DegenerateMaskError("blur mask is empty");
    if (mask.all())
        throw DegenerateMaskError("blur mask leaves no sharp region");
    const Image background = inpaint(img, mask.complement(), inpaint_radius);
    return composite(img, convolve(background, kernel), mask);
}

}  // namespace blursynth
