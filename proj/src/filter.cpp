#include "filter.hpp"

#include <algorithm>
#include <cmath>

#include "blursynth/resample.hpp"

namespace blursynth::detail {

namespace {

// index table for positions -r .. n-1+r
std::vector<int> border_table(int n, int r)
{
    std::vector<int> t(static_cast<std::size_t>(n + 2 * r));
    for (int i = -r; i < n + r; ++i)
        t[static_cast<std::size_t>(i + r)] = reflect101(i, n);
    return t;
}

struct KernelTap {
    int dx;
    int dy;
    double w;
};

}  // namespace

SeparableFactors factorize(const BlurKernel& kernel)
{
    const int k = kernel.size();
    int px = 0, py = 0;
    double top = -1.0;
    for (int y = 0; y < k; ++y)
        for (int x = 0; x < k; ++x)
            if (kernel.at(x, y) > top) {
                top = kernel.at(x, y);
                px = x;
                py = y;
            }
    if (top <= 0.0)
        return {};
    SeparableFactors f;
    f.row.resize(k);
    f.col.resize(k);
    for (int i = 0; i < k; ++i) {
        f.col[i] = kernel.at(px, i);
        f.row[i] = kernel.at(i, py) / top;
    }
    for (int y = 0; y < k; ++y)
        for (int x = 0; x < k; ++x)
            if (std::abs(kernel.at(x, y) - f.col[y] * f.row[x]) > 1e-12 * top)
                return {};
    return f;
}

void correlate_plane(std::span<const double> src, std::span<double> dst, int width, int height, int stride,
                     int offset, const BlurKernel& kernel)
{
    const int k = kernel.size();
    const int r = kernel.radius();
    const auto xt = border_table(width, r);
    const auto yt = border_table(height, r);
    auto in = [&](int x, int y) { return src[(static_cast<std::size_t>(y) * width + x) * stride + offset]; };
    auto out = [&](int x, int y) -> double& {
        return dst[(static_cast<std::size_t>(y) * width + x) * stride + offset];
    };

    std::vector<KernelTap> taps;
    for (int y = 0; y < k; ++y)
        for (int x = 0; x < k; ++x)
            if (kernel.at(x, y) != 0.0)
                taps.push_back({x - r, y - r, kernel.at(x, y)});

    const auto factors = static_cast<int>(taps.size()) > 2 * k ? factorize(kernel) : SeparableFactors{};
    if (factors.valid()) {
        std::vector<double> tmp(static_cast<std::size_t>(width) * height);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                double acc = 0.0;
                for (int i = 0; i < k; ++i)
                    acc += factors.row[i] * in(xt[static_cast<std::size_t>(x + i)], y);
                tmp[static_cast<std::size_t>(y) * width + x] = acc;
            }
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                double acc = 0.0;
                for (int j = 0; j < k; ++j)
                    acc += factors.col[j] * tmp[static_cast<std::size_t>(yt[static_cast<std::size_t>(y + j)]) * width + x];
                out(x, y) = acc;
            }
        return;
    }

    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (const auto& t : taps)
                acc += t.w * in(xt[static_cast<std::size_t>(x + t.dx + r)], yt[static_cast<std::size_t>(y + t.dy + r)]);
            out(x, y) = acc;
        }
}

}  // namespace blursynth::detail
