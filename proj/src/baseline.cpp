#include "blursynth/baseline.hpp"

#include <cmath>
#include <numeric>

#include "blursynth/blurkernel.hpp"
#include "blursynth/error.hpp"
#include "blursynth/resample.hpp"
#include "filter.hpp"

namespace blursynth {

namespace {

std::vector<double> smooth(std::span<const double> plane, int w, int h, double sigma)
{
    std::vector<double> out(plane.size());
    detail::correlate_plane(plane, out, w, h, 1, 0, gaussian_kernel(sigma));
    return out;
}

}  // namespace

Image sharpness_map(const Image& img, const std::vector<double>& scales, double pooling)
{
    if (scales.empty())
        throw ArgumentError("sharpness_map needs at least one scale");
    const Image gray = img.luma();
    const int w = gray.width(), h = gray.height();
    const std::size_t n = gray.pixel_count();

    std::vector<double> energy(n, 0.0);
    for (double s : scales) {
        if (!(s > 0.0))
            throw ArgumentError("sharpness_map scales must be > 0");
        const auto blurred = smooth(gray.data(), w, h, s);
        auto at = [&](int x, int y) { return blurred[static_cast<std::size_t>(reflect101(y, h)) * w + reflect101(x, w)]; };
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double gx = 0.5 * (at(x + 1, y) - at(x - 1, y));
                const double gy = 0.5 * (at(x, y + 1) - at(x, y - 1));
                energy[static_cast<std::size_t>(y) * w + x] += std::hypot(gx, gy) / static_cast<double>(scales.size());
            }
    }
    if (pooling > 0.0)
        energy = smooth(energy, w, h, pooling);

    Image out(w, h, 1, 1.0);
    const double eps = std::accumulate(energy.begin(), energy.end(), 0.0) / static_cast<double>(n);
    if (!(eps > 0.0))
        return out;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::max(energy[i], 0.0);
        out.data()[i] = std::clamp(1.0 - e / (e + eps), 0.0, 1.0);
    }
    return out;
}

}  // namespace blursynth
