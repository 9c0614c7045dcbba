#include "blursynth/blurkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "blursynth/error.hpp"
#include "blursynth/resample.hpp"
#include "filter.hpp"

namespace blursynth {

namespace {

std::vector<double> normalized(std::vector<double> v)
{
    for (auto& x : v)
        if (!(x > 0.0))
            x = 0.0;  // clips negatives and NaN
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    if (!(total > 1e-12))
        throw DegenerateKernelError("kernel has no mass left after resampling");
    for (auto& x : v)
        x /= total;
    return v;
}

// bilinear read with zero outside the k x k support
double read_zero(const BlurKernel& kernel, double x, double y)
{
    const int k = kernel.size();
    const double fx = std::floor(x), fy = std::floor(y);
    const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
    const double ax = x - fx, ay = y - fy;
    auto tap = [&](int xi, int yi) { return (xi < 0 || yi < 0 || xi >= k || yi >= k) ? 0.0 : kernel.at(xi, yi); };
    const double top = (1.0 - ax) * tap(x0, y0) + ax * tap(x0 + 1, y0);
    const double bottom = (1.0 - ax) * tap(x0, y0 + 1) + ax * tap(x0 + 1, y0 + 1);
    return (1.0 - ay) * top + ay * bottom;
}

}  // namespace

BlurKernel::BlurKernel(int size, std::vector<double> data) : size_(size), data_(std::move(data))
{
    if (size <= 0 || size % 2 == 0)
        throw ArgumentError("kernel size must be positive and odd, got " + std::to_string(size));
    if (data_.size() != static_cast<std::size_t>(size) * size)
        throw ArgumentError("kernel data length does not match size");
    for (double v : data_)
        if (!std::isfinite(v) || v < 0.0)
            throw ArgumentError("kernel entries must be finite and non-negative");
}

BlurKernel BlurKernel::delta() { return BlurKernel(1, {1.0}); }

double BlurKernel::sum() const noexcept { return std::accumulate(data_.begin(), data_.end(), 0.0); }

DisplacementField DisplacementField::zero(int size)
{
    const auto n = static_cast<std::size_t>(size) * size;
    return {size, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

double DisplacementField::max_magnitude() const noexcept
{
    double m = 0.0;
    for (std::size_t i = 0; i < dx.size(); ++i)
        m = std::max(m, std::hypot(dx[i], dy[i]));
    return m;
}

std::string_view to_string(BlurKind kind) noexcept
{
    return kind == BlurKind::motion ? "motion" : "defocus";
}

BlurKind parse_blur_kind(std::string_view text)
{
    if (text == "defocus")
        return BlurKind::defocus;
    if (text == "motion")
        return BlurKind::motion;
    throw ArgumentError("unknown blur kind '" + std::string(text) + "'");
}

void BlurSpec::validate() const
{
    if (kind == BlurKind::defocus) {
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw ArgumentError("defocus blur needs sigma > 0");
        return;
    }
    if (length < 1)
        throw ArgumentError("motion blur needs length >= 1");
    if (!(angle >= 0.0 && angle < 360.0))
        throw ArgumentError("motion angle must be in [0, 360)");
    const int k = length % 2 ? length : length + 1;
    if (!(elastic_amplitude >= 0.0) || elastic_amplitude > k / 2.0)
        throw ArgumentError("elastic amplitude must be in [0, k/2]");
    if (!(elastic_smoothness > 0.0))
        throw ArgumentError("elastic smoothness must be positive");
}

DisplacementField BlurSpec::elastic_field() const
{
    const int k = length % 2 ? length : length + 1;
    if (elastic_amplitude == 0.0)
        return DisplacementField::zero(k);
    Rng rng(elastic_seed);
    return random_displacement_field(k, elastic_amplitude, elastic_smoothness, rng);
}

void BlurRanges::validate() const
{
    auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError(field + ": " + why);
    };
    if (!(motion_ratio >= 0.0 && motion_ratio <= 1.0))
        fail("motion_ratio", "must be in [0,1]");
    if (!(sigma_min > 0.0))
        fail("sigma_min", "must be > 0");
    if (!(sigma_max >= sigma_min))
        fail("sigma_max", "must be >= sigma_min");
    if (length_min < 1)
        fail("length_min", "must be >= 1");
    if (length_max < length_min)
        fail("length_max", "must be >= length_min");
    if (!(elastic_amplitude_max >= 0.0 && elastic_amplitude_max <= 0.5))
        fail("elastic_amplitude_max", "must be in [0, 0.5] (fraction of m)");
    if (!(elastic_smoothness > 0.0))
        fail("elastic_smoothness", "must be > 0");
}

BlurKernel gaussian_kernel(double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw ArgumentError("gaussian sigma must be > 0");
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    const int k = 2 * r + 1;
    std::vector<double> g(k);
    for (int i = 0; i < k; ++i) {
        const double d = i - r;
        g[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    }
    const double total = std::accumulate(g.begin(), g.end(), 0.0);
    for (auto& v : g)
        v /= total;
    std::vector<double> data(static_cast<std::size_t>(k) * k);
    for (int y = 0; y < k; ++y)
        for (int x = 0; x < k; ++x)
            data[static_cast<std::size_t>(y) * k + x] = g[y] * g[x];
    return BlurKernel(k, std::move(data));
}

BlurKernel linear_motion_kernel(int length)
{
    if (length < 1)
        throw ArgumentError("motion length must be >= 1");
    const int k = length % 2 ? length : length + 1;
    std::vector<double> data(static_cast<std::size_t>(k) * k, 0.0);
    const int row = k / 2;
    for (int x = 0; x < length; ++x)
        data[static_cast<std::size_t>(row) * k + x] = 1.0 / length;
    return BlurKernel(k, std::move(data));
}

BlurKernel rotate_kernel(const BlurKernel& kernel, double degrees)
{
    double s = 0.0, c = 1.0;
    sincos_degrees(degrees, s, c);
    const int k = kernel.size();
    const double r = kernel.radius();
    std::vector<double> out(static_cast<std::size_t>(k) * k);
    for (int y = 0; y < k; ++y)
        for (int x = 0; x < k; ++x) {
            const double dx = x - r, dy = y - r;
            out[static_cast<std::size_t>(y) * k + x] = read_zero(kernel, c * dx - s * dy + r, s * dx + c * dy + r);
        }
    return BlurKernel(k, normalized(std::move(out)));
}

BlurKernel elastic_deform_kernel(const BlurKernel& kernel, const DisplacementField& field)
{
    const int k = kernel.size();
    if (field.size != k)
        throw ArgumentError("displacement field size does not match kernel");
    std::vector<double> out(static_cast<std::size_t>(k) * k);
    for (int y = 0; y < k; ++y)
        for (int x = 0; x < k; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * k + x;
            out[i] = read_zero(kernel, x + field.dx[i], y + field.dy[i]);
        }
    return BlurKernel(k, normalized(std::move(out)));
}

DisplacementField random_displacement_field(int size, double amplitude, double smoothness, Rng& rng)
{
    if (size < 1 || size % 2 == 0)
        throw ArgumentError("displacement field size must be odd");
    if (!(amplitude >= 0.0) || amplitude > size / 2.0)
        throw ArgumentError("displacement amplitude must be in [0, size/2]");
    if (!(smoothness > 0.0))
        throw ArgumentError("displacement smoothness must be > 0");

    const auto n = static_cast<std::size_t>(size) * size;
    std::vector<double> noise_x(n), noise_y(n);
    for (auto& v : noise_x)
        v = rng.uniform(-1.0, 1.0);
    for (auto& v : noise_y)
        v = rng.uniform(-1.0, 1.0);

    auto field = DisplacementField::zero(size);
    if (amplitude == 0.0)
        return field;
    const auto smoother = gaussian_kernel(smoothness);
    detail::correlate_plane(noise_x, field.dx, size, size, 1, 0, smoother);
    detail::correlate_plane(noise_y, field.dy, size, size, 1, 0, smoother);

    const double peak = field.max_magnitude();
    if (peak == 0.0)
        return DisplacementField::zero(size);
    const double scale = amplitude / peak;
    for (std::size_t i = 0; i < n; ++i) {
        field.dx[i] *= scale;
        field.dy[i] *= scale;
    }
    return field;
}

BlurSpec sample_blur_spec(const BlurRanges& ranges, Rng& rng)
{
    ranges.validate();
    BlurSpec spec;
    spec.kind = rng.uniform() < ranges.motion_ratio ? BlurKind::motion : BlurKind::defocus;
    if (spec.kind == BlurKind::defocus) {
        spec.sigma = rng.uniform(ranges.sigma_min, ranges.sigma_max);
        return spec;
    }
    spec.length = static_cast<int>(rng.uniform_int(ranges.length_min, ranges.length_max));
    spec.angle = rng.uniform(0.0, 360.0);
    spec.elastic_seed = rng.next_u64();
    spec.elastic_amplitude = rng.uniform() * ranges.elastic_amplitude_max * spec.length;
    spec.elastic_smoothness = ranges.elastic_smoothness * spec.length;
    return spec;
}

BlurKernel realize_kernel(const BlurSpec& spec)
{
    spec.validate();
    if (spec.kind == BlurKind::defocus)
        return gaussian_kernel(spec.sigma);
    auto line = rotate_kernel(linear_motion_kernel(spec.length), spec.angle);
    return elastic_deform_kernel(line, spec.elastic_field());
}

}  // namespace blursynth
