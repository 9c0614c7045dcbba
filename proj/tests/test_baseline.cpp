#include "doctest.h"

#include "blursynth/baseline.hpp"
#include "blursynth/error.hpp"
#include "blursynth/synthesis.hpp"
#include "support/fixtures.hpp"

using namespace blursynth;

namespace {

double mean_over(const Image& map, const BinaryMask& mask, bool value)
{
    double total = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < mask.pixel_count(); ++i)
        if ((mask.data()[i] != 0) == value) {
            total += map.data()[i];
            ++n;
        }
    return total / static_cast<double>(n);
}

}  // namespace

TEST_CASE("sharpness_map range and constant input")
{
    const auto flat = sharpness_map(Image(20, 15, 3, 0.4));
    CHECK(flat.channels() == 1);
    for (double v : flat.data())
        CHECK(v == 1.0);

    const auto m = sharpness_map(fixture::noise_image(40, 30, 3, 2));
    CHECK(m.width() == 40);
    for (double v : m.data()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    CHECK_THROWS_AS(sharpness_map(flat, {}), ArgumentError);
    CHECK_THROWS_AS(sharpness_map(flat, {0.0}), ArgumentError);
}

TEST_CASE("blurred half of a noise image scores higher")
{
    const auto img = fixture::noise_image(96, 64, 3, 3);
    BinaryMask right(96, 64);
    for (int y = 0; y < 64; ++y)
        for (int x = 48; x < 96; ++x)
            right.at(x, y) = 1;
    const auto blurred = synthesize_halo_free(img, right, gaussian_kernel(3.0));
    for (double pooling : {0.0, 4.0}) {
        const auto map = sharpness_map(blurred, {1.0, 2.0}, pooling);
        CHECK(mean_over(map, right, true) > mean_over(map, right, false));
    }
}

TEST_CASE("stronger defocus does not lower the blurred-region score")
{
    Rng rng(12);
    const auto paths = fixture::natural_images();
    for (std::size_t i = 0; i < 20; ++i) {
        const auto img = load_image(paths[i % paths.size()]);
        const auto mask = fixture::blob_mask(img.width(), img.height(), rng);
        const auto mild = sharpness_map(synthesize_halo_free(img, mask, gaussian_kernel(1.5)));
        const auto strong = sharpness_map(synthesize_halo_free(img, mask, gaussian_kernel(3.0)));
        CHECK(mean_over(strong, mask, true) >= mean_over(mild, mask, true));
    }
}
