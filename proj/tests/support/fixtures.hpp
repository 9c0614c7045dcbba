#pragma once

// Test-only helpers: temporary directories, synthetic rasters and on-disk
// proposal / label fixtures for the bundled natural images.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "blursynth/image.hpp"
#include "blursynth/maskops.hpp"
#include "blursynth/rng.hpp"

#ifndef BLURSYNTH_TEST_DATA
#error "BLURSYNTH_TEST_DATA must point at tests/data"
#endif

namespace fixture {

namespace fs = std::filesystem;

class TempDir {
public:
    explicit TempDir(const std::string& tag = "t")
    {
        static std::uint64_t counter = 0;
        const auto salt = blursynth::splitmix64(reinterpret_cast<std::uintptr_t>(this) ^ ++counter ^
                                                static_cast<std::uint64_t>(::time(nullptr)));
        path_ = fs::temp_directory_path() / ("blursynth_" + tag + "_" + std::to_string(salt % 1000000007ULL));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const noexcept { return path_; }
    fs::path operator/(const std::string& leaf) const { return path_ / leaf; }

private:
    fs::path path_;
};

inline fs::path data_dir() { return fs::path(BLURSYNTH_TEST_DATA); }
inline fs::path natural_dir() { return data_dir() / "natural"; }

inline std::vector<fs::path> natural_images()
{
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(natural_dir()))
        if (e.path().extension() == ".png")
            out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

inline blursynth::Image noise_image(int w, int h, int channels, std::uint64_t seed)
{
    blursynth::Rng rng(seed);
    blursynth::Image img(w, h, channels);
    for (auto& v : img.data())
        v = rng.uniform();
    return img;
}

inline blursynth::BinaryMask disk_mask(int w, int h, double cx, double cy, double r)
{
    blursynth::BinaryMask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            m.at(x, y) = (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r ? 1 : 0;
    return m;
}

inline void add_ellipse(blursynth::BinaryMask& m, double cx, double cy, double rx, double ry, double theta)
{
    const double c = std::cos(theta), s = std::sin(theta);
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) {
            const double u = (c * (x - cx) + s * (y - cy)) / rx;
            const double v = (-s * (x - cx) + c * (y - cy)) / ry;
            if (u * u + v * v <= 1.0)
                m.at(x, y) = 1;
        }
}

/// Union of one to three random ellipses covering a non-trivial fraction.
inline blursynth::BinaryMask blob_mask(int w, int h, blursynth::Rng& rng)
{
    for (;;) {
        blursynth::BinaryMask m(w, h);
        const int parts = 1 + static_cast<int>(rng.uniform_int(0, 2));
        for (int i = 0; i < parts; ++i) {
            const double rx = rng.uniform(0.12, 0.3) * w;
            const double ry = rng.uniform(0.12, 0.3) * h;
            add_ellipse(m, rng.uniform(0.25, 0.75) * w, rng.uniform(0.25, 0.75) * h, rx, ry,
                        rng.uniform(0.0, 3.14159));
        }
        const double frac = static_cast<double>(m.count()) / m.pixel_count();
        if (frac > 0.1 && frac < 0.7)
            return m;
    }
}

/// Random scored ellipse proposals saved in the on-disk proposal layout.
inline blursynth::ScoredProposalSet make_proposals(int w, int h, int n, blursynth::Rng& rng)
{
    std::vector<blursynth::BinaryMask> masks;
    std::vector<double> scores;
    for (int i = 0; i < n; ++i) {
        masks.push_back(blob_mask(w, h, rng));
        scores.push_back(rng.uniform(-2.0, 2.0));
    }
    return blursynth::ScoredProposalSet(std::move(masks), std::move(scores));
}

/// One proposal subdirectory per image stem of `source`.
inline void write_proposal_tree(const fs::path& source, const fs::path& out, int per_image, std::uint64_t seed)
{
    blursynth::Rng rng(seed);
    for (const auto& e : fs::directory_iterator(source)) {
        if (e.path().extension() != ".png")
            continue;
        const auto img = blursynth::load_image(e.path());
        blursynth::save_proposal_set(make_proposals(img.width(), img.height(), per_image, rng),
                                     out / e.path().stem());
    }
}

/// Copy the first `n` natural images into `dir`.
inline std::vector<fs::path> copy_natural(const fs::path& dir, std::size_t n)
{
    fs::create_directories(dir);
    std::vector<fs::path> out;
    for (const auto& p : natural_images()) {
        if (out.size() == n)
            break;
        fs::copy_file(p, dir / p.filename(), fs::copy_options::overwrite_existing);
        out.push_back(dir / p.filename());
    }
    return out;
}

inline std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Relative path + contents of every regular file, sorted, for tree equality.
inline std::vector<std::pair<std::string, std::string>> snapshot(const fs::path& root)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file())
            out.emplace_back(fs::relative(e.path(), root).generic_string(), read_file(e.path()));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace fixture
