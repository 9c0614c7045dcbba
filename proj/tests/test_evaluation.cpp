#include <cmath>
#include <fstream>
#include <vector>

#include "doctest.h"

#include "blursynth/error.hpp"
#include "blursynth/evaluation.hpp"
#include "blursynth/resample.hpp"
#include "blursynth/rng.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace blursynth;

namespace {

struct Case {
    std::vector<double> s;
    std::vector<std::uint8_t> l;
};

// Random vector with both classes; coarse quantization forces ties.
Case random_case(Rng& rng, std::size_t max_len)
{
    for (;;) {
        Case c;
        const auto n = static_cast<std::size_t>(rng.uniform_int(2, static_cast<std::int64_t>(max_len)));
        const int levels = static_cast<int>(rng.uniform_int(2, 40));
        for (std::size_t i = 0; i < n; ++i) {
            c.s.push_back(std::floor(rng.uniform() * levels) / levels);
            c.l.push_back(rng.bernoulli(0.4) ? 1 : 0);
        }
        const auto pos = std::count(c.l.begin(), c.l.end(), 1);
        if (pos > 0 && pos < static_cast<long>(n))
            return c;
    }
}

BinaryMask mask_from(int w, int h, std::initializer_list<int> bits)
{
    BinaryMask m(w, h);
    std::size_t i = 0;
    for (int b : bits)
        m.data()[i++] = static_cast<std::uint8_t>(b);
    return m;
}

Image map_from(int w, int h, std::initializer_list<double> values)
{
    Image img(w, h, 1);
    std::size_t i = 0;
    for (double v : values)
        img.data()[i++] = v;
    return img;
}

}  // namespace

TEST_CASE("roc_auc examples")
{
    const std::vector<std::uint8_t> l{0, 0, 1, 1};
    CHECK(roc_auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, l) == 1.0);
    CHECK(roc_auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, l) == 0.5);
    const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
    CHECK(roc_auc(s, l) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(oracle::auc_pairs(s, l) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("average_precision examples")
{
    CHECK(average_precision(std::vector<double>{0.9, 0.8, 0.1}, std::vector<std::uint8_t>{1, 1, 0}) == 1.0);
    const std::vector<double> s{0.9, 0.2};
    const std::vector<std::uint8_t> l{0, 1};
    CHECK(average_precision(s, l) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(oracle::ap_sweep(s, l) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("metrics match brute-force oracles on random vectors")
{
    Rng rng(101);
    for (int t = 0; t < 300; ++t) {
        const auto c = random_case(rng, 30);
        CHECK(std::abs(roc_auc(c.s, c.l) - oracle::auc_pairs(c.s, c.l)) < 1e-9);
        CHECK(std::abs(average_precision(c.s, c.l) - oracle::ap_sweep(c.s, c.l)) < 1e-9);
    }
}

TEST_CASE("single-class and malformed inputs are rejected")
{
    const std::vector<double> s{0.1, 0.2};
    CHECK_THROWS_AS(roc_auc(s, std::vector<std::uint8_t>{1, 1}), UndefinedMetricError);
    CHECK_THROWS_AS(average_precision(s, std::vector<std::uint8_t>{0, 0}), UndefinedMetricError);
    CHECK_THROWS_AS(roc_auc(s, std::vector<std::uint8_t>{1}), ArgumentError);
    CHECK_THROWS_AS(roc_auc(std::vector<double>{}, std::vector<std::uint8_t>{}), ArgumentError);
}

TEST_CASE("auc of reversed tie-free scores is the complement")
{
    Rng rng(7);
    for (int t = 0; t < 100; ++t) {
        Case c;
        for (int i = 0; i < 25; ++i) {
            c.s.push_back(rng.uniform());
            c.l.push_back(i % 3 == 0 ? 1 : 0);
        }
        std::vector<double> flipped;
        for (double v : c.s)
            flipped.push_back(1.0 - v);
        CHECK(roc_auc(flipped, c.l) == doctest::Approx(1.0 - roc_auc(c.s, c.l)).epsilon(1e-12));
    }
}

TEST_CASE("metrics are invariant under strictly increasing transforms")
{
    Rng rng(8);
    for (int t = 0; t < 100; ++t) {
        const auto c = random_case(rng, 40);
        std::vector<double> cubed;
        for (double v : c.s)
            cubed.push_back(v * v * v);
        CHECK(std::abs(roc_auc(cubed, c.l) - roc_auc(c.s, c.l)) <= 1e-12);
        CHECK(std::abs(average_precision(cubed, c.l) - average_precision(c.s, c.l)) <= 1e-12);
    }
}

TEST_CASE("curves")
{
    const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
    const std::vector<std::uint8_t> l{0, 0, 1, 1};
    const auto roc = roc_curve(s, l);
    REQUIRE(roc.size() == 5);
    CHECK(roc.front().x == 0.0);
    CHECK(roc.back().x == 1.0);
    CHECK(roc.back().y == 1.0);
    double area = 0.0;
    for (std::size_t i = 1; i < roc.size(); ++i)
        area += (roc[i].x - roc[i - 1].x) * 0.5 * (roc[i].y + roc[i - 1].y);
    CHECK(area == doctest::Approx(roc_auc(s, l)));

    const auto pr = pr_curve(s, l);
    REQUIRE(pr.size() == 4);
    CHECK(pr.front().y == 1.0);
    CHECK(pr.back().x == 1.0);
}

TEST_CASE("evaluate_image")
{
    const auto gt = mask_from(4, 4, {0, 0, 1, 1, 0, 0, 1, 1, 0, 1, 1, 1, 0, 0, 0, 1});
    Image exact(4, 4, 1);
    Image reversed(4, 4, 1);
    for (std::size_t i = 0; i < 16; ++i) {
        exact.data()[i] = gt.data()[i];
        reversed.data()[i] = 1.0 - gt.data()[i];
    }
    const auto a = evaluate_image(exact, gt);
    CHECK(a.auc == 1.0);
    CHECK(a.ap == 1.0);
    CHECK(evaluate_image(reversed, gt).auc == 0.0);

    const auto pred = map_from(4, 4, {0.1, 0.3, 0.7, 0.9, 0.2, 0.6, 0.5, 0.8, 0.3, 0.3, 0.9, 0.4, 0.0, 0.5, 0.2, 0.6});
    const std::vector<double> s(pred.data().begin(), pred.data().end());
    const std::vector<std::uint8_t> l(gt.data().begin(), gt.data().end());
    const auto r = evaluate_image(pred, gt, "x", BlurType::motion);
    CHECK(r.id == "x");
    CHECK(r.blur_type == BlurType::motion);
    CHECK(std::abs(r.auc - oracle::auc_pairs(s, l)) < 1e-12);
    CHECK(std::abs(r.ap - oracle::ap_sweep(s, l)) < 1e-12);

    CHECK_THROWS_AS(evaluate_image(exact, BinaryMask(4, 4, true)), UndefinedMetricError);
    CHECK_THROWS_AS(evaluate_image(Image(4, 4, 3), gt), ArgumentError);
}

TEST_CASE("predictions are upscaled bilinearly to the ground truth")
{
    const auto small = map_from(2, 1, {0.0, 1.0});
    const auto up = match_prediction_size(small, 4, 2);
    CHECK(up.width() == 4);
    CHECK(up.height() == 2);
    // half-pixel centers: src x = (d + 0.5) / 2 - 0.5 -> -0.25, 0.25, 0.75, 1.25
    CHECK(up.at(0, 0) == doctest::Approx(0.0));
    CHECK(up.at(1, 0) == doctest::Approx(0.25));
    CHECK(up.at(2, 0) == doctest::Approx(0.75));
    CHECK(up.at(3, 1) == doctest::Approx(1.0));
    CHECK(match_prediction_size(small, 2, 1) == small);
}

TEST_CASE("summaries average per image and per type")
{
    auto one = summarize({{"a", BlurType::defocus, 0.8, 0.6}});
    CHECK(one.overall.count == 1);
    CHECK(one.overall.auc == 0.8);
    CHECK(one.overall.ap == 0.6);

    auto two = summarize({{"b", BlurType::motion, 0.6, 0.5}, {"a", BlurType::defocus, 0.9, 0.7}});
    CHECK(two.records.front().id == "a");
    CHECK(two.overall.auc == doctest::Approx(0.75));
    CHECK(two.per_type.at(BlurType::defocus).auc == 0.9);
    CHECK(two.per_type.at(BlurType::motion).ap == 0.5);
    CHECK(two.per_type.count(BlurType::unknown) == 0);

    const auto text = format_summary(two);
    CHECK(text.find("Defocus") != std::string::npos);
    CHECK(text.find("Motion") != std::string::npos);
    CHECK(text.find("All") != std::string::npos);
}

TEST_CASE("evaluate_dataset reads directories and reports omissions")
{
    fixture::TempDir dir("eval");
    const auto gt_dir = dir / "gt";
    const auto pred_dir = dir / "pred";
    std::filesystem::create_directories(gt_dir);
    std::filesystem::create_directories(pred_dir);

    Rng rng(3);
    std::vector<double> flat_s;
    std::vector<std::uint8_t> flat_l;
    std::vector<double> aucs;
    for (const std::string id : {"img0", "img1", "img2"}) {
        const auto gt = fixture::blob_mask(24, 20, rng);
        save_mask(gt, gt_dir / (id + ".png"));
        if (id == "img2")
            continue;  // missing prediction
        const auto pred = quantize8(fixture::noise_image(24, 20, 1, rng.next_u64()));
        save_image(pred, pred_dir / (id + ".png"));
        const std::vector<double> s(pred.data().begin(), pred.data().end());
        const std::vector<std::uint8_t> l(gt.data().begin(), gt.data().end());
        aucs.push_back(oracle::auc_pairs(s, l));
        flat_s.insert(flat_s.end(), s.begin(), s.end());
        flat_l.insert(flat_l.end(), l.begin(), l.end());
    }
    save_mask(BinaryMask(24, 20, false), gt_dir / "flat.png");
    save_image(Image(24, 20, 1, 0.5), pred_dir / "flat.png");

    std::ofstream(dir / "types.csv") << "id,blur_type\nimg0,defocus\nimg1,motion\n";
    const auto types = load_type_map(dir / "types.csv");
    CHECK(types.at("img1") == BlurType::motion);

    EvalOptions opt;
    opt.flattened = true;
    opt.workers = 2;
    opt.curves_dir = dir / "curves";
    const auto summary = evaluate_dataset(pred_dir, gt_dir, types, opt);
    REQUIRE(summary.records.size() == 2);
    CHECK(summary.missing == std::vector<std::string>{"img2"});
    CHECK(summary.undefined == std::vector<std::string>{"flat"});
    CHECK(summary.overall.auc == doctest::Approx(0.5 * (aucs[0] + aucs[1])).epsilon(1e-12));
    CHECK(summary.per_type.at(BlurType::defocus).count == 1);
    REQUIRE(summary.flattened_ap.has_value());
    CHECK(std::filesystem::exists(dir / "curves"));

    const auto serial = evaluate_dataset(pred_dir, gt_dir, types, EvalOptions{});
    CHECK(serial.overall.auc == summary.overall.auc);
    CHECK_FALSE(serial.flattened_ap.has_value());

    write_records_csv(summary, dir / "records.csv");
    const auto csv = fixture::read_file(dir / "records.csv");
    CHECK(csv.find("img0,defocus") != std::string::npos);
}

TEST_CASE("per-image and flattened AP differ on a skewed pair")
{
    // image A: 2 of 16 pixels positive and poorly ranked; image B: 14 of 16,
    // ranked well. Averaging per image weights A's failure far more.
    Image pa(4, 4, 1), pb(4, 4, 1);
    BinaryMask ga(4, 4), gb(4, 4, true);
    for (int i = 0; i < 16; ++i)
        pa.data()[i] = 0.05 * i;
    ga.data()[0] = ga.data()[9] = 1;
    for (int i = 0; i < 16; ++i)
        pb.data()[i] = 0.2 + 0.05 * i;
    gb.data()[0] = gb.data()[3] = 0;

    const auto ra = evaluate_image(pa, ga);
    const auto rb = evaluate_image(pb, gb);
    std::vector<double> s;
    std::vector<std::uint8_t> l;
    for (int i = 0; i < 16; ++i) {
        s.push_back(pa.data()[i]);
        l.push_back(ga.data()[i]);
    }
    for (int i = 0; i < 16; ++i) {
        s.push_back(pb.data()[i]);
        l.push_back(gb.data()[i]);
    }
    const double per_image = 0.5 * (ra.ap + rb.ap);
    const double flat = average_precision(s, l);
    CHECK(std::abs(flat - oracle::ap_sweep(s, l)) < 1e-9);
    CHECK(std::abs(per_image - 0.5 * (oracle::ap_sweep(std::vector<double>(s.begin(), s.begin() + 16),
                                                        std::vector<std::uint8_t>(l.begin(), l.begin() + 16)) +
                                       oracle::ap_sweep(std::vector<double>(s.begin() + 16, s.end()),
                                                        std::vector<std::uint8_t>(l.begin() + 16, l.end())))) <
          1e-9);
    CHECK(std::abs(flat - per_image) > 0.05);
}

TEST_CASE("tta_average")
{
    const auto img = map_from(2, 2, {0.1, 0.2, 0.3, 0.4});
    // flip-equivariant: identity map
    CHECK(tta_average([](const Image& x) { return x; }, img) == img);
    // constant predictor
    const auto c = tta_average([](const Image& x) { return Image(x.width(), x.height(), 1, 0.3); }, img);
    for (double v : c.data())
        CHECK(v == doctest::Approx(0.3));
    // asymmetric toy: left column 1, right column 0 regardless of input
    const auto a = tta_average(
        [](const Image& x) {
            Image out(x.width(), x.height(), 1);
            for (int y = 0; y < x.height(); ++y)
                out.at(0, y) = 1.0;
            return out;
        },
        img);
    for (double v : a.data())
        CHECK(v == doctest::Approx(0.5));
    // asymmetric input-dependent: pred = x + x(0,0) everywhere
    const auto b = tta_average(
        [](const Image& x) {
            Image out = x;
            for (auto& v : out.data())
                v = std::min(1.0, v + x.at(0, 0));
            return out;
        },
        img);
    // direct: x + 0.1; flipped input has (0,0) = 0.2 so unflipped gives x + 0.2
    CHECK(b.at(0, 0) == doctest::Approx(0.25));
    CHECK(b.at(1, 1) == doctest::Approx(0.55));
}
