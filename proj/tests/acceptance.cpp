// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and sizes are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "blursynth/baseline.hpp"
#include "blursynth/blurkernel.hpp"
#include "blursynth/error.hpp"
#include "blursynth/evaluation.hpp"
#include "blursynth/maskops.hpp"
#include "blursynth/pipeline.hpp"
#include "blursynth/synthesis.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace blursynth;
namespace fs = std::filesystem;

namespace {

constexpr double kMetricTol = 1e-9;
constexpr double kMetricSeconds = 10.0;
constexpr int kMetricVectors = 1000;
constexpr double kKernelSumTol = 1e-9;
constexpr double kKernelIdentityTol = 1e-6;
constexpr int kKernelSpecs = 1000;
constexpr double kFixedPointTol = 1e-6;
constexpr std::size_t kHaloMinImages = 20;
constexpr double kHaloPassFraction = 0.90;
constexpr double kHaloBand = 3.0;
constexpr int kDraws = 10000;
constexpr double kSigmaBound = 5.0;
constexpr int kSmokeImages = 20;
constexpr int kSmokeSamplesPerImage = 10;
constexpr double kSmokeAucFloor = 0.70;
constexpr double kSmokeSeconds = 120.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

Outcome metric_oracles()
{
    const auto t0 = Clock::now();
    Rng rng(101);
    double worst = 0.0;
    for (int t = 0; t < kMetricVectors; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform() * 63.0);
        // coarse levels force ties on about half of the vectors
        const int levels = t % 2 ? 5 : 1000000;
        std::vector<double> s(n);
        std::vector<std::uint8_t> l(n);
        for (int i = 0; i < n; ++i) {
            s[i] = std::floor(rng.uniform() * levels) / levels;
            l[i] = rng.uniform() < 0.4;
        }
        l[0] = 1;
        l[1] = 0;
        worst = std::max(worst, std::abs(roc_auc(s, l) - oracle::auc_pairs(s, l)));
        worst = std::max(worst, std::abs(average_precision(s, l) - oracle::ap_sweep(s, l)));
    }
    const double secs = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof buf, "max deviation %.3g over %d vectors in %.2f s", worst, kMetricVectors, secs);
    return {worst <= kMetricTol && secs < kMetricSeconds, buf};
}

double max_abs_diff(const BlurKernel& a, const BlurKernel& b)
{
    if (a.size() != b.size())
        return INFINITY;
    double d = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
    return d;
}

Outcome kernel_validity()
{
    Rng rng(202);
    int bad = 0, degenerate = 0;
    double identity_dev = 0.0;
    for (int i = 0; i < kKernelSpecs; ++i) {
        const BlurSpec spec = sample_blur_spec(BlurRanges{}, rng);
        BlurKernel k = BlurKernel::delta();
        try {
            k = realize_kernel(spec);
        } catch (const DegenerateKernelError&) {
            ++degenerate;
            continue;
        }
        bool ok = k.size() % 2 == 1 && std::abs(k.sum() - 1.0) <= kKernelSumTol;
        for (double v : k.data())
            ok = ok && v >= 0.0;
        bad += !ok;
        identity_dev = std::max(identity_dev, max_abs_diff(rotate_kernel(k, 0.0), k));
        identity_dev = std::max(identity_dev, max_abs_diff(elastic_deform_kernel(k, DisplacementField::zero(k.size())), k));
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d invalid, %d degenerate of %d specs; identity deviation %.3g", bad, degenerate,
                  kKernelSpecs, identity_dev);
    return {bad == 0 && degenerate == 0 && identity_dev <= kKernelIdentityTol, buf};
}

Outcome composite_contracts()
{
    Rng rng(303);
    bool exact = true;
    double fixed_dev = 0.0;
    for (int t = 0; t < 10; ++t) {
        const auto a = fixture::noise_image(37, 29, t % 2 ? 3 : 1, 300 + t);
        const auto b = fixture::noise_image(37, 29, t % 2 ? 3 : 1, 400 + t);
        exact = exact && composite(a, b, BinaryMask(37, 29, true)) == b;
        exact = exact && composite(a, b, BinaryMask(37, 29)) == a;
        exact = exact && convolve(a, BlurKernel::delta()) == a;

        const Image flat(37, 29, 3, rng.uniform());
        const auto mask = fixture::blob_mask(37, 29, rng);
        const auto kernel = realize_kernel(sample_blur_spec(BlurRanges{}, rng));
        const auto out = synthesize_halo_free(flat, mask, kernel);
        for (std::size_t i = 0; i < out.data().size(); ++i)
            fixed_dev = std::max(fixed_dev, std::abs(out.data()[i] - flat.data()[i]));
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "identities %s; constant-image deviation %.3g", exact ? "bit-exact" : "broken",
                  fixed_dev);
    return {exact && fixed_dev <= kFixedPointTol, buf};
}

// Mean luma gradient magnitude over blurred pixels within kHaloBand of a
// sharp pixel. The central-difference stencil must lie in the blurred
// region too, so the legitimate sharp/blurred step is not counted.
double band_gradient(const Image& out, const BinaryMask& blurred)
{
    const Image y = out.luma();
    const int r = static_cast<int>(std::ceil(kHaloBand));
    double total = 0.0;
    std::size_t n = 0;
    for (int py = 1; py + 1 < y.height(); ++py)
        for (int px = 1; px + 1 < y.width(); ++px) {
            if (!blurred.at(px, py) || !blurred.at(px - 1, py) || !blurred.at(px + 1, py) ||
                !blurred.at(px, py - 1) || !blurred.at(px, py + 1))
                continue;
            bool near = false;
            for (int dy = -r; dy <= r && !near; ++dy)
                for (int dx = -r; dx <= r && !near; ++dx) {
                    const int qx = px + dx, qy = py + dy;
                    near = qx >= 0 && qy >= 0 && qx < y.width() && qy < y.height() && !blurred.at(qx, qy) &&
                           dx * dx + dy * dy <= kHaloBand * kHaloBand;
                }
            if (!near)
                continue;
            total += std::hypot(0.5 * (y.at(px + 1, py) - y.at(px - 1, py)), 0.5 * (y.at(px, py + 1) - y.at(px, py - 1)));
            ++n;
        }
    return n ? total / static_cast<double>(n) : 0.0;
}

Outcome halo_suppression()
{
    const auto paths = fixture::natural_images();
    if (paths.size() < kHaloMinImages)
        return {false, "only " + std::to_string(paths.size()) + " natural images available"};
    Rng rng(404);
    int cases = 0, better = 0;
    for (const auto& path : paths) {
        const Image img = load_image(path);
        const BinaryMask mask = fixture::blob_mask(img.width(), img.height(), rng);
        for (double sigma : {2.0, 3.0}) {
            const auto k = gaussian_kernel(sigma);
            ++cases;
            better += band_gradient(synthesize_halo_free(img, mask, k), mask) <
                      band_gradient(synthesize_naive(img, mask, k), mask);
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "halo-free lower in %d of %d cases (%zu images, need %.0f%%)", better, cases,
                  paths.size(), 100.0 * kHaloPassFraction);
    return {better >= kHaloPassFraction * cases, buf};
}

Outcome determinism()
{
    fixture::TempDir dir("accept_det");
    fixture::copy_natural(dir / "src", 10);
    fixture::write_proposal_tree(dir / "src", dir / "props", 5, 55);
    GeneratorConfig cfg;
    cfg.source_dir = dir / "src";
    cfg.proposal_dir = dir / "props";
    cfg.master_seed = 99;
    cfg.samples_per_image = 2;
    cfg.crop.output_width = cfg.crop.output_height = 96;

    std::vector<std::uint64_t> hashes;
    std::vector<std::vector<std::pair<std::string, std::string>>> trees;
    for (int workers : {1, 8, 8}) {
        cfg.workers = workers;
        cfg.output_dir = dir / ("out" + std::to_string(trees.size()));
        hashes.push_back(generate_dataset(cfg).hash);
        trees.push_back(fixture::snapshot(cfg.output_dir));
    }
    const bool same_tree = trees[0] == trees[1] && trees[1] == trees[2];
    const bool same_hash = hashes[0] == hashes[1] && hashes[1] == hashes[2];
    return {same_tree && same_hash && !trees[0].empty(),
            std::string("trees ") + (same_tree ? "identical" : "differ") + " for workers 1/8, manifest hash " +
                (same_hash ? "stable " + hex64(hashes[0]) : "unstable")};
}

bool within(std::size_t hits, int n, double p, double& z)
{
    const double sd = std::sqrt(n * p * (1.0 - p));
    z = sd > 0.0 ? std::abs(hits - n * p) / sd : (hits == n * p ? 0.0 : INFINITY);
    return z <= kSigmaBound;
}

Outcome sampling_statistics()
{
    Rng rng(505);
    const std::vector<double> scores{0.9, 0.1, 2.3, -1.0, 1.7, 0.0};
    std::vector<BinaryMask> props;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        BinaryMask m(8, 8);
        m.at(static_cast<int>(i), 0) = 1;
        props.push_back(m);
    }
    const ScoredProposalSet set(props, scores);
    const auto p = oracle::softmax_ld(scores);
    std::vector<std::size_t> hits(scores.size(), 0);
    for (int i = 0; i < kDraws; ++i)
        ++hits[sample_proposal_index(set, rng)];
    bool ok = true;
    double worst = 0.0, z = 0.0;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        ok = within(hits[i], kDraws, static_cast<double>(p[i]), z) && ok;
        worst = std::max(worst, z);
    }

    const BinaryMask base = fixture::disk_mask(16, 16, 8, 8, 4);
    for (double p_inv : {0.5, 0.2}) {
        std::size_t inverted = 0;
        for (int i = 0; i < kDraws; ++i) {
            const auto r = maybe_invert(base, p_inv, rng);
            inverted += r.inverted;
            ok = ok && r.mask == (r.inverted ? base.complement() : base);
        }
        ok = within(inverted, kDraws, p_inv, z) && ok;
        worst = std::max(worst, z);
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "largest deviation %.2f sigma over %d draws per test", worst, kDraws);
    return {ok, buf};
}

Outcome smoke()
{
    const auto t0 = Clock::now();
    fixture::TempDir dir("accept_smoke");
    if (fixture::copy_natural(dir / "src", kSmokeImages).size() < static_cast<std::size_t>(kSmokeImages))
        return {false, "not enough natural images"};
    fixture::write_proposal_tree(dir / "src", dir / "props", 5, 66);
    GeneratorConfig cfg;
    cfg.source_dir = dir / "src";
    cfg.proposal_dir = dir / "props";
    cfg.master_seed = 7;
    cfg.samples_per_image = kSmokeSamplesPerImage;
    cfg.output_dir = dir / "set";
    const Manifest m = generate_dataset(cfg);

    std::map<std::string, BlurType> types;
    std::size_t motion = 0;
    {
        std::ifstream in(m.path);
        for (std::string line; std::getline(in, line);) {
            const auto rec = nlohmann::json::parse(line);
            const auto kind = parse_blur_type(rec.at("blur_kind").get<std::string>());
            motion += kind == BlurType::motion;
            types[rec.at("id").get<std::string>()] = kind;
        }
    }
    fs::create_directories(dir / "pred");
    for (const auto& e : fs::directory_iterator(dir / "set" / "images"))
        save_image(sharpness_map(load_image(e.path())), dir / "pred" / e.path().filename());
    EvalOptions opt;
    opt.workers = cfg.resolved_workers();
    const EvalSummary s = evaluate_dataset(dir / "pred", dir / "set" / "masks", types, opt);
    const double secs = seconds_since(t0);

    char buf[192];
    std::snprintf(buf, sizeof buf, "%zu samples (%zu motion), %zu scored, mean AUC %.4f AP %.4f in %.1f s", m.records,
                  motion, s.records.size(), s.overall.auc, s.overall.ap, secs);
    const bool mixed = motion > 0 && motion < m.records;
    return {m.records == kSmokeImages * kSmokeSamplesPerImage && mixed && s.overall.auc >= kSmokeAucFloor &&
                secs < kSmokeSeconds,
            buf};
}

Outcome protocol_fidelity()
{
    // A: 2 of 16 positives ranked badly; B: 14 of 16 ranked well. Scores are
    // multiples of 1/255 so they survive the PNG round trip exactly.
    fixture::TempDir dir("accept_proto");
    fs::create_directories(dir / "pred");
    fs::create_directories(dir / "gt");
    Image pa(4, 4, 1), pb(4, 4, 1);
    BinaryMask ga(4, 4), gb(4, 4, true);
    for (int i = 0; i < 16; ++i) {
        pa.data()[i] = (10.0 * i) / 255.0;
        pb.data()[i] = (60.0 + 10.0 * i) / 255.0;
    }
    ga.data()[0] = ga.data()[9] = 1;
    gb.data()[0] = gb.data()[3] = 0;
    save_image(pa, dir / "pred" / "a.png");
    save_image(pb, dir / "pred" / "b.png");
    save_mask(ga, dir / "gt" / "a.png");
    save_mask(gb, dir / "gt" / "b.png");

    EvalOptions opt;
    opt.flattened = true;
    const EvalSummary s = evaluate_dataset(dir / "pred", dir / "gt", {}, opt);
    if (s.records.size() != 2 || !s.flattened_ap)
        return {false, "evaluation did not score both images"};

    auto vec = [](const Image& p) { return std::vector<double>(p.data().begin(), p.data().end()); };
    auto lab = [](const BinaryMask& g) { return std::vector<std::uint8_t>(g.data().begin(), g.data().end()); };
    const double per_image_oracle = 0.5 * (oracle::ap_sweep(vec(pa), lab(ga)) + oracle::ap_sweep(vec(pb), lab(gb)));
    auto all_s = vec(pa);
    auto all_l = lab(ga);
    for (double v : vec(pb))
        all_s.push_back(v);
    for (auto v : lab(gb))
        all_l.push_back(v);
    const double flat_oracle = oracle::ap_sweep(all_s, all_l);

    const bool match = std::abs(s.overall.ap - per_image_oracle) <= kMetricTol &&
                       std::abs(*s.flattened_ap - flat_oracle) <= kMetricTol;
    const bool differ = std::abs(s.overall.ap - *s.flattened_ap) > 0.05;
    char buf[160];
    std::snprintf(buf, sizeof buf, "per-image AP %.4f (oracle %.4f), flattened AP %.4f (oracle %.4f)", s.overall.ap,
                  per_image_oracle, *s.flattened_ap, flat_oracle);
    return {match && differ, buf};
}

}  // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"metric oracle equivalence", metric_oracles},
        {"kernel validity", kernel_validity},
        {"compositing contracts", composite_contracts},
        {"halo suppression", halo_suppression},
        {"determinism", determinism},
        {"sampling statistics", sampling_statistics},
        {"end-to-end smoke", smoke},
        {"protocol fidelity", protocol_fidelity},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o{false, ""};
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
