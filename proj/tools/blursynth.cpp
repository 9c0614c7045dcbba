// blursynth: generate partially blurred training pairs, score blur maps,
// and run the non-learned baseline from the command line.

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "blursynth/baseline.hpp"
#include "blursynth/blurkernel.hpp"
#include "blursynth/config.hpp"
#include "blursynth/error.hpp"
#include "blursynth/evaluation.hpp"
#include "blursynth/image.hpp"
#include "blursynth/pipeline.hpp"
#include "blursynth/resample.hpp"

namespace fs = std::filesystem;
using namespace blursynth;

namespace {

enum Exit { ok = 0, failure = 1, config_error = 2, io_error = 3, undefined_metric = 4 };

struct GenerateArgs {
    std::string config;
    std::string source;
    std::string proposals;
    std::string labels;
    std::string mask_mode;
    std::string out;
    std::uint64_t seed = 0;
    int samples_per_image = 1;
    int workers = 0;
    int output_size = 224;
    bool no_augment = false;
    bool stream = false;
    std::size_t count = 0;
};

struct EvaluateArgs {
    std::string pred;
    std::string gt;
    std::string type_map;
    std::string csv;
    std::string curves;
    bool flattened = false;
    int workers = 0;
};

struct BaselineArgs {
    std::string in;
    std::string out;
    std::vector<double> scales{1.0, 2.0};
    double pooling = 4.0;
    bool tta = false;
    int workers = 0;
};

struct InspectArgs {
    std::string manifest;
    std::string id;
    std::string config;
    std::string kernel_out;
    std::string sample_out;
    int zoom = 8;
};

bool given(const CLI::App* app, const std::string& name)
{
    return app->count(name) > 0;
}

int default_workers()
{
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// Config file first, explicit flags on top.
GeneratorConfig resolve_config(const CLI::App* app, const GenerateArgs& a)
{
    GeneratorConfig cfg = a.config.empty() ? GeneratorConfig{} : load_config(a.config);
    if (given(app, "--source"))
        cfg.source_dir = a.source;
    if (given(app, "--proposals"))
        cfg.proposal_dir = a.proposals;
    if (given(app, "--labels"))
        cfg.label_dir = a.labels;
    if (given(app, "--mask-mode"))
        cfg.mask_mode = parse_mask_mode(a.mask_mode);
    if (given(app, "--out"))
        cfg.output_dir = a.out;
    if (given(app, "--seed"))
        cfg.master_seed = a.seed;
    if (given(app, "--samples-per-image"))
        cfg.samples_per_image = a.samples_per_image;
    if (given(app, "--workers"))
        cfg.workers = a.workers;
    if (given(app, "--output-size"))
        cfg.crop.output_width = cfg.crop.output_height = a.output_size;
    if (a.no_augment)
        cfg.augment = false;
    return cfg;
}

int run_generate(const CLI::App* app, const GenerateArgs& a)
{
    const GeneratorConfig cfg = resolve_config(app, a);
    cfg.validate();
    if (a.stream) {
        std::ios::sync_with_stdio(false);
        const std::optional<std::size_t> count = given(app, "--count") ? std::optional{a.count} : std::nullopt;
        const std::size_t n = stream_samples(cfg, std::cout, count);
        std::cerr << "streamed " << n << " records, config " << hex64(cfg.content_hash()) << "\n";
        return ok;
    }
    if (cfg.output_dir.empty())
        throw ConfigError("output_dir: required (use --out or the config file)");
    const Manifest m = generate_dataset(cfg);
    std::cout << "manifest " << m.path.string() << "\n"
              << "records " << m.records << "\n"
              << "skipped " << m.skipped << "\n"
              << "manifest_hash " << hex64(m.hash) << "\n"
              << "config_hash " << hex64(cfg.content_hash()) << "\n";
    return ok;
}

int run_evaluate(const EvaluateArgs& a)
{
    EvalOptions opt;
    opt.flattened = a.flattened || !a.curves.empty();
    opt.workers = a.workers > 0 ? a.workers : default_workers();
    if (!a.curves.empty())
        opt.curves_dir = fs::path(a.curves);
    const auto types = a.type_map.empty() ? std::map<std::string, BlurType>{} : load_type_map(a.type_map);
    const EvalSummary s = evaluate_dataset(a.pred, a.gt, types, opt);

    if (!a.csv.empty())
        write_records_csv(s, a.csv);
    if (!s.missing.empty())
        std::cerr << "warning: " << s.missing.size() << " ground-truth masks have no prediction\n";
    if (!s.undefined.empty())
        std::cerr << "warning: " << s.undefined.size() << " single-class masks skipped\n";
    if (s.records.empty()) {
        std::cerr << "error: no image could be scored\n";
        return undefined_metric;
    }
    std::cout << format_summary(s);
    return ok;
}

std::vector<fs::path> list_images(const fs::path& dir)
{
    if (!fs::is_directory(dir))
        throw DecodeError("not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        auto ext = e.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (e.is_regular_file() && (ext == ".png" || ext == ".jpg" || ext == ".jpeg"))
            out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

int run_baseline(const BaselineArgs& a)
{
    const auto inputs = list_images(a.in);
    if (inputs.empty()) {
        std::cerr << "warning: no images in " << a.in << "\n";
        return ok;
    }
    fs::create_directories(a.out);
    const Predictor predict = [&](const Image& img) { return sharpness_map(img, a.scales, a.pooling); };

    const int workers = std::min<int>(a.workers > 0 ? a.workers : default_workers(), inputs.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i; (i = next++) < inputs.size();) {
                    const Image img = load_image(inputs[i]);
                    const Image map = a.tta ? tta_average(predict, img) : predict(img);
                    save_image(map, fs::path(a.out) / (inputs[i].stem().string() + ".png"));
                }
            } catch (...) {
                errors[t] = std::current_exception();
                next = inputs.size();
            }
        });
    for (auto& th : pool)
        th.join();
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    std::cout << "wrote " << inputs.size() << " maps to " << a.out << "\n";
    return ok;
}

nlohmann::json find_record(const fs::path& manifest, const std::string& id)
{
    std::ifstream in(manifest);
    if (!in)
        throw DecodeError("cannot read " + manifest.string());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded())
            throw FormatError("manifest line is not JSON: " + line);
        if (rec.value("id", "") == id)
            return rec;
    }
    throw FormatError("no record with id " + id + " in " + manifest.string());
}

int run_inspect(const InspectArgs& a)
{
    const fs::path manifest = a.manifest;
    const auto rec = find_record(manifest, a.id);
    std::cout << rec.dump(2) << "\n";

    const BlurKernel k = realize_kernel(blur_spec_from_record(rec));
    double peak = 0.0;
    for (double v : k.data())
        peak = std::max(peak, v);
    std::cout << "kernel " << k.size() << "x" << k.size() << " sum " << k.sum() << " peak " << peak << "\n";

    if (!a.kernel_out.empty()) {
        Image view(k.size() * a.zoom, k.size() * a.zoom, 1);
        for (int y = 0; y < view.height(); ++y)
            for (int x = 0; x < view.width(); ++x)
                view.at(x, y) = k.at(x / a.zoom, y / a.zoom) / peak;
        save_image(view, a.kernel_out);
    }
    if (!a.sample_out.empty()) {
        const fs::path cfg_path = a.config.empty() ? manifest.parent_path() / "config.json" : fs::path(a.config);
        const GeneratorConfig cfg = load_config(cfg_path);
        const SourceCatalog catalog(cfg);
        const auto image_index = rec.at("image_index").get<std::size_t>();
        const SamplePair s = realize_sample(cfg, catalog, image_index, rec.at("sample_index").get<std::size_t>(),
                                            rec.at("sample_seed").get<std::uint64_t>());
        fs::create_directories(a.sample_out);
        save_image(s.image, fs::path(a.sample_out) / (a.id + "_image.png"));
        save_mask(s.mask, fs::path(a.sample_out) / (a.id + "_mask.png"));
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv)
{
    // a closed stdout ends --stream through the stream state instead of a signal
    std::signal(SIGPIPE, SIG_IGN);

    CLI::App app{"Synthesize partially blurred images with exact blur masks and score blur maps"};
    app.set_version_flag("--version", std::to_string(kSchemaVersion), "Print the config schema version");
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Write a dataset (or a record stream) of blurred pairs");
    g->add_option("--config", gen.config, "JSON config file; explicit flags override its values")
        ->check(CLI::ExistingFile);
    g->add_option("--source", gen.source, "Directory of sharp source images");
    g->add_option("--proposals", gen.proposals, "Proposal masks, one subdirectory per image stem");
    g->add_option("--labels", gen.labels, "Label maps named {stem}.png");
    g->add_option("--mask-mode", gen.mask_mode, "proposals or labels");
    g->add_option("--out", gen.out, "Output directory");
    g->add_option("--seed", gen.seed, "Master seed");
    g->add_option("--samples-per-image", gen.samples_per_image, "Samples drawn per source image");
    g->add_option("--workers", gen.workers, "Worker threads (0 = all cores)");
    g->add_option("--output-size", gen.output_size, "Square output side in pixels");
    g->add_flag("--no-augment", gen.no_augment, "Skip affine, color, crop and JPEG augmentation");
    g->add_flag("--stream", gen.stream, "Write length-prefixed records to stdout instead of files");
    g->add_option("--count", gen.count, "Number of stream indices (default: unbounded)");

    EvaluateArgs ev;
    auto* e = app.add_subcommand("evaluate", "Per-image AUC / AP of predicted blur maps");
    e->add_option("--pred", ev.pred, "Prediction maps named {id}.png")->required()->check(CLI::ExistingDirectory);
    e->add_option("--gt", ev.gt, "Ground-truth masks named {id}.png")->required()->check(CLI::ExistingDirectory);
    e->add_option("--type-map", ev.type_map, "CSV of id,blur_type rows")->check(CLI::ExistingFile);
    e->add_flag("--flattened", ev.flattened, "Also score all pixels of the set as one pool");
    e->add_option("--csv", ev.csv, "Write per-image scores to this CSV");
    e->add_option("--curves", ev.curves, "Write flattened ROC and PR curves into this directory");
    e->add_option("--workers", ev.workers, "Worker threads (0 = all cores)");

    BaselineArgs base;
    auto* b = app.add_subcommand("baseline", "Write non-learned blur maps for a directory of images");
    b->add_option("--in", base.in, "Input image directory")->required();
    b->add_option("--out", base.out, "Output directory for {stem}.png maps")->required();
    b->add_option("--scales", base.scales, "Gradient scales (Gaussian sigma)");
    b->add_option("--pooling", base.pooling, "Pooling window sigma (0 disables)");
    b->add_flag("--tta", base.tta, "Average with the flipped prediction");
    b->add_option("--workers", base.workers, "Worker threads (0 = all cores)");

    InspectArgs ins;
    auto* i = app.add_subcommand("inspect", "Print a manifest record and re-realize its kernel");
    i->add_option("--manifest", ins.manifest, "manifest.jsonl of a generated set")->required();
    i->add_option("--id", ins.id, "Sample id")->required();
    i->add_option("--kernel-out", ins.kernel_out, "Write the kernel as a PNG scaled to its peak");
    i->add_option("--zoom", ins.zoom, "Kernel PNG magnification")->check(CLI::Range(1, 64));
    i->add_option("--sample-out", ins.sample_out, "Re-generate the sample image and mask into this directory");
    i->add_option("--config", ins.config, "Config of the run (default: config.json beside the manifest)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? ok : config_error;
    }

    try {
        if (g->parsed())
            return run_generate(g, gen);
        if (e->parsed())
            return run_evaluate(ev);
        if (b->parsed())
            return run_baseline(base);
        return run_inspect(ins);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return config_error;
    } catch (const UndefinedMetricError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return undefined_metric;
    } catch (const DecodeError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return io_error;
    } catch (const WriteError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return io_error;
    } catch (const FormatError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return io_error;
    } catch (const fs::filesystem_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return io_error;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return failure;
    }
}
