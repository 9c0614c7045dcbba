#include "blursynth/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "blursynth/augment.hpp"
#include "blursynth/error.hpp"
#include "blursynth/maskops.hpp"
#include "blursynth/resample.hpp"
#include "blursynth/rng.hpp"
#include "blursynth/synthesis.hpp"
#include "parallel.hpp"

namespace blursynth {

using nlohmann::json;
using nlohmann::ordered_json;

namespace fs = std::filesystem;

SourceCatalog::SourceCatalog(const GeneratorConfig& cfg)
{
    std::error_code ec;
    fs::directory_iterator it(cfg.source_dir, ec);
    if (ec)
        throw DecodeError("cannot list source directory " + cfg.source_dir.string());
    for (const auto& entry : it) {
        if (!entry.is_regular_file())
            continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg")
            paths_.push_back(entry.path());
    }
    std::sort(paths_.begin(), paths_.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
}

std::optional<std::size_t> SourceCatalog::find(const std::string& file_name) const
{
    for (std::size_t i = 0; i < paths_.size(); ++i)
        if (paths_[i].filename().string() == file_name)
            return i;
    return std::nullopt;
}

std::string sample_id(std::size_t global_index)
{
    std::ostringstream out;
    out << std::setw(8) << std::setfill('0') << global_index;
    return out.str();
}

namespace {

// Mask source of one image, loaded once and reused across attempts.
struct MaskSource {
    std::optional<ScoredProposalSet> proposals;
    LabelMap labels;
};

MaskSource load_mask_source(const GeneratorConfig& cfg, const std::string& stem)
{
    MaskSource src;
    if (cfg.mask_mode == MaskMode::proposals)
        src.proposals = load_proposal_set(cfg.proposal_dir / stem);
    else
        src.labels = load_label_map(cfg.label_dir / (stem + ".png"));
    return src;
}

std::pair<Image, BinaryMask> augment_pair(const GeneratorConfig& cfg, Image img, BinaryMask mask, Rng& rng)
{
    const int ow = cfg.crop.output_width, oh = cfg.crop.output_height;
    if (!cfg.augment)
        return {resize_bilinear(img, ow, oh), resize_nearest(mask, ow, oh)};
    auto [warped, warped_mask] = random_affine(img, mask, cfg.affine, rng);
    auto [cropped, cropped_mask] = random_crop_resize(warped, warped_mask, cfg.crop, rng);
    Image jittered = color_jitter(cropped, cfg.jitter, rng);
    return {jpeg_augment(jittered, cfg.jpeg, rng), std::move(cropped_mask)};
}

SamplePair run_chain(const GeneratorConfig& cfg, const SourceCatalog& catalog, std::size_t image_index,
                     std::size_t sample_index, std::uint64_t seed)
{
    if (image_index >= catalog.size())
        throw ArgumentError("image index " + std::to_string(image_index) + " outside the " +
                            std::to_string(catalog.size()) + "-image source set");
    const Image img = load_image(catalog.path(image_index));
    const MaskSource source = load_mask_source(cfg, catalog.stem(image_index));

    SamplePair sample;
    SampleMeta& meta = sample.meta;
    meta.id = sample_id(image_index * static_cast<std::size_t>(cfg.samples_per_image) + sample_index);
    meta.image_index = image_index;
    meta.sample_index = sample_index;
    meta.source_image = catalog.path(image_index).filename().string();
    meta.sample_seed = seed;
    meta.mask_source = cfg.mask_mode;

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Rng rng(attempt == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(attempt)));
        BinaryMask mask;
        if (source.proposals) {
            const std::size_t idx = sample_proposal_index(*source.proposals, rng);
            mask = source.proposals->proposal(idx);
            meta.mask_index = static_cast<std::int64_t>(idx);
        } else {
            mask = largest_object_mask(source.labels, cfg.connectivity);
            meta.mask_index = dominant_label(source.labels);
        }
        if (!mask.same_size(img))
            throw FormatError("mask for " + meta.source_image + " is " + std::to_string(mask.width()) + "x" +
                              std::to_string(mask.height()) + ", image is " + std::to_string(img.width()) + "x" +
                              std::to_string(img.height()));
        auto inv = maybe_invert(mask, cfg.p_inv, rng);
        meta.inverted = inv.inverted;
        meta.blur = sample_blur_spec(cfg.blur, rng);
        Image synthesized;
        try {
            synthesized = synthesize_halo_free(img, inv.mask, realize_kernel(meta.blur), cfg.inpaint_radius);
        } catch (const DegenerateMaskError&) {
            continue;
        } catch (const DegenerateKernelError&) {
            continue;
        }
        meta.attempt = attempt;
        auto [out_img, out_mask] = augment_pair(cfg, std::move(synthesized), std::move(inv.mask), rng);
        sample.image = std::move(out_img);
        sample.mask = std::move(out_mask);
        return sample;
    }
    throw SkipSampleError("sample " + meta.id + " (" + meta.source_image + ") skipped after " +
                          std::to_string(kMaxAttempts) + " degenerate attempts");
}

}  // namespace

SamplePair realize_sample(const GeneratorConfig& cfg, const SourceCatalog& catalog, std::size_t image_index,
                          std::size_t sample_index, std::uint64_t seed)
{
    cfg.validate();
    return run_chain(cfg, catalog, image_index, sample_index, seed);
}

SamplePair generate_sample(const GeneratorConfig& cfg, const SourceCatalog& catalog, std::size_t image_index,
                           std::size_t sample_index)
{
    return realize_sample(cfg, catalog, image_index, sample_index,
                          sample_seed(cfg.master_seed, image_index, sample_index));
}

SamplePair generate_sample(const GeneratorConfig& cfg, std::size_t image_index, std::size_t sample_index)
{
    return generate_sample(cfg, SourceCatalog(cfg), image_index, sample_index);
}

ordered_json manifest_record(const SampleMeta& meta, bool with_paths)
{
    ordered_json r;
    r["id"] = meta.id;
    if (with_paths) {
        r["image_path"] = "images/" + meta.id + ".png";
        r["mask_path"] = "masks/" + meta.id + ".png";
    }
    r["source_image"] = meta.source_image;
    r["image_index"] = meta.image_index;
    r["sample_index"] = meta.sample_index;
    r["blur_kind"] = to_string(meta.blur.kind);
    if (meta.blur.kind == BlurKind::defocus) {
        r["sigma"] = meta.blur.sigma;
    } else {
        r["m"] = meta.blur.length;
        r["alpha"] = meta.blur.angle;
        r["elastic_amplitude"] = meta.blur.elastic_amplitude;
        r["elastic_smoothness"] = meta.blur.elastic_smoothness;
        r["elastic_seed"] = meta.blur.elastic_seed;
    }
    r["mask_source"] = to_string(meta.mask_source);
    r["mask_index"] = meta.mask_index;
    r["inverted"] = meta.inverted;
    r["sample_seed"] = meta.sample_seed;
    r["attempt"] = meta.attempt;
    r["schema_version"] = kSchemaVersion;
    return r;
}

BlurSpec blur_spec_from_record(const json& record)
{
    try {
        BlurSpec spec;
        spec.kind = parse_blur_kind(record.at("blur_kind").get<std::string>());
        if (spec.kind == BlurKind::defocus) {
            spec.sigma = record.at("sigma").get<double>();
        } else {
            spec.length = record.at("m").get<int>();
            spec.angle = record.at("alpha").get<double>();
            spec.elastic_amplitude = record.at("elastic_amplitude").get<double>();
            spec.elastic_smoothness = record.at("elastic_smoothness").get<double>();
            spec.elastic_seed = record.at("elastic_seed").get<std::uint64_t>();
        }
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw FormatError(std::string("manifest record: ") + e.what());
    }
}

namespace {

struct EncodedSample {
    bool skipped = false;
    std::string skip_reason;
    SampleMeta meta;
    std::vector<std::uint8_t> image_png;
    std::vector<std::uint8_t> mask_png;
};

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw WriteError("cannot write " + path.string());
}

void write_text(const fs::path& path, const std::string& text)
{
    write_bytes(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

}  // namespace

Manifest generate_dataset(const GeneratorConfig& cfg)
{
    cfg.validate();
    if (cfg.output_dir.empty())
        throw ConfigError("output_dir: is required");
    const SourceCatalog catalog(cfg);
    const fs::path out = cfg.output_dir;
    const fs::path marker = out / "_INCOMPLETE";

    try {
        fs::create_directories(out / "images");
        fs::create_directories(out / "masks");
    } catch (const fs::filesystem_error& e) {
        throw WriteError(std::string("cannot create output tree: ") + e.what());
    }
    write_text(marker, "generation in progress or aborted\n");

    const std::size_t per_image = static_cast<std::size_t>(cfg.samples_per_image);
    const std::size_t total = catalog.size() * per_image;
    const int workers = cfg.resolved_workers();
    const std::size_t batch = static_cast<std::size_t>(workers) * 4;

    Manifest manifest;
    manifest.path = out / "manifest.jsonl";
    std::ofstream manifest_out(manifest.path, std::ios::binary | std::ios::trunc);
    if (!manifest_out)
        throw WriteError("cannot write " + manifest.path.string());
    std::string skipped_lines;
    std::uint64_t hash = fnv1a64("");

    std::vector<EncodedSample> slots;
    for (std::size_t start = 0; start < total; start += batch) {
        const std::size_t n = std::min(batch, total - start);
        slots.assign(n, {});
        detail::parallel_for(n, workers, [&](std::size_t k) {
            const std::size_t g = start + k;
            EncodedSample& slot = slots[k];
            try {
                SamplePair s = generate_sample(cfg, catalog, g / per_image, g % per_image);
                slot.image_png = encode_image(s.image);
                slot.mask_png = encode_mask(s.mask);
                slot.meta = std::move(s.meta);
            } catch (const SkipSampleError& e) {
                slot.skipped = true;
                slot.skip_reason = e.what();
                slot.meta.id = sample_id(g);
                slot.meta.image_index = g / per_image;
                slot.meta.sample_index = g % per_image;
                slot.meta.source_image = catalog.path(g / per_image).filename().string();
            }
        });
        for (auto& slot : slots) {
            if (slot.skipped) {
                ordered_json r;
                r["id"] = slot.meta.id;
                r["source_image"] = slot.meta.source_image;
                r["image_index"] = slot.meta.image_index;
                r["sample_index"] = slot.meta.sample_index;
                r["reason"] = slot.skip_reason;
                skipped_lines += r.dump() + "\n";
                ++manifest.skipped;
                continue;
            }
            write_bytes(out / "images" / (slot.meta.id + ".png"), slot.image_png);
            write_bytes(out / "masks" / (slot.meta.id + ".png"), slot.mask_png);
            const std::string line = manifest_record(slot.meta).dump() + "\n";
            manifest_out << line;
            hash = fnv1a64(line, hash);
            ++manifest.records;
        }
        if (!manifest_out)
            throw WriteError("cannot write " + manifest.path.string());
    }
    manifest_out.close();
    if (!manifest_out)
        throw WriteError("cannot write " + manifest.path.string());

    write_text(out / "config.json", cfg.content_json().dump(2) + "\n");
    if (!skipped_lines.empty())
        write_text(out / "skipped.jsonl", skipped_lines);
    else
        fs::remove(out / "skipped.jsonl");
    manifest.hash = hash;
    fs::remove(marker);
    return manifest;
}

namespace {

void append_u32le(std::vector<std::uint8_t>& buf, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t read_u32be(const std::uint8_t* p)
{
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

// Length of the PNG that starts at bytes[0], through its IEND chunk.
std::size_t png_length(std::span<const std::uint8_t> bytes)
{
    static constexpr std::array<std::uint8_t, 8> signature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    if (bytes.size() < 8 || !std::equal(signature.begin(), signature.end(), bytes.begin()))
        throw FormatError("stream payload: expected a PNG signature");
    std::size_t pos = 8;
    while (pos + 12 <= bytes.size()) {
        const std::size_t len = read_u32be(&bytes[pos]);
        const bool iend = std::memcmp(&bytes[pos + 4], "IEND", 4) == 0;
        pos += 12 + len;
        if (pos > bytes.size())
            break;
        if (iend)
            return pos;
    }
    throw FormatError("stream payload: truncated PNG");
}

}  // namespace

std::vector<std::uint8_t> stream_payload(const SamplePair& sample)
{
    std::vector<std::uint8_t> payload = encode_image(sample.image);
    const auto mask = encode_mask(sample.mask);
    payload.insert(payload.end(), mask.begin(), mask.end());
    const std::string text = manifest_record(sample.meta, false).dump();
    payload.insert(payload.end(), text.begin(), text.end());
    return payload;
}

StreamRecord parse_stream_payload(std::span<const std::uint8_t> payload)
{
    const std::size_t image_len = png_length(payload);
    const auto rest = payload.subspan(image_len);
    const std::size_t mask_len = png_length(rest);
    const auto text = rest.subspan(mask_len);
    StreamRecord rec{decode_image(payload.first(image_len)), decode_mask(rest.first(mask_len)), {}};
    try {
        rec.record = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("stream payload: bad record text: ") + e.what());
    }
    return rec;
}

std::optional<StreamRecord> read_stream_record(std::istream& in)
{
    std::array<std::uint8_t, 4> prefix{};
    in.read(reinterpret_cast<char*>(prefix.data()), 4);
    if (in.gcount() == 0)
        return std::nullopt;
    if (in.gcount() != 4)
        throw FormatError("stream: truncated length prefix");
    const std::uint32_t len = std::uint32_t{prefix[0]} | (std::uint32_t{prefix[1]} << 8) |
                              (std::uint32_t{prefix[2]} << 16) | (std::uint32_t{prefix[3]} << 24);
    std::vector<std::uint8_t> payload(len);
    in.read(reinterpret_cast<char*>(payload.data()), len);
    if (static_cast<std::uint32_t>(in.gcount()) != len)
        throw FormatError("stream: truncated payload");
    return parse_stream_payload(payload);
}

std::size_t stream_samples(const GeneratorConfig& cfg, std::ostream& sink, std::optional<std::size_t> count)
{
    cfg.validate();
    if (count && *count == 0)
        return 0;
    const SourceCatalog catalog(cfg);
    if (catalog.size() == 0)
        throw ConfigError("source_dir: no images in " + cfg.source_dir.string());
    const int workers = cfg.resolved_workers();
    const std::size_t batch = static_cast<std::size_t>(workers) * 4;
    std::size_t emitted = 0;

    std::vector<std::optional<std::vector<std::uint8_t>>> slots;
    for (std::size_t start = 0; !count || start < *count; start += batch) {
        const std::size_t n = count ? std::min(batch, *count - start) : batch;
        slots.assign(n, std::nullopt);
        detail::parallel_for(n, workers, [&](std::size_t k) {
            const std::size_t g = start + k;
            try {
                SamplePair s = generate_sample(cfg, catalog, g % catalog.size(), g / catalog.size());
                s.meta.id = sample_id(g);
                std::vector<std::uint8_t> framed;
                const auto payload = stream_payload(s);
                framed.reserve(payload.size() + 4);
                append_u32le(framed, static_cast<std::uint32_t>(payload.size()));
                framed.insert(framed.end(), payload.begin(), payload.end());
                slots[k] = std::move(framed);
            } catch (const SkipSampleError&) {
            }
        });
        for (const auto& slot : slots) {
            if (!slot)
                continue;
            sink.write(reinterpret_cast<const char*>(slot->data()), static_cast<std::streamsize>(slot->size()));
            sink.flush();
            if (!sink)
                return emitted;
            ++emitted;
        }
    }
    return emitted;
}

}  // namespace blursynth
