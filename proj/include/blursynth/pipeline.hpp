#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "blursynth/blurkernel.hpp"
#include "blursynth/config.hpp"
#include "blursynth/image.hpp"

namespace blursynth {

/// Source images of a config: regular files with a .png/.jpg/.jpeg
/// extension in source_dir, sorted by file name.
class SourceCatalog {
public:
    explicit SourceCatalog(const GeneratorConfig& cfg);

    std::size_t size() const noexcept { return paths_.size(); }
    const std::filesystem::path& path(std::size_t i) const { return paths_.at(i); }
    std::string stem(std::size_t i) const { return paths_.at(i).stem().string(); }
    std::optional<std::size_t> find(const std::string& file_name) const;

private:
    std::vector<std::filesystem::path> paths_;
};

struct SampleMeta {
    std::string id;
    std::size_t image_index = 0;
    std::size_t sample_index = 0;
    std::string source_image;  // file name inside source_dir
    BlurSpec blur;
    MaskMode mask_source = MaskMode::proposals;
    std::int64_t mask_index = 0;  // proposal index or label id
    bool inverted = false;
    std::uint64_t sample_seed = 0;
    int attempt = 0;  // resampling attempts before success
};

struct SamplePair {
    Image image;
    BinaryMask mask;
    SampleMeta meta;
};

/// Number of resampling attempts before a sample is skipped.
inline constexpr int kMaxAttempts = 8;

/// Deterministic in (cfg content, image_index, sample_index). The sample
/// seed is sample_seed(master_seed, image_index, sample_index); attempt a > 0
/// reseeds with derive_seed(seed, a). Throws SkipSampleError when every
/// attempt hits a degenerate mask or kernel.
SamplePair generate_sample(const GeneratorConfig& cfg, std::size_t image_index, std::size_t sample_index);
SamplePair generate_sample(const GeneratorConfig& cfg, const SourceCatalog& catalog, std::size_t image_index,
                           std::size_t sample_index);

/// Re-run the chain for an explicit sample seed (as stored in a manifest).
SamplePair realize_sample(const GeneratorConfig& cfg, const SourceCatalog& catalog, std::size_t image_index,
                          std::size_t sample_index, std::uint64_t seed);

/// Manifest line for a sample. Paths are included when `with_paths`.
nlohmann::ordered_json manifest_record(const SampleMeta& meta, bool with_paths = true);

/// Inverse of the blur fields of manifest_record.
BlurSpec blur_spec_from_record(const nlohmann::json& record);

std::string sample_id(std::size_t global_index);

struct Manifest {
    std::filesystem::path path;
    std::size_t records = 0;
    std::size_t skipped = 0;
    std::uint64_t hash = 0;  // FNV-1a 64 of the manifest bytes
};

/// Writes images/{id}.png, masks/{id}.png, manifest.jsonl, config.json and,
/// when any sample is skipped, skipped.jsonl into cfg.output_dir. Global
/// index g = image_index * samples_per_image + sample_index. A `_INCOMPLETE`
/// marker exists while writing and stays behind if the run aborts.
Manifest generate_dataset(const GeneratorConfig& cfg);

/// Stream order: g -> (image g % N, sample g / N), i.e. one pass over the
/// images per epoch. Each emitted record is a 4-byte little-endian payload
/// length followed by the payload: image PNG, mask PNG, then the manifest
/// record as compact JSON (no paths). Skipped samples emit nothing. Runs
/// `count` indices, or forever when empty; stops cleanly when the sink fails.
/// Returns the number of records emitted.
std::size_t stream_samples(const GeneratorConfig& cfg, std::ostream& sink, std::optional<std::size_t> count);

struct StreamRecord {
    Image image;
    BinaryMask mask;
    nlohmann::json record;
};

/// Split one payload into its two PNGs (by walking PNG chunks) and the JSON.
StreamRecord parse_stream_payload(std::span<const std::uint8_t> payload);

/// Reads the next length-prefixed record; empty at clean end of stream.
std::optional<StreamRecord> read_stream_record(std::istream& in);

/// Serialized payload of a sample (what stream_samples writes after the prefix).
std::vector<std::uint8_t> stream_payload(const SamplePair& sample);

}  // namespace blursynth
