#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "blursynth/augment.hpp"
#include "blursynth/blurkernel.hpp"
#include "blursynth/maskops.hpp"

namespace blursynth {

/// Version of the config / manifest schema written into every record.
inline constexpr int kSchemaVersion = 1;

/// Constants of the downstream training recipe. Recorded for trainers that
/// consume the generated data; nothing in this library uses them.
namespace training_recipe {
inline constexpr int batch_size = 18;
inline constexpr double learning_rate = 1e-5;
inline constexpr double weight_decay = 5e-4;
inline constexpr int input_size = 224;
}  // namespace training_recipe

enum class MaskMode { proposals, labels };

std::string_view to_string(MaskMode mode) noexcept;
MaskMode parse_mask_mode(std::string_view text);

struct GeneratorConfig {
    std::filesystem::path source_dir;
    MaskMode mask_mode = MaskMode::proposals;
    std::filesystem::path proposal_dir;  // one subdirectory per source image stem
    std::filesystem::path label_dir;     // `{stem}.png` label maps
    Connectivity connectivity = Connectivity::eight;
    double p_inv = 0.5;
    BlurRanges blur;
    double inpaint_radius = 5.0;

    bool augment = true;
    AffineRanges affine;
    JitterRanges jitter;
    CropRanges crop;  // also carries the output size
    JpegRanges jpeg;

    int samples_per_image = 1;
    std::uint64_t master_seed = 0;
    int workers = 0;  // 0 = hardware concurrency
    std::filesystem::path output_dir;

    /// Throws ConfigError with a `field: reason` message.
    void validate() const;

    /// Every field that influences generated content (not workers/output_dir).
    nlohmann::ordered_json content_json() const;

    /// FNV-1a 64 of content_json().dump().
    std::uint64_t content_hash() const;

    int resolved_workers() const noexcept;
};

/// Overlay the keys of a JSON object onto `cfg`. Unknown keys and ill-typed
/// values raise ConfigError naming the key.
void apply_json(GeneratorConfig& cfg, const nlohmann::json& j);

GeneratorConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64-bit.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept;
std::string hex64(std::uint64_t v);

}  // namespace blursynth
