#include "blursynth/config.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "blursynth/error.hpp"

namespace blursynth {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(MaskMode mode) noexcept
{
    return mode == MaskMode::labels ? "labels" : "proposals";
}

MaskMode parse_mask_mode(std::string_view text)
{
    if (text == "proposals")
        return MaskMode::proposals;
    if (text == "labels")
        return MaskMode::labels;
    throw ConfigError("mask_mode: expected 'proposals' or 'labels', got '" + std::string(text) + "'");
}

void GeneratorConfig::validate() const
{
    auto fail = [](const std::string& field, const std::string& why) { throw ConfigError(field + ": " + why); };
    if (source_dir.empty())
        fail("source_dir", "is required");
    if (mask_mode == MaskMode::proposals && proposal_dir.empty())
        fail("proposal_dir", "is required when mask_mode is 'proposals'");
    if (mask_mode == MaskMode::labels && label_dir.empty())
        fail("label_dir", "is required when mask_mode is 'labels'");
    if (!(p_inv >= 0.0 && p_inv <= 1.0))
        fail("p_inv", "must be in [0, 1]");
    if (!(inpaint_radius >= 1.0))
        fail("inpaint_radius", "must be >= 1");
    if (samples_per_image < 1)
        fail("samples_per_image", "must be >= 1");
    if (workers < 0)
        fail("workers", "must be >= 0");
    blur.validate();
    affine.validate();
    jitter.validate();
    crop.validate();
    jpeg.validate();
}

int GeneratorConfig::resolved_workers() const noexcept
{
    if (workers > 0)
        return workers;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

ordered_json GeneratorConfig::content_json() const
{
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["source_dir"] = source_dir.string();
    j["mask_mode"] = to_string(mask_mode);
    j["proposal_dir"] = proposal_dir.string();
    j["label_dir"] = label_dir.string();
    j["connectivity"] = static_cast<int>(connectivity);
    j["p_inv"] = p_inv;
    j["motion_ratio"] = blur.motion_ratio;
    j["sigma_min"] = blur.sigma_min;
    j["sigma_max"] = blur.sigma_max;
    j["m_min"] = blur.length_min;
    j["m_max"] = blur.length_max;
    j["elastic_amplitude_max"] = blur.elastic_amplitude_max;
    j["elastic_smoothness"] = blur.elastic_smoothness;
    j["inpaint_radius"] = inpaint_radius;
    j["augment"] = augment;
    j["max_rotation"] = affine.max_rotation;
    j["max_translation"] = affine.max_translation;
    j["scale_min"] = affine.min_scale;
    j["scale_max"] = affine.max_scale;
    j["hflip_probability"] = affine.hflip_probability;
    j["brightness"] = {jitter.brightness_min, jitter.brightness_max};
    j["contrast"] = {jitter.contrast_min, jitter.contrast_max};
    j["saturation"] = {jitter.saturation_min, jitter.saturation_max};
    j["crop_min"] = crop.min_fraction;
    j["crop_max"] = crop.max_fraction;
    j["output_size"] = {crop.output_width, crop.output_height};
    j["jpeg_probability"] = jpeg.probability;
    j["jpeg_quality"] = {jpeg.quality_min, jpeg.quality_max};
    j["samples_per_image"] = samples_per_image;
    j["seed"] = master_seed;
    return j;
}

std::uint64_t GeneratorConfig::content_hash() const { return fnv1a64(content_json().dump()); }

namespace {

template <class T>
T get_as(const json& v, const std::string& key)
{
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(key + ": wrong type (" + std::string(v.type_name()) + ")");
    }
}

void get_pair(const json& v, const std::string& key, double& lo, double& hi)
{
    if (!v.is_array() || v.size() != 2)
        throw ConfigError(key + ": expected [min, max]");
    lo = get_as<double>(v[0], key);
    hi = get_as<double>(v[1], key);
}

void get_pair(const json& v, const std::string& key, int& lo, int& hi)
{
    if (!v.is_array() || v.size() != 2)
        throw ConfigError(key + ": expected [min, max]");
    lo = get_as<int>(v[0], key);
    hi = get_as<int>(v[1], key);
}

}  // namespace

void apply_json(GeneratorConfig& cfg, const json& j)
{
    if (!j.is_object())
        throw ConfigError("config: top level must be an object");
    using Setter = std::function<void(const json&, const std::string&)>;
    auto num = [](double& field) -> Setter { return [&field](const json& v, const std::string& k) { field = get_as<double>(v, k); }; };
    auto integer = [](int& field) -> Setter { return [&field](const json& v, const std::string& k) { field = get_as<int>(v, k); }; };
    auto path = [](std::filesystem::path& field) -> Setter {
        return [&field](const json& v, const std::string& k) { field = get_as<std::string>(v, k); };
    };

    const std::map<std::string, Setter> setters = {
        {"schema_version",
         [](const json& v, const std::string& k) {
             if (get_as<int>(v, k) != kSchemaVersion)
                 throw ConfigError(k + ": unsupported version " + v.dump());
         }},
        {"source_dir", path(cfg.source_dir)},
        {"mask_mode", [&](const json& v, const std::string& k) { cfg.mask_mode = parse_mask_mode(get_as<std::string>(v, k)); }},
        {"proposal_dir", path(cfg.proposal_dir)},
        {"label_dir", path(cfg.label_dir)},
        {"connectivity",
         [&](const json& v, const std::string& k) {
             const int c = get_as<int>(v, k);
             if (c != 4 && c != 8)
                 throw ConfigError(k + ": must be 4 or 8");
             cfg.connectivity = c == 4 ? Connectivity::four : Connectivity::eight;
         }},
        {"p_inv", num(cfg.p_inv)},
        {"motion_ratio", num(cfg.blur.motion_ratio)},
        {"sigma_min", num(cfg.blur.sigma_min)},
        {"sigma_max", num(cfg.blur.sigma_max)},
        {"m_min", integer(cfg.blur.length_min)},
        {"m_max", integer(cfg.blur.length_max)},
        {"elastic_amplitude_max", num(cfg.blur.elastic_amplitude_max)},
        {"elastic_smoothness", num(cfg.blur.elastic_smoothness)},
        {"inpaint_radius", num(cfg.inpaint_radius)},
        {"augment", [&](const json& v, const std::string& k) { cfg.augment = get_as<bool>(v, k); }},
        {"max_rotation", num(cfg.affine.max_rotation)},
        {"max_translation", num(cfg.affine.max_translation)},
        {"scale_min", num(cfg.affine.min_scale)},
        {"scale_max", num(cfg.affine.max_scale)},
        {"hflip_probability", num(cfg.affine.hflip_probability)},
        {"brightness", [&](const json& v, const std::string& k) { get_pair(v, k, cfg.jitter.brightness_min, cfg.jitter.brightness_max); }},
        {"contrast", [&](const json& v, const std::string& k) { get_pair(v, k, cfg.jitter.contrast_min, cfg.jitter.contrast_max); }},
        {"saturation", [&](const json& v, const std::string& k) { get_pair(v, k, cfg.jitter.saturation_min, cfg.jitter.saturation_max); }},
        {"crop_min", num(cfg.crop.min_fraction)},
        {"crop_max", num(cfg.crop.max_fraction)},
        {"output_size",
         [&](const json& v, const std::string& k) {
             if (v.is_number_integer())
                 cfg.crop.output_width = cfg.crop.output_height = get_as<int>(v, k);
             else
                 get_pair(v, k, cfg.crop.output_width, cfg.crop.output_height);
         }},
        {"jpeg_probability", num(cfg.jpeg.probability)},
        {"jpeg_quality", [&](const json& v, const std::string& k) { get_pair(v, k, cfg.jpeg.quality_min, cfg.jpeg.quality_max); }},
        {"samples_per_image", integer(cfg.samples_per_image)},
        {"seed", [&](const json& v, const std::string& k) { cfg.master_seed = get_as<std::uint64_t>(v, k); }},
        {"workers", integer(cfg.workers)},
        {"output_dir", path(cfg.output_dir)},
    };

    for (const auto& [key, value] : j.items()) {
        const auto it = setters.find(key);
        if (it == setters.end())
            throw ConfigError(key + ": unknown config key");
        it->second(value, key);
    }
}

GeneratorConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot read " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path.string() + ": " + e.what());
    }
    GeneratorConfig cfg;
    apply_json(cfg, j);
    return cfg;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) noexcept
{
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << v;
    return out.str();
}

}  // namespace blursynth
