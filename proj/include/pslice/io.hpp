#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pslice/sampler.hpp"
#include "pslice/variety.hpp"

namespace pslice {

/// {"name", "ambient": {"type", "n_vars"}, "variables", "polynomials", "dimension", "degree"}.
nlohmann::json variety_to_json(const Variety& variety);
Variety variety_from_json(const nlohmann::json& j);
Variety load_variety(const std::string& path);

/// Built-in varieties: elliptic, sl2, pline, conic.
std::vector<std::string> example_names();
nlohmann::json example_variety_json(const std::string& name);

/// {"type": "uniform"} or {"modulus_exponent": j, "support_radius": R, "classes": [{"residue": [...], "weight": w}]}.
DensitySpec density_from_json(const nlohmann::json& j, std::optional<std::uint32_t> radius_override = std::nullopt);
nlohmann::json density_to_json(const DensitySpec& f);

struct SampleRunInfo {
    std::string variety;
    std::uint32_t prime = 0;
    int precision = 0;
    std::uint64_t seed = 0;
    std::uint32_t workers = 1;
    std::uint32_t support_radius = 0;
};

/// Line-delimited records: one header, then one record per point.
std::string format_samples(const SampleBatch& batch, const SampleRunInfo& info);

struct SampleFile {
    nlohmann::json header;
    ContextPtr ctx;
    std::vector<PadicVector> points;
};

SampleFile parse_samples(std::string_view text);
SampleFile read_samples(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

/// 64-bit FNV-1a digest, used to fingerprint outputs in manifests.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace pslice
