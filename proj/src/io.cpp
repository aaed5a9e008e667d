#include "pslice/io.hpp"

#include <fstream>
#include <sstream>

namespace pslice {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw InvalidArgument(std::string("missing field \"") + key + "\"");
    }
    return j.at(key);
}

struct ExampleSpec {
    const char* name;
    const char* ambient;
    std::vector<std::string> variables;
    std::vector<std::string> polynomials;
    int dimension;
    int degree;
};

const std::vector<ExampleSpec>& examples() {
    static const std::vector<ExampleSpec> list = {
        {"elliptic", "affine", {"x", "y"}, {"y^2 - x^3 - 1"}, 1, 3},
        {"sl2", "affine", {"a", "b", "c", "d"}, {"a*d - b*c - 1"}, 3, 2},
        {"pline", "projective", {"x0", "x1", "x2"}, {"x0 + x1 + x2"}, 1, 1},
        {"conic", "projective", {"x0", "x1", "x2"}, {"x0*x2 - x1^2"}, 1, 2},
    };
    return list;
}

}  // namespace

json variety_to_json(const Variety& variety) {
    json polys = json::array();
    for (const auto& f : variety.system().polys) polys.push_back(f.to_string());
    return json{{"name", variety.name()},
                {"ambient",
                 {{"type", variety.is_projective() ? "projective" : "affine"}, {"n_vars", variety.coords()}}},
                {"variables", variety.variables()},
                {"polynomials", polys},
                {"dimension", variety.dim()},
                {"degree", variety.degree()}};
}

Variety variety_from_json(const json& j) {
    try {
        const auto name = require(j, "name").get<std::string>();
        const json& amb = require(j, "ambient");
        const auto type = require(amb, "type").get<std::string>();
        Ambient ambient;
        if (type == "affine") ambient = Ambient::affine;
        else if (type == "projective") ambient = Ambient::projective;
        else throw InvalidArgument("ambient type must be \"affine\" or \"projective\", got \"" + type + "\"");
        const auto vars = require(j, "variables").get<std::vector<std::string>>();
        if (amb.contains("n_vars") && amb.at("n_vars").get<std::size_t>() != vars.size()) {
            throw InvalidArgument("ambient n_vars does not match the variable list");
        }
        for (std::size_t i = 0; i < vars.size(); ++i) {
            for (std::size_t k = i + 1; k < vars.size(); ++k) {
                if (vars[i] == vars[k]) throw InvalidArgument("duplicate variable '" + vars[i] + "'");
            }
        }
        std::vector<MultiPoly> polys;
        for (const auto& text : require(j, "polynomials")) polys.push_back(parse_poly(text.get<std::string>(), vars));
        const auto dim = require(j, "dimension").get<long>();
        if (dim < 1) throw InvalidArgument("dimension must be positive");
        std::optional<std::uint32_t> degree;
        if (j.contains("degree") && !j.at("degree").is_null()) {
            const auto d = j.at("degree").get<long>();
            if (d < 1) throw InvalidArgument("degree bound must be positive");
            degree = static_cast<std::uint32_t>(d);
        }
        return Variety(name, ambient, PolySystem::make(vars, std::move(polys)), static_cast<std::size_t>(dim), degree);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed variety spec: ") + e.what());
    }
}

Variety load_variety(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw InvalidArgument("cannot parse " + path + ": " + e.what());
    }
    return variety_from_json(j);
}

std::vector<std::string> example_names() {
    std::vector<std::string> out;
    for (const auto& e : examples()) out.emplace_back(e.name);
    return out;
}

json example_variety_json(const std::string& name) {
    for (const auto& e : examples()) {
        if (name != e.name) continue;
        return json{{"name", e.name},
                    {"ambient", {{"type", e.ambient}, {"n_vars", e.variables.size()}}},
                    {"variables", e.variables},
                    {"polynomials", e.polynomials},
                    {"dimension", e.dimension},
                    {"degree", e.degree}};
    }
    throw InvalidArgument("unknown example '" + name + "'");
}

DensitySpec density_from_json(const json& j, std::optional<std::uint32_t> radius_override) {
    try {
        std::uint32_t radius = 0;
        if (j.contains("support_radius")) radius = j.at("support_radius").get<std::uint32_t>();
        if (radius_override) radius = *radius_override;
        if (j.contains("type") && j.at("type").get<std::string>() == "uniform") return DensitySpec::uniform(radius);
        const int exponent = require(j, "modulus_exponent").get<int>();
        std::map<DensitySpec::Residue, double> weights;
        for (const auto& cls : require(j, "classes")) {
            auto residue = require(cls, "residue").get<DensitySpec::Residue>();
            const double w = require(cls, "weight").get<double>();
            if (!weights.emplace(std::move(residue), w).second) {
                throw InvalidArgument("residue class listed twice in density file");
            }
        }
        return DensitySpec::step(exponent, std::move(weights), radius);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed density spec: ") + e.what());
    }
}

json density_to_json(const DensitySpec& f) {
    if (f.is_uniform()) return json{{"type", "uniform"}, {"support_radius", f.support_radius()}};
    json classes = json::array();
    for (const auto& [r, w] : f.weights()) classes.push_back(json{{"residue", r}, {"weight", w}});
    return json{{"modulus_exponent", f.modulus_exponent()},
                {"support_radius", f.support_radius()},
                {"classes", classes}};
}

std::string format_samples(const SampleBatch& batch, const SampleRunInfo& info) {
    std::ostringstream os;
    const json header{{"type", "header"},
                      {"variety", info.variety},
                      {"prime", info.prime},
                      {"precision", info.precision},
                      {"seed", info.seed},
                      {"workers", info.workers},
                      {"support_radius", info.support_radius},
                      {"count", batch.points.size()},
                      {"slices_tried", batch.slices_tried},
                      {"accepted", batch.accepted},
                      {"resamples", batch.resamples},
                      {"bound", batch.bound},
                      {"max_fbar", batch.max_fbar}};
    os << header.dump() << '\n';
    for (std::size_t i = 0; i < batch.points.size(); ++i) {
        const auto& sp = batch.points[i];
        json coords = json::array();
        for (const auto& c : sp.point.coords) coords.push_back(scalar_to_json(c));
        const json rec{{"type", "point"},
                       {"index", i},
                       {"worker", sp.worker},
                       {"slice", sp.slice},
                       {"coords", coords}};
        os << rec.dump() << '\n';
    }
    return os.str();
}

SampleFile parse_samples(std::string_view text) {
    SampleFile out;
    std::istringstream is{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw InvalidArgument("sample line " + std::to_string(lineno) + ": " + e.what());
        }
        const auto type = rec.value("type", std::string{});
        if (type == "header") {
            out.header = rec;
            out.ctx = PadicContext::create(rec.at("prime").get<std::uint32_t>(), rec.at("precision").get<int>(),
                                           rec.value("seed", std::uint64_t{0}));
        } else if (type == "point") {
            if (!out.ctx) throw InvalidArgument("sample file has a point before its header");
            PadicVector x;
            for (const auto& c : rec.at("coords")) x.push_back(scalar_from_json(out.ctx, c));
            out.points.push_back(std::move(x));
        } else {
            throw InvalidArgument("sample line " + std::to_string(lineno) + " has unknown record type");
        }
    }
    if (!out.ctx) throw InvalidArgument("sample file has no header record");
    return out;
}

SampleFile read_samples(const std::string& path) {
    return parse_samples(read_text_file(path));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("write to " + path + " failed");
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace pslice
