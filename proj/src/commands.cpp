#include "pslice/commands.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "pslice/io.hpp"
#include "pslice/sampler.hpp"
#include "pslice/stats.hpp"

namespace pslice {

using nlohmann::json;

json options_to_json(const RunOptions& opts) {
    return json{{"command", opts.command},
                {"variety", opts.variety},
                {"density", opts.density},
                {"prime", opts.prime},
                {"precision", opts.precision},
                {"seed", opts.seed},
                {"workers", opts.workers},
                {"count", opts.count},
                {"support_radius", opts.support_radius ? json(*opts.support_radius) : json(nullptr)},
                {"bound", opts.bound ? json(*opts.bound) : json(nullptr)},
                {"out", opts.out}};
}

RunOptions options_from_json(const json& j) {
    try {
        RunOptions o;
        o.command = j.at("command").get<std::string>();
        o.variety = j.at("variety");
        o.density = j.at("density");
        o.prime = j.at("prime").get<std::uint32_t>();
        o.precision = j.at("precision").get<int>();
        o.seed = j.at("seed").get<std::uint64_t>();
        o.workers = j.at("workers").get<std::uint32_t>();
        o.count = j.at("count").get<std::uint64_t>();
        if (!j.at("support_radius").is_null()) o.support_radius = j.at("support_radius").get<std::uint32_t>();
        if (!j.at("bound").is_null()) o.bound = j.at("bound").get<double>();
        o.out = j.value("out", std::string{});
        return o;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed run options: ") + e.what());
    }
}

RunResult execute(const RunOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    if (opts.workers < 1 || opts.workers > 1024) throw InvalidArgument("workers must lie in [1, 1024]");
    const ContextPtr ctx = PadicContext::create(opts.prime, opts.precision, opts.seed);
    const Variety variety = variety_from_json(opts.variety);
    const RunConfig cfg{ctx, opts.workers, {}};
    RunResult result;

    if (opts.command == "sample") {
        const DensitySpec f = density_from_json(opts.density, opts.support_radius);
        const SampleBatch batch = variety.is_projective()
                                      ? sample_projective(variety, f, opts.count, cfg, opts.bound)
                                      : sample_affine(variety, f, opts.count, cfg, opts.bound);
        const SampleRunInfo info{variety.name(), opts.prime, opts.precision, opts.seed, opts.workers,
                                 f.support_radius()};
        result.output = format_samples(batch, info);
        result.resamples = batch.resamples;
    } else if (opts.command == "integrate" || opts.command == "volume") {
        const DensitySpec f = opts.command == "volume"
                                  ? DensitySpec::uniform(opts.support_radius.value_or(0))
                                  : density_from_json(opts.density, opts.support_radius);
        const IntegralEstimate est = variety.is_projective() ? integrate_projective(variety, f, opts.count, cfg)
                                                             : integrate_affine(variety, f, opts.count, cfg);
        const json out{{"command", opts.command},
                       {"variety", variety.name()},
                       {"prime", opts.prime},
                       {"precision", opts.precision},
                       {"seed", opts.seed},
                       {"workers", opts.workers},
                       {"samples", est.samples},
                       {"value", est.value},
                       {"std_error", est.std_error},
                       {"chebyshev_halfwidth", est.chebyshev_halfwidth},
                       {"chebyshev_delta", est.chebyshev_delta},
                       {"resamples", est.resamples},
                       {"max_fbar", est.max_fbar}};
        result.output = out.dump(2) + "\n";
        result.resamples = est.resamples;
    } else {
        throw InvalidArgument("unknown command '" + opts.command + "'");
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

namespace {

std::string hex64(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace

json make_manifest(const RunOptions& opts, const RunResult& result) {
    return json{{"command", opts.command},
                {"options", options_to_json(opts)},
                {"seed", opts.seed},
                {"prime", opts.prime},
                {"precision", opts.precision},
                {"workers", opts.workers},
                {"resamples", result.resamples},
                {"wall_time_seconds", result.wall_seconds},
                {"output", {{"path", opts.out}, {"bytes", result.output.size()}, {"fnv1a64", hex64(fnv1a64(result.output))}}}};
}

namespace {

struct CommonArgs {
    std::string variety_file;
    std::string example;
    std::string density = "uniform";
    std::string manifest;
    std::int64_t support_radius = -1;
    double bound = 0.0;
};

void add_run_options(CLI::App* sub, RunOptions& opts, CommonArgs& common, const char* count_flag,
                     const char* count_help, bool with_density) {
    sub->add_option("--variety", common.variety_file, "variety spec file (JSON)");
    sub->add_option("--example", common.example, "built-in variety instead of a file");
    sub->add_option("--prime", opts.prime, "prime p")->required();
    sub->add_option("--precision", opts.precision, "p-adic digits carried")->capture_default_str();
    sub->add_option(count_flag, opts.count, count_help)->required();
    sub->add_option("--seed", opts.seed, "64-bit seed")->capture_default_str();
    sub->add_option("--workers", opts.workers, "worker streams")->capture_default_str();
    sub->add_option("--support-radius", common.support_radius, "density supported in p^-R Z_p^N");
    sub->add_option("--out", opts.out, "output file (default: stdout)");
    sub->add_option("--manifest", common.manifest, "manifest path (default: OUT.manifest.json)");
    if (with_density) {
        sub->add_option("--density", common.density, "uniform, or a residue-class density file")
            ->capture_default_str();
        sub->add_option("--bound", common.bound, "override the rejection constant M");
    }
}

void finish_run_options(RunOptions& opts, const CommonArgs& common) {
    if (common.variety_file.empty() == common.example.empty()) {
        throw InvalidArgument("give exactly one of --variety or --example");
    }
    opts.variety = common.variety_file.empty() ? example_variety_json(common.example)
                                               : variety_to_json(load_variety(common.variety_file));
    if (common.density == "uniform") {
        opts.density = json{{"type", "uniform"}};
    } else {
        try {
            opts.density = json::parse(read_text_file(common.density));
        } catch (const json::exception& e) {
            throw InvalidArgument("cannot parse density file " + common.density + ": " + e.what());
        }
        density_from_json(opts.density);  // validate early
    }
    if (common.support_radius >= 0) opts.support_radius = static_cast<std::uint32_t>(common.support_radius);
    if (common.bound > 0.0) opts.bound = common.bound;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) out << text;
    else write_text_file(path, text);
}

void run_and_record(const RunOptions& opts, const std::string& manifest_path, std::ostream& out) {
    const RunResult result = execute(opts);
    emit(opts.out, result.output, out);
    std::string mpath = manifest_path;
    if (mpath.empty() && !opts.out.empty()) mpath = opts.out + ".manifest.json";
    if (!mpath.empty()) write_text_file(mpath, make_manifest(opts, result).dump(2) + "\n");
}

// "p^j" or the integer p^j itself.
int parse_modulus(const std::string& text, std::uint32_t p) {
    const auto caret = text.find('^');
    long base = 0;
    long exponent = 0;
    try {
        if (caret != std::string::npos) {
            base = std::stol(text.substr(0, caret));
            exponent = std::stol(text.substr(caret + 1));
        } else {
            mpz_class n(text);
            if (n < 1) throw InvalidArgument("modulus must be positive");
            base = p;
            while (n > 1) {
                if (n % p != 0) throw InvalidArgument("modulus " + text + " is not a power of " + std::to_string(p));
                n /= p;
                ++exponent;
            }
        }
    } catch (const std::invalid_argument&) {
        throw InvalidArgument("cannot parse modulus '" + text + "'");
    }
    if (base != static_cast<long>(p)) {
        throw InvalidArgument("modulus base " + std::to_string(base) + " differs from the sample prime " +
                              std::to_string(p));
    }
    if (exponent < 1) throw InvalidArgument("modulus exponent must be at least 1");
    return static_cast<int>(exponent);
}

int cmd_stats(const std::string& samples_path, const std::string& modulus, std::uint64_t classes, std::ostream& out) {
    const SampleFile file = read_samples(samples_path);
    const int j = parse_modulus(modulus, file.ctx->prime());
    if (j > file.ctx->precision()) {
        throw InvalidArgument("modulus exponent " + std::to_string(j) + " exceeds the sample precision " +
                              std::to_string(file.ctx->precision()));
    }
    if (static_cast<double>(j) * std::log2(static_cast<double>(file.ctx->prime())) >= 63.0) {
        throw InvalidArgument("modulus too large for residue tables");
    }
    const auto hist = residue_histogram(file.points, j);
    const std::uint64_t k = classes > 0 ? classes : hist.size();
    if (k < hist.size()) throw InvalidArgument("--classes is smaller than the number of observed classes");
    std::vector<std::uint64_t> observed;
    for (const auto& [r, c] : hist) observed.push_back(c);
    observed.resize(k, 0);
    const std::vector<double> probs(k, k > 0 ? 1.0 / static_cast<double>(k) : 0.0);
    const ChiSquare chi = chi_square_gof(observed, probs);

    out << "residue\tcount\n";
    for (const auto& [r, c] : hist) {
        out << "(";
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? ", " : "") << r[i];
        out << ")\t" << c << "\n";
    }
    out << "points\t" << file.points.size() << "\n";
    out << "classes\t" << k << " (" << hist.size() << " observed)\n";
    out << "chi_square\t" << chi.statistic << "\n";
    out << "dof\t" << chi.dof << "\n";
    out << "p_value\t" << chi.p_value << "\n";
    return 0;
}

int cmd_replay(const std::string& manifest_path, const std::string& new_out, std::ostream& out) {
    json manifest;
    try {
        manifest = json::parse(read_text_file(manifest_path));
    } catch (const json::exception& e) {
        throw InvalidArgument("cannot parse manifest: " + std::string(e.what()));
    }
    RunOptions opts = options_from_json(manifest.at("options"));
    opts.out = new_out;
    const RunResult result = execute(opts);
    if (!new_out.empty()) write_text_file(new_out, result.output);
    const std::string expected = manifest.at("output").at("fnv1a64").get<std::string>();
    const std::string actual = hex64(fnv1a64(result.output));
    if (new_out.empty()) out << result.output;
    if (expected == actual) {
        out << "replay identical: fnv1a64 " << actual << ", " << result.output.size() << " bytes\n";
        return 0;
    }
    out << "replay differs: expected fnv1a64 " << expected << ", got " << actual << "\n";
    return 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sampling and integration on p-adic varieties by random linear slices"};
    app.require_subcommand(1);

    RunOptions sample_opts;
    sample_opts.command = "sample";
    CommonArgs sample_common;
    auto* sample = app.add_subcommand("sample", "draw points with a prescribed density");
    add_run_options(sample, sample_opts, sample_common, "--count", "number of points", true);

    RunOptions int_opts;
    int_opts.command = "integrate";
    CommonArgs int_common;
    auto* integrate = app.add_subcommand("integrate", "Monte Carlo integral of a density");
    add_run_options(integrate, int_opts, int_common, "--samples", "number of slices", false);
    integrate->add_option("--density", int_common.density, "uniform, or a residue-class density file")
        ->capture_default_str();

    RunOptions vol_opts;
    vol_opts.command = "volume";
    CommonArgs vol_common;
    auto* volume = app.add_subcommand("volume", "volume of X ∩ p^-R Z_p^N (projective: of X)");
    add_run_options(volume, vol_opts, vol_common, "--samples", "number of slices", false);

    std::string stats_samples;
    std::string stats_modulus;
    std::uint64_t stats_classes = 0;
    auto* stats = app.add_subcommand("stats", "residue histogram and chi-square uniformity test");
    stats->add_option("--samples", stats_samples, "sample file written by `sample`")->required();
    stats->add_option("--modulus", stats_modulus, "p^j or its value")->required();
    stats->add_option("--classes", stats_classes, "number of classes expected (default: observed)");

    auto* examples = app.add_subcommand("examples", "built-in example varieties");
    examples->require_subcommand(1);
    examples->add_subcommand("list", "list example names");
    std::string emit_name;
    std::string emit_out;
    auto* emit_cmd = examples->add_subcommand("emit", "write an example spec");
    emit_cmd->add_option("name", emit_name, "example name")->required();
    emit_cmd->add_option("--out", emit_out, "output file (default: stdout)");

    std::string replay_manifest;
    std::string replay_out;
    auto* replay = app.add_subcommand("replay", "re-run a manifest and compare output digests");
    replay->add_option("--manifest", replay_manifest, "manifest file")->required();
    replay->add_option("--out", replay_out, "where to write the replayed output (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sample->parsed()) {
            finish_run_options(sample_opts, sample_common);
            run_and_record(sample_opts, sample_common.manifest, out);
        } else if (integrate->parsed()) {
            finish_run_options(int_opts, int_common);
            run_and_record(int_opts, int_common.manifest, out);
        } else if (volume->parsed()) {
            finish_run_options(vol_opts, vol_common);
            run_and_record(vol_opts, vol_common.manifest, out);
        } else if (stats->parsed()) {
            return cmd_stats(stats_samples, stats_modulus, stats_classes, out);
        } else if (examples->parsed()) {
            if (emit_cmd->parsed()) {
                const json spec = example_variety_json(emit_name);
                variety_from_json(spec);
                emit(emit_out, spec.dump(2) + "\n", out);
            } else {
                for (const auto& name : example_names()) out << name << "\n";
            }
        } else if (replay->parsed()) {
            return cmd_replay(replay_manifest, replay_out, out);
        }
    } catch (const BoundViolation& e) {
        err << "error: " << e.what() << " (the degree bound or f_max is too small)\n";
        return 3;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const SyntaxError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const UnknownVariable& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NotHomogeneous& e) {
        err << "error: projective variety needs homogeneous equations: " << e.what() << "\n";
        return 2;
    } catch (const NegativeValuationCoefficient& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace pslice
