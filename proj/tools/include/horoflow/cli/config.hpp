#pragma once

#include "horoflow/cexample.hpp"
#include "horoflow/flow.hpp"
#include "horoflow/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// TOML run configuration. Every table and key is checked against the schema
// before anything runs; unknown keys are errors.
namespace horoflow::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SurfaceConfig {
    std::string type = "sphere";  // sphere | legendre | ellipsoid | random | file
    double theta0 = 1.0;
    int mode = 2;
    double amplitude = 0.0;
    int max_mode = 6;  // random: highest Legendre degree
    int n_grid = 128;
    std::filesystem::path file;
};

struct FlowConfig {
    std::string fn = "shifted-mean";
    double p = 1.0;
    FlowOptions options;
};

struct OutputConfig {
    std::filesystem::path dir = ".";
    bool csv = true;
    bool json_summary = true;
};

/// Optional thresholds applied by `simulate --check`.
struct CheckConfig {
    std::optional<double> max_abs_sigma;
    std::optional<double> pinch_r2_min;
    std::optional<double> pinch_final_ratio_max;
    std::optional<std::pair<double, double>> osc_exponent_range;
};

struct SphericalConfig {
    double theta0 = 1.0;
    double p = 1.0;
    int n = 2;
    double horizon = 0.5;  // fraction of T*
    int samples = 50;
};

struct CounterexampleConfig {
    QuarticParams params;
    double p = 2.0;
    double radius = 0.02;
    int grid = 41;
};

struct CurvfunConfig {
    std::string fn = "shifted-mean";
    int n = 2;
    int samples = 1000;
};

struct SupportConfig {
    std::filesystem::path file;
    std::string fn = "shifted-mean";
    double p = 1.0;
    int n_grid = 256;
};

struct SweepConfig {
    std::vector<std::filesystem::path> configs;
    int threads = 0;  // 0: hardware concurrency
};

struct RunConfig {
    std::optional<std::uint64_t> seed;
    SurfaceConfig surface;
    FlowConfig flow;
    OutputConfig output;
    CheckConfig check;
    SphericalConfig spherical;
    CounterexampleConfig counterexample;
    CurvfunConfig curvfun;
    SupportConfig support;
    SweepConfig sweep;
};

/// Relative paths inside the document resolve against base_dir.
[[nodiscard]] RunConfig parse_config(std::string_view toml_text, const std::filesystem::path& base_dir = ".");
[[nodiscard]] RunConfig load_config(const std::filesystem::path& file);
/// Range checks shared by the parser and command-line overrides.
void validate_config(const RunConfig& c);

/// Initial radial graph described by the [surface] table. `random` needs a seed.
[[nodiscard]] AxisymProfile build_initial_surface(const SurfaceConfig& s, std::optional<std::uint64_t> seed);

}  // namespace horoflow::cli
