#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "wgstab/admissible.hpp"
#include "wgstab/grid.hpp"

namespace wgstab {

inline constexpr const char* kVersion = "0.1.0";

/// Malformed or out-of-contract configuration input; the message names the
/// offending section.key and the input line where possible.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// One experiment configuration: flat key = value text grouped in named
/// sections, one section per module.  Unset keys keep the defaults below.
///
///   [geometry]      omega_min omega_max n_cross half_length n_axial
///                   horizon n_time truncation_tol observed
///   [admissible]    epsilon c collar_width transition_width interior
///                   bump_height bump_width bump_potential
///   [perturbation]  a b d_eps eps amplitudes
///   [carleman]      x0 r lambda s samples slices
///   [inverse]       delta two_sided recipe_constant keep_every
///   [output]        directory
///   [run]           seed threads
struct RunConfig {
    RunConfig();

    CylinderGrid::Spec grid;
    FactoryParams factory;
    PerturbationParams perturbation;
    std::vector<double> amplitudes;

    double carleman_x0 = -1.0;
    double carleman_r = 2.0;
    double carleman_lambda = 0.1;
    std::vector<double> s_values;
    int ratio_samples = 20;
    int study_slices = 48;

    double delta = 0.5;
    bool two_sided = false;
    double recipe_constant = 1.0;
    int keep_every = 1;

    std::string out_dir = "wgstab-out";
    std::uint64_t seed = 1;
    int threads = 1;
};

/// Parses configuration text.  Unknown sections or keys, repeated garbage
/// after a value, and untypeable values raise ConfigError.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Canonical serialization: fixed section and key order, full precision.
/// parse_config(serialize_config(cfg)) reproduces cfg exactly.
std::string serialize_config(const RunConfig& cfg);

/// FNV-1a over the canonical serialization, so comments and formatting of
/// the input file never disturb the recorded run identity.
std::uint64_t config_hash(const RunConfig& cfg);

struct RunResult {
    int status = 0;  ///< 0 ok, 2 rejected configuration, 3 numeric failure
    std::string failure;                 ///< failing stage, empty on success
    std::vector<std::string> artifacts;  ///< files written under out_dir
};

/// direct, elliptic, carleman, lemma-inv, stability, factory.
const std::vector<std::string>& subcommands();

/// Runs one subcommand, writing its CSV tables and a run manifest under
/// cfg.out_dir.  Never throws: failures land in the status, and the manifest
/// records the failing stage whenever the output directory is reachable.
RunResult run_subcommand(const std::string& name, const RunConfig& cfg);

}  // namespace wgstab
