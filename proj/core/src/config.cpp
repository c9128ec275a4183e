#include "wgstab/harness.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wgstab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct KeyContext {
    std::string section;
    std::string key;
    int line = 0;

    [[noreturn]] void fail(const std::string& why) const {
        std::ostringstream os;
        os << "config line " << line << ": " << section << "." << key << ": " << why;
        throw ConfigError(os.str());
    }
};

double parse_double(const KeyContext& kc, const std::string& v) {
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') kc.fail("expected a number, got '" + v + "'");
    return out;
}

long long parse_int(const KeyContext& kc, const std::string& v) {
    char* end = nullptr;
    const long long out = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') kc.fail("expected an integer, got '" + v + "'");
    return out;
}

std::uint64_t parse_u64(const KeyContext& kc, const std::string& v) {
    char* end = nullptr;
    const unsigned long long out = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0' || v.find('-') != std::string::npos)
        kc.fail("expected an unsigned integer, got '" + v + "'");
    return out;
}

bool parse_bool(const KeyContext& kc, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    kc.fail("expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string tok;
    for (const char c : v) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) out.push_back(tok);
            tok.clear();
        } else {
            tok.push_back(c);
        }
    }
    if (!tok.empty()) out.push_back(tok);
    return out;
}

std::vector<double> parse_double_list(const KeyContext& kc, const std::string& v) {
    std::vector<double> out;
    for (const std::string& tok : split_list(v)) out.push_back(parse_double(kc, tok));
    if (out.empty()) kc.fail("expected at least one number");
    return out;
}

std::set<Side> parse_sides(const KeyContext& kc, const std::string& v) {
    std::set<Side> out;
    for (const std::string& tok : split_list(v)) {
        if (tok == "left")
            out.insert(Side::left);
        else if (tok == "right")
            out.insert(Side::right);
        else if (tok == "none")
            ;  // explicit empty set
        else
            kc.fail("expected left, right, or none, got '" + tok + "'");
    }
    return out;
}

InteriorKind parse_interior(const KeyContext& kc, const std::string& v) {
    if (v == "background") return InteriorKind::background;
    if (v == "bump") return InteriorKind::bump;
    kc.fail("expected background or bump, got '" + v + "'");
}

std::string sides_text(const std::set<Side>& gs) {
    if (gs.empty()) return "none";
    std::string out;
    for (const Side s : gs) {
        if (!out.empty()) out += ' ';
        out += s == Side::left ? "left" : "right";
    }
    return out;
}

std::string list_text(const std::vector<double>& vals) {
    std::string out;
    for (const double v : vals) {
        if (!out.empty()) out += ' ';
        out += g17(v);
    }
    return out;
}

void assign(RunConfig& cfg, const KeyContext& kc, const std::string& value) {
    const std::string& s = kc.section;
    const std::string& k = kc.key;
    if (s == "geometry") {
        if (k == "omega_min") cfg.grid.omega_min = parse_double(kc, value);
        else if (k == "omega_max") cfg.grid.omega_max = parse_double(kc, value);
        else if (k == "n_cross") cfg.grid.n_cross = int(parse_int(kc, value));
        else if (k == "half_length") cfg.grid.half_length = parse_double(kc, value);
        else if (k == "n_axial") cfg.grid.n_axial = int(parse_int(kc, value));
        else if (k == "horizon") cfg.grid.time_horizon = parse_double(kc, value);
        else if (k == "n_time") cfg.grid.n_time = int(parse_int(kc, value));
        else if (k == "truncation_tol") cfg.grid.truncation_tol = parse_double(kc, value);
        else if (k == "observed") cfg.grid.gamma_star = parse_sides(kc, value);
        else kc.fail("unknown key");
    } else if (s == "admissible") {
        if (k == "epsilon") cfg.factory.epsilon = parse_double(kc, value);
        else if (k == "c") cfg.factory.c = parse_double(kc, value);
        else if (k == "collar_width") cfg.factory.collar_width = parse_double(kc, value);
        else if (k == "transition_width") cfg.factory.transition_width = parse_double(kc, value);
        else if (k == "interior") cfg.factory.interior = parse_interior(kc, value);
        else if (k == "bump_height") cfg.factory.bump_height = parse_double(kc, value);
        else if (k == "bump_width") cfg.factory.bump_width = parse_double(kc, value);
        else if (k == "bump_potential") cfg.factory.bump_potential = parse_double(kc, value);
        else kc.fail("unknown key");
    } else if (s == "perturbation") {
        if (k == "a") cfg.perturbation.a = parse_double(kc, value);
        else if (k == "b") cfg.perturbation.b = parse_double(kc, value);
        else if (k == "d_eps") cfg.perturbation.d_eps = parse_double(kc, value);
        else if (k == "eps") cfg.perturbation.epsilon = parse_double(kc, value);
        else if (k == "amplitudes") cfg.amplitudes = parse_double_list(kc, value);
        else kc.fail("unknown key");
    } else if (s == "carleman") {
        if (k == "x0") cfg.carleman_x0 = parse_double(kc, value);
        else if (k == "r") cfg.carleman_r = parse_double(kc, value);
        else if (k == "lambda") cfg.carleman_lambda = parse_double(kc, value);
        else if (k == "s") cfg.s_values = parse_double_list(kc, value);
        else if (k == "samples") cfg.ratio_samples = int(parse_int(kc, value));
        else if (k == "slices") cfg.study_slices = int(parse_int(kc, value));
        else kc.fail("unknown key");
    } else if (s == "inverse") {
        if (k == "delta") cfg.delta = parse_double(kc, value);
        else if (k == "two_sided") cfg.two_sided = parse_bool(kc, value);
        else if (k == "recipe_constant") cfg.recipe_constant = parse_double(kc, value);
        else if (k == "keep_every") cfg.keep_every = int(parse_int(kc, value));
        else kc.fail("unknown key");
    } else if (s == "output") {
        if (k == "directory") cfg.out_dir = value;
        else kc.fail("unknown key");
    } else if (s == "run") {
        if (k == "seed") cfg.seed = parse_u64(kc, value);
        else if (k == "threads") cfg.threads = int(parse_int(kc, value));
        else kc.fail("unknown key");
    } else {
        kc.fail("unknown section");
    }
}

}  // namespace

RunConfig::RunConfig()
    : amplitudes{1e-4, 2e-4, 1e-3, 3.16e-3, 1e-2, 3.16e-2, 1e-1},
      s_values{2, 3, 4, 6, 8, 11, 14, 17, 20} {
    grid.gamma_star = {Side::right};
}

RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t cut = line.find_first_of("#;");
        if (cut != std::string::npos) line.erase(cut);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unterminated section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value, got '" + line + "'");
        KeyContext kc{section, trim(line.substr(0, eq)), line_no};
        if (section.empty())
            kc.fail("key appears before any [section] header");
        if (kc.key.empty()) kc.fail("empty key");
        assign(cfg, kc, trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read '" + path + "'");
    return parse_config(in);
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "[geometry]\n"
       << "omega_min = " << g17(cfg.grid.omega_min) << '\n'
       << "omega_max = " << g17(cfg.grid.omega_max) << '\n'
       << "n_cross = " << cfg.grid.n_cross << '\n'
       << "half_length = " << g17(cfg.grid.half_length) << '\n'
       << "n_axial = " << cfg.grid.n_axial << '\n'
       << "horizon = " << g17(cfg.grid.time_horizon) << '\n'
       << "n_time = " << cfg.grid.n_time << '\n'
       << "truncation_tol = " << g17(cfg.grid.truncation_tol) << '\n'
       << "observed = " << sides_text(cfg.grid.gamma_star) << '\n'
       << "[admissible]\n"
       << "epsilon = " << g17(cfg.factory.epsilon) << '\n'
       << "c = " << g17(cfg.factory.c) << '\n'
       << "collar_width = " << g17(cfg.factory.collar_width) << '\n'
       << "transition_width = " << g17(cfg.factory.transition_width) << '\n'
       << "interior = "
       << (cfg.factory.interior == InteriorKind::background ? "background" : "bump") << '\n'
       << "bump_height = " << g17(cfg.factory.bump_height) << '\n'
       << "bump_width = " << g17(cfg.factory.bump_width) << '\n'
       << "bump_potential = " << g17(cfg.factory.bump_potential) << '\n'
       << "[perturbation]\n"
       << "a = " << g17(cfg.perturbation.a) << '\n'
       << "b = " << g17(cfg.perturbation.b) << '\n'
       << "d_eps = " << g17(cfg.perturbation.d_eps) << '\n'
       << "eps = " << g17(cfg.perturbation.epsilon) << '\n'
       << "amplitudes = " << list_text(cfg.amplitudes) << '\n'
       << "[carleman]\n"
       << "x0 = " << g17(cfg.carleman_x0) << '\n'
       << "r = " << g17(cfg.carleman_r) << '\n'
       << "lambda = " << g17(cfg.carleman_lambda) << '\n'
       << "s = " << list_text(cfg.s_values) << '\n'
       << "samples = " << cfg.ratio_samples << '\n'
       << "slices = " << cfg.study_slices << '\n'
       << "[inverse]\n"
       << "delta = " << g17(cfg.delta) << '\n'
       << "two_sided = " << (cfg.two_sided ? "true" : "false") << '\n'
       << "recipe_constant = " << g17(cfg.recipe_constant) << '\n'
       << "keep_every = " << cfg.keep_every << '\n'
       << "[output]\n"
       << "directory = " << cfg.out_dir << '\n'
       << "[run]\n"
       << "seed = " << cfg.seed << '\n'
       << "threads = " << cfg.threads << '\n';
    return os.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
    const std::string text = serialize_config(cfg);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace wgstab
