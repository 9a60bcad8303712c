#include "rkrfm/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "rkrfm/error.hpp"
#include "rkrfm/integrator.hpp"
#include "rkrfm/verify.hpp"

namespace rkrfm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("not a number: '" + s + "'");
    return v;
}

template <class Int>
Int to_int(const std::string& s) {
    Int v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("not an integer: '" + s + "'");
    return v;
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw ConfigError("not a boolean: '" + s + "'");
}

struct Field {
    const char* section;
    const char* key;
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
};

Field dbl(const char* s, const char* k, double& v) {
    return {s, k, [&v](const std::string& x) { v = to_double(x); }, [&v] { return fmt_double(v); }};
}

Field integer(const char* s, const char* k, int& v) {
    return {s, k, [&v](const std::string& x) { v = to_int<int>(x); }, [&v] { return std::to_string(v); }};
}

Field boolean(const char* s, const char* k, bool& v) {
    return {s, k, [&v](const std::string& x) { v = to_bool(x); }, [&v] { return std::string(v ? "true" : "false"); }};
}

std::string centers_text(const std::vector<Vec2>& c) {
    std::string out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) out += ", ";
        out += fmt_double(c[i].x) + " " + fmt_double(c[i].y);
    }
    return out;
}

std::vector<Vec2> parse_centers(const std::string& s) {
    std::vector<Vec2> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::istringstream is(trim(item));
        std::string a, b, extra;
        if (!(is >> a >> b) || (is >> extra)) throw ConfigError("centers must be 'x y' pairs separated by commas");
        out.push_back({to_double(a), to_double(b)});
    }
    return out;
}

std::vector<Field> fields(RunConfig& c) {
    return {
        dbl("domain", "x0", c.domain.lower.x),
        dbl("domain", "y0", c.domain.lower.y),
        dbl("domain", "x1", c.domain.upper.x),
        dbl("domain", "y1", c.domain.upper.y),
        integer("partition", "nx", c.nx),
        integer("partition", "ny", c.ny),
        {"partition", "pou",
         [&c](const std::string& x) {
             if (x == "indicator") c.pou = PouKind::Indicator;
             else if (x == "sinblend") c.pou = PouKind::SinBlend;
             else throw ConfigError("pou must be indicator or sinblend");
         },
         [&c] { return std::string(c.pou == PouKind::Indicator ? "indicator" : "sinblend"); }},
        integer("basis", "features", c.features),
        dbl("basis", "bound", c.bound),
        {"basis", "activation", [&c](const std::string& x) { c.activation = parse_activation(x); },
         [&c] { return std::string(activation_name(c.activation)); }},
        {"basis", "seed", [&c](const std::string& x) { c.seed = to_int<std::uint64_t>(x); },
         [&c] { return std::to_string(c.seed); }},
        boolean("basis", "regenerate", c.regenerate),
        boolean("basis", "per_component", c.per_component),
        integer("collocation", "qx", c.qx),
        integer("collocation", "qy", c.qy),
        integer("collocation", "test_x", c.test_x),
        integer("collocation", "test_y", c.test_y),
        integer("collocation", "quad_x", c.quad_x),
        integer("collocation", "quad_y", c.quad_y),
        dbl("time", "T", c.final_time),
        dbl("time", "dt", c.dt),
        {"time", "tableau", [&c](const std::string& x) { c.tableau = x; }, [&c] { return c.tableau; }},
        {"model", "kind",
         [&c](const std::string& x) {
             if (x == "manufactured") c.model = ModelKind::Manufactured;
             else if (x == "cells") c.model = ModelKind::Cells;
             else throw ConfigError("model kind must be manufactured or cells");
         },
         [&c] { return std::string(c.model == ModelKind::Manufactured ? "manufactured" : "cells"); }},
        {"model", "boundary",
         [&c](const std::string& x) {
             if (x == "periodic") c.periodic = true;
             else if (x == "dirichlet") c.periodic = false;
             else throw ConfigError("boundary must be periodic or dirichlet");
         },
         [&c] { return std::string(c.periodic ? "periodic" : "dirichlet"); }},
        integer("cells", "count", c.cells.cells),
        dbl("cells", "gamma", c.cells.gamma),
        dbl("cells", "width", c.cells.width),
        dbl("cells", "mu", c.cells.mu),
        dbl("cells", "kappa", c.cells.kappa),
        dbl("cells", "radius", c.cells.radius),
        dbl("cells", "xi", c.cells.xi),
        dbl("cells", "zeta", c.cells.zeta),
        dbl("cells", "initial_radius", c.initial_radius),
        dbl("cells", "min_separation", c.min_separation),
        {"cells", "centers", [&c](const std::string& x) { c.centers = parse_centers(x); },
         [&c] { return centers_text(c.centers); }},
        dbl("solver", "rescale", c.rescale),
        dbl("solver", "rtol", c.rtol),
        {"solver", "backend",
         [&c](const std::string& x) {
             if (x == "structured") c.backend = SolverBackend::Structured;
             else if (x == "dense") c.backend = SolverBackend::Dense;
             else throw ConfigError("backend must be structured or dense");
         },
         [&c] { return std::string(c.backend == SolverBackend::Structured ? "structured" : "dense"); }},
        {"output", "dir", [&c](const std::string& x) { c.out_dir = x; }, [&c] { return c.out_dir; }},
        integer("output", "stride", c.stride),
        boolean("output", "csv", c.csv),
    };
}

}  // namespace

void RunConfig::validate() const {
    domain.validate();
    if (nx < 1 || ny < 1) throw ConfigError("partition counts must be >= 1");
    if (features < 1) throw ConfigError("features must be >= 1");
    if (!(bound > 0.0)) throw ConfigError("bound must be positive");
    if (qx < 2 || qy < 2) throw ConfigError("collocation counts must be >= 2");
    if (test_x < 2 || test_y < 2 || quad_x < 2 || quad_y < 2) throw ConfigError("grid counts must be >= 2");
    if (!(final_time >= 0.0)) throw ConfigError("T must be non-negative");
    if (final_time > 0.0) TimeGrid::from_step(final_time, dt);
    tableau_by_name(tableau);
    if (!(rescale > 0.0)) throw ConfigError("rescale constant must be positive");
    if (!(rtol >= 0.0)) throw ConfigError("rtol must be non-negative");
    if (stride < 0) throw ConfigError("stride must be non-negative");
    if (model == ModelKind::Cells) {
        cells.validate();
        if (!centers.empty() && static_cast<int>(centers.size()) != cells.cells)
            throw ConfigError("number of centers differs from the cell count");
        if (!(initial_radius > 0.0)) throw ConfigError("initial radius must be positive");
    }
}

int RunConfig::steps() const {
    return final_time == 0.0 ? 0 : TimeGrid::from_step(final_time, dt).K;
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    auto table = fields(c);
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            bool known = false;
            for (const Field& f : table) known = known || section == f.section;
            if (!known) throw ConfigError(where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError(where + "key outside of a section");
        bool found = false;
        for (Field& f : table) {
            if (section == f.section && key == f.key) {
                try {
                    f.set(value);
                } catch (const ConfigError& e) {
                    throw ConfigError(where + section + "." + key + ": " + e.what());
                }
                found = true;
                break;
            }
        }
        if (!found) throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& config) {
    RunConfig c = config;
    std::string out, section;
    for (const Field& f : fields(c)) {
        if (section != f.section) {
            if (!section.empty()) out += "\n";
            section = f.section;
            out += "[" + section + "]\n";
        }
        out += std::string(f.key) + " = " + f.get() + "\n";
    }
    return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return serialize_config(a) == serialize_config(b); }

RunConfig manufactured_config() {
    RunConfig c;
    const double tau = 2.0 * std::numbers::pi;
    c.domain = {{0.0, 0.0}, {tau, tau}};
    c.nx = c.ny = 3;
    c.features = 200;
    c.bound = 1.7;
    c.qx = c.qy = 20;
    c.test_x = c.test_y = 40;
    c.quad_x = c.quad_y = 40;
    c.final_time = 1.0;
    c.dt = 5e-3;
    c.model = ModelKind::Manufactured;
    c.periodic = false;
    c.cells = manufactured_params();
    return c;
}

RunConfig desk_cells_config() {
    RunConfig c;
    c.domain = {{0.0, 0.0}, {50.0, 50.0}};
    c.nx = c.ny = 2;
    c.features = 300;
    c.bound = 5.0;
    c.qx = c.qy = 30;
    c.test_x = c.test_y = 100;
    c.quad_x = c.quad_y = 100;
    c.final_time = 100.0;
    c.dt = 0.1;
    c.model = ModelKind::Cells;
    c.periodic = true;
    c.cells.cells = 8;
    c.initial_radius = 6.0;
    c.stride = 100;
    return c;
}

}  // namespace rkrfm
