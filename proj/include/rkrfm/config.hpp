#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rkrfm/assembly.hpp"
#include "rkrfm/basis.hpp"
#include "rkrfm/cellmodel.hpp"
#include "rkrfm/geometry.hpp"

namespace rkrfm {

enum class ModelKind { Manufactured, Cells };

/// Every knob of a run. Text form: `[section]` headers and `key = value` lines,
/// `#` comments; unknown sections or keys are errors.
struct RunConfig {
    DomainBox domain{{0.0, 0.0}, {1.0, 1.0}};

    int nx = 1;
    int ny = 1;
    PouKind pou = PouKind::Indicator;

    int features = 200;
    double bound = 1.7;
    Activation activation = Activation::Tanh;
    std::uint64_t seed = 0;
    bool regenerate = true;
    bool per_component = false;

    int qx = 20;
    int qy = 20;
    int test_x = 40;
    int test_y = 40;
    int quad_x = 40;
    int quad_y = 40;

    double final_time = 1.0;
    double dt = 0.1;
    std::string tableau = "heun";

    ModelKind model = ModelKind::Manufactured;
    bool periodic = false;

    CellParams cells;
    double initial_radius = 6.0;
    double min_separation = 0.0;
    std::vector<Vec2> centers;  ///< explicit centers; random when empty

    double rescale = kDefaultRescale;
    double rtol = kDefaultRankTolerance;
    SolverBackend backend = SolverBackend::Structured;

    std::string out_dir;
    int stride = 0;  ///< snapshot every `stride` steps (0: first and last only)
    bool csv = false;

    void validate() const;
    int steps() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);
bool operator==(const RunConfig& a, const RunConfig& b);

/// Manufactured problem with the tanh convergence settings.
RunConfig manufactured_config();
/// Eight cells on (0, 50)^2 with periodic boundaries.
RunConfig desk_cells_config();

}  // namespace rkrfm
