#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "rkrfm/cellmodel.hpp"
#include "rkrfm/config.hpp"
#include "rkrfm/integrator.hpp"
#include "rkrfm/snapshot.hpp"
#include "rkrfm/verify.hpp"

namespace rkrfm {

/// Objects built from a config.
struct Setup {
    Partition partition;
    CollocationSet collocation;
    TestGrid test;
    TestGrid quad_grid;
    Quadrature quadrature;
    TimeGrid time;
    RKTableau tableau;
    BasisConfig basis;
    AdvanceOptions advance;
};

Setup make_setup(const RunConfig& config);

/// Seed of repetition `rep` derived from the config seed.
std::uint64_t repetition_seed(std::uint64_t seed, int rep);

/// Cell centers: the explicit list, or random ones from the config seed.
std::vector<Vec2> initial_centers(const RunConfig& config);

/// Static fit of the initial condition; `report` gets its error on the test grid.
FittedField run_fit(const RunConfig& config, ErrorReport* report = nullptr, const std::string& dump_dir = {});

/// Manufactured run to T; errors against the exact solution on the test grid.
ErrorReport run_manufactured(const RunConfig& config);

/// Sweep one knob: dt, features, partition (n x n), collocation (q x q), bound or seed.
ConvergenceTable run_converge(const RunConfig& config, const std::string& knob, const std::vector<double>& values,
                              int workers = 1);
/// Applies a knob value to a config copy; throws ConfigError for unknown knobs.
RunConfig with_knob(RunConfig config, const std::string& knob, double value);

struct CellRunResult {
    int steps = 0;
    double seconds = 0.0;
    double min_value = 0.0;  ///< over all snapshots
    double max_value = 0.0;
    std::vector<double> snapshot_times;
    std::vector<double> snapshot_min;
    std::vector<double> snapshot_max;
    std::vector<Observables> series;  ///< observables at each snapshot
    CellGlobals final_globals;
    Observables final_observables;
};

/// Cell simulation; writes snapshot_NNNNNN.bin (and .csv) into out_dir when it is non-empty.
CellRunResult run_cells(const RunConfig& config, const std::string& out_dir = {},
                        const std::function<void(const StepInfo&)>& progress = {});

struct Stat {
    double mean = 0.0;
    double std = 0.0;
};

struct SweepCell {
    double gamma = 0.0;
    double zeta = 0.0;
    int runs = 0;
    int failures = 0;
    std::string message;
    Stat v_rms, s_rms, s_rms_excess, mean_speed, mean_component_speed, mean_component_order, mean_angle;
    std::vector<double> v_rms_samples;
};

/// Every (gamma, zeta) pair with `repetitions` seeds; S_rms excess is measured
/// against the zeta = 0 run of the same gamma and seed when zeta = 0 is in the list.
std::vector<SweepCell> run_observable_sweep(const RunConfig& config, const std::vector<double>& zetas,
                                            const std::vector<double>& gammas, int repetitions, int workers = 1);
void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells);

}  // namespace rkrfm
