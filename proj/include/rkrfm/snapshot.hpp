#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "rkrfm/cellmodel.hpp"
#include "rkrfm/geometry.hpp"

namespace rkrfm {

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Field values on a tensor grid at one time, with cell integrals when present.
///
/// File layout (little-endian): 32-byte header
///   char magic[4] = "RKRF", u32 version, u32 rows (ny), u32 cols (nx),
///   u32 components, u32 flags, f64 time
/// then components * rows * cols doubles (component-major, y-outer), and if
/// flags & 1 a trailer of 7 doubles per cell (A, S11, S12, Fx, Fy, vx, vy)
/// followed by the 6 observables.
struct Snapshot {
    double time = 0.0;
    int rows = 0;
    int cols = 0;
    Eigen::MatrixXd values;  ///< (rows * cols) x components
    std::optional<CellGlobals> globals;
    std::optional<Observables> observables;

    int components() const { return static_cast<int>(values.cols()); }
};

void write_snapshot(const std::string& path, const Snapshot& s);
Snapshot read_snapshot(const std::string& path);
/// x, y, phi_0, ... per grid point.
void write_snapshot_csv(const std::string& path, const Snapshot& s, const TestGrid& grid);

}  // namespace rkrfm
