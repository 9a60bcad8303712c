#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rkrfm {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    constexpr bool operator==(const Vec2&) const = default;
};

/// Axis-aligned rectangle [lower, upper].
struct DomainBox {
    Vec2 lower;
    Vec2 upper;

    double width() const { return upper.x - lower.x; }
    double height() const { return upper.y - lower.y; }
    double area() const { return width() * height(); }
    /// Throws ConfigError unless upper > lower componentwise and all finite.
    void validate() const;
};

enum class PouKind { Indicator, SinBlend };

enum class Side : std::uint8_t { Left = 0, Right = 1, Bottom = 2, Top = 3 };

inline constexpr std::uint8_t side_bit(Side s) { return static_cast<std::uint8_t>(1u << static_cast<int>(s)); }

struct Subdomain {
    int ix = 0;
    int iy = 0;
    Vec2 lower;
    Vec2 upper;
    Vec2 center;
    Vec2 radius;
};

/// Uniform tensor tiling of a DomainBox into nx*ny subdomains.
///
/// Subdomains are numbered n = ix*ny + iy, so the right neighbour of n is
/// n + ny and the upper neighbour is n + 1. Ownership is half-open,
/// [left, right) x [bottom, top), except that subdomains on the global right
/// and top boundaries also own that closed edge.
class Partition {
public:
    Partition(DomainBox domain, int nx, int ny, PouKind pou);

    const DomainBox& domain() const { return domain_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int size() const { return nx_ * ny_; }
    PouKind pou_kind() const { return pou_; }

    int index(int ix, int iy) const { return ix * ny_ + iy; }
    const Subdomain& subdomain(int n) const { return subs_.at(static_cast<std::size_t>(n)); }
    std::optional<int> neighbor(int n, Side side) const;
    bool on_domain_boundary(int n, Side side) const { return !neighbor(n, side).has_value(); }

    /// Affine map of Omega_n onto [-1,1]^2.
    Vec2 normalize(Vec2 p, int n) const;

    /// Owning subdomain under the half-open rule. Throws ConfigError outside the closed domain.
    int locate(Vec2 p) const;
    bool contains(Vec2 p) const;
    /// Closed-box containment of subdomain n with a relative tolerance.
    bool in_closed_subdomain(int n, Vec2 p, double rel_tol = 1e-12) const;

    /// Partition-of-unity weight psi_n(p) for the configured kind.
    double pou(int n, Vec2 p) const;
    /// Mixed partial derivative of psi_n (SinBlend only; Indicator derivatives are zero).
    double pou_derivative(int n, Vec2 p, int ax, int ay) const;
    /// Subdomains whose PoU support contains p (one entry for Indicator).
    std::vector<int> supporting(Vec2 p) const;

private:
    DomainBox domain_;
    int nx_;
    int ny_;
    PouKind pou_;
    std::vector<double> xcuts_;
    std::vector<double> ycuts_;
    std::vector<Subdomain> subs_;
};

Partition build_partition(const DomainBox& domain, int nx, int ny, PouKind pou = PouKind::Indicator);
Vec2 normalize(Vec2 point, const Subdomain& sub);
double pou_value(const Partition& partition, int n, Vec2 point);

/// Smooth 1-D blend factor (1 +/- sin(2 pi s))/2 with the central plateau; the
/// k-th derivative with respect to the normalized coordinate s. A side flagged
/// `open` extends the plateau beyond |s| = 3/4 (used on the global boundary).
double sin_blend_1d(double s, int k, bool open_low, bool open_high);

/// Points with an optional owning subdomain per point.
struct PointSet {
    std::vector<double> x;
    std::vector<double> y;
    /// Subdomain whose features represent the field at this point; empty = locate on demand.
    std::vector<int> owner;

    std::size_t size() const { return x.size(); }
    Vec2 at(std::size_t i) const { return {x[i], y[i]}; }
    void push_back(Vec2 p, int own = -1);
    /// Copy with owners assigned by the half-open rule.
    PointSet with_owners(const Partition& partition) const;
};

struct PointRole {
    std::uint8_t boundary_sides = 0;   ///< subdomain edges lying on the global boundary
    std::uint8_t interface_sides = 0;  ///< subdomain edges shared with a neighbour

    bool interior() const { return boundary_sides == 0 && interface_sides == 0; }
    bool on_boundary() const { return boundary_sides != 0; }
    bool on_interface() const { return interface_sides != 0; }
};

enum class Axis { X, Y };

/// A shared edge between `lower` and its right (Axis::X) or upper (Axis::Y) neighbour.
struct InterfacePair {
    int lower = 0;
    int upper = 0;
    Axis axis = Axis::X;
};

/// Per-subdomain Qx*Qy tensor grids, subdomain-major; inside a subdomain the
/// ordering is y-outer, x-inner, matching the row order of the interior blocks.
class CollocationSet {
public:
    CollocationSet(const Partition& partition, int qx, int qy);

    int qx() const { return qx_; }
    int qy() const { return qy_; }
    int per_subdomain() const { return qx_ * qy_; }
    int subdomains() const { return nsub_; }
    std::size_t size() const { return points_.size(); }

    const PointSet& points() const { return points_; }
    std::span<const double> weights() const { return weights_; }
    const PointRole& role(std::size_t i) const { return roles_[i]; }

    std::size_t offset(int n) const { return static_cast<std::size_t>(n) * per_subdomain(); }
    std::size_t local_index(int n, int i, int j) const { return offset(n) + static_cast<std::size_t>(j) * qx_ + i; }
    /// Global indices of the points on one edge of subdomain n, ordered by increasing
    /// coordinate along the edge (Qy points for Left/Right, Qx for Bottom/Top).
    std::vector<std::size_t> edge(int n, Side side) const;

    /// Shared edges, each listed once and owned by the lower-index subdomain.
    const std::vector<InterfacePair>& interfaces() const { return interfaces_; }

private:
    int qx_;
    int qy_;
    int nsub_;
    PointSet points_;
    std::vector<double> weights_;
    std::vector<PointRole> roles_;
    std::vector<InterfacePair> interfaces_;
};

CollocationSet build_collocation(const Partition& partition, int qx, int qy);

enum class GridKind {
    Vertex,        ///< nx*ny points including the domain edges
    CellCentered,  ///< midpoints of an nx*ny cell tiling (spectral for periodic integrands)
};

/// Uniform grid over the whole domain, row-major (y-outer, x-inner), with
/// equal quadrature weights area/(nx*ny).
struct TestGrid {
    int nx = 0;
    int ny = 0;
    GridKind kind = GridKind::Vertex;
    DomainBox domain;
    PointSet points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
};

TestGrid build_test_grid(const DomainBox& domain, int nx, int ny, GridKind kind = GridKind::Vertex);

}  // namespace rkrfm
