#include "rkrfm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rkrfm/error.hpp"

namespace rkrfm {

void DomainBox::validate() const {
    const bool finite = std::isfinite(lower.x) && std::isfinite(lower.y) && std::isfinite(upper.x) &&
                        std::isfinite(upper.y);
    if (!finite || !(upper.x > lower.x) || !(upper.y > lower.y))
        throw ConfigError("degenerate domain box: upper corner must exceed lower corner");
}

Partition::Partition(DomainBox domain, int nx, int ny, PouKind pou)
    : domain_(domain), nx_(nx), ny_(ny), pou_(pou) {
    domain_.validate();
    if (nx < 1 || ny < 1) throw ConfigError("partition counts must be positive");
    xcuts_.resize(static_cast<std::size_t>(nx) + 1);
    ycuts_.resize(static_cast<std::size_t>(ny) + 1);
    for (int i = 0; i <= nx; ++i) xcuts_[i] = domain.lower.x + domain.width() * i / nx;
    for (int j = 0; j <= ny; ++j) ycuts_[j] = domain.lower.y + domain.height() * j / ny;
    xcuts_[nx] = domain.upper.x;
    ycuts_[ny] = domain.upper.y;
    subs_.reserve(static_cast<std::size_t>(nx) * ny);
    for (int ix = 0; ix < nx; ++ix) {
        for (int iy = 0; iy < ny; ++iy) {
            Subdomain s;
            s.ix = ix;
            s.iy = iy;
            s.lower = {xcuts_[ix], ycuts_[iy]};
            s.upper = {xcuts_[ix + 1], ycuts_[iy + 1]};
            s.center = {0.5 * (s.lower.x + s.upper.x), 0.5 * (s.lower.y + s.upper.y)};
            s.radius = {0.5 * (s.upper.x - s.lower.x), 0.5 * (s.upper.y - s.lower.y)};
            subs_.push_back(s);
        }
    }
}

std::optional<int> Partition::neighbor(int n, Side side) const {
    const Subdomain& s = subdomain(n);
    switch (side) {
        case Side::Left: return s.ix > 0 ? std::optional<int>(index(s.ix - 1, s.iy)) : std::nullopt;
        case Side::Right: return s.ix < nx_ - 1 ? std::optional<int>(index(s.ix + 1, s.iy)) : std::nullopt;
        case Side::Bottom: return s.iy > 0 ? std::optional<int>(index(s.ix, s.iy - 1)) : std::nullopt;
        case Side::Top: return s.iy < ny_ - 1 ? std::optional<int>(index(s.ix, s.iy + 1)) : std::nullopt;
    }
    return std::nullopt;
}

Vec2 normalize(Vec2 point, const Subdomain& sub) {
    if (!(sub.radius.x > 0.0) || !(sub.radius.y > 0.0)) throw ConfigError("subdomain has zero radius");
    return {(point.x - sub.center.x) / sub.radius.x, (point.y - sub.center.y) / sub.radius.y};
}

Vec2 Partition::normalize(Vec2 p, int n) const { return rkrfm::normalize(p, subdomain(n)); }

bool Partition::contains(Vec2 p) const {
    return p.x >= domain_.lower.x && p.x <= domain_.upper.x && p.y >= domain_.lower.y && p.y <= domain_.upper.y;
}

namespace {

int locate_1d(const std::vector<double>& cuts, double v) {
    const int n = static_cast<int>(cuts.size()) - 1;
    // upper_bound gives the first cut strictly greater than v: half-open cells.
    const auto it = std::upper_bound(cuts.begin(), cuts.end(), v);
    int i = static_cast<int>(it - cuts.begin()) - 1;
    return std::clamp(i, 0, n - 1);
}

}  // namespace

int Partition::locate(Vec2 p) const {
    if (!contains(p))
        throw ConfigError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") lies outside the domain");
    return index(locate_1d(xcuts_, p.x), locate_1d(ycuts_, p.y));
}

bool Partition::in_closed_subdomain(int n, Vec2 p, double rel_tol) const {
    const Subdomain& s = subdomain(n);
    const double tx = rel_tol * std::max(1.0, s.radius.x);
    const double ty = rel_tol * std::max(1.0, s.radius.y);
    return p.x >= s.lower.x - tx && p.x <= s.upper.x + tx && p.y >= s.lower.y - ty && p.y <= s.upper.y + ty;
}

double sin_blend_1d(double s, int k, bool open_low, bool open_high) {
    constexpr double kPi = std::numbers::pi;
    if (s < -0.75) {
        if (open_low) return k == 0 ? 1.0 : 0.0;
        if (s < -1.25) return 0.0;
        const double f = std::pow(2.0 * kPi, k) * std::sin(2.0 * kPi * s + k * kPi / 2.0) / 2.0;
        return k == 0 ? 0.5 + f : f;
    }
    if (s > 0.75) {
        if (open_high) return k == 0 ? 1.0 : 0.0;
        if (s > 1.25) return 0.0;
        const double f = -std::pow(2.0 * kPi, k) * std::sin(2.0 * kPi * s + k * kPi / 2.0) / 2.0;
        return k == 0 ? 0.5 + f : f;
    }
    return k == 0 ? 1.0 : 0.0;
}

double Partition::pou(int n, Vec2 p) const {
    if (pou_ == PouKind::Indicator) return locate(p) == n ? 1.0 : 0.0;
    return pou_derivative(n, p, 0, 0);
}

double Partition::pou_derivative(int n, Vec2 p, int ax, int ay) const {
    if (pou_ == PouKind::Indicator) {
        if (ax + ay > 0) return 0.0;
        return pou(n, p);
    }
    const Subdomain& s = subdomain(n);
    const Vec2 q = normalize(p, n);
    const double fx = sin_blend_1d(q.x, ax, on_domain_boundary(n, Side::Left), on_domain_boundary(n, Side::Right));
    const double fy = sin_blend_1d(q.y, ay, on_domain_boundary(n, Side::Bottom), on_domain_boundary(n, Side::Top));
    return fx * fy / (std::pow(s.radius.x, ax) * std::pow(s.radius.y, ay));
}

std::vector<int> Partition::supporting(Vec2 p) const {
    if (pou_ == PouKind::Indicator) return {locate(p)};
    std::vector<int> out;
    for (int n = 0; n < size(); ++n)
        if (pou_derivative(n, p, 0, 0) != 0.0) out.push_back(n);
    return out;
}

Partition build_partition(const DomainBox& domain, int nx, int ny, PouKind pou) {
    return Partition(domain, nx, ny, pou);
}

double pou_value(const Partition& partition, int n, Vec2 point) {
    if (n < 0 || n >= partition.size()) throw ConfigError("subdomain index out of range");
    return partition.pou(n, point);
}

void PointSet::push_back(Vec2 p, int own) {
    x.push_back(p.x);
    y.push_back(p.y);
    if (own >= 0) owner.push_back(own);
}

PointSet PointSet::with_owners(const Partition& partition) const {
    PointSet out = *this;
    out.owner.resize(size());
    for (std::size_t i = 0; i < size(); ++i) out.owner[i] = partition.locate(at(i));
    return out;
}

CollocationSet::CollocationSet(const Partition& partition, int qx, int qy)
    : qx_(qx), qy_(qy), nsub_(partition.size()) {
    if (qx < 2 || qy < 2) throw ConfigError("collocation grids need at least 2 points per direction");
    const std::size_t total = static_cast<std::size_t>(nsub_) * qx * qy;
    points_.x.reserve(total);
    points_.y.reserve(total);
    points_.owner.reserve(total);
    weights_.reserve(total);
    roles_.reserve(total);
    for (int n = 0; n < nsub_; ++n) {
        const Subdomain& s = partition.subdomain(n);
        const double hx = (s.upper.x - s.lower.x) / (qx - 1);
        const double hy = (s.upper.y - s.lower.y) / (qy - 1);
        std::uint8_t bmask = 0, imask = 0;
        for (Side side : {Side::Left, Side::Right, Side::Bottom, Side::Top}) {
            if (partition.on_domain_boundary(n, side))
                bmask |= side_bit(side);
            else
                imask |= side_bit(side);
        }
        for (int j = 0; j < qy; ++j) {
            const double y = j == qy - 1 ? s.upper.y : s.lower.y + hy * j;
            const double wy = (j == 0 || j == qy - 1) ? 0.5 * hy : hy;
            for (int i = 0; i < qx; ++i) {
                const double x = i == qx - 1 ? s.upper.x : s.lower.x + hx * i;
                const double wx = (i == 0 || i == qx - 1) ? 0.5 * hx : hx;
                points_.push_back({x, y}, n);
                weights_.push_back(wx * wy);
                std::uint8_t on = 0;
                if (i == 0) on |= side_bit(Side::Left);
                if (i == qx - 1) on |= side_bit(Side::Right);
                if (j == 0) on |= side_bit(Side::Bottom);
                if (j == qy - 1) on |= side_bit(Side::Top);
                roles_.push_back({static_cast<std::uint8_t>(on & bmask), static_cast<std::uint8_t>(on & imask)});
            }
        }
    }
    for (int n = 0; n < nsub_; ++n) {
        if (auto r = partition.neighbor(n, Side::Right)) interfaces_.push_back({n, *r, Axis::X});
    }
    for (int n = 0; n < nsub_; ++n) {
        if (auto t = partition.neighbor(n, Side::Top)) interfaces_.push_back({n, *t, Axis::Y});
    }
}

std::vector<std::size_t> CollocationSet::edge(int n, Side side) const {
    std::vector<std::size_t> out;
    switch (side) {
        case Side::Left:
            for (int j = 0; j < qy_; ++j) out.push_back(local_index(n, 0, j));
            break;
        case Side::Right:
            for (int j = 0; j < qy_; ++j) out.push_back(local_index(n, qx_ - 1, j));
            break;
        case Side::Bottom:
            for (int i = 0; i < qx_; ++i) out.push_back(local_index(n, i, 0));
            break;
        case Side::Top:
            for (int i = 0; i < qx_; ++i) out.push_back(local_index(n, i, qy_ - 1));
            break;
    }
    return out;
}

CollocationSet build_collocation(const Partition& partition, int qx, int qy) {
    return CollocationSet(partition, qx, qy);
}

TestGrid build_test_grid(const DomainBox& domain, int nx, int ny, GridKind kind) {
    domain.validate();
    if (nx < 2 || ny < 2) throw ConfigError("test grids need at least 2 points per direction");
    TestGrid g;
    g.nx = nx;
    g.ny = ny;
    g.kind = kind;
    g.domain = domain;
    const std::size_t total = static_cast<std::size_t>(nx) * ny;
    g.points.x.reserve(total);
    g.points.y.reserve(total);
    const double w = domain.area() / static_cast<double>(total);
    auto coord = [kind](double lo, double hi, int count, int i) {
        if (kind == GridKind::CellCentered) return lo + (hi - lo) * (i + 0.5) / count;
        return i == count - 1 ? hi : lo + (hi - lo) * i / (count - 1);
    };
    for (int j = 0; j < ny; ++j) {
        const double y = coord(domain.lower.y, domain.upper.y, ny, j);
        for (int i = 0; i < nx; ++i) g.points.push_back({coord(domain.lower.x, domain.upper.x, nx, i), y});
    }
    g.weights.assign(total, w);
    return g;
}

}  // namespace rkrfm
