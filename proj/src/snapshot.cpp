#include "rkrfm/snapshot.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include "rkrfm/error.hpp"

namespace rkrfm {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 4> kMagic{'R', 'K', 'R', 'F'};
constexpr std::uint32_t kFlagGlobals = 1;

template <class T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in, const std::string& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ConfigError("truncated snapshot " + path);
    return v;
}

}  // namespace

void write_snapshot(const std::string& path, const Snapshot& s) {
    if (s.values.rows() != static_cast<Eigen::Index>(s.rows) * s.cols)
        throw ConfigError("snapshot values do not match the grid shape");
    if (s.globals.has_value() != s.observables.has_value())
        throw ConfigError("snapshot globals and observables go together");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out.write(kMagic.data(), 4);
    put(out, kSnapshotVersion);
    put(out, static_cast<std::uint32_t>(s.rows));
    put(out, static_cast<std::uint32_t>(s.cols));
    put(out, static_cast<std::uint32_t>(s.values.cols()));
    put(out, s.globals ? kFlagGlobals : std::uint32_t{0});
    put(out, s.time);
    out.write(reinterpret_cast<const char*>(s.values.data()),
              static_cast<std::streamsize>(s.values.size() * sizeof(double)));
    if (s.globals) {
        const CellGlobals& g = *s.globals;
        if (g.cells() != s.components()) throw ConfigError("snapshot globals do not match the components");
        for (int i = 0; i < g.cells(); ++i)
            for (double v : {g.area[i], g.s11[i], g.s12[i], g.force[i].x(), g.force[i].y(), g.velocity[i].x(),
                             g.velocity[i].y()})
                put(out, v);
        const Observables& o = *s.observables;
        for (double v : {o.v_rms, o.s_rms, o.mean_speed, o.mean_component_speed, o.mean_component_order,
                         o.mean_angle})
            put(out, v);
    }
    if (!out) throw ConfigError("failed writing " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), 4) || magic != kMagic) throw ConfigError(path + " is not a snapshot file");
    const auto version = get<std::uint32_t>(in, path);
    if (version != kSnapshotVersion) throw ConfigError("unsupported snapshot version " + std::to_string(version));
    Snapshot s;
    s.rows = static_cast<int>(get<std::uint32_t>(in, path));
    s.cols = static_cast<int>(get<std::uint32_t>(in, path));
    const auto comps = get<std::uint32_t>(in, path);
    const auto flags = get<std::uint32_t>(in, path);
    s.time = get<double>(in, path);
    s.values.resize(static_cast<Eigen::Index>(s.rows) * s.cols, comps);
    if (!in.read(reinterpret_cast<char*>(s.values.data()),
                 static_cast<std::streamsize>(s.values.size() * sizeof(double))))
        throw ConfigError("truncated snapshot " + path);
    if (flags & kFlagGlobals) {
        CellGlobals g = CellGlobals::zero(static_cast<int>(comps));
        for (std::uint32_t i = 0; i < comps; ++i) {
            g.area[i] = get<double>(in, path);
            g.s11[i] = get<double>(in, path);
            g.s12[i] = get<double>(in, path);
            g.force[i].x() = get<double>(in, path);
            g.force[i].y() = get<double>(in, path);
            g.velocity[i].x() = get<double>(in, path);
            g.velocity[i].y() = get<double>(in, path);
        }
        Observables o;
        for (double* v : {&o.v_rms, &o.s_rms, &o.mean_speed, &o.mean_component_speed, &o.mean_component_order,
                          &o.mean_angle})
            *v = get<double>(in, path);
        s.globals = std::move(g);
        s.observables = o;
    }
    return s;
}

void write_snapshot_csv(const std::string& path, const Snapshot& s, const TestGrid& grid) {
    if (grid.points.size() != static_cast<std::size_t>(s.values.rows()))
        throw ConfigError("grid does not match the snapshot");
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) throw ConfigError("cannot write " + path);
    std::fprintf(f, "x,y");
    for (int c = 0; c < s.components(); ++c) std::fprintf(f, ",phi_%d", c);
    std::fprintf(f, "\n");
    for (Eigen::Index i = 0; i < s.values.rows(); ++i) {
        std::fprintf(f, "%.9g,%.9g", grid.points.x[static_cast<std::size_t>(i)],
                     grid.points.y[static_cast<std::size_t>(i)]);
        for (Eigen::Index c = 0; c < s.values.cols(); ++c) std::fprintf(f, ",%.9g", s.values(i, c));
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

}  // namespace rkrfm
