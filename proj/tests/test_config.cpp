#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "rkrfm/config.hpp"
#include "rkrfm/error.hpp"
#include "rkrfm/snapshot.hpp"

using namespace rkrfm;

TEST(Config, PresetsRoundTrip) {
    for (const RunConfig& c : {RunConfig{}, manufactured_config(), desk_cells_config()}) {
        const std::string text = serialize_config(c);
        const RunConfig back = parse_config(text);
        EXPECT_TRUE(back == c);
        EXPECT_EQ(serialize_config(back), text);
    }
}

TEST(Config, RandomConfigsRoundTrip) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        RunConfig c = desk_cells_config();
        c.domain.upper = {10 + 100 * u(gen), 10 + 100 * u(gen)};
        c.nx = 1 + static_cast<int>(gen() % 5);
        c.features = 1 + static_cast<int>(gen() % 700);
        c.bound = 10 * u(gen) + 1e-3;
        c.seed = gen();
        c.regenerate = gen() % 2;
        c.activation = gen() % 2 ? Activation::Tanh : Activation::Cos;
        c.cells.gamma = u(gen) / 3.0;
        c.cells.zeta = -0.1 + 0.2 * u(gen);
        c.cells.cells = 3;
        c.centers = {{u(gen), u(gen)}, {u(gen) * 1e-7, 3.0}, {1.0 / 3.0, 2.0 / 7.0}};
        c.dt = 0.1;
        c.final_time = 0.1 * static_cast<double>(gen() % 100);
        c.rescale = 1 + 300 * u(gen);
        const RunConfig back = parse_config(serialize_config(c));
        EXPECT_TRUE(back == c);
        EXPECT_EQ(back.seed, c.seed);
        EXPECT_EQ(back.centers, c.centers);
        EXPECT_EQ(back.cells.zeta, c.cells.zeta);
    }
}

TEST(Config, ParsesCommentsAndSections) {
    const RunConfig c = parse_config(R"(
# convergence run
[partition]
nx = 3   # three columns
ny = 2
pou = indicator
[basis]
activation = cos
seed = 12
[time]
T = 1
dt = 5e-4
tableau = midpoint
)");
    EXPECT_EQ(c.nx, 3);
    EXPECT_EQ(c.ny, 2);
    EXPECT_EQ(c.activation, Activation::Cos);
    EXPECT_EQ(c.seed, 12u);
    EXPECT_EQ(c.steps(), 2000);
    EXPECT_EQ(c.tableau, "midpoint");
}

TEST(Config, UnknownKeysAndSectionsAreErrors) {
    auto msg = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(msg("[basis]\nfeaturs = 3\n").find("line 2: unknown key 'featurs'"), std::string::npos);
    EXPECT_NE(msg("[bases]\n").find("unknown section"), std::string::npos);
    EXPECT_NE(msg("nx = 2\n").find("outside of a section"), std::string::npos);
    EXPECT_NE(msg("[partition]\nnx 2\n").find("expected key = value"), std::string::npos);
    EXPECT_NE(msg("[partition]\nnx = two\n").find("not an integer"), std::string::npos);
    EXPECT_NE(msg("[basis]\nactivation = relu\n").find("unknown activation"), std::string::npos);
    EXPECT_NE(msg("[time]\ndt = 0.3\n").find("does not divide"), std::string::npos);
    EXPECT_NE(msg("[model]\nkind = cells\n[cells]\ncount = 2\ncenters = 1 2\n").find("centers"), std::string::npos);
    EXPECT_FALSE(msg("[collocation]\nqx = 1\n").empty());
    EXPECT_THROW(load_config("/nonexistent/rkrfm.cfg"), ConfigError);
}

TEST(Config, LoadFromFile) {
    const auto path = std::filesystem::temp_directory_path() / "rkrfm_config_test.cfg";
    {
        std::ofstream out(path);
        out << serialize_config(desk_cells_config());
    }
    EXPECT_TRUE(load_config(path.string()) == desk_cells_config());
    std::filesystem::remove(path);
}

namespace {

Snapshot sample_snapshot(bool with_globals) {
    Snapshot s;
    s.time = 12.5;
    s.rows = 3;
    s.cols = 4;
    s.values.resize(12, 2);
    for (Eigen::Index i = 0; i < s.values.size(); ++i) s.values.data()[i] = 0.1 * static_cast<double>(i) - 0.3;
    if (with_globals) {
        CellGlobals g = CellGlobals::zero(2);
        g.area = {1.5, 2.5};
        g.s11 = {0.1, -0.2};
        g.s12 = {0.3, 0.4};
        g.force = {{1, 2}, {3, 4}};
        g.velocity = {{0.5, 1}, {1.5, 2}};
        s.globals = g;
        s.observables = Observables{1, 2, 3, 4, 5, 6};
    }
    return s;
}

}  // namespace

TEST(SnapshotIo, RoundTrip) {
    const auto dir = std::filesystem::temp_directory_path();
    for (bool g : {false, true}) {
        const Snapshot s = sample_snapshot(g);
        const std::string path = (dir / "rkrfm_snapshot_test.bin").string();
        write_snapshot(path, s);
        EXPECT_EQ(std::filesystem::file_size(path), 32u + 24u * 8u + (g ? (14u + 6u) * 8u : 0u));
        const Snapshot r = read_snapshot(path);
        EXPECT_EQ(r.time, s.time);
        EXPECT_EQ(r.rows, 3);
        EXPECT_EQ(r.cols, 4);
        EXPECT_EQ(r.values, s.values);
        EXPECT_EQ(r.globals.has_value(), g);
        if (g) {
            EXPECT_EQ(r.globals->area, s.globals->area);
            EXPECT_EQ(r.globals->velocity[1], s.globals->velocity[1]);
            EXPECT_EQ(r.observables->mean_angle, 6.0);
        }
        std::filesystem::remove(path);
    }
}

TEST(SnapshotIo, RejectsBadFiles) {
    const auto path = (std::filesystem::temp_directory_path() / "rkrfm_bad_snapshot.bin").string();
    {
        std::ofstream out(path, std::ios::binary);
        out << "NOPE and more bytes";
    }
    EXPECT_THROW(read_snapshot(path), ConfigError);
    write_snapshot(path, sample_snapshot(false));
    std::filesystem::resize_file(path, 40);
    EXPECT_THROW(read_snapshot(path), ConfigError);
    std::filesystem::remove(path);
    Snapshot s = sample_snapshot(false);
    s.rows = 5;
    EXPECT_THROW(write_snapshot(path, s), ConfigError);
}

TEST(SnapshotIo, CsvExport) {
    const Snapshot s = sample_snapshot(false);
    const TestGrid g = build_test_grid({{0, 0}, {1, 1}}, 4, 3);
    const auto path = (std::filesystem::temp_directory_path() / "rkrfm_snapshot.csv").string();
    write_snapshot_csv(path, s, g);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "x,y,phi_0,phi_1");
    int lines = 0;
    for (std::string l; std::getline(in, l);) ++lines;
    EXPECT_EQ(lines, 12);
    std::filesystem::remove(path);
}
