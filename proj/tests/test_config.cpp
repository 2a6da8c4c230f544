#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "geomews/config.hpp"
#include "geomews/io.hpp"
#include "geomews/parallel.hpp"

using namespace geomews;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("geomews_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST(Config, Defaults) {
    const auto c = default_config();
    EXPECT_EQ(c.preset, "phyto");
    EXPECT_EQ(c.cell.n, 141u);
    EXPECT_EQ(c.params.b1, 2.1);
    ASSERT_EQ(c.sigma.size(), 9u);
    EXPECT_NEAR(c.sigma.front(), 0.005, 1e-15);
    EXPECT_NEAR(c.sigma.back(), 0.025, 1e-15);
    EXPECT_EQ(c.b1_scan.size(), 111u);
    EXPECT_NEAR(c.b1_scan.back(), 2.44, 1e-12);
    EXPECT_EQ(c.cell.semi_axes[0], 0.018);
    EXPECT_EQ(c.cell.semi_axes[1], 0.008);
    EXPECT_EQ(c.mc.sim.seed, c.seed);
    EXPECT_EQ(c.timeseries.observations(), 3000u);
    EXPECT_EQ(c.hash.size(), 16u);
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_THROW(parse_config(Json::parse(R"({"grid": {"n": 51, "spacing": 2}})")), ConfigError);
    EXPECT_THROW(parse_config(Json::parse(R"({"modle": {}})")), ConfigError);
    EXPECT_THROW(parse_config(Json::parse(R"({"model": {"params": {"b2": 1}}})")), ConfigError);
    try {
        parse_config(Json::parse(R"({"mc": {"dtt": 0.1}})"));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("dtt"), std::string::npos);
    }
}

TEST(Config, InvalidValuesRejected) {
    EXPECT_THROW(parse_config(Json::parse(R"({"grid": {"n": 3}})")), ConfigError);
    EXPECT_THROW(parse_config(Json::parse(R"({"grid": {"scheme": "spectral"}})")), ConfigError);
    EXPECT_THROW(parse_config(Json::parse(R"({"analysis": {"alpha": 0.5}})")), ConfigError);
    EXPECT_THROW(parse_config(Json::parse(R"({"sweep": {"sigma": []}})")), ConfigError);
    EXPECT_THROW(parse_config(Json::parse(R"({"sweep": {"sigma": [0.01, -0.01]}})")), ConfigError);
    EXPECT_THROW(parse_config(Json::parse(R"({"grid": {"n": "many"}})")), ConfigError);
    EXPECT_THROW(parse_config(Json::parse(R"({"timeseries": {"retention": "sometimes"}})")), ConfigError);
    EXPECT_THROW(parse_config(Json::parse(R"({"model": {"preset": "lorenz"}})")), ConfigError);
    EXPECT_THROW(parse_config(Json::parse(R"({"jobs": 0})")), ConfigError);
}

TEST(Config, GridForms) {
    const auto c = parse_config(Json::parse(R"({"sweep": {"b1": 2.2, "sigma": {"from": 0.01, "to": 0.02, "step": 0.005},
                                                        "scan_sigmas": [0.003, 0.004]}})"));
    EXPECT_EQ(c.b1, std::vector<double>{2.2});
    ASSERT_EQ(c.sigma.size(), 3u);
    EXPECT_NEAR(c.sigma[2], 0.02, 1e-15);
    EXPECT_EQ(c.scan_sigmas, (std::vector<double>{0.003, 0.004}));
    EXPECT_THROW(parse_config(Json::parse(R"({"sweep": {"b1": {"from": 2.0, "to": 2.1}}})")), ConfigError);
}

TEST(Config, Sections) {
    const auto c = parse_config(Json::parse(R"({
        "model": {"params": {"b1": 2.2, "delta": 2e-4}, "domain": {"T": [0.25, 0.65]}},
        "grid": {"n": 101, "scheme": "centred"},
        "regions": {"semi_axes": [0.02, 0.01], "kappa": 1.5},
        "mc": {"dt": 0.002, "n_traj_at": [[0.02, 123]]},
        "timeseries": {"retention": "ellipse", "n_ens": 7},
        "seed": 99, "jobs": 2})"));
    EXPECT_EQ(c.params.b1, 2.2);
    EXPECT_EQ(c.cell.params.delta, 2e-4);
    EXPECT_EQ(c.cell.domain.lo[0], 0.25);
    EXPECT_EQ(c.cell.domain.hi[1], 0.13);
    EXPECT_EQ(c.cell.scheme, Scheme::centred);
    EXPECT_EQ(c.cell.kappa, 1.5);
    EXPECT_EQ(c.mc.sim.dt, 0.002);
    EXPECT_EQ(c.mc.n_for(0.02), 123u);
    EXPECT_EQ(c.mc.n_for(0.01), c.mc.sim.n_traj);
    EXPECT_EQ(c.retention, Retention::ellipse);
    EXPECT_EQ(c.timeseries.n_ens, 7u);
    EXPECT_EQ(c.mc.sim.seed, 99u);
    EXPECT_EQ(c.timeseries.jobs, 2u);
}

TEST(Config, HashIgnoresJobsAndOutput) {
    const auto a = parse_config(Json::parse(R"({"seed": 5})"));
    const auto b = parse_config(Json::parse(R"({"seed": 5, "jobs": 4, "output": {"dir": "elsewhere"}})"));
    const auto c = parse_config(Json::parse(R"({"seed": 6})"));
    EXPECT_EQ(a.hash, b.hash);
    EXPECT_NE(a.hash, c.hash);
}

TEST(Config, LoadFromFile) {
    const auto d = scratch("cfg");
    {
        std::ofstream(d / "ok.json") << "{\n  // comments are allowed\n  \"grid\": {\"n\": 61}\n}\n";
        std::ofstream(d / "broken.json") << "{\"grid\": ";
    }
    EXPECT_EQ(load_config(d / "ok.json").cell.n, 61u);
    EXPECT_THROW(load_config(d / "broken.json"), ConfigError);
    EXPECT_THROW(load_config(d / "absent.json"), ConfigError);
}

TEST(Io, Fnv1aReferenceVectors) {
    EXPECT_EQ(hex64(fnv1a("")), "cbf29ce484222325");
    EXPECT_EQ(hex64(fnv1a("a")), "af63dc4c8601ec8c");
    EXPECT_EQ(hex64(fnv1a("foobar")), "85944171f73967e8");
}

TEST(Io, FmtDoubleRoundTrips) {
    EXPECT_EQ(fmt_double(0.0), "0");
    EXPECT_EQ(fmt_double(-0.0), "0");
    EXPECT_EQ(fmt_double(0.1), "0.1");
    EXPECT_EQ(fmt_double(2.1), "2.1");
    EXPECT_EQ(fmt_double(NAN), "nan");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double v = std::exp(U(rng)) * (i % 2 ? 1.0 : -1.0);
        EXPECT_EQ(std::strtod(fmt_double(v).c_str(), nullptr), v);
    }
}

TEST(Io, CsvRoundTripWithHeader) {
    const auto d = scratch("csv");
    {
        CsvWriter w(d / "t.csv", {"scan", "abc123", 42}, {"b1", "count", "label"});
        w.row({2.1, 7LL, std::string("x")});
        w.row({1.0 / 3.0, -1LL, std::string("y")});
        EXPECT_THROW(w.row({1.0}), IoError);
    }
    std::ifstream in(d / "t.csv");
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first, std::string("# geomews ") + kVersion);
    const auto t = read_csv(d / "t.csv");
    EXPECT_EQ(t.columns, (std::vector<std::string>{"b1", "count", "label"}));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.number(1, "b1"), 1.0 / 3.0);
    EXPECT_EQ(t.rows[0][t.col("label")], "x");
    EXPECT_THROW(t.col("sigma"), IoError);
    EXPECT_THROW(read_csv(d / "none.csv"), IoError);
}

TEST(Io, BinaryFieldAndCache) {
    const auto d = scratch("field");
    const auto g = Grid<2>::uniform(Box<2>{{0.0, 0.0}, {1.0, 2.0}}, 7);
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::sin(static_cast<double>(k));
    const ScalarField<2> f(g, v);
    write_field_binary(d / "f.bin", f, "key-1");
    const auto back = read_field_binary<2>(d / "f.bin", "key-1");
    ASSERT_TRUE(back);
    EXPECT_TRUE(back->grid() == g);
    for (std::size_t k = 0; k < v.size(); ++k) EXPECT_EQ((*back)[k], v[k]);
    EXPECT_FALSE(read_field_binary<2>(d / "f.bin", "key-2"));
    EXPECT_FALSE(read_field_binary<1>(d / "f.bin", "key-1"));
    EXPECT_FALSE(read_field_binary<2>(d / "missing.bin", "key-1"));

    const FieldCache cache(d / "cache");
    EXPECT_FALSE(cache.load<2>("k"));
    cache.store("k", f);
    const auto hit = cache.load<2>("k");
    ASSERT_TRUE(hit);
    EXPECT_EQ((*hit)[3], v[3]);
    const FieldCache off;
    EXPECT_FALSE(off.enabled());
    off.store("k", f);
    EXPECT_FALSE(off.load<2>("k"));
}

TEST(Io, FieldKeyTracksSettings) {
    CellSpec a;
    CellSpec b = a;
    b.params.sigma_u = 0.011;
    CellSpec c = a;
    c.scheme = Scheme::upwind;
    EXPECT_NE(a.field_key("committor"), b.field_key("committor"));
    EXPECT_NE(a.field_key("committor"), c.field_key("committor"));
    EXPECT_NE(a.field_key("committor"), a.field_key("mfpt"));
    CellSpec e = a;
    e.alpha = 0.2;  // alpha only affects post-processing
    EXPECT_EQ(a.field_key("committor"), e.field_key("committor"));
}

TEST(Parallel, CoversAllIndicesAndRethrows) {
    for (std::size_t jobs : {1u, 2u, 5u}) {
        std::vector<int> hit(100, 0);
        parallel_for(hit.size(), jobs, [&](std::size_t i) { hit[i] += 1; });
        for (int h : hit) EXPECT_EQ(h, 1);
        std::atomic<int> ran{0};
        EXPECT_THROW(parallel_for(50, jobs,
                                  [&](std::size_t i) {
                                      ++ran;
                                      if (i == 7) throw std::runtime_error("boom");
                                  }),
                     std::runtime_error);
        EXPECT_GE(ran.load(), 1);
    }
    parallel_for(0, 3, [](std::size_t) { FAIL(); });
}
