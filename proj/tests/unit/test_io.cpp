#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "bnls/error.hpp"
#include "bnls/groundstate.hpp"
#include "bnls/io/config.hpp"
#include "bnls/io/report.hpp"
#include "bnls/io/series.hpp"
#include "bnls/io/snapshot.hpp"
#include "doctest.h"

using namespace bnls;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "bnls_unit";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& bytes)
{
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

const char* kBase = R"(
[params]
gamma = 1
mu = 1
omega = 1
sigma = 2   # critical
dim = 2
[grid]
points = 32
half_width = 8
)";

}  // namespace

TEST_SUITE("io")
{
    TEST_CASE("config parsing")
    {
        const auto m = io::parse_config_text(kBase);
        CHECK(m.get("params.sigma") == "2");
        CHECK(m.get("grid.points") == "32");
        CHECK_FALSE(m.has("sigma"));
        CHECK_THROWS_AS(io::parse_config_text("a = 1\na = 2"), ValidationError);
        CHECK_THROWS_AS(io::parse_config_text("[params\n"), ValidationError);
        CHECK_THROWS_AS(io::parse_config_text("justtext"), ValidationError);
        CHECK_THROWS_AS(io::parse_config_file(temp_path("does_not_exist.ini")), IoError);

        const auto rc = io::resolve_config("groundstate", m);
        CHECK(rc.params.sigma == 2.0);
        CHECK(rc.grid_points == 32);
        CHECK(rc.resolved.at("params.mu") == "1");
    }

    TEST_CASE("unknown and missing keys are reported by name")
    {
        auto m = io::parse_config_text(kBase);
        m.set("params.gama", "1");
        try {
            io::resolve_config("groundstate", m);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("params.gama") != std::string::npos);
        }

        try {
            io::resolve_config("evolve", io::parse_config_text(kBase));
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("evolve.dt") != std::string::npos);
            CHECK(msg.find("evolve.t_end") != std::string::npos);
        }
        CHECK(io::required_keys("identities") == std::vector<std::string>{"input.snapshot"});
    }

    TEST_CASE("hypothesis violations are validation errors")
    {
        for (const auto& [key, value] : std::vector<std::pair<std::string, std::string>>{
                 {"params.gamma", "0"}, {"params.omega", "-1"}, {"params.mu", "-0.5"}, {"grid.points", "abc"}}) {
            auto m = io::parse_config_text(kBase);
            m.set(key, value);
            CAPTURE(key);
            CHECK_THROWS_AS(io::resolve_config("groundstate", m), ValidationError);
        }
    }

    TEST_CASE("snapshot round trip is bit-exact")
    {
        auto g = Grid::create(2, 16, 3.5);
        std::vector<cplx> v(g->cell_count());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = {std::sin(0.1 * i) / 3.0, std::cos(0.7 * i) * 1e-300};
        const Field f(g, v);
        const PhysicalParams p{1.5, 0.25, 2.0, 1.75, 2};
        const auto path = temp_path("rt.bin");
        io::write_snapshot(f, p, path);
        CHECK(fs::file_size(path) == io::kSnapshotHeaderBytes + 16 * v.size());
        const auto s = io::read_snapshot_with_params(path);
        CHECK(s.params == p);
        CHECK(s.field.grid().same_shape(*g));
        for (std::size_t i = 0; i < v.size(); ++i) {
            REQUIRE(s.field[i].real() == v[i].real());
            REQUIRE(s.field[i].imag() == v[i].imag());
        }
        const std::string bytes = slurp(path);
        CHECK(bytes.substr(0, 4) == "BNLS");
    }

    TEST_CASE("malformed snapshots")
    {
        auto g = Grid::create(1, 8, 2.0);
        const auto path = temp_path("bad.bin");
        io::write_snapshot(Field(g), path);
        const std::string good = slurp(path);

        std::string b = good;
        b[0] = 'X';
        spit(path, b);
        CHECK_THROWS_AS(io::read_snapshot(path), FormatError);

        b = good;
        b[4] = 9;
        spit(path, b);
        CHECK_THROWS_AS(io::read_snapshot(path), FormatError);

        spit(path, good.substr(0, good.size() - 3));
        CHECK_THROWS_AS(io::read_snapshot(path), FormatError);

        spit(path, good + "x");
        CHECK_THROWS_AS(io::read_snapshot(path), FormatError);

        spit(path, good.substr(0, 20));
        CHECK_THROWS_AS(io::read_snapshot(path), FormatError);

        CHECK_THROWS_AS(io::read_snapshot(temp_path("missing.bin")), IoError);
    }

    TEST_CASE("series header and number format")
    {
        CHECK(io::series_header({}) ==
              "t,mass,grad_norm_sq,lap_norm_sq,potential,action,energy0,nehari,pohozaev,virial_Q");
        CHECK(io::series_header({8, 16}) ==
              "t,mass,grad_norm_sq,lap_norm_sq,potential,action,energy0,nehari,pohozaev,virial_Q,"
              "M_R8,M_R16,dMdt_R8,dMdt_R16,rate_R8,rate_R16");
        CHECK(io::format_double(0.1) == "0.10000000000000001");
        CHECK(std::stod(io::format_double(M_PI)) == M_PI);

        DiagnosticsRecord d;
        d.t = 0.5;
        d.report.mass = 2.0;
        const std::string csv = io::format_series({d}, {8});
        CHECK(csv.find("0.5,2,") != std::string::npos);
    }

    TEST_CASE("sha256 test vectors")
    {
        CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
        const auto path = temp_path("abc.txt");
        spit(path, "abc");
        CHECK(io::sha256_file(path) == io::sha256_hex("abc"));
    }

    TEST_CASE("json reports")
    {
        FunctionalReport r;
        r.virial = NAN;
        const auto j = io::to_json(r);
        CHECK(j.at("virial").is_null());
        CHECK(io::to_json(PhysicalParams{}).at("sigma") == 2.0);
    }

    TEST_CASE("re-certifying a stored profile reproduces its defects")
    {
        PhysicalParams p;
        SolverConfig sc;
        sc.grid = Grid::create(2, 64, 12.0);
        const auto gs = solve(p, sc);
        REQUIRE(gs.converged);
        const auto path = temp_path("gs.bin");
        io::write_snapshot(gs.profile, p, path);
        const auto s = io::read_snapshot_with_params(path);
        const auto again = identity_defects(evaluate_all(s.field, s.params), s.params);
        CHECK(again.nehari == gs.identity_defects.nehari);
        CHECK(again.pohozaev == gs.identity_defects.pohozaev);
        CHECK(again.virial == gs.identity_defects.virial);
    }
}
