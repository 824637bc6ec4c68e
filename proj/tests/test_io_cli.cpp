#include <catch2/catch.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mhd2d/rng.hpp"
#include "mhd2d/run_config.hpp"
#include "mhd2d/series.hpp"
#include "mhd2d/snapshot.hpp"

using namespace mhd2d;
namespace fs = std::filesystem;

namespace {

const fs::path tmp_root = fs::temp_directory_path() / "mhd2d_test_io";

struct TmpDir {
    fs::path path;
    explicit TmpDir(const std::string& name) : path(tmp_root / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MHD2D_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("snapshot roundtrip") {
    TmpDir dir("snapshot");
    const Grid g(16);
    SplitMix64 rng(51);
    const ScalarField a = random_band_limited(g, 4, rng);
    const ScalarField b = random_band_limited(g, 4, rng);
    const fs::path path = dir.path / "pair.mhd2";
    snapshot::write(path.string(), 1.25, {{"alpha", &a}, {"beta", &b}});

    const snapshot::Snapshot snap = snapshot::read(path.string());
    CHECK(snap.time == 1.25);
    REQUIRE(snap.fields.size() == 2);
    CHECK(snap.fields[0].name == "alpha");
    CHECK(snap.fields[0].field.values == a.values);
    CHECK(snap.find("beta")->values == b.values);
    CHECK(snap.find("missing") == nullptr);

    SECTION("corrupt magic is rejected") {
        std::string bytes = read_file(path);
        bytes[0] = 'X';
        write_file(path, bytes);
        CHECK_THROWS_AS(snapshot::read(path.string()), ConfigError);
    }
}

TEST_CASE("series csv") {
    EstimateSeries s;
    SplitMix64 rng(52);
    for (int r = 0; r < 4; ++r) {
        std::array<double, 21> row{};
        for (double& v : row) v = rng.uniform(-1e3, 1e3) * std::pow(10.0, rng.uniform(-12, 12));
        row[0] = r * 0.5;
        s.append_row(row);
    }
    std::stringstream out;
    write_csv(s, out);

    SECTION("header lists exactly the documented columns") {
        std::string header;
        std::getline(out, header);
        std::stringstream want;
        for (size_t i = 0; i < EstimateSeries::column_names.size(); ++i)
            want << (i ? "," : "") << EstimateSeries::column_names[i];
        CHECK(header == want.str());
    }

    SECTION("seventeen significant digits round-trip") {
        TmpDir dir("csv");
        const fs::path path = dir.path / "series.csv";
        write_csv(s, path.string());
        const CsvTable table = read_csv(path.string());
        REQUIRE(table.names.size() == 21);
        REQUIRE(table.rows() == 4);
        for (size_t c = 0; c < 21; ++c)
            for (size_t r = 0; r < 4; ++r) CHECK(table.columns[c][r] == s.columns[c][r]);
    }

    SECTION("malformed rows are rejected") {
        TmpDir dir("csv_bad");
        const fs::path path = dir.path / "bad.csv";
        write_file(path, "a,b\n1.0,2.0\n3.0\n");
        CHECK_THROWS_AS(read_csv(path.string()), ConfigError);
        write_file(path, "a,b\n1.0,zzz\n");
        CHECK_THROWS_AS(read_csv(path.string()), ConfigError);
    }
}

TEST_CASE("run config parsing") {
    SECTION("full parse with comments and defaults") {
        std::stringstream in(
            "# reference setup\n"
            "grid_n = 32\n"
            "dt = 1e-3   # step\n"
            "t_end = 0.5\n"
            "scenario = vacuum_bubble\n"
            "output_dir = /tmp/out\n");
        const RunConfig rc = parse_run_config(in);
        CHECK(rc.grid_n == 32);
        CHECK(rc.dt == 1e-3);
        CHECK(rc.t_end == 0.5);
        CHECK(rc.scenario == ScenarioKind::vacuum_bubble);
        CHECK(rc.seed == 1);
        CHECK(rc.eps_rel == 1e-6);
        CHECK(rc.snapshot_every == 20);
        CHECK(rc.output_dir == "/tmp/out");
    }

    auto reject = [](const std::string& text) {
        std::stringstream in(text);
        CHECK_THROWS_AS(parse_run_config(in), ConfigError);
    };
    SECTION("unknown keys fail fast") {
        reject("grid_n = 32\ndt = 1e-3\nt_end = 1\nscenario = mhd_rest\ntypo_key = 3\n");
    }
    SECTION("required keys") { reject("grid_n = 32\ndt = 1e-3\nscenario = mhd_rest\n"); }
    SECTION("scenario names are validated") {
        std::stringstream in("grid_n = 32\ndt = 1e-3\nt_end = 1\nscenario = tornado\n");
        try {
            parse_run_config(in);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("taylor_green") != std::string::npos);
        }
    }
    SECTION("numeric validation") {
        reject("grid_n = 33\ndt = 1e-3\nt_end = 1\nscenario = mhd_rest\n");
        reject("grid_n = 32\ndt = 0\nt_end = 1\nscenario = mhd_rest\n");
        reject("grid_n = 32\ndt = 1e-3\nt_end = -1\nscenario = mhd_rest\n");
        reject("grid_n = 32\ndt = 1e-3\nt_end = 1\nscenario = mhd_rest\neps_rel = 2\n");
        reject("grid_n = 32\ndt = 1e-3\nt_end = 1\nscenario = mhd_rest\nsnapshot_every = 0\n");
    }
}

TEST_CASE("cli end to end") {
    TmpDir dir("cli");
    const fs::path cfg_path = dir.path / "run.cfg";
    const fs::path out_dir = dir.path / "out";
    write_file(cfg_path, "grid_n = 16\ndt = 1e-3\nt_end = 0.01\nscenario = taylor_green\n"
                         "snapshot_every = 5\noutput_dir = " +
                             out_dir.string() + "\n");

    SECTION("run produces snapshots, series and summary") {
        REQUIRE(run_cli("run --config " + cfg_path.string()) == 0);
        CHECK(fs::exists(out_dir / "snap_000000.mhd2"));
        CHECK(fs::exists(out_dir / "snap_000010.mhd2"));
        CHECK(fs::exists(out_dir / "series.csv"));
        const std::string summary = read_file(out_dir / "summary.txt");
        CHECK(summary.find("status = OK") != std::string::npos);

        const auto pos = summary.find("u_l2_decay_ratio = ");
        REQUIRE(pos != std::string::npos);
        const double ratio = std::stod(summary.substr(pos + 19));
        CHECK(ratio == Approx(std::exp(-2.0 * 0.01)).epsilon(2e-2));

        SECTION("report summarizes the series") {
            CHECK(run_cli("report --series " + (out_dir / "series.csv").string()) == 0);
        }

        SECTION("window analysis over the snapshot directory") {
            REQUIRE(run_cli("lp --input " + out_dir.string() +
                            " --qmin -6 --qmax 4 --q 4") == 0);
            CHECK(fs::exists(out_dir / "lp_window.csv"));
            const CsvTable win = read_csv((out_dir / "lp_window.csv").string());
            REQUIRE(win.rows() == 1);
            CHECK(win.columns[5][0] > 0.0);  // time_integrated_ratio
        }
    }

    SECTION("zero horizon yields the initial snapshot and a headered empty series") {
        const fs::path zero_cfg = dir.path / "zero.cfg";
        const fs::path zero_out = dir.path / "zero_out";
        write_file(zero_cfg, "grid_n = 16\ndt = 1e-3\nt_end = 0\nscenario = mhd_rest\n"
                             "output_dir = " +
                                 zero_out.string() + "\n");
        REQUIRE(run_cli("run --config " + zero_cfg.string()) == 0);
        CHECK(fs::exists(zero_out / "snap_000000.mhd2"));
        std::ifstream series(zero_out / "series.csv");
        std::string line;
        REQUIRE(std::getline(series, line));
        CHECK(line.rfind("t,e_kin", 0) == 0);
        CHECK_FALSE(std::getline(series, line));
        CHECK(run_cli("report --series " + (zero_out / "series.csv").string()) == 0);
    }

    SECTION("config errors exit with code 2") {
        const fs::path bad = dir.path / "bad.cfg";
        write_file(bad, "grid_n = 16\ndt = 1e-3\nt_end = 1\nscenario = whirlpool\n");
        CHECK(run_cli("run --config " + bad.string()) == 2);
        CHECK(run_cli("run --config " + (dir.path / "missing.cfg").string()) == 2);
        CHECK(run_cli("fly --config x") == 2);
        CHECK(run_cli("run --cfg " + cfg_path.string()) == 2);
    }

    SECTION("report rejects undocumented columns and ragged rows") {
        const fs::path alien = dir.path / "alien.csv";
        write_file(alien, "t,warp_factor\n0,1\n");
        CHECK(run_cli("report --series " + alien.string()) == 2);
        const fs::path ragged = dir.path / "ragged.csv";
        write_file(ragged, "t,e_kin\n0,1\n2\n");
        CHECK(run_cli("report --series " + ragged.string()) == 2);
    }

    SECTION("frequency analysis of a single-mode snapshot") {
        const Grid g(16);
        const ScalarField c2x =
            make_scalar(g, [](double x, double) { return std::cos(2 * x); });
        const fs::path snap_path = dir.path / "mode.mhd2";
        snapshot::write(snap_path.string(), 0.0, {{"f", &c2x}});
        REQUIRE(run_cli("lp --input " + snap_path.string() +
                        " --qmin -6 --qmax 4 --q 4") == 0);
        CHECK(fs::exists(dir.path / "mode_bands.mhd2"));

        std::ifstream csv(dir.path / "mode_lp.csv");
        std::string line;
        REQUIRE(std::getline(csv, line));  // header
        bool found_q0 = false;
        while (std::getline(csv, line)) {
            std::stringstream row(line);
            std::string kind, q_text, l2_text;
            std::getline(row, kind, ',');
            std::getline(row, q_text, ',');
            std::getline(row, l2_text, ',');
            if (kind != "band") continue;
            const double band_l2 = std::stod(l2_text);
            if (std::stoi(q_text) == 0) {
                CHECK(band_l2 > 1.0);
                found_q0 = true;
            } else {
                CHECK(band_l2 <= 1e-12);
            }
        }
        CHECK(found_q0);

        const snapshot::Snapshot bands = snapshot::read((dir.path / "mode_bands.mhd2").string());
        const ScalarField* band0 = bands.find("band_q0");
        REQUIRE(band0 != nullptr);
        CHECK(max_abs(*band0 - c2x) <= 1e-12);
    }

    SECTION("verify dispatches and rejects unknown suites") {
        CHECK(run_cli("verify --suite lp --config " + cfg_path.string()) == 0);
        CHECK(run_cli("verify --suite nonsense --config " + cfg_path.string()) == 2);
    }

    SECTION("worker budget does not change any output byte") {
        const fs::path out1 = dir.path / "serial";
        const fs::path out4 = dir.path / "threaded";
        for (const auto& [budget, out] : {std::pair<const char*, const fs::path*>{"1", &out1},
                                          {"4", &out4}}) {
            const fs::path cfg = dir.path / (std::string("thr") + budget + ".cfg");
            write_file(cfg, "grid_n = 16\ndt = 1e-3\nt_end = 0.01\nscenario = vacuum_bubble\n"
                            "snapshot_every = 2\noutput_dir = " +
                                out->string() + "\n");
            const std::string cmd = std::string("MHD2D_THREADS=") + budget + " " +
                                    MHD2D_CLI_PATH + " run --config " + cfg.string() +
                                    " >/dev/null 2>&1";
            REQUIRE(std::system(cmd.c_str()) == 0);
        }
        CHECK(read_file(out1 / "series.csv") == read_file(out4 / "series.csv"));
        CHECK(read_file(out1 / "summary.txt") == read_file(out4 / "summary.txt"));
        CHECK(read_file(out1 / "snap_000010.mhd2") == read_file(out4 / "snap_000010.mhd2"));
    }
}
