#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "eden/holetrack.hpp"
#include "eden/lattice.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace eden;

namespace {

struct CmdResult {
    int exit_code;
    std::string output;
};

std::string cli_path() {
    const char* env = std::getenv("EDEN_CLI");
    REQUIRE_MESSAGE(env != nullptr, "EDEN_CLI must point at the eden binary");
    return env;
}

CmdResult run_cli(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("simulate twice produces byte-identical run directories") {
    const fs::path a = fresh_dir("eden_cli_a");
    const fs::path b = fresh_dir("eden_cli_b");
    const std::string common = "simulate --dim 2 --steps 1000 --seed 7 --out ";
    CHECK(run_cli(common + a.string()).exit_code == 0);
    CHECK(run_cli(common + b.string()).exit_code == 0);

    int files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file()) continue;
        ++files;
        const fs::path rel = fs::relative(entry.path(), a);
        CHECK(slurp(entry.path()) == slurp(b / rel));
    }
    CHECK(files >= 6);  // events, series, holes, splittree, live holes, manifest
}

TEST_CASE("a run can be re-derived byte for byte from its manifest") {
    const fs::path a = fresh_dir("eden_cli_m1");
    const fs::path b = fresh_dir("eden_cli_m2");
    CHECK(run_cli("simulate --dim 2 --steps 800 --seed 3 --seeds 2 --out " + a.string())
              .exit_code == 0);
    CHECK(run_cli("simulate --manifest " + (a / "manifest.json").string() + " --out " +
                  b.string())
              .exit_code == 0);
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file()) continue;
        const fs::path rel = fs::relative(entry.path(), a);
        CHECK(slurp(entry.path()) == slurp(b / rel));
    }
}

TEST_CASE("oracle prints betti numbers of polyomino files") {
    const fs::path dir = fs::temp_directory_path() / "eden_cli_oracle";
    fs::create_directories(dir);

    {
        Polyomino ring(2);
        for (auto [x, y] : {std::pair<int, int>{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 2},
                            {2, 0}, {2, 1}})
            ring.insert(make_cell({x, y}));
        write_polyomino_file((dir / "ring.poly").string(), ring);
        const CmdResult r = run_cli("oracle " + (dir / "ring.poly").string());
        CHECK(r.exit_code == 0);
        CHECK(r.output == "1 1\n");
    }
    {
        Polyomino cube(4);
        cube.insert(make_cell({0, 0, 0, 0}));
        write_polyomino_file((dir / "cube4.poly").string(), cube);
        const CmdResult r = run_cli("oracle " + (dir / "cube4.poly").string());
        CHECK(r.exit_code == 0);
        CHECK(r.output == "1 0 0 0\n");
    }
    {
        Polyomino shell(3);
        for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y)
                for (int z = 0; z < 3; ++z)
                    if (!(x == 1 && y == 1 && z == 1)) shell.insert(make_cell({x, y, z}));
        write_polyomino_file((dir / "shell.poly").string(), shell);
        const CmdResult r = run_cli("oracle " + (dir / "shell.poly").string());
        CHECK(r.exit_code == 0);
        CHECK(r.output == "1 0 1\n");
    }
}

TEST_CASE("exit codes distinguish config, io, and budget failures") {
    // Unknown flag / bad usage: 2.
    CHECK(run_cli("simulate --bogus-flag").exit_code == 2);
    CHECK(run_cli("simulate --dim 1 --steps 5 --out /tmp/eden_cli_x").exit_code == 2);
    // Missing file: 3 (and parse errors carry line numbers).
    const CmdResult missing = run_cli("oracle /nonexistent/file.poly");
    CHECK(missing.exit_code == 3);
    const fs::path bad = fs::temp_directory_path() / "eden_cli_bad.poly";
    {
        std::ofstream os(bad);
        os << "2\n1 2\n3\n";
    }
    const CmdResult parse = run_cli("oracle " + bad.string());
    CHECK(parse.exit_code == 3);
    CHECK(parse.output.find(":3:") != std::string::npos);
    // Budget: full persistence beyond the default budget: 4.
    CHECK(run_cli("simulate --dim 2 --steps 300000 --full-ph --out /tmp/eden_cli_y")
              .exit_code == 4);
}

TEST_CASE("full persistence run emits a barcode with one open h0 interval") {
    const fs::path dir = fresh_dir("eden_cli_ph");
    CHECK(run_cli("simulate --dim 3 --steps 10 --seed 5 --full-ph --out " + dir.string())
              .exit_code == 0);
    const std::string barcode = slurp(dir / "seed_5" / "barcode.csv");
    std::istringstream is(barcode);
    std::string line;
    std::getline(is, line);
    CHECK(line == "hdim,birth,death");
    int open_h0 = 0;
    while (std::getline(is, line)) {
        int hdim;
        long birth, death;
        REQUIRE(std::sscanf(line.c_str(), "%d,%ld,%ld", &hdim, &birth, &death) == 3);
        if (hdim == 0 && death == -1) ++open_h0;
    }
    CHECK(open_h0 == 1);
}

TEST_CASE("export cubical rebuilds the state at a step") {
    const fs::path dir = fresh_dir("eden_cli_export");
    CHECK(run_cli("simulate --dim 2 --steps 600 --seed 11 --out " + dir.string()).exit_code ==
          0);
    const fs::path out = dir / "cubical_500.txt";
    CHECK(run_cli("export cubical --run " + (dir / "seed_11").string() + " --at 500 --out " +
                  out.string())
              .exit_code == 0);
    std::istringstream is(slurp(out));
    std::string line;
    std::getline(is, line);
    CHECK(line == "2");
    std::getline(is, line);
    CHECK(line == "500");
    int cubes = 0;
    while (std::getline(is, line))
        if (!line.empty()) ++cubes;
    CHECK(cubes == 500);

    CHECK(run_cli("export cubical --run " + (dir / "seed_11").string() +
                  " --at 601 --out /tmp/eden_cli_toofar.txt")
              .exit_code == 2);
}

TEST_CASE("stats fit on a finished run lands near the conjectured exponent") {
    const fs::path dir = fresh_dir("eden_cli_fit");
    CHECK(run_cli("simulate --dim 2 --steps 200000 --seed 2 --series-every 1000 --out " +
                  dir.string())
              .exit_code == 0);
    const CmdResult fit =
        run_cli("stats fit --run " + (dir / "seed_2").string() + " --series beta_1 --tmin 10000");
    CHECK(fit.exit_code == 0);
    const auto pos = fit.output.find("exponent ");
    REQUIRE(pos != std::string::npos);
    const double exponent = std::stod(fit.output.substr(pos + 9));
    CHECK(exponent > 0.3);
    CHECK(exponent < 0.7);
    CHECK(fs::exists(dir / "seed_2" / "fits.csv"));

    const CmdResult areas = run_cli("stats areas --run " + (dir / "seed_2").string());
    CHECK(areas.exit_code == 0);
    CHECK(areas.output.find("1: ") != std::string::npos);
}

TEST_CASE("jumpcfg certifies and optionally writes the configuration") {
    const fs::path out = fs::temp_directory_path() / "eden_cli_jump.poly";
    const CmdResult r =
        run_cli("jumpcfg --dim 3 --i 1 --k 2 --part a --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("certified delta: 0 -2 2") != std::string::npos);
    const Polyomino p = read_polyomino_file(out.string());
    CHECK(p.dim() == 3);
    CHECK(run_cli("jumpcfg --dim 2 --i 1 --k 0 --part a").exit_code == 2);
}

TEST_CASE("census and cast subcommands work on files") {
    const fs::path dir = fs::temp_directory_path() / "eden_cli_misc";
    fs::create_directories(dir);
    {
        Polyomino sq(2);
        for (auto [x, y] : {std::pair<int, int>{0, 0}, {1, 0}, {0, 1}, {1, 1}})
            sq.insert(make_cell({x, y}));
        write_polyomino_file((dir / "sq.poly").string(), sq);
        std::ofstream pat(dir / "full.pat");
        pat << "R=2\nrequire_base=1\n2\n0 0\n0 1\n1 0\n1 1\n";
    }
    const CmdResult census = run_cli("census --poly " + (dir / "sq.poly").string() +
                                     " --pattern " + (dir / "full.pat").string());
    CHECK(census.exit_code == 0);
    CHECK(census.output == "1\n");

    {
        Polyomino hole(3);
        hole.insert(make_cell({0, 0, 0}));
        hole.insert(make_cell({1, 0, 0}));
        write_polyomino_file((dir / "hole.poly").string(), hole);
    }
    const fs::path obj = dir / "hole.obj";
    CHECK(run_cli("export cast --poly " + (dir / "hole.poly").string() + " --out " +
                  obj.string())
              .exit_code == 0);
    const std::string mesh = slurp(obj);
    CHECK(mesh.find("v ") != std::string::npos);
    CHECK(mesh.find("f ") != std::string::npos);

    const CmdResult rev = run_cli("reverse --poly " + (dir / "hole.poly").string() + " --seed 4");
    CHECK(rev.exit_code == 0);
    CHECK(rev.output.find("removals 2") != std::string::npos);
    CHECK(rev.output.find("deaths 1") != std::string::npos);
}
