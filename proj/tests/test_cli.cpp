#include <catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <fstream>
#include <sstream>
#include <string>

#include "cegof/copula_models.hpp"
#include "cegof/special_functions.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
    std::string stderr_text;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args, const fs::path& dir) {
    fs::path out = dir / "stdout.txt";
    fs::path err = dir / "stderr.txt";
    std::string cmd = std::string(CEGOF_BIN) + " " + args + " >" + out.string() + " 2>" +
                      err.string();
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.stdout_text = slurp(out);
    r.stderr_text = slurp(err);
    return r;
}

fs::path work_dir() {
    fs::path dir = fs::temp_directory_path() / "cegof_cli_test";
    fs::create_directories(dir);
    return dir;
}

fs::path write_gaussian_csv(const fs::path& dir, double rho, int n, std::uint64_t seed,
                            bool header = false) {
    Eigen::MatrixXd sigma(2, 2);
    sigma << 1.0, rho, rho, 1.0;
    cegof::RngStream rng(seed);
    auto u = cegof::sample_gaussian_copula(cegof::GaussianCopulaParams{sigma}, n, rng);
    fs::path p = dir / ("data_" + std::to_string(seed) + ".csv");
    std::ofstream out(p);
    if (header) out << "x,y\n";
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        out << u(i, 0) << "," << u(i, 1) << "\n";
    }
    return p;
}

}  // namespace

TEST_CASE("test subcommand writes a report and a verdict") {
    auto dir = work_dir();
    auto csv = write_gaussian_csv(dir, 0.8, 300, 61, /*header=*/true);
    fs::path report_path = dir / "report.json";
    auto r = run_cli("test --input " + csv.string() + " --family gaussian --bootstrap 99 "
                         "--seed 42 --out " + report_path.string(),
                     dir);
    CHECK(r.exit_code == 0);
    CHECK((r.stdout_text.find("REJECT") != std::string::npos));

    auto j = nlohmann::json::parse(slurp(report_path));
    CHECK(j["family"] == "gaussian");
    CHECK(j["bootstrap_reps"] == 99);
    CHECK(j["p_value"].get<double>() >= 0.01);
    CHECK(j["seed"] == 42);
}

TEST_CASE("equal seeds give identical reports") {
    auto dir = work_dir();
    auto csv = write_gaussian_csv(dir, 0.5, 150, 62);
    auto first = run_cli("test --input " + csv.string() + " --bootstrap 49 --seed 9", dir);
    auto second = run_cli("test --input " + csv.string() + " --bootstrap 49 --seed 9", dir);
    CHECK(first.exit_code == 0);
    CHECK(first.stdout_text == second.stdout_text);
}

TEST_CASE("missing input exits 2 and writes nothing") {
    auto dir = work_dir();
    fs::path out = dir / "never.json";
    fs::remove(out);
    auto r = run_cli("test --input " + (dir / "no_such_file.csv").string() + " --out " +
                         out.string(),
                     dir);
    CHECK(r.exit_code == 2);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("ragged CSV exits 2 with the line number") {
    auto dir = work_dir();
    fs::path p = dir / "ragged.csv";
    {
        std::ofstream out(p);
        out << "0.1,0.2\n0.3,0.4\n0.5\n";
    }
    auto r = run_cli("test --input " + p.string(), dir);
    CHECK(r.exit_code == 2);
    CHECK(r.stderr_text.find("line 3") != std::string::npos);
}

TEST_CASE("entropy subcommand") {
    auto dir = work_dir();
    auto csv = write_gaussian_csv(dir, 0.0, 300, 63);
    auto r = run_cli("entropy --input " + csv.string(), dir);
    CHECK(r.exit_code == 0);
    CHECK(std::abs(std::stod(r.stdout_text)) < 0.15);

    fs::path one_col = dir / "one_col.csv";
    {
        std::ofstream out(one_col);
        for (int i = 0; i < 50; ++i) out << i * 0.017 << "\n";
    }
    CHECK(run_cli("entropy --input " + one_col.string(), dir).exit_code == 2);
}

TEST_CASE("compare subcommand emits both reports") {
    auto dir = work_dir();
    auto csv = write_gaussian_csv(dir, 0.7, 300, 64);
    fs::path out = dir / "compare.json";
    auto r = run_cli("compare --input " + csv.string() + " --out " + out.string(), dir);
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(slurp(out));
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 2);
    CHECK(j[0]["true_ce"] == j[1]["true_ce"]);
}

TEST_CASE("simulate subcommand is deterministic") {
    auto dir = work_dir();
    fs::path out1 = dir / "sim1.csv";
    fs::path out2 = dir / "sim2.csv";
    std::string args = "simulate --family gaussian --rho-grid 0.5 --replicates 2 "
                       "--sample-size 80 --seed 11 --out ";
    CHECK(run_cli(args + out1.string(), dir).exit_code == 0);
    CHECK(run_cli(args + out2.string(), dir).exit_code == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(fs::exists(dir / "sim1.summary.csv"));
}

TEST_CASE("reproduce writes the four CSV files") {
    auto dir = work_dir() / "repro";
    fs::remove_all(dir);
    auto r = run_cli("reproduce --replicates 1 --sample-size 60 --rho-grid 0.5 "
                     "--alpha-grid 3 --seed 5 --out-dir " + dir.string(),
                     work_dir());
    CHECK(r.exit_code == 0);
    for (const char* name : {"gaussian_results.csv", "gaussian_summary.csv",
                             "gumbel_results.csv", "gumbel_summary.csv"}) {
        CHECK(fs::exists(dir / name));
    }
}
