#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// Compile definitions provided by the build: absolute path of the CLI binary
// and of the shipped config directory.
#ifndef DAL_CLI_PATH
#error "DAL_CLI_PATH must be defined"
#endif
#ifndef DAL_CONFIG_DIR
#error "DAL_CONFIG_DIR must be defined"
#endif

namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / name;
}

int run_cli(const std::string& args, const fs::path& stdout_file,
            const fs::path& stderr_file) {
    const std::string cmd = std::string(DAL_CLI_PATH) + " " + args + " > " +
                            stdout_file.string() + " 2> " + stderr_file.string();
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

}  // namespace

TEST_CASE("synth runs a small config and writes a CSV", "[cli]") {
    const fs::path cfg = temp_file("dal_cli_synth.cfg");
    write_file(cfg,
               "T = 300\ntrials = 2\nenv.variant = lb\nenv.d = 3\n"
               "env.n_actions = 8\nalgo.policy = linucb\n");
    const fs::path out = temp_file("dal_cli_synth.csv");
    const fs::path o = temp_file("dal_cli_stdout.txt");
    const fs::path e = temp_file("dal_cli_stderr.txt");
    const int rc = run_cli("synth --config " + cfg.string() + " --out " +
                               out.string() + " --parallelism 2",
                           o, e);
    INFO(slurp(e));
    REQUIRE(rc == 0);
    const std::string csv = slurp(out);
    REQUIRE(csv.rfind("t,mean_regret,stderr_regret,mean_reward", 0) == 0);
    REQUIRE(csv.find("\n300,") != std::string::npos);
    REQUIRE(slurp(o).find("wrote") != std::string::npos);
}

TEST_CASE("synth reports a missing config on stderr with exit 1", "[cli][edge]") {
    const fs::path o = temp_file("dal_cli_stdout.txt");
    const fs::path e = temp_file("dal_cli_stderr.txt");
    const int rc = run_cli("synth --config /no/such/file.cfg", o, e);
    REQUIRE(rc == 1);
    const std::string err = slurp(e);
    REQUIRE(err.find("config error") != std::string::npos);
    REQUIRE(err.find("/no/such/file.cfg") != std::string::npos);
}

TEST_CASE("shipped configs parse and produce a covering set", "[cli]") {
    const fs::path o = temp_file("dal_cli_stdout.txt");
    const fs::path e = temp_file("dal_cli_stderr.txt");
    const std::string cfg = std::string(DAL_CONFIG_DIR) + "/ps_lb.cfg";
    const int rc = run_cli("cover --config " + cfg, o, e);
    INFO(slurp(e));
    REQUIRE(rc == 0);
    const std::string out = slurp(o);
    REQUIRE(out.find("actions: 20") != std::string::npos);
    REQUIRE(out.find("cover size: 5") != std::string::npos);
    REQUIRE(out.find("alpha_1:") != std::string::npos);
}

TEST_CASE("detect-demo flags an abrupt shift near the true split", "[cli]") {
    const fs::path data = temp_file("dal_cli_shift.csv");
    std::ostringstream rows;
    for (int i = 0; i < 50; ++i) rows << "0\n";
    for (int i = 0; i < 50; ++i) rows << "1\n";
    write_file(data, rows.str());
    const fs::path o = temp_file("dal_cli_stdout.txt");
    const fs::path e = temp_file("dal_cli_stderr.txt");
    const int rc = run_cli("detect-demo --input " + data.string() +
                               " --family bernoulli --delta-f 0.01",
                           o, e);
    INFO(slurp(e));
    REQUIRE(rc == 0);
    const std::string out = slurp(o);
    REQUIRE(out.find("detection at sample") != std::string::npos);
    REQUIRE(out.find("split 50") != std::string::npos);
}

TEST_CASE("detect-demo stays quiet on a constant stream", "[cli]") {
    const fs::path data = temp_file("dal_cli_flat.csv");
    std::ostringstream rows;
    for (int i = 0; i < 80; ++i) rows << (i % 2) << "\n";  // alternating 0/1
    write_file(data, rows.str());
    const fs::path o = temp_file("dal_cli_stdout.txt");
    const fs::path e = temp_file("dal_cli_stderr.txt");
    const int rc = run_cli("detect-demo --input " + data.string() +
                               " --family bernoulli --delta-f 0.001",
                           o, e);
    REQUIRE(rc == 0);
    REQUIRE(slurp(o).find("no detection in 80 samples") != std::string::npos);
}

TEST_CASE("replay subcommand consumes a matrix file", "[cli][replay]") {
    const fs::path data = temp_file("dal_cli_matrix.csv");
    std::ostringstream rows;
    rows << "2,400\n";
    for (int arm = 0; arm < 2; ++arm) {
        for (int t = 0; t < 400; ++t) {
            double m = (arm == 0) ? (t < 200 ? 0.8 : 0.2) : (t < 200 ? 0.2 : 0.8);
            rows << m << (t + 1 < 400 ? "," : "\n");
        }
    }
    write_file(data, rows.str());
    const fs::path out = temp_file("dal_cli_replay.csv");
    const fs::path o = temp_file("dal_cli_stdout.txt");
    const fs::path e = temp_file("dal_cli_stderr.txt");
    const int rc = run_cli("replay --file " + data.string() +
                               " --format matrix --policy ucb1 --out " + out.string(),
                           o, e);
    INFO(slurp(e));
    REQUIRE(rc == 0);
    const std::string csv = slurp(out);
    REQUIRE(csv.rfind("t,", 0) == 0);
    REQUIRE(csv.find("\n400,") != std::string::npos);
}

TEST_CASE("usage errors exit nonzero and help exits zero", "[cli][edge]") {
    const fs::path o = temp_file("dal_cli_stdout.txt");
    const fs::path e = temp_file("dal_cli_stderr.txt");
    REQUIRE(run_cli("", o, e) != 0);               // subcommand required
    REQUIRE(run_cli("frobnicate", o, e) != 0);     // unknown subcommand
    REQUIRE(run_cli("--help", o, e) == 0);
    REQUIRE(slurp(o).find("synth") != std::string::npos);
}
