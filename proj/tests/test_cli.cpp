#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "qram/program.hpp"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunResult run(const std::string& args) {
    const std::string out_path = "/tmp/qram_cli_test_out.txt";
    const std::string cmd = std::string(QRAM_CLI_PATH) + " " + args + " > " + out_path + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    return r;
}

}  // namespace

TEST_CASE("compile emits loadable JSON and exits 0") {
    auto r = run("compile --protocol parallel --n 4 --k 3 --scheme qutrit");
    CHECK(r.exit_code == 0);
    qram::Program p = qram::program_from_json(r.out);
    CHECK(p.protocol == "parallel");
    CHECK(p.spec.n == 4);
    CHECK(qram::validate(p).empty());
    CHECK(qram::step_report(p).address_setting == 11);
}

TEST_CASE("ragged high-bandwidth batching exits 2") {
    auto r = run("compile --protocol hb-parallel --n 4 --k 8 --c 3");
    CHECK(r.exit_code == 2);
}

TEST_CASE("unknown flags exit 2") {
    auto r = run("compile --bogus 3");
    CHECK(r.exit_code == 2);
}

TEST_CASE("verify passes a sound program and fails a corrupted one") {
    auto c = run("compile --protocol parallel --n 2 --k 1 --scheme qutrit");
    REQUIRE(c.exit_code == 0);
    {
        std::ofstream f("/tmp/qram_cli_prog.json", std::ios::binary);
        f << c.out;
    }
    CHECK(run("verify --n 2 --k 1 --program /tmp/qram_cli_prog.json").exit_code == 0);

    // delete one routing op: the query must no longer implement the XOR map
    qram::Program p = qram::program_from_json(c.out);
    for (auto& step : p.steps) {
        auto it = std::find_if(step.ops.begin(), step.ops.end(), [](const qram::LayeredOp& op) {
            return op.type == qram::OpType::Routing;
        });
        if (it != step.ops.end()) {
            step.ops.erase(it);
            break;
        }
    }
    {
        std::ofstream f("/tmp/qram_cli_bad.json", std::ios::binary);
        f << qram::program_to_json(p);
    }
    CHECK(run("verify --n 2 --k 1 --program /tmp/qram_cli_bad.json").exit_code == 1);
}

TEST_CASE("identical seeds give byte-identical sweep CSV; schema is stable") {
    const std::string args =
        "sweep --protocol parallel --scheme qutrit --n 2 --n-max 3 --k 1 --k-max 2 "
        "--gamma 1e-3 --p 1e-3 --trajectories 200 --seed 11 --threads 2";
    auto a = run(args);
    auto b = run(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    std::istringstream ss(a.out);
    std::string header;
    std::getline(ss, header);
    CHECK(header ==
          "n,k,scheme,protocol,c,m,gamma,p,trajectories,seed,fidelity_mean,fidelity_stderr,"
          "lambda_mean,steps_total,error");
    int rows = 0;
    for (std::string line; std::getline(ss, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 4);
}

TEST_CASE("silent sweep reports unit fidelity with zero error") {
    auto r = run("simulate --protocol parallel --scheme qutrit --n 2 --k 2 "
                 "--gamma 0 --p 0 --trajectories 100 --seed 3");
    CHECK(r.exit_code == 0);
    std::istringstream ss(r.out);
    std::string header, row;
    std::getline(ss, header);
    std::getline(ss, row);
    CHECK(row.find(",1,0,") != std::string::npos);  // fidelity_mean=1, stderr=0
}

TEST_CASE("fit recovers synthetic coefficients from a CSV") {
    // build a synthetic sweep CSV with 1-F = A (C n^2 + n k) eps exactly
    const double A = 0.75, C = 2.0, eps = 2e-5;
    std::ofstream f("/tmp/qram_cli_fit.csv", std::ios::binary);
    f << "n,k,scheme,protocol,c,m,gamma,p,trajectories,seed,fidelity_mean,fidelity_stderr,"
         "lambda_mean,steps_total,error\n";
    char buf[256];
    for (int n = 3; n <= 6; ++n)
        for (int k = 3; k <= 6; ++k) {
            const double fid = 1.0 - A * (C * n * n + double(n) * k) * eps;
            std::snprintf(buf, sizeof(buf), "%d,%d,qutrit,parallel,1,0,1e-05,1e-05,100,7,%.17g,0,1,0,\n",
                          n, k, fid);
            f << buf;
        }
    f.close();
    auto r = run("fit --input /tmp/qram_cli_fit.csv");
    CHECK(r.exit_code == 0);
    double a = 0, c = 0, r2 = 0;
    CHECK(std::sscanf(r.out.c_str(), "{\"A\": %lf, \"C\": %lf, \"r_squared\": %lf", &a, &c, &r2) ==
          3);
    CHECK(std::abs(a - A) < 1e-6);
    CHECK(std::abs(c - C) < 1e-6);
    CHECK(r2 == doctest::Approx(1.0));
}

TEST_CASE("fit of an empty CSV exits 1") {
    std::ofstream("/tmp/qram_cli_empty.csv") << "";
    CHECK(run("fit --input /tmp/qram_cli_empty.csv").exit_code == 1);
}

TEST_CASE("cost prints the closed forms and hybrid baselines") {
    auto r = run("cost --n 32 --k 32");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("parallel") != std::string::npos);
    CHECK(r.out.find("4096") != std::string::npos);
    CHECK(r.out.find("1048576") != std::string::npos);
    auto rm = run("cost --n 8 --k 8 --m 3");
    CHECK(rm.out.find("hybrid-parallel") != std::string::npos);
    CHECK(rm.out.find("72") != std::string::npos);  // 2^m k + n
}

TEST_CASE("compile output is byte-stable under repetition") {
    auto a = run("compile --protocol hybrid-parallel --n 2 --k 2 --m 1 --scheme qubit");
    auto b = run("compile --protocol hybrid-parallel --n 2 --k 2 --m 1 --scheme qubit");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
}
