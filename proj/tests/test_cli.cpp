#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks of the command-line front end: exit codes, file layout,
// and byte-reproducible reruns.

namespace {

const std::string cli = TWISTLAB_CLI_PATH;
const std::string tmp = TWISTLAB_TEST_TMP;

int run(const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool exists(const std::string& path) { return std::ifstream(path).good(); }

}  // namespace

TEST_CASE("solve: exit codes for success, threshold refusal, bad flags") {
    const std::string out = tmp + "/solve_ok";
    CHECK(run("solve --lambda 0.25 --kappa 0.2 --alpha1 0.38 --n 1024 --out " + out) == 0);
    CHECK(exists(out + "/graph.csv"));
    CHECK(exists(out + "/report.json"));
    CHECK(exists(out + "/manifest.json"));
    const std::string report = slurp(out + "/report.json");
    CHECK(report.find("\"converged\": true") != std::string::npos);
    CHECK(report.find("\"lip_cert\"") != std::string::npos);
    CHECK(report.find("\"rho\"") != std::string::npos);

    CHECK(run("solve --lambda 0.25 --kappa 1.2 --n 512 --out " + tmp + "/solve_thr") == 2);
    CHECK(run("solve --no-such-flag") == 64);
    CHECK(run("") == 64);
}

TEST_CASE("solve rejects a kick file with nonzero mean") {
    const std::string phi = tmp + "/phi_bad.csv";
    {
        std::ofstream f(phi, std::ios::binary);
        f << "x,value\n";
        for (int i = 0; i < 64; ++i) f << i / 64.0 << "," << 0.01 << "\n";
    }
    CHECK(run("solve --lambda 0.25 --phi-file " + phi + " --n 64 --out " + tmp + "/solve_bad") == 64);
}

TEST_CASE("rerun reproduces outputs byte for byte") {
    const std::string out1 = tmp + "/det_a";
    REQUIRE(run("solve --lambda 0.25 --kappa 0.2 --alpha1 0.38 --n 512 --out " + out1) == 0);
    const std::string graph1 = slurp(out1 + "/graph.csv");
    const std::string report1 = slurp(out1 + "/report.json");

    // Replaying the manifest overwrites the same directory; outputs must not
    // change, and a different worker-pool width must not matter either.
    REQUIRE(std::system(("TWISTLAB_THREADS=1 " + cli + " rerun " + out1 +
                         "/manifest.json >/dev/null 2>/dev/null")
                            .c_str()) == 0);
    CHECK(slurp(out1 + "/graph.csv") == graph1);
    CHECK(slurp(out1 + "/report.json") == report1);
}

TEST_CASE("rotnum and tune emit their summaries") {
    const std::string out = tmp + "/rot";
    CHECK(run("rotnum --lambda 0.5 --kappa 0 --alpha1 0.3 --alpha2 0.15 --n 256 --n-iter 10000 "
              "--out " + out) == 0);
    const auto rot = nlohmann::json::parse(slurp(out + "/rotnum.json"));
    CHECK(rot.at("rho").get<double>() == doctest::Approx(0.45).epsilon(1e-6));

    const std::string tout = tmp + "/tune";
    CHECK(run("tune --omega 0.45 --vary alpha1 --lambda 0.5 --kappa 0 --alpha2 0.15 --n 256 "
              "--n-iter 20000 --tune-tol 1e-7 --out " + tout) == 0);
    const auto tune = nlohmann::json::parse(slurp(tout + "/tune.json"));
    CHECK(tune.at("parameter").get<std::string>() == "alpha1");
    CHECK(tune.at("target").get<double>() == doctest::Approx(0.45));
    CHECK(tune.at("value").get<double>() == doctest::Approx(0.3).epsilon(1e-5));
}

TEST_CASE("sweep writes the atlas, curves and gap report") {
    const std::string out = tmp + "/sweep";
    CHECK(run("sweep --lambdas 0.25 --kappa-range 0.0:0.6:4 --n 256 --max-iter 200 --out " + out) ==
          0);
    CHECK(exists(out + "/atlas.csv"));
    CHECK(exists(out + "/curves.csv"));
    const std::string report = slurp(out + "/report.json");
    CHECK(report.find("no_false_breakdown") != std::string::npos);
    CHECK(report.find("0.861") != std::string::npos);
}

TEST_CASE("config file supplies defaults, flags override") {
    const std::string cfgfile = tmp + "/solve.cfg";
    {
        std::ofstream f(cfgfile, std::ios::binary);
        f << "lambda=0.25\nkappa=0.2\nn=256\nout=" << tmp << "/cfg_run\n";
    }
    CHECK(run("solve --config " + cfgfile) == 0);
    CHECK(exists(tmp + "/cfg_run/report.json"));
}

TEST_CASE("denjoy subcommand emits the full artifact directory") {
    const std::string out = tmp + "/denjoy";
    CHECK(run("denjoy --lambda 0.25 --N 200 --K 40 --grid 1024 --out " + out) == 0);
    for (const char* f : {"g.csv", "h.csv", "psi.csv", "phi.csv", "graph.csv", "report.json"}) {
        CHECK(exists(out + "/" + f));
    }
    const std::string report = slurp(out + "/report.json");
    CHECK(report.find("lip_pass") != std::string::npos);
    CHECK(report.find("invariance_exact") != std::string::npos);
}

TEST_CASE("arnold subcommand: residual and plateau table") {
    const std::string out = tmp + "/arnold";
    CHECK(run("arnold --n 40 --lambda 0.25 --scan -0.05,0.05,41 --out " + out) == 0);
    CHECK(exists(out + "/plateaus.csv"));
    const std::string report = slurp(out + "/arnold.json");
    CHECK(report.find("functional_residual") != std::string::npos);
}
