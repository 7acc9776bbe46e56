#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run_cli(const std::string& args) {
    std::string cmd = std::string(DVBX_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CommandResult result;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof(buf), pipe)) result.output.append(buf, n);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string fixture(const std::string& name) {
    return std::string(DVBX_FIXTURES_DIR) + "/" + name;
}

std::string temp_file(const std::string& name, const std::string& content) {
    std::string path = std::string("/tmp/dvbx_test_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

nlohmann::json parse_output(const std::string& text) { return nlohmann::json::parse(text); }

}  // namespace

TEST_CASE("el on the Laplace fixture prints the five-point equation") {
    auto r = run_cli("el --spec " + fixture("laplace.json"));
    CHECK(r.exit_code == 0);
    auto j = parse_output(r.output);
    CHECK(j["euler_lagrange"][0] ==
          "u[-1,0] + u[0,-1] - 4*u[0,0] + u[0,1] + u[1,0]");
}

TEST_CASE("ms on the three-field fixture reproduces the displays") {
    auto r = run_cli("ms --spec " + fixture("example53.json"));
    CHECK(r.exit_code == 0);
    auto j = parse_output(r.output);
    CHECK(j["el"][0] == "u2[0,0] - u3[-1,0] + u3[0,-1]");
    CHECK(j["el"][1] == "u1[0,0] + u2[0,0]^(-1)*C + u3[0,0]");
    CHECK(j["el"][2] == "u1[0,1] - u1[1,0] + u2[0,0]");
    CHECK(j["structural_residual"] == "0");
}

TEST_CASE("ms with a characteristic reports the multimomentum map") {
    auto r = run_cli("ms --spec " + fixture("laplace.json"));
    CHECK(r.exit_code == 0);
    auto j = parse_output(r.output);
    CHECK(j["multimomentum"]["flags"]["is_conservation_law"] == true);
    CHECK(j["multimomentum"]["components"][0] == "-u[-1,0] + u[0,0]");
}

TEST_CASE("momentum on the Laplace fixture carries both flags") {
    auto r = run_cli("momentum --spec " + fixture("laplace.json"));
    CHECK(r.exit_code == 0);
    auto j = parse_output(r.output);
    CHECK(j["flags"]["is_momentum_map"] == true);
    CHECK(j["flags"]["is_conservation_law"] == true);
    CHECK(j["local_residual"] == "0");
}

TEST_CASE("noether on the Laplace fixture verifies the law") {
    auto r = run_cli("noether --spec " + fixture("laplace.json"));
    CHECK(r.exit_code == 0);
    auto j = parse_output(r.output);
    CHECK(j["verified"] == true);
    CHECK(j["residual"] == "0");
}

TEST_CASE("inverse distinguishes variational from non-variational input") {
    std::string good = temp_file("inverse_ok.json", R"json({
        "space": {"p": 1, "vars": ["u"]},
        "source": ["-(u[1] - 2*u[0] + u[-1])"]
    })json");
    auto r = run_cli("inverse --spec " + good);
    CHECK(r.exit_code == 0);
    CHECK(parse_output(r.output)["variational"] == true);

    std::string bad = temp_file("inverse_bad.json", R"json({
        "space": {"p": 1, "vars": ["u"]},
        "source": ["u[1]"]
    })json");
    auto rb = run_cli("inverse --spec " + bad);
    CHECK(rb.exit_code == 1);
    CHECK(parse_output(rb.output)["variational"] == false);
}

TEST_CASE("malformed expressions exit with the input-error code") {
    std::string broken = temp_file("broken.json", R"json({
        "space": {"p": 1, "vars": ["u"]},
        "lagrangian": "u[0 + "
    })json");
    auto r = run_cli("el --spec " + broken);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("parse error") != std::string::npos);
}

TEST_CASE("check battery passes and is byte-reproducible") {
    std::string out1 = "/tmp/dvbx_check_a.json";
    std::string out2 = "/tmp/dvbx_check_b.json";
    auto r1 = run_cli("check --seed 42 --sizes 3 --json " + out1);
    CHECK(r1.exit_code == 0);
    auto r2 = run_cli("check --seed 42 --sizes 3 --json " + out2);
    CHECK(r2.exit_code == 0);
    std::ifstream a(out1), b(out2);
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    CHECK(!sa.empty());
}

TEST_CASE("an injected sign bug is caught with a counterexample") {
    auto r = run_cli("check --seed 42 --sizes 3 --inject-bug dv-sign");
    CHECK(r.exit_code == 1);
    auto j = parse_output(r.output);
    CHECK(j["all_passed"] == false);
    bool found = false;
    for (const auto& identity : j["identities"])
        if (identity["pass"] == false && identity.contains("counterexample")) found = true;
    CHECK(found);
}

TEST_CASE("integrate runs the mechanics fixture within thresholds") {
    std::string csv = "/tmp/dvbx_euler_b.csv";
    auto r = run_cli("integrate --config " + fixture("integrate_euler_b.json") + " --csv " + csv);
    CHECK(r.exit_code == 0);
    auto j = parse_output(r.output);
    CHECK(j["thresholds_met"] == true);
    CHECK(j["summary"]["max_omega_drift"].get<double>() <= 1e-10);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "step,time,max_scheme_residual,ms_residual_max,ms_residual_l2,omega_drift");
}

TEST_CASE("integrate rejects empty meshes") {
    std::string cfg = temp_file("bad_mesh.json", R"json({
        "scheme": "stormer-verlet-wave",
        "mesh": {"nx": 8, "hx": 0.3, "nt": 0, "ht": 0.1}
    })json");
    auto r = run_cli("integrate --config " + cfg);
    CHECK(r.exit_code == 2);
}
