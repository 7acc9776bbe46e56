#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "dvbx/checks.hpp"
#include "dvbx/error.hpp"
#include "dvbx/reports.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitInputError = 2;

dvbx::Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw dvbx::Error(dvbx::ErrorCode::ConfigError, "cannot open " + path);
    try {
        return dvbx::Json::parse(in);
    } catch (const std::exception& e) {
        throw dvbx::Error(dvbx::ErrorCode::ParseError, path + ": " + e.what());
    }
}

void emit(const dvbx::Json& report, const std::string& path) {
    std::string text = report.dump(2);
    text += "\n";
    if (path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw dvbx::Error(dvbx::ErrorCode::ConfigError, "cannot write " + path);
        out << text;
    }
}

int classify(const dvbx::Error& err) {
    switch (err.code()) {
        case dvbx::ErrorCode::ParseError:
        case dvbx::ErrorCode::ConfigError:
        case dvbx::ErrorCode::MissingAssignment:
            return kExitInputError;
        default:
            return kExitPropertyFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"difference variational bicomplex toolkit"};
    app.require_subcommand(1);

    // check
    auto* check = app.add_subcommand("check", "run the exact identity battery on random forms");
    std::uint64_t seed = 1;
    int sizes = 100;
    std::string json_out, inject;
    check->add_option("--seed", seed, "RNG seed");
    check->add_option("--sizes", sizes, "random samples per identity slot");
    check->add_option("--json", json_out, "write the JSON report to this path");
    check->add_option("--inject-bug", inject,
                      "self-test: deliberately break an operator (dv-sign)");

    // symbolic commands
    std::string spec_path;
    auto add_spec_cmd = [&](const char* name, const char* desc) {
        auto* cmd = app.add_subcommand(name, desc);
        cmd->add_option("--spec", spec_path, "problem spec (JSON)")->required();
        cmd->add_option("--json", json_out, "write the JSON report to this path");
        return cmd;
    };
    auto* el = add_spec_cmd("el", "Euler-Lagrange equations of a Lagrangian");
    auto* noe = add_spec_cmd("noether", "conservation law from a variational symmetry");
    auto* inv = add_spec_cmd("inverse", "inverse variational problem for a source form");
    auto* ms = add_spec_cmd("ms", "multisymplectic analysis of a degenerate Lagrangian");
    auto* mom = add_spec_cmd("momentum", "multimomentum map for a characteristic");

    // integrate
    auto* integ = app.add_subcommand("integrate", "run a configured numerical scheme");
    std::string config_path, csv_out;
    integ->add_option("--config", config_path, "run configuration (JSON)")->required();
    integ->add_option("--csv", csv_out, "write the per-step CSV to this path");
    integ->add_option("--json", json_out, "write the run manifest to this path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) {
            dvbx::CheckOptions opt;
            opt.seed = seed;
            opt.cases = sizes;
            if (inject == "dv-sign") {
                opt.inject = dvbx::CheckOptions::Inject::DvSign;
            } else if (!inject.empty()) {
                std::cerr << "unknown bug injection '" << inject << "'\n";
                return kExitInputError;
            }
            auto outcomes = dvbx::run_identity_battery(opt);
            dvbx::Json cfg;
            cfg["seed"] = opt.seed;
            cfg["sizes"] = opt.cases;
            dvbx::Json report = dvbx::report_header("check", cfg, opt.seed);
            report.update(dvbx::check_report(outcomes, opt));
            emit(report, json_out);
            return dvbx::all_passed(outcomes) ? kExitOk : kExitPropertyFailure;
        }

        if (integ->parsed()) {
            dvbx::Json config = read_json_file(config_path);
            dvbx::IntegrateResult result = dvbx::run_integration(config);
            if (!csv_out.empty()) {
                std::ofstream out(csv_out, std::ios::binary);
                if (!out) throw dvbx::Error(dvbx::ErrorCode::ConfigError, "cannot write " + csv_out);
                out << result.csv;
            }
            emit(result.manifest, json_out);
            return result.thresholds_met ? kExitOk : kExitPropertyFailure;
        }

        dvbx::Json spec = read_json_file(spec_path);
        dvbx::ProblemSpec problem = dvbx::load_problem(spec);
        dvbx::Json report = dvbx::report_header(app.get_subcommands().front()->get_name(), spec, 0);
        bool property_ok = true;
        if (el->parsed()) {
            report.update(dvbx::el_report(problem));
        } else if (noe->parsed()) {
            report.update(dvbx::noether_report(problem));
            property_ok = report.at("verified").get<bool>();
        } else if (inv->parsed()) {
            report.update(dvbx::inverse_report(problem));
            property_ok = report.at("variational").get<bool>();
        } else if (ms->parsed()) {
            report.update(dvbx::ms_report(problem));
            property_ok = report.at("structural_residual").get<std::string>() == "0";
        } else if (mom->parsed()) {
            report.update(dvbx::momentum_report(problem));
            property_ok = report.at("flags").at("is_conservation_law").get<bool>();
        }
        emit(report, json_out);
        return property_ok ? kExitOk : kExitPropertyFailure;
    } catch (const dvbx::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return classify(err);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitInputError;
    }
}
