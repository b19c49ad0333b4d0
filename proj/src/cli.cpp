#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "starklab/fisher.hpp"
#include "starklab/lab.hpp"
#include "starklab/observables.hpp"

namespace starklab::lab {

namespace {

using nlohmann::json;

struct SpecFlags {
    int L = 2;
    double V = 0.0;
    double h = 0.0;
    double phi = 0.0;
    std::string spec_file;
    std::string probe = "single";
    int n_f = 0;
};

void add_spec_flags(CLI::App* cmd, SpecFlags& flags) {
    cmd->set_help_flag("--help", "print help");  // frees --h for the field strength
    auto* L = cmd->add_option("--L", flags.L, "system size (sites)");
    auto* V = cmd->add_option("--V", flags.V, "quasiperiodic amplitude (hopping units)");
    auto* h = cmd->add_option("--h", flags.h, "gradient strength");
    auto* phi = cmd->add_option("--phi", flags.phi, "phase offset in [0,1)");
    auto* file = cmd->add_option("--spec", flags.spec_file,
                                 "flat key-value spec file (L, V, h, omega_num, omega_den, phi)");
    file->excludes(L)->excludes(V)->excludes(h)->excludes(phi);
    cmd->add_option("--probe", flags.probe, "probe family: single | half_filled")
        ->check(CLI::IsMember({"single", "half_filled"}));
    cmd->add_option("--nf", flags.n_f, "particle count for the half-filled probe");
}

model::LatticeSpec spec_from_flags(const SpecFlags& flags, bool have_L) {
    if (flags.spec_file.empty() && !have_L)
        throw std::invalid_argument("give a lattice via --L ... or --spec FILE");
    if (flags.spec_file.empty()) return model::make_spec(flags.L, flags.V, flags.h, flags.phi);
    std::ifstream in(flags.spec_file);
    if (!in) throw std::invalid_argument("cannot open spec file: " + flags.spec_file);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            if (b == std::string::npos) return std::string();
            auto e = s.find_last_not_of(" \t");
            return s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return model::lattice_spec_from_key_values(kv);
}

probes::ProbeKind kind_from_flags(const SpecFlags& flags, int L) {
    if (flags.probe == "single") {
        if (flags.n_f != 0)
            throw std::invalid_argument("--nf only applies to --probe half_filled");
        return probes::probe_single();
    }
    return probes::probe_half_filled(flags.n_f > 0 ? flags.n_f
                                                   : probes::default_half_filling(L));
}

json spec_json(const model::LatticeSpec& spec) {
    return json{{"L", spec.L},           {"V", spec.V},
                {"h", spec.h},           {"omega_num", spec.omega.num},
                {"omega_den", spec.omega.den}, {"phi", spec.phi}};
}

int cmd_qfi(const SpecFlags& flags, bool have_L, std::optional<double> fixed_delta) {
    auto spec = spec_from_flags(flags, have_L);
    auto kind = kind_from_flags(flags, spec.L);
    fisher::StepPolicy policy;
    policy.fixed_delta_h = fixed_delta;
    auto est = fisher::qfi(spec, kind, policy);
    json out = {
        {"spec", spec_json(spec)},
        {"probe", flags.probe},
        {"n_f", kind.kind == probes::ProbeKind::Kind::half_filled ? kind.n_f : 0},
        {"value", est.value},
        {"delta_h", est.delta_h},
        {"one_minus_f", est.one_minus_f},
        {"converged", est.converged},
        {"degenerate", est.degenerate},
    };
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_ofi(const SpecFlags& flags, bool have_L, const std::string& observable,
            std::optional<double> fixed_delta) {
    auto spec = spec_from_flags(flags, have_L);
    auto kind = kind_from_flags(flags, spec.L);
    auto obs = observable == "cdw" ? observables::cdw_observable(spec.L)
                                   : observables::position_observable(spec.L);
    fisher::StepPolicy policy;
    policy.fixed_delta_h = fixed_delta;
    auto est = observables::ofi(spec, kind, obs, policy);
    json out = {
        {"spec", spec_json(spec)},
        {"probe", flags.probe},
        {"n_f", kind.kind == probes::ProbeKind::Kind::half_filled ? kind.n_f : 0},
        {"observable", obs.label},
        {"value", est.value},
        {"delta_h", est.delta_h},
        {"mean", est.mean},
        {"variance", est.variance},
        {"slope", est.slope},
        {"converged", est.converged},
        {"degenerate", est.degenerate},
    };
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& output_path) {
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot open config file: " + config_path);
    auto config = parse_sweep_config(in);
    auto records = run_sweep(config);
    std::string csv = to_csv(records);
    if (output_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(output_path, std::ios::binary);
        if (!out) throw std::invalid_argument("cannot open output file: " + output_path);
        out << csv;
    }
    return 0;
}

int cmd_fit(const std::string& input_path, const std::string& quantity,
            std::optional<double> h_filter) {
    std::ifstream in(input_path);
    if (!in) throw std::invalid_argument("cannot open input file: " + input_path);
    auto records = records_from_csv(in);

    std::string selected = quantity;
    if (selected.empty()) {
        for (const auto& r : records) {
            if (selected.empty()) selected = r.quantity;
            if (r.quantity != selected)
                throw std::invalid_argument(
                    "input holds several quantities; select one with --quantity");
        }
    }
    std::vector<std::pair<double, double>> points;
    std::optional<double> h_seen;
    for (const auto& r : records) {
        if (r.quantity != selected) continue;
        if (h_filter && r.h != *h_filter) continue;
        if (!h_filter) {
            if (h_seen && r.h != *h_seen)
                throw std::invalid_argument("input holds several h values; select one with --h");
            h_seen = r.h;
        }
        points.emplace_back(static_cast<double>(r.L), r.mean);
    }
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i].first == points[j].first)
                throw std::invalid_argument("several records share one L after filtering");
    auto fit = fit_power_law(points);
    json out = {{"quantity", selected},
                {"beta", fit.beta},
                {"log_prefactor", fit.log_prefactor},
                {"r_squared", fit.r_squared},
                {"points", fit.points}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Fisher-information laboratory for weak-gradient sensing on a "
                 "quasiperiodic lattice"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    SpecFlags qfi_flags, ofi_flags;
    double qfi_delta = 0.0, ofi_delta = 0.0;
    std::string observable = "cdw";
    std::string config_path, output_path, fit_input, fit_quantity;
    double fit_h = 0.0;

    auto* qfi_cmd = app.add_subcommand("qfi", "quantum Fisher information of one spec");
    add_spec_flags(qfi_cmd, qfi_flags);
    auto* qfi_delta_opt = qfi_cmd->add_option("--delta-h", qfi_delta,
                                              "fixed finite-difference step (default adaptive)");

    auto* ofi_cmd = app.add_subcommand("ofi", "operator Fisher information of one spec");
    add_spec_flags(ofi_cmd, ofi_flags);
    ofi_cmd->add_option("--observable", observable, "cdw | position")
        ->required()
        ->check(CLI::IsMember({"cdw", "position"}));
    auto* ofi_delta_opt = ofi_cmd->add_option("--delta-h", ofi_delta,
                                              "fixed finite-difference step (default adaptive)");

    auto* sweep_cmd = app.add_subcommand("sweep", "phase-averaged sweep from a config file");
    sweep_cmd->add_option("--config", config_path, "flat key = value sweep config")->required();
    sweep_cmd->add_option("--output", output_path, "CSV path (stdout when omitted)");

    auto* fit_cmd = app.add_subcommand("fit", "power-law scaling fit of a sweep CSV");
    fit_cmd->set_help_flag("--help", "print help");
    fit_cmd->add_option("--input", fit_input, "sweep CSV")->required();
    fit_cmd->add_option("--quantity", fit_quantity, "quantity label to fit");
    auto* fit_h_opt = fit_cmd->add_option("--h", fit_h, "restrict to one h value");

    auto* validate_cmd =
        app.add_subcommand("validate", "run the oracle-equivalence and invariant suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (qfi_cmd->parsed())
            return cmd_qfi(qfi_flags, qfi_cmd->count("--L") > 0,
                           qfi_delta_opt->count() ? std::optional(qfi_delta) : std::nullopt);
        if (ofi_cmd->parsed())
            return cmd_ofi(ofi_flags, ofi_cmd->count("--L") > 0, observable,
                           ofi_delta_opt->count() ? std::optional(ofi_delta) : std::nullopt);
        if (sweep_cmd->parsed()) return cmd_sweep(config_path, output_path);
        if (fit_cmd->parsed())
            return cmd_fit(fit_input, fit_quantity,
                           fit_h_opt->count() ? std::optional(fit_h) : std::nullopt);
        if (validate_cmd->parsed()) return run_validation(std::cout).ok() ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace starklab::lab
