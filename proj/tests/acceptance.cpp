// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Sweeps reuse the library exactly as the CLI does; nothing here bypasses
// the public interfaces except the per-sample log used for the bound checks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "starklab/fisher.hpp"
#include "starklab/lab.hpp"
#include "starklab/observables.hpp"
#include "starklab/oracle.hpp"
#include "starklab/probes.hpp"

using namespace starklab;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s %s: %s\n", pass ? "[PASS]" : "[FAIL]", name.c_str(), detail.c_str());
    if (!pass) ++g_failures;
}

void info(const std::string& line) { std::printf("       %s\n", line.c_str()); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

lab::ScalingFit fit_quantity(const std::vector<lab::SweepRecord>& records,
                             const std::string& quantity) {
    std::vector<std::pair<double, double>> points;
    for (const auto& r : records)
        if (r.quantity == quantity) points.emplace_back(r.L, r.mean);
    return lab::fit_power_law(points);
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), format, a, b, c);
    return buf;
}

// worst OFI/QFI ratio over converged (L, h, sample) grid points of one sweep
double worst_bound_ratio(const std::vector<lab::SampleValue>& log, int& compared) {
    struct Key {
        int L;
        double h;
        int k;
        bool operator<(const Key& o) const {
            if (L != o.L) return L < o.L;
            if (h != o.h) return h < o.h;
            return k < o.k;
        }
    };
    std::map<Key, double> qfi;
    for (const auto& s : log)
        if (s.quantity == lab::Quantity::qfi && s.converged && !s.degenerate)
            qfi[{s.L, s.h, s.sample}] = s.value;
    double worst = 0.0;
    compared = 0;
    for (const auto& s : log) {
        if (s.quantity == lab::Quantity::qfi || !s.converged || s.degenerate) continue;
        auto it = qfi.find({s.L, s.h, s.sample});
        if (it == qfi.end()) continue;
        worst = std::max(worst, s.value / it->second);
        ++compared;
    }
    return worst;
}

}  // namespace

int main() {
    const std::vector<int> single_sizes = {21, 34, 55, 89, 144, 233};

    // --- shared sweeps -----------------------------------------------------
    auto t0 = std::chrono::steady_clock::now();
    lab::SweepConfig critical;  // criteria 1, 3, 5, 9
    critical.sizes = single_sizes;
    critical.V = 2.0;
    critical.h_grid = {1e-9};
    critical.observables = {lab::Quantity::qfi, lab::Quantity::ofi_cdw, lab::Quantity::ofi_h2};
    critical.phase_samples = 200;
    critical.seed = 1;
    std::vector<lab::SampleValue> critical_log;
    auto critical_records = lab::run_sweep(critical, 0, &critical_log);
    const double critical_elapsed = seconds_since(t0);

    lab::SweepConfig stark = critical;  // criterion 2
    stark.V = 0.0;
    stark.observables = {lab::Quantity::qfi};
    auto stark_records = lab::run_sweep(stark);

    lab::SweepConfig half;  // criteria 4, 5
    half.sizes = {21, 55, 89, 233};
    half.V = 2.0;
    half.h_grid = {1e-9};
    half.probe = lab::ProbeFamily::half_filled;
    // reference filling list of the scaling runs; the library default (L-1)/2
    // differs at L=55 and its fit is printed below for comparison
    half.fillings = {{21, 10}, {55, 28}, {89, 44}, {233, 116}};
    half.observables = {lab::Quantity::qfi, lab::Quantity::ofi_h2};
    half.phase_samples = 1;
    half.phi_fixed = 0.0;
    half.seed = 1;
    t0 = std::chrono::steady_clock::now();
    std::vector<lab::SampleValue> half_log;
    auto half_records = lab::run_sweep(half, 0, &half_log);
    const double half_elapsed = seconds_since(t0);

    lab::SweepConfig half_default = half;
    half_default.fillings.clear();
    auto half_default_records = lab::run_sweep(half_default);

    // --- criterion 1: QFI scaling at AAH criticality ------------------------
    auto qfi_fit = fit_quantity(critical_records, "qfi");
    report("criterion 1 (critical QFI scaling)",
           qfi_fit.beta >= 6.2 && qfi_fit.beta <= 7.2 && qfi_fit.r_squared >= 0.98,
           fmt("beta=%.3f in [6.2,7.2], r^2=%.4f >= 0.98", qfi_fit.beta, qfi_fit.r_squared));
    info(fmt("sweep: 6 sizes x 200 samples in %.1f s", critical_elapsed));

    // --- criterion 2: pure-Stark QFI scaling --------------------------------
    auto stark_fit = fit_quantity(stark_records, "qfi");
    report("criterion 2 (pure-Stark QFI scaling)",
           stark_fit.beta >= 5.4 && stark_fit.beta <= 6.4,
           fmt("beta=%.3f in [5.4,6.4]", stark_fit.beta));

    // --- criterion 3: observable scaling ------------------------------------
    auto cdw_fit = fit_quantity(critical_records, "ofi_cdw");
    auto pos_fit = fit_quantity(critical_records, "ofi_h2");
    report("criterion 3 (CDW and position OFI scaling)",
           cdw_fit.beta >= 5.7 && cdw_fit.beta <= 6.7 &&
               std::abs(pos_fit.beta - qfi_fit.beta) <= 0.5,
           fmt("cdw beta=%.3f in [5.7,6.7]; position beta=%.3f within 0.5 of QFI", cdw_fit.beta,
               pos_fit.beta));

    // --- criterion 4: half-filled scaling ------------------------------------
    auto half_qfi = fit_quantity(half_records, "qfi");
    auto half_pos = fit_quantity(half_records, "ofi_h2");
    report("criterion 4 (half-filled QFI and OFI scaling)",
           half_qfi.beta >= 6.0 && half_qfi.beta <= 7.2 && half_pos.beta >= 6.0 &&
               half_pos.beta <= 7.2 && std::abs(half_qfi.beta - half_pos.beta) <= 0.3,
           fmt("QFI beta=%.3f, OFI beta=%.3f in [6.0,7.2], |diff|=%.3f <= 0.3", half_qfi.beta,
               half_pos.beta, std::abs(half_qfi.beta - half_pos.beta)));
    info(fmt("fillings 10/28/44/116; the default (L-1)/2 list gives QFI beta=%.3f; "
             "runtime %.1f s",
             fit_quantity(half_default_records, "qfi").beta, half_elapsed));

    // --- criterion 5: Cramer-Rao bound on every evaluated point -------------
    int compared_a = 0, compared_c = 0;
    double worst_a = worst_bound_ratio(critical_log, compared_a);
    double worst_c = worst_bound_ratio(half_log, compared_c);
    report("criterion 5 (Cramer-Rao bound)",
           worst_a <= 1.0 + 1e-4 && worst_c <= 1.0 + 1e-4 && compared_a == 2400 &&
               compared_c == 4,
           fmt("worst OFI/QFI: single %.6f, half-filled %.6f over all points", worst_a,
               worst_c));
    info(fmt("compared %.0f single-particle and %.0f half-filled pairs",
             static_cast<double>(compared_a), static_cast<double>(compared_c)));

    // --- criterion 6: oracle equivalence -------------------------------------
    t0 = std::chrono::steady_clock::now();
    double worst_fid = 0.0, worst_var = 0.0, worst_qfi_rel = 0.0;
    int unconverged = 0;
    for (int L = 2; L <= 8; ++L) {
        for (double V : {0.0, 2.0}) {
            for (double h : {1e-3, 1e-1}) {
                for (double phi : {0.0, 0.37}) {
                    auto spec = model::make_spec(L, V, h, phi);
                    for (int n_f = 1; n_f <= std::min(4, L); ++n_f) {
                        worst_fid = std::max(
                            worst_fid, std::abs(fisher::fidelity_slater(spec, n_f, 1e-3).value -
                                                oracle::fock_fidelity(spec, n_f, 1e-3)));
                        auto probe = probes::slater_probe(spec, n_f);
                        for (const auto& obs : {observables::cdw_observable(L),
                                                observables::position_observable(L)})
                            worst_var = std::max(
                                worst_var, std::abs(observables::variance(probe, obs) -
                                                    oracle::fock_variance(spec, n_f, obs)));
                    }
                    auto est = fisher::qfi(spec, probes::probe_single());
                    double pt = fisher::qfi_perturbative_single(spec);
                    if (!est.converged)
                        ++unconverged;
                    else
                        worst_qfi_rel = std::max(worst_qfi_rel, std::abs(est.value - pt) / pt);
                }
            }
        }
    }
    report("criterion 6 (oracle equivalence)",
           worst_fid <= 1e-10 && worst_var <= 1e-10 && worst_qfi_rel <= 1e-3 &&
               unconverged == 0,
           fmt("worst: fidelity %.2e, variance %.2e, QFI rel %.2e", worst_fid, worst_var,
               worst_qfi_rel));
    info(fmt("oracle grid in %.1f s", seconds_since(t0)));

    // --- criterion 7: closed-form anchor -------------------------------------
    auto anchor = model::make_spec(2, 0.0, 0.0);
    double anchor_qfi = fisher::qfi(anchor, probes::probe_single()).value;
    double anchor_ofi = observables::ofi(anchor, probes::probe_single(),
                                         observables::position_observable(2))
                            .value;
    report("criterion 7 (two-site closed form)",
           std::abs(anchor_qfi - 0.25) <= 1e-6 && std::abs(anchor_ofi - 0.25) <= 1e-6,
           fmt("QFI=%.8f, position OFI=%.8f (0.25 within 1e-6)", anchor_qfi, anchor_ofi));

    // --- criterion 8: plateau and localized scale invariance -----------------
    lab::SweepConfig phases;
    phases.sizes = {144, 233};
    phases.V = 2.0;
    phases.h_grid = {1e-10, 1e-9, 1.0};
    phases.observables = {lab::Quantity::qfi};
    phases.phase_samples = 200;
    phases.seed = 1;
    auto phase_records = lab::run_sweep(phases);
    std::map<std::pair<int, double>, double> qfi_at;
    for (const auto& r : phase_records) qfi_at[{r.L, r.h}] = r.mean;
    double plateau_144 =
        std::abs(qfi_at[{144, 1e-10}] - qfi_at[{144, 1e-9}]) / qfi_at[{144, 1e-9}];
    double plateau_233 =
        std::abs(qfi_at[{233, 1e-10}] - qfi_at[{233, 1e-9}]) / qfi_at[{233, 1e-9}];
    double localized =
        std::abs(qfi_at[{144, 1.0}] - qfi_at[{233, 1.0}]) / qfi_at[{233, 1.0}];
    report("criterion 8 (plateau and localized invariance)",
           plateau_144 <= 0.01 && plateau_233 <= 0.01 && localized <= 0.10,
           fmt("plateau rel diff %.2e / %.2e <= 1e-2; localized size drift %.3f <= 0.1",
               plateau_144, plateau_233, localized));

    // --- criterion 9: byte-identical CSV across worker counts ----------------
    auto csv_serial = lab::to_csv(lab::run_sweep(critical, 1));
    auto csv_threaded = lab::to_csv(lab::run_sweep(critical, 4));
    report("criterion 9 (determinism across workers)",
           csv_serial == csv_threaded && csv_serial == lab::to_csv(critical_records),
           fmt("criterion-1 sweep CSV identical for 1 and 4 workers (%.0f bytes)",
               static_cast<double>(csv_serial.size())));

    std::printf("%d/9 criteria passed\n", 9 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
