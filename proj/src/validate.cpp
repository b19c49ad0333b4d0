#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "starklab/fisher.hpp"
#include "starklab/lab.hpp"
#include "starklab/observables.hpp"
#include "starklab/oracle.hpp"
#include "starklab/probes.hpp"
#include "starklab/spectral.hpp"

namespace starklab::lab {

namespace {

struct Reporter {
    std::ostream& out;
    ValidationReport report;

    void check(const std::string& name, bool ok, const std::string& detail) {
        ++report.checks;
        if (!ok) ++report.failures;
        out << (ok ? "[ok]   " : "[FAIL] ") << name << ": " << detail << "\n";
    }
};

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

void spectral_invariants(Reporter& r) {
    struct Case {
        int L;
        double V, h, phi;
        int k;
    };
    const std::vector<Case> cases = {
        {55, 2.0, 1e-9, 0.3, spectral::kAllPairs},
        {233, 2.0, 1e-9, 0.123, spectral::kAllPairs},
        {89, 0.0, 1e-3, 0.0, spectral::kAllPairs},
        {987, 2.0, 1e-9, 0.777, 5},
    };
    double worst_orth = 0.0, worst_res = 0.0, worst_trace = 0.0;
    for (const auto& c : cases) {
        auto spec = model::make_spec(c.L, c.V, c.h, c.phi);
        auto H = model::build_hamiltonian(spec);
        auto s = spectral::eigendecompose(H, c.k);
        auto diag = spectral::check_invariants(H, s);
        worst_orth = std::max(worst_orth, diag.max_orthonormality_error);
        worst_res = std::max(worst_res, diag.max_residual);
        if (c.k == spectral::kAllPairs) {
            double tr_h = 0.0;
            for (double d : H.diagonal) tr_h += d;
            worst_trace = std::max(worst_trace, std::abs(s.energies.sum() - tr_h) / c.L);
        }
    }
    r.check("spectral orthonormality", worst_orth <= 1e-12, "worst " + sci(worst_orth));
    r.check("spectral residuals", worst_res <= 1e-10, "worst " + sci(worst_res));
    r.check("spectral trace preservation", worst_trace <= 1e-10,
            "worst per-site " + sci(worst_trace));

    // open free chain has the closed-form spectrum -2 cos(pi m / (L+1))
    const int L = 144;
    auto s = spectral::eigendecompose(model::build_hamiltonian(model::make_spec(L, 0.0, 0.0)));
    double worst = 0.0;
    for (int m = 1; m <= L; ++m)
        worst = std::max(worst, std::abs(s.energies[m - 1] + 2.0 * std::cos(M_PI * m / (L + 1))));
    r.check("free-chain closed form", worst <= 1e-10, "worst " + sci(worst));
}

void oracle_equivalence(Reporter& r) {
    double worst_fid = 0.0, worst_var = 0.0, worst_qfi = 0.0;
    std::string worst_qfi_case = "-";
    int unconverged = 0;
    for (int L = 2; L <= 8; ++L) {
        for (double V : {0.0, 2.0}) {
            for (double h : {1e-3, 1e-1}) {
                for (double phi : {0.0, 0.37}) {
                    auto spec = model::make_spec(L, V, h, phi);
                    for (int n_f = 1; n_f <= std::min(4, L); ++n_f) {
                        const double dh = 1e-3;
                        double slater = fisher::fidelity_slater(spec, n_f, dh).value;
                        double fock = oracle::fock_fidelity(spec, n_f, dh);
                        worst_fid = std::max(worst_fid, std::abs(slater - fock));
                        for (const auto& obs : {observables::cdw_observable(L),
                                                observables::position_observable(L)}) {
                            double wick =
                                observables::variance(probes::slater_probe(spec, n_f), obs);
                            double exact = oracle::fock_variance(spec, n_f, obs);
                            worst_var = std::max(worst_var, std::abs(wick - exact));
                        }
                    }
                    auto est = fisher::qfi(spec, probes::probe_single());
                    double pt = fisher::qfi_perturbative_single(spec);
                    if (!est.converged) {
                        ++unconverged;
                        continue;
                    }
                    double rel = std::abs(est.value - pt) / pt;
                    if (rel > worst_qfi) {
                        worst_qfi = rel;
                        worst_qfi_case = "L=" + std::to_string(L) + " V=" + sci(V) +
                                         " h=" + sci(h) + " phi=" + sci(phi);
                    }
                }
            }
        }
    }
    r.check("Slater fidelity vs Fock oracle", worst_fid <= 1e-10, "worst " + sci(worst_fid));
    r.check("Wick variance vs Fock oracle", worst_var <= 1e-10, "worst " + sci(worst_var));
    r.check("finite-difference QFI vs perturbation sum (L<=8)",
            worst_qfi <= 1e-3 && unconverged == 0,
            "worst rel " + sci(worst_qfi) + " at " + worst_qfi_case + ", " +
                std::to_string(unconverged) + " unconverged");

    // the same cross-check on larger lattices, both potentials
    double worst_big = 0.0;
    int unconverged_big = 0;
    for (int L : {8, 21, 55, 89}) {
        for (double V : {0.0, 2.0}) {
            for (double h : {1e-9, 1e-3}) {
                auto spec = model::make_spec(L, V, h, 0.37);
                auto est = fisher::qfi(spec, probes::probe_single());
                double pt = fisher::qfi_perturbative_single(spec);
                if (!est.converged) {
                    ++unconverged_big;
                    continue;
                }
                worst_big = std::max(worst_big, std::abs(est.value - pt) / pt);
            }
        }
    }
    r.check("finite-difference QFI vs perturbation sum (L<=89)",
            worst_big <= 1e-3 && unconverged_big == 0,
            "worst rel " + sci(worst_big) + ", " + std::to_string(unconverged_big) +
                " unconverged");
}

void closed_form_anchor(Reporter& r) {
    auto spec = model::make_spec(2, 0.0, 0.0);
    auto est = fisher::qfi(spec, probes::probe_single());
    r.check("two-site QFI anchor", std::abs(est.value - 0.25) <= 1e-6,
            "value " + std::to_string(est.value));
    auto o = observables::ofi(spec, probes::probe_single(), observables::position_observable(2));
    r.check("two-site position-OFI anchor", std::abs(o.value - 0.25) <= 1e-6,
            "value " + std::to_string(o.value));
}

void cramer_rao_spots(Reporter& r) {
    struct Case {
        int L;
        double V, h, phi;
    };
    const std::vector<Case> cases = {
        {55, 2.0, 1e-9, 0.37}, {89, 2.0, 1e-3, 0.11}, {55, 0.0, 1e-9, 0.5}, {21, 2.0, 1.0, 0.9},
    };
    double worst = 0.0;
    for (const auto& c : cases) {
        auto spec = model::make_spec(c.L, c.V, c.h, c.phi);
        auto kind = probes::probe_single();
        double q = fisher::qfi(spec, kind).value;
        for (const auto& obs :
             {observables::cdw_observable(c.L), observables::position_observable(c.L)}) {
            double f = observables::ofi(spec, kind, obs).value;
            worst = std::max(worst, f / q);
        }
    }
    r.check("Cramer-Rao bound (spot grid)", worst <= 1.0 + 1e-4,
            "worst OFI/QFI " + std::to_string(worst));
}

void index_shift(Reporter& r) {
    auto spec = model::make_spec(89, 2.0, 1e-9, 0.37);
    auto full = spectral::eigendecompose(model::build_hamiltonian(spec));
    std::vector<double> plain(spec.L), shifted(spec.L);
    for (int i = 0; i < spec.L; ++i) {
        plain[i] = i;
        shifted[i] = i + 7.0;
    }
    double a = fisher::qfi_perturbative_from_spectrum(full, plain);
    double b = fisher::qfi_perturbative_from_spectrum(full, shifted);
    r.check("index-shift invariance of QFI", std::abs(a - b) <= 1e-10 * a,
            "rel diff " + sci(std::abs(a - b) / a));
}

}  // namespace

ValidationReport run_validation(std::ostream& out) {
    Reporter r{out, {}};
    spectral_invariants(r);
    oracle_equivalence(r);
    closed_form_anchor(r);
    cramer_rao_spots(r);
    index_shift(r);
    out << (r.report.ok() ? "validation passed" : "validation FAILED") << " ("
        << r.report.checks - r.report.failures << "/" << r.report.checks << " checks)\n";
    return r.report;
}

}  // namespace starklab::lab
