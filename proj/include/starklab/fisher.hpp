#pragma once

#include <optional>
#include <vector>

#include "starklab/model.hpp"
#include "starklab/probes.hpp"
#include "starklab/spectral.hpp"

namespace starklab::fisher {

/// Gaps below this are treated as unresolved degeneracies; estimates built
/// on them carry the `degenerate` flag instead of pretending to converge.
inline constexpr double kDegenerateGap = 1e-12;

/// Adaptive finite-difference step selection. The search starts at
/// initial_scale * max(|h|, floor) and rescales by powers of 10 until the
/// raw infidelity 1-f lands in [window_lo, window_hi]: above the
/// double-precision noise floor, below fourth-order Taylor contamination.
/// The accepted step is then cross-checked against its half (Richardson).
struct StepPolicy {
    double initial_scale = 1e-6;
    double floor = 1e-6;
    double window_lo = 1e-8;
    double window_hi = 1e-4;
    int max_rescales = 36;
    double richardson_rtol = 1e-2;
    std::optional<double> fixed_delta_h;  // bypasses the search entirely
};

struct FidelityResult {
    double value = 1.0;      // |<psi(h)|psi(h+dh)>|, in [0,1]
    bool degenerate = false;  // guard gap below kDegenerateGap at an endpoint
};

/// Overlap of the two single-particle ground states at h and h+delta_h.
FidelityResult fidelity_single(const model::LatticeSpec& spec, double delta_h);

/// |det P| with P_lm = <psi_l(h)|psi_m(h+delta_h)> over the lowest n_f
/// orbitals: the free-fermion many-body fidelity. Signed overlaps enter the
/// determinant; the absolute value is taken of the determinant itself.
FidelityResult fidelity_slater(const model::LatticeSpec& spec, int n_f, double delta_h);

struct FisherEstimate {
    double value = 0.0;      // QFI, = 8 (1-f) / delta_h^2
    double h = 0.0;          // evaluation point
    double delta_h = 0.0;    // accepted separation of the state pair
    double one_minus_f = 0.0;
    bool converged = false;  // in-window and half-step agrees within 1%
    bool degenerate = false;
};

/// Outcome of the adaptive step search; shared by qfi and the observable
/// Fisher information (the derivative in the latter reuses this step).
struct StepSelection {
    double delta_h = 0.0;
    double one_minus_f = 0.0;
    bool in_window = false;
    bool degenerate = false;
};

StepSelection choose_step(const model::LatticeSpec& spec, const probes::ProbeKind& kind,
                          const StepPolicy& policy = {});

/// Finite-difference QFI of the ground-state family at spec.h, via
/// chi = 2 (1-f) / dh^2 and F_Q = 4 chi. The two states of the difference
/// straddle the evaluation point, at h - delta_h/2 and h + delta_h/2, so the
/// estimate is free of the first-order chi-drift bias of a one-sided pair.
FisherEstimate qfi(const model::LatticeSpec& spec, const probes::ProbeKind& kind,
                   const StepPolicy& policy = {});

/// Stability gap of the probe: E_1 - E_0 for the single-particle probe,
/// the Fermi gap E_{n_f} - E_{n_f-1} for the half-filled one.
double guard_gap(const model::LatticeSpec& spec, const probes::ProbeKind& kind);

/// Independent oracle for the single-particle QFI: the second-order
/// perturbation sum 4 sum_{n>0} |<n|X|0>|^2 / (E_n - E_0)^2 with generator
/// X = sum_i i n_i. Throws std::domain_error on a degenerate ground state.
double qfi_perturbative_single(const model::LatticeSpec& spec);

/// Same sum for an arbitrary diagonal generator; requires a full spectrum.
/// Exposed so tests can probe the index-shift invariance (weights i -> i+c).
double qfi_perturbative_from_spectrum(const spectral::Spectrum& full,
                                      const std::vector<double>& generator_weights);

}  // namespace starklab::fisher
