#pragma once

#include <string>
#include <vector>

#include "starklab/fisher.hpp"
#include "starklab/probes.hpp"

namespace starklab::observables {

/// Site-diagonal observable sum_i w_i n_i.
struct DiagonalObservable {
    std::vector<double> weights;
    std::string label;
};

/// Even/odd occupation imbalance, weights (-1)^i.
DiagonalObservable cdw_observable(int L);

/// The gradient generator itself, weights i.
DiagonalObservable position_observable(int L);

double expectation(const probes::SingleParticleProbe& probe, const DiagonalObservable& obs);
double expectation(const probes::SlaterProbe& probe, const DiagonalObservable& obs);

/// Var(O) = <O^2> - <O>^2. For the Slater probe the four-operator terms are
/// contracted with Wick's theorem: sum_ij w_i w_j (d_ij C_ij - C_ij C_ji).
/// Negative rounding residue above -1e-14 clamps to zero.
double variance(const probes::SingleParticleProbe& probe, const DiagonalObservable& obs);
double variance(const probes::SlaterProbe& probe, const DiagonalObservable& obs);

/// Operator Fisher information (d<O>/dh)^2 / Var(O) at spec.h.
struct OfiEstimate {
    double value = 0.0;
    double h = 0.0;
    double delta_h = 0.0;    // step of the central difference
    double mean = 0.0;       // <O> at h
    double variance = 0.0;   // Var(O) at h
    double slope = 0.0;      // d<O>/dh by central difference
    bool converged = false;
    bool degenerate = false;
};

/// The derivative step comes from the fisher module's adaptive policy; the
/// slope is Richardson-checked against its half step. Throws
/// std::domain_error("observable is sharp; OFI undefined") when the variance
/// collapses below 1e-30.
OfiEstimate ofi(const model::LatticeSpec& spec, const probes::ProbeKind& kind,
                const DiagonalObservable& obs, const fisher::StepPolicy& policy = {});

}  // namespace starklab::observables
