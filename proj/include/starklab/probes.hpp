#pragma once

#include <Eigen/Dense>

#include "starklab/model.hpp"

namespace starklab::probes {

/// Ground state of the single-particle Hamiltonian.
struct SingleParticleProbe {
    model::LatticeSpec spec;
    Eigen::VectorXd psi0;  // unit norm, sign convention from spectral
    double energy = 0.0;
};

/// Slater determinant of the lowest n_f orbitals, with the free-fermion
/// two-point correlation matrix C_ij = sum_m orbitals(i,m) * orbitals(j,m).
/// C is a rank-n_f projector: symmetric, idempotent, trace n_f.
struct SlaterProbe {
    model::LatticeSpec spec;
    int n_f = 1;
    Eigen::MatrixXd orbitals;     // L x n_f
    Eigen::MatrixXd correlation;  // L x L
};

/// Selects which probe family an estimate is evaluated on.
struct ProbeKind {
    enum class Kind { single, half_filled };
    Kind kind = Kind::single;
    int n_f = 0;  // half_filled only
};

inline ProbeKind probe_single() { return {}; }
inline ProbeKind probe_half_filled(int n_f) { return {ProbeKind::Kind::half_filled, n_f}; }

SingleParticleProbe single_particle_probe(const model::LatticeSpec& spec);

SlaterProbe slater_probe(const model::LatticeSpec& spec, int n_f);

/// Default filling: (L-1)/2 for odd L, L/2 for even L. Sweeps may override
/// per size.
int default_half_filling(int L);

}  // namespace starklab::probes
