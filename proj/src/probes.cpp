#include "starklab/probes.hpp"

#include <stdexcept>

#include "starklab/spectral.hpp"

namespace starklab::probes {

SingleParticleProbe single_particle_probe(const model::LatticeSpec& spec) {
    auto s = spectral::eigendecompose(model::build_hamiltonian(spec), 1);
    SingleParticleProbe probe;
    probe.spec = spec;
    probe.psi0 = s.orbitals.col(0);
    probe.energy = s.energies[0];
    return probe;
}

SlaterProbe slater_probe(const model::LatticeSpec& spec, int n_f) {
    if (n_f < 1 || n_f > spec.L) throw std::invalid_argument("slater_probe: n_f out of range");
    auto s = spectral::eigendecompose(model::build_hamiltonian(spec), n_f);
    SlaterProbe probe;
    probe.spec = spec;
    probe.n_f = n_f;
    probe.orbitals = s.orbitals;
    probe.correlation = probe.orbitals * probe.orbitals.transpose();
    return probe;
}

int default_half_filling(int L) {
    if (L < 2) throw std::invalid_argument("default_half_filling: L must be >= 2");
    return (L % 2 == 1) ? (L - 1) / 2 : L / 2;
}

}  // namespace starklab::probes
