#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "starklab/model.hpp"
#include "starklab/observables.hpp"

namespace starklab::oracle {

/// Desk-scale cap on the many-body dimension C(L, n_f).
inline constexpr long long kMaxFockStates = 100000;

/// All C(L, n_f) occupation bitmasks with exactly n_f set bits, in ascending
/// mask order. Site 0 is the least significant bit; the fermionic sign of an
/// operator acting on site i is the parity of set bits below i.
struct FockBasis {
    int L = 0;
    int n_f = 0;
    std::vector<std::uint64_t> states;

    long long dimension() const { return static_cast<long long>(states.size()); }
};

FockBasis fock_basis(int L, int n_f);

struct FockGroundState {
    FockBasis basis;
    Eigen::VectorXd amplitudes;  // normalized, in basis.states order
    double energy = 0.0;
};

/// Ground state of the number-conserving many-body Hamiltonian, assembled
/// densely and diagonalized exactly. Brute force on purpose: this is the
/// validator for the Slater-determinant and Wick machinery.
FockGroundState fock_ground_state(const model::LatticeSpec& spec, int n_f);

/// |<Psi_0(h)|Psi_0(h+delta_h)>| computed directly in the Fock basis.
double fock_fidelity(const model::LatticeSpec& spec, int n_f, double delta_h);

/// <Psi_0|O^2|Psi_0> - <Psi_0|O|Psi_0>^2 for a site-diagonal observable.
double fock_variance(const model::LatticeSpec& spec, int n_f,
                     const observables::DiagonalObservable& obs);

}  // namespace starklab::oracle
