#pragma once

#include <Eigen/Dense>

#include "starklab/model.hpp"

namespace starklab::spectral {

/// Requests all L eigenpairs from eigendecompose.
inline constexpr int kAllPairs = -1;

/// Ascending eigenpairs of a lattice Hamiltonian. Columns of `orbitals` are
/// orthonormal and sign-fixed: the entry of largest magnitude in each column
/// is positive (lowest index wins ties), which makes results bit-reproducible.
struct Spectrum {
    Eigen::VectorXd energies;  // k entries, non-decreasing
    Eigen::MatrixXd orbitals;  // L x k

    int pairs() const { return static_cast<int>(energies.size()); }

    /// E_1 - E_0; requires at least two pairs.
    double gap() const;
};

/// Eigen-decomposition of the symmetric tridiagonal matrix. k selects the
/// lowest-k pairs (bisection + inverse iteration) or kAllPairs for the full
/// spectrum (implicit-shift QL/QR). The matrix is never densified.
Spectrum eigendecompose(const model::TridiagonalHamiltonian& H, int k = kAllPairs);

/// E_1 - E_0 for the two lowest levels. Gaps below 1e-12 are treated as
/// degenerate by the fidelity code.
double ground_gap(const model::TridiagonalHamiltonian& H);

/// Worst-case orthonormality and eigen-residual errors of a decomposition,
/// used by the invariant tests and the `validate` CLI command.
struct SpectrumDiagnostics {
    double max_orthonormality_error = 0.0;  // max |Q^T Q - I|
    double max_residual = 0.0;              // max_i ||H v_i - E_i v_i||_inf / max(1,|E_i|)
};

SpectrumDiagnostics check_invariants(const model::TridiagonalHamiltonian& H,
                                     const Spectrum& spectrum);

}  // namespace starklab::spectral
