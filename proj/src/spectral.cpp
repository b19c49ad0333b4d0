#include "starklab/spectral.hpp"

#include <lapacke.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace starklab::spectral {

namespace {

[[noreturn]] void fail(const std::string& routine, int L, lapack_int info) {
    throw std::runtime_error("spectral: " + routine + " failed for L=" + std::to_string(L) +
                             " (info=" + std::to_string(info) + ")");
}

void fix_column_signs(Eigen::MatrixXd& Q) {
    for (Eigen::Index c = 0; c < Q.cols(); ++c) {
        Eigen::Index imax = 0;
        double amax = -1.0;
        for (Eigen::Index r = 0; r < Q.rows(); ++r) {
            double a = std::abs(Q(r, c));
            if (a > amax) {
                amax = a;
                imax = r;
            }
        }
        if (Q(imax, c) < 0.0) Q.col(c) = -Q.col(c);
    }
}

// Full spectrum: implicit-shift QL/QR on the tridiagonal form.
Spectrum decompose_full(const model::TridiagonalHamiltonian& H) {
    const int L = H.size();
    std::vector<double> d = H.diagonal;
    std::vector<double> e = H.offdiagonal;
    Spectrum s;
    s.orbitals.resize(L, L);
    lapack_int info = LAPACKE_dsteqr(LAPACK_COL_MAJOR, 'I', L, d.data(), e.data(),
                                     s.orbitals.data(), L);
    if (info != 0) fail("dsteqr", L, info);
    s.energies = Eigen::Map<Eigen::VectorXd>(d.data(), L);
    fix_column_signs(s.orbitals);
    return s;
}

// Lowest k pairs: Sturm-sequence bisection for the eigenvalues, inverse
// iteration for the vectors. Falls back to the full solver if inverse
// iteration stalls inside a tight cluster.
Spectrum decompose_lowest(const model::TridiagonalHamiltonian& H, int k) {
    const int L = H.size();
    std::vector<double> d = H.diagonal;
    std::vector<double> e = H.offdiagonal;
    std::vector<double> w(L);
    std::vector<lapack_int> iblock(L), isplit(L);
    lapack_int m = 0, nsplit = 0;
    lapack_int info = LAPACKE_dstebz('I', 'B', L, 0.0, 0.0, 1, k, 0.0, d.data(), e.data(), &m,
                                     &nsplit, w.data(), iblock.data(), isplit.data());
    if (info != 0) fail("dstebz", L, info);
    if (m != k) fail("dstebz(pair count)", L, m);

    Spectrum s;
    s.orbitals.resize(L, k);
    std::vector<lapack_int> ifailv(k);
    info = LAPACKE_dstein(LAPACK_COL_MAJOR, L, d.data(), e.data(), m, w.data(), iblock.data(),
                          isplit.data(), s.orbitals.data(), L, ifailv.data());
    if (info != 0) {
        Spectrum full = decompose_full(H);
        s.energies = full.energies.head(k);
        s.orbitals = full.orbitals.leftCols(k);
        return s;
    }
    s.energies = Eigen::Map<Eigen::VectorXd>(w.data(), k);
    fix_column_signs(s.orbitals);
    return s;
}

}  // namespace

double Spectrum::gap() const {
    if (pairs() < 2) throw std::logic_error("Spectrum::gap requires at least two pairs");
    return energies[1] - energies[0];
}

Spectrum eigendecompose(const model::TridiagonalHamiltonian& H, int k) {
    const int L = H.size();
    if (L < 2 || static_cast<int>(H.offdiagonal.size()) != L - 1)
        throw std::invalid_argument("eigendecompose: malformed tridiagonal Hamiltonian");
    if (k == kAllPairs) k = L;
    if (k < 1 || k > L) throw std::invalid_argument("eigendecompose: k out of range");
    return k == L ? decompose_full(H) : decompose_lowest(H, k);
}

double ground_gap(const model::TridiagonalHamiltonian& H) {
    return eigendecompose(H, 2).gap();
}

SpectrumDiagnostics check_invariants(const model::TridiagonalHamiltonian& H,
                                     const Spectrum& spectrum) {
    const int L = H.size();
    const int k = spectrum.pairs();
    SpectrumDiagnostics diag;
    Eigen::MatrixXd gram = spectrum.orbitals.transpose() * spectrum.orbitals;
    gram -= Eigen::MatrixXd::Identity(k, k);
    diag.max_orthonormality_error = gram.cwiseAbs().maxCoeff();
    for (int c = 0; c < k; ++c) {
        const auto v = spectrum.orbitals.col(c);
        double rmax = 0.0;
        for (int i = 0; i < L; ++i) {
            double r = H.diagonal[i] * v[i] - spectrum.energies[c] * v[i];
            if (i > 0) r += H.offdiagonal[i - 1] * v[i - 1];
            if (i + 1 < L) r += H.offdiagonal[i] * v[i + 1];
            rmax = std::max(rmax, std::abs(r));
        }
        diag.max_residual =
            std::max(diag.max_residual, rmax / std::max(1.0, std::abs(spectrum.energies[c])));
    }
    return diag;
}

}  // namespace starklab::spectral
