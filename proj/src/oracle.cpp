#include "starklab/oracle.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace starklab::oracle {

namespace {

long long binomial_capped(int L, int n) {
    long long c = 1;
    n = std::min(n, L - n);
    for (int i = 1; i <= n; ++i) {
        c = c * (L - n + i) / i;  // exact: product of i consecutive ints is divisible by i!
        if (c > kMaxFockStates) return kMaxFockStates + 1;
    }
    return c;
}

std::uint64_t lowest_bits_mask(int n) { return (n >= 64) ? ~0ULL : (1ULL << n) - 1ULL; }

int parity_below(std::uint64_t mask, int site) {
    return std::popcount(mask & lowest_bits_mask(site)) & 1;
}

Eigen::MatrixXd many_body_hamiltonian(const model::TridiagonalHamiltonian& H,
                                      const FockBasis& basis) {
    const int L = H.size();
    const auto D = static_cast<Eigen::Index>(basis.states.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(D, D);
    for (Eigen::Index a = 0; a < D; ++a) {
        const std::uint64_t m = basis.states[a];
        double onsite = 0.0;
        for (int i = 0; i < L; ++i)
            if (m >> i & 1ULL) onsite += H.diagonal[i];
        M(a, a) = onsite;
        for (int i = 0; i + 1 < L; ++i) {
            bool lo = m >> i & 1ULL;
            bool hi = m >> (i + 1) & 1ULL;
            if (lo == hi) continue;
            int src = lo ? i : i + 1;
            int dst = lo ? i + 1 : i;
            int sign = parity_below(m, src);
            std::uint64_t intermediate = m ^ (1ULL << src);
            sign ^= parity_below(intermediate, dst);
            std::uint64_t m2 = intermediate | (1ULL << dst);
            auto it = std::lower_bound(basis.states.begin(), basis.states.end(), m2);
            auto b = static_cast<Eigen::Index>(it - basis.states.begin());
            M(b, a) += H.offdiagonal[i] * (sign ? -1.0 : 1.0);
        }
    }
    return M;
}

}  // namespace

FockBasis fock_basis(int L, int n_f) {
    if (L < 2 || L > 62) throw std::invalid_argument("fock_basis: L out of range");
    if (n_f < 1 || n_f > L) throw std::invalid_argument("fock_basis: n_f out of range");
    long long dim = binomial_capped(L, n_f);
    if (dim > kMaxFockStates)
        throw std::invalid_argument("fock_basis: C(L, n_f) exceeds the cap of " +
                                    std::to_string(kMaxFockStates) + " states");
    FockBasis basis;
    basis.L = L;
    basis.n_f = n_f;
    basis.states.reserve(dim);
    const std::uint64_t limit = 1ULL << L;
    std::uint64_t v = lowest_bits_mask(n_f);
    while (v < limit) {
        basis.states.push_back(v);
        // Gosper's hack: next mask with the same popcount
        std::uint64_t t = v | (v - 1);
        v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
    }
    return basis;
}

FockGroundState fock_ground_state(const model::LatticeSpec& spec, int n_f) {
    auto H = model::build_hamiltonian(spec);
    FockGroundState gs;
    gs.basis = fock_basis(spec.L, n_f);
    Eigen::MatrixXd M = many_body_hamiltonian(H, gs.basis);
    if (gs.basis.dimension() == 1) {
        gs.amplitudes = Eigen::VectorXd::Ones(1);
        gs.energy = M(0, 0);
        return gs;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("fock_ground_state: eigensolver failed");
    gs.amplitudes = solver.eigenvectors().col(0);
    gs.energy = solver.eigenvalues()[0];
    return gs;
}

double fock_fidelity(const model::LatticeSpec& spec, int n_f, double delta_h) {
    auto displaced = spec;
    displaced.h = spec.h + delta_h;
    auto a = fock_ground_state(spec, n_f);
    auto b = fock_ground_state(displaced, n_f);
    return std::min(std::abs(a.amplitudes.dot(b.amplitudes)), 1.0);
}

double fock_variance(const model::LatticeSpec& spec, int n_f,
                     const observables::DiagonalObservable& obs) {
    if (static_cast<int>(obs.weights.size()) != spec.L)
        throw std::invalid_argument("fock_variance: observable length mismatch");
    auto gs = fock_ground_state(spec, n_f);
    double mean = 0.0, second = 0.0;
    for (Eigen::Index a = 0; a < gs.amplitudes.size(); ++a) {
        const std::uint64_t m = gs.basis.states[a];
        double o = 0.0;
        for (int i = 0; i < spec.L; ++i)
            if (m >> i & 1ULL) o += obs.weights[i];
        const double p = gs.amplitudes[a] * gs.amplitudes[a];
        mean += p * o;
        second += p * o * o;
    }
    return second - mean * mean;
}

}  // namespace starklab::oracle
