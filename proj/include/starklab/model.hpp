#pragma once

#include <map>
#include <string>
#include <vector>

namespace starklab::model {

/// Exact rational approximant p/q used for the quasiperiodic wave number.
struct Rational {
    long long num = 0;
    long long den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Rational& a, const Rational& b) {
        // compare as rationals, not as normalized pairs
        return a.num * b.den == b.num * a.den;
    }
};

/// Full definition of one lattice problem: L sites, open boundaries,
/// hopping fixed to 1 (energy unit), quasiperiodic amplitude V,
/// linear-gradient strength h, wave number omega = p/q, phase phi in [0,1).
struct LatticeSpec {
    int L = 2;
    double V = 0.0;
    double h = 0.0;
    Rational omega{1, 2};
    double phi = 0.0;
};

/// Onsite + hopping coefficients of the single-particle Hamiltonian.
/// diagonal[i] = V*cos(2*pi*(i*omega + phi)) + h*i, i = 0..L-1 (0-based, see
/// make_spec); offdiagonal holds the L-1 nearest-neighbor couplings, all -1.
struct TridiagonalHamiltonian {
    std::vector<double> diagonal;
    std::vector<double> offdiagonal;

    int size() const { return static_cast<int>(diagonal.size()); }
};

/// F_1..F_{n_max} with F_1 = F_2 = 1. n_max is capped at 92 (int64 range).
std::vector<long long> fibonacci_sizes(int n_max);

bool is_fibonacci(long long L);

/// For a Fibonacci system size L = F_{n+1} (n >= 2), returns F_n / F_{n+1}.
/// Throws std::invalid_argument("requires Fibonacci system size") otherwise.
Rational omega_for_size(long long L);

/// Rational stand-in for the golden-ratio limit (sqrt(5)-1)/2, built from a
/// Fibonacci pair large enough that the difference is below double precision.
/// Used for exploratory non-Fibonacci sizes; scaling fits reject such sizes.
Rational golden_ratio_approximant();

/// Quasiperiodic onsite value V*cos(2*pi*(i*omega + phi)). The fractional
/// part of i*omega is reduced exactly in integer arithmetic so the cosine
/// argument stays small for large i.
double quasiperiodic_onsite(long long i, double V, const Rational& omega, double phi);

/// Throws std::invalid_argument if the spec violates its invariants:
/// L >= 2, omega in (0,1), phi in [0,1), and omega canonical (adjacent
/// Fibonacci pair) whenever L itself is a Fibonacci number.
void validate(const LatticeSpec& spec);

/// Convenience builder: canonical omega for Fibonacci L, golden-ratio
/// approximant otherwise.
LatticeSpec make_spec(int L, double V, double h, double phi = 0.0);

TridiagonalHamiltonian build_hamiltonian(const LatticeSpec& spec);

/// Flat key-value serialization (keys: L, V, h, omega_num, omega_den, phi).
/// Doubles round-trip exactly (17 significant digits).
std::map<std::string, std::string> to_key_values(const LatticeSpec& spec);
LatticeSpec lattice_spec_from_key_values(const std::map<std::string, std::string>& kv);

}  // namespace starklab::model
