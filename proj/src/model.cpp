#include "starklab/model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace starklab::model {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double parse_double(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("missing key: " + key);
    char* end = nullptr;
    double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0')
        throw std::invalid_argument("malformed value for key: " + key);
    return v;
}

long long parse_ll(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("missing key: " + key);
    char* end = nullptr;
    long long v = std::strtoll(it->second.c_str(), &end, 10);
    if (end == it->second.c_str() || *end != '\0')
        throw std::invalid_argument("malformed value for key: " + key);
    return v;
}

}  // namespace

std::vector<long long> fibonacci_sizes(int n_max) {
    if (n_max < 1) throw std::invalid_argument("fibonacci_sizes: n_max must be >= 1");
    if (n_max > 92) throw std::invalid_argument("fibonacci_sizes: n_max > 92 overflows int64");
    std::vector<long long> f;
    f.reserve(n_max);
    long long a = 1, b = 1;
    for (int n = 1; n <= n_max; ++n) {
        f.push_back(a);
        long long next = a + b;
        a = b;
        b = next;
    }
    return f;
}

bool is_fibonacci(long long L) {
    if (L < 1) return false;
    long long a = 1, b = 1;
    while (a < L) {
        long long next = a + b;
        a = b;
        b = next;
    }
    return a == L;
}

Rational omega_for_size(long long L) {
    // walk the pair (F_n, F_{n+1}) until F_{n+1} == L; n >= 2 means L >= 2
    if (L >= 2) {
        long long prev = 1, cur = 1;
        while (cur < L) {
            long long next = prev + cur;
            prev = cur;
            cur = next;
        }
        if (cur == L) return Rational{prev, cur};
    }
    throw std::invalid_argument("requires Fibonacci system size");
}

Rational golden_ratio_approximant() {
    // F_45 / F_46; |F_45/F_46 - (sqrt(5)-1)/2| ~ 1e-19, below double epsilon
    return Rational{1134903170LL, 1836311903LL};
}

double quasiperiodic_onsite(long long i, double V, const Rational& omega, double phi) {
    long long r = (i * omega.num) % omega.den;
    double frac = static_cast<double>(r) / static_cast<double>(omega.den);
    return V * std::cos(kTwoPi * (frac + phi));
}

void validate(const LatticeSpec& spec) {
    if (spec.L < 2) throw std::invalid_argument("LatticeSpec: L must be >= 2");
    if (spec.omega.den <= 0 || spec.omega.num <= 0 || spec.omega.num >= spec.omega.den)
        throw std::invalid_argument("LatticeSpec: omega must lie in (0, 1)");
    if (!(spec.phi >= 0.0 && spec.phi < 1.0))
        throw std::invalid_argument("LatticeSpec: phi must lie in [0, 1)");
    if (is_fibonacci(spec.L) && !(spec.omega == omega_for_size(spec.L)))
        throw std::invalid_argument(
            "LatticeSpec: Fibonacci L requires the adjacent-pair omega F_n/F_{n+1}");
}

LatticeSpec make_spec(int L, double V, double h, double phi) {
    LatticeSpec spec;
    spec.L = L;
    spec.V = V;
    spec.h = h;
    spec.phi = phi;
    spec.omega = is_fibonacci(L) ? omega_for_size(L) : golden_ratio_approximant();
    validate(spec);
    return spec;
}

TridiagonalHamiltonian build_hamiltonian(const LatticeSpec& spec) {
    validate(spec);
    TridiagonalHamiltonian H;
    H.diagonal.resize(spec.L);
    H.offdiagonal.assign(spec.L - 1, -1.0);
    for (int i = 0; i < spec.L; ++i)
        H.diagonal[i] = quasiperiodic_onsite(i, spec.V, spec.omega, spec.phi) + spec.h * i;
    return H;
}

std::map<std::string, std::string> to_key_values(const LatticeSpec& spec) {
    return {
        {"L", std::to_string(spec.L)},
        {"V", format_double(spec.V)},
        {"h", format_double(spec.h)},
        {"omega_num", std::to_string(spec.omega.num)},
        {"omega_den", std::to_string(spec.omega.den)},
        {"phi", format_double(spec.phi)},
    };
}

LatticeSpec lattice_spec_from_key_values(const std::map<std::string, std::string>& kv) {
    for (const auto& [key, _] : kv) {
        if (key != "L" && key != "V" && key != "h" && key != "omega_num" &&
            key != "omega_den" && key != "phi")
            throw std::invalid_argument("unknown key: " + key);
    }
    LatticeSpec spec;
    spec.L = static_cast<int>(parse_ll(kv, "L"));
    spec.V = parse_double(kv, "V");
    spec.h = parse_double(kv, "h");
    spec.omega = Rational{parse_ll(kv, "omega_num"), parse_ll(kv, "omega_den")};
    spec.phi = parse_double(kv, "phi");
    validate(spec);
    return spec;
}

}  // namespace starklab::model
