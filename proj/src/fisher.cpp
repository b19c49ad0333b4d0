#include "starklab/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace starklab::fisher {

namespace {

model::LatticeSpec with_h(model::LatticeSpec spec, double h) {
    spec.h = h;
    return spec;
}

int occupied_count(const model::LatticeSpec& spec, const probes::ProbeKind& kind) {
    if (kind.kind == probes::ProbeKind::Kind::single) return 1;
    if (kind.n_f < 1 || kind.n_f > spec.L)
        throw std::invalid_argument("fisher: n_f out of range for half-filled probe");
    return kind.n_f;
}

// Occupied orbital block at one parameter point plus the gap that guards it.
struct Endpoint {
    Eigen::MatrixXd occupied;
    double gap = std::numeric_limits<double>::infinity();
};

Endpoint endpoint_state(const model::LatticeSpec& spec, int n_occ) {
    const int k = std::min(n_occ + 1, spec.L);
    auto s = spectral::eigendecompose(model::build_hamiltonian(spec), k);
    Endpoint ep;
    ep.occupied = s.orbitals.leftCols(n_occ);
    if (n_occ < spec.L) ep.gap = s.energies[n_occ] - s.energies[n_occ - 1];
    return ep;
}

double overlap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    double f = a.cols() == 1 ? std::abs(a.col(0).dot(b.col(0)))
                             : std::abs((a.transpose() * b).determinant());
    return std::min(f, 1.0);
}

// Infidelity between the two probe states separated by delta_h and centered
// on spec.h: the pair (h - delta_h/2, h + delta_h/2). Centering removes the
// O(delta_h * dchi/dh) bias a one-sided pair would leave in the chi estimate,
// which is what lets the finite difference track the perturbation-sum oracle
// to 0.1%. The base point itself is solved once for the degeneracy guard.
class Differencer {
  public:
    Differencer(const model::LatticeSpec& spec, int n_occ)
        : spec_(spec), n_occ_(n_occ), base_(endpoint_state(spec, n_occ)) {}

    double base_gap() const { return base_.gap; }

    struct Eval {
        double one_minus_f = 0.0;
        bool endpoint_degenerate = false;
    };

    Eval infidelity(double delta_h) const {
        Endpoint below = endpoint_state(with_h(spec_, spec_.h - delta_h / 2.0), n_occ_);
        Endpoint above = endpoint_state(with_h(spec_, spec_.h + delta_h / 2.0), n_occ_);
        double omf = std::max(0.0, 1.0 - overlap(below.occupied, above.occupied));
        return {omf, below.gap < kDegenerateGap || above.gap < kDegenerateGap};
    }

  private:
    model::LatticeSpec spec_;
    int n_occ_;
    Endpoint base_;
};

struct SearchResult {
    double delta_h = 0.0;
    Differencer::Eval eval;
    bool in_window = false;
    bool any_degenerate = false;
};

SearchResult run_search(const Differencer& diff, double h, const StepPolicy& policy) {
    SearchResult res;
    if (policy.fixed_delta_h) {
        res.delta_h = *policy.fixed_delta_h;
        if (res.delta_h <= 0.0) throw std::invalid_argument("fisher: delta_h must be positive");
        res.eval = diff.infidelity(res.delta_h);
        res.any_degenerate = res.eval.endpoint_degenerate;
        res.in_window = res.eval.one_minus_f >= policy.window_lo &&
                        res.eval.one_minus_f <= policy.window_hi;
        return res;
    }
    res.delta_h = policy.initial_scale * std::max(std::abs(h), policy.floor);
    res.eval = diff.infidelity(res.delta_h);
    res.any_degenerate = res.eval.endpoint_degenerate;
    for (int i = 0; i < policy.max_rescales; ++i) {
        if (res.eval.one_minus_f > policy.window_hi)
            res.delta_h /= 10.0;
        else if (res.eval.one_minus_f < policy.window_lo)
            res.delta_h *= 10.0;
        else
            break;
        res.eval = diff.infidelity(res.delta_h);
        res.any_degenerate |= res.eval.endpoint_degenerate;
    }
    res.in_window = res.eval.one_minus_f >= policy.window_lo &&
                    res.eval.one_minus_f <= policy.window_hi;
    return res;
}

}  // namespace

// The public fidelity operations overlap the literal pair (h, h + delta_h).
static FidelityResult forward_fidelity(const model::LatticeSpec& spec, int n_occ,
                                       double delta_h) {
    Endpoint at = endpoint_state(spec, n_occ);
    Endpoint displaced = endpoint_state(with_h(spec, spec.h + delta_h), n_occ);
    return {overlap(at.occupied, displaced.occupied),
            at.gap < kDegenerateGap || displaced.gap < kDegenerateGap};
}

FidelityResult fidelity_single(const model::LatticeSpec& spec, double delta_h) {
    model::validate(spec);
    return forward_fidelity(spec, 1, delta_h);
}

FidelityResult fidelity_slater(const model::LatticeSpec& spec, int n_f, double delta_h) {
    model::validate(spec);
    if (n_f < 1 || n_f > spec.L) throw std::invalid_argument("fidelity_slater: n_f out of range");
    return forward_fidelity(spec, n_f, delta_h);
}

StepSelection choose_step(const model::LatticeSpec& spec, const probes::ProbeKind& kind,
                          const StepPolicy& policy) {
    model::validate(spec);
    Differencer diff(spec, occupied_count(spec, kind));
    auto res = run_search(diff, spec.h, policy);
    return {res.delta_h, res.eval.one_minus_f, res.in_window,
            diff.base_gap() < kDegenerateGap || res.any_degenerate};
}

FisherEstimate qfi(const model::LatticeSpec& spec, const probes::ProbeKind& kind,
                   const StepPolicy& policy) {
    model::validate(spec);
    Differencer diff(spec, occupied_count(spec, kind));
    auto res = run_search(diff, spec.h, policy);
    auto half = diff.infidelity(res.delta_h / 2.0);

    FisherEstimate est;
    est.h = spec.h;
    est.delta_h = res.delta_h;
    est.one_minus_f = res.eval.one_minus_f;
    est.value = 8.0 * res.eval.one_minus_f / (res.delta_h * res.delta_h);
    const double half_step = res.delta_h / 2.0;
    const double value_half = 8.0 * half.one_minus_f / (half_step * half_step);
    est.converged = res.in_window && value_half > 0.0 &&
                    std::abs(value_half - est.value) <= policy.richardson_rtol * value_half;
    est.degenerate = diff.base_gap() < kDegenerateGap || res.any_degenerate ||
                     half.endpoint_degenerate;
    return est;
}

double guard_gap(const model::LatticeSpec& spec, const probes::ProbeKind& kind) {
    model::validate(spec);
    return endpoint_state(spec, occupied_count(spec, kind)).gap;
}

double qfi_perturbative_from_spectrum(const spectral::Spectrum& full,
                                      const std::vector<double>& generator_weights) {
    const int L = static_cast<int>(full.orbitals.rows());
    if (full.pairs() != L)
        throw std::invalid_argument("qfi_perturbative_from_spectrum: full spectrum required");
    if (static_cast<int>(generator_weights.size()) != L)
        throw std::invalid_argument("qfi_perturbative_from_spectrum: weight length mismatch");
    Eigen::VectorXd weighted =
        Eigen::Map<const Eigen::VectorXd>(generator_weights.data(), L).cwiseProduct(
            full.orbitals.col(0));
    Eigen::VectorXd amps = full.orbitals.transpose() * weighted;
    double sum = 0.0;
    for (int n = 1; n < L; ++n) {
        double g = amps[n] / (full.energies[n] - full.energies[0]);
        sum += g * g;
    }
    return 4.0 * sum;
}

double qfi_perturbative_single(const model::LatticeSpec& spec) {
    model::validate(spec);
    auto full = spectral::eigendecompose(model::build_hamiltonian(spec), spectral::kAllPairs);
    if (full.gap() < kDegenerateGap)
        throw std::domain_error("qfi_perturbative_single: degenerate ground state");
    std::vector<double> weights(spec.L);
    for (int i = 0; i < spec.L; ++i) weights[i] = static_cast<double>(i);
    return qfi_perturbative_from_spectrum(full, weights);
}

}  // namespace starklab::fisher
