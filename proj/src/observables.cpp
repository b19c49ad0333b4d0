#include "starklab/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace starklab::observables {

namespace {

constexpr double kSharpVariance = 1e-30;
constexpr double kClampFloor = -1e-14;

void check_length(int L, const DiagonalObservable& obs) {
    if (static_cast<int>(obs.weights.size()) != L)
        throw std::invalid_argument("observable length does not match lattice size");
}

double clamp_variance(double v) {
    if (v >= 0.0) return v;
    if (v >= kClampFloor) return 0.0;
    throw std::runtime_error("variance: negative beyond rounding tolerance");
}

Eigen::Map<const Eigen::VectorXd> as_vector(const DiagonalObservable& obs) {
    return {obs.weights.data(), static_cast<Eigen::Index>(obs.weights.size())};
}

double expectation_at(const model::LatticeSpec& spec, const probes::ProbeKind& kind,
                      const DiagonalObservable& obs) {
    if (kind.kind == probes::ProbeKind::Kind::single)
        return expectation(probes::single_particle_probe(spec), obs);
    return expectation(probes::slater_probe(spec, kind.n_f), obs);
}

}  // namespace

DiagonalObservable cdw_observable(int L) {
    if (L < 2) throw std::invalid_argument("cdw_observable: L must be >= 2");
    DiagonalObservable obs;
    obs.label = "cdw";
    obs.weights.resize(L);
    for (int i = 0; i < L; ++i) obs.weights[i] = (i % 2 == 0) ? 1.0 : -1.0;
    return obs;
}

DiagonalObservable position_observable(int L) {
    if (L < 2) throw std::invalid_argument("position_observable: L must be >= 2");
    DiagonalObservable obs;
    obs.label = "position";
    obs.weights.resize(L);
    for (int i = 0; i < L; ++i) obs.weights[i] = static_cast<double>(i);
    return obs;
}

double expectation(const probes::SingleParticleProbe& probe, const DiagonalObservable& obs) {
    check_length(probe.spec.L, obs);
    return as_vector(obs).dot(probe.psi0.cwiseProduct(probe.psi0));
}

double expectation(const probes::SlaterProbe& probe, const DiagonalObservable& obs) {
    check_length(probe.spec.L, obs);
    return as_vector(obs).dot(probe.correlation.diagonal());
}

double variance(const probes::SingleParticleProbe& probe, const DiagonalObservable& obs) {
    check_length(probe.spec.L, obs);
    Eigen::VectorXd density = probe.psi0.cwiseProduct(probe.psi0);
    auto w = as_vector(obs);
    double first = w.cwiseProduct(w).dot(density);
    double mean = w.dot(density);
    return clamp_variance(first - mean * mean);
}

double variance(const probes::SlaterProbe& probe, const DiagonalObservable& obs) {
    check_length(probe.spec.L, obs);
    auto w = as_vector(obs);
    const Eigen::MatrixXd& C = probe.correlation;
    double diag_term = w.cwiseProduct(w).dot(C.diagonal());
    double exchange = w.dot(C.cwiseProduct(C) * w);
    return clamp_variance(diag_term - exchange);
}

OfiEstimate ofi(const model::LatticeSpec& spec, const probes::ProbeKind& kind,
                const DiagonalObservable& obs, const fisher::StepPolicy& policy) {
    model::validate(spec);
    check_length(spec.L, obs);

    OfiEstimate est;
    est.h = spec.h;
    if (kind.kind == probes::ProbeKind::Kind::single) {
        auto probe = probes::single_particle_probe(spec);
        est.mean = expectation(probe, obs);
        est.variance = variance(probe, obs);
    } else {
        auto probe = probes::slater_probe(spec, kind.n_f);
        est.mean = expectation(probe, obs);
        est.variance = variance(probe, obs);
    }
    if (est.variance < kSharpVariance)
        throw std::domain_error("observable is sharp; OFI undefined");

    auto sel = fisher::choose_step(spec, kind, policy);
    est.delta_h = sel.delta_h;
    est.degenerate = sel.degenerate;

    auto spec_at = [&spec](double h) {
        model::LatticeSpec s = spec;
        s.h = h;
        return s;
    };
    auto slope_at = [&](double step) {
        double above = expectation_at(spec_at(spec.h + step), kind, obs);
        double below = expectation_at(spec_at(spec.h - step), kind, obs);
        return (above - below) / (2.0 * step);
    };
    est.slope = slope_at(sel.delta_h);
    double slope_half = slope_at(sel.delta_h / 2.0);
    est.converged = sel.in_window &&
                    (slope_half == 0.0
                         ? est.slope == 0.0
                         : std::abs(slope_half - est.slope) <=
                               policy.richardson_rtol * std::abs(slope_half));
    est.value = est.slope * est.slope / est.variance;
    return est;
}

}  // namespace starklab::observables
