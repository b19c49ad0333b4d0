#include <doctest.h>

#include <cmath>

#include "starklab/observables.hpp"

using namespace starklab;

TEST_CASE("observable weights") {
    auto cdw = observables::cdw_observable(4);
    CHECK(cdw.weights == std::vector<double>{1.0, -1.0, 1.0, -1.0});
    auto pos3 = observables::position_observable(3);
    CHECK(pos3.weights == std::vector<double>{0.0, 1.0, 2.0});
    CHECK(observables::position_observable(2).weights == std::vector<double>{0.0, 1.0});
}

TEST_CASE("expectations on the two-site ground state") {
    auto spec = model::make_spec(2, 0.0, 0.0);
    auto single = probes::single_particle_probe(spec);
    CHECK(observables::expectation(single, observables::cdw_observable(2)) ==
          doctest::Approx(0.0).epsilon(1e-13));
    CHECK(observables::expectation(single, observables::position_observable(2)) ==
          doctest::Approx(0.5).epsilon(1e-13));
    auto filled = probes::slater_probe(spec, 2);
    CHECK(observables::expectation(filled, observables::position_observable(2)) ==
          doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("variances") {
    auto spec = model::make_spec(2, 0.0, 0.0);
    SUBCASE("two-site single particle, cdw") {
        auto probe = probes::single_particle_probe(spec);
        CHECK(observables::variance(probe, observables::cdw_observable(2)) ==
              doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("Wick contraction reproduces the single-particle value at n_f = 1") {
        auto slater = probes::slater_probe(spec, 1);
        CHECK(observables::variance(slater, observables::cdw_observable(2)) ==
              doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("filled band has sharp observables") {
        auto filled = probes::slater_probe(spec, 2);
        CHECK(observables::variance(filled, observables::cdw_observable(2)) <= 1e-14);
    }
    SUBCASE("length mismatch is rejected") {
        auto probe = probes::single_particle_probe(spec);
        CHECK_THROWS_AS(observables::variance(probe, observables::cdw_observable(3)),
                        std::invalid_argument);
    }
}

TEST_CASE("two-site OFI anchor saturates the QFI") {
    auto spec = model::make_spec(2, 0.0, 0.0);
    auto est = observables::ofi(spec, probes::probe_single(),
                                observables::position_observable(2));
    CHECK(est.value == doctest::Approx(0.25).epsilon(4e-6));
    CHECK(est.slope == doctest::Approx(-0.25).epsilon(1e-5));
    CHECK(est.variance == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(est.mean == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(est.converged);
}

TEST_CASE("index shift moves the mean, not the fluctuations") {
    auto spec = model::make_spec(34, 2.0, 1e-3, 0.21);
    auto kind = probes::probe_single();
    auto pos = observables::position_observable(34);
    observables::DiagonalObservable shifted{pos.weights, "position+c"};
    const double c = 9.0;
    for (auto& w : shifted.weights) w += c;

    auto probe = probes::single_particle_probe(spec);
    CHECK(observables::expectation(probe, shifted) ==
          doctest::Approx(observables::expectation(probe, pos) + c).epsilon(1e-12));
    CHECK(observables::variance(probe, shifted) ==
          doctest::Approx(observables::variance(probe, pos)).epsilon(1e-10));

    auto a = observables::ofi(spec, kind, pos);
    auto b = observables::ofi(spec, kind, shifted);
    CHECK(a.slope == doctest::Approx(b.slope).epsilon(1e-10));
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-10));

    auto slater = probes::slater_probe(spec, 17);
    CHECK(observables::variance(slater, shifted) ==
          doctest::Approx(observables::variance(slater, pos)).epsilon(1e-10));
}

TEST_CASE("Cramer-Rao bound on spot specs") {
    struct Case {
        int L;
        double V, h, phi;
    };
    for (const auto& c : {Case{21, 2.0, 1e-9, 0.37}, Case{55, 2.0, 1e-3, 0.11},
                          Case{34, 0.0, 1e-9, 0.5}}) {
        auto spec = model::make_spec(c.L, c.V, c.h, c.phi);
        auto kind = probes::probe_single();
        double q = fisher::qfi(spec, kind).value;
        CHECK(observables::ofi(spec, kind, observables::cdw_observable(c.L)).value <=
              q * (1.0 + 1e-4));
        CHECK(observables::ofi(spec, kind, observables::position_observable(c.L)).value <=
              q * (1.0 + 1e-4));
    }
}

TEST_CASE("localized phase is scale invariant") {
    // h >= 1 pins the particle near the potential minimum; the phase-averaged
    // OFI then no longer cares about L
    auto mean_ofi = [](int L) {
        double sum = 0.0;
        const int samples = 64;
        for (int k = 0; k < samples; ++k) {
            auto spec = model::make_spec(L, 2.0, 1.0, (k + 0.5) / samples);
            sum += observables::ofi(spec, probes::probe_single(),
                                    observables::cdw_observable(L))
                       .value;
        }
        return sum / samples;
    };
    double a = mean_ofi(144), b = mean_ofi(233);
    CHECK(std::abs(a - b) / b <= 0.10);
}

TEST_CASE("sharp observable raises") {
    // enormous gradient: the particle sits on one site and the CDW imbalance
    // has no fluctuations left
    auto spec = model::make_spec(2, 0.0, 1e16);
    CHECK_THROWS_WITH_AS(observables::ofi(spec, probes::probe_single(),
                                          observables::cdw_observable(2)),
                         "observable is sharp; OFI undefined", std::domain_error);
}
