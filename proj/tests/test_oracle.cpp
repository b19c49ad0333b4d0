#include <doctest.h>

#include <bit>
#include <cmath>

#include "starklab/fisher.hpp"
#include "starklab/oracle.hpp"
#include "starklab/spectral.hpp"

using namespace starklab;

TEST_CASE("fock basis enumeration") {
    auto basis = oracle::fock_basis(8, 4);
    CHECK(basis.dimension() == 70);  // C(8,4)
    for (std::size_t i = 0; i < basis.states.size(); ++i) {
        CHECK(std::popcount(basis.states[i]) == 4);
        if (i > 0) CHECK(basis.states[i] > basis.states[i - 1]);
    }
    CHECK(oracle::fock_basis(2, 2).dimension() == 1);
    CHECK_THROWS_AS(oracle::fock_basis(30, 10), std::invalid_argument);  // over the cap
    CHECK_THROWS_AS(oracle::fock_basis(8, 0), std::invalid_argument);
}

TEST_CASE("filled band is a single basis state") {
    auto gs = oracle::fock_ground_state(model::make_spec(2, 0.0, 0.3), 2);
    CHECK(gs.amplitudes.size() == 1);
    CHECK(std::abs(gs.amplitudes[0]) == doctest::Approx(1.0));
    CHECK(gs.energy == doctest::Approx(0.3).epsilon(1e-13));  // trace of the onsite terms
}

TEST_CASE("one particle reduces to the single-particle ground state") {
    auto spec = model::make_spec(5, 2.0, 1e-2, 0.3);
    auto gs = oracle::fock_ground_state(spec, 1);
    auto single = spectral::eigendecompose(model::build_hamiltonian(spec), 1);
    // basis masks are 1<<i in ascending order, so amplitudes align with sites
    double sign = gs.amplitudes[0] * single.orbitals(0, 0) < 0 ? -1.0 : 1.0;
    for (int i = 0; i < 5; ++i)
        CHECK(sign * gs.amplitudes[i] == doctest::Approx(single.orbitals(i, 0)).epsilon(1e-11));
    CHECK(gs.energy == doctest::Approx(single.energies[0]).epsilon(1e-12));
}

TEST_CASE("free-fermion additivity of the ground energy") {
    for (double V : {0.0, 2.0}) {
        auto spec = model::make_spec(6, V, 1e-3, 0.3);
        auto gs = oracle::fock_ground_state(spec, 3);
        auto singles = spectral::eigendecompose(model::build_hamiltonian(spec), 3);
        CHECK(gs.energy ==
              doctest::Approx(singles.energies.head(3).sum()).epsilon(1e-10));
    }
}

TEST_CASE("fock fidelity") {
    auto spec = model::make_spec(5, 2.0, 1e-2, 0.3);
    SUBCASE("zero step") { CHECK(oracle::fock_fidelity(spec, 2, 0.0) == doctest::Approx(1.0)); }
    SUBCASE("endpoint exchange symmetry") {
        auto displaced = spec;
        displaced.h = spec.h + 1e-3;
        CHECK(oracle::fock_fidelity(spec, 2, 1e-3) ==
              doctest::Approx(oracle::fock_fidelity(displaced, 2, -1e-3)).epsilon(1e-12));
    }
}

TEST_CASE("oracle equivalence grid") {
    // Slater |det P| and Wick variances against brute-force Fock values
    double worst_fid = 0.0, worst_var = 0.0;
    for (int L = 2; L <= 8; ++L) {
        for (double V : {0.0, 2.0}) {
            for (double h : {1e-3, 1e-1}) {
                for (double phi : {0.0, 0.37}) {
                    auto spec = model::make_spec(L, V, h, phi);
                    for (int n_f = 1; n_f <= std::min(4, L); ++n_f) {
                        worst_fid = std::max(
                            worst_fid, std::abs(fisher::fidelity_slater(spec, n_f, 1e-3).value -
                                                oracle::fock_fidelity(spec, n_f, 1e-3)));
                        auto probe = probes::slater_probe(spec, n_f);
                        for (const auto& obs : {observables::cdw_observable(L),
                                                observables::position_observable(L)}) {
                            worst_var = std::max(
                                worst_var, std::abs(observables::variance(probe, obs) -
                                                    oracle::fock_variance(spec, n_f, obs)));
                        }
                    }
                }
            }
        }
    }
    CHECK(worst_fid <= 1e-10);
    CHECK(worst_var <= 1e-10);
}
