#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "starklab/model.hpp"
#include "starklab/probes.hpp"

namespace starklab::lab {

enum class Quantity { qfi, ofi_cdw, ofi_h2 };

const char* quantity_label(Quantity q);
std::optional<Quantity> quantity_from_label(const std::string& label);

enum class ProbeFamily { single, half_filled };

/// One phase-averaged sweep over an (L, h) grid.
struct SweepConfig {
    std::vector<int> sizes;               // Fibonacci system sizes
    double V = 2.0;
    std::vector<double> h_grid;           // strictly positive, ascending
    ProbeFamily probe = ProbeFamily::single;
    std::map<int, int> fillings;          // per-size n_f overrides (half-filled)
    std::vector<Quantity> observables{Quantity::qfi};
    int phase_samples = 200;
    std::uint64_t seed = 0;
    std::optional<double> phi_fixed;      // disables phase sampling
};

void validate(const SweepConfig& config);

struct SweepRecord {
    int L = 0;
    int n_f = 0;  // 0 for the single-particle probe
    double V = 0.0;
    double h = 0.0;
    std::string quantity;
    double mean = 0.0;
    double std_error = 0.0;
    int samples = 0;
    double converged_fraction = 0.0;
};

/// Raw per-sample evaluation, kept for cross-record checks (Cramer-Rao).
struct SampleValue {
    int L = 0;
    int n_f = 0;
    double h = 0.0;
    Quantity quantity = Quantity::qfi;
    int sample = 0;
    double phi = 0.0;
    double value = 0.0;
    bool converged = false;
    bool degenerate = false;
};

/// Runs the sweep as a parallel map over (size, h, sample) tasks with a
/// fixed-order compensated reduction, so identical configs give bit-identical
/// results for any worker count. workers = 0 reads STARKLAB_WORKERS, falling
/// back to the hardware concurrency.
std::vector<SweepRecord> run_sweep(const SweepConfig& config, int workers = 0,
                                   std::vector<SampleValue>* sample_log = nullptr);

/// Counter-based phase stream: sample k of size-row `row` is a pure function
/// of (seed, row, k), uniform in [0,1). All quantities and h points of a row
/// share the same disorder realizations.
double phi_sample(std::uint64_t seed, std::uint64_t row, std::uint64_t k);

std::vector<double> log_spaced_grid(double lo, double hi, int points);

/// Least-squares power law F ~ L^beta on (ln L, ln F).
struct ScalingFit {
    double beta = 0.0;
    double log_prefactor = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

/// Requires >= 3 points, positive values, and Fibonacci sizes (non-Fibonacci
/// sizes are for exploration only and are rejected here).
ScalingFit fit_power_law(const std::vector<std::pair<double, double>>& points);

/// CSV with column order L, n_f, V, h, quantity, mean, stderr, samples,
/// converged_fraction; numbers carry 17 significant digits.
std::string to_csv(const std::vector<SweepRecord>& records);
std::vector<SweepRecord> records_from_csv(std::istream& in);

/// Raised on bad sweep-config input; carries the offending key.
struct ConfigError : std::runtime_error {
    std::string key;
    ConfigError(std::string k, const std::string& message)
        : std::runtime_error("config key '" + k + "': " + message), key(std::move(k)) {}
};

/// Flat key = value text (comments with '#'). Keys: probe, sizes, V, h_grid,
/// h_min, h_max, h_points, observables, phase_samples, seed, phi_fixed,
/// fillings.
SweepConfig parse_sweep_config(std::istream& in);

struct ValidationReport {
    int checks = 0;
    int failures = 0;
    bool ok() const { return failures == 0; }
};

/// Oracle-equivalence and invariant suites, printing one line per check
/// group. Used by the `validate` CLI command and the test suite.
ValidationReport run_validation(std::ostream& out);

int run_cli(int argc, char** argv);

}  // namespace starklab::lab
