#include "starklab/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <istream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "starklab/fisher.hpp"
#include "starklab/observables.hpp"

namespace starklab::lab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

int resolve_workers(int requested, int n_tasks) {
    int workers = requested;
    if (workers <= 0) {
        if (const char* env = std::getenv("STARKLAB_WORKERS")) workers = std::atoi(env);
    }
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
    return std::min(workers, std::max(n_tasks, 1));
}

void parallel_for(int n_tasks, int workers, const std::function<void(int)>& body) {
    workers = resolve_workers(workers, n_tasks);
    if (workers == 1) {
        for (int i = 0; i < n_tasks; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n_tasks) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string format17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct SampleOut {
    double value = kNaN;
    bool converged = false;
    bool degenerate = false;
};

SampleOut evaluate_quantity(const model::LatticeSpec& spec, const probes::ProbeKind& kind,
                            Quantity q) {
    SampleOut out;
    try {
        switch (q) {
            case Quantity::qfi: {
                auto est = fisher::qfi(spec, kind);
                out = {est.value, est.converged, est.degenerate};
                break;
            }
            case Quantity::ofi_cdw: {
                auto est = observables::ofi(spec, kind, observables::cdw_observable(spec.L));
                out = {est.value, est.converged, est.degenerate};
                break;
            }
            case Quantity::ofi_h2: {
                auto est = observables::ofi(spec, kind, observables::position_observable(spec.L));
                out = {est.value, est.converged, est.degenerate};
                break;
            }
        }
    } catch (const std::exception&) {
        out = {kNaN, false, true};  // recorded through the converged fraction
    }
    return out;
}

}  // namespace

const char* quantity_label(Quantity q) {
    switch (q) {
        case Quantity::qfi: return "qfi";
        case Quantity::ofi_cdw: return "ofi_cdw";
        case Quantity::ofi_h2: return "ofi_h2";
    }
    return "?";
}

std::optional<Quantity> quantity_from_label(const std::string& label) {
    if (label == "qfi") return Quantity::qfi;
    if (label == "ofi_cdw") return Quantity::ofi_cdw;
    if (label == "ofi_h2") return Quantity::ofi_h2;
    return std::nullopt;
}

double phi_sample(std::uint64_t seed, std::uint64_t row, std::uint64_t k) {
    std::uint64_t z = splitmix64(splitmix64(splitmix64(seed) + row) + k);
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

std::vector<double> log_spaced_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("log_spaced_grid: need 0 < lo < hi");
    if (points < 2) throw std::invalid_argument("log_spaced_grid: need at least 2 points");
    std::vector<double> grid(points);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < points; ++i)
        grid[i] = std::exp(llo + (lhi - llo) * i / (points - 1));
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

void validate(const SweepConfig& config) {
    if (config.sizes.empty()) throw ConfigError("sizes", "at least one system size is required");
    for (int L : config.sizes)
        if (!model::is_fibonacci(L))
            throw ConfigError("sizes", "L=" + std::to_string(L) + " is not a Fibonacci number");
    if (config.h_grid.empty()) throw ConfigError("h_grid", "at least one h value is required");
    for (std::size_t i = 0; i < config.h_grid.size(); ++i) {
        if (!(config.h_grid[i] > 0.0)) throw ConfigError("h_grid", "values must be positive");
        if (i > 0 && !(config.h_grid[i] > config.h_grid[i - 1]))
            throw ConfigError("h_grid", "values must be strictly ascending");
    }
    if (config.phase_samples < 1) throw ConfigError("phase_samples", "must be >= 1");
    if (config.observables.empty()) throw ConfigError("observables", "at least one quantity");
    for (std::size_t i = 0; i < config.observables.size(); ++i)
        for (std::size_t j = i + 1; j < config.observables.size(); ++j)
            if (config.observables[i] == config.observables[j])
                throw ConfigError("observables", "duplicate quantity");
    if (config.phi_fixed && !(*config.phi_fixed >= 0.0 && *config.phi_fixed < 1.0))
        throw ConfigError("phi_fixed", "must lie in [0, 1)");
    for (const auto& [L, n_f] : config.fillings) {
        if (std::find(config.sizes.begin(), config.sizes.end(), L) == config.sizes.end())
            throw ConfigError("fillings", "L=" + std::to_string(L) + " is not in sizes");
        if (n_f < 1 || n_f > L)
            throw ConfigError("fillings", "n_f out of range for L=" + std::to_string(L));
    }
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config, int workers,
                                   std::vector<SampleValue>* sample_log) {
    validate(config);

    struct Cell {
        int row;
        int L;
        int n_f;  // 0 for single
        double h;
    };
    std::vector<Cell> cells;
    for (std::size_t row = 0; row < config.sizes.size(); ++row) {
        const int L = config.sizes[row];
        int n_f = 0;
        if (config.probe == ProbeFamily::half_filled) {
            auto it = config.fillings.find(L);
            n_f = (it != config.fillings.end()) ? it->second : probes::default_half_filling(L);
        }
        for (double h : config.h_grid) cells.push_back({static_cast<int>(row), L, n_f, h});
    }

    const int S = config.phase_samples;
    const int Q = static_cast<int>(config.observables.size());
    const int n_cells = static_cast<int>(cells.size());
    std::vector<SampleOut> out(static_cast<std::size_t>(n_cells) * Q * S);
    std::vector<double> phis(static_cast<std::size_t>(n_cells) * S);

    parallel_for(n_cells * S, workers, [&](int task) {
        const int c = task / S;
        const int k = task % S;
        const Cell& cell = cells[c];
        const double phi =
            config.phi_fixed ? *config.phi_fixed
                             : phi_sample(config.seed, static_cast<std::uint64_t>(cell.row),
                                          static_cast<std::uint64_t>(k));
        phis[static_cast<std::size_t>(c) * S + k] = phi;
        model::LatticeSpec spec;
        spec.L = cell.L;
        spec.V = config.V;
        spec.h = cell.h;
        spec.phi = phi;
        spec.omega = model::omega_for_size(cell.L);
        const probes::ProbeKind kind = (config.probe == ProbeFamily::single)
                                           ? probes::probe_single()
                                           : probes::probe_half_filled(cell.n_f);
        for (int q = 0; q < Q; ++q)
            out[(static_cast<std::size_t>(c) * Q + q) * S + k] =
                evaluate_quantity(spec, kind, config.observables[q]);
    });

    std::vector<SweepRecord> records;
    records.reserve(static_cast<std::size_t>(n_cells) * Q);
    for (int c = 0; c < n_cells; ++c) {
        for (int q = 0; q < Q; ++q) {
            const SampleOut* slot = &out[(static_cast<std::size_t>(c) * Q + q) * S];
            Kahan sum;
            int valid = 0, clean = 0;
            for (int k = 0; k < S; ++k) {
                if (!std::isnan(slot[k].value)) {
                    sum.add(slot[k].value);
                    ++valid;
                }
                if (slot[k].converged && !slot[k].degenerate) ++clean;
            }
            const double mean = valid > 0 ? sum.sum / valid : kNaN;
            Kahan sq;
            for (int k = 0; k < S; ++k)
                if (!std::isnan(slot[k].value)) {
                    const double d = slot[k].value - mean;
                    sq.add(d * d);
                }
            const double std_error =
                valid > 1 ? std::sqrt(sq.sum / (static_cast<double>(valid) - 1.0) / valid) : 0.0;

            SweepRecord rec;
            rec.L = cells[c].L;
            rec.n_f = cells[c].n_f;
            rec.V = config.V;
            rec.h = cells[c].h;
            rec.quantity = quantity_label(config.observables[q]);
            rec.mean = mean;
            rec.std_error = std_error;
            rec.samples = S;
            rec.converged_fraction = static_cast<double>(clean) / S;
            records.push_back(rec);

            if (sample_log) {
                for (int k = 0; k < S; ++k) {
                    SampleValue sv;
                    sv.L = cells[c].L;
                    sv.n_f = cells[c].n_f;
                    sv.h = cells[c].h;
                    sv.quantity = config.observables[q];
                    sv.sample = k;
                    sv.phi = phis[static_cast<std::size_t>(c) * S + k];
                    sv.value = slot[k].value;
                    sv.converged = slot[k].converged;
                    sv.degenerate = slot[k].degenerate;
                    sample_log->push_back(sv);
                }
            }
        }
    }
    return records;
}

ScalingFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_power_law: need at least 3 points");
    for (const auto& [L, F] : points) {
        if (!(F > 0.0))
            throw std::invalid_argument("fit_power_law: nonpositive value at L=" +
                                        format17(L));
        if (!model::is_fibonacci(static_cast<long long>(std::llround(L))) ||
            std::llround(L) < 2)
            throw std::invalid_argument("fit_power_law: requires Fibonacci system sizes (L=" +
                                        format17(L) + ")");
    }
    const auto n = static_cast<double>(points.size());
    double sx = 0, sy = 0;
    for (const auto& [L, F] : points) {
        sx += std::log(L);
        sy += std::log(F);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [L, F] : points) {
        const double dx = std::log(L) - mx;
        const double dy = std::log(F) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_power_law: degenerate size set");
    ScalingFit fit;
    fit.beta = sxy / sxx;
    fit.log_prefactor = my - fit.beta * mx;
    double ss_res = 0.0;
    for (const auto& [L, F] : points) {
        const double r = std::log(F) - (fit.log_prefactor + fit.beta * std::log(L));
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.points = static_cast<int>(points.size());
    return fit;
}

std::string to_csv(const std::vector<SweepRecord>& records) {
    std::string csv = "L,n_f,V,h,quantity,mean,stderr,samples,converged_fraction\n";
    for (const auto& r : records) {
        csv += std::to_string(r.L);
        csv += ',';
        csv += std::to_string(r.n_f);
        csv += ',';
        csv += format17(r.V);
        csv += ',';
        csv += format17(r.h);
        csv += ',';
        csv += r.quantity;
        csv += ',';
        csv += format17(r.mean);
        csv += ',';
        csv += format17(r.std_error);
        csv += ',';
        csv += std::to_string(r.samples);
        csv += ',';
        csv += format17(r.converged_fraction);
        csv += '\n';
    }
    return csv;
}

std::vector<SweepRecord> records_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("records_from_csv: empty input");
    if (line == "L,n_f,V,h,quantity,mean,stderr,samples,converged_fraction\r")
        line.pop_back();
    if (line != "L,n_f,V,h,quantity,mean,stderr,samples,converged_fraction")
        throw std::invalid_argument("records_from_csv: unexpected header: " + line);
    std::vector<SweepRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 9)
            throw std::invalid_argument("records_from_csv: bad field count on line " +
                                        std::to_string(line_no));
        auto num = [&](int idx) {
            char* end = nullptr;
            double v = std::strtod(fields[idx].c_str(), &end);
            if (end == fields[idx].c_str() || *end != '\0')
                throw std::invalid_argument("records_from_csv: bad number on line " +
                                            std::to_string(line_no));
            return v;
        };
        SweepRecord r;
        r.L = static_cast<int>(num(0));
        r.n_f = static_cast<int>(num(1));
        r.V = num(2);
        r.h = num(3);
        r.quantity = fields[4];
        r.mean = num(5);
        r.std_error = num(6);
        r.samples = static_cast<int>(num(7));
        r.converged_fraction = num(8);
        records.push_back(r);
    }
    return records;
}

SweepConfig parse_sweep_config(std::istream& in) {
    SweepConfig config;
    config.observables.clear();

    bool saw_phase_samples = false, saw_phi_fixed = false;
    bool saw_h_grid = false, saw_h_min = false, saw_h_max = false, saw_h_points = false;
    double h_min = 1e-10, h_max = 10.0;
    int h_points = 40;

    auto trim = [](std::string s) {
        const char* ws = " \t";
        auto b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        auto e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    };
    auto split = [&trim](const std::string& s, char sep) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        for (;;) {
            auto pos = s.find(sep, start);
            parts.push_back(trim(s.substr(start, pos - start)));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        return parts;
    };
    auto to_double = [](const std::string& key, const std::string& v) {
        char* end = nullptr;
        double x = std::strtod(v.c_str(), &end);
        if (v.empty() || end == v.c_str() || *end != '\0')
            throw ConfigError(key, "malformed number '" + v + "'");
        return x;
    };
    auto to_int = [&to_double](const std::string& key, const std::string& v) {
        double x = to_double(key, v);
        if (x != std::floor(x)) throw ConfigError(key, "expected an integer, got '" + v + "'");
        return static_cast<long long>(x);
    };

    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(trim(line), "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) throw ConfigError(key, "empty value");

        if (key == "probe") {
            if (value == "single")
                config.probe = ProbeFamily::single;
            else if (value == "half_filled")
                config.probe = ProbeFamily::half_filled;
            else
                throw ConfigError(key, "expected 'single' or 'half_filled', got '" + value + "'");
        } else if (key == "sizes") {
            for (const auto& part : split(value, ','))
                config.sizes.push_back(static_cast<int>(to_int(key, part)));
        } else if (key == "V") {
            config.V = to_double(key, value);
        } else if (key == "h_grid") {
            for (const auto& part : split(value, ','))
                config.h_grid.push_back(to_double(key, part));
            saw_h_grid = true;
        } else if (key == "h_min") {
            h_min = to_double(key, value);
            saw_h_min = true;
        } else if (key == "h_max") {
            h_max = to_double(key, value);
            saw_h_max = true;
        } else if (key == "h_points") {
            h_points = static_cast<int>(to_int(key, value));
            saw_h_points = true;
        } else if (key == "observables") {
            for (const auto& part : split(value, ',')) {
                auto q = quantity_from_label(part);
                if (!q) throw ConfigError(key, "unknown quantity '" + part + "'");
                config.observables.push_back(*q);
            }
        } else if (key == "phase_samples") {
            config.phase_samples = static_cast<int>(to_int(key, value));
            saw_phase_samples = true;
        } else if (key == "seed") {
            config.seed = static_cast<std::uint64_t>(to_int(key, value));
        } else if (key == "phi_fixed") {
            config.phi_fixed = to_double(key, value);
            saw_phi_fixed = true;
        } else if (key == "fillings") {
            for (const auto& part : split(value, ',')) {
                auto colon = part.find(':');
                if (colon == std::string::npos)
                    throw ConfigError(key, "expected 'L:n_f' pairs, got '" + part + "'");
                int L = static_cast<int>(to_int(key, trim(part.substr(0, colon))));
                int n_f = static_cast<int>(to_int(key, trim(part.substr(colon + 1))));
                config.fillings[L] = n_f;
            }
        } else {
            throw ConfigError(key, "unknown key");
        }
    }

    if (saw_h_grid && (saw_h_min || saw_h_max || saw_h_points))
        throw ConfigError("h_grid", "give either h_grid or h_min/h_max/h_points, not both");
    if (!saw_h_grid) config.h_grid = log_spaced_grid(h_min, h_max, h_points);
    if (config.observables.empty()) config.observables = {Quantity::qfi};
    if (config.probe == ProbeFamily::half_filled) {
        // half-filled runs default to a single phi = 0 evaluation
        if (!saw_phi_fixed) config.phi_fixed = 0.0;
        if (!saw_phase_samples) config.phase_samples = 1;
    }
    validate(config);
    return config;
}

}  // namespace starklab::lab
