#include "rephase/atlas.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

#include "rephase/error.hpp"
#include "rephase/timeopt.hpp"

namespace rephase::atlas {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Index i with axis[i] <= x <= axis[i + 1], or -1 outside the axis.
long enclosing(const std::vector<double>& axis, double x) {
    if (axis.size() < 2 || x < axis.front() || x > axis.back()) return -1;
    const auto it = std::upper_bound(axis.begin(), axis.end(), x);
    const long i = static_cast<long>(it - axis.begin()) - 1;
    return std::min(i, static_cast<long>(axis.size()) - 2);
}

SeedCandidate analytic_candidate(double delta_L, double eta) {
    const auto regime = delta_L < 1.0 ? fuelopt::Regime::short_term : fuelopt::Regime::long_term;
    const auto e = fuelopt::analytic_fuel_estimate(delta_L, eta, regime);
    return {e.l0, e.l1, CandidateSource::analytic, 1.0 - eta};
}

void check_axis(const std::vector<double>& axis, const char* name) {
    if (axis.empty()) throw DomainError(std::string(name) + " axis is empty");
    for (std::size_t i = 1; i < axis.size(); ++i) {
        if (!(axis[i] > axis[i - 1])) {
            throw DomainError(std::string(name) + " axis must be strictly increasing");
        }
    }
}

}  // namespace

std::vector<TimeCurvePoint> generate_time_atlas(double first, double last, double step) {
    if (!(step > 0.0)) throw DomainError("time atlas step must be positive");
    if (!(first > 0.0) || !(last >= first)) throw DomainError("time atlas range is invalid");
    std::vector<TimeCurvePoint> out;
    std::optional<double> seed;
    const auto n = static_cast<long>(std::floor((last - first) / step + 0.5));
    for (long k = 0; k <= n; ++k) {
        const double dL = first + static_cast<double>(k) * step;
        try {
            const double l1 = timeopt::solve_lambda1(dL, seed);
            out.push_back({dL, l1, timeopt::f2(dL, l1), true});
            seed = l1;
        } catch (const Error&) {
            out.push_back({dL, kNaN, kNaN, false});
            seed.reset();
        }
    }
    return out;
}

double AtlasGrid::converged_fraction() const {
    if (cells.empty()) return 0.0;
    const auto n = std::count_if(cells.begin(), cells.end(),
                                 [](const AtlasCell& c) { return c.converged; });
    return static_cast<double>(n) / static_cast<double>(cells.size());
}

double AtlasGrid::monotone_fraction() const {
    if (dL_axis.empty()) return 0.0;
    std::size_t monotone = 0;
    for (std::size_t i = 0; i < dL_axis.size(); ++i) {
        double prev = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (std::size_t j = 0; j < eta_axis.size(); ++j) {
            const AtlasCell& c = cell(i, j);
            if (!c.converged) continue;
            if (c.J_norm > prev) ok = false;
            prev = c.J_norm;
        }
        if (ok) ++monotone;
    }
    return static_cast<double>(monotone) / static_cast<double>(dL_axis.size());
}

std::vector<double> linspace(double first, double last, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {first};
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = first + (last - first) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    out.back() = last;
    return out;
}

AtlasGrid generate_fuel_atlas(const std::vector<double>& dL_axis,
                              const std::vector<double>& eta_axis,
                              const FuelAtlasOptions& options) {
    check_axis(dL_axis, "dL");
    check_axis(eta_axis, "eta");
    AtlasGrid grid;
    grid.dL_axis = dL_axis;
    grid.eta_axis = eta_axis;
    grid.cells.assign(dL_axis.size() * eta_axis.size(),
                      {kNaN, kNaN, kNaN, 0, false, options.epsilon});
    grid.meta.epsilon = options.epsilon;
    grid.meta.generator_version = REPHASE_VERSION;
    grid.meta.rng_seed = options.solver.rng_seed;
    grid.meta.seed_policy = "previous eta cell, switch condition, random";

    auto solve_row = [&](std::size_t i) {
        const double dL = dL_axis[i];
        std::optional<fuelopt::Seed> prev;
        for (std::size_t j = 0; j < eta_axis.size(); ++j) {
            AtlasCell& cell = grid.cell(i, j);
            fuelopt::FuelOptOptions opt = options.solver;
            opt.rng_seed = options.solver.rng_seed + i * eta_axis.size() + j;
            try {
                const auto problem =
                    fuelopt::FuelOptProblem::from_eta(dL, eta_axis[j], options.epsilon);
                std::vector<fuelopt::Seed> seeds;
                if (prev) seeds.push_back(*prev);
                const auto sol = fuelopt::solve_fuel_optimal(problem, seeds, opt);
                cell = {sol.l0 * dL, sol.l1, sol.J_norm(), sol.n_arcs, true, options.epsilon};
                prev = fuelopt::Seed{sol.l0, sol.l1, fuelopt::SeedSource::atlas};
            } catch (const Error&) {
                prev.reset();
            }
        }
    };

    unsigned jobs = options.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : options.jobs;
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(dL_axis.size()));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < dL_axis.size(); ++i) solve_row(i);
        return grid;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < dL_axis.size(); i = next++) solve_row(i);
        });
    }
    for (auto& t : workers) t.join();
    return grid;
}

std::string to_string(CandidateSource s) {
    switch (s) {
        case CandidateSource::interpolated: return "interpolated";
        case CandidateSource::nearest_cell: return "nearest-cell";
        case CandidateSource::analytic: return "analytic";
    }
    return "unknown";
}

std::vector<SeedCandidate> interpolate_seed(const AtlasGrid& grid, double delta_L, double eta) {
    const long i = enclosing(grid.dL_axis, delta_L);
    const long j = enclosing(grid.eta_axis, eta);
    if (i < 0 || j < 0) return {analytic_candidate(delta_L, eta)};

    const double x0 = grid.dL_axis[i], x1 = grid.dL_axis[i + 1];
    const double y0 = grid.eta_axis[j], y1 = grid.eta_axis[j + 1];
    const double tx = (delta_L - x0) / (x1 - x0);
    const double ty = (eta - y0) / (y1 - y0);

    struct Corner {
        const AtlasCell* cell;
        double weight;
        double distance;
    };
    const std::array<Corner, 4> corners = {{
        {&grid.cell(i, j), (1 - tx) * (1 - ty), std::hypot(tx, ty)},
        {&grid.cell(i + 1, j), tx * (1 - ty), std::hypot(1 - tx, ty)},
        {&grid.cell(i, j + 1), (1 - tx) * ty, std::hypot(tx, 1 - ty)},
        {&grid.cell(i + 1, j + 1), tx * ty, std::hypot(1 - tx, 1 - ty)},
    }};

    bool smooth = true;
    for (const auto& a : corners) {
        if (!a.cell->converged) smooth = false;
    }
    if (smooth) {
        for (const auto& a : corners) {
            for (const auto& b : corners) {
                if (a.cell->n_arcs != b.cell->n_arcs ||
                    std::abs(a.cell->l1 - b.cell->l1) > kMutationThreshold) {
                    smooth = false;
                }
            }
        }
    }
    if (smooth) {
        double l0dL = 0.0, l1 = 0.0, J = 0.0;
        for (const auto& c : corners) {
            l0dL += c.weight * c.cell->l0_times_dL;
            l1 += c.weight * c.cell->l1;
            J += c.weight * c.cell->J_norm;
        }
        return {{l0dL / delta_L, l1, CandidateSource::interpolated, J}};
    }

    std::vector<Corner> usable;
    for (const auto& c : corners) {
        if (c.cell->converged) usable.push_back(c);
    }
    std::stable_sort(usable.begin(), usable.end(),
                     [](const Corner& a, const Corner& b) { return a.distance < b.distance; });
    std::vector<SeedCandidate> out;
    for (const auto& c : usable) {
        const double l0 = c.cell->l0_times_dL / delta_L;
        const bool seen = std::any_of(out.begin(), out.end(), [&](const SeedCandidate& s) {
            return s.l0 == l0 && s.l1 == c.cell->l1;
        });
        if (!seen) out.push_back({l0, c.cell->l1, CandidateSource::nearest_cell, c.cell->J_norm});
    }
    if (out.empty()) out.push_back(analytic_candidate(delta_L, eta));
    return out;
}

std::vector<fuelopt::Seed> to_seeds(const std::vector<SeedCandidate>& candidates) {
    std::vector<fuelopt::Seed> out;
    for (const auto& c : candidates) {
        out.push_back({c.l0, c.l1,
                       c.source == CandidateSource::analytic ? fuelopt::SeedSource::analytic
                                                             : fuelopt::SeedSource::atlas});
    }
    return out;
}

}  // namespace rephase::atlas
