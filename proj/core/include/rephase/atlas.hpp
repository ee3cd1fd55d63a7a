#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rephase/fuelopt.hpp"

// Tabulated solutions: the time-optimal l1(dL) / chi(dL) curve and the fuel
// (dL, eta) grid used for warm starts.

namespace rephase::atlas {

struct TimeCurvePoint {
    double delta_L;
    double l1;
    double chi;
    bool converged;
};

/// Points dL = first, first + step, ... <= last (inclusive within step/2).
/// Failures are recorded with converged = false.
std::vector<TimeCurvePoint> generate_time_atlas(double first, double last, double step);

void write_time_curve(const std::vector<TimeCurvePoint>& curve, const std::string& path);

struct AtlasCell {
    double l0_times_dL;
    double l1;
    double J_norm;
    int n_arcs;
    bool converged;
    double epsilon;
};

struct AtlasMeta {
    int schema_version = 1;
    double epsilon = 0.0;
    std::string generator_version;
    std::uint64_t rng_seed = 0;
    std::string seed_policy;
};

/// Cells are stored row major: cell(i, j) belongs to dL_axis[i], eta_axis[j].
struct AtlasGrid {
    std::vector<double> dL_axis;
    std::vector<double> eta_axis;
    std::vector<AtlasCell> cells;
    AtlasMeta meta;

    const AtlasCell& cell(std::size_t i, std::size_t j) const {
        return cells[i * eta_axis.size() + j];
    }
    AtlasCell& cell(std::size_t i, std::size_t j) { return cells[i * eta_axis.size() + j]; }
    double converged_fraction() const;
    /// Share of dL rows along which the converged J_norm values never
    /// increase with eta.
    double monotone_fraction() const;
};

/// Evenly spaced axis from first to last with n points.
std::vector<double> linspace(double first, double last, std::size_t n);

struct FuelAtlasOptions {
    double epsilon = 0.1;
    /// Worker threads; 0 uses the hardware concurrency.
    unsigned jobs = 1;
    fuelopt::FuelOptOptions solver{};
};

/// Solves every cell. Each dL row is swept along eta, seeding a cell with the
/// converged neighbour before it; rows run independently on the workers.
AtlasGrid generate_fuel_atlas(const std::vector<double>& dL_axis,
                              const std::vector<double>& eta_axis,
                              const FuelAtlasOptions& options = {});

enum class CandidateSource { interpolated, nearest_cell, analytic };
std::string to_string(CandidateSource s);

struct SeedCandidate {
    double l0;
    double l1;
    CandidateSource source;
    /// J / (a_max dL) carried along with the seed: bilinear, the corner's
    /// value, or 1 - eta for the analytic estimate.
    double J_norm;
};

/// Adjacent cells whose l1 differ by more than this are treated as lying on
/// opposite sides of a costate jump.
inline constexpr double kMutationThreshold = 0.5;

/// Bilinear seed inside the enclosing cell when its four corners converged
/// with the same arc count and l1 within kMutationThreshold of each other.
/// Otherwise one candidate per distinct converged corner, nearest first.
/// Outside the grid, or with no usable corner, the analytic estimate.
std::vector<SeedCandidate> interpolate_seed(const AtlasGrid& grid, double delta_L, double eta);

std::vector<fuelopt::Seed> to_seeds(const std::vector<SeedCandidate>& candidates);

/// CSV body at `path` and JSON metadata at `path + ".json"`.
void write_atlas(const AtlasGrid& grid, const std::string& path);

/// Throws ParseError naming the line or the offending column.
AtlasGrid read_atlas(const std::string& path);

}  // namespace rephase::atlas
