#pragma once

#include "macrodim/rng.hpp"
#include "macrodim/shell_geometry.hpp"
#include "macrodim/simulators.hpp"

#include <span>
#include <string>
#include <vector>

namespace macrodim {

enum class GaugeKind { bm_lil, sqrt_log, log_two_thirds, sqrt_log_colored };

GaugeKind parse_gauge_kind(const std::string& s);
std::string to_string(GaugeKind k);

struct GaugeSpec {
    GaugeKind kind = GaugeKind::sqrt_log;
    double norm = 1.0;
    double start = 0.0;  // 0 picks the kind's default

    double start_abscissa() const;
};

// Throws DomainError below the start abscissa.
double gauge_eval(const GaugeSpec& g, double x);

enum class Transform { identity, log, signed_value };

Transform parse_transform(const std::string& s);
std::string to_string(Transform t);

struct ExceedanceSpec {
    GaugeSpec gauge;
    double gamma = 1.0;
};

struct ExceedanceInfo {
    std::size_t samples_used = 0;
    bool all_below_start = false;
    std::size_t bridge_crossings = 0;
};

// Unit cell z is occupied iff some sample in [z, z+1) has transform(value) >= gamma g(x).
// With a bridge rng, an intra-step crossing between two samples below the threshold
// is drawn with the Brownian-bridge probability and marks the cell of the left sample.
PixelSet exceedance_pixels(const TrajectoryGrid& data, const ExceedanceSpec& spec,
                           Transform tr = Transform::identity, Rng* bridge = nullptr,
                           ExceedanceInfo* info = nullptr);
PixelSet exceedance_pixels(const Field& data, const ExceedanceSpec& spec,
                           Transform tr = Transform::identity, ExceedanceInfo* info = nullptr);

// Same sets for several levels in one pass; gammas need not be sorted.
std::vector<PixelSet> exceedance_levels(const TrajectoryGrid& data, const GaugeSpec& gauge,
                                        std::span<const double> gammas,
                                        Transform tr = Transform::identity,
                                        Rng* bridge = nullptr);
std::vector<PixelSet> exceedance_levels(const Field& data, const GaugeSpec& gauge,
                                        std::span<const double> gammas,
                                        Transform tr = Transform::identity);

}  // namespace macrodim
