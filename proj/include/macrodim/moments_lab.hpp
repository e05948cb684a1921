#pragma once

#include "macrodim/simulators.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace macrodim {

struct MomentEstimate {
    std::string model;
    double k = 1.0;
    double t = 0.0;
    double estimate = 0.0;
    double half_width = 0.0;  // 95%
    std::size_t replicas = 0;
    bool dominance = false;   // top 1% of replicas carry more than half the mean
};

enum class MomentModel { she_1d, linear_she, pam_colored };

MomentModel parse_moment_model(const std::string& s);
std::string to_string(MomentModel m);

struct MomentConfig {
    MomentModel model = MomentModel::she_1d;
    SheSpec she;             // she_1d; t_end is raised to the largest requested time
    ColoredSpec colored;     // pam_colored; same
    double linear_x_max = 16.0;
    double linear_dx = 0.25;
    bool spatial_average = true;  // otherwise the value at the origin
    Exec exec = Exec::parallel;
};

inline constexpr double kMaxMomentOrder = 6.0;
inline constexpr std::size_t kMinMomentReplicas = 100;

std::vector<MomentEstimate> moment_ensemble(const MomentConfig& cfg, std::span<const double> ks,
                                            std::span<const double> ts, std::size_t replicas,
                                            std::uint64_t seed);

// Mean, 95% half-width and dominance of per-replica values.
MomentEstimate summarize_replicas(std::span<const double> values);

struct LyapunovFit {
    double k = 0.0;
    double slope = 0.0;
    double stderr_ = 0.0;
    double intercept = 0.0;
    std::vector<double> t;
    std::vector<double> residuals;
    bool unreliable = false;
};

LyapunovFit lyapunov_fit(std::span<const MomentEstimate> table, double k, double t_min = 0.2,
                         double t_max = HUGE_VAL);

enum class Verdict3 { intermittent, not_intermittent, indeterminate };
std::string to_string(Verdict3 v);

struct IntermittencyReport {
    Verdict3 verdict = Verdict3::indeterminate;
    std::vector<double> ratios;  // lambda(k)/k in input order
    std::vector<double> gaps;
    std::vector<double> gap_stderr;
    bool increasing() const { return verdict == Verdict3::intermittent; }
};

// Fits must be sorted by k.
IntermittencyReport intermittency_check(std::span<const LyapunovFit> fits);

enum class CorrelationKind { zero, constant, gaussian };

struct CorrelationSpec {
    CorrelationKind kind = CorrelationKind::gaussian;
    double f0 = 0.0;   // constant
    BumpSpec bump;     // gaussian

    double operator()(double r2, int d) const;
    double at_zero(int d) const;
    std::string describe(int d) const;
};

CorrelationSpec parse_correlation(const std::string& s);

struct FeynmanKacSpec {
    int k = 2;
    int d = 2;
    double t = 0.5;
    CorrelationSpec f;
    std::size_t paths = 20000;
    double ds = 1.0 / 256;
    std::vector<int> relabel;  // optional permutation of the k path indices
    Exec exec = Exec::parallel;
};

inline constexpr double kMaxOracleNormals = 4.0e9;

MomentEstimate feynman_kac_oracle(const FeynmanKacSpec& spec, std::uint64_t seed);

struct TailFit {
    double b = 2.0;
    bool b_free = false;
    double c_hat = 0.0;
    double kappa = 0.0;  // coefficient of log z
    double intercept = 0.0;
    double z_lo = 0.0;
    double z_hi = 0.0;
    std::size_t points = 0;
    bool range_shrunk = false;
    double weighted_rss = 0.0;
};

inline constexpr std::size_t kMinTailSamples = 100000;

// -log P(X > z) ~ a + kappa log z + c z^b on log-spaced z in [z_lo, z_hi].
// Nonpositive z_hi selects the largest z with ten exceedances.
TailFit tail_exponent_fit(std::span<const double> samples, std::optional<double> b, double z_lo,
                          double z_hi = 0.0, int points = 40);

struct PickandsRow {
    double x = 0.0;
    double empirical = 0.0;
    double half_width = 0.0;
    double asymptotic = 0.0;
    double ratio = 0.0;
    std::size_t replicas = 0;
};

double pickands_asymptotic(double x);
std::vector<PickandsRow> pickands_check(std::span<const double> xs, double dt,
                                        std::size_t replicas, std::uint64_t seed,
                                        Exec exec = Exec::parallel);

}  // namespace macrodim
