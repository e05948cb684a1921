#pragma once

#include "macrodim/common.hpp"
#include "macrodim/rng.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace macrodim {

struct TrajectoryGrid {
    double t0 = 0.0;
    double step = 1.0;
    std::vector<double> values;
    std::string model;

    double time(std::size_t i) const { return t0 + double(i) * step; }
};

// Periodic grid starting at x0 on every axis. 2-D values are row-major, index i*ny + j.
struct Field {
    int d = 1;
    double x0 = 0.0;
    double dx = 1.0;
    double t = 0.0;
    std::size_t nx = 0;
    std::size_t ny = 1;
    std::vector<double> values;
    std::string model;

    double coord(std::size_t i) const { return x0 + double(i) * dx; }
};

TrajectoryGrid simulate_bm(double t_max, double dt, Rng& rng);
TrajectoryGrid simulate_ou(double t_max, double dt, Rng& rng);
// Max of the stationary OU chain over [0, length] without storing it.
double ou_running_max(double length, double dt, Rng& rng);

// Number of grid points for [0, t_max] at step dt; ResourceError past kMaxSamples.
std::size_t grid_points(double t_max, double dt);

// Stationary covariance of the linear heat equation started from zero.
double linear_she_covariance(double t, double x);
// Its spectral density (1 - e^{-t xi^2}) / (2 pi xi^2).
double linear_she_spectral_density(double t, double xi);

// Exact grid sampler for x -> Z_t(x) on [0, x_max] by circulant embedding.
class LinearSheSampler {
public:
    LinearSheSampler(double t, double x_max, double dx);

    // Two independent samples from one transform.
    std::pair<Field, Field> sample_pair(Rng& rng) const;
    Field sample(Rng& rng) const { return sample_pair(rng).first; }

    std::size_t points() const { return points_; }
    std::size_t embedding_size() const { return n_; }
    // Most negative eigenvalue relative to the largest, clipped to zero before sampling.
    double clipped_ratio() const { return clipped_; }

private:
    double t_, dx_;
    std::size_t points_, n_;
    std::vector<double> sqrt_eig_;
    double clipped_ = 0.0;
};

Field sample_linear_she(double t, double x_max, double dx, Rng& rng);

struct WindowedSheSpec {
    double t = 1.0;
    std::vector<double> x;       // evaluation points
    double B = 8.0;
    double dy = 0.04;
    int time_intervals = 32;     // geometric in t - s
    double tau_min = 1e-4;
    double y_half = 0.0;         // domain half-width beyond the points; 0 means 10 sqrt(t)
};

// Z and Z^(B) at the points, driven by one shared noise array.
struct WindowedSheSample {
    std::vector<double> full;
    std::vector<double> windowed;
};

class WindowedSheSampler {
public:
    explicit WindowedSheSampler(const WindowedSheSpec& spec);
    WindowedSheSample sample(Rng& rng) const;

    // Exact variances of the discretized Z, Z^(B), and Z - Z^(B) at each point.
    const std::vector<double>& var_full() const { return var_full_; }
    const std::vector<double>& var_windowed() const { return var_win_; }
    const std::vector<double>& var_difference() const { return var_diff_; }
    std::size_t noise_cells() const { return n_tau_ * n_y_; }

private:
    WindowedSheSpec spec_;
    std::size_t n_tau_ = 0, n_y_ = 0;
    // weights_[p] has one entry per noise cell, already multiplied by 1/sqrt(cell area)
    std::vector<std::vector<double>> weights_;
    std::vector<std::vector<char>> in_window_;
    std::vector<double> var_full_, var_win_, var_diff_;
};

enum class SigmaKind { linear, clipped_linear, table };

struct SigmaSpec {
    SigmaKind kind = SigmaKind::linear;
    double c = 1.0;
    double ell = 1.0;
    double L = 1.0;
    // table: knots (u, sigma(u)) sorted by u, linear in between, linear tails
    std::vector<std::pair<double, double>> knots;

    double operator()(double u) const;
    // sigma(u)/u, with the slope at 0 for u = 0
    double rate(double u) const;
    // inf and sup of |sigma(u)/u|
    double ell_sigma() const;
    double L_sigma() const;
    void validate() const;
    std::string describe() const;
};

SigmaSpec parse_sigma(const std::string& s);

enum class Scheme { explicit_euler, exp_multiplicative };
Scheme parse_scheme(const std::string& s);
std::string to_string(Scheme s);

struct SheSpec {
    Scheme scheme = Scheme::exp_multiplicative;
    double dt = 1.0 / 32;
    double dx = 0.25;
    SigmaSpec sigma;
    double t_end = 1.0;
    double x_max = 64.0;
    std::vector<double> snapshots;  // empty means t_end only
    std::optional<std::pair<double, double>> window;
    Exec exec = Exec::serial;
};

struct SheResult {
    std::vector<Field> snapshots;
    double negative_fraction = 0.0;  // largest per-step fraction of negative sites
    std::size_t steps = 0;
    double dt = 0.0;
};

void validate(const SheSpec& spec);
SheResult solve_she_1d(const SheSpec& spec, Rng& rng);

// Gaussian bump h(x) = A exp(-|x|^2 / (2 w^2)), cut at trunc * w.
struct BumpSpec {
    double A = 1.0;
    double w = 1.0;
    double trunc = 6.0;

    double h(double r2) const;
    // f = h * h~ for the untruncated bump
    double f(double r2, int d) const;
    double f0(int d) const { return f(0.0, d); }
};

BumpSpec parse_bump(const std::string& s);

struct ColoredSpec {
    int d = 2;
    BumpSpec bump;
    double dt = 1.0 / 64;
    double dx = 0.25;
    double t_end = 0.5;
    double extent = 16.0;  // periodic box [0, extent)^d
    std::vector<double> snapshots;
    // noise restricted to [lo, hi]^d
    std::optional<std::pair<double, double>> window;
    Exec exec = Exec::serial;
};

struct ColoredResult {
    std::vector<Field> snapshots;
    double f0 = 0.0;           // continuum value
    double f0_discrete = 0.0;  // dx^d sum of h^2 on the grid
    std::size_t steps = 0;
    double dt = 0.0;
};

void validate(const ColoredSpec& spec);

// Keeps the transformed kernel across replicas.
class ColoredPam {
public:
    explicit ColoredPam(const ColoredSpec& spec);

    ColoredResult solve(Rng& rng) const;
    // One correlated noise field with covariance close to f on the grid.
    std::vector<double> noise_field(Rng& rng) const;
    double f0_discrete() const { return f0_disc_; }
    std::size_t nx() const { return n_; }

private:
    ColoredSpec spec_;
    std::size_t n_ = 0;
    double f0_disc_ = 0.0;
    std::vector<std::complex<double>> kernel_hat_;
};

ColoredResult solve_pam_colored(const ColoredSpec& spec, Rng& rng);

void write_field_csv(std::ostream& os, const Field& f, std::uint64_t seed);
void write_trajectory_csv(std::ostream& os, const TrajectoryGrid& g);

}  // namespace macrodim
