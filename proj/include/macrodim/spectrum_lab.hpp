#pragma once

#include "macrodim/exceedance.hpp"
#include "macrodim/macro_dimension.hpp"
#include "macrodim/simulators.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace macrodim {

enum class SpectrumModel { bm, ou, linear_she, pam_white, pam_exact, colored };

SpectrumModel parse_spectrum_model(const std::string& s);
std::string to_string(SpectrumModel m);

struct TheoryParams {
    double ell = 0.0;  // pam_white
    double L = 0.0;
    double f0 = 0.0;   // colored
    int d = 1;
};

struct TheoryValue {
    double lo = 0.0;
    double hi = 0.0;
    bool bounded = false;  // the formula is negative
};

TheoryValue theory_dim(SpectrumModel m, double gamma, const TheoryParams& p);

struct SpectrumConfig {
    SpectrumModel model = SpectrumModel::ou;
    std::vector<double> gammas;
    std::size_t replicas = 8;
    std::uint64_t seed = 1;
    int n_min = 3;
    int n_max = 15;
    double dt = 0.25;       // bm, ou sampling step
    double t = 1.0;         // field time
    double dx = 0.25;       // field spacing
    SheSpec she;            // pam_white, pam_exact
    ColoredSpec colored;    // colored
    GaugeSpec gauge;        // defaults per model when gauge_set is false
    bool gauge_set = false;
    Transform transform = Transform::identity;
    bool bridge = false;
    bool density = false;   // also estimate the half-line upper density
    EstimatorOptions est;
    double trim = 0.1;
    Exec exec = Exec::parallel;
};

// Fills model-dependent defaults (gauge, transform, sigma) and validates.
SpectrumConfig resolve(const SpectrumConfig& cfg);
TheoryParams theory_params(const SpectrumConfig& cfg);

struct DimAggregate {
    double value = 0.0;     // trimmed mean, bounded replicas counted as 0
    double stderr_ = 0.0;
    std::vector<double> per_replica;
};

struct GammaRow {
    double gamma = 0.0;
    DimAggregate hausdorff;
    DimAggregate minkowski;
    TheoryValue theory;
    std::size_t replicas = 0;
    std::size_t bounded = 0;   // replicas with the bounded sentinel
    std::size_t sparse = 0;    // replicas with fewer than 4 occupied shells
    double density = -1.0;     // mean upper density when requested
};

struct SpectrumResult {
    std::string model;
    SpectrumModel kind = SpectrumModel::ou;
    TheoryParams params;
    int d = 1;
    int n_min = 0;
    int n_max = 0;
    std::vector<GammaRow> rows;
};

SpectrumResult spectrum_sweep(const SpectrumConfig& cfg);

enum class FractalVerdict { multifractal, monofractal, indeterminate };
std::string to_string(FractalVerdict v);

// Separation of two levels: |a - b| > 2 sqrt(se_a^2 + se_b^2).
FractalVerdict fractal_verdict(const SpectrumResult& r);

struct ReportRow {
    std::string model;
    double gamma = 0.0;
    std::string estimator;
    double dim_hat = 0.0;
    double stderr_ = 0.0;
    double theory_lo = 0.0;
    double theory_hi = 0.0;
    std::size_t replicas = 0;
    double delta = 0.0;  // distance to the theory band
};

struct ModelReport {
    std::string model;
    std::vector<ReportRow> rows;
    double max_abs_delta = 0.0;
    FractalVerdict verdict = FractalVerdict::indeterminate;
};

struct Report {
    std::vector<ModelReport> models;
};

Report compare_report(const std::vector<SpectrumResult>& results);
void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumResult>& results);
void write_spectrum_svg(std::ostream& os, const std::vector<SpectrumResult>& results);
void write_report_text(std::ostream& os, const Report& rep);

// Dimension at gamma = 1 of one OU path in time t and of the same exceedances
// mapped to s = e^t, with s-shells handled in normalized coordinates.
// A view with fewer than 4 occupied shells is left at 0 and flagged sparse.
struct ContrastResult {
    DimensionEstimate t_view;
    DimensionEstimate s_view;
    int t_shells = 0;
    int s_shells = 0;
    bool t_sparse = false;
    bool s_sparse = false;
};

ContrastResult log_exp_contrast(int n_min, int n_max, double dt, std::uint64_t seed,
                                std::uint64_t replica = 0, Exec exec = Exec::parallel);

}  // namespace macrodim
