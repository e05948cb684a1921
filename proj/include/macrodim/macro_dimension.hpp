#pragma once

#include "macrodim/cover.hpp"
#include "macrodim/shell_geometry.hpp"

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace macrodim {

enum class Exactness { exact, upper_bound };

struct CoverSolution {
    int shell = 0;
    double rho = 1.0;
    double cost = 0.0;
    std::vector<UprightBox> boxes;
    std::int64_t box_count = 0;
    bool boxes_elided = false;  // too many boxes to list; cost and count still exact
    Exactness exactness = Exactness::exact;
};

// Largest box list materialized by shell_content.
inline constexpr std::int64_t kMaxListedBoxes = 1'000'000;

CoverSolution shell_content(const PixelSet& p, int n, double rho, double c0 = 1.0);
double shell_content_value(const PixelSet& p, int n, double rho, double c0 = 1.0,
                           bool* exact = nullptr);

// Anything that can report per-shell contents.
class ShellSource {
public:
    virtual ~ShellSource() = default;
    virtual int dimension() const = 0;
    virtual std::vector<int> occupied_shells(int lo, int hi) const = 0;
    virtual double log_cell_count(int n) const = 0;
    virtual double content(int n, double rho, double c0) const = 0;
    virtual bool content_exact(int n, double rho, double c0) const = 0;
};

class PixelSource : public ShellSource {
public:
    explicit PixelSource(const PixelSet& p);
    int dimension() const override { return p_.dimension(); }
    std::vector<int> occupied_shells(int lo, int hi) const override;
    double log_cell_count(int n) const override;
    double content(int n, double rho, double c0) const override;
    bool content_exact(int n, double rho, double c0) const override;

private:
    const PixelSet& p_;
};

// d = 1 sets given per shell as segments already divided by e^n.
class NormalizedSegments : public ShellSource {
public:
    void add(int n, double lo, double hi);
    void finalize();
    int dimension() const override { return 1; }
    std::vector<int> occupied_shells(int lo, int hi) const override;
    double log_cell_count(int n) const override;
    double content(int n, double rho, double c0) const override;
    bool content_exact(int, double, double) const override { return true; }
    const std::map<int, std::vector<Segment>>& shells() const { return shells_; }

private:
    std::map<int, std::vector<Segment>> shells_;
};

enum class Method { hausdorff, minkowski, lower_hausdorff };
std::string to_string(Method m);

struct ShellStat {
    int n = 0;
    double log_count = 0.0;
    double log_content = 0.0;  // at the reported root
};

struct SlopePoint {
    double rho = 0.0;
    double slope = 0.0;
    double stderr_ = 0.0;
};

struct DimensionEstimate {
    double value = 0.0;
    Method method = Method::hausdorff;
    int n_min = 0;
    int n_max = 0;
    double stderr_ = 0.0;
    bool bounded = false;
    bool content_exact = true;  // false means contents were upper bounds (d = 2)
    std::vector<ShellStat> shells;
    std::vector<SlopePoint> slopes;
    std::vector<double> residuals;
};

inline constexpr double kBoundedSentinel = -1.0;

struct EstimatorOptions {
    double rho_step = 0.025;
    double c0 = 1.0;
    double slope_tol = 0.01;
    Exec exec = Exec::parallel;
};

std::vector<double> rho_grid(int d, double step);

DimensionEstimate dimh_estimate(const ShellSource& src, int n_min, int n_max,
                                const EstimatorOptions& opt = {});
DimensionEstimate dimh_estimate(const PixelSet& p, int n_min, int n_max,
                                const EstimatorOptions& opt = {});
DimensionEstimate dimm_estimate(const ShellSource& src, int n_min, int n_max);
DimensionEstimate dimm_estimate(const PixelSet& p, int n_min, int n_max);
DimensionEstimate ldimh_estimate(const ShellSource& src, int n_min, int n_max,
                                 const EstimatorOptions& opt = {});

enum class DensityDomain { symmetric, positive };

struct DensityEstimate {
    double value = 0.0;
    std::vector<double> windows;
    std::vector<double> ratios;
};

DensityEstimate upper_density(const PixelSet& p, std::span<const double> windows,
                              DensityDomain domain = DensityDomain::symmetric);
// Each sample point carries mass `weight`.
DensityEstimate upper_density(std::span<const double> points, double weight,
                              std::span<const double> windows,
                              DensityDomain domain = DensityDomain::symmetric);

struct FrostmanResult {
    double bound = 0.0;    // guaranteed lower bound on the content
    double mass = 0.0;
    double k_valid = 0.0;  // exact sup or a proven upper bound on it
    bool k_exact = false;
    double k_dyadic = 0.0; // sup over aligned dyadic boxes only (an under-estimate)
};

// Cell weights spread uniformly over their unit cells, all in shell n.
FrostmanResult frostman_bound(int n, std::span<const std::pair<std::int64_t, double>> mu,
                              double rho);
FrostmanResult frostman_bound(int n, std::span<const std::pair<Cell2, double>> mu, double rho);

enum class FixtureKind { naturals, exp_naturals, full_lattice, skeleton, affine_image };

struct FixtureSpec {
    FixtureKind kind = FixtureKind::naturals;
    int d = 1;
    double theta = 0.5;
    FixtureKind base = FixtureKind::naturals;
    double base_theta = 0.5;
    double q = 1.0;
    double s = 0.0;
};

FixtureKind parse_fixture_kind(const std::string& s);
std::string to_string(FixtureKind k);
PixelSet fixture_set(const FixtureSpec& spec, int n_min, int n_max);

}  // namespace macrodim
