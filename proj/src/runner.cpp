#include "macrodim/runner.hpp"

#include "macrodim/macro_dimension.hpp"
#include "macrodim/manifest.hpp"
#include "macrodim/moments_lab.hpp"

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace macrodim {

namespace fs = std::filesystem;

ExperimentConfig build_config(const RunRequest& req)
{
    ExperimentConfig c =
        req.config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(req.config_path);
    std::string unknown;
    for (const auto& [k, v] : req.overrides) {
        if (!find_key(k)) {
            unknown += " " + k;
            continue;
        }
        c.set(k, v);
    }
    if (!unknown.empty())
        throw InputError("config: unknown keys:" + unknown);
    return c;
}

namespace {

std::uint64_t seed_of(const ExperimentConfig& c)
{
    const auto s = c.integer("seed");
    if (s < 0)
        throw InputError("seed must be non-negative");
    return std::uint64_t(s);
}

std::size_t count_of(const ExperimentConfig& c, const std::string& key)
{
    const auto n = c.integer(key);
    if (n < 1)
        throw InputError(key + " must be at least 1");
    return std::size_t(n);
}

SheSpec she_of(const ExperimentConfig& c)
{
    SheSpec s;
    s.scheme = parse_scheme(c.text("she.scheme"));
    s.sigma = parse_sigma(c.text("she.sigma"));
    s.dt = c.real("she.dt");
    s.dx = c.real("grid.dx");
    s.t_end = c.real("grid.t");
    s.x_max = c.real("grid.x_max");
    return s;
}

ColoredSpec colored_of(const ExperimentConfig& c)
{
    ColoredSpec s;
    s.d = int(c.integer("colored.d"));
    s.bump = parse_bump(c.text("colored.bump"));
    s.dt = c.real("colored.dt");
    s.dx = c.real("grid.dx");
    s.t_end = c.real("grid.t");
    s.extent = c.real("colored.extent");
    return s;
}

}  // namespace

SpectrumConfig spectrum_config(const ExperimentConfig& c)
{
    SpectrumConfig s;
    s.model = parse_spectrum_model(c.text("model"));
    s.gammas = c.reals("gamma");
    s.replicas = count_of(c, "replicas");
    s.seed = seed_of(c);
    s.n_min = int(c.integer("grid.n_min"));
    s.n_max = int(c.integer("grid.n_max"));
    s.dt = c.real("grid.dt");
    s.t = c.real("grid.t");
    s.dx = c.real("grid.dx");
    s.she = she_of(c);
    s.colored = colored_of(c);
    if (!c.text("exceedance.gauge").empty()) {
        s.gauge_set = true;
        s.gauge.kind = parse_gauge_kind(c.text("exceedance.gauge"));
        s.gauge.norm = c.real("exceedance.norm");
        s.gauge.start = c.real("exceedance.start");
        if (!(s.gauge.norm > 0))
            throw InputError("exceedance.norm must be positive");
        s.transform = parse_transform(c.text("exceedance.transform"));
    }
    s.bridge = c.boolean("exceedance.bridge");
    s.density = c.boolean("exceedance.density");
    s.est.rho_step = c.real("estimator.rho_step");
    s.est.c0 = c.real("estimator.c0");
    s.est.slope_tol = c.real("estimator.slope_tol");
    if (!(s.est.rho_step > 0) || s.est.rho_step > 0.5)
        throw InputError("estimator.rho_step must be in (0, 0.5]");
    if (!(s.est.c0 >= 1))
        throw InputError("estimator.c0 must be at least 1");
    if (!(s.est.slope_tol > 0))
        throw InputError("estimator.slope_tol must be positive");
    s.trim = c.real("estimator.trim");
    return s;
}

int configure_workers()
{
    const char* env = std::getenv("MACRODIM_WORKERS");
    if (!env || !*env)
        return omp_get_max_threads();
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096)
        throw InputError(std::string("MACRODIM_WORKERS must be a positive integer, got '") + env +
                         "'");
    omp_set_num_threads(int(n));
    return int(n);
}

namespace {

using Clock = std::chrono::steady_clock;

class Stages {
public:
    void mark(const std::string& name)
    {
        const auto now = Clock::now();
        timings.push_back({name, std::chrono::duration<double>(now - last_).count()});
        last_ = now;
    }
    std::vector<StageTiming> timings;

private:
    Clock::time_point last_ = Clock::now();
};

std::string utc_now()
{
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::ofstream open_out(const fs::path& p)
{
    std::ofstream o(p);
    if (!o)
        throw ResourceError("cannot write " + p.string());
    o.precision(17);
    return o;
}

void finish(const fs::path& dir, const std::string& sub, const ExperimentConfig& c,
            Stages& st, const std::vector<std::string>& files)
{
    RunManifest m;
    m.subcommand = sub;
    m.config = c.to_text();
    m.run_id = sha256_hex(sub + "\n" + m.config).substr(0, 16);
    m.wall_clock = utc_now();
    m.inventory(dir, files);
    st.mark("manifest");
    m.timings = st.timings;
    m.write(dir);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        out.push_back(item);
    return out;
}

void write_counts_csv(std::ostream& o, const std::vector<SpectrumResult>& results)
{
    o << "model,gamma,bounded,sparse,density\n";
    for (const auto& r : results)
        for (const auto& row : r.rows)
            o << r.model << ',' << fmt(row.gamma) << ',' << row.bounded << ',' << row.sparse
              << ',' << fmt(row.density) << '\n';
}

int do_spectrum(const ExperimentConfig& c, const fs::path& dir, std::ostream& out)
{
    Stages st;
    const auto cfg = resolve(spectrum_config(c));
    st.mark("validate");
    const auto res = spectrum_sweep(cfg);
    st.mark("compute");
    const std::vector<SpectrumResult> all{res};
    fs::create_directories(dir);
    {
        auto o = open_out(dir / "spectrum.csv");
        write_spectrum_csv(o, all);
        auto s = open_out(dir / "spectrum.svg");
        write_spectrum_svg(s, all);
        auto k = open_out(dir / "spectrum_counts.csv");
        write_counts_csv(k, all);
    }
    st.mark("write");
    finish(dir, "spectrum", c, st, {"spectrum.csv", "spectrum.svg", "spectrum_counts.csv"});
    for (const auto& row : res.rows)
        out << res.model << " gamma=" << fmt(row.gamma) << " dimh=" << fmt(row.hausdorff.value)
            << " +- " << fmt(row.hausdorff.stderr_) << " theory=[" << fmt(row.theory.lo) << ", "
            << fmt(row.theory.hi) << "] bounded=" << row.bounded << "/" << row.replicas << "\n";
    out << "verdict " << to_string(fractal_verdict(res)) << "\n";
    return exit_ok;
}

int do_simulate(const ExperimentConfig& c, const fs::path& dir, std::ostream& out)
{
    Stages st;
    const std::string model = c.text("model");
    const auto seed = seed_of(c);
    const double t_max = c.real("grid.t_max"), dt = c.real("grid.dt");
    const double x_max = c.real("grid.x_max"), dx = c.real("grid.dx"), t = c.real("grid.t");
    SheSpec she = she_of(c);
    ColoredSpec col = colored_of(c);
    if (model == "bm" || model == "ou")
        grid_points(t_max, dt);
    else if (model == "linear_she") {
        if (!(t > 0))
            throw InputError("grid.t must be positive");
        grid_points(x_max, dx);
    } else if (model == "pam_exact" || model == "pam_white") {
        if (model == "pam_exact")
            she.sigma = SigmaSpec{};
        validate(she);
    } else if (model == "colored")
        validate(col);
    else
        throw InputError("simulate: unknown model '" + model + "'");
    st.mark("validate");
    fs::create_directories(dir);
    std::string name;
    if (model == "bm" || model == "ou") {
        Rng rng(seed, model == "bm" ? Stream::bm : Stream::ou, 0);
        const auto g = model == "bm" ? simulate_bm(t_max, dt, rng) : simulate_ou(t_max, dt, rng);
        st.mark("compute");
        name = "trajectory.csv";
        auto o = open_out(dir / name);
        write_trajectory_csv(o, g);
        out << model << ": " << g.values.size() << " samples\n";
    } else {
        Field f;
        if (model == "linear_she") {
            Rng rng(seed, Stream::linear_she, 0);
            f = sample_linear_she(t, x_max, dx, rng);
        } else if (model == "colored") {
            Rng rng(seed, Stream::pam_colored, 0);
            f = solve_pam_colored(col, rng).snapshots.back();
        } else {
            Rng rng(seed, Stream::she_1d, 0);
            f = solve_she_1d(she, rng).snapshots.back();
        }
        st.mark("compute");
        name = "field.csv";
        auto o = open_out(dir / name);
        write_field_csv(o, f, seed);
        out << model << ": " << f.values.size() << " values at t=" << fmt(f.t) << "\n";
    }
    st.mark("write");
    finish(dir, "simulate", c, st, {name});
    return exit_ok;
}

int do_fixtures(const ExperimentConfig& c, const fs::path& dir, std::ostream& out)
{
    Stages st;
    FixtureSpec f;
    f.kind = parse_fixture_kind(c.text("fixtures.kind"));
    f.d = int(c.integer("fixtures.d"));
    f.theta = c.real("fixtures.theta");
    const int lo = int(c.integer("grid.n_min")), hi = int(c.integer("grid.n_max"));
    if (f.d != 1 && f.d != 2)
        throw InputError("fixtures.d must be 1 or 2");
    if (lo < 0 || hi < lo || hi > kMaxShell)
        throw InputError("fixtures: shell range must satisfy 0 <= n_min <= n_max <= " +
                         std::to_string(kMaxShell));
    st.mark("validate");
    const auto p = fixture_set(f, lo, hi);
    st.mark("compute");
    fs::create_directories(dir);
    {
        auto o = open_out(dir / "pixels.csv");
        write_pixels_csv(o, p);
    }
    st.mark("write");
    finish(dir, "fixtures", c, st, {"pixels.csv"});
    out << to_string(f.kind) << ": " << p.total_count() << " cells on shells " << lo << ".."
        << hi << "\n";
    return exit_ok;
}

int do_dimension(const ExperimentConfig& c, const fs::path& dir, std::ostream& out)
{
    Stages st;
    const std::string input = c.text("dimension.input");
    if (input.empty())
        throw InputError("dimension: dimension.input (--input) is required");
    std::ifstream in(input);
    if (!in)
        throw InputError("dimension: cannot read " + input);
    const int lo = int(c.integer("grid.n_min")), hi = int(c.integer("grid.n_max"));
    if (lo < 0 || hi - lo < 3 || hi > kMaxShell)
        throw InputError("dimension: shell range must hold at least 4 shells");
    EstimatorOptions opt;
    opt.rho_step = c.real("estimator.rho_step");
    opt.c0 = c.real("estimator.c0");
    opt.slope_tol = c.real("estimator.slope_tol");
    if (!(opt.rho_step > 0) || !(opt.c0 >= 1) || !(opt.slope_tol > 0))
        throw InputError("dimension: bad estimator options");
    const auto p = read_pixels_csv(in);
    st.mark("validate");
    const PixelSource src(p);
    const auto h = dimh_estimate(src, lo, hi, opt);
    const auto l = ldimh_estimate(src, lo, hi, opt);
    const auto m = dimm_estimate(src, lo, hi);
    st.mark("compute");
    fs::create_directories(dir);
    {
        auto o = open_out(dir / "dimension.csv");
        o << "method,value,stderr,bounded,n_min,n_max,content_exact\n";
        for (const auto* e : {&h, &l, &m})
            o << to_string(e->method) << ',' << fmt(e->value) << ',' << fmt(e->stderr_) << ','
              << e->bounded << ',' << e->n_min << ',' << e->n_max << ',' << e->content_exact
              << '\n';
        auto s = open_out(dir / "shells.csv");
        s << "shell,log_count,log_content\n";
        for (const auto& sh : h.shells)
            s << sh.n << ',' << fmt(sh.log_count) << ',' << fmt(sh.log_content) << '\n';
    }
    st.mark("write");
    finish(dir, "dimension", c, st, {"dimension.csv", "shells.csv"});
    for (const auto* e : {&h, &l, &m})
        out << to_string(e->method) << " " << fmt(e->value) << (e->bounded ? " (bounded)" : "")
            << "\n";
    return exit_ok;
}

int do_oracle(const ExperimentConfig& c, const fs::path& dir, std::ostream& out)
{
    Stages st;
    FeynmanKacSpec s;
    s.k = int(c.integer("oracle.k"));
    s.d = int(c.integer("oracle.d"));
    s.t = c.real("oracle.t");
    s.f = parse_correlation(c.text("oracle.f"));
    s.paths = count_of(c, "oracle.paths");
    s.ds = c.real("oracle.ds");
    const auto seed = seed_of(c);
    st.mark("validate");
    const auto e = feynman_kac_oracle(s, seed);
    st.mark("compute");
    fs::create_directories(dir);
    {
        auto o = open_out(dir / "moments.csv");
        o << "model,k,t,estimate,half_width,replicas,f0\n";
        o << e.model << ',' << fmt(e.k) << ',' << fmt(e.t) << ',' << fmt(e.estimate) << ','
          << fmt(e.half_width) << ',' << e.replicas << ',' << fmt(s.f.at_zero(s.d)) << '\n';
    }
    st.mark("write");
    finish(dir, "oracle", c, st, {"moments.csv"});
    out << e.model << " E[u^" << s.k << "](" << fmt(s.t) << ") = " << fmt(e.estimate) << " +- "
        << fmt(e.half_width) << "\n";
    return exit_ok;
}

}  // namespace

std::vector<SpectrumResult> read_spectrum_run(const fs::path& dir)
{
    const auto m = RunManifest::read(dir);
    m.verify(dir);
    if (m.subcommand != "spectrum")
        throw InputError(dir.string() + " is not a spectrum run");
    const auto cfg = resolve(spectrum_config(ExperimentConfig::parse(m.config)));
    SpectrumResult r;
    r.kind = cfg.model;
    r.model = to_string(cfg.model);
    r.params = theory_params(cfg);
    r.d = r.params.d;
    r.n_min = cfg.n_min;
    r.n_max = cfg.n_max;
    std::map<double, GammaRow> rows;
    std::ifstream in(dir / "spectrum.csv");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto f = split(line, ',');
        if (f.size() != 8)
            throw IntegrityError("malformed row in " + (dir / "spectrum.csv").string());
        const double g = std::stod(f[1]);
        auto& row = rows[g];
        row.gamma = g;
        row.replicas = std::stoul(f[7]);
        row.theory = {std::stod(f[5]), std::stod(f[6]), std::stod(f[6]) < 0};
        DimAggregate& a = f[2] == "hausdorff" ? row.hausdorff : row.minkowski;
        a.value = std::stod(f[3]);
        a.stderr_ = std::stod(f[4]);
    }
    std::ifstream kin(dir / "spectrum_counts.csv");
    std::getline(kin, line);
    while (std::getline(kin, line)) {
        const auto f = split(line, ',');
        if (f.size() != 5)
            continue;
        auto it = rows.find(std::stod(f[1]));
        if (it == rows.end())
            continue;
        it->second.bounded = std::stoul(f[2]);
        it->second.sparse = std::stoul(f[3]);
        it->second.density = std::stod(f[4]);
    }
    for (auto& [g, row] : rows)
        r.rows.push_back(row);
    return {r};
}

Report emit_report(const std::vector<fs::path>& runs, const fs::path& out_dir)
{
    if (runs.empty())
        throw InputError("report: no run directories given");
    std::vector<SpectrumResult> all;
    for (const auto& d : runs)
        for (auto& r : read_spectrum_run(d))
            all.push_back(std::move(r));
    const auto rep = compare_report(all);
    fs::create_directories(out_dir);
    {
        auto t = open_out(out_dir / "report.txt");
        write_report_text(t, rep);
        auto c = open_out(out_dir / "report.csv");
        c << "model,gamma,estimator,dim_hat,stderr,theory_lo,theory_hi,replicas\n";
        for (const auto& m : rep.models)
            for (const auto& r : m.rows)
                c << r.model << ',' << fmt(r.gamma) << ',' << r.estimator << ','
                  << fmt(r.dim_hat) << ',' << fmt(r.stderr_) << ',' << fmt(r.theory_lo) << ','
                  << fmt(r.theory_hi) << ',' << r.replicas << '\n';
        auto s = open_out(out_dir / "report.svg");
        write_spectrum_svg(s, all);
    }
    return rep;
}

namespace {

int do_report(const RunRequest& req, const ExperimentConfig& c, const fs::path& dir,
              std::ostream& out)
{
    Stages st;
    std::vector<fs::path> runs(req.inputs.begin(), req.inputs.end());
    const auto rep = emit_report(runs, dir);
    st.mark("compute");
    finish(dir, "report", c, st, {"report.txt", "report.csv", "report.svg"});
    write_report_text(out, rep);
    return exit_ok;
}

}  // namespace

int run(const RunRequest& req, std::ostream& out, std::ostream& err)
{
    try {
        configure_workers();
        const auto c = build_config(req);
        const fs::path dir = c.text("output");
        if (dir.empty())
            throw InputError("output directory is empty");
        if (req.subcommand == "spectrum")
            return do_spectrum(c, dir, out);
        if (req.subcommand == "simulate")
            return do_simulate(c, dir, out);
        if (req.subcommand == "fixtures")
            return do_fixtures(c, dir, out);
        if (req.subcommand == "dimension")
            return do_dimension(c, dir, out);
        if (req.subcommand == "oracle")
            return do_oracle(c, dir, out);
        if (req.subcommand == "report")
            return do_report(req, c, dir, out);
        throw InputError("unknown subcommand '" + req.subcommand + "'");
    } catch (const InputError& e) {
        err << "validation error: " << e.what() << "\n";
        return exit_validation;
    } catch (const ResourceError& e) {
        err << "resource refusal: " << e.what() << "\n";
        return exit_resource;
    } catch (const IntegrityError& e) {
        err << "integrity error: " << e.what() << "\n";
        return exit_integrity;
    } catch (const fs::filesystem_error& e) {
        err << "resource refusal: " << e.what() << "\n";
        return exit_resource;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

}  // namespace macrodim
