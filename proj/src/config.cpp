#include "macrodim/config.hpp"

#include "macrodim/common.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace macrodim {

const std::vector<KeySpec>& config_schema()
{
    static const std::vector<KeySpec> s = {
        {"model", ValueType::text, "ou", "bm | ou | linear_she | pam_white | pam_exact | colored"},
        {"seed", ValueType::integer, "1", "master seed"},
        {"replicas", ValueType::integer, "8", "independent replicas"},
        {"gamma", ValueType::real_list, "0.3,0.5,0.7,0.9", "exceedance levels"},
        {"output", ValueType::text, "out", "output directory"},
        {"grid.dt", ValueType::real, "0.25", "time step of bm and ou paths"},
        {"grid.dx", ValueType::real, "0.25", "space step of fields"},
        {"grid.t", ValueType::real, "1", "field time"},
        {"grid.n_min", ValueType::integer, "3", "first shell"},
        {"grid.n_max", ValueType::integer, "15", "last shell"},
        {"grid.t_max", ValueType::real, "100", "simulate: path horizon"},
        {"grid.x_max", ValueType::real, "64", "simulate: field half-width"},
        {"estimator.rho_step", ValueType::real, "0.025", "rho grid spacing"},
        {"estimator.c0", ValueType::real, "1", "smallest box side"},
        {"estimator.slope_tol", ValueType::real, "0.01", "slope threshold of the root search"},
        {"estimator.trim", ValueType::real, "0.1", "trimmed-mean fraction across replicas"},
        {"exceedance.gauge", ValueType::text, "", "empty selects the model default"},
        {"exceedance.norm", ValueType::real, "1", "gauge multiplier"},
        {"exceedance.start", ValueType::real, "0", "gauge start, 0 selects the default"},
        {"exceedance.transform", ValueType::text, "identity", "identity | log | signed"},
        {"exceedance.bridge", ValueType::boolean, "false", "Brownian-bridge crossing correction"},
        {"exceedance.density", ValueType::boolean, "false", "also report upper density"},
        {"she.scheme", ValueType::text, "exp_multiplicative", "euler | exp_multiplicative"},
        {"she.sigma", ValueType::text, "linear:c=1", "sigma function"},
        {"she.dt", ValueType::real, "0.03125", "time step"},
        {"colored.d", ValueType::integer, "2", "dimension"},
        {"colored.bump", ValueType::text, "gaussian:A=1,w=1", "correlation bump"},
        {"colored.dt", ValueType::real, "0.015625", "time step"},
        {"colored.extent", ValueType::real, "16", "simulate: torus side"},
        {"oracle.k", ValueType::integer, "2", "moment order"},
        {"oracle.d", ValueType::integer, "2", "dimension"},
        {"oracle.t", ValueType::real, "0.5", "time"},
        {"oracle.f", ValueType::text, "gaussian:A=1,w=1", "zero | constant:f0= | gaussian:A=,w="},
        {"oracle.paths", ValueType::integer, "20000", "Brownian k-tuples"},
        {"oracle.ds", ValueType::real, "0.00390625", "quadrature step"},
        {"fixtures.kind", ValueType::text, "naturals",
         "naturals | exp_naturals | full_lattice | skeleton"},
        {"fixtures.theta", ValueType::real, "0.5", "skeleton exponent"},
        {"fixtures.d", ValueType::integer, "1", "dimension"},
        {"dimension.input", ValueType::text, "", "pixels.csv to estimate"},
    };
    return s;
}

const KeySpec* find_key(const std::string& key)
{
    for (const auto& k : config_schema())
        if (k.key == key)
            return &k;
    return nullptr;
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out)
{
    const auto t = trim(s);
    if (t.empty())
        return false;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), out);
    return r.ec == std::errc() && r.ptr == t.data() + t.size();
}

bool parse_int(const std::string& s, long long& out)
{
    const auto t = trim(s);
    if (t.empty())
        return false;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), out);
    return r.ec == std::errc() && r.ptr == t.data() + t.size();
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    return out;
}

// Normalized storage: strings unquoted, lists comma separated without brackets.
std::string normalize(const KeySpec& k, std::string v)
{
    v = trim(v);
    switch (k.type) {
    case ValueType::text:
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
            v = v.substr(1, v.size() - 2);
        if (v.find('"') != std::string::npos || v.find('\n') != std::string::npos)
            throw InputError("config: " + k.key + " may not contain quotes or newlines");
        return v;
    case ValueType::integer: {
        long long x;
        if (!parse_int(v, x))
            throw InputError("config: " + k.key + " expects an integer, got '" + v + "'");
        return v;
    }
    case ValueType::real: {
        double x;
        if (!parse_double(v, x))
            throw InputError("config: " + k.key + " expects a number, got '" + v + "'");
        return v;
    }
    case ValueType::boolean:
        if (v != "true" && v != "false")
            throw InputError("config: " + k.key + " expects true or false, got '" + v + "'");
        return v;
    case ValueType::real_list: {
        if (!v.empty() && v.front() == '[') {
            if (v.back() != ']')
                throw InputError("config: unterminated list for " + k.key);
            v = v.substr(1, v.size() - 2);
        }
        std::string out;
        for (const auto& item : split_list(v)) {
            double x;
            if (!parse_double(item, x))
                throw InputError("config: " + k.key + " expects numbers, got '" + item + "'");
            out += (out.empty() ? "" : ",") + item;
        }
        if (out.empty())
            throw InputError("config: " + k.key + " is an empty list");
        return out;
    }
    }
    return v;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text)
{
    ExperimentConfig c;
    std::vector<std::string> unknown;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"')
                quoted = !quoted;
            else if (line[i] == '#' && !quoted) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw InputError("config line " + std::to_string(lineno) + ": bad section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (!section.empty())
            key = section + "." + key;
        const KeySpec* k = find_key(key);
        if (!k) {
            unknown.push_back(key);
            continue;
        }
        if (c.values_.count(key))
            throw InputError("config: duplicate key " + key);
        c.values_[key] = normalize(*k, line.substr(eq + 1));
    }
    if (!unknown.empty()) {
        std::string msg = "config: unknown keys:";
        for (const auto& u : unknown)
            msg += " " + u;
        throw InputError(msg);
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw InputError("config: cannot read " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

void ExperimentConfig::set(const std::string& key, const std::string& value)
{
    const KeySpec* k = find_key(key);
    if (!k)
        throw InputError("config: unknown keys: " + key);
    values_[key] = normalize(*k, value);
}

std::string ExperimentConfig::text(const std::string& key) const
{
    const KeySpec* k = find_key(key);
    if (!k)
        throw InputError("config: unknown key " + key);
    const auto it = values_.find(key);
    return it == values_.end() ? k->fallback : it->second;
}

double ExperimentConfig::real(const std::string& key) const
{
    double x = 0;
    parse_double(text(key), x);
    return x;
}

long long ExperimentConfig::integer(const std::string& key) const
{
    long long x = 0;
    parse_int(text(key), x);
    return x;
}

bool ExperimentConfig::boolean(const std::string& key) const { return text(key) == "true"; }

std::vector<double> ExperimentConfig::reals(const std::string& key) const
{
    std::vector<double> out;
    for (const auto& item : split_list(text(key))) {
        double x = 0;
        parse_double(item, x);
        out.push_back(x);
    }
    return out;
}

std::string ExperimentConfig::to_text() const
{
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> by_section;
    for (const auto& [key, v] : values_) {
        const auto dot = key.find('.');
        const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
        const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
        std::string val = v;
        switch (find_key(key)->type) {
        case ValueType::text:
            val = "\"" + v + "\"";
            break;
        case ValueType::real_list: {
            val = "[";
            const auto items = split_list(v);
            for (std::size_t i = 0; i < items.size(); ++i)
                val += (i ? ", " : "") + items[i];
            val += "]";
            break;
        }
        default:
            break;
        }
        by_section[sec].emplace_back(name, val);
    }
    std::string out;
    for (const auto& [sec, kv] : by_section) {
        if (!sec.empty())
            out += (out.empty() ? "" : "\n") + ("[" + sec + "]\n");
        for (const auto& [k, v] : kv)
            out += k + " = " + v + "\n";
    }
    return out;
}

}  // namespace macrodim
