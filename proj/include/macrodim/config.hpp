#pragma once

#include <map>
#include <string>
#include <vector>

namespace macrodim {

enum class ValueType { integer, real, boolean, text, real_list };

struct KeySpec {
    std::string key;
    ValueType type;
    std::string fallback;
    std::string help;
};

// Every key the runner understands.
const std::vector<KeySpec>& config_schema();
const KeySpec* find_key(const std::string& key);

// key = value lines, [section] prefixes the keys that follow with "section.".
// Lists are written [a, b, c]; strings may be quoted.
class ExperimentConfig {
public:
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);

    // Raw override; the value is type-checked against the schema.
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string text(const std::string& key) const;
    double real(const std::string& key) const;
    long long integer(const std::string& key) const;
    bool boolean(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;

    // Canonical form; parse(to_text()) gives back an equal config.
    std::string to_text() const;
    const std::map<std::string, std::string>& values() const { return values_; }
    bool operator==(const ExperimentConfig&) const = default;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace macrodim
