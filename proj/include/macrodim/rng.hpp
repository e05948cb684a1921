#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace macrodim {

// Fixed stream ids so that every consumer of randomness has its own lane.
enum class Stream : std::uint64_t {
    bm = 1,
    ou = 2,
    linear_she = 3,
    she_windowed = 4,
    she_1d = 5,
    pam_colored = 6,
    feynman_kac = 7,
    bridge = 8,
    random_sets = 9,
    pickands = 10,
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t replica);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    Rng(std::uint64_t master, Stream stream, std::uint64_t replica)
        : eng_(derive_seed(master, stream, replica)) {}

    double normal() { return normal_(eng_); }
    double uniform() { return uniform_(eng_); }
    void fill_normal(std::span<double> out);
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace macrodim
