#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace macrodim {

inline constexpr const char* kCodeVersion = "macrodim 0.1.0";

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& p);

struct FileEntry {
    std::string name;  // relative to the run directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct RunManifest {
    std::string run_id;
    std::string subcommand;
    std::string config;  // canonical config text
    std::string version = kCodeVersion;
    std::string wall_clock;
    std::vector<StageTiming> timings;
    std::vector<FileEntry> files;
    std::string digest;  // over the file inventory

    // Hashes every listed file found in dir.
    void inventory(const std::filesystem::path& dir, const std::vector<std::string>& names);
    std::string inventory_digest() const;
    void write(const std::filesystem::path& dir) const;
    static RunManifest read(const std::filesystem::path& dir);
    // Throws IntegrityError naming the first file whose digest differs.
    void verify(const std::filesystem::path& dir) const;
};

inline constexpr const char* kManifestName = "manifest.json";

}  // namespace macrodim
