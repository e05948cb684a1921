#include "macrodim/manifest.hpp"

#include "macrodim/common.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <sstream>

namespace macrodim {

namespace {

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free)
    {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("sha256: init failed");
    }
    void update(const char* data, std::size_t n)
    {
        if (EVP_DigestUpdate(ctx_.get(), data, n) != 1)
            throw std::runtime_error("sha256: update failed");
    }
    std::string hex()
    {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), md, &len) != 1)
            throw std::runtime_error("sha256: final failed");
        static const char* digits = "0123456789abcdef";
        std::string out;
        for (unsigned i = 0; i < len; ++i) {
            out += digits[md[i] >> 4];
            out += digits[md[i] & 15];
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_hex(const std::string& bytes)
{
    Sha256 h;
    h.update(bytes.data(), bytes.size());
    return h.hex();
}

std::string sha256_file(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    if (!f)
        throw IntegrityError("missing file " + p.string());
    Sha256 h;
    std::array<char, 1 << 16> buf;
    while (f) {
        f.read(buf.data(), buf.size());
        h.update(buf.data(), std::size_t(f.gcount()));
    }
    return h.hex();
}

void RunManifest::inventory(const std::filesystem::path& dir, const std::vector<std::string>& names)
{
    files.clear();
    for (const auto& n : names) {
        const auto p = dir / n;
        files.push_back({n, sha256_file(p), std::filesystem::file_size(p)});
    }
    digest = inventory_digest();
}

std::string RunManifest::inventory_digest() const
{
    std::string s;
    for (const auto& f : files)
        s += f.name + " " + f.sha256 + "\n";
    return sha256_hex(s);
}

void RunManifest::write(const std::filesystem::path& dir) const
{
    nlohmann::ordered_json j;
    j["run_id"] = run_id;
    j["subcommand"] = subcommand;
    j["version"] = version;
    j["wall_clock"] = wall_clock;
    j["config"] = config;
    j["timings"] = nlohmann::json::array();
    for (const auto& t : timings)
        j["timings"].push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    j["files"] = nlohmann::json::array();
    for (const auto& f : files)
        j["files"].push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    j["digest"] = digest;
    std::ofstream o(dir / kManifestName);
    o << j.dump(2) << "\n";
    if (!o)
        throw ResourceError("cannot write manifest in " + dir.string());
}

RunManifest RunManifest::read(const std::filesystem::path& dir)
{
    std::ifstream in(dir / kManifestName);
    if (!in)
        throw IntegrityError("no manifest in " + dir.string());
    RunManifest m;
    try {
        const auto j = nlohmann::json::parse(in);
        m.run_id = j.at("run_id");
        m.subcommand = j.at("subcommand");
        m.version = j.at("version");
        m.wall_clock = j.value("wall_clock", "");
        m.config = j.at("config");
        for (const auto& t : j.at("timings"))
            m.timings.push_back({t.at("stage"), t.at("seconds")});
        for (const auto& f : j.at("files"))
            m.files.push_back({f.at("name"), f.at("sha256"), f.at("bytes")});
        m.digest = j.at("digest");
    } catch (const nlohmann::json::exception& e) {
        throw IntegrityError("malformed manifest in " + dir.string() + ": " + e.what());
    }
    return m;
}

void RunManifest::verify(const std::filesystem::path& dir) const
{
    if (inventory_digest() != digest)
        throw IntegrityError("manifest digest mismatch in " + dir.string());
    for (const auto& f : files)
        if (sha256_file(dir / f.name) != f.sha256)
            throw IntegrityError("digest mismatch for " + (dir / f.name).string());
}

}  // namespace macrodim
