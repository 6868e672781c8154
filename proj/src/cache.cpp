// cache.cpp - binary TDM cache

#include "vibroqfi/cache.hpp"

#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <random>

namespace vibroqfi {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "cache format assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'V', 'Q', 'F', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeader = 4 + 4 + 4 + 8 + 8 + 8 + 32;

template <class T>
void put(std::string& buf, T v) {
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    buf.append(b, sizeof(T));
}

template <class T>
T get(const char*& p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    p += sizeof(T);
    return v;
}

} // namespace

fs::path cache_directory(const std::string& configured) {
    if (const char* env = std::getenv(kCacheEnv); env && *env) return env;
    if (!configured.empty()) return configured;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "vibroqfi";
    if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "vibroqfi";
    return fs::temp_directory_path() / "vibroqfi";
}

TdmCache::TdmCache(fs::path dir) : dir_(std::move(dir)) {}

fs::path TdmCache::path_for(const Fingerprint& key) const { return dir_ / (to_hex(key) + ".vqf"); }

std::optional<CachedMatrix> TdmCache::load(const Fingerprint& key, const TimeGrid& grid,
                                           std::vector<std::string>* warnings) const {
    const fs::path path = path_for(key);
    std::error_code ec;
    if (!fs::exists(path, ec)) return std::nullopt;
    auto warn = [&](const std::string& w) {
        if (warnings) warnings->push_back("cache " + path.string() + ": " + w + "; recomputing");
        return std::nullopt;
    };
    std::ifstream in(path, std::ios::binary);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!in.good() && !in.eof()) return warn("read error");
    if (data.size() < kHeader || std::memcmp(data.data(), kMagic, 4) != 0) return warn("not a cache file");
    const char* p = data.data() + 4;
    auto version = get<std::uint32_t>(p);
    auto n = get<std::uint32_t>(p);
    double tau0 = get<double>(p), tau_end = get<double>(p), val = get<double>(p);
    Fingerprint stored;
    std::memcpy(stored.data(), p, 32);
    p += 32;
    if (version != kVersion) return warn("format version " + std::to_string(version));
    if (stored != key) return warn("hash mismatch");
    if (static_cast<int>(n) != grid.n || tau0 != grid.tau0 || tau_end != grid.tau_end) return warn("grid mismatch");
    const std::size_t count = static_cast<std::size_t>(n) * n;
    if (data.size() != kHeader + 16 * count) return warn("truncated");
    CachedMatrix e;
    e.grid = grid;
    e.p = val;
    e.m.resize(n, n);
    std::memcpy(static_cast<void*>(e.m.data()), p, 16 * count);
    return e;
}

void TdmCache::store(const Fingerprint& key, const CachedMatrix& e) const {
    const auto n = static_cast<std::uint32_t>(e.grid.n);
    if (e.m.rows() != e.grid.n || e.m.cols() != e.grid.n) throw DomainError("cache: matrix does not match its grid");
    std::string buf;
    buf.reserve(kHeader);
    buf.append(kMagic, 4);
    put(buf, kVersion);
    put(buf, n);
    put(buf, e.grid.tau0);
    put(buf, e.grid.tau_end);
    put(buf, e.p);
    buf.append(reinterpret_cast<const char*>(key.data()), 32);

    fs::create_directories(dir_);
    std::random_device rd;
    fs::path tmp = dir_ / (to_hex(key) + ".tmp" + std::to_string(rd()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write cache file " + tmp.string());
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        out.write(reinterpret_cast<const char*>(e.m.data()), static_cast<std::streamsize>(16 * static_cast<std::size_t>(n) * n));
        if (!out) throw std::runtime_error("cannot write cache file " + tmp.string());
    }
    fs::rename(tmp, path_for(key));
}

} // namespace vibroqfi
