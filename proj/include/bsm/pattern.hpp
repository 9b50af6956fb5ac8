#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bsm/errors.hpp"

namespace bsm {

// Pinned pseudo-random source: mt19937_64 for uniform bits, explicit
// Box-Muller for normals. std::normal_distribution is implementation-defined,
// so the transform is spelled out here; patterns regenerate bit-identically
// on any platform from the same seed.
inline constexpr const char* kGeneratorName = "mt19937_64-boxmuller-v1";

namespace detail {

class GaussianSource {
public:
    explicit GaussianSource(uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - to_unit(rng_());  // (0, 1]
        const double u2 = to_unit(rng_());        // [0, 1)
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    static double to_unit(uint64_t x) { return double(x >> 11) * 0x1.0p-53; }

    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace detail

struct PairOffsets {
    int16_t px = 0, py = 0;
    int16_t qx = 0, qy = 0;
    friend bool operator==(const PairOffsets&, const PairOffsets&) = default;
};

// The n fixed sample-pair offsets shared by every pixel: both endpoints drawn
// from a zero-mean isotropic Gaussian inside the S x S window, rounded to
// integers and clamped to the window; pairs that land on a single pixel are
// redrawn so a comparison never sees identical endpoints.
struct SamplingPattern {
    int n = 0;
    int window = 0;       // S
    double spread = 0.0;  // Gaussian standard deviation
    uint64_t seed = 0;
    std::vector<PairOffsets> pairs;

    int half_window() const { return window / 2; }

    friend bool operator==(const SamplingPattern&, const SamplingPattern&) = default;
};

inline SamplingPattern generate_pattern(int n, int window, double spread, uint64_t seed) {
    if (n < 1) throw InvalidArgument("pattern: n must be >= 1");
    if (window < 2) throw InvalidArgument("pattern: window must be >= 2");
    if (!(spread > 0.0)) throw InvalidArgument("pattern: spread must be > 0");

    SamplingPattern pat;
    pat.n = n;
    pat.window = window;
    pat.spread = spread;
    pat.seed = seed;
    pat.pairs.resize(size_t(n));

    detail::GaussianSource gauss(seed);
    const int half = window / 2;
    auto draw = [&]() -> int16_t {
        long v = std::lround(spread * gauss.next());
        if (v < -half) v = -half;
        if (v > half) v = half;
        return int16_t(v);
    };
    for (auto& pair : pat.pairs) {
        do {
            pair.px = draw();
            pair.py = draw();
            pair.qx = draw();
            pair.qy = draw();
        } while (pair.px == pair.qx && pair.py == pair.qy);
    }
    return pat;
}

// Sidecar format so a run is exactly reproducible: generator name, the
// generating parameters, and the realized offset list.
inline void save_pattern(const SamplingPattern& pat, const std::string& path) {
    nlohmann::json j;
    j["generator"] = kGeneratorName;
    j["n"] = pat.n;
    j["S"] = pat.window;
    j["spread"] = pat.spread;
    j["seed"] = pat.seed;
    auto& pairs = j["pairs"] = nlohmann::json::array();
    for (const PairOffsets& p : pat.pairs)
        pairs.push_back({p.px, p.py, p.qx, p.qy});
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << j.dump(1, '\t') << "\n";
    if (!out) throw IoError("write failed on " + path);
}

inline SamplingPattern load_pattern(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad pattern file " + path + ": " + e.what());
    }
    try {
        if (j.at("generator").get<std::string>() != kGeneratorName)
            throw FormatError("pattern file " + path + " uses unknown generator '" +
                              j.at("generator").get<std::string>() + "'");
        SamplingPattern pat;
        pat.n = j.at("n").get<int>();
        pat.window = j.at("S").get<int>();
        pat.spread = j.at("spread").get<double>();
        pat.seed = j.at("seed").get<uint64_t>();
        const auto& pairs = j.at("pairs");
        if (int(pairs.size()) != pat.n)
            throw FormatError("pattern file " + path + ": pair count does not match n");
        pat.pairs.reserve(pairs.size());
        const int half = pat.window / 2;
        for (const auto& e : pairs) {
            PairOffsets p{int16_t(e.at(0).get<int>()), int16_t(e.at(1).get<int>()),
                          int16_t(e.at(2).get<int>()), int16_t(e.at(3).get<int>())};
            if (p.px < -half || p.px > half || p.py < -half || p.py > half ||
                p.qx < -half || p.qx > half || p.qy < -half || p.qy > half)
                throw FormatError("pattern file " + path + ": offset outside window");
            pat.pairs.push_back(p);
        }
        return pat;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad pattern file " + path + ": " + e.what());
    }
}

}  // namespace bsm
