#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "bsm/errors.hpp"
#include "bsm/pattern.hpp"

namespace bsm {

// Every tunable of the pipeline. d_max is dataset-dependent and therefore
// ships without a default; callers must set it before running.
struct BsmConfig {
    int n = 4096;             // descriptor length in bits
    int window = 26;          // S, sampling window side
    double spread = 4.0;      // Gaussian standard deviation of the sampling
    uint64_t seed = 42;
    int d_max = 0;
    double lambda_c = 9.0;
    double lambda_e = 16.0;
    double lr_tolerance = 1.0;
    int vote_radius = 20;
    double gt_scale = 16.0;   // disparity quantization for 16-bit PGM output
    int threads = 1;
    std::string generator = kGeneratorName;

    void validate() const {
        if (n < 1) throw InvalidArgument("config: n must be >= 1");
        if (window < 2) throw InvalidArgument("config: S must be >= 2");
        if (!(spread > 0)) throw InvalidArgument("config: spread must be > 0");
        if (d_max < 1) throw InvalidArgument("config: d_max must be set (>= 1)");
        if (!(lambda_c > 0)) throw InvalidArgument("config: lambda_c must be > 0");
        if (!(lambda_e > 0)) throw InvalidArgument("config: lambda_e must be > 0");
        if (lr_tolerance < 0) throw InvalidArgument("config: lr_tolerance must be >= 0");
        if (vote_radius < 1) throw InvalidArgument("config: vote_radius must be >= 1");
        if (!(gt_scale > 0)) throw InvalidArgument("config: gt_scale must be > 0");
        if (threads < 1) throw InvalidArgument("config: threads must be >= 1");
        if (generator != kGeneratorName)
            throw InvalidArgument("config: unknown generator '" + generator +
                                  "', this build provides " + kGeneratorName);
    }

    friend bool operator==(const BsmConfig&, const BsmConfig&) = default;
};

inline void to_json(nlohmann::json& j, const BsmConfig& c) {
    j = nlohmann::json{{"n", c.n},
                       {"S", c.window},
                       {"spread", c.spread},
                       {"seed", c.seed},
                       {"d_max", c.d_max},
                       {"lambda_c", c.lambda_c},
                       {"lambda_e", c.lambda_e},
                       {"lr_tolerance", c.lr_tolerance},
                       {"vote_radius", c.vote_radius},
                       {"gt_scale", c.gt_scale},
                       {"threads", c.threads},
                       {"generator", c.generator}};
}

// Missing keys keep their defaults so partial config files compose with the
// CLI-flag > file > default precedence.
inline void from_json(const nlohmann::json& j, BsmConfig& c) {
    c.n = j.value("n", c.n);
    c.window = j.value("S", c.window);
    c.spread = j.value("spread", c.spread);
    c.seed = j.value("seed", c.seed);
    c.d_max = j.value("d_max", c.d_max);
    c.lambda_c = j.value("lambda_c", c.lambda_c);
    c.lambda_e = j.value("lambda_e", c.lambda_e);
    c.lr_tolerance = j.value("lr_tolerance", c.lr_tolerance);
    c.vote_radius = j.value("vote_radius", c.vote_radius);
    c.gt_scale = j.value("gt_scale", c.gt_scale);
    c.threads = j.value("threads", c.threads);
    c.generator = j.value("generator", c.generator);
}

inline void save_config(const BsmConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << nlohmann::json(cfg).dump(1, '\t') << "\n";
    if (!out) throw IoError("write failed on " + path);
}

inline BsmConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad config file " + path + ": " + e.what());
    }
    try {
        return j.get<BsmConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad config file " + path + ": " + e.what());
    }
}

inline SamplingPattern generate_pattern(const BsmConfig& cfg) {
    if (cfg.generator != kGeneratorName)
        throw InvalidArgument("config: unknown generator '" + cfg.generator + "'");
    return generate_pattern(cfg.n, cfg.window, cfg.spread, cfg.seed);
}

}  // namespace bsm
