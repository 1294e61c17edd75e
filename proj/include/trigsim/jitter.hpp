#pragma once

#include <cmath>
#include <cstdint>

#include "trigsim/errors.hpp"
#include "trigsim/rng.hpp"
#include "trigsim/time.hpp"

namespace trigsim {

// Random timing offset applied to a link delay or an analog output instant.
struct JitterSpec {
    enum class Kind : std::uint8_t { none, uniform, gaussian };

    Kind kind = Kind::none;
    Duration half_width{}; // uniform: draw in [-half_width, +half_width]
    Duration sigma{};      // gaussian: standard deviation
    Duration clamp{};      // gaussian: hard bound on |draw|

    static JitterSpec none() { return {}; }

    static JitterSpec uniform(Duration half_width) {
        JitterSpec s;
        s.kind = Kind::uniform;
        s.half_width = half_width;
        return s;
    }

    // clamp <= 0 selects the default bound of 5 sigma.
    static JitterSpec gaussian(Duration sigma, Duration clamp = Duration(0)) {
        JitterSpec s;
        s.kind = Kind::gaussian;
        s.sigma = sigma;
        s.clamp = clamp.count() > 0 ? clamp : Duration(sigma.count() * 5);
        return s;
    }

    // Worst-case magnitude of a draw. Lets callers budget for jitter
    // without sampling.
    Duration bound() const {
        switch (kind) {
            case Kind::none: return Duration(0);
            case Kind::uniform: return half_width;
            case Kind::gaussian: return clamp;
        }
        throw ConfigError("invalid jitter kind");
    }

    void validate() const {
        if (kind == Kind::uniform && half_width.count() < 0)
            throw ConfigError("uniform jitter half_width must be >= 0");
        if (kind == Kind::gaussian) {
            if (sigma.count() < 0) throw ConfigError("gaussian jitter sigma must be >= 0");
            if (clamp.count() < 0) throw ConfigError("gaussian jitter clamp must be >= 0");
        }
    }
};

// One signed draw. Consumes a fixed number of generator values per kind
// (none: 0, uniform: one rejection loop, gaussian: 12 uniforms), so draw
// sequences are reproducible across builds.
inline Duration sample_jitter(const JitterSpec& spec, RngHandle& rng) {
    switch (spec.kind) {
        case JitterSpec::Kind::none:
            return Duration(0);
        case JitterSpec::Kind::uniform: {
            const std::int64_t hw = spec.half_width.count();
            return Duration(rng.uniform_in(-hw, hw));
        }
        case JitterSpec::Kind::gaussian: {
            const double z = rng.gaussian();
            std::int64_t v = std::llround(z * static_cast<double>(spec.sigma.count()));
            const std::int64_t c = spec.clamp.count();
            if (v > c) v = c;
            if (v < -c) v = -c;
            return Duration(v);
        }
    }
    throw ConfigError("invalid jitter kind");
}

} // namespace trigsim
