#include <cmath>

#include "loadcast/error.hpp"
#include "loadcast/init.hpp"

namespace loadcast {

InitScheme init_scheme_from_name(const std::string& name) {
    if (name == "xavier") return InitScheme::xavier;
    if (name == "he") return InitScheme::he;
    if (name == "random") return InitScheme::random;
    throw errors::config("unknown init scheme '" + name + "' (expected xavier, he or random)");
}

const char* to_string(InitScheme scheme) {
    switch (scheme) {
        case InitScheme::xavier: return "xavier";
        case InitScheme::he: return "he";
        case InitScheme::random: return "random";
    }
    return "?";
}

void init_tensor(Tensor& t, InitScheme scheme, std::size_t fan_in, std::size_t fan_out,
                 Rng& rng) {
    switch (scheme) {
        case InitScheme::xavier: {
            const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
            for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-a, a);
            break;
        }
        case InitScheme::he: {
            const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
            for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.normal(0.0, stddev);
            break;
        }
        case InitScheme::random: {
            for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-0.05, 0.05);
            break;
        }
    }
}

}  // namespace loadcast
