#pragma once

#include <string>

#include "loadcast/rng.hpp"
#include "loadcast/tensor.hpp"

namespace loadcast {

/// Weight initialization schemes selectable by the hyperparameter search.
///   xavier: uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out))
///   he:     normal(0, sqrt(2 / fan_in))
///   random: uniform(-0.05, 0.05)
enum class InitScheme { xavier, he, random };

InitScheme init_scheme_from_name(const std::string& name);
const char* to_string(InitScheme scheme);

/// Fills a weight tensor in flat index order using the scheme's distribution.
void init_tensor(Tensor& t, InitScheme scheme, std::size_t fan_in, std::size_t fan_out,
                 Rng& rng);

}  // namespace loadcast
