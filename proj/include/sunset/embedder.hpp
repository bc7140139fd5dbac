#pragma once

#include <functional>
#include <string>
#include <vector>

namespace sunset {

using Embedding = std::vector<double>;

/// Maps a batch of texts to one vector per text, in order.
using Embedder = std::function<std::vector<Embedding>(const std::vector<std::string>&)>;

}  // namespace sunset
