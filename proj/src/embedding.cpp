#include "aqg/embedding.hpp"

#include <cmath>

#include "aqg/errors.hpp"
#include "aqg/text.hpp"

namespace aqg {

HashedEmbedder::HashedEmbedder(size_t dim) : dim_(dim) {
    if (dim_ == 0) throw UsageError("embedding dimension must be >= 1");
}

std::vector<double> HashedEmbedder::embed(const std::string& token) const {
    Rng rng(fnv1a64(token));
    std::vector<double> v(dim_);
    double norm_sq = 0.0;
    for (auto& x : v) {
        x = rng.next_gaussian();
        norm_sq += x * x;
    }
    double norm = std::sqrt(norm_sq);
    if (norm < 1e-12) {
        v.assign(dim_, 0.0);
        v[0] = 1.0;
        return v;
    }
    for (auto& x : v) x /= norm;
    return v;
}

} // namespace aqg
