#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace aqg {

// Pluggable source of per-token vectors for the BERTScore matching core.
// Contextual models live behind this interface; the artifact ships a
// deterministic hashed embedder so scoring runs without model weights.
class TokenEmbedder {
  public:
    virtual ~TokenEmbedder() = default;
    virtual size_t dim() const = 0;
    virtual std::vector<double> embed(const std::string& token) const = 0;
};

// Unit vector drawn from a gaussian seeded by the token hash. Identical
// tokens map to identical rows on every platform; distinct tokens are close
// to orthogonal at dim 64.
class HashedEmbedder : public TokenEmbedder {
  public:
    explicit HashedEmbedder(size_t dim = 64);

    size_t dim() const override { return dim_; }
    std::vector<double> embed(const std::string& token) const override;

  private:
    size_t dim_;
};

} // namespace aqg
