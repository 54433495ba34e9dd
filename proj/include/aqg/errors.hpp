#pragma once

#include <stdexcept>
#include <string>

namespace aqg {

// Error taxonomy mirrors the CLI exit codes:
//   UsageError -> 1, DataError -> 2, ProviderError -> 3.
class UsageError : public std::runtime_error {
  public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class ProviderError : public std::runtime_error {
  public:
    ProviderError(const std::string& msg, int attempts = 1)
        : std::runtime_error(msg), attempts_(attempts) {}

    int attempts() const { return attempts_; }

  private:
    int attempts_;
};

} // namespace aqg
