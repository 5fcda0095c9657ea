#pragma once

#include <stdexcept>
#include <string>

namespace prbpf {

// Malformed or truncated file contents (codebook, depth raster, manifest).
class FormatError : public std::runtime_error {
  public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Tracker could not be seeded from the first observation.
class InitializationError : public std::runtime_error {
  public:
    explicit InitializationError(const std::string& what) : std::runtime_error(what) {}
};

// Sequence generation / loading problems (frustum exit, missing rasters).
class SequenceError : public std::runtime_error {
  public:
    explicit SequenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace prbpf
