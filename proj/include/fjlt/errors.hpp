#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace fjlt {

/// Base class for every failure this library raises on purpose. The category
/// string is stable and machine-readable; the what() text is for humans.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& what)
      : std::runtime_error(what), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

/// A size is not admissible (not a power of two, mismatched lengths, ...).
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error("dimension", what) {}
};

/// A parameter combination can never work, e.g. d below the minimum width the
/// code construction supports for the requested k. Carries the smallest d
/// that would have been accepted.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, std::uint64_t min_feasible_d)
      : Error("infeasible", what), min_feasible_d_(min_feasible_d) {}

  std::uint64_t min_feasible_d() const noexcept { return min_feasible_d_; }

 private:
  std::uint64_t min_feasible_d_;
};

/// An argument is out of its documented domain (zero trials, eps outside
/// (0,1), an index past the end, ...).
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error("argument", what) {}
};

/// A file or byte buffer does not parse as the format it claims to be.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error("format", what) {}
};

/// The request is valid but would exhaust a hard resource bound, e.g. an
/// exhaustive enumeration past the supported dimension.
class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error("resource", what) {}
};

/// A table lookup was asked for an entry that does not exist.
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error("range", what) {}
};

/// A regression had too few usable points to determine its coefficients.
class FitError : public Error {
 public:
  explicit FitError(const std::string& what) : Error("fit", what) {}
};

}  // namespace fjlt
