#pragma once

#include <stdexcept>
#include <string>

namespace heislift {

/// The target space has no Lipschitz fill for spheres of this dimension.
class UnsupportedFill : public std::runtime_error {
 public:
  UnsupportedFill(std::string kind, int k)
      : std::runtime_error("unsupported fill: target " + kind + " has no fill for S^" + std::to_string(k)),
        kind_(std::move(kind)),
        k_(k) {}
  const std::string& kind() const { return kind_; }
  int sphere_dimension() const { return k_; }

 private:
  std::string kind_;
  int k_;
};

/// The simplicial complex failed a conformity check.
class ConstructionError : public std::runtime_error {
 public:
  ConstructionError(const std::string& what, long first, long second)
      : std::runtime_error(what + " (simplices " + std::to_string(first) + ", " + std::to_string(second) + ")"),
        first_(first),
        second_(second) {}
  long first() const { return first_; }
  long second() const { return second_; }

 private:
  long first_;
  long second_;
};

/// A query point lies outside every accepted cube.
class NotCovered : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A radial projection was asked to act too close to its center.
class SingularProximity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No finite-difference direction stays inside the domain.
class NoValidDirection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace heislift
