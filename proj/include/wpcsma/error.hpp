#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpcsma {

/// A parameter or input value violates a documented precondition.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The model reached a state where a requested quantity is undefined
/// (e.g. a zero throughput inside a logarithm).
class InvalidState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No point satisfies the box and energy-neutrality constraints.
///
/// `diagnosis` holds one human-readable line per offending node.
class Infeasible : public std::runtime_error {
 public:
  Infeasible(const std::string& what, std::vector<std::string> diagnosis,
             std::optional<std::size_t> node = std::nullopt)
      : std::runtime_error(what), diagnosis_(std::move(diagnosis)), node_(node) {}

  const std::vector<std::string>& diagnosis() const noexcept { return diagnosis_; }
  std::optional<std::size_t> node() const noexcept { return node_; }

 private:
  std::vector<std::string> diagnosis_;
  std::optional<std::size_t> node_;
};

}  // namespace wpcsma
