#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bbayes {

/// dP_f/dP_g was requested for a pair with g not below f.
class DominationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Every importance draw was infeasible for the data.
class DegeneratePosteriorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dictionary member has no admissible lower bracket in the pool.
class UncoverableMemberError : public std::invalid_argument {
 public:
  UncoverableMemberError(std::size_t member, const std::string& what)
      : std::invalid_argument(what), member_(member) {}
  std::size_t member() const { return member_; }

 private:
  std::size_t member_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace bbayes
