#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bbayes/grid_function.hpp"

namespace bbayes {

/// A nonempty finite family of functions on one grid level.
class FunctionDictionary {
 public:
  explicit FunctionDictionary(std::vector<GridFunction> members);

  std::size_t size() const { return members_.size(); }
  int level() const { return members_.front().level(); }
  const GridFunction& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<GridFunction>& members() const { return members_; }

 private:
  std::vector<GridFunction> members_;
};

/// The dictionary followed by the pointwise minima of all member pairs.
FunctionDictionary with_pairwise_minima(const FunctionDictionary& dict);

/// Members f with \int (f - f0)_+ >= eps.
std::vector<GridFunction> upper_excess_members(const FunctionDictionary& dict, const GridFunction& f0,
                                               double eps);

enum class CoverMethod { automatic, exact, greedy };

struct ComplexityResult {
  double value = 0.0;
  bool exact = false;
  std::string method;                 // "exact_dp", "exact_enumeration" or "greedy"
  std::vector<std::size_t> chosen;    // indices of the selected centres or brackets
};

/// Minimal number of closed sup-norm balls of radius eps, centred at members,
/// covering the dictionary. exact = true requires at most 20 members and
/// throws std::length_error otherwise; exact = false runs greedy set cover.
ComplexityResult covering_number(const FunctionDictionary& dict, double eps, bool exact);

/// Minimal number of pool elements l such that every member f has one with
/// l <= f bin-wise and \int (f - l) <= delta. Throws UncoverableMemberError
/// naming the first member without an admissible bracket.
///
/// automatic uses an exact solver when the dictionary or the pool has at
/// most 20 elements, greedy otherwise.
ComplexityResult one_sided_bracketing_number(const FunctionDictionary& dict, double delta,
                                             const FunctionDictionary& pool,
                                             CoverMethod method = CoverMethod::automatic);

/// min over lower-bracket families from the pool of sum_j exp(-n \int (l_j - f0)_+).
ComplexityResult separation_quantity(const FunctionDictionary& dict, const GridFunction& f0, double n,
                                     const FunctionDictionary& pool,
                                     CoverMethod method = CoverMethod::automatic);

/// Weighted set cover over a universe of `universe` elements.
///
/// sets[s] lists the elements covered by set s. Returns the chosen sets and
/// their total cost. Exact solvers: dynamic programming over universe masks
/// (universe <= 20) or enumeration of set subsets (<= 20 sets).
struct SetCoverSolution {
  std::vector<std::size_t> chosen;
  double cost = 0.0;
  bool exact = false;
  std::string method;
};

SetCoverSolution solve_set_cover(std::size_t universe, const std::vector<std::vector<std::size_t>>& sets,
                                 const std::vector<double>& costs, CoverMethod method);

}  // namespace bbayes
