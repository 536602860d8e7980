#include "bbayes/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "bbayes/errors.hpp"
#include "bbayes/model.hpp"

namespace bbayes {

namespace {

constexpr std::size_t kExactLimit = 20;
constexpr double kInf = std::numeric_limits<double>::infinity();

SetCoverSolution cover_by_universe_dp(std::size_t universe, const std::vector<std::vector<std::size_t>>& sets,
                                      const std::vector<double>& costs) {
  const std::size_t full = (std::size_t{1} << universe) - 1;
  std::vector<std::uint32_t> masks(sets.size(), 0);
  for (std::size_t s = 0; s < sets.size(); ++s)
    for (std::size_t e : sets[s]) masks[s] |= std::uint32_t{1} << e;
  std::vector<double> best(full + 1, kInf);
  std::vector<std::uint32_t> from(full + 1, 0);
  std::vector<std::uint32_t> via(full + 1, 0);
  best[0] = 0.0;
  for (std::size_t mask = 0; mask <= full; ++mask) {
    if (best[mask] == kInf) continue;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const std::size_t next = mask | masks[s];
      if (next == mask) continue;
      const double c = best[mask] + costs[s];
      if (c < best[next]) {
        best[next] = c;
        from[next] = static_cast<std::uint32_t>(mask);
        via[next] = static_cast<std::uint32_t>(s);
      }
    }
  }
  SetCoverSolution sol;
  sol.exact = true;
  sol.method = "exact_dp";
  sol.cost = best[full];
  for (std::size_t mask = full; mask != 0; mask = from[mask]) sol.chosen.push_back(via[mask]);
  std::sort(sol.chosen.begin(), sol.chosen.end());
  return sol;
}

SetCoverSolution cover_by_enumeration(std::size_t universe, const std::vector<std::vector<std::size_t>>& sets,
                                      const std::vector<double>& costs) {
  const std::size_t words = (universe + 63) / 64;
  std::vector<std::uint64_t> set_bits(sets.size() * words, 0);
  for (std::size_t s = 0; s < sets.size(); ++s)
    for (std::size_t e : sets[s]) set_bits[s * words + e / 64] |= std::uint64_t{1} << (e % 64);
  std::vector<std::uint64_t> full(words, ~std::uint64_t{0});
  if (universe % 64 != 0) full.back() = (std::uint64_t{1} << (universe % 64)) - 1;

  const std::size_t count = std::size_t{1} << sets.size();
  std::vector<std::uint64_t> cover(count * words, 0);
  std::vector<double> cost(count, 0.0);
  double best = kInf;
  std::size_t best_mask = 0;
  for (std::size_t mask = 1; mask < count; ++mask) {
    const std::size_t low = static_cast<std::size_t>(__builtin_ctzll(mask));
    const std::size_t rest = mask & (mask - 1);
    cost[mask] = cost[rest] + costs[low];
    bool complete = true;
    for (std::size_t w = 0; w < words; ++w) {
      cover[mask * words + w] = cover[rest * words + w] | set_bits[low * words + w];
      complete = complete && cover[mask * words + w] == full[w];
    }
    if (complete && cost[mask] < best) {
      best = cost[mask];
      best_mask = mask;
    }
  }
  SetCoverSolution sol;
  sol.exact = true;
  sol.method = "exact_enumeration";
  sol.cost = best;
  for (std::size_t s = 0; s < sets.size(); ++s)
    if ((best_mask >> s) & 1u) sol.chosen.push_back(s);
  return sol;
}

SetCoverSolution cover_greedily(std::size_t universe, const std::vector<std::vector<std::size_t>>& sets,
                                const std::vector<double>& costs) {
  std::vector<bool> covered(universe, false);
  std::vector<bool> used(sets.size(), false);
  std::size_t remaining = universe;
  SetCoverSolution sol;
  sol.method = "greedy";
  while (remaining > 0) {
    std::size_t pick = sets.size();
    double pick_ratio = kInf;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      if (used[s]) continue;
      std::size_t gain = 0;
      for (std::size_t e : sets[s]) gain += covered[e] ? 0 : 1;
      if (gain == 0) continue;
      const double ratio = costs[s] / static_cast<double>(gain);
      if (ratio < pick_ratio) {
        pick_ratio = ratio;
        pick = s;
      }
    }
    if (pick == sets.size()) throw std::invalid_argument("set cover: universe is not coverable");
    used[pick] = true;
    sol.chosen.push_back(pick);
    sol.cost += costs[pick];
    for (std::size_t e : sets[pick]) {
      if (!covered[e]) {
        covered[e] = true;
        --remaining;
      }
    }
  }
  // Reverse delete: drop chosen sets made redundant by later picks, most
  // expensive first.
  std::vector<std::size_t> hits(universe, 0);
  for (std::size_t s : sol.chosen)
    for (std::size_t e : sets[s]) ++hits[e];
  std::vector<std::size_t> order = sol.chosen;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a] > costs[b]; });
  for (std::size_t s : order) {
    if (!std::all_of(sets[s].begin(), sets[s].end(), [&](std::size_t e) { return hits[e] > 1; })) continue;
    for (std::size_t e : sets[s]) --hits[e];
    sol.chosen.erase(std::find(sol.chosen.begin(), sol.chosen.end(), s));
  }
  std::sort(sol.chosen.begin(), sol.chosen.end());
  sol.cost = 0.0;
  for (std::size_t s : sol.chosen) sol.cost += costs[s];
  return sol;
}

// sets[s] -> for each element, whether some set holds it; throws for the first bare element.
void require_coverable(std::size_t universe, const std::vector<std::vector<std::size_t>>& sets) {
  std::vector<bool> hit(universe, false);
  for (const auto& s : sets)
    for (std::size_t e : s) hit[e] = true;
  for (std::size_t e = 0; e < universe; ++e)
    if (!hit[e])
      throw UncoverableMemberError(e, "dictionary member " + std::to_string(e) +
                                          " has no admissible lower bracket in the pool");
}

ComplexityResult to_result(const SetCoverSolution& sol, bool count_only) {
  ComplexityResult r;
  r.value = count_only ? static_cast<double>(sol.chosen.size()) : sol.cost;
  r.exact = sol.exact;
  r.method = sol.method;
  r.chosen = sol.chosen;
  return r;
}

}  // namespace

FunctionDictionary::FunctionDictionary(std::vector<GridFunction> members) : members_(std::move(members)) {
  if (members_.empty()) throw std::invalid_argument("FunctionDictionary: no members");
  for (const auto& f : members_)
    if (f.level() != members_.front().level())
      throw std::invalid_argument("FunctionDictionary: members on different grid levels");
}

FunctionDictionary with_pairwise_minima(const FunctionDictionary& dict) {
  std::vector<GridFunction> out = dict.members();
  for (std::size_t i = 0; i < dict.size(); ++i)
    for (std::size_t j = i + 1; j < dict.size(); ++j) out.push_back(pointwise_min(dict[i], dict[j]));
  return FunctionDictionary(std::move(out));
}

std::vector<GridFunction> upper_excess_members(const FunctionDictionary& dict, const GridFunction& f0,
                                               double eps) {
  std::vector<GridFunction> out;
  for (const auto& f : dict.members())
    if (positive_part_integral(f, f0) >= eps) out.push_back(f);
  return out;
}

SetCoverSolution solve_set_cover(std::size_t universe, const std::vector<std::vector<std::size_t>>& sets,
                                 const std::vector<double>& costs, CoverMethod method) {
  if (costs.size() != sets.size()) throw std::invalid_argument("set cover: costs/sets size mismatch");
  for (const auto& s : sets)
    for (std::size_t e : s)
      if (e >= universe) throw std::invalid_argument("set cover: element out of range");
  if (universe == 0) {
    SetCoverSolution sol;
    sol.exact = true;
    sol.method = "exact_dp";
    return sol;
  }
  require_coverable(universe, sets);
  if (method != CoverMethod::greedy) {
    if (universe <= kExactLimit) return cover_by_universe_dp(universe, sets, costs);
    if (sets.size() <= kExactLimit) return cover_by_enumeration(universe, sets, costs);
    if (method == CoverMethod::exact)
      throw std::length_error("exact set cover needs at most 20 elements or 20 candidate sets");
  }
  return cover_greedily(universe, sets, costs);
}

ComplexityResult covering_number(const FunctionDictionary& dict, double eps, bool exact) {
  if (!(eps > 0.0)) throw std::invalid_argument("covering_number: eps must be positive");
  if (exact && dict.size() > kExactLimit)
    throw std::length_error("covering_number: exact mode supports at most 20 members");
  std::vector<std::vector<std::size_t>> sets(dict.size());
  for (std::size_t c = 0; c < dict.size(); ++c)
    for (std::size_t f = 0; f < dict.size(); ++f)
      if (sup_distance(dict[c], dict[f]) <= eps) sets[c].push_back(f);
  const std::vector<double> costs(dict.size(), 1.0);
  return to_result(solve_set_cover(dict.size(), sets, costs, exact ? CoverMethod::exact : CoverMethod::greedy),
                   true);
}

ComplexityResult one_sided_bracketing_number(const FunctionDictionary& dict, double delta,
                                             const FunctionDictionary& pool, CoverMethod method) {
  if (!(delta >= 0.0)) throw std::invalid_argument("one_sided_bracketing_number: delta must be >= 0");
  std::vector<std::vector<std::size_t>> sets(pool.size());
  for (std::size_t l = 0; l < pool.size(); ++l)
    for (std::size_t f = 0; f < dict.size(); ++f)
      if (dominated_by(pool[l], dict[f]) && integral(dict[f]) - integral(pool[l]) <= delta)
        sets[l].push_back(f);
  const std::vector<double> costs(pool.size(), 1.0);
  return to_result(solve_set_cover(dict.size(), sets, costs, method), true);
}

ComplexityResult separation_quantity(const FunctionDictionary& dict, const GridFunction& f0, double n,
                                     const FunctionDictionary& pool, CoverMethod method) {
  if (!(n > 0.0)) throw std::invalid_argument("separation_quantity: n must be positive");
  std::vector<std::vector<std::size_t>> sets(pool.size());
  std::vector<double> costs(pool.size());
  for (std::size_t l = 0; l < pool.size(); ++l) {
    costs[l] = std::exp(-n * positive_part_integral(pool[l], f0));
    for (std::size_t f = 0; f < dict.size(); ++f)
      if (dominated_by(pool[l], dict[f])) sets[l].push_back(f);
  }
  return to_result(solve_set_cover(dict.size(), sets, costs, method), false);
}

}  // namespace bbayes
