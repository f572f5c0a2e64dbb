// Walks one sampling step by hand: raw distribution, penalties, renormalized
// distribution, nucleus, and a few seeded draws.

#include <iomanip>
#include <iostream>

#include "samplebench/sampling.hpp"

using namespace samplebench;

namespace {

void print(const char* title, const std::map<Token, double>& entries) {
  std::cout << title << '\n';
  for (const auto& [t, p] : entries) {
    std::cout << "  " << std::setw(6) << t << "  " << std::fixed << std::setprecision(4) << p
              << '\n';
  }
}

}  // namespace

int main() {
  const TokenDistribution dist({{"the", 0.40}, {"sea", 0.25}, {"light", 0.20}, {"held", 0.15}});
  const auto history = TokenHistory::from(std::vector<Token>{"the", "the", "sea"});

  print("next-token distribution:", dist.entries());

  const auto weights = apply_penalties(dist, history, 0.5, 0.5);
  print("after frequency 0.5 / presence 0.5 (history: the x2, sea x1):", weights.entries());

  const auto adjusted = renormalize(weights);
  print("renormalized:", adjusted.entries());

  const auto pool = nucleus_filter(adjusted, 0.8);
  std::cout << "nucleus at top_p 0.8 (mass " << pool.cumulative_mass << "):";
  for (const auto& t : pool.tokens) std::cout << ' ' << t;
  std::cout << "\n\ndraws:";
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    SamplerRng rng(seed);
    std::cout << ' ' << sample_token(pool, adjusted, rng);
  }
  std::cout << '\n';
}
