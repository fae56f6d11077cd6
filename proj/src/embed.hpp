// embed.hpp - the randomized monotone-cut embedding of pyramids.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "pyramid.hpp"
#include "util.hpp"

namespace npce {

// A pyramid isometrically placed inside a deeper one: a new basepoint joined
// to the old one by a path of length 2*depth, giving total depth 3*depth.
struct ExtendedPyramid {
  Pyramid original;
  Pyramid extended;
  Skeleton skel;                 // skeleton of the extended pyramid
  std::vector<uint32_t> inject;  // original id -> extended id
  uint32_t delta = 0;            // depth of the original
  uint32_t delta_prime = 0;      // 3 * delta
  uint32_t steps = 0;            // ceil(log_3 delta) + 1; radii delta/3^i for i < steps
};

ExtendedPyramid extend(const Pyramid& p);

// One run of the evolution chain S_0, ..., S_steps with its random choices.
struct CutChain {
  uint32_t initial_index = 0;  // S_0 = ball(v', initial_index)
  std::vector<Bits> cuts;
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> sampled;
  std::vector<std::vector<char>> coins;  // per step, one advance coin per piece
};

CutChain sample_chain(const ExtendedPyramid& e, Rng& rng);

struct PairEstimate {
  uint32_t x = 0, y = 0;  // original-pyramid ids
  double f = 0;           // separation probability under the terminal cut
  double f0 = 0;          // |depth(x) - depth(y)| / delta_prime, exact
  double g = 0;           // f + f0
  double se = 0;          // standard error of f (0 in exact mode)
};

struct EmbeddingEstimate {
  std::vector<PairEstimate> pairs;
  uint64_t samples = 0;
  bool exact = false;
};

EmbeddingEstimate estimate(const ExtendedPyramid& e,
                           const std::vector<std::pair<uint32_t, uint32_t>>& pairs,
                           uint64_t samples, uint64_t seed, uint32_t threads);

// Exhaustive expansion of the chain: per-level distributions over cuts with
// exact rational probabilities. Throws a budget error when the number of
// expanded states would exceed the budget.
struct ExactChain {
  std::vector<std::vector<std::pair<Bits, Rat>>> levels;
};

ExactChain exact_chain(const ExtendedPyramid& e, uint64_t budget);

// Pr[v is a boundary vertex of S_level] for every extended-pyramid id v.
std::vector<Rat> exact_boundary_probs(const ExtendedPyramid& e, const ExactChain& c,
                                      uint32_t level);

// Pr[the terminal cut separates x from y]; extended-pyramid ids.
Rat exact_separation(const ExactChain& c, uint32_t x, uint32_t y);

EmbeddingEstimate exact_distribution(const ExtendedPyramid& e,
                                     const std::vector<std::pair<uint32_t, uint32_t>>& pairs,
                                     uint64_t budget);

// The full pipeline on one pyramid: Monte Carlo cut measure (terminal cuts at
// weight delta_prime/N plus the depth-ball cuts at weight 1), embedded
// distances, and the distortion report against the graph metric.
struct PyramidEmbedding {
  CutMeasure measure;  // on original-pyramid ids
  EmbeddingReport report;
  EmbeddingEstimate est;                        // all pairs x < y
  FiniteMetric graph_metric;                    // shortest-path distances
  std::vector<std::vector<double>> embedded;    // distances under the measure
  uint64_t samples = 0;
  uint64_t seed = 0;
};

PyramidEmbedding embed_pyramid(const Pyramid& p, uint64_t samples, uint64_t seed,
                               uint32_t threads);

std::string chain_to_json(const CutChain& c);

}  // namespace npce
