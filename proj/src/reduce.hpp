// reduce.hpp - funnel-to-pyramid reduction: ray surgery, random partitions,
// peeling into a 1-sum of pyramid blocks, and funnel embeddings assembled
// from pyramid embeddings.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core.hpp"
#include "embed.hpp"
#include "pyramid.hpp"
#include "util.hpp"

namespace npce {

// Iterated ball carving: centers in id order, radius uniform in
// [scale/4, scale/2], each ball claiming the still-uncovered vertices.
struct RandomPartition {
  double scale = 0;
  std::vector<uint32_t> cluster;  // vertex -> cluster id
  std::vector<uint32_t> centers;  // cluster id -> carving center
  std::vector<double> radii;      // cluster id -> carving radius
};

RandomPartition lipschitz_partition(const Graph& g, double scale, Rng& rng);

// Empirical separation modulus: max over pairs of
// Pr[cluster(x) != cluster(y)] * scale / d(x, y), over sampled partitions.
struct BetaEstimate {
  double beta = 0;
  double scale = 0;
  uint32_t partitions = 0;
  double max_diam = 0;  // largest cluster diameter seen (must stay <= scale)
};

BetaEstimate estimate_beta(const Graph& g, double scale, uint32_t partitions, uint64_t seed,
                           uint32_t threads);

// Ray surgery: the parent chain through a chosen bottom vertex is replaced by
// a depth x 4 grid, giving the widened funnel G'. The peel set A is the two
// central grid columns plus the basepoint; dil_{G'}(A) = 1 is asserted.
struct RaySurgery {
  Funnel funnel;
  std::vector<uint32_t> ray;  // funnel ids, basepoint first
  Funnel widened;             // G'
  Graph widened_graph;
  FiniteMetric funnel_metric;
  FiniteMetric widened_metric;
  std::vector<std::array<uint32_t, 4>> grid;  // grid[i] = row replacing ray[i+1]
  std::vector<uint32_t> peel_set;             // A as G' ids, basepoint first
  std::vector<uint32_t> wide_map;  // funnel id -> G' id, ray to column 1
  std::vector<uint32_t> body_map;  // funnel id -> G' id, ray to column 0
  EmbeddingReport widening;        // wide_map distances vs funnel distances
};

// ray_index picks a bottom-layer position; -1 draws one uniformly.
RaySurgery ray_surgery(const Funnel& f, int64_t ray_index, Rng& rng);

// Picks the attachment vertex (a G' id from the peel set) recorded with each
// peel sample.
using AttachmentSampler = std::function<uint32_t(const RaySurgery&, Rng&)>;

// Default: nearest peel-set vertex to a random cluster center of a Lipschitz
// partition of G' at scale diam/2.
AttachmentSampler attach_by_partition();
AttachmentSampler attach_uniform();
AttachmentSampler attach_basepoint();

// One peeling draw: G' cut along A into the two pyramid blocks
// G'[A] (the grid plus apex) and G'[V minus A plus basepoint] (the cut-open
// funnel), 1-summed at the basepoint they share. `glued` is G' without the
// per-row seam edges, on G' ids.
struct ReductionSample {
  uint32_t attach = 0;  // sampled attachment vertex (G' id)
  Pyramid block_a;
  Pyramid block_body;
  std::vector<uint32_t> a_ids;     // block-local -> G' id
  std::vector<uint32_t> body_ids;  // block-local -> G' id
  Graph glued;
  bool blocks_match_induced = false;  // block edges == induced G' edges
};

ReductionSample peel(const RaySurgery& s, Rng& rng,
                     const AttachmentSampler& sampler = attach_by_partition());

std::string reduction_sample_to_json(const ReductionSample& sample);

// Averages, over peel samples with uniformly chosen rays, the glued cut
// measures of per-block pyramid embeddings, pulled back to funnel ids along
// the body-side correspondence.
struct FunnelEmbedding {
  CutMeasure measure;      // on funnel ids
  EmbeddingReport report;  // measure distances vs funnel graph distances
  uint32_t peel_samples = 0;
  uint64_t mc_samples = 0;
  uint64_t seed = 0;
  double min_pair_ratio = 1;      // min over samples and pairs of glued/funnel distance
  double max_mean_inflation = 1;  // max over pairs of mean glued/funnel distance
};

FunnelEmbedding embed_funnel(const Funnel& f, uint32_t peel_samples, uint64_t mc_samples,
                             uint64_t seed, uint32_t threads);

}  // namespace npce
