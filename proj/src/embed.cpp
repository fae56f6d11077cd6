#include "embed.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "json.hpp"

namespace npce {

using ojson = nlohmann::ordered_json;

namespace {

uint64_t pow3(uint32_t k) {
  uint64_t v = 1;
  while (k--) v *= 3;
  return v;
}

Bits depth_ball(const Pyramid& ext, uint32_t j) {
  Bits s(ext.n);
  for (uint32_t i = 0; i < j && i < ext.layers.size(); ++i)
    for (uint32_t v : ext.layers[i]) s.set(v);
  return s;
}

}  // namespace

ExtendedPyramid extend(const Pyramid& p) {
  auto viol = validate_pyramid(p);
  if (!viol.empty()) fail_check("extend: invalid pyramid: " + viol.front());
  ExtendedPyramid e;
  e.original = p;
  e.delta = p.depth();
  e.delta_prime = 3 * e.delta;
  e.steps = 0;
  while (pow3(e.steps) < e.delta) ++e.steps;
  ++e.steps;  // final evolution runs at radius delta/3^ceil(log3 delta) <= 1

  uint32_t shift = 2 * e.delta;  // path vertices 0 .. shift-1, originals offset by shift
  Pyramid& x = e.extended;
  x.n = p.n + shift;
  for (uint32_t i = 0; i < shift; ++i) x.layers.push_back({i});
  for (const auto& layer : p.layers) {
    std::vector<uint32_t> mapped(layer.size());
    for (size_t j = 0; j < layer.size(); ++j) mapped[j] = layer[j] + shift;
    x.layers.push_back(std::move(mapped));
  }
  x.parent.assign(x.n, -1);
  for (uint32_t i = 1; i < shift; ++i) x.parent[i] = i - 1;
  for (uint32_t v = 0; v < p.n; ++v)
    x.parent[v + shift] = p.parent[v] >= 0 ? p.parent[v] + shift : shift - 1;

  e.skel = skeleton(x);
  e.inject.resize(p.n);
  for (uint32_t v = 0; v < p.n; ++v) e.inject[v] = v + shift;
  return e;
}

CutChain sample_chain(const ExtendedPyramid& e, Rng& rng) {
  CutChain c;
  c.initial_index = 1 + static_cast<uint32_t>(rng.next_below(e.delta_prime));
  c.cuts.push_back(depth_ball(e.extended, c.initial_index));
  for (uint32_t i = 0; i < e.steps; ++i) {
    double r = static_cast<double>(e.delta) / static_cast<double>(pow3(i));
    EvolutionStep step = evolve(e.extended, e.skel, c.cuts.back(), r, rng);
    c.cuts.push_back(std::move(step.next));
    c.sampled.push_back(std::move(step.sampled));
    c.coins.push_back(std::move(step.coins));
  }
  return c;
}

EmbeddingEstimate estimate(const ExtendedPyramid& e,
                           const std::vector<std::pair<uint32_t, uint32_t>>& pairs,
                           uint64_t samples, uint64_t seed, uint32_t threads) {
  if (samples < 1) fail_usage("estimate: need at least one sample");
  const uint64_t chunk_size = 4096;
  uint32_t chunks = static_cast<uint32_t>((samples + chunk_size - 1) / chunk_size);
  SeedSequence seq(seed);
  std::vector<std::vector<uint64_t>> counts(chunks);
  parallel_chunks(chunks, threads, [&](uint32_t chunk) {
    uint64_t lo = chunk * chunk_size;
    uint64_t hi = std::min(samples, lo + chunk_size);
    Rng rng = seq.stream(chunk);
    std::vector<uint64_t> local(pairs.size(), 0);
    for (uint64_t s = lo; s < hi; ++s) {
      CutChain c = sample_chain(e, rng);
      const Bits& terminal = c.cuts.back();
      for (size_t i = 0; i < pairs.size(); ++i) {
        if (terminal.test(e.inject[pairs[i].first]) != terminal.test(e.inject[pairs[i].second]))
          ++local[i];
      }
    }
    counts[chunk] = std::move(local);
  });

  EmbeddingEstimate out;
  out.samples = samples;
  out.exact = false;
  auto li = [&](uint32_t v) { return e.skel.depth[e.inject[v]]; };
  for (size_t i = 0; i < pairs.size(); ++i) {
    uint64_t total = 0;
    for (uint32_t chunk = 0; chunk < chunks; ++chunk) total += counts[chunk][i];
    PairEstimate pe;
    pe.x = pairs[i].first;
    pe.y = pairs[i].second;
    pe.f = static_cast<double>(total) / static_cast<double>(samples);
    pe.f0 = std::abs(static_cast<double>(li(pe.x)) - static_cast<double>(li(pe.y))) /
            static_cast<double>(e.delta_prime);
    pe.g = pe.f + pe.f0;
    pe.se = std::sqrt(pe.f * (1.0 - pe.f) / static_cast<double>(samples));
    out.pairs.push_back(pe);
  }
  return out;
}

ExactChain exact_chain(const ExtendedPyramid& e, uint64_t budget) {
  ExactChain chain;
  std::map<Bits, Rat> level;
  Rat uniform(1, e.delta_prime);
  for (uint32_t j = 1; j <= e.delta_prime; ++j) level[depth_ball(e.extended, j)] = uniform;
  uint64_t expansions = e.delta_prime;

  auto flush = [&](std::map<Bits, Rat>& m) {
    chain.levels.emplace_back(m.begin(), m.end());
  };
  flush(level);

  for (uint32_t i = 0; i < e.steps; ++i) {
    uint64_t den3 = pow3(i);
    double r = static_cast<double>(e.delta) / static_cast<double>(den3);
    bool clamp = den3 >= e.delta;  // sampling probability min(1, 1/r)
    Rat q = clamp ? Rat(1) : Rat(static_cast<long long>(den3), e.delta);
    Rat not_q = Rat(1) - q;
    std::map<Bits, Rat> next;
    for (const auto& [cut, mass] : level) {
      EvolutionSpace space = evolution_space(e.extended, e.skel, cut, r);
      // Qualification re-decided in integers: fold >= r and fold < 6r with
      // r = delta / 3^i, so fold * 3^i must lie in [delta, 6 delta).
      std::vector<size_t> qual;
      for (size_t t = 0; t < space.junctions.size(); ++t) {
        uint64_t fold = space.junctions[t].fold;
        if (fold > 0 && fold * den3 >= e.delta && fold * den3 < 6ull * e.delta)
          qual.push_back(t);
      }
      if (qual.size() > 20) fail_budget("exact_chain: " + std::to_string(qual.size()) +
                                        " qualifying junctions in one state");
      // With the sampling probability clamped to 1 only the full tear set has
      // mass, so the subset enumeration collapses to a single term.
      uint64_t subsets = clamp ? 1 : (uint64_t(1) << qual.size());
      std::vector<char> splits(space.junctions.size(), 0);
      for (uint64_t mask = 0; mask < subsets; ++mask) {
        std::fill(splits.begin(), splits.end(), 0);
        size_t torn = 0;
        Rat prob = mass;
        for (size_t k = 0; k < qual.size(); ++k) {
          bool tear = clamp || (mask & (uint64_t(1) << k));
          if (tear) {
            splits[qual[k]] = 1;
            ++torn;
            prob = prob * q;
          } else {
            prob = prob * not_q;
          }
        }
        if (prob.num == 0) continue;
        size_t pieces = space.slots.empty() ? 0 : torn + 1;
        if (pieces > 20) fail_budget("exact_chain: " + std::to_string(pieces) +
                                     " boundary pieces in one state");
        uint64_t patterns = uint64_t(1) << pieces;
        expansions += patterns;
        if (expansions > budget)
          fail_budget("exact_chain: state expansion exceeds budget (needs > " +
                      std::to_string(expansions) + ", budget " + std::to_string(budget) + ")");
        Rat slice = prob * Rat(1, static_cast<long long>(patterns));
        std::vector<char> coins(pieces, 0);
        for (uint64_t cm = 0; cm < patterns; ++cm) {
          for (size_t k = 0; k < pieces; ++k) coins[k] = (cm >> k) & 1 ? 1 : 0;
          Bits advanced = apply_evolution(e.extended, e.skel, cut, r, space, splits, coins);
          auto it = next.find(advanced);
          if (it == next.end())
            next[advanced] = slice;
          else
            it->second = it->second + slice;
        }
      }
    }
    level = std::move(next);
    flush(level);
  }
  return chain;
}

std::vector<Rat> exact_boundary_probs(const ExtendedPyramid& e, const ExactChain& c,
                                      uint32_t level) {
  if (level >= c.levels.size()) fail_usage("exact_boundary_probs: level out of range");
  std::vector<Rat> probs(e.extended.n, Rat(0));
  for (const auto& [cut, mass] : c.levels[level]) {
    CutBoundary b = boundary(e.extended, e.skel, cut);
    for (uint32_t v : b.verts) probs[v] = probs[v] + mass;
  }
  return probs;
}

Rat exact_separation(const ExactChain& c, uint32_t x, uint32_t y) {
  Rat total(0);
  for (const auto& [cut, mass] : c.levels.back())
    if (cut.test(x) != cut.test(y)) total = total + mass;
  return total;
}

EmbeddingEstimate exact_distribution(const ExtendedPyramid& e,
                                     const std::vector<std::pair<uint32_t, uint32_t>>& pairs,
                                     uint64_t budget) {
  ExactChain chain = exact_chain(e, budget);
  EmbeddingEstimate out;
  out.samples = 0;
  out.exact = true;
  for (const auto& [x, y] : pairs) {
    PairEstimate pe;
    pe.x = x;
    pe.y = y;
    pe.f = exact_separation(chain, e.inject[x], e.inject[y]).to_double();
    long long dd = static_cast<long long>(e.skel.depth[e.inject[x]]) -
                   static_cast<long long>(e.skel.depth[e.inject[y]]);
    pe.f0 = Rat(dd < 0 ? -dd : dd, e.delta_prime).to_double();
    pe.g = pe.f + pe.f0;
    pe.se = 0;
    out.pairs.push_back(pe);
  }
  return out;
}

PyramidEmbedding embed_pyramid(const Pyramid& p, uint64_t samples, uint64_t seed,
                               uint32_t threads) {
  if (samples < 1) fail_usage("embed_pyramid: need at least one sample");
  PyramidEmbedding out;
  out.samples = samples;
  out.seed = seed;
  ExtendedPyramid e = extend(p);
  out.graph_metric = apsp(pyramid_to_graph(p));

  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  for (uint32_t x = 0; x < p.n; ++x)
    for (uint32_t y = x + 1; y < p.n; ++y) pairs.push_back({x, y});

  const uint64_t chunk_size = 4096;
  uint32_t chunks = static_cast<uint32_t>((samples + chunk_size - 1) / chunk_size);
  SeedSequence seq(seed);
  std::vector<std::vector<uint64_t>> counts(chunks);
  std::vector<std::vector<Bits>> cut_lists(chunks);
  parallel_chunks(chunks, threads, [&](uint32_t chunk) {
    uint64_t lo = chunk * chunk_size;
    uint64_t hi = std::min(samples, lo + chunk_size);
    Rng rng = seq.stream(chunk);
    std::vector<uint64_t> local(pairs.size(), 0);
    std::vector<Bits> cuts;
    cuts.reserve(hi - lo);
    for (uint64_t s = lo; s < hi; ++s) {
      CutChain c = sample_chain(e, rng);
      const Bits& terminal = c.cuts.back();
      Bits restricted(p.n);
      for (uint32_t v = 0; v < p.n; ++v)
        if (terminal.test(e.inject[v])) restricted.set(v);
      for (size_t i = 0; i < pairs.size(); ++i)
        if (restricted.test(pairs[i].first) != restricted.test(pairs[i].second)) ++local[i];
      cuts.push_back(std::move(restricted));
    }
    counts[chunk] = std::move(local);
    cut_lists[chunk] = std::move(cuts);
  });

  double per_sample_weight =
      static_cast<double>(e.delta_prime) / static_cast<double>(samples);
  for (uint32_t chunk = 0; chunk < chunks; ++chunk)
    for (Bits& cut : cut_lists[chunk]) out.measure.cuts.push_back({std::move(cut), per_sample_weight});
  // Depth-ball cuts at weight 1: unions of the shallowest k original layers.
  Bits ball(p.n);
  for (uint32_t k = 0; k + 1 < p.layers.size(); ++k) {
    for (uint32_t v : p.layers[k]) ball.set(v);
    out.measure.cuts.push_back({ball, 1.0});
  }
  out.measure.n = p.n;
  out.measure.canonicalize();

  std::vector<uint64_t> totals(pairs.size(), 0);
  for (uint32_t chunk = 0; chunk < chunks; ++chunk)
    for (size_t i = 0; i < pairs.size(); ++i) totals[i] += counts[chunk][i];

  out.embedded.assign(p.n, std::vector<double>(p.n, 0.0));
  out.est.samples = samples;
  out.est.exact = false;
  auto depth_of = [&](uint32_t v) { return e.skel.depth[e.inject[v]]; };
  for (size_t i = 0; i < pairs.size(); ++i) {
    auto [x, y] = pairs[i];
    PairEstimate pe;
    pe.x = x;
    pe.y = y;
    pe.f = static_cast<double>(totals[i]) / static_cast<double>(samples);
    pe.f0 = std::abs(static_cast<double>(depth_of(x)) - static_cast<double>(depth_of(y))) /
            static_cast<double>(e.delta_prime);
    pe.g = pe.f + pe.f0;
    pe.se = std::sqrt(pe.f * (1.0 - pe.f) / static_cast<double>(samples));
    out.est.pairs.push_back(pe);
    double d = static_cast<double>(e.delta_prime) * pe.f +
               std::abs(static_cast<double>(depth_of(x)) - static_cast<double>(depth_of(y)));
    out.embedded[x][y] = d;
    out.embedded[y][x] = d;
  }
  out.report = distortion(out.graph_metric, out.embedded);
  return out;
}

std::string chain_to_json(const CutChain& c) {
  ojson j;
  j["initial"] = c.initial_index;
  ojson cuts = ojson::array();
  for (const Bits& cut : c.cuts) cuts.push_back(cut.members());
  j["cuts"] = cuts;
  ojson sampled = ojson::array();
  for (const auto& step : c.sampled) {
    ojson edges = ojson::array();
    for (const auto& [u, v] : step) edges.push_back({u, v});
    sampled.push_back(edges);
  }
  j["sampled"] = sampled;
  ojson coins = ojson::array();
  for (const auto& step : c.coins) {
    ojson per_piece = ojson::array();
    for (char v : step) per_piece.push_back(v != 0);
    coins.push_back(per_piece);
  }
  j["coins"] = coins;
  return j.dump();
}

}  // namespace npce
