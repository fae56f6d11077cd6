// pyramid.hpp - layered path/cycle graphs, skeleton order, monotone cuts.
#pragma once

#include <string>
#include <vector>

#include "core.hpp"
#include "util.hpp"

namespace npce {

// Layered graph whose layers are paths: layers[0] is the single basepoint,
// layers[i] lists layer i+1 left to right. Edges are implied: consecutive
// vertices within a layer, plus each vertex's parent edge into the previous
// layer. Depth of a vertex is its layer number (basepoint has depth 1).
struct Pyramid {
  uint32_t n = 0;
  std::vector<std::vector<uint32_t>> layers;
  std::vector<int64_t> parent;  // -1 for the basepoint

  uint32_t depth() const { return static_cast<uint32_t>(layers.size()); }
  uint32_t basepoint() const { return layers.at(0).at(0); }
};

// Same shape with cyclic layers: consecutive vertices are adjacent and the
// last wraps to the first (single edge for 2-vertex layers, none for 1).
struct Funnel {
  uint32_t n = 0;
  std::vector<std::vector<uint32_t>> layers;
  std::vector<int64_t> parent;

  uint32_t depth() const { return static_cast<uint32_t>(layers.size()); }
  uint32_t basepoint() const { return layers.at(0).at(0); }
};

// Parent tree plus the positional data needed for order queries.
struct Skeleton {
  std::vector<int64_t> parent;
  std::vector<uint32_t> depth;                  // 1-based
  std::vector<uint32_t> pos;                    // index within the layer
  std::vector<std::vector<uint32_t>> children;  // ordered left to right
  std::vector<uint32_t> preorder;               // DFS visit index, children in order

  uint32_t nca(uint32_t x, uint32_t y) const;
  uint32_t ancestor_at_depth(uint32_t x, uint32_t target_depth) const;
  bool same_ray(uint32_t x, uint32_t y) const;  // one is an ancestor of the other
};

enum class Order { Before, SameRay, After };

// Boundary of a monotone cut: vertices with no child inside the cut, listed
// in skeleton order, plus the same-depth edges between consecutive boundary
// vertices (each oriented so that .first precedes .second).
struct CutBoundary {
  std::vector<uint32_t> verts;
  std::vector<std::pair<uint32_t, uint32_t>> edges;
};

// Empty result means valid; otherwise one message per violated condition.
std::vector<std::string> validate_pyramid(const Pyramid& p);
std::vector<std::string> validate_funnel(const Funnel& f);

Skeleton skeleton(const Pyramid& p);

Order order_compare(const Skeleton& s, uint32_t x, uint32_t y);

// Descendants of u within skeleton distance floor(r), including u itself.
Bits descendant_ball(const Pyramid& p, const Skeleton& s, uint32_t u, double r);

bool is_monotone(const Pyramid& p, const Skeleton& s, const Bits& cut);

// All root-to-bottom skeleton paths, one per bottom-layer vertex.
std::vector<std::vector<uint32_t>> all_rays(const Pyramid& p, const Skeleton& s);

// Root path of u extended downward by leftmost children.
std::vector<uint32_t> ray_through(const Pyramid& p, const Skeleton& s, uint32_t u);

CutBoundary boundary(const Pyramid& p, const Skeleton& s, const Bits& cut);

// Advances the selected boundary pieces by descendant balls of radius r. The
// edges of Z split the boundary into consecutive pieces; parity odd selects
// pieces 1, 3, ... and even selects 2, 4, ... (1-based).
Bits shift(const Pyramid& p, const Skeleton& s, const Bits& cut, double r,
           const std::vector<std::pair<uint32_t, uint32_t>>& z, bool odd);

// Slot-level view of a boundary: each boundary vertex contributes one slot
// per child (childless vertices contribute a single inert slot), and
// consecutive slots meet at a junction. A junction carries the same-depth
// edge at which an advancing front can tear: between two boundary vertices
// this is their boundary edge, between two slots of one vertex it is the
// edge joining the consecutive children just below the front (fold 1).
// Junctions with no such edge have fold 0 and never tear.
struct EvolutionSpace {
  struct Slot {
    uint32_t vert = 0;
    int64_t child = -1;
  };
  struct Junction {
    uint32_t a = 0, b = 0;  // edge endpoints, a preceding b; meaningless at fold 0
    uint32_t fold = 0;      // depth above the endpoints' nearest common ancestor
    bool qualifies = false;  // fold lies in the window [r, 6r)
  };
  std::vector<Slot> slots;
  std::vector<Junction> junctions;  // junctions[t] sits between slots t and t+1
};

EvolutionSpace evolution_space(const Pyramid& p, const Skeleton& s, const Bits& cut, double r);

// Applies one evolution outcome. splits flags the junctions that tear (only
// positive-fold junctions may tear), partitioning the slots into consecutive
// pieces; coins holds one advance decision per piece. An advancing slot adds
// its child together with the child's descendants within floor(r) - 1.
Bits apply_evolution(const Pyramid& p, const Skeleton& s, const Bits& cut, double r,
                     const EvolutionSpace& space, const std::vector<char>& splits,
                     const std::vector<char>& coins);

struct EvolutionStep {
  Bits next;
  std::vector<std::pair<uint32_t, uint32_t>> sampled;  // edges where the front tore
  std::vector<char> coins;                             // one advance coin per piece
};

// One r-evolution: every qualifying junction tears independently with
// probability min(1, 1/r), then each resulting piece advances on its own
// fair coin.
EvolutionStep evolve(const Pyramid& p, const Skeleton& s, const Bits& cut, double r, Rng& rng);

Graph pyramid_to_graph(const Pyramid& p);
Graph funnel_to_graph(const Funnel& f);

Pyramid gen_grid_pyramid(uint32_t delta);
Pyramid gen_path_pyramid(uint32_t delta);
Pyramid gen_random_pyramid(uint32_t delta, uint32_t max_width, Rng& rng);
Funnel gen_random_funnel(uint32_t delta, uint32_t max_width, Rng& rng);

std::string pyramid_to_json(const Pyramid& p);
Pyramid pyramid_from_json(const std::string& text);
std::string funnel_to_json(const Funnel& f);
Funnel funnel_from_json(const std::string& text);

}  // namespace npce
