#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace densgeo {

// One real value per vertex (grid point or graph vertex).
using ScalarField = Eigen::VectorXd;

// Discrete vector field. On cycle grids it is vertex-indexed (a central
// difference value per grid point); on weighted graphs it is edge-indexed,
// oriented from Edge::i to Edge::j.
using EdgeField = Eigen::VectorXd;

enum class SpaceKind { CycleGrid, WeightedGraph };

// Which discrete operator realizes div∘grad on a cycle grid. The variational
// form is the edge-based operator (1/m_i) Σ_j w_ij θ_ij (f_j − f_i) with
// θ_ij = (m_i + m_j)/2; it is self-adjoint in L²(μ) for every positive μ.
// The compositional form literally composes the central-difference divergence
// with the central-difference gradient; the two agree to O(h²) on smooth
// data. Weighted graphs always use the variational form.
enum class LaplacianStyle { Variational, Compositional };

struct Edge {
  int i = 0;
  int j = 0;
  double weight = 1.0;
};

// A discretized sample space: a periodic one-dimensional grid or a finite
// connected weighted graph, together with a reference volume per vertex.
// Immutable after construction; shared across densities via shared_ptr.
class Space {
 public:
  // Periodic grid with n points and total length `circumference`. The vertex
  // volume is the spacing h = circumference / n and the implicit edge weight
  // is 1/h², which makes the variational operator a consistent second-order
  // discretization of the weighted Laplacian.
  static Space cycle(int n, double circumference = 2.0 * std::numbers::pi,
                     LaplacianStyle style = LaplacianStyle::Variational) {
    if (n < 3) {
      throw std::invalid_argument("Space::cycle: need at least 3 grid points, got " +
                                  std::to_string(n));
    }
    if (!(circumference > 0.0) || !std::isfinite(circumference)) {
      throw std::invalid_argument("Space::cycle: circumference must be positive and finite");
    }
    const double h = circumference / n;
    Space sp;
    sp.kind_ = SpaceKind::CycleGrid;
    sp.style_ = style;
    sp.spacing_ = h;
    sp.volumes_ = Eigen::VectorXd::Constant(n, h);
    sp.edges_.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      sp.edges_.push_back(Edge{i, (i + 1) % n, 1.0 / (h * h)});
    }
    sp.total_volume_ = sp.volumes_.sum();
    return sp;
  }

  // Finite weighted graph. Requires at least two vertices, strictly positive
  // volumes and weights, no self-loops or duplicate (unordered) edges, and a
  // connected edge set. Edge orientation is kept as given; edge fields follow
  // it.
  static Space graph(Eigen::VectorXd volumes, std::vector<Edge> edges) {
    const int n = static_cast<int>(volumes.size());
    if (n < 2) {
      throw std::invalid_argument("Space::graph: need at least 2 vertices");
    }
    for (int i = 0; i < n; ++i) {
      if (!(volumes[i] > 0.0) || !std::isfinite(volumes[i])) {
        throw std::invalid_argument("Space::graph: volume of vertex " + std::to_string(i) +
                                    " must be positive and finite");
      }
    }
    if (edges.empty()) {
      throw std::invalid_argument("Space::graph: edge set is empty");
    }
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](int v) {
      while (parent[static_cast<std::size_t>(v)] != v) {
        v = parent[static_cast<std::size_t>(v)] =
            parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      }
      return v;
    };
    std::vector<std::pair<int, int>> seen;
    seen.reserve(edges.size());
    for (const Edge& e : edges) {
      if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n) {
        throw std::invalid_argument("Space::graph: edge (" + std::to_string(e.i) + ", " +
                                    std::to_string(e.j) + ") references a missing vertex");
      }
      if (e.i == e.j) {
        throw std::invalid_argument("Space::graph: self-loop at vertex " + std::to_string(e.i));
      }
      if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
        throw std::invalid_argument("Space::graph: weight of edge (" + std::to_string(e.i) +
                                    ", " + std::to_string(e.j) +
                                    ") must be positive and finite");
      }
      const auto key = std::minmax(e.i, e.j);
      for (const auto& k : seen) {
        if (k.first == key.first && k.second == key.second) {
          throw std::invalid_argument("Space::graph: duplicate edge (" + std::to_string(e.i) +
                                      ", " + std::to_string(e.j) + ")");
        }
      }
      seen.push_back(key);
      parent[static_cast<std::size_t>(find(e.i))] = find(e.j);
    }
    const int root = find(0);
    for (int v = 1; v < n; ++v) {
      if (find(v) != root) {
        throw std::invalid_argument("Space::graph: graph is not connected (vertex " +
                                    std::to_string(v) + " unreachable from vertex 0)");
      }
    }
    Space sp;
    sp.kind_ = SpaceKind::WeightedGraph;
    sp.style_ = LaplacianStyle::Variational;
    sp.spacing_ = 0.0;
    sp.volumes_ = std::move(volumes);
    sp.edges_ = std::move(edges);
    sp.total_volume_ = sp.volumes_.sum();
    return sp;
  }

  static std::shared_ptr<const Space> make_cycle(
      int n, double circumference = 2.0 * std::numbers::pi,
      LaplacianStyle style = LaplacianStyle::Variational) {
    return std::make_shared<const Space>(cycle(n, circumference, style));
  }

  static std::shared_ptr<const Space> make_graph(Eigen::VectorXd volumes,
                                                 std::vector<Edge> edges) {
    return std::make_shared<const Space>(graph(std::move(volumes), std::move(edges)));
  }

  SpaceKind kind() const { return kind_; }
  LaplacianStyle style() const { return style_; }
  bool is_grid() const { return kind_ == SpaceKind::CycleGrid; }
  int size() const { return static_cast<int>(volumes_.size()); }
  const Eigen::VectorXd& volumes() const { return volumes_; }
  double total_volume() const { return total_volume_; }

  // Grid spacing h; only meaningful for cycle grids.
  double spacing() const {
    if (!is_grid()) {
      throw std::logic_error("Space::spacing: only cycle grids have a spacing");
    }
    return spacing_;
  }

  // Vertex coordinates x_i = i·h of a cycle grid.
  Eigen::VectorXd grid_coordinates() const {
    if (!is_grid()) {
      throw std::logic_error("Space::grid_coordinates: only cycle grids have coordinates");
    }
    return spacing_ * Eigen::VectorXd::LinSpaced(size(), 0.0, static_cast<double>(size() - 1));
  }

  // Edge list. For cycle grids these are the implicit stencil pairs
  // (i, i+1 mod n) with weight 1/h², used by the variational operators; grid
  // EdgeFields remain vertex-indexed.
  const std::vector<Edge>& edges() const { return edges_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  // Structural equality; cheap pointer identity is checked by callers first.
  bool same_as(const Space& other) const {
    return kind_ == other.kind_ && style_ == other.style_ && size() == other.size() &&
           spacing_ == other.spacing_ && volumes_ == other.volumes_;
  }

 private:
  Space() = default;

  SpaceKind kind_ = SpaceKind::WeightedGraph;
  LaplacianStyle style_ = LaplacianStyle::Variational;
  double spacing_ = 0.0;
  double total_volume_ = 0.0;
  Eigen::VectorXd volumes_;
  std::vector<Edge> edges_;
};

inline void require_same_space(const Space& a, const Space& b, const char* where) {
  if (&a == &b || a.same_as(b)) return;
  throw std::invalid_argument(std::string(where) + ": operands live on different spaces");
}

// Cyclic index shift: value of f at i+k (mod n), as a new field.
inline ScalarField cyclic_shift(const ScalarField& f, int k) {
  const int n = static_cast<int>(f.size());
  ScalarField out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = f[((i + k) % n + n) % n];
  }
  return out;
}

// Discrete gradient. Cycle grids: central difference per vertex. Graphs:
// f_j − f_i per edge, in edge order.
inline EdgeField gradient(const Space& sp, const ScalarField& f) {
  if (f.size() != sp.size()) {
    throw std::invalid_argument("gradient: field length does not match the space");
  }
  if (sp.is_grid()) {
    return (cyclic_shift(f, 1) - cyclic_shift(f, -1)) / (2.0 * sp.spacing());
  }
  EdgeField out(sp.edge_count());
  int e = 0;
  for (const Edge& ed : sp.edges()) {
    out[e++] = f[ed.j] - f[ed.i];
  }
  return out;
}

}  // namespace densgeo
