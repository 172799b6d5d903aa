#pragma once

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "pimsner/abgroup.hpp"
#include "pimsner/funcmod.hpp"

namespace pimsner {

struct Edge {
  std::string name;
  std::size_t source = 0;
  std::size_t range = 0;
};

// Finite quiver (Q0, Q1, s, r).
class Quiver {
 public:
  // Throws SemanticError on duplicate names or undeclared endpoints.
  static Quiver make(std::vector<std::string> vertices,
                     const std::vector<std::tuple<std::string, std::string, std::string>>& edges);
  // Quiver DSL:
  //   vertices: v w
  //   edges:
  //     e: v -> w
  // '#' starts a comment. Throws ParseError (with line/column) or SemanticError.
  static Quiver parse(const std::string& text);
  // One vertex "v" with d loops e1..ed.
  static Quiver rose(std::size_t d);

  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t vertex_index(const std::string& name) const;
  std::size_t edge_index(const std::string& name) const;
  const std::vector<std::size_t>& out_edges(std::size_t v) const { return out_[v]; }
  // Vertices emitting at least one (and finitely many) edges, in vertex order.
  const std::vector<std::size_t>& regular() const { return regular_; }
  bool is_regular(std::size_t v) const { return !out_[v].empty(); }
  std::string to_dsl() const;

 private:
  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> vpos_, epos_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::size_t> regular_;
};

struct AdjacencyData {
  IntMatrix full;     // N'[x][y] = #{e : s(e) = x, r(e) = y}
  IntMatrix reduced;  // N' without the columns of non-regular vertices
  IntMatrix theorem_map;  // M[y][v] = delta_{y,v} - N'[v][y], v regular
  std::vector<std::size_t> regular;
};

AdjacencyData adjacency(const Quiver& q);

// R = (+)_v k 1_v, X = (+)_e 1_e k with <1_e*, 1_f> = delta_{e,f} 1_r(e),
// Delta(1_v) 1_e = delta_{s(e),v} 1_e, U into R^(Q1), ideal spanned by the
// regular vertices. X generators are the edge names, X' generators "e*".
CorrespondencePtr quiver_correspondence(const Quiver& q, const CoeffRing& k);

// Leavitt path algebra in the normal form p q* (r(p) = r(q)) where, for each
// regular vertex v, words ending in e_v e_v* are excluded; e_v is the first
// edge leaving v. Symbols: a vertex name, or "p1.p2|q1.q2".
class LeavittAlgebra {
 public:
  struct Word {
    std::vector<std::size_t> p, q;
    std::size_t vertex = 0;  // r(p) = r(q), or the vertex for length-0 words
  };

  static std::shared_ptr<const LeavittAlgebra> make(const Quiver& q, const CoeffRing& k);

  const Quiver& quiver() const { return quiver_; }
  const RingPtr& ring() const { return ring_; }
  std::size_t special_edge(std::size_t v) const { return special_.at(v); }

  RingElement vertex(const std::string& v) const;
  RingElement edge(const std::string& e) const;
  RingElement ghost(const std::string& e) const;  // e*
  RingElement word(const Word& w) const;          // reduced to normal form

  std::string encode(const Word& w) const;
  // Parses any well-formed p q* word; nullopt if malformed.
  std::optional<Word> decode(const std::string& sym) const;
  bool is_normal(const Word& w) const;
  // Degree |p| - |q| of a basis symbol.
  long degree(const std::string& sym) const;

 private:
  LeavittAlgebra(Quiver q) : quiver_(std::move(q)) {}
  std::size_t src(const std::vector<std::size_t>& path, std::size_t v) const;
  void reduce(const Word& w, const mpq_class& c, std::map<std::string, mpq_class>& out) const;
  NamedTerms multiply(const std::string& a, const std::string& b) const;

  Quiver quiver_;
  RingPtr ring_;
  std::map<std::size_t, std::size_t> special_;
};

using LeavittPtr = std::shared_ptr<const LeavittAlgebra>;

// Product in L_k(Q); RingMismatch if the operands come from different algebras.
RingElement lpa_mul(const RingElement& a, const RingElement& b);

// Known K-groups of the coefficient ring: degrees -1, 0, 1.
// z: 0, Z, Z/2.  q: 0, Z, Z/2 + Z^(N).  fp:p: 0, Z, Z/(p-1).
// zmod:m is accepted only for prime m.
std::map<int, CoeffGroup> field_presets(const CoeffRing& k);

LesReport k_groups(const Quiver& q, const std::map<int, CoeffGroup>& presets);
// Map 1 - alpha on E_n(R) = Z^d. Throws DomainError for non-square alpha.
LesReport crossed_product_k_groups(const IntMatrix& alpha, const std::map<int, CoeffGroup>& presets);
// E_0(R) = Z^d in degree 0 and 1.
std::map<int, CoeffGroup> pv_presets();

// [i] - [Delta(i)] in K0(R) = Z^(components) for each ideal generator i,
// read from the idempotent matrix rho(Delta(i)) over R^(I). Needs a ring with
// k0_components() and a correspondence with a functional hom.
IntMatrix induced_k0_matrix(const CorrespondencePtr& c);

}  // namespace pimsner
