#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <vector>

#include "souvlaki/graph.hpp"

namespace souvlaki {

struct SolverOptions {
  double tolerance = 1e-10;          // relative residual target of the iterative solver
  double residual_check = 1e-9;      // accepted relative residual after any solve
  std::size_t direct_limit = 200000; // unknowns up to which LDLT is used
};

inline constexpr std::int64_t kGrounded = -1;
inline constexpr std::int64_t kExcluded = -2;

/// Weighted Laplacian of g reduced to "groups" of shorted vertices.
/// group[v] >= 0 is an unknown, kGrounded pins v to potential 0 and
/// kExcluded drops v (it must not touch a non-excluded vertex).
class ReducedLaplacian {
 public:
  using SpMat = Eigen::SparseMatrix<double>;

  ReducedLaplacian(const Graph& g, std::vector<std::int64_t> group, std::size_t num_groups,
                   SolverOptions opt = {})
      : group_(std::move(group)), n_(num_groups), opt_(opt) {
    if (group_.size() != g.num_vertices()) throw DomainError("group vector size mismatch");
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(g.num_edges() * 3 + n_);
    std::vector<double> diag(n_, 0.0);
    for (const auto& e : g.edges()) {
      auto a = group_[e.u], b = group_[e.v];
      if ((a == kExcluded) != (b == kExcluded))
        throw DomainError("excluded vertex adjacent to the solved region");
      if (a == kExcluded || a == b) continue;
      double c = e.conductance();
      if (a >= 0) diag[a] += c;
      if (b >= 0) diag[b] += c;
      if (a >= 0 && b >= 0) {
        trip.emplace_back(a, b, -c);
        trip.emplace_back(b, a, -c);
      }
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if (diag[i] <= 0) throw DomainError("singular system: an unknown has no conductance");
      trip.emplace_back(i, i, diag[i]);
    }
    a_.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    a_.setFromTriplets(trip.begin(), trip.end());
    a_.makeCompressed();
    if (n_ <= opt_.direct_limit) {
      ldlt_ = std::make_unique<Eigen::SimplicialLDLT<SpMat>>();
      ldlt_->compute(a_);
      if (ldlt_->info() != Eigen::Success) throw DomainError("singular system: factorization failed");
    } else {
      cg_ = std::make_unique<Cg>();
      cg_->setTolerance(opt_.tolerance);
      cg_->setMaxIterations(static_cast<Eigen::Index>(std::max<std::size_t>(1000, 4 * n_)));
      cg_->compute(a_);
      if (cg_->info() != Eigen::Success) throw DomainError("preconditioner setup failed");
    }
  }

  std::size_t size() const { return n_; }
  bool direct() const { return ldlt_ != nullptr; }
  const std::vector<std::int64_t>& groups() const { return group_; }
  const SpMat& matrix() const { return a_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = ldlt_ ? Eigen::VectorXd(ldlt_->solve(rhs)) : Eigen::VectorXd(cg_->solve(rhs));
    double bn = rhs.norm();
    if (bn == 0) return x;
    for (int pass = 0; pass < 3; ++pass) {
      Eigen::VectorXd r = rhs - a_ * x;
      if (r.norm() <= opt_.residual_check * bn) return x;
      x += ldlt_ ? Eigen::VectorXd(ldlt_->solve(r)) : Eigen::VectorXd(cg_->solveWithGuess(r, Eigen::VectorXd::Zero(r.size())));
    }
    if ((rhs - a_ * x).norm() > opt_.residual_check * bn)
      throw DomainError("linear solve did not reach the residual tolerance");
    return x;
  }

  /// Relative residual of a candidate solution.
  double residual(const Eigen::VectorXd& x, const Eigen::VectorXd& rhs) const {
    double bn = rhs.norm();
    return bn == 0 ? (a_ * x).norm() : (rhs - a_ * x).norm() / bn;
  }

 private:
  using Cg = Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper,
                                      Eigen::IncompleteCholesky<double>>;
  std::vector<std::int64_t> group_;
  std::size_t n_;
  SolverOptions opt_;
  SpMat a_;
  std::unique_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt_;
  std::unique_ptr<Cg> cg_;
};

namespace detail {

struct Dsu {
  std::vector<std::size_t> p;
  explicit Dsu(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { p[find(a)] = find(b); }
};

/// Marks as kExcluded every vertex whose component (after shorting groups)
/// contains no grounded vertex.
inline void exclude_unanchored(const Graph& g, std::vector<std::int64_t>& group) {
  const std::size_t n = g.num_vertices();
  Dsu d(n + 1);  // node n stands for "grounded"
  for (const auto& e : g.edges()) d.unite(e.u, e.v);
  for (VertexId v = 0; v < n; ++v)
    if (group[v] == kGrounded) d.unite(v, n);
  std::vector<std::int64_t> rep_of_group;
  for (VertexId v = 0; v < n; ++v) {
    if (group[v] < 0) continue;
    auto gi = static_cast<std::size_t>(group[v]);
    if (gi >= rep_of_group.size()) rep_of_group.resize(gi + 1, -1);
    if (rep_of_group[gi] < 0) rep_of_group[gi] = v;
    else d.unite(v, static_cast<std::size_t>(rep_of_group[gi]));
  }
  for (VertexId v = 0; v < n; ++v)
    if (group[v] >= 0 && d.find(v) != d.find(n)) group[v] = kExcluded;
}

/// Renumbers non-negative groups densely; returns their count.
inline std::size_t compact_groups(std::vector<std::int64_t>& group) {
  std::vector<std::int64_t> remap;
  std::size_t next = 0;
  for (auto& x : group) {
    if (x < 0) continue;
    auto gi = static_cast<std::size_t>(x);
    if (gi >= remap.size()) remap.resize(gi + 1, -1);
    if (remap[gi] < 0) remap[gi] = static_cast<std::int64_t>(next++);
    x = remap[gi];
  }
  return next;
}

}  // namespace detail

/// Harmonic extension: potentials fixed on `boundary` (one column of values
/// per right-hand side), harmonic elsewhere. Vertices not connected to the
/// boundary get NaN.
inline std::vector<Eigen::VectorXd> harmonic_extension(const Graph& g,
                                                       std::span<const VertexId> boundary,
                                                       const std::vector<std::vector<double>>& values,
                                                       SolverOptions opt = {}) {
  const std::size_t n = g.num_vertices();
  std::vector<std::int64_t> group(n);
  std::iota(group.begin(), group.end(), std::int64_t{0});
  std::vector<std::int64_t> bidx(n, -1);
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    group[boundary[i]] = kGrounded;
    bidx[boundary[i]] = static_cast<std::int64_t>(i);
  }
  for (const auto& col : values)
    if (col.size() != boundary.size()) throw DomainError("boundary value size mismatch");
  detail::exclude_unanchored(g, group);
  std::size_t k = detail::compact_groups(group);
  std::vector<Eigen::VectorXd> out;
  std::unique_ptr<ReducedLaplacian> lap;
  if (k > 0) lap = std::make_unique<ReducedLaplacian>(g, group, k, opt);
  for (const auto& col : values) {
    Eigen::VectorXd phi(static_cast<Eigen::Index>(n));
    phi.setConstant(std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < boundary.size(); ++i) phi[boundary[i]] = col[i];
    if (k > 0) {
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
      for (const auto& e : g.edges()) {
        auto a = group[e.u], b = group[e.v];
        if (a >= 0 && b == kGrounded) rhs[a] += e.conductance() * col[bidx[e.v]];
        if (b >= 0 && a == kGrounded) rhs[b] += e.conductance() * col[bidx[e.u]];
      }
      Eigen::VectorXd x = lap->solve(rhs);
      for (VertexId v = 0; v < n; ++v)
        if (group[v] >= 0) phi[v] = x[group[v]];
    }
    out.push_back(std::move(phi));
  }
  return out;
}

struct UnitCurrent {
  double resistance;       // potential difference driving one ampere
  Eigen::VectorXd potential;  // per vertex; sinks at 0, NaN if disconnected
};

/// Unit current from the (shorted) source set into the (shorted, grounded) sink set.
inline UnitCurrent unit_current(const Graph& g, std::span<const VertexId> sources,
                                std::span<const VertexId> sinks, SolverOptions opt = {}) {
  const std::size_t n = g.num_vertices();
  if (sources.empty() || sinks.empty()) throw DomainError("empty source or sink set");
  std::vector<std::int64_t> group(n);
  std::iota(group.begin(), group.end(), std::int64_t{1});
  for (auto s : sinks) group.at(s) = kGrounded;
  for (auto s : sources) {
    if (group.at(s) == kGrounded) throw DomainError("source and sink sets intersect");
    group[s] = 0;
  }
  detail::exclude_unanchored(g, group);
  if (group[sources[0]] == kExcluded) throw DomainError("source is disconnected from the sink");
  std::size_t k = detail::compact_groups(group);
  ReducedLaplacian lap(g, group, k, opt);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  rhs[group[sources[0]]] = 1.0;
  Eigen::VectorXd x = lap.solve(rhs);
  UnitCurrent out;
  out.potential.setConstant(static_cast<Eigen::Index>(n), std::numeric_limits<double>::quiet_NaN());
  for (VertexId v = 0; v < n; ++v) {
    if (group[v] >= 0) out.potential[v] = x[group[v]];
    else if (group[v] == kGrounded) out.potential[v] = 0.0;
  }
  out.resistance = x[group[sources[0]]];
  return out;
}

}  // namespace souvlaki
