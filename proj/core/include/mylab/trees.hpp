#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mylab/error.hpp"

namespace mylab::trees {

using Rational = boost::multiprecision::cpp_rational;

/// coeff * q^{half_power / 2}, normalized so half_power is 0 or 1 (integer
/// powers of q are folded into the rational coefficient).
class QSurd {
 public:
  QSurd(Rational coeff, int half_power, long q);

  const Rational& coeff() const noexcept { return coeff_; }
  int half_power() const noexcept { return half_power_; }
  long q() const noexcept { return q_; }

  /// The exact rational value; throws DomainError when a sqrt(q) remains.
  Rational to_rational() const;

  friend QSurd operator*(const QSurd& a, const QSurd& b);
  friend QSurd operator/(const QSurd& a, const QSurd& b);
  /// Only surds of equal grade can be added.
  friend QSurd operator+(const QSurd& a, const QSurd& b);
  friend bool operator==(const QSurd& a, const QSurd& b);

 private:
  Rational coeff_;
  int half_power_;
  long q_;
};

/// Vertex of the graph G in (x, y) coordinates.
struct GraphNode {
  long x = 0;
  long y = 0;

  friend auto operator<=>(const GraphNode&, const GraphNode&) = default;
};

template <class State>
using Transitions = std::vector<std::pair<State, Rational>>;

/// Markov kernel given by its finite rows.
template <class State>
struct ExactKernel {
  std::string name;
  std::function<Transitions<State>(const State&)> row;
};

template <class State>
using ExactDistribution = std::map<State, Rational>;

/// Throws DomainError unless the row has nonnegative entries summing to 1.
template <class State>
void check_row(const ExactKernel<State>& kernel, const State& s) {
  Rational total = 0;
  for (const auto& [to, pr] : kernel.row(s)) {
    if (pr < 0) throw DomainError(kernel.name + ": negative transition probability");
    total += pr;
  }
  if (total != 1) throw DomainError(kernel.name + ": row does not sum to 1");
}

/// Exact law after n steps from `start` by forward iteration. Throws
/// DomainError if the reachable set exceeds `max_states`.
template <class State>
ExactDistribution<State> exact_distribution(const ExactKernel<State>& kernel, const State& start,
                                            std::size_t n, std::size_t max_states = 1000000) {
  ExactDistribution<State> dist{{start, Rational(1)}};
  for (std::size_t step = 0; step < n; ++step) {
    ExactDistribution<State> next;
    for (const auto& [s, mass] : dist) {
      for (const auto& [to, pr] : kernel.row(s)) {
        if (pr == 0) continue;
        next[to] += mass * pr;
      }
    }
    if (next.size() > max_states) {
      throw DomainError(kernel.name + ": reachable state space exceeds cap");
    }
    dist = std::move(next);
  }
  return dist;
}

template <class State>
Rational total_mass(const ExactDistribution<State>& d) {
  Rational total = 0;
  for (const auto& [s, m] : d) total += m;
  return total;
}

/// Image law under f.
template <class State, class F>
auto push_forward(const ExactDistribution<State>& d, F&& f) {
  using Out = std::decay_t<decltype(f(std::declval<const State&>()))>;
  ExactDistribution<Out> out;
  for (const auto& [s, m] : d) out[f(s)] += m;
  return out;
}

/// Radial walk on T_q: R(0,1) = 1, R(n,n-1) = 1/(q+1), R(n,n+1) = q/(q+1).
ExactKernel<long> radial_kernel(long q);

/// Height walk on Z: H(n,n-1) = 1/(q+1), H(n,n+1) = q/(q+1).
ExactKernel<long> height_kernel(long q);

/// (1 + n (q-1)/(q+1)) q^{-n/2}.
QSurd phi0_tree(long n, long q);

/// rho = 2 sqrt(q) / (q+1).
QSurd tree_spectral_radius(long q);

/// R0(n,m) = R(n,m) phi0(m) / (rho phi0(n)); the sqrt(q) grades cancel.
ExactKernel<long> ground_state_kernel(long q);

/// B(0,1) = 1, B(n,n+1) = (n+2)/(2(n+1)), B(n,n-1) = n/(2(n+1)).
ExactKernel<long> bessel3_kernel();

/// P_G on G for finite q, or its q -> infinity limit Q when q == 0.
ExactKernel<GraphNode> graph_kernel(long q);

/// Graph distance from (0,0) to a vertex of G: max(x, -y).
long graph_distance(const GraphNode& v);

/// Exact law of 2 M_n - S_n for the simple symmetric walk S with running
/// maximum M, by dynamic programming over (S, M).
ExactDistribution<long> pitman_walk_distribution(std::size_t n);

/// The same law by enumerating all 2^n sign sequences (n <= 20).
ExactDistribution<long> pitman_walk_enumeration(std::size_t n);

/// "num/den" text of an exact rational.
std::string to_string(const Rational& r);

}  // namespace mylab::trees
