#include "mylab/trees.hpp"

#include <cstdint>

namespace mylab::trees {

namespace {

Rational pow_q(long q, int k) {
  Rational r = 1;
  const Rational base = k >= 0 ? Rational(q) : Rational(1) / Rational(q);
  for (int i = 0; i < (k >= 0 ? k : -k); ++i) r *= base;
  return r;
}

int floor_div2(int k) { return k >= 0 ? k / 2 : -((-k + 1) / 2); }

}  // namespace

QSurd::QSurd(Rational coeff, int half_power, long q)
    : coeff_(std::move(coeff)), half_power_(0), q_(q) {
  if (q < 1) throw DomainError("QSurd: q must be positive");
  const int whole = floor_div2(half_power);
  coeff_ *= pow_q(q, whole);
  half_power_ = half_power - 2 * whole;
}

Rational QSurd::to_rational() const {
  if (half_power_ != 0 && coeff_ != 0) {
    throw DomainError("QSurd: a factor sqrt(q) did not cancel");
  }
  return coeff_;
}

QSurd operator*(const QSurd& a, const QSurd& b) {
  if (a.q_ != b.q_) throw DomainError("QSurd: mismatched q");
  return QSurd(a.coeff_ * b.coeff_, a.half_power_ + b.half_power_, a.q_);
}

QSurd operator/(const QSurd& a, const QSurd& b) {
  if (a.q_ != b.q_) throw DomainError("QSurd: mismatched q");
  if (b.coeff_ == 0) throw DomainError("QSurd: division by zero");
  return QSurd(a.coeff_ / b.coeff_, a.half_power_ - b.half_power_, a.q_);
}

QSurd operator+(const QSurd& a, const QSurd& b) {
  if (a.q_ != b.q_) throw DomainError("QSurd: mismatched q");
  if (a.coeff_ == 0) return b;
  if (b.coeff_ == 0) return a;
  if (a.half_power_ != b.half_power_) throw DomainError("QSurd: adding unlike grades");
  return QSurd(a.coeff_ + b.coeff_, a.half_power_, a.q_);
}

bool operator==(const QSurd& a, const QSurd& b) {
  if (a.coeff_ == 0 && b.coeff_ == 0) return true;
  return a.q_ == b.q_ && a.half_power_ == b.half_power_ && a.coeff_ == b.coeff_;
}

ExactKernel<long> radial_kernel(long q) {
  if (q < 2) throw DomainError("radial_kernel: q must be >= 2");
  const Rational down = Rational(1, q + 1);
  const Rational up = Rational(q, q + 1);
  return {"R(q=" + std::to_string(q) + ")", [=](const long& n) -> Transitions<long> {
            if (n < 0) throw DomainError("radial_kernel: state must be in N");
            if (n == 0) return {{1, Rational(1)}};
            return {{n - 1, down}, {n + 1, up}};
          }};
}

ExactKernel<long> height_kernel(long q) {
  if (q < 2) throw DomainError("height_kernel: q must be >= 2");
  const Rational down = Rational(1, q + 1);
  const Rational up = Rational(q, q + 1);
  return {"H(q=" + std::to_string(q) + ")", [=](const long& n) -> Transitions<long> {
            return {{n - 1, down}, {n + 1, up}};
          }};
}

QSurd phi0_tree(long n, long q) {
  if (n < 0) throw DomainError("phi0_tree: n must be nonnegative");
  const Rational a = 1 + Rational(n) * Rational(q - 1, q + 1);
  return QSurd(a, -static_cast<int>(n), q);
}

QSurd tree_spectral_radius(long q) { return QSurd(Rational(2, q + 1), 1, q); }

ExactKernel<long> ground_state_kernel(long q) {
  const ExactKernel<long> r = radial_kernel(q);
  const QSurd rho = tree_spectral_radius(q);
  return {"R0(q=" + std::to_string(q) + ")", [=](const long& n) -> Transitions<long> {
            Transitions<long> out;
            const QSurd denom = rho * phi0_tree(n, q);
            for (const auto& [m, pr] : r.row(n)) {
              const QSurd w = QSurd(pr, 0, q) * phi0_tree(m, q) / denom;
              out.emplace_back(m, w.to_rational());
            }
            return out;
          }};
}

ExactKernel<long> bessel3_kernel() {
  return {"Bessel3", [](const long& n) -> Transitions<long> {
            if (n < 0) throw DomainError("bessel3_kernel: state must be in N");
            if (n == 0) return {{1, Rational(1)}};
            return {{n - 1, Rational(n, 2 * (n + 1))}, {n + 1, Rational(n + 2, 2 * (n + 1))}};
          }};
}

ExactKernel<GraphNode> graph_kernel(long q) {
  if (q == 1 || q < 0) throw DomainError("graph_kernel: q must be >= 2, or 0 for the limit");
  const bool limit = q == 0;
  const Rational down = limit ? Rational(0) : Rational(1, 2 * q);
  const Rational cross = limit ? Rational(1, 2) : Rational(q - 1, 2 * q);
  const std::string name = limit ? "Q" : "P_G(q=" + std::to_string(q) + ")";
  return {name, [=](const GraphNode& v) -> Transitions<GraphNode> {
            const long gap = v.x - v.y;
            if (gap < 0 || gap % 2 != 0) throw DomainError("graph_kernel: not a vertex of G");
            const Rational half(1, 2);
            if (gap == 0) {
              Transitions<GraphNode> out{{{v.x + 1, v.y + 1}, half}, {{v.x + 1, v.y - 1}, cross}};
              if (down != 0) out.push_back({{v.x - 1, v.y - 1}, down});
              return out;
            }
            return {{{v.x - 1, v.y + 1}, half}, {{v.x + 1, v.y - 1}, half}};
          }};
}

long graph_distance(const GraphNode& v) { return std::max(v.x, -v.y); }

ExactDistribution<long> pitman_walk_distribution(std::size_t n) {
  std::map<std::pair<long, long>, Rational> dp{{{0, 0}, Rational(1)}};
  const Rational half(1, 2);
  for (std::size_t step = 0; step < n; ++step) {
    std::map<std::pair<long, long>, Rational> next;
    for (const auto& [state, mass] : dp) {
      const auto [s, m] = state;
      next[{s + 1, std::max(m, s + 1)}] += half * mass;
      next[{s - 1, m}] += half * mass;
    }
    dp = std::move(next);
  }
  ExactDistribution<long> out;
  for (const auto& [state, mass] : dp) out[2 * state.second - state.first] += mass;
  return out;
}

ExactDistribution<long> pitman_walk_enumeration(std::size_t n) {
  if (n > 20) throw DomainError("pitman_walk_enumeration: n must be <= 20");
  std::map<long, std::uint64_t> counts;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    long s = 0;
    long m = 0;
    for (std::size_t i = 0; i < n; ++i) {
      s += ((bits >> i) & 1u) ? 1 : -1;
      m = std::max(m, s);
    }
    ++counts[2 * m - s];
  }
  ExactDistribution<long> out;
  for (const auto& [v, c] : counts) out[v] = Rational(c) / Rational(total);
  return out;
}

std::string to_string(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

}  // namespace mylab::trees
