#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace casdec::quad {

/// Gauss-Legendre rule with a runtime node count, mapped onto arbitrary panels.
class GaussLegendre {
 public:
  explicit GaussLegendre(int n_nodes);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }    // on [-1, 1]
  const std::vector<double>& weights() const { return weights_; }

  template <class F>
  auto integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    using R = decltype(f(mid));
    R sum{};
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(mid + half * nodes_[i]);
    return sum * half;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Shared rule instance for the common node counts (thread-safe lazy init).
const GaussLegendre& gauss_legendre(int n_nodes);

}  // namespace casdec::quad
