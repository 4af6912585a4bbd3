#include "casdec/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <boost/math/special_functions/legendre.hpp>

#include "casdec/errors.hpp"

namespace casdec::quad {

GaussLegendre::GaussLegendre(int n_nodes) {
  if (n_nodes < 2 || n_nodes > 200) {
    throw ConfigError("Gauss-Legendre node count must lie in [2, 200], got " + std::to_string(n_nodes));
  }
  const auto n = static_cast<unsigned>(n_nodes);
  // non-negative zeros of P_n in increasing order
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it > 0.0) nodes_.push_back(-*it);
  }
  for (double z : zeros) nodes_.push_back(z);
  weights_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double x = nodes_[i];
    const double dp = boost::math::legendre_p_prime(n_nodes, x);
    weights_[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

const GaussLegendre& gauss_legendre(int n_nodes) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n_nodes];
  if (!slot) slot = std::make_unique<GaussLegendre>(n_nodes);
  return *slot;
}

}  // namespace casdec::quad
