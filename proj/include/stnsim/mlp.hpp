#pragma once

// Minimal dense network: ReLU hidden layers, linear output, parameters in one
// flat vector so optimizer steps, soft target updates, checkpointing and
// finite-difference checks all operate on plain arrays.

#include <cstdint>
#include <vector>

#include "stnsim/common.hpp"

namespace stnsim {

class Mlp {
 public:
  Mlp() = default;
  Mlp(int in, const std::vector<int>& hidden, int out) {
    sizes_.push_back(in);
    for (int h : hidden) sizes_.push_back(h);
    sizes_.push_back(out);
    require(in > 0 && out > 0, "Mlp: bad dimensions");
    for (int s : sizes_) require(s > 0, "Mlp: bad layer size");
    int total = 0;
    for (std::size_t l = 1; l < sizes_.size(); ++l) {
      offsets_.push_back(total);
      total += sizes_[l] * sizes_[l - 1] + sizes_[l];
    }
    params.assign(static_cast<std::size_t>(total), 0.0);
  }

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int param_count() const { return static_cast<int>(params.size()); }
  const std::vector<int>& layer_sizes() const { return sizes_; }

  // Glorot-uniform: +-sqrt(6/(fan_in+fan_out)) per layer, biases zero.
  void init_params(std::uint64_t seed) {
    Rng rng = make_rng(seed, 0x6d6c70ULL);
    for (std::size_t l = 1; l < sizes_.size(); ++l) {
      const int nin = sizes_[l - 1], nout = sizes_[l];
      const double bound = std::sqrt(6.0 / (nin + nout));
      std::uniform_real_distribution<double> u(-bound, bound);
      double* w = params.data() + offsets_[l - 1];
      for (int i = 0; i < nout * nin; ++i) w[i] = u(rng);
      for (int i = 0; i < nout; ++i) w[nout * nin + i] = 0.0;
    }
  }

  struct Cache {
    // acts[0] is the input, acts[l] the post-activation of layer l; the last
    // entry is the linear output.
    std::vector<std::vector<double>> acts;
  };

  void forward(const double* x, double* y, Cache* cache = nullptr) const {
    thread_local std::vector<double> a, b;
    a.assign(x, x + sizes_.front());
    if (cache) {
      cache->acts.clear();
      cache->acts.push_back(a);
    }
    for (std::size_t l = 1; l < sizes_.size(); ++l) {
      const int nin = sizes_[l - 1], nout = sizes_[l];
      const double* w = params.data() + offsets_[l - 1];
      const double* bias = w + nout * nin;
      b.assign(static_cast<std::size_t>(nout), 0.0);
      for (int o = 0; o < nout; ++o) {
        const double* row = w + o * nin;
        double s = bias[o];
        for (int i = 0; i < nin; ++i) s += row[i] * a[static_cast<std::size_t>(i)];
        b[static_cast<std::size_t>(o)] = s;
      }
      const bool last = (l + 1 == sizes_.size());
      if (!last)
        for (double& v : b) v = v > 0.0 ? v : 0.0;
      a.swap(b);
      if (cache) cache->acts.push_back(a);
    }
    for (int i = 0; i < sizes_.back(); ++i) y[i] = a[static_cast<std::size_t>(i)];
  }

  std::vector<double> forward(const std::vector<double>& x, Cache* cache = nullptr) const {
    require(static_cast<int>(x.size()) == input_dim(), "Mlp::forward: bad input size");
    std::vector<double> y(static_cast<std::size_t>(output_dim()));
    forward(x.data(), y.data(), cache);
    return y;
  }

  // Accumulates dL/dparams into grad (same layout as params) given dL/doutput.
  void backward(const Cache& cache, const double* dout, double* grad) const {
    std::vector<double> dz(dout, dout + sizes_.back());
    for (std::size_t l = sizes_.size() - 1; l >= 1; --l) {
      const int nin = sizes_[l - 1], nout = sizes_[l];
      const double* w = params.data() + offsets_[l - 1];
      double* gw = grad + offsets_[l - 1];
      double* gb = gw + nout * nin;
      const std::vector<double>& ain = cache.acts[l - 1];
      for (int o = 0; o < nout; ++o) {
        const double d = dz[static_cast<std::size_t>(o)];
        if (d == 0.0) continue;
        double* grow = gw + o * nin;
        for (int i = 0; i < nin; ++i) grow[i] += d * ain[static_cast<std::size_t>(i)];
        gb[o] += d;
      }
      if (l == 1) break;
      std::vector<double> da(static_cast<std::size_t>(nin), 0.0);
      for (int o = 0; o < nout; ++o) {
        const double d = dz[static_cast<std::size_t>(o)];
        if (d == 0.0) continue;
        const double* row = w + o * nin;
        for (int i = 0; i < nin; ++i) da[static_cast<std::size_t>(i)] += d * row[i];
      }
      // ReLU gate: the cached post-activation is positive iff the unit fired.
      for (int i = 0; i < nin; ++i)
        if (ain[static_cast<std::size_t>(i)] <= 0.0) da[static_cast<std::size_t>(i)] = 0.0;
      dz.swap(da);
    }
  }

  std::vector<double> params;

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_;
};

// Heavy-ball SGD: v = m*v + g; p -= lr*v.
struct SgdMomentum {
  double lr = 3e-4;
  double momentum = 0.9;
  std::vector<double> velocity;

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    require(params.size() == grad.size(), "SgdMomentum: size mismatch");
    if (velocity.size() != params.size()) velocity.assign(params.size(), 0.0);
    for (std::size_t i = 0; i < params.size(); ++i) {
      velocity[i] = momentum * velocity[i] + grad[i];
      params[i] -= lr * velocity[i];
    }
  }
};

// target <- rho*target + (1-rho)*online; rho = 0 is a hard copy.
inline void soft_update(std::vector<double>& target, const std::vector<double>& online,
                        double rho) {
  require(target.size() == online.size(), "soft_update: size mismatch");
  require(rho >= 0.0 && rho <= 1.0, "soft_update: rho out of range");
  for (std::size_t i = 0; i < target.size(); ++i)
    target[i] = rho * target[i] + (1.0 - rho) * online[i];
}

} // namespace stnsim
