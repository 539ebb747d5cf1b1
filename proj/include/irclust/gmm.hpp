#pragma once

// EM for Gaussian mixtures with spherical or diagonal covariance.
// Responsibilities are computed in log space; degenerate components are
// re-seeded from the worst-fit point.

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "irclust/dense_matrix.hpp"
#include "irclust/kmeans.hpp"
#include "irclust/partition.hpp"
#include "irclust/rng.hpp"

namespace irclust {

enum class GmmCovariance { spherical, diagonal };

struct GmmModel {
  std::vector<double> weights;
  DenseMatrix means;      // K x d
  DenseMatrix variances;  // K x d (diagonal) or K x 1 (spherical)
  GmmCovariance covariance_model = GmmCovariance::diagonal;
  double log_likelihood = -std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  std::size_t degenerate_reseeds = 0;
  bool degenerate_recurring = false;  // reseeding fired more than 3 times
  std::vector<double> log_likelihood_history;
};

struct GmmOptions {
  GmmCovariance covariance = GmmCovariance::diagonal;
  double tol = 1e-6;
  std::size_t max_iter = 200;
  std::size_t restarts = 10;
  double variance_floor_scale = 1e-6;  // floor = scale * mean data variance
};

namespace detail {

inline double gmm_log_density(std::span<const double> x, std::span<const double> mean,
                              const GmmModel& model, std::size_t k) {
  constexpr double log_two_pi = 1.8378770664093453;
  const std::size_t d = x.size();
  double quad = 0.0, logdet = 0.0;
  if (model.covariance_model == GmmCovariance::spherical) {
    const double var = model.variances(k, 0);
    logdet = double(d) * std::log(var);
    quad = squared_distance(x, mean) / var;
  } else {
    for (std::size_t c = 0; c < d; ++c) {
      const double var = model.variances(k, c);
      const double diff = x[c] - mean[c];
      logdet += std::log(var);
      quad += diff * diff / var;
    }
  }
  return -0.5 * (double(d) * log_two_pi + logdet + quad);
}

struct GmmEmRun {
  GmmModel model;
  std::vector<int> labels;
};

inline GmmEmRun gmm_em_once(const DenseMatrix& data, std::size_t K, const GmmOptions& opt,
                            Rng& rng) {
  const std::size_t n = data.rows, d = data.cols;

  // Mean data variance sets the floor and the initial spread.
  double total_var = 0.0;
  {
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < d; ++c) mean[c] += data(i, c);
    for (double& m : mean) m /= double(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = data(i, c) - mean[c];
        total_var += diff * diff;
      }
    total_var /= double(n * d);
  }
  if (total_var <= 0.0) total_var = 1.0;
  const double floor = std::max(opt.variance_floor_scale * total_var,
                                std::numeric_limits<double>::min() * 1e10);

  GmmEmRun run;
  GmmModel& model = run.model;
  model.covariance_model = opt.covariance;
  model.weights.assign(K, 1.0 / double(K));
  model.means = kmeanspp_seed(data, K, rng);
  model.variances = DenseMatrix(K, opt.covariance == GmmCovariance::spherical ? 1 : d, total_var);

  DenseMatrix resp(n, K);
  std::vector<double> logp(K);
  double prev_ll = -std::numeric_limits<double>::infinity();

  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    // E-step.
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < K; ++k) {
        logp[k] = std::log(model.weights[k]) + gmm_log_density(data.row(i), model.means.row(k), model, k);
        mx = std::max(mx, logp[k]);
      }
      double sum = 0.0;
      for (std::size_t k = 0; k < K; ++k) sum += std::exp(logp[k] - mx);
      const double lse = mx + std::log(sum);
      ll += lse;
      for (std::size_t k = 0; k < K; ++k) resp(i, k) = std::exp(logp[k] - lse);
    }
    model.log_likelihood = ll;
    model.log_likelihood_history.push_back(ll);
    model.iterations = it + 1;

    // M-step.
    bool reseeded = false;
    for (std::size_t k = 0; k < K; ++k) {
      double nk = 0.0;
      for (std::size_t i = 0; i < n; ++i) nk += resp(i, k);
      if (nk < 1.0) {
        // Re-seed this component at the point the mixture explains worst.
        ++model.degenerate_reseeds;
        if (model.degenerate_reseeds > 3) model.degenerate_recurring = true;
        std::size_t worst = 0;
        double worst_ll = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
          double mx = -std::numeric_limits<double>::infinity();
          for (std::size_t kk = 0; kk < K; ++kk)
            mx = std::max(mx, std::log(model.weights[kk]) +
                                  gmm_log_density(data.row(i), model.means.row(kk), model, kk));
          if (mx < worst_ll) {
            worst_ll = mx;
            worst = i;
          }
        }
        for (std::size_t c = 0; c < d; ++c) model.means(k, c) = data(worst, c);
        for (std::size_t c = 0; c < model.variances.cols; ++c) model.variances(k, c) = total_var;
        model.weights[k] = 1.0 / double(n);
        reseeded = true;
        continue;
      }
      model.weights[k] = nk / double(n);
      for (std::size_t c = 0; c < d; ++c) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += resp(i, k) * data(i, c);
        model.means(k, c) = m / nk;
      }
      if (opt.covariance == GmmCovariance::spherical) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          v += resp(i, k) * squared_distance(data.row(i), model.means.row(k));
        model.variances(k, 0) = std::max(v / (nk * double(d)), floor);
      } else {
        for (std::size_t c = 0; c < d; ++c) {
          double v = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            const double diff = data(i, c) - model.means(k, c);
            v += resp(i, k) * diff * diff;
          }
          model.variances(k, c) = std::max(v / nk, floor);
        }
      }
    }
    if (reseeded) {
      // Weights must still sum to one after a reseed.
      double wsum = 0.0;
      for (double w : model.weights) wsum += w;
      for (double& w : model.weights) w /= wsum;
      prev_ll = -std::numeric_limits<double>::infinity();
      continue;
    }
    if (std::abs(ll - prev_ll) < opt.tol) break;
    prev_ll = ll;
  }

  run.labels.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    int best = 0;
    double best_r = resp(i, 0);
    for (std::size_t k = 1; k < K; ++k)
      if (resp(i, k) > best_r) {
        best_r = resp(i, k);
        best = int(k);
      }
    run.labels[i] = best;
  }
  return run;
}

}  // namespace detail

inline std::pair<LabeledPartition, GmmModel> gmm_em(const DenseMatrix& data, std::size_t K,
                                                    const GmmOptions& opt = {},
                                                    std::uint64_t seed = 0) {
  if (K < 1 || K > data.rows) throw std::invalid_argument("gmm_em: require 1 <= K <= rows");
  if (data.cols == 0) throw std::invalid_argument("gmm_em: data must have at least one column");
  Rng root(mix_seed(seed, hash_string("gmm")));
  detail::GmmEmRun best;
  bool first = true;
  for (std::size_t r = 0; r < opt.restarts; ++r) {
    Rng rng = root.substream(r);
    detail::GmmEmRun cur = detail::gmm_em_once(data, K, opt, rng);
    if (first || cur.model.log_likelihood > best.model.log_likelihood) {
      best = std::move(cur);
      first = false;
    }
  }
  return {LabeledPartition(std::move(best.labels), int(K)), std::move(best.model)};
}

}  // namespace irclust
