// suprahmm/clustering.hpp

// Copyright 2026  The suprahmm Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Lloyd k-means and Linde-Buzo-Gray binary splitting over row vectors.

#ifndef SUPRAHMM_CLUSTERING_HPP_
#define SUPRAHMM_CLUSTERING_HPP_

#include <random>

#include "suprahmm/common.hpp"

namespace suprahmm {

using Points = std::vector<std::span<const double>>;
using Centroids = std::vector<std::vector<double>>;

inline double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double x = a[d] - b[d];
    s += x * x;
  }
  return s;
}

inline std::size_t NearestCentroid(const Centroids& c, std::span<const double> x,
                                   double* dist = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double d = SquaredDistance(x, c[k]);
    if (d < best_d) best_d = d, best = k;
  }
  if (dist) *dist = best_d;
  return best;
}

inline std::vector<double> Mean(const Points& pts) {
  std::vector<double> mu(pts.at(0).size(), 0.0);
  for (const auto& p : pts)
    for (std::size_t d = 0; d < mu.size(); ++d) mu[d] += p[d];
  for (double& x : mu) x /= static_cast<double>(pts.size());
  return mu;
}

/// Mean squared distance of every point to its nearest centroid.
inline double Distortion(const Centroids& c, const Points& pts) {
  double total = 0.0;
  for (const auto& p : pts) {
    double d;
    NearestCentroid(c, p, &d);
    total += d;
  }
  return total / static_cast<double>(pts.size());
}

struct KMeansResult {
  Centroids centroids;
  std::vector<std::size_t> assignment;
  std::vector<double> distortion_history;  // after each assignment step
};

/// Lloyd iterations from the given centroids. An emptied cell keeps its
/// previous centroid, so distortion never increases.
inline KMeansResult KMeans(const Points& pts, Centroids init, int max_iters = 20,
                           double rel_tol = 1e-6) {
  KMeansResult r;
  r.centroids = std::move(init);
  r.assignment.assign(pts.size(), 0);
  const std::size_t dim = pts.at(0).size();
  for (int it = 0; it < max_iters; ++it) {
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double d;
      r.assignment[i] = NearestCentroid(r.centroids, pts[i], &d);
      total += d;
    }
    total /= static_cast<double>(pts.size());
    r.distortion_history.push_back(total);
    const std::size_t n = r.distortion_history.size();
    if (n >= 2) {
      const double prev = r.distortion_history[n - 2];
      if (prev - total <= rel_tol * std::max(prev, 1e-300)) break;
    }
    Centroids sums(r.centroids.size(), std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(r.centroids.size(), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      ++counts[r.assignment[i]];
      for (std::size_t d = 0; d < dim; ++d) sums[r.assignment[i]][d] += pts[i][d];
    }
    for (std::size_t k = 0; k < sums.size(); ++k) {
      if (counts[k] == 0) continue;
      for (std::size_t d = 0; d < dim; ++d)
        r.centroids[k][d] = sums[k][d] / static_cast<double>(counts[k]);
    }
  }
  return r;
}

struct LbgResult {
  Centroids centroids;
  std::vector<double> distortion_history;  // every k-means step, all stages
};

/// LBG: start from the global mean, split every cell along a seeded random
/// direction scaled by the cell spread, refine with k-means, repeat. When K is
/// not a power of two the last round splits only the highest-distortion cells.
inline LbgResult LbgCodebook(const Points& pts, std::size_t k, std::uint64_t seed,
                             double split_eps = 0.01, int kmeans_iters = 20) {
  if (k < 1) throw Error(ErrorKind::kInvalidArgument, "codebook size must be >= 1");
  if (pts.size() < k)
    throw Error(ErrorKind::kInvalidArgument, "fewer frames (" + std::to_string(pts.size()) +
                                                 ") than codebook size (" +
                                                 std::to_string(k) + ")");
  const std::size_t dim = pts[0].size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  LbgResult res;
  res.centroids = {Mean(pts)};
  res.distortion_history.push_back(Distortion(res.centroids, pts));
  while (res.centroids.size() < k) {
    // Per-cell distortion decides which cells split first.
    std::vector<double> cell_dist(res.centroids.size(), 0.0);
    for (const auto& p : pts) {
      double d;
      cell_dist[NearestCentroid(res.centroids, p, &d)] += d;
    }
    std::vector<std::size_t> order(res.centroids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cell_dist[a] > cell_dist[b]; });
    const std::size_t n_split = std::min(res.centroids.size(), k - res.centroids.size());
    Centroids next = res.centroids;
    for (std::size_t s = 0; s < n_split; ++s) {
      auto& c = next[order[s]];
      std::vector<double> dir(dim);
      for (auto& x : dir) x = normal(rng);
      const double scale =
          split_eps * std::sqrt(std::max(cell_dist[order[s]], 1e-12) / static_cast<double>(pts.size()));
      std::vector<double> twin = c;
      for (std::size_t d = 0; d < dim; ++d) {
        c[d] += scale * dir[d];
        twin[d] -= scale * dir[d];
      }
      next.push_back(std::move(twin));
    }
    auto km = KMeans(pts, std::move(next), kmeans_iters);
    res.centroids = std::move(km.centroids);
    res.distortion_history.insert(res.distortion_history.end(), km.distortion_history.begin(),
                                  km.distortion_history.end());
  }
  return res;
}

}  // namespace suprahmm

#endif  // SUPRAHMM_CLUSTERING_HPP_
