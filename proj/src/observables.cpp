#include "lrp/observables.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "lrp/numerics.hpp"
#include "lrp/parallel.hpp"

namespace lrp {

namespace {

double binomial_se(double p, std::int64_t n) {
  return std::sqrt(std::max(0.0, p * (1.0 - p) / static_cast<double>(n)));
}

// Sub-box restriction scaffolding shared by the phi estimators: union-find
// plus cyclic member lists, so components merge in O(1) and the origin's
// cluster can be walked in O(|K_0|).
struct RestrictedForest {
  std::vector<std::int64_t> parent;
  std::vector<std::int64_t> size;
  std::vector<std::int64_t> next;  // cyclic list of component members

  explicit RestrictedForest(std::int64_t v) { reset(v); }

  void reset(std::int64_t v) {
    parent.resize(v);
    size.assign(v, 1);
    next.resize(v);
    for (std::int64_t i = 0; i < v; ++i) {
      parent[i] = i;
      next[i] = i;
    }
  }

  std::int64_t find(std::int64_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  void unite(std::int64_t a, std::int64_t b) {
    std::int64_t ra = find(a), rb = find(b);
    if (ra == rb) return;
    if (size[ra] < size[rb]) std::swap(ra, rb);
    parent[rb] = ra;
    size[ra] += size[rb];
    std::swap(next[ra], next[rb]);
  }

  template <typename Fn>
  void for_each_member(std::int64_t x, Fn&& fn) {
    std::int64_t cur = x;
    do {
      fn(cur);
      cur = next[cur];
    } while (cur != x);
  }
};

// exterior weights ew(x, k) for all k = 1..n, addressable by the Lambda_n
// vertex index; d = 1 is served by the shared ray table
class PhiWeights {
public:
  PhiWeights(const KernelSpec& spec, int n) : n_(n), box_{n, spec.d} {
    if (spec.d == 1) {
      ray_ = ray_tail_table(spec, n);
    } else {
      by_k_.resize(static_cast<std::size_t>(n) + 1);
      for (int k = 1; k <= n; ++k) {
        const Box sub{k, spec.d};
        const auto table = exterior_weight_table(spec, k);
        auto& flat = by_k_[static_cast<std::size_t>(k)];
        flat.assign(static_cast<std::size_t>(box_.vertex_count()), 0.0);
        for (std::int64_t i = 0; i < sub.vertex_count(); ++i) {
          flat[static_cast<std::size_t>(box_.index_of(sub.point_at(i)))] = table[i].value;
        }
      }
    }
  }

  // x given as Lambda_n linear index, guaranteed inside Lambda_k
  double at(int k, std::int64_t index) const {
    if (!ray_.empty()) {
      const std::int64_t x = index - n_;
      return ray_[static_cast<std::size_t>(k + 1 - x)] +
             ray_[static_cast<std::size_t>(k + 1 + x)];
    }
    return by_k_[static_cast<std::size_t>(k)][static_cast<std::size_t>(index)];
  }

private:
  int n_;
  Box box_;
  std::vector<double> ray_;
  std::vector<std::vector<double>> by_k_;
};

}  // namespace

OriginClusterSample run_origin_cluster_sample(const KernelSpec& spec, const Box& box,
                                              std::int64_t replicas, std::uint64_t master_seed,
                                              unsigned workers) {
  if (replicas < 1) throw precondition_error("run_origin_cluster_sample: replicas >= 1");
  const GroupedSampler sampler(spec, box);
  OriginClusterSample sample;
  sample.box_radius = box.n;
  sample.vertex_count = box.vertex_count();
  sample.k0.resize(static_cast<std::size_t>(replicas));
  parallel_for(replicas, workers, [&](std::int64_t begin, std::int64_t end, unsigned) {
    for (std::int64_t r = begin; r < end; ++r) {
      auto config = sampler.sample({master_seed, static_cast<std::uint32_t>(r)});
      auto part = build_partition(config);
      sample.k0[static_cast<std::size_t>(r)] = part.forest.component_size(part.origin_index);
    }
  });
  return sample;
}

std::vector<ObservableEstimate> tail_from_sample(const OriginClusterSample& sample,
                                                 const std::vector<std::int64_t>& thresholds) {
  const std::int64_t replicas = static_cast<std::int64_t>(sample.k0.size());
  std::vector<ObservableEstimate> out;
  out.reserve(thresholds.size());
  for (std::int64_t t : thresholds) {
    if (t > sample.vertex_count) {
      throw precondition_error("estimate_tail: threshold exceeds |Lambda|");
    }
    std::int64_t count = 0;
    for (std::int64_t k0 : sample.k0) count += (k0 >= t);
    ObservableEstimate est;
    est.replicas = replicas;
    est.mean = static_cast<double>(count) / static_cast<double>(replicas);
    est.std_error = binomial_se(est.mean, replicas);
    est.definition = "P(|K_0(Lambda_n)| >= " + std::to_string(t) + ")";
    out.push_back(est);
  }
  return out;
}

std::vector<ObservableEstimate> estimate_tail(const KernelSpec& spec, const Box& box,
                                              const std::vector<std::int64_t>& thresholds,
                                              std::int64_t replicas, std::uint64_t master_seed,
                                              unsigned workers) {
  return tail_from_sample(run_origin_cluster_sample(spec, box, replicas, master_seed, workers),
                          thresholds);
}

TwoPointTable estimate_two_point(const KernelSpec& spec, const Box& box, std::int64_t replicas,
                                 std::uint64_t master_seed, unsigned workers) {
  if (replicas < 1) throw precondition_error("estimate_two_point: replicas >= 1");
  const GroupedSampler sampler(spec, box);
  const std::int64_t v = box.vertex_count();
  const unsigned nworkers = effective_workers(workers);

  std::vector<std::vector<std::int64_t>> counts(nworkers,
                                                std::vector<std::int64_t>(v, 0));
  std::vector<std::int64_t> k0(static_cast<std::size_t>(replicas));
  parallel_for(replicas, nworkers, [&](std::int64_t begin, std::int64_t end, unsigned w) {
    auto& local = counts[w];
    for (std::int64_t r = begin; r < end; ++r) {
      auto config = sampler.sample({master_seed, static_cast<std::uint32_t>(r)});
      auto part = build_partition(config);
      const std::int64_t root0 = part.forest.find(part.origin_index);
      std::int64_t sz = 0;
      for (std::int64_t x = 0; x < v; ++x) {
        if (part.forest.find(x) == root0) {
          ++local[x];
          ++sz;
        }
      }
      k0[static_cast<std::size_t>(r)] = sz;
    }
  });

  TwoPointTable table;
  table.box = box;
  table.replicas = replicas;
  table.t_hat.resize(v);
  table.se.resize(v);
  for (std::int64_t x = 0; x < v; ++x) {
    std::int64_t total = 0;
    for (unsigned w = 0; w < nworkers; ++w) total += counts[w][x];
    table.t_hat[x] = static_cast<double>(total) / static_cast<double>(replicas);
    table.se[x] = binomial_se(table.t_hat[x], replicas);
  }

  std::vector<double> k0d(k0.begin(), k0.end());
  const auto ms = mean_and_se(k0d);
  table.sum = ms.mean;
  table.sum_se = ms.se;
  table.box_average = ms.mean / static_cast<double>(v);
  table.box_average_se = ms.se / static_cast<double>(v);
  return table;
}

void write_two_point_csv(const TwoPointTable& table, std::ostream& os) {
  os << "coordinates,t_hat,std_error\n";
  for (std::int64_t i = 0; i < table.box.vertex_count(); ++i) {
    const Point p = table.box.point_at(i);
    for (int c = 0; c < table.box.d; ++c) {
      if (c) os << ' ';
      os << p[c];
    }
    os << ',' << table.t_hat[i] << ',' << table.se[i] << "\n";
  }
}

std::int64_t compute_Xk(const Configuration& config, int k) {
  if (k >= config.box.n) {
    throw precondition_error("compute_Xk: requires k < box radius");
  }
  const std::int64_t v = config.box.vertex_count();
  std::vector<int> norms(static_cast<std::size_t>(v));
  for (std::int64_t i = 0; i < v; ++i) {
    norms[static_cast<std::size_t>(i)] = sup_norm(config.box.point_at(i));
  }
  UnionFind forest(v);
  for (const auto& e : config.edges) {
    if (norms[static_cast<std::size_t>(e.a)] <= k && norms[static_cast<std::size_t>(e.b)] <= k) {
      forest.unite(e.a, e.b);
    }
  }
  const std::int64_t root0 = forest.find(config.box.origin_index());
  std::int64_t count = 0;
  for (const auto& e : config.edges) {
    const bool in_a = norms[static_cast<std::size_t>(e.a)] <= k;
    const bool in_b = norms[static_cast<std::size_t>(e.b)] <= k;
    if (in_a == in_b) continue;
    const std::int64_t inner = in_a ? e.a : e.b;
    if (forest.find(inner) == root0) ++count;
  }
  return count;
}

ObservableEstimate estimate_phi(const KernelSpec& spec, int k, const Box& interior_box,
                                std::int64_t replicas, std::uint64_t master_seed,
                                unsigned workers) {
  if (k > interior_box.n) {
    throw precondition_error("estimate_phi: requires k <= interior box radius");
  }
  ObservableEstimate est;
  est.definition = "phi(Lambda_" + std::to_string(k) + ")";
  if (k == 0) {
    // Lambda_0 = {0}: t_0 = 1, no sampling needed
    est.mean = exterior_weight(spec, Point(spec.d, 0), 0).value;
    est.std_error = 0.0;
    est.replicas = replicas;
    return est;
  }
  if (replicas < 1) throw precondition_error("estimate_phi: replicas >= 1");

  const GroupedSampler sampler(spec, interior_box);
  const Box sub{k, spec.d};
  const auto weights = exterior_weight_table(spec, k);
  const std::int64_t v = interior_box.vertex_count();

  std::vector<double> phis(static_cast<std::size_t>(replicas));
  parallel_for(replicas, workers, [&](std::int64_t begin, std::int64_t end, unsigned) {
    RestrictedForest forest(v);
    std::vector<int> norms(static_cast<std::size_t>(v));
    for (std::int64_t i = 0; i < v; ++i) {
      norms[static_cast<std::size_t>(i)] = sup_norm(interior_box.point_at(i));
    }
    for (std::int64_t r = begin; r < end; ++r) {
      forest.reset(v);
      auto config = sampler.sample({master_seed, static_cast<std::uint32_t>(r)});
      for (const auto& e : config.edges) {
        if (norms[static_cast<std::size_t>(e.a)] <= k &&
            norms[static_cast<std::size_t>(e.b)] <= k) {
          forest.unite(e.a, e.b);
        }
      }
      CompensatedSum acc;
      forest.for_each_member(interior_box.origin_index(), [&](std::int64_t x) {
        acc.add(weights[sub.index_of(interior_box.point_at(x))].value);
      });
      phis[static_cast<std::size_t>(r)] = acc.value();
    }
  });

  // replica-level jackknife of the mean (equals the plain standard error)
  const auto ms = mean_and_se(phis);
  est.mean = ms.mean;
  est.std_error = ms.se;
  est.replicas = replicas;
  return est;
}

PhiProfile phi_profile(const KernelSpec& spec, int n, std::int64_t replicas,
                       std::uint64_t master_seed, unsigned workers) {
  if (n < 1) throw precondition_error("phi_profile: requires n >= 1");
  if (replicas < 2) throw precondition_error("phi_profile: replicas >= 2");
  const Box box{n, spec.d};
  const GroupedSampler sampler(spec, box);
  const PhiWeights weights(spec, n);
  const std::int64_t v = box.vertex_count();

  // per-replica phi for every k (row-major: replica r, then k-1)
  std::vector<double> matrix(static_cast<std::size_t>(replicas) * static_cast<std::size_t>(n));

  parallel_for(replicas, workers, [&](std::int64_t begin, std::int64_t end, unsigned) {
    RestrictedForest forest(v);
    std::vector<int> norms(static_cast<std::size_t>(v));
    for (std::int64_t i = 0; i < v; ++i) {
      norms[static_cast<std::size_t>(i)] = sup_norm(box.point_at(i));
    }
    std::vector<std::pair<int, Edge>> leveled;
    for (std::int64_t r = begin; r < end; ++r) {
      auto config = sampler.sample({master_seed, static_cast<std::uint32_t>(r)});
      leveled.clear();
      leveled.reserve(config.edges.size());
      for (const auto& e : config.edges) {
        leveled.emplace_back(std::max(norms[static_cast<std::size_t>(e.a)],
                                      norms[static_cast<std::size_t>(e.b)]),
                             e);
      }
      std::stable_sort(leveled.begin(), leveled.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });

      forest.reset(v);
      std::size_t pos = 0;
      const std::int64_t origin = box.origin_index();
      for (int k = 1; k <= n; ++k) {
        while (pos < leveled.size() && leveled[pos].first <= k) {
          forest.unite(leveled[pos].second.a, leveled[pos].second.b);
          ++pos;
        }
        CompensatedSum acc;
        forest.for_each_member(origin, [&](std::int64_t x) { acc.add(weights.at(k, x)); });
        matrix[static_cast<std::size_t>(r) * n + (k - 1)] = acc.value();
      }
    }
  });

  PhiProfile profile;
  profile.replicas = replicas;
  profile.points.resize(static_cast<std::size_t>(n));
  std::vector<double> col_sum(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t r = 0; r < replicas; ++r) {
    for (int k = 0; k < n; ++k) {
      col_sum[static_cast<std::size_t>(k)] += matrix[static_cast<std::size_t>(r) * n + k];
    }
  }
  const double rd = static_cast<double>(replicas);
  for (int k = 0; k < n; ++k) {
    auto& pt = profile.points[static_cast<std::size_t>(k)];
    pt.k = k + 1;
    pt.phi_hat = col_sum[static_cast<std::size_t>(k)] / rd;
    CompensatedSum sq;
    for (std::int64_t r = 0; r < replicas; ++r) {
      const double d = matrix[static_cast<std::size_t>(r) * n + k] - pt.phi_hat;
      sq.add(d * d);
    }
    pt.std_error = std::sqrt(sq.value() / (rd - 1.0) / rd);
  }

  // min over k: jackknife over replicas of min_k of the leave-one-out means
  const auto min_it = std::min_element(
      profile.points.begin(), profile.points.end(),
      [](const PhiPoint& a, const PhiPoint& b) { return a.phi_hat < b.phi_hat; });
  profile.min_phi = min_it->phi_hat;
  profile.argmin_k = min_it->k;
  std::vector<double> loo(static_cast<std::size_t>(replicas));
  for (std::int64_t r = 0; r < replicas; ++r) {
    double best = 1e300;
    for (int k = 0; k < n; ++k) {
      const double m = (col_sum[static_cast<std::size_t>(k)] -
                        matrix[static_cast<std::size_t>(r) * n + k]) /
                       (rd - 1.0);
      best = std::min(best, m);
    }
    loo[static_cast<std::size_t>(r)] = best;
  }
  profile.min_phi_se = jackknife_se(loo);

  // average over k
  CompensatedSum avg;
  for (int k = 0; k < n; ++k) avg.add(col_sum[static_cast<std::size_t>(k)]);
  profile.avg_phi = avg.value() / rd / static_cast<double>(n);
  std::vector<double> row_avgs(static_cast<std::size_t>(replicas));
  for (std::int64_t r = 0; r < replicas; ++r) {
    CompensatedSum row;
    for (int k = 0; k < n; ++k) row.add(matrix[static_cast<std::size_t>(r) * n + k]);
    row_avgs[static_cast<std::size_t>(r)] = row.value() / static_cast<double>(n);
  }
  profile.avg_phi_se = mean_and_se(row_avgs).se;
  return profile;
}

void write_phi_csv(const PhiProfile& profile, std::ostream& os) {
  os << "k,phi_hat,std_error\n";
  for (const auto& pt : profile.points) {
    os << pt.k << ',' << pt.phi_hat << ',' << pt.std_error << "\n";
  }
}

}  // namespace lrp
