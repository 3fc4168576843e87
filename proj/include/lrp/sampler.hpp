#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "lrp/geometry.hpp"
#include "lrp/kernel.hpp"
#include "lrp/rng.hpp"

namespace lrp {

// (master_seed, replica_index) -> configuration is a pure deterministic map.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint32_t replica_index = 0;
};

// Derive an unrelated 64-bit seed for an independent estimation stage
// (e.g. the quantile set vs the check set of a tightness run).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag);

struct Edge {
  std::int64_t a = 0;  // linear vertex indices, a < b
  std::int64_t b = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Configuration {
  Box box;
  KernelSpec spec;
  SeedSpec seed;
  std::vector<Edge> edges;  // sorted, no duplicates, no self-loops
};

struct NaiveOptions {
  std::int64_t pair_cap = 50'000'000;  // memory/time budget on V*(V-1)/2
};

// Direct simulation over all unordered vertex pairs. Oracle path.
Configuration sample_naive(const KernelSpec& spec, const Box& box, SeedSpec seed,
                           const NaiveOptions& options = {});

// One displacement class: all m vertex pairs {x, x+v} of Lambda_n share the
// same connection probability p by translation invariance.
struct DisplacementClass {
  Point v;
  std::int64_t pair_count = 0;
  double probability = 0.0;
};

// Default sampler. Draws a Binomial(m_v, p_v) count per displacement class
// and places that many edges uniformly without replacement, so the output
// distribution is identical to sample_naive while the work scales with the
// number of classes plus the number of open edges.
class GroupedSampler {
public:
  GroupedSampler(const KernelSpec& spec, const Box& box);

  Configuration sample(SeedSpec seed) const;
  double expected_edge_count() const;
  const std::vector<DisplacementClass>& classes() const { return classes_; }
  const Box& box() const { return box_; }
  const KernelSpec& spec() const { return spec_; }

private:
  KernelSpec spec_;
  Box box_;
  std::vector<DisplacementClass> classes_;
};

Configuration sample_grouped(const KernelSpec& spec, const Box& box, SeedSpec seed);

// exact sum of m_v * p_v over displacement classes
double expected_edge_count(const KernelSpec& spec, const Box& box);

// Plain text serialization: header with spec/box/seed, then one edge per
// line "x-coords ; y-coords". Round-trips bit-exactly.
void write_text(const Configuration& config, std::ostream& os);
Configuration read_text(std::istream& is);

}  // namespace lrp
