#include "lrp/sampler.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>

#include "lrp/numerics.hpp"

namespace lrp {

namespace {

// substream ids >= kReservedStreams are module-level streams; displacement
// classes use 0..C-1
constexpr std::uint32_t kNaiveSubstream = 0xFFFFFF01u;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag) {
  const auto out = philox4x32(
      {static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32), 0x5eedu,
       0xd0e5u},
      {static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)});
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

Configuration sample_naive(const KernelSpec& spec, const Box& box, SeedSpec seed,
                           const NaiveOptions& options) {
  spec.validate();
  const std::int64_t v = box.vertex_count();
  if (v * (v - 1) / 2 > options.pair_cap) {
    throw precondition_error("sample_naive: pair count exceeds the configured cap");
  }

  std::vector<Point> points(v);
  for (std::int64_t i = 0; i < v; ++i) points[i] = box.point_at(i);

  Configuration config{box, spec, seed, {}};
  RandomStream rng(seed.master_seed, seed.replica_index, kNaiveSubstream);
  for (std::int64_t i = 0; i < v; ++i) {
    for (std::int64_t j = i + 1; j < v; ++j) {
      const double p = connection_probability(spec, points[i], points[j]);
      if (rng.next_double() < p) config.edges.push_back({i, j});
    }
  }
  return config;  // pair loop order is already sorted
}

GroupedSampler::GroupedSampler(const KernelSpec& spec, const Box& box)
    : spec_(spec), box_(box) {
  spec.validate();
  if (box.d != spec.d) throw precondition_error("sampler: box/spec dimension mismatch");
  const std::int64_t reach = 2 * static_cast<std::int64_t>(box.n);
  const std::int64_t side = 2 * reach + 1;
  std::int64_t scan = 1;
  for (int i = 0; i < box.d; ++i) scan *= side;
  classes_.reserve(static_cast<std::size_t>((scan - 1) / 2));
  Point v(box.d);
  for (std::int64_t idx = 0; idx < scan; ++idx) {
    std::int64_t rest = idx;
    for (int i = box.d - 1; i >= 0; --i) {
      v[i] = static_cast<int>(rest % side - reach);
      rest /= side;
    }
    // canonical half: first nonzero coordinate positive
    int first = 0;
    while (first < box.d && v[first] == 0) ++first;
    if (first == box.d || v[first] < 0) continue;
    DisplacementClass cls;
    cls.v = v;
    cls.pair_count = 1;
    for (int i = 0; i < box.d; ++i) {
      cls.pair_count *= box.side() - std::abs(v[i]);
    }
    Point origin(box.d, 0);
    cls.probability = connection_probability(spec, origin, v);
    classes_.push_back(std::move(cls));
  }
}

Configuration GroupedSampler::sample(SeedSpec seed) const {
  Configuration config{box_, spec_, seed, {}};
  const int d = box_.d;
  std::vector<std::int64_t> len(d), lo(d);
  std::vector<std::int64_t> pool;            // Fisher-Yates scratch
  std::vector<std::int64_t> chosen;          // rejection scratch
  Point x(d), y(d);

  for (std::size_t ci = 0; ci < classes_.size(); ++ci) {
    const auto& cls = classes_[ci];
    if (cls.probability <= 0.0) continue;
    RandomStream rng(seed.master_seed, seed.replica_index, static_cast<std::uint32_t>(ci));
    const std::int64_t count = binomial_draw(rng, cls.pair_count, cls.probability);
    if (count == 0) continue;

    for (int i = 0; i < d; ++i) {
      len[i] = box_.side() - std::abs(cls.v[i]);
      lo[i] = -box_.n + std::max(0, -cls.v[i]);
    }

    chosen.clear();
    if (count <= cls.pair_count / 8) {
      // sparse: rejection against the already-chosen set
      std::unordered_set<std::int64_t> seen;
      seen.reserve(static_cast<std::size_t>(count) * 2);
      while (static_cast<std::int64_t>(chosen.size()) < count) {
        const std::int64_t pos =
            static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(cls.pair_count)));
        if (seen.insert(pos).second) chosen.push_back(pos);
      }
    } else {
      // dense: partial shuffle of all anchor positions
      pool.resize(static_cast<std::size_t>(cls.pair_count));
      for (std::int64_t i = 0; i < cls.pair_count; ++i) pool[static_cast<std::size_t>(i)] = i;
      for (std::int64_t i = 0; i < count; ++i) {
        const std::int64_t j =
            i + static_cast<std::int64_t>(
                    rng.next_below(static_cast<std::uint64_t>(cls.pair_count - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        chosen.push_back(pool[static_cast<std::size_t>(i)]);
      }
    }

    for (const std::int64_t pos : chosen) {
      std::int64_t rest = pos;
      for (int i = d - 1; i >= 0; --i) {
        x[i] = static_cast<int>(lo[i] + rest % len[i]);
        rest /= len[i];
      }
      for (int i = 0; i < d; ++i) y[i] = x[i] + cls.v[i];
      const std::int64_t ia = box_.index_of(x);
      const std::int64_t ib = box_.index_of(y);
      config.edges.push_back(ia < ib ? Edge{ia, ib} : Edge{ib, ia});
    }
  }
  std::sort(config.edges.begin(), config.edges.end());
  return config;
}

double GroupedSampler::expected_edge_count() const {
  CompensatedSum s;
  for (const auto& cls : classes_) {
    s.add(static_cast<double>(cls.pair_count) * cls.probability);
  }
  return s.value();
}

Configuration sample_grouped(const KernelSpec& spec, const Box& box, SeedSpec seed) {
  return GroupedSampler(spec, box).sample(seed);
}

double expected_edge_count(const KernelSpec& spec, const Box& box) {
  return GroupedSampler(spec, box).expected_edge_count();
}

void write_text(const Configuration& config, std::ostream& os) {
  os << "# lrp configuration v1\n";
  os << "d " << config.box.d << "\n";
  os << "n " << config.box.n << "\n";
  os << "alpha " << format_double(config.spec.alpha) << "\n";
  os << "beta " << format_double(config.spec.beta) << "\n";
  os << "amplitude " << format_double(config.spec.amplitude) << "\n";
  os << "norm " << to_string(config.spec.norm) << "\n";
  os << "master_seed " << config.seed.master_seed << "\n";
  os << "replica " << config.seed.replica_index << "\n";
  os << "edges " << config.edges.size() << "\n";
  for (const auto& e : config.edges) {
    const Point a = config.box.point_at(e.a);
    const Point b = config.box.point_at(e.b);
    for (int i = 0; i < config.box.d; ++i) {
      if (i) os << ' ';
      os << a[i];
    }
    os << " ; ";
    for (int i = 0; i < config.box.d; ++i) {
      if (i) os << ' ';
      os << b[i];
    }
    os << "\n";
  }
}

namespace {

std::string expect_key(std::istream& is, const std::string& key) {
  std::string k, value;
  if (!(is >> k) || k != key || !(is >> value)) {
    throw config_error("configuration text: expected key '" + key + "'");
  }
  return value;
}

}  // namespace

Configuration read_text(std::istream& is) {
  std::string line;
  std::getline(is, line);
  if (line != "# lrp configuration v1") {
    throw config_error("configuration text: bad magic line");
  }
  Configuration config;
  config.box.d = std::stoi(expect_key(is, "d"));
  config.box.n = std::stoi(expect_key(is, "n"));
  config.spec.d = config.box.d;
  config.spec.alpha = std::stod(expect_key(is, "alpha"));
  config.spec.beta = std::stod(expect_key(is, "beta"));
  config.spec.amplitude = std::stod(expect_key(is, "amplitude"));
  config.spec.norm = norm_from_string(expect_key(is, "norm"));
  config.seed.master_seed = std::stoull(expect_key(is, "master_seed"));
  config.seed.replica_index = static_cast<std::uint32_t>(std::stoul(expect_key(is, "replica")));
  const std::size_t edge_count = std::stoull(expect_key(is, "edges"));
  std::getline(is, line);  // finish the header line

  config.edges.reserve(edge_count);
  Point a(config.box.d), b(config.box.d);
  for (std::size_t i = 0; i < edge_count; ++i) {
    if (!std::getline(is, line)) throw config_error("configuration text: truncated edge list");
    std::istringstream ls(line);
    for (int c = 0; c < config.box.d; ++c) {
      if (!(ls >> a[c])) throw config_error("configuration text: malformed edge line");
    }
    std::string sep;
    if (!(ls >> sep) || sep != ";") throw config_error("configuration text: missing separator");
    for (int c = 0; c < config.box.d; ++c) {
      if (!(ls >> b[c])) throw config_error("configuration text: malformed edge line");
    }
    if (!config.box.contains(a) || !config.box.contains(b)) {
      throw config_error("configuration text: edge endpoint outside the box");
    }
    const std::int64_t ia = config.box.index_of(a);
    const std::int64_t ib = config.box.index_of(b);
    if (ia == ib) throw config_error("configuration text: self-loop");
    config.edges.push_back(ia < ib ? Edge{ia, ib} : Edge{ib, ia});
  }
  return config;
}

}  // namespace lrp
