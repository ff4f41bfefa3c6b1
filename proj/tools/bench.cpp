#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "c23/errors.hpp"
#include "c23/intersect.hpp"
#include "cli.hpp"
#include "workload.hpp"

namespace c23::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : (v[mid - 1] + v[mid]) / 2;
}

void record_regions(const Index& idx, BenchReport& report) {
  for (const auto& [id, d] : idx.datasets()) {
    for (const RegionFilter& r : d.regions) {
      ++report.regions;
      if (!r.ok()) {
        ++report.fallback_regions;
        continue;
      }
      if (report.stash_histogram.size() <= r.stash.size()) report.stash_histogram.resize(r.stash.size() + 1);
      ++report.stash_histogram[r.stash.size()];
    }
  }
}

}  // namespace

double expected_false_matches(const Index& idx, const QueryRange& r, const std::vector<DatasetId>& sets) {
  std::vector<std::vector<const RegionFilter*>> pruned;
  std::vector<std::size_t> counts;
  for (DatasetId id : sets) {
    pruned.push_back(prune_regions(idx.dataset(id), r));
    std::size_t n = 0;
    for (const RegionFilter* g : pruned.back()) n += g->size();
    counts.push_back(n);
  }
  const auto base = static_cast<std::size_t>(std::min_element(counts.begin(), counts.end()) - counts.begin());
  std::uint64_t shared_cells = 0;
  for (std::size_t k = 0; k < pruned.size(); ++k) {
    if (k == base) continue;
    for (const auto& [a, b] : overlap_join(pruned[base], pruned[k])) {
      if (!a->ok() || !b->ok()) continue;
      shared_cells += all_ones_cells(bitwise_and(a->occupied, b->occupied)).size();
    }
  }
  return static_cast<double>(shared_cells) * std::ldexp(1.0, -static_cast<int>(idx.params().pack.delta));
}

BenchReport run_bench(const BenchSpec& spec) {
  BenchReport report;
  if (spec.trials == 0) return report;
  spec.params.validate();

  std::uint64_t total = 0;
  for (std::size_t n : spec.sizes) total += std::uint64_t{n} * spec.sets;
  if (total > spec.max_items) {
    throw ConfigError("workload needs " + std::to_string(total) + " items, limit is " +
                      std::to_string(spec.max_items) + " (raise --max-items)");
  }

  std::vector<DatasetId> all_sets(spec.sets);
  for (unsigned i = 0; i < spec.sets; ++i) all_sets[i] = i;

  for (std::size_t n : spec.sizes) {
    std::vector<double> build_times;
    for (std::uint64_t seed : spec.seeds) {
      WorkloadSpec w;
      w.sizes.assign(spec.sets, n);
      w.overlap = spec.overlap;
      w.seed = seed;
      auto data = make_workload(w);

      const auto started = Clock::now();
      Index idx(spec.params);
      for (unsigned i = 0; i < spec.sets; ++i) idx.add_dataset(i, std::move(data[i]));
      build_times.push_back(seconds_since(started));
      record_regions(idx, report);

      std::mt19937_64 rng(seed ^ n);
      for (unsigned trial = 0; trial < spec.trials; ++trial) {
        const CurveKey a = rng() % w.key_space;
        const CurveKey b = rng() % w.key_space;
        const QueryRange range{std::min(a, b), std::max(a, b)};

        auto t0 = Clock::now();
        const QueryResult res = query(idx, range, all_sets);
        report.engine_seconds += seconds_since(t0);
        t0 = Clock::now();
        const std::vector<Item> expected = baseline_query(idx, range, all_sets);
        report.baseline_seconds += seconds_since(t0);

        ++report.queries;
        report.results += res.items.size();
        report.word_ops += res.stats.word_ops;
        report.candidates += res.stats.candidates;
        report.false_positives_culled += res.stats.false_positives_culled;
        report.fallback_pairs += res.stats.fallback_pairs;
        if (res.items != expected) ++report.mismatches;
      }
    }
    report.builds.push_back({n, median(build_times)});
  }

  // Disjoint universes: every pre-verify candidate is a fingerprint collision.
  for (std::uint64_t seed : spec.seeds) {
    WorkloadSpec w;
    w.sizes.assign(2, spec.sizes.empty() ? 0 : spec.sizes.front());
    w.overlap = 0;
    w.seed = seed ^ 0xF00D;
    auto data = make_workload(w);
    Index idx(spec.params);
    idx.add_dataset(0, std::move(data[0]));
    idx.add_dataset(1, std::move(data[1]));
    const QueryRange full{0, w.key_space};
    const std::vector<DatasetId> pair{0, 1};
    const QueryResult res = query(idx, full, pair);
    report.fp_candidates += res.stats.candidates;
    report.fp_reported += res.items.size();
    report.fp_expected += expected_false_matches(idx, full, pair);
  }
  return report;
}

}  // namespace c23::cli
