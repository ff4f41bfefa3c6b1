#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "c23/spatial_index.hpp"

namespace c23::cli {

// One line of the text ingestion format:
//   dataset_id item_id key
//   dataset_id item_id x y      (stored under morton_encode(x, y))
struct IngestRecord {
  DatasetId dataset_id = 0;
  ItemId item_id = 0;
  CurveKey key = 0;
  bool planar = false;
};

// Parses one input stream. Blank lines and '#' comments are skipped; a file
// must use a single arity throughout. Throws IngestError naming
// `source:line` on malformed input.
std::vector<IngestRecord> parse_records(std::istream& in, const std::string& source);

// Builds an index from records. Throws IngestError on duplicate ids within a
// dataset or keys that disagree across datasets.
Index build_index(const std::vector<IngestRecord>& records, const Params& params);

struct BenchSpec {
  std::vector<std::size_t> sizes{100000, 200000};
  unsigned sets = 3;  // t
  double overlap = 0.5;
  std::vector<std::uint64_t> seeds{1};
  unsigned trials = 10;
  std::uint64_t max_items = 10'000'000;
  Params params;
};

struct BuildTiming {
  std::size_t items = 0;  // per dataset
  double seconds = 0;     // median over seeds, all t datasets
};

struct BenchReport {
  std::vector<BuildTiming> builds;
  std::vector<std::uint64_t> stash_histogram;  // index = stash size
  std::uint64_t regions = 0;
  std::uint64_t fallback_regions = 0;
  std::uint64_t queries = 0;
  std::uint64_t results = 0;
  std::uint64_t word_ops = 0;
  std::uint64_t candidates = 0;
  std::uint64_t false_positives_culled = 0;
  std::uint64_t fallback_pairs = 0;
  std::uint64_t mismatches = 0;
  double engine_seconds = 0;
  double baseline_seconds = 0;
  // Disjoint-universe workload: measured pre-verify candidates against the
  // expectation (cells occupied on both sides of an overlapping pair) * 2^-delta.
  std::uint64_t fp_candidates = 0;
  double fp_expected = 0;
  std::uint64_t fp_reported = 0;
};

// Throws ConfigError when the workload exceeds spec.max_items.
BenchReport run_bench(const BenchSpec& spec);

// Sum over overlapping Ok region pairs of the base set (smallest pruned
// set) against every other set of the cells occupied on both sides, times
// 2^-delta: the expected number of fingerprint collisions in the first
// intersection round.
double expected_false_matches(const Index& idx, const QueryRange& r, const std::vector<DatasetId>& sets);

// Entry point shared by the c23x binary and the tests; argv[0] is the
// program name. Returns the process exit status.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace c23::cli
