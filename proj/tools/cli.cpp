#include "cli.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "c23/errors.hpp"
#include "json.hpp"

namespace c23::cli {

namespace {

template <typename T>
bool parse_unsigned(std::string_view token, T& out) {
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

void add_param_options(CLI::App& sub, Params& p) {
  sub.add_option("--m", p.pack.m, "Cells per region filter (power of two)");
  sub.add_option("--delta", p.pack.delta, "Fingerprint bits per cell");
  sub.add_option("--epsilon", p.epsilon, "Table slack; region capacity is floor(m / (6 (1 + epsilon)))");
  sub.add_option("--lambda", p.stash_limit, "Stash capacity");
  sub.add_option("--evict-limit", p.evict_limit, "Eviction iterations per insertion before stashing");
  sub.add_option("--seed", p.seed, "Hash seed");
}

struct QueryArgs {
  std::string index_path;
  CurveKey lo = 0;
  CurveKey hi = std::numeric_limits<CurveKey>::max();
  std::vector<DatasetId> sets;
  bool stats = false;
  std::string format = "text";
};

void add_query_options(CLI::App& sub, QueryArgs& q) {
  sub.add_option("--index", q.index_path, "Index file")->required();
  sub.add_option("--lo", q.lo, "Lowest curve key of the range (inclusive)");
  sub.add_option("--hi", q.hi, "Highest curve key of the range (inclusive)");
  sub.add_option("--sets", q.sets, "Dataset ids to intersect")->required()->delimiter(',');
  sub.add_flag("--stats", q.stats, "Print a statistics block after the results");
  sub.add_option("--format", q.format, "Output format")->check(CLI::IsMember({"text", "ndjson"}));
}

void print_items(const std::vector<Item>& items, const std::string& format, std::ostream& out) {
  for (const Item& it : items) {
    if (format == "ndjson") {
      out << nlohmann::json{{"item_id", it.id}, {"key", it.key}}.dump() << '\n';
    } else {
      out << it.id << '\t' << it.key << '\n';
    }
  }
}

void print_stats(const QueryStats& s, std::size_t results, const std::string& format, std::ostream& out) {
  if (format == "ndjson") {
    nlohmann::json j{{"stats",
                      {{"results", results},
                       {"candidates", s.candidates},
                       {"false_positives_culled", s.false_positives_culled},
                       {"fallback_pairs", s.fallback_pairs},
                       {"word_ops", s.word_ops}}}};
    out << j.dump() << '\n';
  } else {
    out << "#stats results=" << results << " candidates=" << s.candidates
        << " false_positives_culled=" << s.false_positives_culled << " fallback_pairs=" << s.fallback_pairs
        << " word_ops=" << s.word_ops << '\n';
  }
}

int cmd_build(const std::vector<std::string>& inputs, const Params& params, const std::string& output,
              std::ostream& out) {
  std::vector<IngestRecord> records;
  for (const std::string& path : inputs) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open " + path);
    auto part = parse_records(in, path);
    records.insert(records.end(), part.begin(), part.end());
  }
  const Index idx = build_index(records, params);
  save_index(idx, output);
  for (const auto& [id, d] : idx.datasets()) {
    out << "dataset " << id << ": items=" << d.size() << " regions=" << d.regions.size()
        << " fallback=" << d.fallback_regions() << '\n';
  }
  out << "wrote " << output << '\n';
  return 0;
}

int cmd_query(const QueryArgs& q, bool baseline, std::ostream& out) {
  if (q.lo > q.hi) throw ContractViolation("--lo must not exceed --hi");
  const Index idx = load_index(q.index_path);
  const QueryRange range{q.lo, q.hi};
  if (baseline) {
    const std::vector<Item> items = baseline_query(idx, range, q.sets);
    print_items(items, q.format, out);
    if (q.stats) print_stats(QueryStats{}, items.size(), q.format, out);
  } else {
    const QueryResult res = query(idx, range, q.sets);
    print_items(res.items, q.format, out);
    if (q.stats) print_stats(res.stats, res.items.size(), q.format, out);
  }
  return 0;
}

void print_bench(const BenchReport& r, const std::string& format, std::ostream& out) {
  if (format == "ndjson") {
    for (const BuildTiming& b : r.builds) {
      out << nlohmann::json{{"build", {{"items", b.items}, {"seconds", b.seconds}}}}.dump() << '\n';
    }
    out << nlohmann::json{{"stash_histogram", r.stash_histogram},
                          {"regions", r.regions},
                          {"fallback_regions", r.fallback_regions}}
               .dump()
        << '\n';
    out << nlohmann::json{{"queries",
                           {{"count", r.queries},
                            {"results", r.results},
                            {"word_ops", r.word_ops},
                            {"candidates", r.candidates},
                            {"false_positives_culled", r.false_positives_culled},
                            {"fallback_pairs", r.fallback_pairs},
                            {"mismatches", r.mismatches},
                            {"engine_seconds", r.engine_seconds},
                            {"baseline_seconds", r.baseline_seconds}}}}
               .dump()
        << '\n';
    out << nlohmann::json{{"false_positives",
                           {{"candidates", r.fp_candidates},
                            {"expected", r.fp_expected},
                            {"reported", r.fp_reported}}}}
               .dump()
        << '\n';
    return;
  }
  for (std::size_t i = 0; i < r.builds.size(); ++i) {
    out << "build items=" << r.builds[i].items << " seconds=" << r.builds[i].seconds;
    if (i > 0 && r.builds[i - 1].seconds > 0) out << " ratio=" << r.builds[i].seconds / r.builds[i - 1].seconds;
    out << '\n';
  }
  out << "stash_histogram";
  for (std::size_t s = 0; s < r.stash_histogram.size(); ++s) out << ' ' << s << ':' << r.stash_histogram[s];
  out << '\n';
  out << "regions=" << r.regions << " fallback_regions=" << r.fallback_regions << '\n';
  out << "queries=" << r.queries << " results=" << r.results << " word_ops=" << r.word_ops
      << " candidates=" << r.candidates << " false_positives_culled=" << r.false_positives_culled
      << " fallback_pairs=" << r.fallback_pairs << " mismatches=" << r.mismatches << '\n';
  out << "engine_seconds=" << r.engine_seconds << " baseline_seconds=" << r.baseline_seconds << '\n';
  out << "fp_candidates=" << r.fp_candidates << " fp_expected=" << r.fp_expected
      << " fp_reported=" << r.fp_reported << '\n';
}

}  // namespace

std::vector<IngestRecord> parse_records(std::istream& in, const std::string& source) {
  std::vector<IngestRecord> records;
  std::string line;
  std::size_t line_no = 0;
  std::size_t arity = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto fields = split_fields(view);
    if (fields.empty()) continue;
    auto fail = [&](const std::string& why) {
      return IngestError(source + ":" + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 3 && fields.size() != 4) {
      throw fail("expected 'dataset_id item_id key' or 'dataset_id item_id x y', got " +
                 std::to_string(fields.size()) + " fields");
    }
    if (arity != 0 && fields.size() != arity) throw fail("mixed record arity in one file");
    arity = fields.size();

    IngestRecord rec;
    if (!parse_unsigned(fields[0], rec.dataset_id)) throw fail("bad dataset id '" + std::string(fields[0]) + "'");
    if (!parse_unsigned(fields[1], rec.item_id)) throw fail("bad item id '" + std::string(fields[1]) + "'");
    if (arity == 3) {
      if (!parse_unsigned(fields[2], rec.key)) throw fail("bad key '" + std::string(fields[2]) + "'");
    } else {
      std::uint32_t x = 0, y = 0;
      if (!parse_unsigned(fields[2], x)) throw fail("bad x coordinate '" + std::string(fields[2]) + "'");
      if (!parse_unsigned(fields[3], y)) throw fail("bad y coordinate '" + std::string(fields[3]) + "'");
      rec.key = morton_encode(x, y);
      rec.planar = true;
    }
    records.push_back(rec);
  }
  return records;
}

Index build_index(const std::vector<IngestRecord>& records, const Params& params) {
  std::map<DatasetId, std::vector<Item>> grouped;
  for (const IngestRecord& r : records) grouped[r.dataset_id].push_back({r.item_id, r.key});
  Index idx(params);
  for (auto& [id, items] : grouped) {
    try {
      idx.add_dataset(id, std::move(items));
    } catch (const IngestError& e) {
      throw IngestError("dataset " + std::to_string(id) + ": " + e.what());
    }
  }
  return idx;
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial multiple-set intersection over 2-3 cuckoo hash-filters", "c23x"};
  app.require_subcommand(1);

  Params build_params;
  std::vector<std::string> inputs;
  std::string output;
  auto* build = app.add_subcommand("build", "Build an index from text records");
  add_param_options(*build, build_params);
  build->add_option("-o,--out", output, "Index file to write")->required();
  build->add_option("inputs", inputs, "Record files")->required();

  QueryArgs query_args;
  auto* query_cmd = app.add_subcommand("query", "Answer a range intersection query with the filter engine");
  add_query_options(*query_cmd, query_args);

  QueryArgs baseline_args;
  auto* baseline_cmd = app.add_subcommand("baseline", "Answer the same query by brute force");
  add_query_options(*baseline_cmd, baseline_args);

  BenchSpec spec;
  std::string bench_format = "text";
  auto* bench = app.add_subcommand("bench", "Measure build time, stash sizes, operation counts and false positives");
  add_param_options(*bench, spec.params);
  bench->add_option("--sizes", spec.sizes, "Items per dataset, one build per size")->delimiter(',');
  bench->add_option("--t", spec.sets, "Datasets per query")->check(CLI::Range(1u, 64u));
  bench->add_option("--overlap", spec.overlap, "Fraction of each set drawn from a shared pool")
      ->check(CLI::Range(0.0, 1.0));
  bench->add_option("--seeds", spec.seeds, "Workload seeds")->delimiter(',');
  bench->add_option("--trials", spec.trials, "Random queries per seed and size");
  bench->add_option("--max-items", spec.max_items, "Refuse workloads with more items in total");
  bench->add_option("--format", bench_format, "Output format")->check(CLI::IsMember({"text", "ndjson"}));

  std::vector<const char*> raw;
  raw.reserve(argv.size());
  for (const std::string& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (build->parsed()) return cmd_build(inputs, build_params, output, out);
    if (query_cmd->parsed()) return cmd_query(query_args, false, out);
    if (baseline_cmd->parsed()) return cmd_query(baseline_args, true, out);
    if (bench->parsed()) {
      const BenchReport report = run_bench(spec);
      print_bench(report, bench_format, out);
      if (report.mismatches != 0) {
        err << "error: engine and baseline disagreed on " << report.mismatches << " queries\n";
        return 3;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace c23::cli
