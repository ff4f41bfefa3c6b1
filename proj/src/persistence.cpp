#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <unordered_set>

#include "c23/errors.hpp"
#include "c23/spatial_index.hpp"

namespace c23 {

namespace {

constexpr char kMagic[4] = {'C', '2', '3', 'X'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kChecksumBytes = 8;

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001B3ULL;
  }
  return h;
}

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  std::vector<std::uint8_t>& bytes() { return buf_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  void raw(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, bytes_.data() + pos_, n);
    pos_ += n;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

  // Rejects counts that could not possibly fit in the remaining bytes.
  void need_items(std::uint64_t count, std::size_t bytes_each) {
    if (count > (bytes_.size() - pos_) / bytes_each) throw FormatError("index image truncated");
  }

 private:
  void need(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw FormatError("index image truncated");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void write_region(Writer& w, const RegionFilter& r, const PositionMap& positions) {
  const std::vector<ItemId> members = r.members();
  w.u8(static_cast<std::uint8_t>(r.status));
  w.u64(r.key_lo);
  w.u64(r.key_hi);
  w.u32(static_cast<std::uint32_t>(members.size()));
  for (ItemId x : members) {
    w.u64(x);
    w.u64(positions.at(x));
  }
  if (!r.ok()) return;
  auto index_of = [&](ItemId x) {
    return static_cast<std::uint32_t>(std::lower_bound(members.begin(), members.end(), x) - members.begin());
  };
  for (const auto& cell : r.table) w.u32(cell ? index_of(*cell) + 1 : 0);
  w.u32(static_cast<std::uint32_t>(r.stash.size()));
  for (ItemId x : r.stash) w.u32(index_of(x));
}

RegionFilter read_region(Reader& in, const Params& params, PositionMap& positions) {
  const std::uint8_t status = in.u8();
  if (status > 1) throw FormatError("unknown region status " + std::to_string(status));
  const CurveKey key_lo = in.u64();
  const CurveKey key_hi = in.u64();
  const std::uint32_t count = in.u32();
  if (key_lo > key_hi) throw FormatError("region key range is inverted");
  if (count > params.region_capacity()) throw FormatError("region exceeds its capacity");
  in.need_items(count, 16);

  std::vector<Item> members(count);
  for (Item& it : members) {
    it.id = in.u64();
    it.key = in.u64();
    if (it.key < key_lo || it.key > key_hi) throw FormatError("item key outside its region range");
    if (!positions.emplace(it.id, it.key).second) throw FormatError("duplicate item id in dataset");
  }
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (members[i - 1].id >= members[i].id) throw FormatError("region members are not sorted by id");
  }

  if (status == static_cast<std::uint8_t>(RegionStatus::Fallback)) {
    RegionFilter r = make_fallback_region(members);
    r.key_lo = key_lo;
    r.key_hi = key_hi;
    r.seed = params.seed;
    return r;
  }

  const unsigned m = params.pack.m;
  std::vector<std::optional<ItemId>> table(m);
  for (auto& cell : table) {
    const std::uint32_t ref = in.u32();
    if (ref > count) throw FormatError("table cell references a missing item");
    if (ref != 0) cell = members[ref - 1].id;
  }
  const std::uint32_t stash_count = in.u32();
  if (stash_count > params.stash_limit) throw FormatError("stash exceeds its limit");
  std::vector<ItemId> stash;
  for (std::uint32_t i = 0; i < stash_count; ++i) {
    const std::uint32_t ref = in.u32();
    if (ref >= count) throw FormatError("stash references a missing item");
    stash.push_back(members[ref].id);
  }

  RegionFilter r;
  try {
    r = assemble_region(key_lo, key_hi, std::move(table), std::move(stash), params);
  } catch (const DataIntegrityError& e) {
    throw FormatError(std::string("invalid region table: ") + e.what());
  }
  if (r.size() != count) throw FormatError("region table does not hold every member exactly once");
  return r;
}

}  // namespace

std::vector<std::uint8_t> serialize_index(const Index& idx) {
  Writer w;
  const Params& p = idx.params();
  w.raw(kMagic, sizeof kMagic);
  w.u32(kVersion);
  w.u32(p.pack.delta);
  w.u32(p.pack.m);
  w.u64(std::bit_cast<std::uint64_t>(p.epsilon));
  w.u32(p.capacity);
  w.u32(p.evict_limit);
  w.u32(p.stash_limit);
  w.u64(p.seed);
  w.u32(static_cast<std::uint32_t>(idx.datasets().size()));
  for (const auto& [id, d] : idx.datasets()) {
    w.u32(id);
    w.u64(d.size());
    w.u32(static_cast<std::uint32_t>(d.regions.size()));
    for (const RegionFilter& r : d.regions) write_region(w, r, d.positions);
  }
  w.u64(fnv1a(w.bytes()));
  return std::move(w.bytes());
}

Index deserialize_index(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof kMagic + 4 + kChecksumBytes) throw FormatError("index image truncated");
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) throw FormatError("bad magic, not a C23X index");
  const auto body = bytes.first(bytes.size() - kChecksumBytes);
  Reader trailer(bytes.last(kChecksumBytes));
  if (trailer.u64() != fnv1a(body)) throw FormatError("checksum mismatch");

  Reader in(body);
  char magic[4];
  in.raw(magic, sizeof magic);
  const std::uint32_t version = in.u32();
  if (version != kVersion) throw FormatError("unsupported index version " + std::to_string(version));

  Params p;
  p.pack.delta = in.u32();
  p.pack.m = in.u32();
  p.epsilon = std::bit_cast<double>(in.u64());
  p.capacity = in.u32();
  p.evict_limit = in.u32();
  p.stash_limit = in.u32();
  p.seed = in.u64();
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid parameters: ") + e.what());
  }

  Index idx(p);
  const std::uint32_t n_datasets = in.u32();
  PositionMap seen;
  for (std::uint32_t k = 0; k < n_datasets; ++k) {
    Dataset d;
    d.id = in.u32();
    if (idx.has_dataset(d.id)) throw FormatError("dataset " + std::to_string(d.id) + " appears twice");
    const std::uint64_t n_items = in.u64();
    const std::uint32_t n_regions = in.u32();
    in.need_items(n_regions, 21);
    d.regions.reserve(n_regions);
    for (std::uint32_t i = 0; i < n_regions; ++i) {
      d.regions.push_back(read_region(in, p, d.positions));
      if (i > 0) {
        const RegionFilter& prev = d.regions[i - 1];
        const RegionFilter& cur = d.regions.back();
        if (prev.key_lo > cur.key_lo || prev.key_hi > cur.key_hi) throw FormatError("regions are not ordered");
      }
    }
    if (d.positions.size() != n_items) throw FormatError("dataset item count mismatch");
    for (const auto& [id, key] : d.positions) {
      auto [it, fresh] = seen.emplace(id, key);
      if (!fresh && it->second != key) throw FormatError("item " + std::to_string(id) + " has conflicting keys");
    }
    idx.insert_dataset(std::move(d));
  }
  if (!in.at_end()) throw FormatError("trailing bytes after last dataset");
  return idx;
}

void save_index(const Index& idx, std::ostream& out) {
  const std::vector<std::uint8_t> bytes = serialize_index(idx);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed to write index image");
}

void save_index(const Index& idx, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save_index(idx, out);
}

Index load_index(std::istream& in) {
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return deserialize_index(bytes);
}

Index load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_index(in);
}

}  // namespace c23
