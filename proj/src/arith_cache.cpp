#include <bit>
#include <cstring>
#include <fstream>

#include "qvar/arith.hpp"

namespace qvar::arith {

namespace {

constexpr char kMagic[8] = {'Q', 'V', 'A', 'R', 'T', 'B', 'L', '1'};
constexpr std::uint32_t kCacheVersion = 1;

static_assert(std::endian::native == std::endian::little, "cache format assumes a little-endian host");

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void put_array(std::ofstream& out, const std::vector<T>& v) {
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

template <class T>
void get_array(std::ifstream& in, std::vector<T>& v, std::size_t n) {
  v.resize(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
}

}  // namespace

void save_tables(const ArithTables& tables, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot open table cache for writing: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put(out, kCacheVersion);
  put(out, static_cast<std::uint64_t>(tables.limit));
  put_array(out, tables.von_mangoldt);
  put_array(out, tables.mobius);
  put_array(out, tables.totient);
  if (!out) throw NumericFailure("short write to table cache " + path.string());
}

ArithTables load_tables(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open table cache: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw InvalidArgument("not a table cache file: " + path.string());
  const auto version = get<std::uint32_t>(in);
  if (version != kCacheVersion) throw InvalidArgument("unsupported table cache version " + std::to_string(version));
  const auto limit = get<std::uint64_t>(in);
  if (!in || limit < 1 || limit > static_cast<std::uint64_t>(INT64_MAX / 16))
    throw InvalidArgument("corrupt table cache header: " + path.string());
  ArithTables t;
  t.limit = static_cast<std::int64_t>(limit);
  const auto n = static_cast<std::size_t>(limit) + 1;
  get_array(in, t.von_mangoldt, n);
  get_array(in, t.mobius, n);
  get_array(in, t.totient, n);
  if (!in) throw InvalidArgument("truncated table cache: " + path.string());
  // spf is not stored; rebuild it with a plain sieve.
  t.spf.assign(n, 0);
  t.spf[1] = 1;
  for (std::size_t i = 2; i < n; ++i) {
    if (t.spf[i] != 0) continue;
    for (std::size_t j = i; j < n; j += i)
      if (t.spf[j] == 0) t.spf[j] = static_cast<std::int32_t>(i);
  }
  return t;
}

ArithTables cached_tables(std::int64_t limit, const std::filesystem::path& dir) {
  const auto path = dir / ("arith_" + std::to_string(limit) + ".bin");
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) {
    try {
      return load_tables(path);
    } catch (const InvalidArgument&) {
      // stale or damaged file, fall through and rebuild
    }
  }
  ArithTables t = build_tables(limit);
  std::filesystem::create_directories(dir, ec);
  if (!ec) {
    try {
      save_tables(t, path);
    } catch (const std::exception&) {
    }
  }
  return t;
}

}  // namespace qvar::arith
