#include "fjlt/pointset_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "fjlt/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "point-set files are little-endian and read by memcpy");

namespace fjlt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_count(const std::string& value, const std::string& key,
                          const std::filesystem::path& desc) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size() || v < 1) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw FormatError("pointset: bad " + key + " '" + value + "' in " +
                      desc.string());
  }
}

std::filesystem::path desc_path(const std::filesystem::path& data_path) {
  std::filesystem::path p = data_path;
  p += ".desc";
  return p;
}

}  // namespace

RowMatrixXd read_pointset(const std::filesystem::path& data_path) {
  const std::filesystem::path desc = desc_path(data_path);
  std::ifstream dfile(desc);
  if (!dfile) {
    throw FormatError("pointset: missing descriptor " + desc.string());
  }
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(dfile, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw FormatError("pointset: bad descriptor line '" + t + "' in " +
                        desc.string());
    }
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  for (const auto& [key, value] : kv) {
    if (key != "n" && key != "d" && key != "dtype") {
      throw FormatError("pointset: unknown descriptor key '" + key + "' in " +
                        desc.string());
    }
    (void)value;
  }
  if (!kv.count("n") || !kv.count("d") || !kv.count("dtype")) {
    throw FormatError("pointset: descriptor " + desc.string() +
                      " needs n, d and dtype");
  }
  if (kv["dtype"] != "f64le") {
    throw FormatError("pointset: unsupported dtype '" + kv["dtype"] + "' in " +
                      desc.string());
  }
  const std::uint64_t n = parse_count(kv["n"], "n", desc);
  const std::uint64_t d = parse_count(kv["d"], "d", desc);

  std::ifstream in(data_path, std::ios::binary | std::ios::ate);
  if (!in) throw FormatError("pointset: cannot open " + data_path.string());
  const auto size = static_cast<std::uint64_t>(in.tellg());
  const std::uint64_t expected = n * d * sizeof(double);
  if (size != expected) {
    throw FormatError("pointset: " + data_path.string() + " is " +
                      std::to_string(size) + " bytes, expected " +
                      std::to_string(expected) + " for n=" + std::to_string(n) +
                      " d=" + std::to_string(d));
  }
  in.seekg(0);
  RowMatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  in.read(reinterpret_cast<char*>(x.data()),
          static_cast<std::streamsize>(expected));
  if (!in) throw FormatError("pointset: short read from " + data_path.string());
  if (!x.allFinite()) {
    throw FormatError("pointset: " + data_path.string() +
                      " contains non-finite values");
  }
  return x;
}

void write_pointset(const std::filesystem::path& data_path,
                    const Eigen::Ref<const RowMatrixXd>& x) {
  {
    std::ofstream out(data_path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw FormatError("pointset: cannot open " + data_path.string() +
                        " for writing");
    }
    out.write(reinterpret_cast<const char*>(x.data()),
              static_cast<std::streamsize>(
                  static_cast<std::uint64_t>(x.size()) * sizeof(double)));
    if (!out) throw FormatError("pointset: short write to " + data_path.string());
  }
  std::ofstream desc(desc_path(data_path), std::ios::trunc);
  if (!desc) {
    throw FormatError("pointset: cannot open " + desc_path(data_path).string() +
                      " for writing");
  }
  desc << "n=" << x.rows() << "\n"
       << "d=" << x.cols() << "\n"
       << "dtype=f64le\n";
  if (!desc) {
    throw FormatError("pointset: short write to " +
                      desc_path(data_path).string());
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw FormatError("csv: cannot open " + path.string() + " for writing");
  }
  return out;
}

void finish_csv(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw FormatError("csv: short write to " + path.string());
}

}  // namespace

void write_tail_csv(const std::filesystem::path& path, const TailCurve& curve) {
  std::ofstream out = open_csv(path);
  out << "t,count,trials,p_hat\n";
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
    out << format_double(curve.t_grid[i]) << ',' << curve.exceed_counts[i]
        << ',' << curve.trials << ',' << format_double(curve.p_hat(i)) << '\n';
  }
  finish_csv(out, path);
}

void write_flatten_csv(const std::filesystem::path& path,
                       const FlattenDistribution& dist) {
  std::ofstream out = open_csv(path);
  out << "value,count,denominator\n";
  for (const auto& [value, count] : dist.histogram) {
    out << format_double(value) << ',' << count << ',' << dist.denominator
        << '\n';
  }
  finish_csv(out, path);
}

void write_bench_csv(const std::filesystem::path& path,
                     const std::vector<BenchRow>& rows) {
  std::ofstream out = open_csv(path);
  out << "d,k,median_ns\n";
  for (const auto& row : rows) {
    out << row.d << ',' << row.k << ',' << format_double(row.median_ns)
        << '\n';
  }
  finish_csv(out, path);
}

}  // namespace fjlt
