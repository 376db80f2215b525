#include "txn/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace txn {

static_assert(std::endian::native == std::endian::little, "grid files assume little-endian");

std::string format_double(double v) {
  if (std::isnan(v))
    return "nan";
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string &s) {
  const char *first = s.data(), *last = s.data() + s.size();
  while (first < last && *first == ' ')
    ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r'))
    --last;
  if (first < last && *first == '+')
    ++first;
  double v = 0.0;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

Eigen::Index CsvTable::column(const std::string &name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name)
      return Eigen::Index(i);
  throw std::out_of_range("csv has no column '" + name + "'");
}

std::string quote_csv_field(const std::string &field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos)
    return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_record(const std::string &line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted)
    throw std::invalid_argument("unterminated quoted csv field");
  out.push_back(std::move(cur));
  return out;
}

void write_csv(std::ostream &os, const CsvTable &t) {
  if (t.units.size() != t.columns.size() || t.data.cols() != Eigen::Index(t.columns.size()))
    throw std::invalid_argument("csv: columns, units and data disagree");
  for (const auto &[k, v] : t.manifest)
    os << "# " << k << " = " << v << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    std::string cell = t.columns[i];
    if (!t.units[i].empty())
      cell += " [" + t.units[i] + "]";
    os << (i ? "," : "") << quote_csv_field(cell);
  }
  os << '\n';
  for (Eigen::Index r = 0; r < t.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < t.data.cols(); ++c)
      os << (c ? "," : "") << format_double(t.data(r, c));
    os << '\n';
  }
}

void write_csv(const std::filesystem::path &path, const CsvTable &t) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw IoError("cannot open " + path.string() + " for writing");
  write_csv(os, t);
  if (!os)
    throw IoError("write failed: " + path.string());
}

CsvTable read_csv(std::istream &is) {
  CsvTable t;
  std::string line;
  bool header = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (!header && line.rfind("#", 0) == 0) {
      const auto eq = line.find(" = ");
      if (eq == std::string::npos)
        continue;
      t.manifest.emplace_back(line.substr(2, eq - 2), line.substr(eq + 3));
      continue;
    }
    if (!header) {
      for (auto &cell : split_csv_record(line)) {
        const auto open = cell.rfind(" [");
        if (open != std::string::npos && cell.back() == ']') {
          t.columns.push_back(cell.substr(0, open));
          t.units.push_back(cell.substr(open + 2, cell.size() - open - 3));
        } else {
          t.columns.push_back(cell);
          t.units.emplace_back();
        }
      }
      header = true;
      continue;
    }
    if (line.empty())
      continue;
    const auto cells = split_csv_record(line);
    if (cells.size() != t.columns.size())
      throw IoError("csv row has " + std::to_string(cells.size()) + " fields, expected " +
                    std::to_string(t.columns.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto &c : cells)
      row.push_back(parse_double(c));
    rows.push_back(std::move(row));
  }
  if (!header)
    throw IoError("csv has no header row");
  t.data.resize(Eigen::Index(rows.size()), Eigen::Index(t.columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      t.data(Eigen::Index(r), Eigen::Index(c)) = rows[r][c];
  return t;
}

CsvTable read_csv(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw IoError("cannot open " + path.string());
  return read_csv(is);
}

namespace {

constexpr char kMagic[8] = {'T', 'X', 'N', 'G', 'R', 'I', 'D', '1'};

template <class T>
void put(std::ostream &os, T v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof v);
}

template <class T>
T get(std::istream &is) {
  T v;
  if (!is.read(reinterpret_cast<char *>(&v), sizeof v))
    throw IoError("grid file truncated");
  return v;
}

} // namespace

void write_grid(const std::filesystem::path &path, const GridFile &g) {
  const auto nx = std::uint32_t(g.x.size()), ny = std::uint32_t(g.y.size());
  if (g.frames.size() != g.times.size())
    throw std::invalid_argument("grid: frame and time counts differ");
  for (const auto &f : g.frames)
    if (f.rows() != Eigen::Index(ny) || f.cols() != Eigen::Index(nx))
      throw std::invalid_argument("grid: frame shape does not match coordinates");
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw IoError("cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, 1);
  put(os, nx);
  put(os, ny);
  put<std::uint32_t>(os, std::uint32_t(g.frames.size()));
  for (Eigen::Index i = 0; i < g.x.size(); ++i)
    put(os, g.x[i]);
  for (Eigen::Index i = 0; i < g.y.size(); ++i)
    put(os, g.y[i]);
  for (double t : g.times)
    put(os, t);
  for (const auto &f : g.frames) {
    // Eigen is column-major by default; write rows explicitly
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = f;
    os.write(reinterpret_cast<const char *>(rm.data()), std::streamsize(rm.size() * 8));
  }
  if (!os)
    throw IoError("write failed: " + path.string());
}

GridFile read_grid(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw IoError("cannot open " + path.string());
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw IoError("not a grid file: " + path.string());
  if (get<std::uint32_t>(is) != 1)
    throw IoError("unsupported grid file version");
  const auto nx = get<std::uint32_t>(is), ny = get<std::uint32_t>(is),
             nf = get<std::uint32_t>(is);
  GridFile g;
  g.x.resize(nx);
  g.y.resize(ny);
  for (std::uint32_t i = 0; i < nx; ++i)
    g.x[i] = get<double>(is);
  for (std::uint32_t i = 0; i < ny; ++i)
    g.y[i] = get<double>(is);
  for (std::uint32_t i = 0; i < nf; ++i)
    g.times.push_back(get<double>(is));
  for (std::uint32_t k = 0; k < nf; ++k) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(ny, nx);
    if (!is.read(reinterpret_cast<char *>(rm.data()), std::streamsize(rm.size() * 8)))
      throw IoError("grid file truncated");
    g.frames.emplace_back(rm);
  }
  return g;
}

void write_report(const std::filesystem::path &path, const KeyValues &kv) {
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw IoError("cannot open " + path.string() + " for writing");
  for (const auto &[k, v] : kv)
    os << k << " = " << v << '\n';
  if (!os)
    throw IoError("write failed: " + path.string());
}

} // namespace txn
