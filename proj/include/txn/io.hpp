#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace txn {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);
double parse_double(const std::string &s);

/// Numeric table. The file holds "# key = value" lines, then a header of
/// "name [unit]" cells, then one row per sample.
struct CsvTable {
  KeyValues manifest;
  std::vector<std::string> columns;
  std::vector<std::string> units;
  Eigen::MatrixXd data;

  Eigen::Index column(const std::string &name) const;
};

void write_csv(std::ostream &os, const CsvTable &t);
void write_csv(const std::filesystem::path &path, const CsvTable &t);
CsvTable read_csv(std::istream &is);
CsvTable read_csv(const std::filesystem::path &path);

/// Splits one CSV record, honouring RFC 4180 quotes.
std::vector<std::string> split_csv_record(const std::string &line);
std::string quote_csv_field(const std::string &field);

/// Binary grid layout, little-endian:
///   8 bytes  magic "TXNGRID1"
///   uint32   version (1), nx, ny, nframes
///   float64  x[nx], y[ny], t[nframes]
///   float64  frames[nframes][ny][nx] (row-major, NaN marks excluded samples)
struct GridFile {
  Eigen::VectorXd x, y;
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> frames; // ny x nx
};

void write_grid(const std::filesystem::path &path, const GridFile &g);
GridFile read_grid(const std::filesystem::path &path);

/// "key = value" lines.
void write_report(const std::filesystem::path &path, const KeyValues &kv);

} // namespace txn
