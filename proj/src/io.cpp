#include "splitkit/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace splitkit {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_trajectories_csv(std::ostream& os,
                            const std::vector<Trajectory>& paths, int dim) {
  os << "path_id,jump_index,time";
  for (int i = 1; i <= dim; ++i) os << ",v_" << i;
  os << ",atom_index\r\n";
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const Trajectory& traj = paths[p];
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
      os << p << ',' << j << ',' << format_double(traj.times[j]);
      for (int i = 0; i < dim; ++i) os << ',' << format_double(traj.states[j][i]);
      os << ',' << traj.atom_indices[j] << "\r\n";
    }
  }
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    std::size_t begin = pos, end = comma;
    while (begin < end && (line[begin] == ' ' || line[begin] == '\t')) ++begin;
    while (end > begin && (line[end - 1] == ' ' || line[end - 1] == '\t')) --end;
    double value = 0.0;
    const auto res = std::from_chars(line.data() + begin, line.data() + end, value);
    if (res.ec != std::errc{} || res.ptr != line.data() + end) return false;
    out.push_back(value);
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  return !out.empty();
}

}  // namespace

Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read CSV file " + file.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::vector<double> cells;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!parse_row(line, cells)) {
      if (first) {  // header row
        first = false;
        continue;
      }
      throw std::runtime_error("non-numeric CSV row in " + file.string());
    }
    first = false;
    if (!rows.empty() && cells.size() != rows.front().size())
      throw std::runtime_error("ragged CSV rows in " + file.string());
    rows.push_back(cells);
  }
  if (rows.empty()) throw std::runtime_error("no samples in " + file.string());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return m;
}

}  // namespace splitkit
