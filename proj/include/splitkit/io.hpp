#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "splitkit/dynamics.hpp"

namespace splitkit {

/// Shortest decimal form of x that round-trips to the same double
/// (std::to_chars), so artifacts are bit-identical across runs.
std::string format_double(double x);

/// RFC-4180 output (CRLF rows) with header
///   path_id,jump_index,time,v_1,...,v_n,atom_index
/// and one row per trajectory entry (entry 0 is the initial condition,
/// atom_index -1).
void write_trajectories_csv(std::ostream& os,
                            const std::vector<Trajectory>& paths, int dim);

/// Reads a numeric CSV into a matrix (one sample per row).  Accepts LF or
/// CRLF line endings and an optional non-numeric header row.  Throws
/// std::runtime_error on ragged rows or non-numeric cells.
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& file);

}  // namespace splitkit
