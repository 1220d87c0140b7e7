#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dlsc/network.hpp"
#include "dlsc/selection.hpp"

namespace dlsc {

// Network text format. Header `n T directed|undirected binary|rank`, then
//   binary: one line `t i j` per present edge (t 1-based, i and j 0-based;
//           undirected edges appear once, either orientation);
//   rank:   one line `t i r_1 .. r_{n-1}` per actor and time, the ranks given
//           to the other actors in index order.
// Blank lines and lines starting with '#' are ignored. Errors are ParseError
// with the offending line number.

DynamicNetwork parse_network(std::istream& in);
DynamicNetwork read_network(const std::filesystem::path& path);
std::string serialize_network(const DynamicNetwork& net);
void write_network(const std::filesystem::path& path, const DynamicNetwork& net);

/// Writes to a temporary sibling, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

/// One report line: `name <TAB> value <TAB> key=value,key=value`.
struct Record
{
    std::string name;
    double value = 0.0;
    std::vector<std::pair<std::string, std::string>> context;
};

std::string format_records(const std::vector<Record>& records);
std::vector<Record> parse_records(std::istream& in);

/// Tab-separated matrix, full double precision.
std::string format_matrix(const Eigen::MatrixXd& m);
Eigen::MatrixXd parse_matrix(std::istream& in);

/// Integer label table (n rows, T columns), tab-separated.
std::string format_labels(const Eigen::MatrixXi& z);
Eigen::MatrixXi parse_labels(std::istream& in);

/// Tab-separated selection table with a header row; NaN is written as `nan`.
std::string format_summary_table(const std::vector<FitSummary>& rows);
std::vector<FitSummary> parse_summary_table(std::istream& in);

} // namespace dlsc
