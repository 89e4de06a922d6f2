#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

namespace covsw::oracle {

/// Minimal legacy ASCII unstructured-grid reader, written from the file-format
/// description and used to validate the writer.
struct VtkGrid {
  std::string title;
  std::vector<double> points;  // 3 per point
  std::vector<std::vector<long>> cells;
  std::vector<int> cell_types;
  std::map<std::string, std::vector<double>> cell_data;   // 1 or 3 per cell
  std::map<std::string, std::vector<double>> point_data;  // 1 or 3 per point
};

/// Throws std::runtime_error on malformed input.
VtkGrid read_vtk(std::istream& in);

}  // namespace covsw::oracle
