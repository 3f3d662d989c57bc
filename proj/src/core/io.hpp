#pragma once

#include <string>
#include <vector>

#include "assembly.hpp"

namespace hvar {

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

/// Grid CSV: header "id,x1..,y1..,t,volume,label", one row per node.
std::string grid_to_csv(const Grid& grid);
void write_grid_csv(const Grid& grid, const std::string& path);
Grid read_grid_csv(const std::string& path);

/// Coordinate-format dump (i, j, value) of the assembled form, for debugging.
void write_form_coo(const StiffnessForm& form, const std::string& path);

}  // namespace hvar
