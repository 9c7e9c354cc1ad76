#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "crystal/group.hpp"

namespace crystal {

// Built-in splitting triples on the square lattice (and Z for "line"):
//   line     d=1, G = {1}
//   p1       d=2, G = {I}
//   cm-diag  d=2, G = {I, swap}
//   pm       d=2, G = {I, diag(1,-1)}
//   p4       d=2, G = rotations by multiples of 90 degrees
CrystalTriple preset(std::string_view name);
std::vector<std::string> preset_names();
bool is_preset(std::string_view name);

// "2I", "3I", ... or a JSON integer matrix such as "[[1,1],[-1,1]]".
IntMatrix parse_dilation(std::string_view text, int dimension);

}  // namespace crystal
