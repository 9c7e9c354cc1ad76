#include "crystal/presets.hpp"

#include <cctype>
#include <string>

#include <json.hpp>

#include "crystal/error.hpp"

namespace crystal {

std::vector<std::string> preset_names() { return {"line", "p1", "cm-diag", "pm", "p4"}; }

bool is_preset(std::string_view name) {
  for (const auto& n : preset_names()) {
    if (n == name) return true;
  }
  return false;
}

CrystalTriple preset(std::string_view name) {
  if (name == "line") {
    return CrystalTriple("line", LatticeBasis::standard(1),
                         PointGroup({IntMatrix::Identity(1, 1)}, RealMatrix::Identity(1, 1)));
  }
  const RealMatrix gram = RealMatrix::Identity(2, 2);
  const IntMatrix id = IntMatrix::Identity(2, 2);
  std::vector<IntMatrix> elems;
  if (name == "p1") {
    elems = {id};
  } else if (name == "cm-diag") {
    elems = {id, make_matrix({{0, 1}, {1, 0}})};
  } else if (name == "pm") {
    elems = {id, make_matrix({{1, 0}, {0, -1}})};
  } else if (name == "p4") {
    elems = {id, make_matrix({{0, -1}, {1, 0}}), make_matrix({{-1, 0}, {0, -1}}),
             make_matrix({{0, 1}, {-1, 0}})};
  } else {
    throw Error(ErrorKind::InvalidInput, "unknown preset group '" + std::string(name) + "'",
                {{"known", preset_names()}});
  }
  return CrystalTriple(std::string(name), LatticeBasis::standard(2), PointGroup(elems, gram));
}

IntMatrix parse_dilation(std::string_view text, int dimension) {
  std::string s(text);
  if (!s.empty() && s.back() == 'I') {
    const std::string scale = s.substr(0, s.size() - 1);
    try {
      size_t used = 0;
      const long long k = std::stoll(scale.empty() ? "1" : scale, &used);
      if (used == (scale.empty() ? 1 : scale.size())) {
        return IntMatrix::Identity(dimension, dimension) * static_cast<Int>(k);
      }
    } catch (const std::exception&) {
    }
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(s);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::ParseError, "cannot parse dilation '" + s + "'", {{"field", "dilation"}});
  }
  if (j.is_number_integer() && dimension == 1) return IntMatrix::Constant(1, 1, j.get<Int>());
  if (!j.is_array() || static_cast<int>(j.size()) != dimension) {
    throw Error(ErrorKind::ParseError, "dilation must be a " + std::to_string(dimension) + "x" +
                                           std::to_string(dimension) + " integer matrix",
                {{"field", "dilation"}});
  }
  IntMatrix a(dimension, dimension);
  for (int i = 0; i < dimension; ++i) {
    if (!j[static_cast<size_t>(i)].is_array() || static_cast<int>(j[static_cast<size_t>(i)].size()) != dimension) {
      throw Error(ErrorKind::ParseError, "dilation row has wrong length", {{"field", "dilation"}, {"row", i}});
    }
    for (int c = 0; c < dimension; ++c) {
      const auto& v = j[static_cast<size_t>(i)][static_cast<size_t>(c)];
      if (!v.is_number_integer()) {
        throw Error(ErrorKind::ParseError, "dilation entries must be integers", {{"field", "dilation"}});
      }
      a(i, c) = v.get<Int>();
    }
  }
  return a;
}

}  // namespace crystal
