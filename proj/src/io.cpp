#include "crystal/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "crystal/error.hpp"
#include "crystal/presets.hpp"

namespace crystal {

namespace fs = std::filesystem;

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path.string() + "'", {{"file", path.string()}});
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, "invalid JSON in '" + path.string() + "': " + e.what(),
                {{"file", path.string()}, {"byte", e.byte}});
  }
}

void write_json_file(const fs::path& path, const json& doc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

json to_json(const IntVector& v) { return std::vector<Int>(v.data(), v.data() + v.size()); }

json to_json(const IntMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const RealVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const IntBox& box) { return {{"lo", to_json(box.lo())}, {"hi", to_json(box.hi())}}; }

json to_json(const GroupElement& g) { return {{"g", g.point}, {"k", to_json(g.translation)}}; }

IntVector int_vector_from_json(const json& j, int dimension, const std::string& field) {
  if (dimension == 1 && j.is_number_integer()) return IntVector::Constant(1, j.get<Int>());
  if (!j.is_array() || static_cast<int>(j.size()) != dimension) {
    throw Error(ErrorKind::ParseError, "field '" + field + "' must be an integer vector of length " +
                                           std::to_string(dimension),
                {{"field", field}});
  }
  IntVector v(dimension);
  for (int i = 0; i < dimension; ++i) {
    if (!j[static_cast<size_t>(i)].is_number_integer()) {
      throw Error(ErrorKind::ParseError, "field '" + field + "' must hold integers", {{"field", field}});
    }
    v[i] = j[static_cast<size_t>(i)].get<Int>();
  }
  return v;
}

IntMatrix int_matrix_from_json(const json& j, int dimension, const std::string& field) {
  if (!j.is_array() || static_cast<int>(j.size()) != dimension) {
    throw Error(ErrorKind::ParseError, "field '" + field + "' must be a square integer matrix", {{"field", field}});
  }
  IntMatrix m(dimension, dimension);
  for (int i = 0; i < dimension; ++i) m.row(i) = int_vector_from_json(j[static_cast<size_t>(i)], dimension, field).transpose();
  return m;
}

IntBox box_from_json(const json& j, int dimension) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi")) {
    throw Error(ErrorKind::ParseError, "box needs 'lo' and 'hi'", {{"field", "box"}});
  }
  return IntBox(int_vector_from_json(j["lo"], dimension, "box.lo"), int_vector_from_json(j["hi"], dimension, "box.hi"));
}

namespace {

const json& require(const json& doc, const char* field) {
  if (!doc.is_object() || !doc.contains(field)) {
    throw Error(ErrorKind::ParseError, std::string("missing field '") + field + "'", {{"field", field}});
  }
  return doc[field];
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw Error(ErrorKind::ParseError, "field '" + field + "' must be a number", {{"field", field}});
  return j.get<double>();
}

cd complex_value(const json& j, const std::string& field) {
  if (j.is_number()) return cd(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2) return cd(number(j[0], field), number(j[1], field));
  throw Error(ErrorKind::ParseError, "field '" + field + "' must be a number or [re, im]", {{"field", field}});
}

IntMatrix dilation_from_json(const json& j, int dimension) {
  if (j.is_string()) return parse_dilation(j.get<std::string>(), dimension);
  if (dimension == 1 && j.is_number_integer()) return IntMatrix::Constant(1, 1, j.get<Int>());
  return int_matrix_from_json(j, dimension, "dilation");
}

}  // namespace

CrystalTriple triple_from_json(const json& doc) {
  const json& dim_j = require(doc, "dimension");
  if (!dim_j.is_number_integer() || dim_j.get<int>() < 1) {
    throw Error(ErrorKind::ParseError, "'dimension' must be a positive integer", {{"field", "dimension"}});
  }
  const int d = dim_j.get<int>();
  const std::string name = doc.value("name", std::string("custom"));

  RealMatrix basis = RealMatrix::Identity(d, d);
  if (doc.contains("basis")) {
    const json& b = doc["basis"];
    std::vector<double> flat;
    if (b.is_array() && static_cast<int>(b.size()) == d && b[0].is_array()) {
      for (const auto& row : b) {
        if (!row.is_array() || static_cast<int>(row.size()) != d) {
          throw Error(ErrorKind::ParseError, "'basis' rows must have length d", {{"field", "basis"}});
        }
        for (const auto& v : row) flat.push_back(number(v, "basis"));
      }
    } else if (b.is_array() && static_cast<int>(b.size()) == d * d) {
      for (const auto& v : b) flat.push_back(number(v, "basis"));
    } else {
      throw Error(ErrorKind::ParseError, "'basis' must be d x d (nested rows or flat row-major)", {{"field", "basis"}});
    }
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) basis(i, j) = flat[static_cast<size_t>(i * d + j)];
    }
  }
  LatticeBasis lattice(basis);

  const json& pg = require(doc, "point_group");
  if (!pg.is_array() || pg.empty()) {
    throw Error(ErrorKind::ParseError, "'point_group' must be a nonempty list of matrices", {{"field", "point_group"}});
  }
  std::vector<IntMatrix> elems;
  for (const auto& g : pg) elems.push_back(int_matrix_from_json(g, d, "point_group"));
  CrystalTriple triple(name, lattice, PointGroup(elems, lattice.gram()));
  if (doc.contains("dilation") && !doc["dilation"].is_null()) triple.attach_dilation(dilation_from_json(doc["dilation"], d));
  return triple;
}

json triple_to_json(const CrystalTriple& triple) {
  const int d = triple.dimension();
  json basis = json::array();
  for (int i = 0; i < d; ++i) {
    json row = json::array();
    for (int j = 0; j < d; ++j) row.push_back(triple.lattice().basis()(i, j));
    basis.push_back(row);
  }
  json pg = json::array();
  for (const auto& g : triple.group().elements()) pg.push_back(to_json(g));
  json doc = {{"name", triple.name()}, {"dimension", d}, {"basis", basis}, {"point_group", pg}};
  if (triple.has_dilation()) doc["dilation"] = to_json(triple.dilation().matrix);
  return doc;
}

CrystalTriple resolve_group(const json& spec, const std::string& dilation) {
  if (spec.is_string()) return resolve_group(spec.get<std::string>(), dilation);
  CrystalTriple triple = triple_from_json(spec);
  if (!dilation.empty()) triple.attach_dilation(parse_dilation(dilation, triple.dimension()));
  return triple;
}

CrystalTriple resolve_group(const std::string& spec, const std::string& dilation) {
  CrystalTriple triple = [&] {
    if (is_preset(spec)) return preset(spec);
    if (fs::exists(spec)) return triple_from_json(read_json_file(spec));
    const fs::path bundled = fs::path(CRYSTALWAVE_PRESET_DIR) / (spec + ".json");
    if (fs::exists(bundled)) return triple_from_json(read_json_file(bundled));
    throw Error(ErrorKind::ParseError, "unknown group '" + spec + "'", {{"field", "group"}, {"known", preset_names()}});
  }();
  if (!dilation.empty()) triple.attach_dilation(parse_dilation(dilation, triple.dimension()));
  return triple;
}

ScalarMask scalar_mask_from_json(const json& entries, int dimension, int order) {
  if (!entries.is_array()) throw Error(ErrorKind::ParseError, "'entries' must be a list", {{"field", "entries"}});
  ScalarMask d(dimension);
  for (size_t n = 0; n < entries.size(); ++n) {
    const json& e = entries[n];
    const json& g = require(e, "g");
    if (!g.is_number_integer() || g.get<int>() < 0 || g.get<int>() >= order) {
      throw Error(ErrorKind::ParseError, "entry point index out of range", {{"field", "entries.g"}, {"entry", n}});
    }
    const IntVector k = int_vector_from_json(require(e, "k"), dimension, "entries.k");
    const cd v(e.contains("re") ? number(e["re"], "entries.re") : 0.0, e.contains("im") ? number(e["im"], "entries.im") : 0.0);
    const GroupElement gamma{g.get<int>(), k};
    d.set(gamma, d.get(gamma) + v);
  }
  return d;
}

json scalar_mask_to_json(const ScalarMask& d) {
  json entries = json::array();
  for (const auto& [gamma, v] : d.entries()) {
    entries.push_back({{"g", gamma.point}, {"k", to_json(gamma.translation)}, {"re", v.real()}, {"im", v.imag()}});
  }
  return entries;
}

json matrix_mask_to_json(const MatrixMask& c) {
  json taps = json::array();
  for (const auto& [k, m] : c.taps()) {
    json flat = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back({m(i, j).real(), m(i, j).imag()});
    }
    taps.push_back({{"k", to_json(k)}, {"matrix", flat}});
  }
  return taps;
}

MatrixMask matrix_mask_from_json(const json& taps, int dimension, int r) {
  if (!taps.is_array()) throw Error(ErrorKind::ParseError, "'taps' must be a list", {{"field", "taps"}});
  MatrixMask c(dimension, r);
  for (const auto& t : taps) {
    const IntVector k = int_vector_from_json(require(t, "k"), dimension, "taps.k");
    const json& flat = require(t, "matrix");
    if (!flat.is_array() || static_cast<int>(flat.size()) != r * r) {
      throw Error(ErrorKind::ParseError, "'matrix' needs r*r complex entries", {{"field", "taps.matrix"}, {"r", r}});
    }
    ComplexMatrix m(r, r);
    for (int i = 0; i < r * r; ++i) m(i / r, i % r) = complex_value(flat[static_cast<size_t>(i)], "taps.matrix");
    c.set_tap(k, m);
  }
  c.prune();
  return c;
}

namespace {

CrystalTriple document_triple(const json& doc, const std::string& dilation_override) {
  const json& group = require(doc, "group");
  std::string dil = dilation_override;
  if (dil.empty() && doc.contains("dilation")) {
    const json& dj = doc["dilation"];
    dil = dj.is_string() ? dj.get<std::string>() : dj.dump();
  }
  CrystalTriple triple = resolve_group(group, dil);
  if (!triple.has_dilation()) {
    throw Error(ErrorKind::ParseError, "mask documents need a dilation", {{"field", "dilation"}});
  }
  return triple;
}

}  // namespace

MaskDocument load_mask(const json& doc, const std::string& dilation_override) {
  CrystalTriple triple = document_triple(doc, dilation_override);
  if (doc.contains("entries")) {
    ScalarMask d = scalar_mask_from_json(doc["entries"], triple.dimension(), triple.order());
    return {triple, d};
  }
  if (doc.contains("taps")) {
    const MatrixMask c = matrix_mask_from_json(doc["taps"], triple.dimension(), triple.order());
    ScalarMask d = extract_scalar(c, triple);
    return {triple, d};
  }
  throw Error(ErrorKind::ParseError, "mask document needs 'entries' or 'taps'", {{"field", "entries"}});
}

json mask_document(const CrystalTriple& triple, const ScalarMask& d) {
  json group = is_preset(triple.name()) ? json(triple.name()) : triple_to_json(triple);
  return {{"group", group}, {"dilation", to_json(triple.dilation().matrix)}, {"entries", scalar_mask_to_json(d)}};
}

FilterBank load_bank(const json& doc) {
  CrystalTriple triple = document_triple(doc, "");
  const json& masks = require(doc, "masks");
  if (!masks.is_array() || masks.empty()) throw Error(ErrorKind::ParseError, "'masks' must be a nonempty list", {{"field", "masks"}});
  std::vector<ScalarMask> scalar;
  for (const auto& m : masks) {
    const json& entries = m.is_object() ? require(m, "entries") : m;
    scalar.push_back(scalar_mask_from_json(entries, triple.dimension(), triple.order()));
  }
  return FilterBank::from_scalar(triple, std::move(scalar));
}

json bank_document(const FilterBank& bank, double violation, double tol) {
  json group = is_preset(bank.triple.name()) ? json(bank.triple.name()) : triple_to_json(bank.triple);
  json masks = json::array();
  for (const auto& d : bank.scalar_masks) masks.push_back({{"entries", scalar_mask_to_json(d)}});
  return {{"group", group},
          {"dilation", to_json(bank.triple.dilation().matrix)},
          {"masks", masks},
          {"validation", {{"condition_d_violation", violation}, {"tol", tol}}}};
}

MatrixSet load_matrix_set(const json& doc) {
  const json& list = doc.is_array() ? doc : require(doc, "matrices");
  if (!list.is_array() || list.empty()) throw Error(ErrorKind::ParseError, "'matrices' must be a nonempty list", {{"field", "matrices"}});
  MatrixSet set;
  for (const auto& mj : list) {
    if (!mj.is_array() || mj.empty() || !mj[0].is_array()) {
      throw Error(ErrorKind::ParseError, "each matrix must be a list of rows", {{"field", "matrices"}});
    }
    const auto rows = static_cast<Eigen::Index>(mj.size());
    const auto cols = static_cast<Eigen::Index>(mj[0].size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (static_cast<Eigen::Index>(mj[static_cast<size_t>(i)].size()) != cols) {
        throw Error(ErrorKind::ParseError, "ragged matrix rows", {{"field", "matrices"}});
      }
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = complex_value(mj[static_cast<size_t>(i)][static_cast<size_t>(j)], "matrices");
    }
    set.push_back(m);
  }
  validate_matrix_set(set);
  return set;
}

std::vector<GroupElement> load_pieces(const json& doc, int dimension) {
  const json& list = doc.is_array() ? doc : require(doc, "pieces");
  if (!list.is_array()) throw Error(ErrorKind::ParseError, "'pieces' must be a list", {{"field", "pieces"}});
  std::vector<GroupElement> out;
  for (const auto& p : list) {
    const json& g = require(p, "g");
    if (!g.is_number_integer()) throw Error(ErrorKind::ParseError, "piece 'g' must be an integer", {{"field", "pieces.g"}});
    out.push_back({g.get<int>(), int_vector_from_json(require(p, "k"), dimension, "pieces.k")});
  }
  return out;
}

void write_field_csv(const fs::path& path, const VectorField& f) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write '" + path.string() + "'");
  out.precision(17);
  const int d = f.box.dimension();
  for (int a = 0; a < d; ++a) out << (a ? "," : "") << 'j' << a;
  for (int i = 0; i < f.r; ++i) out << ",re" << i << ",im" << i;
  out << '\n';
  for (size_t c = 0; c < f.box.size(); ++c) {
    const IntVector j = f.box.point(c);
    for (int a = 0; a < d; ++a) out << (a ? "," : "") << j[a];
    for (int i = 0; i < f.r; ++i) out << ',' << f.at(c, i).real() << ',' << f.at(c, i).imag();
    out << '\n';
  }
}

VectorField read_field_csv(const fs::path& path, int dimension) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path.string() + "'", {{"file", path.string()}});
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<IntVector, std::vector<double>>> rows;
  size_t width = 0;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError, "bad number in '" + path.string() + "'", {{"file", path.string()}, {"line", lineno}});
      }
    }
    if (width == 0) width = vals.size();
    if (vals.size() != width || width < static_cast<size_t>(dimension) + 2 || (width - dimension) % 2 != 0) {
      throw Error(ErrorKind::ParseError, "malformed row in '" + path.string() + "'", {{"file", path.string()}, {"line", lineno}});
    }
    IntVector j(dimension);
    for (int a = 0; a < dimension; ++a) j[a] = static_cast<Int>(std::llround(vals[static_cast<size_t>(a)]));
    rows.emplace_back(j, std::vector<double>(vals.begin() + dimension, vals.end()));
  }
  IntBox box = IntBox::empty(dimension);
  for (const auto& row : rows) box = box.including(row.first);
  const int r = width == 0 ? 0 : static_cast<int>((width - dimension) / 2);
  VectorField f(box, r);
  for (const auto& [j, vals] : rows) {
    const size_t c = box.index(j);
    for (int i = 0; i < r; ++i) f.at(c, i) = cd(vals[static_cast<size_t>(2 * i)], vals[static_cast<size_t>(2 * i + 1)]);
  }
  return f;
}

std::pair<double, double> write_pgm(const fs::path& path, const VectorField& f, int comp) {
  const int d = f.box.dimension();
  if (d > 2) throw Error(ErrorKind::InvalidInput, "PGM export supports d <= 2");
  const Int width = f.box.empty() ? 0 : f.box.extent(0);
  const Int height = d == 2 && !f.box.empty() ? f.box.extent(1) : 1;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (size_t c = 0; c < f.box.size(); ++c) {
    lo = std::min(lo, f.at(c, comp).real());
    hi = std::max(hi, f.at(c, comp).real());
  }
  if (f.box.empty()) lo = hi = 0.0;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write '" + path.string() + "'");
  out.precision(17);
  out << "P5\n# min " << lo << " max " << hi << "\n" << width << ' ' << height << "\n255\n";
  const double span = hi > lo ? hi - lo : 1.0;
  // top row holds the largest second index
  for (Int y = height - 1; y >= 0; --y) {
    for (Int x = 0; x < width; ++x) {
      IntVector j = f.box.lo();
      j[0] += x;
      if (d == 2) j[1] += y;
      const double v = (f.at(f.box.index(j), comp).real() - lo) / span;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0))));
    }
  }
  return {lo, hi};
}

void write_field_raw(const fs::path& path, const VectorField& f) {
  static_assert(std::endian::native == std::endian::little, "raw export assumes a little-endian host");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(f.values.data()), static_cast<std::streamsize>(f.values.size() * sizeof(cd)));
  write_json_file(path.string() + ".json", {{"box", to_json(f.box)}, {"r", f.r}, {"complex", true}});
}

VectorField read_field_raw(const fs::path& path) {
  const json side = read_json_file(path.string() + ".json");
  const json& bj = require(side, "box");
  const int d = static_cast<int>(require(bj, "lo").size());
  const IntBox box = box_from_json(bj, d);
  const json& rj = require(side, "r");
  if (!rj.is_number_integer() || rj.get<int>() < 1) throw Error(ErrorKind::ParseError, "'r' must be positive", {{"field", "r"}});
  const bool is_complex = side.value("complex", true);
  VectorField f(box, rj.get<int>());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path.string() + "'", {{"file", path.string()}});
  const size_t count = f.values.size();
  std::vector<double> buf(is_complex ? 2 * count : count);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)));
  if (static_cast<size_t>(in.gcount()) != buf.size() * sizeof(double)) {
    throw Error(ErrorKind::ParseError, "raw file shorter than its sidecar says", {{"file", path.string()}});
  }
  for (size_t i = 0; i < count; ++i) f.values[i] = is_complex ? cd(buf[2 * i], buf[2 * i + 1]) : cd(buf[i], 0.0);
  return f;
}

}  // namespace crystal
