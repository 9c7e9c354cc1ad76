// crystalwave: command-line front end.
//
// Exit status: 0 when every check passes, 1 when a check fails (the report
// carries a witness), 2 for unreadable or malformed input.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crystal/attractor.hpp"
#include "crystal/bank.hpp"
#include "crystal/error.hpp"
#include "crystal/io.hpp"
#include "crystal/mra.hpp"
#include "crystal/presets.hpp"
#include "crystal/spectral.hpp"
#include "crystal/tile.hpp"
#include "crystal/transfer.hpp"
#include "crystal/transform.hpp"
#include "crystal/trig_poly.hpp"

namespace fs = std::filesystem;
using namespace crystal;

namespace {

struct Config {
  std::string group = "cm-diag";
  std::string dilation;
  std::string mask;
  std::string bank;
  std::string pieces;
  std::string set;
  std::string data;
  std::string pyramid;
  std::string out;
  std::string p = "inf";
  std::string init = "tile";
  std::string support;
  std::string omega;
  int level = 8;
  int iterations = -1;
  int freq_res = 16;
  int max_length = 10;
  int levels = 1;
  int depth = 8;
  long long budget = 4'000'000;
  double tol = -1.0;
};

double tol_or(const Config& cfg, double fallback) { return cfg.tol > 0 ? cfg.tol : fallback; }

std::string dilation_or_default(const Config& cfg) { return cfg.dilation.empty() ? "2I" : cfg.dilation; }

// The report always goes to stdout; with --out it is also saved as <name>.json.
int emit(const Config& cfg, const std::string& name, json report, bool pass) {
  report["pass"] = pass;
  if (!cfg.out.empty()) write_json_file(fs::path(cfg.out) / (name + ".json"), report);
  std::cout << report.dump(2) << '\n';
  return pass ? 0 : 1;
}

fs::path out_path(const Config& cfg, const std::string& file) {
  return fs::path(cfg.out.empty() ? "." : cfg.out) / file;
}

json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

json symmetry_json(const SymmetryReport& s) {
  json j = {{"ok", s.ok}, {"max_violation", s.max_violation}};
  if (s.witness) {
    const auto& [i, jj, k] = *s.witness;
    j["witness"] = {{"i", i}, {"j", jj}, {"k", to_json(k)}};
  }
  return j;
}

json dilation_json(const CrystalTriple& t) {
  const Dilation& dil = t.dilation();
  json digits = json::array();
  for (const auto& d : dil.digits) digits.push_back(to_json(d));
  json dual = json::array();
  for (const auto& d : dil.dual_digits) dual.push_back(to_json(d));
  return {{"matrix", to_json(dil.matrix)}, {"m", dil.m}, {"h", dil.h}, {"digits", digits}, {"dual_digits", dual}};
}

MaskDocument mask_from_config(const Config& cfg) {
  if (cfg.mask.empty()) throw Error(ErrorKind::ParseError, "--mask is required", {{"field", "mask"}});
  return load_mask(read_json_file(cfg.mask), cfg.dilation);
}

std::vector<RealVector> polygon_from(const json& doc, int d) {
  std::vector<RealVector> poly;
  for (const auto& v : doc) {
    if (!v.is_array() || static_cast<int>(v.size()) != d) {
      throw Error(ErrorKind::ParseError, "polygon vertices must have d coordinates", {{"field", "polygon"}});
    }
    RealVector x(d);
    for (int a = 0; a < d; ++a) x[a] = v[static_cast<size_t>(a)].get<double>();
    poly.push_back(x);
  }
  return poly;
}

// Custom cascade start: a polygon/interval indicator scaled so |phi^(0)|^2 = |L|/r.
SampledVectorFunction polygon_init(const CellGeometry& geom, const std::vector<RealVector>& poly, int level) {
  SampledVectorFunction f = polygon_indicator(geom, level, poly);
  double area = 0.0;
  for (const auto& v : f.field.values) area += v.real();
  area *= geom.cell_volume(level);
  const CrystalTriple& t = geom.triple();
  const double scale = std::sqrt(t.lattice().covolume() / t.order()) / area;
  for (auto& v : f.field.values) v *= scale;
  return intertwine(geom, f);
}

// ---------------------------------------------------------------- group

int cmd_group(const Config& cfg, const std::string& spec, bool info) {
  CrystalTriple t = resolve_group(spec, cfg.dilation);
  json report = {{"name", t.name()}, {"dimension", t.dimension()}, {"r", t.order()},
                 {"covolume", t.lattice().covolume()}};
  if (t.has_dilation()) report["dilation"] = dilation_json(t);
  if (info) {
    const PointGroup& g = t.group();
    json elems = json::array();
    for (const auto& e : g.elements()) elems.push_back(to_json(e));
    json cayley = json::array();
    json inverse = json::array();
    for (int i = 0; i < g.order(); ++i) {
      json row = json::array();
      for (int j = 0; j < g.order(); ++j) row.push_back(g.product(i, j));
      cayley.push_back(row);
      inverse.push_back(g.inverse(i));
    }
    report["point_group"] = elems;
    report["cayley"] = cayley;
    report["inverse"] = inverse;
    if (t.has_dilation()) {
      const Permutations& p = t.permutations();
      report["permutations"] = {{"h", p.h}, {"rho", p.rho}, {"sigma", p.sigma}, {"s", p.s}};
    }
  }
  return emit(cfg, info ? "group_info" : "group_check", report, true);
}

// ---------------------------------------------------------------- mask

int cmd_mask(const Config& cfg, const std::string& action) {
  if (cfg.mask.empty()) throw Error(ErrorKind::ParseError, "--mask is required", {{"field", "mask"}});
  const json doc = read_json_file(cfg.mask);
  if (action == "check-sym") {
    MaskDocument md{resolve_group(doc.at("group"), cfg.dilation.empty() && doc.contains("dilation")
                                                     ? (doc["dilation"].is_string() ? doc["dilation"].get<std::string>()
                                                                                    : doc["dilation"].dump())
                                                     : cfg.dilation),
                    ScalarMask()};
    const MatrixMask c = doc.contains("taps")
                             ? matrix_mask_from_json(doc["taps"], md.triple.dimension(), md.triple.order())
                             : lift_mask(scalar_mask_from_json(doc.at("entries"), md.triple.dimension(),
                                                               md.triple.order()),
                                         md.triple);
    const SymmetryReport s = check_gamma_a_symmetry(c, md.triple, tol_or(cfg, 1e-12));
    return emit(cfg, "mask_check_sym", {{"symmetry", symmetry_json(s)}, {"taps", c.size()}}, s.ok);
  }
  const MaskDocument md = load_mask(doc, cfg.dilation);
  if (action == "lift") {
    const MatrixMask c = lift_mask(md.mask, md.triple);
    const SymmetryReport s = check_gamma_a_symmetry(c, md.triple, tol_or(cfg, 1e-12));
    const ContractionReport cr = check_contraction(md.mask, md.triple);
    json out = mask_document(md.triple, md.mask);
    out.erase("entries");
    out["taps"] = matrix_mask_to_json(c);
    if (!cfg.out.empty()) write_json_file(out_path(cfg, "lifted_mask.json"), out);
    return emit(cfg, "mask_lift",
                {{"taps", out["taps"]},
                 {"symmetry", symmetry_json(s)},
                 {"contraction", {{"sum_sq", cr.sum_sq}, {"m", cr.m}, {"strict", cr.strict}}}},
                s.ok);
  }
  if (action == "extract") {
    json out = mask_document(md.triple, md.mask);
    if (!cfg.out.empty()) write_json_file(out_path(cfg, "scalar_mask.json"), out);
    return emit(cfg, "mask_extract", out, true);
  }
  throw Error(ErrorKind::ParseError, "unknown mask action '" + action + "'");
}

// ---------------------------------------------------------------- cascade

void write_function(const Config& cfg, const SampledVectorFunction& f, const std::string& stem, json& report) {
  if (cfg.out.empty()) return;
  write_field_csv(out_path(cfg, stem + ".csv"), f.field);
  json scales = json::array();
  if (f.field.box.dimension() <= 2) {
    for (int i = 0; i < f.field.r; ++i) {
      const auto [lo, hi] = write_pgm(out_path(cfg, stem + "_" + std::to_string(i) + ".pgm"), f.field, i);
      scales.push_back({{"component", i}, {"min", lo}, {"max", hi}});
    }
  }
  report["artifacts"] = {{"csv", stem + ".csv"}, {"pgm", scales}};
}

std::optional<SampledVectorFunction> custom_init(const Config& cfg, const CellGeometry& geom, int level) {
  if (cfg.init == "tile") return std::nullopt;
  if (cfg.init != "polygon") throw Error(ErrorKind::ParseError, "--init must be 'tile' or 'polygon'", {{"field", "init"}});
  if (cfg.pieces.empty()) throw Error(ErrorKind::ParseError, "--init polygon needs --pieces with a 'polygon' field");
  const json doc = read_json_file(cfg.pieces);
  if (!doc.contains("polygon")) throw Error(ErrorKind::ParseError, "pieces file has no 'polygon'", {{"field", "polygon"}});
  return polygon_init(geom, polygon_from(doc["polygon"], geom.dimension()), level);
}

int cmd_cascade(const Config& cfg) {
  const MaskDocument md = mask_from_config(cfg);
  const CellGeometry geom(md.triple);
  const MatrixMask c = lift_mask(md.mask, md.triple);
  CascadeOptions co;
  co.level = cfg.level;
  co.iterations = cfg.iterations >= 0 ? cfg.iterations : cfg.level;
  co.tol = tol_or(cfg, 1e-10);
  if (auto init = custom_init(cfg, geom, cfg.level - co.iterations)) {
    co.init = CascadeInit::Custom;
    co.custom = std::move(init);
  }
  const CascadeResult res = cascade_solve(geom, c, co);
  json report = {{"level", res.solution.level},
                 {"trace", res.trace},
                 {"converged", res.converged},
                 {"converged_at", res.converged_at},
                 {"non_convergent", res.non_convergent},
                 {"residual", res.residual},
                 {"l2_norm", l2_norm(geom, res.solution)},
                 {"box", to_json(res.solution.field.box)},
                 {"warnings", res.warnings}};
  write_function(cfg, res.solution, "cascade", report);
  return emit(cfg, "cascade", report, !res.non_convergent);
}

// ---------------------------------------------------------------- attractor

int cmd_attractor(const Config& cfg) {
  CrystalTriple t = resolve_group(cfg.group, dilation_or_default(cfg));
  const int d = t.dimension();
  std::vector<IntVector> support = t.dilation().digits;
  if (!cfg.support.empty()) {
    const json sj = fs::exists(cfg.support) ? read_json_file(cfg.support) : json::parse(cfg.support, nullptr, false);
    if (sj.is_discarded() || !sj.is_array()) {
      throw Error(ErrorKind::ParseError, "--support must be a JSON list of integer vectors", {{"field", "support"}});
    }
    support.clear();
    for (const auto& k : sj) support.push_back(int_vector_from_json(k, d, "support"));
  }
  AttractorOptions ao;
  ao.depth = cfg.depth;
  const AttractorEstimate est = attractor_estimate(t.dilation().matrix, support, ao);
  json report = {{"depth", est.depth},
                 {"points", est.points.size()},
                 {"support_radius", est.support_radius},
                 {"bbox", {{"lo", to_json(est.bbox.lo)}, {"hi", to_json(est.bbox.hi)}}}};
  bool pass = true;
  if (est.tiling_defect) {
    report["tiling_defect"] = *est.tiling_defect;
    report["miscovered_fraction"] = *est.miscovered_fraction;
    report["raster_level"] = est.raster_level;
    pass = *est.tiling_defect <= tol_or(cfg, std::pow(2.0, -est.raster_level / 2.0));
  }
  if (!cfg.out.empty()) {
    std::ofstream csv(out_path(cfg, "attractor.csv"));
    csv.precision(17);
    for (int a = 0; a < d; ++a) csv << (a ? "," : "") << 'x' << a;
    csv << '\n';
    for (const auto& x : est.points) {
      for (int a = 0; a < d; ++a) csv << (a ? "," : "") << x[a];
      csv << '\n';
    }
    report["artifacts"] = {{"csv", "attractor.csv"}};
  }
  return emit(cfg, "attractor", report, pass);
}

// ---------------------------------------------------------------- jsr

double parse_p(const std::string& text) {
  if (text == "inf" || text == "infinity") return kInfinity;
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "--p must be a number >= 1 or 'inf'", {{"field", "p"}});
  }
}

int cmd_jsr(const Config& cfg) {
  if (cfg.set.empty()) throw Error(ErrorKind::ParseError, "--set is required", {{"field", "set"}});
  const MatrixSet set = load_matrix_set(read_json_file(cfg.set));
  JsrOptions jo;
  jo.p = parse_p(cfg.p);
  jo.max_length = cfg.max_length;
  jo.budget = static_cast<size_t>(cfg.budget);
  const JsrResult r = jsr_estimate(set, jo);
  json report = {{"p", std::isinf(r.p) ? json("inf") : json(r.p)},
                 {"lower", r.lower},
                 {"upper", r.upper},
                 {"estimate", r.estimate},
                 {"per_length", r.per_length},
                 {"complete_length", r.complete_length},
                 {"budget", cfg.budget},
                 {"products", r.products},
                 {"combinatorial_blowup", r.blowup}};
  return emit(cfg, "jsr", report, !r.blowup);
}

// ---------------------------------------------------------------- symbols

std::vector<TrigMatrixPolynomial> symbols_from_config(const Config& cfg, CrystalTriple& triple_out,
                                                      std::vector<std::vector<TrigMatrixPolynomial>>* poly) {
  if (!cfg.bank.empty()) {
    const FilterBank bank = load_bank(read_json_file(cfg.bank));
    triple_out = bank.triple;
    if (poly) *poly = bank.polyphase_components();
    return bank.symbols();
  }
  const MaskDocument md = mask_from_config(cfg);
  triple_out = md.triple;
  const MatrixMask c = lift_mask(md.mask, md.triple);
  if (poly) *poly = {polyphase(c, md.triple)};
  return {symbol_from_mask(c, md.triple)};
}

int cmd_symbol(const Config& cfg, const std::string& action) {
  CrystalTriple triple = preset("line");
  std::vector<std::vector<TrigMatrixPolynomial>> poly;
  const auto symbols = symbols_from_config(cfg, triple, &poly);
  const int d = triple.dimension();
  if (action == "eval") {
    RealVector w = RealVector::Zero(d);
    if (!cfg.omega.empty()) {
      std::stringstream ss(cfg.omega);
      std::string part;
      int a = 0;
      while (std::getline(ss, part, ',') && a < d) w[a++] = std::stod(part);
      if (a != d) throw Error(ErrorKind::ParseError, "--omega needs d comma-separated values", {{"field", "omega"}});
    }
    json mats = json::array();
    for (const auto& s : symbols) mats.push_back(matrix_json(s.evaluate(w)));
    const ComplexMatrix mod = modulation_matrix(symbols, triple, w);
    return emit(cfg, "symbol_eval",
                {{"omega", to_json(w)}, {"symbols", mats}, {"modulation_defect", unitarity_defect(mod)}}, true);
  }
  if (action == "sweep") {
    const FrequencyGrid grid(d, cfg.freq_res);
    const DefectSweep mod = modulation_defect(symbols, triple, grid);
    const DefectSweep pol = polyphase_defect(poly, grid);
    const double tol = tol_or(cfg, 1e-10);
    if (!cfg.out.empty()) {
      std::ofstream csv(out_path(cfg, "defect_sweep.csv"));
      csv.precision(17);
      for (int a = 0; a < d; ++a) csv << 'w' << a << ',';
      csv << "modulation_defect,polyphase_defect\n";
      for (size_t i = 0; i < mod.samples.size(); ++i) {
        for (int a = 0; a < d; ++a) csv << mod.samples[i].first[a] << ',';
        csv << mod.samples[i].second << ',' << pol.samples[i].second << '\n';
      }
    }
    return emit(cfg, "symbol_sweep",
                {{"grid_resolution", cfg.freq_res},
                 {"modulation", {{"max_defect", mod.max_defect}, {"argmax", to_json(mod.argmax)}}},
                 {"polyphase", {{"max_defect", pol.max_defect}, {"argmax", to_json(pol.argmax)}}},
                 {"tol", tol}},
                mod.max_defect <= tol && pol.max_defect <= tol);
  }
  throw Error(ErrorKind::ParseError, "unknown symbol action '" + action + "'");
}

// ---------------------------------------------------------------- check-mra

int cmd_check_mra(const Config& cfg) {
  const MaskDocument md = mask_from_config(cfg);
  const CellGeometry geom(md.triple);
  MraOptions mo;
  mo.level = cfg.level;
  mo.iterations = cfg.iterations >= 0 ? cfg.iterations : cfg.level;
  mo.tol = tol_or(cfg, 1e-10);
  mo.init = custom_init(cfg, geom, cfg.level - mo.iterations);
  const MraReport r = check_mra(geom, md.mask, mo);
  json ortho = {{"ok", r.orthonormality.ok},
                {"defect", r.orthonormality.defect},
                {"quadrature_error", r.orthonormality.quadrature_error},
                {"tol", r.orthonormality.tol},
                {"norm_sq", r.orthonormality.norm_sq},
                {"pairs", r.orthonormality.pairs}};
  if (r.orthonormality.worst) ortho["worst"] = to_json(*r.orthonormality.worst);
  json report = {{"orthonormal", ortho},
                 {"refinable",
                  {{"ok", r.refinable}, {"residual", r.refinability_residual}, {"geometric_decay", r.geometric_decay},
                   {"trace", r.cascade.trace}}},
                 {"symmetric", symmetry_json(r.symmetry)},
                 {"density", {{"ok", r.density.ok}, {"lhs", r.density.lhs}, {"rhs", r.density.rhs}}},
                 {"contraction",
                  {{"sum_sq", r.contraction.sum_sq}, {"m", r.contraction.m}, {"strict", r.contraction.strict}}},
                 {"warnings", r.cascade.warnings}};
  return emit(cfg, "check_mra", report, r.ok());
}

// ---------------------------------------------------------------- check-d

json condition_d_json(const ConditionDReport& r) {
  json j = {{"ok", r.ok}, {"max_violation", r.max_violation}, {"symmetry_violation", r.symmetry_violation},
            {"checked", r.checked}};
  if (r.witness) {
    const auto& [i, jj, v] = *r.witness;
    j["witness"] = {{"i", i}, {"j", jj}, {"v", to_json(v)}};
  }
  if (r.asymmetric_mask) j["asymmetric_mask"] = *r.asymmetric_mask;
  return j;
}

int cmd_check_d(const Config& cfg) {
  if (cfg.bank.empty()) throw Error(ErrorKind::ParseError, "--bank is required", {{"field", "bank"}});
  const FilterBank bank = load_bank(read_json_file(cfg.bank));
  const double tol = tol_or(cfg, 1e-10);
  const ConditionDReport r = check_condition_d(bank, tol);
  json report = condition_d_json(r);
  report["tol"] = tol;
  report["masks"] = bank.m();
  report["m"] = bank.triple.dilation().m;
  const bool complete = bank.m() == bank.triple.dilation().m;
  report["complete"] = complete;
  if (complete) {
    const FrequencyGrid grid(bank.triple.dimension(), cfg.freq_res);
    const DefectSweep pol = polyphase_defect(bank.polyphase_components(), grid);
    report["polyphase_unitarity_defect"] = pol.max_defect;
  }
  return emit(cfg, "check_d", report, r.ok);
}

// ---------------------------------------------------------------- haar

int cmd_haar(const Config& cfg) {
  if (cfg.pieces.empty()) throw Error(ErrorKind::ParseError, "--pieces is required", {{"field", "pieces"}});
  const CrystalTriple t = resolve_group(cfg.group, dilation_or_default(cfg));
  const CellGeometry geom(t);
  const json doc = read_json_file(cfg.pieces);
  const auto pieces = load_pieces(doc, t.dimension());
  SampledVectorFunction tile;
  std::string source;
  if (doc.is_object() && doc.contains("polygon")) {
    tile = polygon_indicator(geom, cfg.level, polygon_from(doc["polygon"], t.dimension()));
    source = "polygon";
  } else {
    tile = tile_from_pieces(geom, pieces, cfg.level);
    source = "ifs";
  }
  std::optional<double> tol;
  if (cfg.tol > 0) tol = cfg.tol;
  const HaarTileResult res = haar_from_tile(geom, pieces, tile, tol);
  json report = {{"tile_source", source},
                 {"level", cfg.level},
                 {"defect", res.defect},
                 {"tol", res.tol},
                 {"measure", res.measure},
                 {"expected_measure", res.expected_measure},
                 {"fixed_point_residual", res.fixed_point_residual},
                 {"mask", scalar_mask_to_json(res.mask)},
                 {"taps", matrix_mask_to_json(res.lifted)}};
  const json mask_doc = mask_document(t, res.mask);
  write_json_file(out_path(cfg, "haar_mask.json"), mask_doc);
  report["artifacts"] = {{"mask", "haar_mask.json"}};
  return emit(cfg, "haar", report, true);
}

// ---------------------------------------------------------------- complete

int cmd_complete(const Config& cfg) {
  MaskDocument md = [&] {
    if (!cfg.bank.empty()) {
      const FilterBank b = load_bank(read_json_file(cfg.bank));
      return MaskDocument{b.triple, b.scalar_masks.front()};
    }
    return mask_from_config(cfg);
  }();
  CompletionOptions co;
  co.tol = tol_or(cfg, 1e-10);
  const FilterBank bank = complete_constant_polyphase(lift_mask(md.mask, md.triple), md.triple, co);
  const ConditionDReport r = check_condition_d(bank, co.tol);
  const FrequencyGrid grid(md.triple.dimension(), cfg.freq_res);
  const DefectSweep pol = polyphase_defect(bank.polyphase_components(), grid);
  write_json_file(out_path(cfg, "bank.json"), bank_document(bank, r.max_violation, co.tol));
  json report = {{"masks", bank.m()},
                 {"condition_d", condition_d_json(r)},
                 {"polyphase_unitarity_defect", pol.max_defect},
                 {"artifacts", {{"bank", "bank.json"}}}};
  return emit(cfg, "complete", report, r.ok);
}

// ---------------------------------------------------------------- transform

VectorField read_data(const std::string& path, int dimension) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") return read_field_csv(path, dimension);
  return read_field_raw(path);
}

int cmd_transform(const Config& cfg, const std::string& action) {
  if (cfg.bank.empty()) throw Error(ErrorKind::ParseError, "--bank is required", {{"field", "bank"}});
  if (cfg.out.empty()) throw Error(ErrorKind::ParseError, "--out is required", {{"field", "out"}});
  const FilterBank bank = load_bank(read_json_file(cfg.bank));
  const int d = bank.triple.dimension();
  if (action == "analyze") {
    if (cfg.data.empty()) throw Error(ErrorKind::ParseError, "--data is required", {{"field", "data"}});
    VectorField s = read_data(cfg.data, d);
    if (s.r == 1 && bank.r() > 1) s = vectorize(bank.triple, s);
    const Pyramid p = transform_multilevel(bank, s, cfg.levels);
    json manifest = {{"levels", cfg.levels}, {"input_boxes", json::array()}, {"details", json::array()}};
    double energy = 0.0;
    for (size_t j = 0; j < p.details.size(); ++j) {
      manifest["input_boxes"].push_back(to_json(p.input_boxes[j]));
      json files = json::array();
      for (size_t l = 0; l < p.details[j].size(); ++l) {
        const std::string name = "w_" + std::to_string(j) + "_" + std::to_string(l + 1) + ".raw";
        write_field_raw(out_path(cfg, name), p.details[j][l]);
        files.push_back(name);
        energy += p.details[j][l].norm_sq();
      }
      manifest["details"].push_back(files);
    }
    write_field_raw(out_path(cfg, "coarse.raw"), p.coarse);
    energy += p.coarse.norm_sq();
    manifest["coarse"] = "coarse.raw";
    write_json_file(out_path(cfg, "pyramid.json"), manifest);
    const double input = s.norm_sq();
    const double parseval = std::abs(energy - input);
    return emit(cfg, "transform_analyze",
                {{"levels", cfg.levels}, {"input_energy", input}, {"output_energy", energy},
                 {"parseval_error", parseval}, {"artifacts", {{"pyramid", "pyramid.json"}}}},
                parseval <= tol_or(cfg, 1e-9) * std::max(1.0, input));
  }
  if (action == "synthesize") {
    if (cfg.pyramid.empty()) throw Error(ErrorKind::ParseError, "--pyramid is required", {{"field", "pyramid"}});
    const json manifest = read_json_file(cfg.pyramid);
    const fs::path base = fs::path(cfg.pyramid).parent_path();
    Pyramid p;
    for (const auto& b : manifest.at("input_boxes")) p.input_boxes.push_back(box_from_json(b, d));
    for (const auto& files : manifest.at("details")) {
      std::vector<VectorField> level;
      for (const auto& f : files) level.push_back(read_field_raw(base / f.get<std::string>()));
      p.details.push_back(std::move(level));
    }
    p.coarse = read_field_raw(base / manifest.at("coarse").get<std::string>());
    const VectorField s = inverse_multilevel(bank, p);
    write_field_raw(out_path(cfg, "reconstructed.raw"), s);
    json report = {{"box", to_json(s.box)}, {"energy", s.norm_sq()}, {"artifacts", {{"data", "reconstructed.raw"}}}};
    if (!cfg.data.empty()) {
      const VectorField ref = read_data(cfg.data, d);
      const VectorField cmp = ref.r == s.r ? ref : vectorize(bank.triple, ref);
      double err = 0.0;
      for (size_t c = 0; c < s.box.size(); ++c) {
        for (int i = 0; i < s.r; ++i) err = std::max(err, std::abs(s.at(c, i) - cmp.read(s.box.point(c), i)));
      }
      report["max_error"] = err;
      return emit(cfg, "transform_synthesize", report, err <= tol_or(cfg, 1e-9));
    }
    return emit(cfg, "transform_synthesize", report, true);
  }
  throw Error(ErrorKind::ParseError, "unknown transform action '" + action + "'");
}

// ---------------------------------------------------------------- render

int cmd_render(const Config& cfg) {
  if (cfg.data.empty()) throw Error(ErrorKind::ParseError, "--data is required", {{"field", "data"}});
  if (cfg.out.empty()) throw Error(ErrorKind::ParseError, "--out is required", {{"field", "out"}});
  const int d = cfg.group.empty() ? 2 : resolve_group(cfg.group).dimension();
  const VectorField f = read_data(cfg.data, d);
  json scales = json::array();
  const std::string stem = fs::path(cfg.data).stem().string();
  for (int i = 0; i < f.r; ++i) {
    const std::string name = stem + "_" + std::to_string(i) + ".pgm";
    const auto [lo, hi] = write_pgm(out_path(cfg, name), f, i);
    scales.push_back({{"file", name}, {"min", lo}, {"max", hi}});
  }
  return emit(cfg, "render", {{"images", scales}}, true);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crystallographic multiresolution analysis and multiwavelet toolkit"};
  app.require_subcommand(1);
  Config cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "output directory for reports and artifacts");
    sub->add_option("--tol", cfg.tol, "tolerance (command-specific default)");
  };
  auto add_group = [&](CLI::App* sub) {
    sub->add_option("--group", cfg.group, "preset name, group file, or bundled preset");
    sub->add_option("--dilation", cfg.dilation, "dilation: kI or a JSON integer matrix");
  };

  std::string group_spec;
  auto* group = app.add_subcommand("group", "validate or describe a crystal triple");
  group->require_subcommand(1);
  auto* group_check = group->add_subcommand("check", "validate a group document or preset");
  auto* group_info = group->add_subcommand("info", "print tables and permutations");
  for (auto* s : {group_check, group_info}) {
    s->add_option("spec", group_spec, "preset name or group JSON file")->required();
    s->add_option("--dilation", cfg.dilation, "dilation: kI or a JSON integer matrix");
    add_common(s);
  }

  auto* mask = app.add_subcommand("mask", "lift, check or extract masks");
  mask->require_subcommand(1);
  std::vector<std::pair<std::string, CLI::App*>> mask_actions;
  for (const char* a : {"lift", "check-sym", "extract"}) {
    auto* s = mask->add_subcommand(a);
    s->add_option("--mask", cfg.mask, "mask document")->required();
    s->add_option("--dilation", cfg.dilation, "override the document dilation");
    add_common(s);
    mask_actions.emplace_back(a, s);
  }

  auto* cascade = app.add_subcommand("cascade", "solve the refinement equation by cascade iteration");
  cascade->add_option("--mask", cfg.mask)->required();
  cascade->add_option("--dilation", cfg.dilation);
  cascade->add_option("--level", cfg.level, "grid level of the result")->check(CLI::Range(1, 16));
  cascade->add_option("--iterations", cfg.iterations, "cascade steps (default: level)");
  cascade->add_option("--init", cfg.init, "tile or polygon");
  cascade->add_option("--pieces", cfg.pieces, "file with a 'polygon' field for --init polygon");
  add_common(cascade);

  auto* attractor = app.add_subcommand("attractor", "estimate the attractor of the digit IFS");
  add_group(attractor);
  attractor->add_option("--support", cfg.support, "JSON list (or file) of translations; default digits");
  attractor->add_option("--depth", cfg.depth)->check(CLI::Range(1, 24));
  add_common(attractor);

  auto* jsr = app.add_subcommand("jsr", "p-joint spectral radius of a matrix set");
  jsr->add_option("--set", cfg.set, "matrix set JSON")->required();
  jsr->add_option("--p", cfg.p, "p >= 1 or inf");
  jsr->add_option("--max-length", cfg.max_length)->check(CLI::Range(1, 64));
  jsr->add_option("--budget", cfg.budget, "maximum number of products");
  add_common(jsr);

  auto* symbol = app.add_subcommand("symbol", "evaluate symbols and unitarity defects");
  symbol->require_subcommand(1);
  auto* sym_eval = symbol->add_subcommand("eval");
  auto* sym_sweep = symbol->add_subcommand("sweep");
  for (auto* s : {sym_eval, sym_sweep}) {
    s->add_option("--mask", cfg.mask);
    s->add_option("--bank", cfg.bank);
    s->add_option("--dilation", cfg.dilation);
    s->add_option("--freq-res", cfg.freq_res)->check(CLI::Range(2, 4096));
    add_common(s);
  }
  sym_eval->add_option("--omega", cfg.omega, "comma-separated dual coordinates");

  auto* check_mra = app.add_subcommand("check-mra", "verify the MRA conditions for a scalar mask");
  check_mra->add_option("--mask", cfg.mask)->required();
  check_mra->add_option("--dilation", cfg.dilation);
  check_mra->add_option("--level", cfg.level)->check(CLI::Range(1, 16));
  check_mra->add_option("--iterations", cfg.iterations);
  check_mra->add_option("--init", cfg.init);
  check_mra->add_option("--pieces", cfg.pieces);
  add_common(check_mra);

  auto* check_d = app.add_subcommand("check-d", "orthogonality condition of a filter bank");
  check_d->add_option("--bank", cfg.bank)->required();
  check_d->add_option("--freq-res", cfg.freq_res)->check(CLI::Range(2, 4096));
  add_common(check_d);

  auto* haar = app.add_subcommand("haar", "Haar-type mask from a self-affine tile");
  add_group(haar);
  haar->add_option("--pieces", cfg.pieces, "pieces JSON, optionally with a 'polygon' tile")->required();
  haar->add_option("--level", cfg.level)->check(CLI::Range(1, 16));
  add_common(haar);

  auto* complete = app.add_subcommand("complete", "complete a constant-polyphase scaling mask to a bank");
  complete->add_option("--mask", cfg.mask);
  complete->add_option("--bank", cfg.bank);
  complete->add_option("--dilation", cfg.dilation);
  complete->add_option("--freq-res", cfg.freq_res)->check(CLI::Range(2, 4096));
  add_common(complete);

  auto* transform = app.add_subcommand("transform", "multilevel analysis and synthesis");
  transform->require_subcommand(1);
  auto* tr_an = transform->add_subcommand("analyze");
  auto* tr_syn = transform->add_subcommand("synthesize");
  for (auto* s : {tr_an, tr_syn}) {
    s->add_option("--bank", cfg.bank)->required();
    s->add_option("--data", cfg.data, "raw f64 file with sidecar, or CSV");
    s->add_option("--levels", cfg.levels)->check(CLI::Range(1, 16));
    add_common(s);
  }
  tr_syn->add_option("--pyramid", cfg.pyramid, "pyramid.json written by analyze");

  auto* render = app.add_subcommand("render", "write PGM images of a sampled field");
  render->add_option("--data", cfg.data)->required();
  render->add_option("--group", cfg.group, "group giving the dimension");
  add_common(render);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cfg.tol == 0.0 || (cfg.tol < 0 && cfg.tol != -1.0)) {
      throw Error(ErrorKind::ParseError, "--tol must be positive", {{"field", "tol"}});
    }
    if (group_check->parsed()) return cmd_group(cfg, group_spec, false);
    if (group_info->parsed()) return cmd_group(cfg, group_spec, true);
    for (const auto& [name, sub] : mask_actions) {
      if (sub->parsed()) return cmd_mask(cfg, name);
    }
    if (cascade->parsed()) return cmd_cascade(cfg);
    if (attractor->parsed()) return cmd_attractor(cfg);
    if (jsr->parsed()) return cmd_jsr(cfg);
    if (sym_eval->parsed()) return cmd_symbol(cfg, "eval");
    if (sym_sweep->parsed()) return cmd_symbol(cfg, "sweep");
    if (check_mra->parsed()) return cmd_check_mra(cfg);
    if (check_d->parsed()) return cmd_check_d(cfg);
    if (haar->parsed()) return cmd_haar(cfg);
    if (complete->parsed()) return cmd_complete(cfg);
    if (tr_an->parsed()) return cmd_transform(cfg, "analyze");
    if (tr_syn->parsed()) return cmd_transform(cfg, "synthesize");
    if (render->parsed()) return cmd_render(cfg);
  } catch (const Error& e) {
    json err = {{"error", std::string(to_string(e.kind()))}, {"message", e.what()}, {"witness", e.witness()}};
    std::cout << err.dump(2) << '\n';
    std::cerr << to_string(e.kind()) << ": " << e.what() << '\n';
    return e.kind() == ErrorKind::ParseError ? 2 : 1;
  } catch (const json::exception& e) {
    std::cerr << "ParseError: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
