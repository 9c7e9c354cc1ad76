// JSON documents for groups, masks and banks; CSV, PGM and raw f64 exports.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "crystal/bank.hpp"
#include "crystal/grid.hpp"
#include "crystal/spectral.hpp"

namespace crystal {

using json = nlohmann::json;

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& doc);

json to_json(const IntVector& v);
json to_json(const IntMatrix& m);
json to_json(const RealVector& v);
json to_json(const IntBox& box);
json to_json(const GroupElement& g);
IntVector int_vector_from_json(const json& j, int dimension, const std::string& field);
IntMatrix int_matrix_from_json(const json& j, int dimension, const std::string& field);
IntBox box_from_json(const json& j, int dimension);

// { name, dimension, basis (rows), point_group, dilation? }
CrystalTriple triple_from_json(const json& doc);
json triple_to_json(const CrystalTriple& triple);
// A preset name, a path to a group document, or an inline document.  The
// dilation text (when non-empty) overrides a dilation in the document.
CrystalTriple resolve_group(const json& spec, const std::string& dilation = "");
CrystalTriple resolve_group(const std::string& spec, const std::string& dilation = "");

ScalarMask scalar_mask_from_json(const json& entries, int dimension, int order);
json scalar_mask_to_json(const ScalarMask& d);
json matrix_mask_to_json(const MatrixMask& c);
MatrixMask matrix_mask_from_json(const json& taps, int dimension, int r);

struct MaskDocument {
  CrystalTriple triple;
  ScalarMask mask;
};
// { group, dilation?, entries } or { group, dilation?, taps } (matrix form,
// converted through extract_scalar).
MaskDocument load_mask(const json& doc, const std::string& dilation_override = "");
json mask_document(const CrystalTriple& triple, const ScalarMask& d);

FilterBank load_bank(const json& doc);
json bank_document(const FilterBank& bank, double violation, double tol);

// { matrices: [ [[a, b], ...] ] }, entries real or [re, im]
MatrixSet load_matrix_set(const json& doc);

std::vector<GroupElement> load_pieces(const json& doc, int dimension);

// CSV: index columns j0.., then re/im pairs per channel.
void write_field_csv(const std::filesystem::path& path, const VectorField& f);
VectorField read_field_csv(const std::filesystem::path& path, int dimension);
// Binary PGM of channel `comp` (real part) for d <= 2; returns {min, max}.
std::pair<double, double> write_pgm(const std::filesystem::path& path, const VectorField& f, int comp);
// Raw little-endian f64 (re, im per channel, point-major) with a JSON sidecar
// { box, r, complex } at path + ".json".
void write_field_raw(const std::filesystem::path& path, const VectorField& f);
VectorField read_field_raw(const std::filesystem::path& path);

}  // namespace crystal
