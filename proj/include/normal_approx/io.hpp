#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "normal_approx/approx.hpp"
#include "normal_approx/compact_split.hpp"
#include "normal_approx/core_linear.hpp"
#include "normal_approx/gen.hpp"
#include "normal_approx/spectra.hpp"
#include "normal_approx/triangular.hpp"

// JSON wire formats.
//
//   matrix:  {"rows": n, "cols": m, "data": [[re, im], ...]}   row-major
//   family:  {"members": [matrix, ...]}
//
// Readers throw ParseError on missing fields, length mismatches and
// non-finite numbers.
namespace normal_approx::io {

using json = nlohmann::json;

json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

json family_to_json(std::span<const ComplexMatrix> members);
std::vector<ComplexMatrix> members_from_json(const json& j);

json complex_to_json(Complex z);

json to_json(const SpreadResult& r);
json to_json(const SchurResult& r);
json to_json(const BoundReport& r);
json to_json(const NormalityReport& r);
json to_json(const SplitResult& r);
json to_json(const GeneratorSpec& spec);
GeneratorSpec generator_spec_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

ComplexMatrix read_matrix_file(const std::filesystem::path& path);
std::vector<ComplexMatrix> read_family_file(const std::filesystem::path& path);

// Shortest round-trip decimal form of a double ("%.17g").
std::string format_double(double x);

}  // namespace normal_approx::io
