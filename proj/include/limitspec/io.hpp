#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "limitspec/operators.hpp"
#include "limitspec/potentials.hpp"
#include "limitspec/region.hpp"

namespace limitspec {

using Json = nlohmann::json;

/// Schema violation in a JSON document; `field` is a dotted path such as
/// "operator.diagonals.-1.values[2]".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Parses a document, reporting syntax errors with line and column.
Json parse_json_text(const std::string& text);

/// [re, im]; a bare number is read as a real value.
cplx complex_from_json(const Json& j, const std::string& path);
Json complex_to_json(cplx z);

Potential potential_from_json(const Json& j, const std::string& path);
Json potential_to_json(const Potential& p);

/// {"diagonals": {"<offset>": potential, ...}}
BandOperator operator_from_json(const Json& j, const std::string& path);
Json operator_to_json(const BandOperator& a);

/// {"polynomial": [c0, c1, ...]} or {"values": [h(1), h(2), ...]}
IntegerSequenceSpec sequence_from_json(const Json& j, const std::string& path);

Grid grid_from_json(const Json& j, const std::string& path);

nlohmann::ordered_json region_to_json(const SpectralRegion& region);
SpectralRegion region_from_json(const Json& j);

/// "re,im" header, then one row per marked cell center, %.17g.
std::string region_csv(const SpectralRegion& region);

/// Mask cells as filled rectangles (merged along rows), components as strokes.
std::string region_svg(const SpectralRegion& region);

/// Writes through a temporary sibling and renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace limitspec
