#pragma once

#include <waveguide/field.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace waveguide {

/// Ordered key:value document used for field metadata, parameters and reports.
using MetaDocument = std::map<std::string, std::string>;

std::string format_double(double value);

/// Writes `<stem>.meta` (key:value text) and `<stem>.bin` (little-endian float64,
/// row-major over time, x1, x2).
void write_field(const std::filesystem::path& stem, const ScalarField& field,
                 const std::string& provenance);

ScalarField read_field(const std::filesystem::path& stem);

MetaDocument read_meta(const std::filesystem::path& path);
void write_meta(const std::filesystem::path& path, const MetaDocument& doc);

}  // namespace waveguide
