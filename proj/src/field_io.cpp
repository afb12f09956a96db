#include <waveguide/field_io.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace waveguide {

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return std::filesystem::path(stem.string() + suffix);
}

std::uint64_t to_little_endian(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t out = 0;
    for (int b = 0; b < 8; ++b) out |= ((bits >> (8 * b)) & 0xffu) << (8 * (7 - b));
    return out;
  }
  return bits;
}

const std::string& require(const MetaDocument& doc, const std::string& key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw std::runtime_error("field metadata is missing key '" + key + "'");
  return it->second;
}

}  // namespace

std::string format_double(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

void write_meta(const std::filesystem::path& path, const MetaDocument& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& [key, value] : doc) out << key << ": " << value << '\n';
}

MetaDocument read_meta(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  MetaDocument doc;
  std::string line;
  while (std::getline(in, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    while (!value.empty() && value.front() == ' ') value.erase(value.begin());
    doc[key] = value;
  }
  return doc;
}

void write_field(const std::filesystem::path& stem, const ScalarField& field,
                 const std::string& provenance) {
  const SpaceTimeGrid& grid = field.grid();
  const WaveguideDomain& d = grid.domain();
  MetaDocument meta{
      {"format", "waveguide-field-1"},
      {"kind", to_string(field.kind())},
      {"segment", field.segment() ? to_string(*field.segment()) : "none"},
      {"levels", std::to_string(field.shape().levels)},
      {"rows", std::to_string(field.shape().rows)},
      {"cols", std::to_string(field.shape().cols)},
      {"L", format_double(d.L)},
      {"h", format_double(d.h)},
      {"T", format_double(d.T)},
      {"alpha", format_double(d.alpha)},
      {"observed", to_string(d.observed)},
      {"truncated", d.truncated ? "true" : "false"},
      {"n1", std::to_string(grid.n1())},
      {"n2", std::to_string(grid.n2())},
      {"nt", std::to_string(grid.nt())},
      {"provenance", provenance},
  };
  write_meta(with_suffix(stem, ".meta"), meta);

  std::ofstream bin(with_suffix(stem, ".bin"), std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + stem.string() + ".bin for writing");
  for (Index n = 0; n < field.values().size(); ++n) {
    std::uint64_t bits = 0;
    const double v = field.values()[n];
    std::memcpy(&bits, &v, sizeof bits);
    bits = to_little_endian(bits);
    bin.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
}

ScalarField read_field(const std::filesystem::path& stem) {
  const MetaDocument meta = read_meta(with_suffix(stem, ".meta"));
  if (require(meta, "format") != "waveguide-field-1")
    throw std::runtime_error("unsupported field format in " + stem.string());
  WaveguideDomain d;
  d.L = std::stod(require(meta, "L"));
  d.h = std::stod(require(meta, "h"));
  d.T = std::stod(require(meta, "T"));
  d.alpha = std::stod(require(meta, "alpha"));
  d.observed = side_from_string(require(meta, "observed"));
  d.truncated = require(meta, "truncated") == "true";
  SpaceTimeGrid grid(d, std::stoi(require(meta, "n1")), std::stoi(require(meta, "n2")),
                     std::stoi(require(meta, "nt")));
  const FieldKind kind = field_kind_from_string(require(meta, "kind"));
  std::optional<Segment> segment;
  if (require(meta, "segment") != "none") segment = segment_from_string(meta.at("segment"));
  ScalarField field(grid, kind, segment);
  if (field.shape().levels != std::stol(require(meta, "levels")) ||
      field.shape().rows != std::stol(require(meta, "rows")) ||
      field.shape().cols != std::stol(require(meta, "cols")))
    throw std::runtime_error("field shape in " + stem.string() + " disagrees with its grid");

  std::ifstream bin(with_suffix(stem, ".bin"), std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + stem.string() + ".bin");
  for (Index n = 0; n < field.values().size(); ++n) {
    std::uint64_t bits = 0;
    if (!bin.read(reinterpret_cast<char*>(&bits), sizeof bits))
      throw std::runtime_error("truncated values file " + stem.string() + ".bin");
    bits = to_little_endian(bits);
    double v = 0.0;
    std::memcpy(&v, &bits, sizeof v);
    field.values()[n] = v;
  }
  return field;
}

}  // namespace waveguide
