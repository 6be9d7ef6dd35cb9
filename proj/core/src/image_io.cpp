#include "geoshoot/image_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "geoshoot/errors.hpp"

namespace geoshoot {
namespace {

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  std::vector<T> out;
  T x;
  while (in >> x) out.push_back(x);
  if (!in.eof() || out.empty()) {
    throw FormatError("header: malformed value for '" + key + "': " + value);
  }
  return out;
}

ImageHeader parse_header(std::istream& in, const std::string& name) {
  ImageHeader h;
  std::vector<int> sizes;
  std::vector<double> spacing;
  bool saw_dims = false;
  std::string line;
  bool terminated = false;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) {
      terminated = true;
      break;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(name + ": header line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "dims") {
      h.dims = parse_list<int>(key, value).at(0);
      saw_dims = true;
    } else if (key == "sizes") {
      sizes = parse_list<int>(key, value);
    } else if (key == "components") {
      h.components = parse_list<int>(key, value).at(0);
    } else if (key == "dtype") {
      h.dtype = value;
    } else if (key == "order") {
      h.order = value;
    } else if (key == "spacing") {
      spacing = parse_list<double>(key, value);
    } else {
      throw FormatError(name + ": unknown header key '" + key + "'");
    }
  }
  if (!terminated) throw FormatError(name + ": header is not terminated by a blank line");
  if (!saw_dims || h.dims < 1 || h.dims > kMaxDims) throw FormatError(name + ": missing or invalid dims");
  if (static_cast<int>(sizes.size()) != h.dims) {
    throw FormatError(name + ": sizes lists " + std::to_string(sizes.size()) + " axes, dims=" +
                      std::to_string(h.dims));
  }
  for (int s : sizes) {
    if (s < 1) throw FormatError(name + ": grid sizes must be positive");
  }
  if (h.dtype != "f32") throw FormatError(name + ": unsupported dtype '" + h.dtype + "'");
  if (h.order != "little") throw FormatError(name + ": unsupported byte order '" + h.order + "'");
  if (h.components < 1) throw FormatError(name + ": components must be positive");
  if (!spacing.empty()) {
    if (static_cast<int>(spacing.size()) != h.dims) throw FormatError(name + ": spacing/dims mismatch");
    for (std::size_t a = 0; a < spacing.size(); ++a) h.spacing[a] = spacing[a];
  }
  h.sizes = Shape(std::span<const int>(sizes));
  return h;
}

std::vector<float> read_payload(std::istream& in, const ImageHeader& h, const std::string& name) {
  const auto start = in.tellg();
  in.seekg(0, std::ios::end);
  const auto end = in.tellg();
  in.seekg(start);
  const auto available = static_cast<std::size_t>(end - start);
  const std::size_t expected = h.payload_bytes();
  if (available != expected) {
    throw FormatError(name + ": header declares " + std::to_string(expected) +
                      " payload bytes but file holds " + std::to_string(available));
  }
  std::vector<float> values(expected / 4);
  std::vector<std::uint32_t> raw(values.size());
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(expected));
  if (static_cast<std::size_t>(in.gcount()) != expected) {
    throw FormatError(name + ": truncated payload");
  }
  for (std::size_t i = 0; i < raw.size(); ++i) values[i] = std::bit_cast<float>(to_little(raw[i]));
  return values;
}

void write_all(const std::filesystem::path& path, const Shape& shape, int components,
               const std::array<double, kMaxDims>& spacing, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  std::ostringstream head;
  head.precision(17);
  head << "dims=" << shape.dims() << "\nsizes=";
  for (int a = 0; a < shape.dims(); ++a) head << (a ? " " : "") << shape[a];
  head << "\ncomponents=" << components << "\ndtype=f32\norder=little\nspacing=";
  for (int a = 0; a < shape.dims(); ++a) head << (a ? " " : "") << spacing[static_cast<std::size_t>(a)];
  head << "\n\n";
  const std::string h = head.str();
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  std::vector<std::uint32_t> raw(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    raw[i] = to_little(std::bit_cast<std::uint32_t>(static_cast<float>(values[i])));
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(std::uint32_t)));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

ImageHeader read_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return parse_header(in, path.string());
}

ScalarImage read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  const ImageHeader h = parse_header(in, path.string());
  if (h.components != 1) throw FormatError(path.string() + ": expected a scalar image");
  const auto payload = read_payload(in, h, path.string());
  ScalarImage img(h.sizes, std::vector<double>(payload.begin(), payload.end()));
  img.set_spacing(h.spacing);
  return img;
}

void write_image(const std::filesystem::path& path, const ScalarImage& image) {
  write_all(path, image.shape(), 1, image.spacing(), image.values());
}

SpatialVectorField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  const ImageHeader h = parse_header(in, path.string());
  const auto payload = read_payload(in, h, path.string());
  SpatialVectorField f(h.sizes, h.components);
  std::copy(payload.begin(), payload.end(), f.data().begin());
  return f;
}

void write_field(const std::filesystem::path& path, const SpatialVectorField& field,
                 const std::array<double, kMaxDims>& spacing) {
  write_all(path, field.shape(), field.components(), spacing, field.data());
}

}  // namespace geoshoot
