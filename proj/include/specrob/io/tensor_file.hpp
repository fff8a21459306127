#pragma once

// Single-file tensor container: one JSON header line followed by raw
// little-endian IEEE-754 binary32 values in row-major order.
//
//   {"dtype":"f32","shape":[N,C,H,W],"order":"row-major","byte_order":"little"}\n
//   <4 * product(shape) bytes>

#include <bit>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "specrob/error.hpp"
#include "specrob/tensor.hpp"

namespace specrob::io {

struct TensorData {
  std::vector<std::size_t> shape;
  std::vector<float> values;
};

inline std::size_t element_count(std::span<const std::size_t> shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

inline std::string tensor_header(std::span<const std::size_t> shape) {
  std::string h = R"({"dtype":"f32","shape":[)";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) h += ',';
    h += std::to_string(shape[i]);
  }
  h += R"(],"order":"row-major","byte_order":"little"})";
  h += '\n';
  return h;
}

inline std::string encode_tensor(std::span<const float> values, std::span<const std::size_t> shape) {
  if (values.size() != element_count(shape)) {
    throw InvalidInput("tensor has " + std::to_string(values.size()) + " values but shape implies " +
                       std::to_string(element_count(shape)));
  }
  std::string out = tensor_header(shape);
  out.reserve(out.size() + 4 * values.size());
  for (float v : values) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFu));
  }
  return out;
}

inline TensorData decode_tensor(const std::string& bytes, const std::string& context = "tensor") {
  const auto newline = bytes.find('\n');
  if (newline == std::string::npos) throw ParseError(context + ": missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(0, newline));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(context + ": malformed header: " + e.what());
  }
  if (!header.is_object()) throw ParseError(context + ": header is not a JSON object");
  const auto field = [&](const char* key) -> const nlohmann::json& {
    auto it = header.find(key);
    if (it == header.end()) throw ParseError(context + ": header lacks '" + key + "'");
    return *it;
  };
  if (field("dtype") != "f32") throw ParseError(context + ": unsupported dtype " + field("dtype").dump());
  if (field("order") != "row-major") throw ParseError(context + ": unsupported order " + field("order").dump());
  if (field("byte_order") != "little") {
    throw ParseError(context + ": unsupported byte order " + field("byte_order").dump());
  }
  const auto& shape_json = field("shape");
  if (!shape_json.is_array()) throw ParseError(context + ": shape is not a list");
  TensorData t;
  for (const auto& d : shape_json) {
    if (!d.is_number_unsigned()) throw ParseError(context + ": shape entries must be non-negative integers");
    t.shape.push_back(d.get<std::size_t>());
  }
  const std::size_t count = element_count(t.shape);
  const std::size_t payload = bytes.size() - newline - 1;
  if (payload != 4 * count) {
    throw ParseError(context + ": payload holds " + std::to_string(payload) + " bytes, expected " +
                     std::to_string(4 * count));
  }
  t.values.resize(count);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + newline + 1);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(p[4 * i + b]) << (8 * b);
    t.values[i] = std::bit_cast<float>(bits);
  }
  return t;
}

/// Validates the shape before touching the file system.
inline void write_tensor(const std::filesystem::path& path, std::span<const float> values,
                         std::span<const std::size_t> shape) {
  const std::string bytes = encode_tensor(values, shape);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

inline TensorData read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_tensor(bytes, path.string());
}

/// Accepts (C, H, W) as one image or (N, C, H, W) as a batch.
inline std::vector<ImageTensor> to_images(const TensorData& t) {
  std::vector<std::size_t> s = t.shape;
  if (s.size() == 3) s.insert(s.begin(), 1);
  if (s.size() != 4) throw InvalidInput("expected a (N, C, H, W) or (C, H, W) tensor");
  const Shape3 shape{s[1], s[2], s[3]};
  std::vector<ImageTensor> images;
  images.reserve(s[0]);
  for (std::size_t i = 0; i < s[0]; ++i) {
    const auto first = t.values.begin() + static_cast<long>(i * shape.size());
    images.emplace_back(shape, std::vector<double>(first, first + static_cast<long>(shape.size())));
    validate(images.back(), "image");
  }
  return images;
}

inline TensorData from_images(std::span<const ImageTensor> images) {
  require(!images.empty(), "no images to pack");
  const Shape3 shape = images.front().shape();
  TensorData t{{images.size(), shape.channels, shape.height, shape.width}, {}};
  t.values.reserve(images.size() * shape.size());
  for (const auto& img : images) {
    require(img.shape() == shape, "all images in a tensor file must share a shape");
    for (double v : img.values()) t.values.push_back(static_cast<float>(v));
  }
  return t;
}

inline void write_images(const std::filesystem::path& path, std::span<const ImageTensor> images) {
  const TensorData t = from_images(images);
  write_tensor(path, t.values, t.shape);
}

inline std::vector<ImageTensor> read_images(const std::filesystem::path& path) {
  return to_images(read_tensor(path));
}

}  // namespace specrob::io
