/* Copyright 2026 The lmh-brtf Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// NPY v1.0 reader/writer for column-major (fortran_order) float64 and
// complex128 arrays.

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <regex>
#include <string>
#include <variant>
#include <vector>

#include "lmhbrtf/error.hpp"
#include "lmhbrtf/tensor.hpp"

namespace lmhbrtf::npy {

static_assert(std::endian::native == std::endian::little,
              "NPY support assumes a little-endian host");

inline constexpr char kMagic[] = "\x93NUMPY";
inline constexpr std::size_t kMagicLen = 6;
inline constexpr std::size_t kAlign = 64;

enum class DType { kFloat64, kComplex128 };

struct Header {
  DType dtype = DType::kFloat64;
  bool fortran_order = true;
  Shape shape;
};

inline const char* descr(DType t) { return t == DType::kFloat64 ? "<f8" : "<c16"; }

/// Header dict padded with spaces and a final newline so that the data starts
/// at a multiple of 64 bytes.
inline std::string encode_header(const Header& h) {
  std::string dict = "{'descr': '";
  dict += descr(h.dtype);
  dict += "', 'fortran_order': ";
  dict += h.fortran_order ? "True" : "False";
  dict += ", 'shape': (";
  for (std::size_t i = 0; i < h.shape.size(); ++i) {
    dict += std::to_string(h.shape[i]);
    if (h.shape.size() == 1 || i + 1 < h.shape.size()) dict += ",";
    if (i + 1 < h.shape.size()) dict += " ";
  }
  dict += "), }";
  const std::size_t preamble = kMagicLen + 2 + 2;
  std::size_t total = preamble + dict.size() + 1;
  const std::size_t pad = (kAlign - total % kAlign) % kAlign;
  dict.append(pad, ' ');
  dict += '\n';
  if (dict.size() > 0xFFFF) throw IoError("NPY header too long for format version 1.0");
  std::string out(kMagic, kMagicLen);
  out += static_cast<char>(1);
  out += static_cast<char>(0);
  const auto len = static_cast<std::uint16_t>(dict.size());
  out += static_cast<char>(len & 0xFF);
  out += static_cast<char>(len >> 8);
  out += dict;
  return out;
}

inline Header parse_header_dict(const std::string& dict, const std::string& path) {
  auto fail = [&](const std::string& why) -> Header {
    throw IoError(path + ": malformed NPY header (" + why + ")");
  };
  Header h;
  std::smatch m;
  static const std::regex re_descr(R"('descr'\s*:\s*'([^']*)')");
  static const std::regex re_order(R"('fortran_order'\s*:\s*(True|False))");
  static const std::regex re_shape(R"('shape'\s*:\s*\(([^)]*)\))");
  if (!std::regex_search(dict, m, re_descr)) return fail("no descr");
  const std::string d = m[1];
  if (d == "<f8")
    h.dtype = DType::kFloat64;
  else if (d == "<c16")
    h.dtype = DType::kComplex128;
  else
    throw IoError(path + ": unsupported dtype '" + d + "' (expected <f8 or <c16)");
  if (!std::regex_search(dict, m, re_order)) return fail("no fortran_order");
  h.fortran_order = m[1] == "True";
  if (!std::regex_search(dict, m, re_shape)) return fail("no shape");
  const std::string dims = m[1];
  static const std::regex re_int(R"(\s*(\d+)\s*(,|$))");
  std::size_t consumed = 0;
  for (std::sregex_iterator it(dims.begin(), dims.end(), re_int), end; it != end; ++it) {
    if (static_cast<std::size_t>(it->position()) != consumed) return fail("bad shape tuple");
    h.shape.push_back(static_cast<std::size_t>(std::stoull((*it)[1])));
    consumed += static_cast<std::size_t>(it->length());
  }
  if (dims.find_first_not_of(" \t", consumed) != std::string::npos) return fail("bad shape tuple");
  return h;
}

/// Raw array read from disk; exactly one of `real` / `complex` is filled.
struct Array {
  Header header;
  std::vector<double> real;
  std::vector<cplx> complex;
};

inline Array read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  char pre[10];
  if (!in.read(pre, 10) || std::memcmp(pre, kMagic, kMagicLen) != 0)
    throw IoError(path + ": not an NPY file");
  if (pre[6] != 1 || pre[7] != 0)
    throw IoError(path + ": unsupported NPY version " + std::to_string(int(pre[6])) + "." +
                  std::to_string(int(pre[7])) + " (expected 1.0)");
  const std::size_t hlen = static_cast<unsigned char>(pre[8]) |
                           (static_cast<std::size_t>(static_cast<unsigned char>(pre[9])) << 8);
  std::string dict(hlen, '\0');
  if (!in.read(dict.data(), static_cast<std::streamsize>(hlen)))
    throw IoError(path + ": truncated NPY header");
  Array a;
  a.header = parse_header_dict(dict, path);
  if (!a.header.fortran_order)
    throw IoError(path + ": C-order (fortran_order False) arrays are not supported; "
                  "save with fortran_order=True");
  std::size_t n = 1;
  for (auto d : a.header.shape) n *= d;
  auto load = [&](auto& vec) {
    vec.resize(n);
    const auto bytes = static_cast<std::streamsize>(n * sizeof(vec[0]));
    if (!in.read(reinterpret_cast<char*>(vec.data()), bytes))
      throw IoError(path + ": truncated NPY data");
  };
  if (a.header.dtype == DType::kFloat64)
    load(a.real);
  else
    load(a.complex);
  return a;
}

template <class Scalar>
void write(const std::string& path, const Shape& shape, const std::vector<Scalar>& data) {
  static_assert(std::is_same_v<Scalar, double> || std::is_same_v<Scalar, cplx>);
  Header h;
  h.dtype = std::is_same_v<Scalar, double> ? DType::kFloat64 : DType::kComplex128;
  h.shape = shape;
  const std::string head = encode_header(h);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(Scalar)));
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace lmhbrtf::npy

namespace lmhbrtf {

/// Reads a real tensor. Arrays of order below 3 get trailing singleton modes.
inline RealTensor read_tensor(const std::string& path) {
  npy::Array a = npy::read(path);
  if (a.header.dtype != npy::DType::kFloat64)
    throw IoError(path + ": expected a real <f8 array, found complex <c16");
  Shape s = a.header.shape;
  if (s.empty()) throw IoError(path + ": scalar arrays are not tensors");
  while (s.size() < 3) s.push_back(1);
  return RealTensor(std::move(s), std::move(a.real));
}

inline ComplexTensor read_complex_tensor(const std::string& path) {
  npy::Array a = npy::read(path);
  Shape s = a.header.shape;
  if (s.empty()) throw IoError(path + ": scalar arrays are not tensors");
  while (s.size() < 3) s.push_back(1);
  if (a.header.dtype == npy::DType::kComplex128) return ComplexTensor(std::move(s), std::move(a.complex));
  return RealTensor(std::move(s), std::move(a.real)).to_complex();
}

template <class Scalar>
void write_tensor(const std::string& path, const DenseTensor<Scalar>& x) {
  npy::write(path, x.shape(), x.storage());
}

/// Loads an explicit square matrix (order-2 NPY, real or complex).
inline MatrixXcd read_matrix(const std::string& path) {
  npy::Array a = npy::read(path);
  if (a.header.shape.size() != 2) throw IoError(path + ": expected a 2-D array");
  const auto r = static_cast<Eigen::Index>(a.header.shape[0]);
  const auto c = static_cast<Eigen::Index>(a.header.shape[1]);
  if (a.header.dtype == npy::DType::kFloat64)
    return Eigen::Map<const Eigen::MatrixXd>(a.real.data(), r, c).cast<cplx>();
  return Eigen::Map<const MatrixXcd>(a.complex.data(), r, c);
}

}  // namespace lmhbrtf
