// Copyright 2026 The pmae Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pmae/dataio/dataio.hpp"

namespace pmae {
namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& why) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + why);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  return std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(),
                    [](char a, char b) { return std::tolower(a) == std::tolower(b); });
}

std::size_t ply_type_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" || t == "float32") return 4;
  if (t == "double" || t == "float64") return 8;
  return 0;
}

double read_le(const unsigned char* p, const std::string& t) {
  std::uint64_t bits = 0;
  const std::size_t n = ply_type_size(t);
  for (std::size_t i = 0; i < n; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  if (t == "float" || t == "float32") return std::bit_cast<float>(static_cast<std::uint32_t>(bits));
  if (t == "double" || t == "float64") return std::bit_cast<double>(bits);
  if (t == "char" || t == "int8") return static_cast<std::int8_t>(bits);
  if (t == "short" || t == "int16") return static_cast<std::int16_t>(bits);
  if (t == "int" || t == "int32") return static_cast<std::int32_t>(bits);
  return static_cast<double>(bits);
}

struct PlyProperty {
  std::string name;
  std::string type;
  bool is_list = false;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

}  // namespace

PointCloud load_xyz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  PointCloud cloud;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    Point3 p{};
    for (int d = 0; d < 3; ++d) {
      std::string tok;
      if (!(row >> tok)) parse_fail(path, lineno, "expected at least 3 columns");
      char* end = nullptr;
      p[d] = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') parse_fail(path, lineno, "malformed number '" + tok + "'");
    }
    try {
      cloud.push_back(p);
    } catch (const std::invalid_argument&) {
      parse_fail(path, lineno, "non-finite coordinate");
    }
  }
  if (cloud.empty()) throw std::runtime_error(path + ": no points");
  return cloud;
}

PointCloud load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next_line() || line != "ply") parse_fail(path, 1, "missing 'ply' magic");

  std::string format;
  std::vector<PlyElement> elements;
  for (;;) {
    if (!next_line()) parse_fail(path, lineno, "header ended without end_header");
    std::istringstream hs(line);
    std::string kw;
    hs >> kw;
    if (kw == "end_header") break;
    if (kw.empty() || kw == "comment" || kw == "obj_info") continue;
    if (kw == "format") {
      hs >> format;
      if (format != "ascii" && format != "binary_little_endian") {
        parse_fail(path, lineno, "unsupported format '" + format + "'");
      }
    } else if (kw == "element") {
      PlyElement e;
      if (!(hs >> e.name >> e.count)) parse_fail(path, lineno, "malformed element line");
      elements.push_back(e);
    } else if (kw == "property") {
      if (elements.empty()) parse_fail(path, lineno, "property before any element");
      PlyProperty p;
      std::string type;
      hs >> type;
      if (type == "list") {
        std::string count_type, item_type;
        hs >> count_type >> item_type >> p.name;
        if (!ply_type_size(count_type) || !ply_type_size(item_type)) parse_fail(path, lineno, "bad list types");
        p.is_list = true;
        p.type = count_type + " " + item_type;
      } else {
        if (!ply_type_size(type) || !(hs >> p.name)) parse_fail(path, lineno, "malformed property line");
        p.type = type;
      }
      elements.back().props.push_back(p);
    } else {
      parse_fail(path, lineno, "unknown header keyword '" + kw + "'");
    }
  }
  if (format.empty()) parse_fail(path, lineno, "missing format line");
  const bool binary = format == "binary_little_endian";

  PointCloud cloud;
  for (const PlyElement& e : elements) {
    const bool vertex = e.name == "vertex";
    int xyz[3] = {-1, -1, -1};
    if (vertex) {
      for (std::size_t i = 0; i < e.props.size(); ++i) {
        if (e.props[i].name == "x") xyz[0] = static_cast<int>(i);
        if (e.props[i].name == "y") xyz[1] = static_cast<int>(i);
        if (e.props[i].name == "z") xyz[2] = static_cast<int>(i);
      }
      if (xyz[0] < 0 || xyz[1] < 0 || xyz[2] < 0) parse_fail(path, lineno, "vertex element lacks x, y, z");
    }
    for (std::size_t r = 0; r < e.count; ++r) {
      std::vector<double> vals(e.props.size(), 0.0);
      if (binary) {
        for (std::size_t i = 0; i < e.props.size(); ++i) {
          const PlyProperty& p = e.props[i];
          unsigned char buf[8];
          if (p.is_list) {
            const std::string ct = p.type.substr(0, p.type.find(' '));
            const std::string it = p.type.substr(p.type.find(' ') + 1);
            in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(ply_type_size(ct)));
            const auto n = static_cast<std::size_t>(read_le(buf, ct));
            in.ignore(static_cast<std::streamsize>(n * ply_type_size(it)));
          } else {
            in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(ply_type_size(p.type)));
            vals[i] = read_le(buf, p.type);
          }
          if (!in) throw std::runtime_error(path + ": truncated binary data in element '" + e.name + "' row " +
                                            std::to_string(r));
        }
      } else {
        if (!next_line()) parse_fail(path, lineno, "unexpected end of file in element '" + e.name + "'");
        if (!vertex) continue;
        std::istringstream rs(line);
        for (std::size_t i = 0; i < e.props.size(); ++i) {
          if (e.props[i].is_list) parse_fail(path, lineno, "list properties on vertices are not supported");
          std::string tok;
          if (!(rs >> tok)) parse_fail(path, lineno, "expected " + std::to_string(e.props.size()) + " values");
          char* end = nullptr;
          vals[i] = std::strtod(tok.c_str(), &end);
          if (end == tok.c_str() || *end != '\0') parse_fail(path, lineno, "malformed number '" + tok + "'");
          if (e.props[i].type == "float" || e.props[i].type == "float32") vals[i] = static_cast<float>(vals[i]);
        }
      }
      if (vertex) {
        try {
          cloud.push_back({vals[xyz[0]], vals[xyz[1]], vals[xyz[2]]});
        } catch (const std::invalid_argument&) {
          parse_fail(path, lineno, "non-finite coordinate");
        }
      }
    }
    if (vertex) break;
  }
  if (cloud.empty()) throw std::runtime_error(path + ": no vertices");
  return cloud;
}

PointCloud load_points(const std::string& path) { return ends_with(path, ".ply") ? load_ply(path) : load_xyz(path); }

void save_xyz(const std::string& path, const PointCloud& cloud) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3 p = cloud.point(i);
    std::fprintf(f, "%.17g %.17g %.17g\n", p[0], p[1], p[2]);
  }
  if (std::fclose(f) != 0) throw std::runtime_error("write failed for " + path);
}

void save_ply(const std::string& path, const std::vector<ColoredCloud>& clouds) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  std::size_t total = 0;
  for (const ColoredCloud& c : clouds) total += c.cloud.size();
  std::fprintf(f,
               "ply\nformat ascii 1.0\nelement vertex %zu\nproperty float x\nproperty float y\nproperty float z\n"
               "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n",
               total);
  for (const ColoredCloud& c : clouds) {
    for (std::size_t i = 0; i < c.cloud.size(); ++i) {
      const Point3 p = c.cloud.point(i);
      std::fprintf(f, "%.9g %.9g %.9g %u %u %u\n", static_cast<double>(static_cast<float>(p[0])),
                   static_cast<double>(static_cast<float>(p[1])), static_cast<double>(static_cast<float>(p[2])),
                   c.rgb[0], c.rgb[1], c.rgb[2]);
    }
  }
  if (std::fclose(f) != 0) throw std::runtime_error("write failed for " + path);
}

}  // namespace pmae
