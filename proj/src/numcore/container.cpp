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

#include "pmae/numcore/container.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace pmae {
namespace {

constexpr std::array<char, 8> kMagic = {'P', 'M', 'A', 'E', 'C', 'K', 'P', 'T'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> buf{};
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> buf{};
  in.read(reinterpret_cast<char*>(buf.data()), 8);
  if (!in) throw std::runtime_error("container: truncated length field");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

void write_container(std::ostream& out, const nlohmann::json& meta,
                     const std::vector<std::pair<std::string, const Tensor*>>& tensors) {
  nlohmann::json header = meta;
  header["tensors"] = nlohmann::json::array();
  for (const auto& [name, t] : tensors) header["tensors"].push_back({{"name", name}, {"shape", t->shape()}});
  const std::string text = header.dump();
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  std::vector<char> buf;
  for (const auto& entry : tensors) {
    const Tensor& t = *entry.second;
    buf.resize(t.numel() * 8);
    for (std::size_t i = 0; i < t.numel(); ++i) {
      const auto bits = std::bit_cast<std::uint64_t>(t[i]);
      for (int b = 0; b < 8; ++b) buf[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw std::runtime_error("container: write failed");
}

Container read_container(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("container: bad magic");
  const std::uint64_t len = get_u64(in);
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw std::runtime_error("container: truncated header");
  Container c;
  c.meta = nlohmann::json::parse(text);
  const nlohmann::json table = c.meta.at("tensors");
  c.meta.erase("tensors");
  std::vector<unsigned char> buf;
  for (const auto& entry : table) {
    Shape shape = entry.at("shape").get<Shape>();
    Tensor t(shape);
    buf.resize(t.numel() * 8);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!in) throw std::runtime_error("container: truncated payload for " + entry.at("name").get<std::string>());
    for (std::size_t i = 0; i < t.numel(); ++i) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[i * 8 + b]) << (8 * b);
      t[i] = std::bit_cast<double>(bits);
    }
    c.tensors.emplace_back(entry.at("name").get<std::string>(), std::move(t));
  }
  return c;
}

void write_container_file(const std::string& path, const nlohmann::json& meta,
                          const std::vector<std::pair<std::string, const Tensor*>>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("container: cannot open " + path + " for writing");
  write_container(out, meta, tensors);
}

Container read_container_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("container: cannot open " + path);
  return read_container(in);
}

}  // namespace pmae
