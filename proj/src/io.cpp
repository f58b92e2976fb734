// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mcflow/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"

#include "mcflow/error.hpp"

namespace mcflow::io {
namespace {

int parse_obj_index(const std::string& token, std::size_t vertex_count) {
  std::string head = token.substr(0, token.find('/'));
  long idx = 0;
  try {
    idx = std::stol(head);
  } catch (const std::exception&) {
    raise(ErrorKind::Io, "bad face index '" + token + "'");
  }
  if (idx < 0) idx += static_cast<long>(vertex_count) + 1;
  if (idx < 1 || static_cast<std::size_t>(idx) > vertex_count)
    raise(ErrorKind::Io, "face index out of range '" + token + "'");
  return static_cast<int>(idx - 1);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) raise(ErrorKind::Io, "write failed for " + path.string());
}

DiscreteHypersurface read_obj(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::vector<Vec3> positions;
  FaceList faces;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) raise(ErrorKind::Io, "malformed vertex line: " + line);
      positions.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<std::string> tokens;
      std::string tok;
      while (ls >> tok) tokens.push_back(tok);
      if (tokens.size() != 3) raise(ErrorKind::Io, "only triangular faces are supported: " + line);
      Face f{};
      for (int k = 0; k < 3; ++k) f[k] = parse_obj_index(tokens[k], positions.size());
      faces.push_back(f);
    }
  }
  if (faces.empty()) raise(ErrorKind::Io, path.string() + " has no faces");
  return DiscreteHypersurface::mesh(std::move(positions), std::move(faces));
}

void write_obj(const std::filesystem::path& path, const DiscreteHypersurface& mesh) {
  if (mesh.dimension() != 2) raise(ErrorKind::InvalidArgument, "OBJ output needs a triangle mesh");
  std::string out;
  out.reserve(mesh.vertex_count() * 64 + mesh.faces().size() * 24);
  for (const auto& p : mesh.positions())
    out += "v " + format_double(p.x()) + " " + format_double(p.y()) + " " + format_double(p.z()) + "\n";
  for (const auto& f : mesh.faces())
    out += "f " + std::to_string(f[0] + 1) + " " + std::to_string(f[1] + 1) + " " +
           std::to_string(f[2] + 1) + "\n";
  write_text(path, out);
}

DiscreteHypersurface read_curve_json(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::Io, path.string() + ": " + e.what());
  }
  if (!doc.is_array()) raise(ErrorKind::Io, "curve JSON must be an array of [x, y] points");
  std::vector<Vec3> pts;
  for (const auto& p : doc) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      raise(ErrorKind::Io, "curve point must be [x, y]");
    pts.emplace_back(p[0].get<double>(), p[1].get<double>(), 0.0);
  }
  return DiscreteHypersurface::curve(std::move(pts));
}

void write_curve_json(const std::filesystem::path& path, const DiscreteHypersurface& curve) {
  if (curve.dimension() != 1) raise(ErrorKind::InvalidArgument, "curve JSON output needs a curve");
  std::string out = "[";
  bool first = true;
  for (const auto& p : curve.positions()) {
    out += first ? "\n" : ",\n";
    out += "[" + format_double(p.x()) + ", " + format_double(p.y()) + "]";
    first = false;
  }
  out += "\n]\n";
  write_text(path, out);
}

DiscreteHypersurface read_surface(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".obj") return read_obj(path);
  if (ext == ".json") return read_curve_json(path);
  raise(ErrorKind::Io, "unknown surface format: " + path.string());
}

void write_surface(const std::filesystem::path& path, const DiscreteHypersurface& surface) {
  if (surface.dimension() == 2)
    write_obj(path, surface);
  else
    write_curve_json(path, surface);
}

std::string surface_extension(int dimension) { return dimension == 2 ? ".obj" : ".curve.json"; }

ScalarField read_field_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      values.push_back(std::stod(line));
    } catch (const std::exception&) {
      raise(ErrorKind::Io, "bad field value '" + line + "'");
    }
  }
  return ScalarField(std::move(values));
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& field) {
  std::string out;
  for (double v : field.values()) out += format_double(v) + "\n";
  write_text(path, out);
}

std::string sha256_file(const std::filesystem::path& path) {
  std::string bytes = read_text(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    raise(ErrorKind::Io, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

}  // namespace mcflow::io
