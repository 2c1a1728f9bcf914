#include "lsmcf/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "lsmcf/error.hpp"

namespace lsmcf::io {
namespace {

constexpr char kMagic[4] = {'L', 'S', 'M', 'C'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

void put_f64(std::string& out, double x) {
  std::uint64_t v;
  std::memcpy(&v, &x, sizeof v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(byte(pos_ + b)) << (8 * b);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(byte(pos_ + b)) << (8 * b);
    pos_ += 8;
    double x;
    std::memcpy(&x, &v, sizeof x);
    return x;
  }
  bool magic() {
    need(4);
    const bool ok = std::memcmp(data_.data(), kMagic, 4) == 0;
    pos_ += 4;
    return ok;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  unsigned byte(std::size_t i) const { return static_cast<unsigned char>(data_[i]); }
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw Error(ErrorCode::FormatError, "truncated dump");
  }
  std::string data_;
  std::size_t pos_ = 0;
};

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

}  // namespace

std::string fmt(double x) {
  std::array<char, 32> buf;
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), r.ptr);
}

void write_field(const ScalarField& f, const std::filesystem::path& path) {
  const Grid& g = f.grid;
  std::string out(kMagic, 4);
  out.reserve(64 + 8 * f.size());
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(g.dim));
  for (int a = 0; a < g.dim; ++a) put_u32(out, static_cast<std::uint32_t>(g.shape[a]));
  for (int a = 0; a < g.dim; ++a) put_f64(out, g.origin[a]);
  put_f64(out, g.h);
  for (double x : f.values) put_f64(out, x);
  write_bytes(path, out);
}

ScalarField read_field(const std::filesystem::path& path) {
  Reader r(read_bytes(path));
  if (!r.magic()) throw Error(ErrorCode::FormatError, path.string() + " is not an LSMC dump");
  const std::uint32_t version = r.u32();
  if (version != kVersion) throw Error(ErrorCode::FormatError, "unsupported dump version " + std::to_string(version));
  Grid g;
  g.dim = static_cast<int>(r.u32());
  if (g.dim != 2 && g.dim != 3) throw Error(ErrorCode::FormatError, "bad dimension in dump");
  for (int a = 0; a < g.dim; ++a) {
    const std::uint32_t n = r.u32();
    if (n < 1 || n > (1u << 20)) throw Error(ErrorCode::FormatError, "bad shape in dump");
    g.shape[a] = static_cast<int>(n);
  }
  for (int a = 0; a < g.dim; ++a) g.origin[a] = r.f64();
  g.h = r.f64();
  if (!(g.h > 0.0)) throw Error(ErrorCode::FormatError, "bad spacing in dump");
  ScalarField f(g);
  for (double& x : f.values) x = r.f64();
  if (!r.done()) throw Error(ErrorCode::FormatError, "trailing bytes in dump");
  return f;
}

void write_mask(const std::vector<std::uint8_t>& mask, const std::filesystem::path& path) {
  std::string out(mask.size(), '\0');
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] ? 1 : 0;
  write_bytes(path, out);
}

std::vector<std::uint8_t> read_mask(const std::filesystem::path& path, std::size_t expected) {
  const std::string bytes = read_bytes(path);
  if (bytes.size() != expected)
    throw Error(ErrorCode::FormatError, "mask has " + std::to_string(bytes.size()) + " bytes, expected " +
                                            std::to_string(expected));
  std::vector<std::uint8_t> mask(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (bytes[i] != 0 && bytes[i] != 1) throw Error(ErrorCode::FormatError, "mask byte is not 0/1");
    mask[i] = static_cast<std::uint8_t>(bytes[i]);
  }
  return mask;
}

void write_vtk(const FrontMesh& mesh, const std::filesystem::path& path) {
  std::ostringstream s;
  s << "# vtk DataFile Version 3.0\nlsmcf front\nASCII\nDATASET POLYDATA\n";
  s << "POINTS " << mesh.vertices.size() << " double\n";
  for (const Vec& p : mesh.vertices) s << fmt(p[0]) << ' ' << fmt(p[1]) << ' ' << fmt(p[2]) << '\n';
  if (mesh.dim == 2) {
    std::size_t total = 0;
    for (std::size_t l = 0; l < mesh.polylines.size(); ++l)
      total += 1 + mesh.polylines[l].size() + (mesh.closed[l] ? 1 : 0);
    s << "LINES " << mesh.polylines.size() << ' ' << total << '\n';
    for (std::size_t l = 0; l < mesh.polylines.size(); ++l) {
      const auto& line = mesh.polylines[l];
      s << line.size() + (mesh.closed[l] ? 1 : 0);
      for (auto v : line) s << ' ' << v;
      if (mesh.closed[l]) s << ' ' << line.front();
      s << '\n';
    }
  } else {
    s << "POLYGONS " << mesh.triangles.size() << ' ' << 4 * mesh.triangles.size() << '\n';
    for (const auto& t : mesh.triangles) s << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
  write_bytes(path, s.str());
}

void write_mesh_csv(const FrontMesh& mesh, const std::filesystem::path& vertices,
                    const std::filesystem::path& edges) {
  std::ostringstream v;
  v << "id,x,y,z\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec& p = mesh.vertices[i];
    v << i << ',' << fmt(p[0]) << ',' << fmt(p[1]) << ',' << fmt(p[2]) << '\n';
  }
  write_bytes(vertices, v.str());

  std::ostringstream e;
  e << "a,b\n";
  if (mesh.dim == 2) {
    for (std::size_t l = 0; l < mesh.polylines.size(); ++l) {
      const auto& line = mesh.polylines[l];
      for (std::size_t i = 0; i + 1 < line.size(); ++i) e << line[i] << ',' << line[i + 1] << '\n';
      if (mesh.closed[l] && line.size() > 1) e << line.back() << ',' << line.front() << '\n';
    }
  } else {
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (const auto& t : mesh.triangles)
      for (int k = 0; k < 3; ++k) {
        const auto a = t[k], b = t[(k + 1) % 3];
        seen.emplace(std::min(a, b), std::max(a, b));
      }
    for (const auto& [a, b] : seen) e << a << ',' << b << '\n';
  }
  write_bytes(edges, e.str());
}

void write_text(const std::filesystem::path& path, const std::string& text) { write_bytes(path, text); }

std::string read_text(const std::filesystem::path& path) { return read_bytes(path); }

}  // namespace lsmcf::io
