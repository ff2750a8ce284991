#include "trisolve/discrete_io.hpp"

#include "trisolve/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace trisolve {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'D', 'F'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw ParameterError("binary solution file is truncated");
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

} // namespace

void write_binary(const DiscreteFunction& u, std::ostream& out) {
  const Mesh& m = u.mesh();
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.dim()));
  for (int k = 0; k < m.dim(); ++k)
    put<std::uint32_t>(out, static_cast<std::uint32_t>(m.divisions[static_cast<std::size_t>(k)]));
  for (int k = 0; k < m.dim(); ++k)
    put<double>(out, m.box.extents[static_cast<std::size_t>(k)]);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(u.values().size()));
  for (Eigen::Index i = 0; i < u.values().size(); ++i)
    put<double>(out, u.values()[i]);
}

DiscreteFunction read_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw ParameterError("not a binary solution file (bad magic)");
  if (get<std::uint32_t>(in) != kVersion)
    throw ParameterError("unsupported binary solution version");
  const auto dim = static_cast<int>(get<std::uint32_t>(in));
  if (dim != 2 && dim != 3)
    throw ParameterError("binary solution file: dimension must be 2 or 3");
  std::vector<int> divisions(static_cast<std::size_t>(dim));
  std::vector<double> extents(static_cast<std::size_t>(dim));
  for (auto& d : divisions)
    d = static_cast<int>(get<std::uint32_t>(in));
  for (auto& e : extents)
    e = get<double>(in);
  auto mesh = std::make_shared<const Mesh>(build_box_mesh(dim, divisions, extents));
  const auto count = get<std::uint64_t>(in);
  if (count != mesh->n_vertices())
    throw ParameterError("binary solution file: value count does not match the mesh");
  Vector values(static_cast<Eigen::Index>(count));
  for (Eigen::Index i = 0; i < values.size(); ++i)
    values[i] = get<double>(in);
  return DiscreteFunction(std::move(mesh), std::move(values));
}

void save_binary(const DiscreteFunction& u, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ParameterError("cannot open '" + path + "' for writing");
  write_binary(u, out);
}

DiscreteFunction load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ParameterError("cannot open '" + path + "'");
  return read_binary(in);
}

void write_csv(const DiscreteFunction& u, std::ostream& out) {
  const Mesh& m = u.mesh();
  out << (m.dim() == 2 ? "x,y,u\n" : "x,y,z,u\n");
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  };
  for (std::size_t i = 0; i < m.n_vertices(); ++i) {
    const Point& x = m.vertices[i];
    out << num(x[0]) << ',' << num(x[1]);
    if (m.dim() == 3)
      out << ',' << num(x[2]);
    out << ',' << num(u.values()[static_cast<Eigen::Index>(i)]) << '\n';
  }
}

} // namespace trisolve
