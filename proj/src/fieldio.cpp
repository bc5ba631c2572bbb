#include "glc/fieldio.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace glc {

namespace {

constexpr char kMagic[4] = {'G', 'L', 'C', 'F'};
constexpr std::uint32_t kVersion = 1;

struct Header {
  std::uint32_t dim = 0, nx = 0, ny = 0, nt = 0;
  double dx = 0, dy = 0, dt = 0;
  double lo[2] = {0, 0}, hi[2] = {0, 0};
  double horizon = 0;
};

template <class T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void get(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void write_field_binary(const Trajectory& z, const std::string& path) {
  const Grid& g = z.grid();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_field_binary: cannot open " + path);
  os.write(kMagic, 4);
  put(os, kVersion);
  Header h;
  h.dim = static_cast<std::uint32_t>(g.dim());
  h.nx = static_cast<std::uint32_t>(g.nx);
  h.ny = static_cast<std::uint32_t>(g.ny);
  h.nt = static_cast<std::uint32_t>(g.nt);
  h.dx = g.dx;
  h.dy = g.dy;
  h.dt = g.dt;
  h.lo[0] = g.domain.lo[0];
  h.hi[0] = g.domain.hi[0];
  if (g.dim() == 2) {
    h.lo[1] = g.domain.lo[1];
    h.hi[1] = g.domain.hi[1];
  }
  h.horizon = g.domain.horizon;
  put(os, h);
  for (const Complex& c : z.raw()) {
    put(os, c.real());
    put(os, c.imag());
  }
  if (!os) throw std::runtime_error("write_field_binary: write failed for " + path);
}

Trajectory read_field_binary(const std::string& path, const DomainSpec* domain) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_field_binary: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("read_field_binary: bad magic in " + path);
  std::uint32_t version = 0;
  get(is, version);
  if (version != kVersion) throw std::runtime_error("read_field_binary: unsupported version");
  Header h;
  get(is, h);

  DomainSpec dom;
  if (domain != nullptr) {
    dom = *domain;
    if (static_cast<std::uint32_t>(dom.dimension) != h.dim)
      throw std::runtime_error("read_field_binary: dimension mismatch");
  } else {
    dom.dimension = static_cast<int>(h.dim);
    dom.lo = {h.lo[0]};
    dom.hi = {h.hi[0]};
    if (h.dim == 2) {
      dom.lo.push_back(h.lo[1]);
      dom.hi.push_back(h.hi[1]);
    }
    dom.horizon = h.horizon;
    dom.omega = Box{dom.lo, dom.hi};
    dom.omega0.lo.resize(dom.lo.size());
    dom.omega0.hi.resize(dom.lo.size());
    for (size_t i = 0; i < dom.lo.size(); ++i) {
      double c = 0.5 * (dom.lo[i] + dom.hi[i]);
      double q = 0.25 * (dom.hi[i] - dom.lo[i]);
      dom.omega0.lo[i] = c - q;
      dom.omega0.hi[i] = c + q;
    }
  }
  Grid g = (h.dim == 1) ? Grid::make(dom, static_cast<int>(h.nx), static_cast<int>(h.nt))
                        : Grid::make(dom, static_cast<int>(h.nx), static_cast<int>(h.ny),
                                     static_cast<int>(h.nt));
  Trajectory z(g);
  for (Complex& c : z.raw()) {
    double re = 0, im = 0;
    get(is, re);
    get(is, im);
    c = Complex(re, im);
  }
  if (!is) throw std::runtime_error("read_field_binary: truncated file " + path);
  return z;
}

void write_field_csv(const Trajectory& z, const std::string& path) {
  const Grid& g = z.grid();
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw std::runtime_error("write_field_csv: cannot open " + path);
  if (g.dim() == 1)
    std::fprintf(f, "t,x,re,im\n");
  else
    std::fprintf(f, "t,x,y,re,im\n");
  double x[2];
  for (int lev = 0; lev <= g.nt; ++lev) {
    for (int i = 0; i < g.num_nodes(); ++i) {
      g.node_coords(i, x);
      Complex c = z.at(lev, i);
      if (g.dim() == 1)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", g.time(lev), x[0], c.real(), c.imag());
      else
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", g.time(lev), x[0], x[1], c.real(),
                     c.imag());
    }
  }
  std::fclose(f);
}

}  // namespace glc
