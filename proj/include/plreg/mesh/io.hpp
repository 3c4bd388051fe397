#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

#include "plreg/mesh/grid.hpp"

namespace plreg {

// Field file: one text header line
//   dim h dt nx [ny] nt x_lo [y_lo] t_lo
// followed by the raw column of 64-bit floats in node order.
inline void write_field(const std::string& path, const GridFunction& f) {
  const auto& g = f.grid();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_field: cannot open " + path);
  os << std::setprecision(17) << g.dim() << ' ' << g.h() << ' ' << g.dt()
     << ' ' << g.nx(0);
  if (g.dim() == 2) os << ' ' << g.nx(1);
  os << ' ' << g.nt() << ' ' << g.x_lo(0);
  if (g.dim() == 2) os << ' ' << g.x_lo(1);
  os << ' ' << g.t_lo() << '\n';
  os.write(reinterpret_cast<const char*>(f.values().data()),
           static_cast<std::streamsize>(f.values().size() * sizeof(double)));
  if (!os) throw std::runtime_error("write_field: short write to " + path);
}

inline GridFunction read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_field: cannot open " + path);
  std::string header;
  std::getline(is, header);
  std::istringstream hs(header);
  int dim = 0;
  double h = 0, dt = 0;
  if (!(hs >> dim >> h >> dt))
    throw std::runtime_error("read_field: bad header in " + path);
  int nx = 0, ny = 0, nt = 0;
  double x_lo = 0, y_lo = 0, t_lo = 0;
  if (dim == 1) {
    if (!(hs >> nx >> nt >> x_lo >> t_lo))
      throw std::runtime_error("read_field: bad header in " + path);
  } else if (dim == 2) {
    if (!(hs >> nx >> ny >> nt >> x_lo >> y_lo >> t_lo))
      throw std::runtime_error("read_field: bad header in " + path);
  } else {
    throw std::runtime_error("read_field: unsupported dim in " + path);
  }
  auto grid = share(dim == 1
                        ? SpaceTimeGrid::make_1d(h, dt, x_lo, x_lo + (nx - 1) * h,
                                                 t_lo, t_lo + (nt - 1) * dt)
                        : SpaceTimeGrid::make_2d(h, dt, x_lo, x_lo + (nx - 1) * h,
                                                 y_lo, y_lo + (ny - 1) * h, t_lo,
                                                 t_lo + (nt - 1) * dt));
  std::vector<double> vals(static_cast<std::size_t>(grid->total_nodes()));
  is.read(reinterpret_cast<char*>(vals.data()),
          static_cast<std::streamsize>(vals.size() * sizeof(double)));
  if (!is) throw std::runtime_error("read_field: short read from " + path);
  return GridFunction(grid, std::move(vals));
}

// CSV export, one node per row: coordinates then value.
inline void write_field_csv(const std::string& path, const GridFunction& f) {
  const auto& g = f.grid();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_field_csv: cannot open " + path);
  os << std::setprecision(17);
  os << (g.dim() == 2 ? "x,y,t,value\n" : "x,t,value\n");
  for (int it = 0; it < g.nt(); ++it)
    for (int iy = 0; iy < (g.dim() == 2 ? g.nx(1) : 1); ++iy)
      for (int ix = 0; ix < g.nx(0); ++ix) {
        os << g.x(0, ix) << ',';
        if (g.dim() == 2) os << g.x(1, iy) << ',';
        os << g.t(it) << ',' << f.at(it, ix, iy) << '\n';
      }
}

}  // namespace plreg
