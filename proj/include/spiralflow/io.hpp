#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <span>
#include <sstream>
#include <string>

#include "spiralflow/analysis.hpp"
#include "spiralflow/errors.hpp"
#include "spiralflow/extraction.hpp"
#include "spiralflow/geometry.hpp"
#include "spiralflow/run.hpp"
#include "spiralflow/theta.hpp"

namespace spiralflow {

//! Round-trip decimal form of a double ("nan" for NaN).
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SnapshotIOFailure("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw SnapshotIOFailure("failed writing " + path.string());
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw SnapshotIOFailure("cannot create output directory " + dir.string());
}

//! Header `t,S,min_u,sup_grad,sup_ut,S_over_t`; S_over_t is nan at t = 0.
inline std::string diagnostics_csv(const Diagnostics& d) {
  std::string out = "t,S,min_u,sup_grad,sup_ut,S_over_t\n";
  for (const DiagnosticSample& s : d.samples) {
    out += format_number(s.t) + ',' + format_number(s.S) + ',' + format_number(s.min_u) + ',' +
           format_number(s.sup_grad) + ',' + format_number(s.sup_ut) + ',' +
           format_number(s.t > 0.0 ? s.S / s.t : std::nan("")) + '\n';
  }
  return out;
}

namespace detail {

inline std::string vtk_header(const Grid& g, const std::string& title) {
  std::ostringstream ss;
  ss << "# vtk DataFile Version 3.0\n"
     << title << "\nASCII\nDATASET STRUCTURED_POINTS\n"
     << "DIMENSIONS " << g.nx << ' ' << g.ny << " 1\n"
     << "SPACING " << format_number(g.h) << ' ' << format_number(g.h) << " 1\n"
     << "ORIGIN " << format_number(g.position(0).x) << ' ' << format_number(g.position(0).y) << " 0\n"
     << "POINT_DATA " << g.size() << '\n';
  return ss.str();
}

template <class F>
void vtk_scalars(std::string& out, const std::string& name, const char* type, std::size_t n, F value) {
  out += "SCALARS " + name + ' ' + type + " 1\nLOOKUP_TABLE default\n";
  for (std::size_t k = 0; k < n; ++k) {
    out += value(k);
    out += '\n';
  }
}

}  // namespace detail

//! VTK legacy STRUCTURED_POINTS with fields u, u_minus_theta_mod2pi and mask
//! (the NodeKind code: 0 interior, 1 outer ghost, 2 hole ghost, 3 mask ghost, 4 exterior).
inline std::string vtk_snapshot(const Grid& g, const ScalarField& u, const ThetaField& theta, double t) {
  std::string out = detail::vtk_header(g, "spiralflow u t=" + format_number(t));
  const double two_pi = 2.0 * std::numbers::pi;
  detail::vtk_scalars(out, "u", "double", g.size(), [&](std::size_t k) {
    return format_number(g.has_value(static_cast<int>(k)) ? u[k] : 0.0);
  });
  detail::vtk_scalars(out, "u_minus_theta_mod2pi", "double", g.size(), [&](std::size_t k) {
    if (!g.has_value(static_cast<int>(k))) return format_number(0.0);
    double r = std::fmod(u[k] - theta.principal()[k], two_pi);
    if (r < 0.0) r += two_pi;
    return format_number(r);
  });
  detail::vtk_scalars(out, "mask", "int", g.size(),
                      [&](std::size_t k) { return std::to_string(static_cast<int>(g.kind[k])); });
  return out;
}

//! Height map as VTK fields k (winding index) and height.
inline std::string vtk_heights(const Grid& g, const HeightMap& hm) {
  std::string out = detail::vtk_header(g, "spiralflow height t=" + format_number(hm.t));
  detail::vtk_scalars(out, "k", "int", g.size(), [&](std::size_t k) { return std::to_string(hm.k[k]); });
  detail::vtk_scalars(out, "height", "double", g.size(),
                      [&](std::size_t k) { return format_number(hm.height[k]); });
  return out;
}

//! `curve_id,point_index,x,y,t`; ids run consecutively over all curves.
inline std::string spirals_csv(std::span<const SpiralCurve> curves) {
  std::string out = "curve_id,point_index,x,y,t\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const SpiralCurve& cv = curves[c];
    for (std::size_t i = 0; i < cv.points.size(); ++i) {
      out += std::to_string(c) + ',' + std::to_string(i) + ',' + format_number(cv.points[i].x) + ',' +
             format_number(cv.points[i].y) + ',' + format_number(cv.t) + '\n';
    }
  }
  return out;
}

}  // namespace spiralflow
