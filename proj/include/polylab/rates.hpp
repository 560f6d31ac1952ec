// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "logmath.hpp"

namespace polylab {

// Linear-scale SRW rate function.
inline double kappa(double t) {
  if (t < 0.0) throw ParameterError("kappa needs t >= 0");
  if (t > 1.0) return pos_inf;
  if (t == 1.0) return std::numbers::ln2;
  return 0.5 * (1.0 + t) * std::log1p(t) + 0.5 * (1.0 - t) * std::log1p(-t);
}

// Stretching cost of a range covering [u, v].
inline double rate_I(double u, double v) {
  if (u > 0.0 || v < 0.0) throw ParameterError("rate_I needs u <= 0 <= v");
  double s = std::min(std::fabs(u), std::fabs(v)) + v - u;
  return 0.5 * s * s;
}

// Folding cost of a range confined to [u, v].
inline double rate_Ibar(double u, double v) {
  if (u > 0.0 || v < 0.0) throw ParameterError("rate_Ibar needs u <= 0 <= v");
  double w = v - u;
  if (w == 0.0) return pos_inf;
  return std::numbers::pi * std::numbers::pi / (2.0 * w * w);
}

inline double entropic_cost_exponent(double xi) {
  if (xi < 0.0 || xi > 1.0) throw ParameterError("xi must lie in [0,1]");
  return std::fabs(2.0 * xi - 1.0);
}

enum class Region { R1, R2, R3, R4, R5, R6, R4t, R5t, BoundaryR4tR5t, OtherBoundary };

inline std::string region_name(Region r) {
  switch (r) {
    case Region::R1: return "R1";
    case Region::R2: return "R2";
    case Region::R3: return "R3";
    case Region::R4: return "R4";
    case Region::R5: return "R5";
    case Region::R6: return "R6";
    case Region::R4t: return "R4~";
    case Region::R5t: return "R5~";
    case Region::BoundaryR4tR5t: return "R4~/R5~";
    case Region::OtherBoundary: return "boundary";
  }
  return "?";
}

inline Region region_from_name(const std::string& s) {
  for (Region r : {Region::R1, Region::R2, Region::R3, Region::R4, Region::R5, Region::R6, Region::R4t, Region::R5t,
                   Region::BoundaryR4tR5t, Region::OtherBoundary})
    if (region_name(r) == s) return r;
  throw ParameterError("unknown region " + s);
}

inline std::string limit_descriptor(Region r) {
  switch (r) {
    case Region::R1: return "unity";
    case Region::R2: return "W_R2";
    case Region::R3: return "W_R3";
    case Region::R4: return "W_R4";
    case Region::R5: return "-(3/2)(h pi)^(2/3)";
    case Region::R6: return "-2h";
    case Region::R4t: return "h^2/2";
    case Region::R5t: return "|h|";
    case Region::BoundaryR4tR5t: return "log cosh|h|";
    case Region::OtherBoundary: return "none";
  }
  return "none";
}

// Which of the five phase diagrams applies.
enum class Diagram { Fig1, Fig2, Fig3, Fig4, Fig5 };

struct RegionLabel {
  Region region = Region::OtherBoundary;
  Diagram diagram = Diagram::Fig1;
  double xi = std::numeric_limits<double>::quiet_NaN();
  double theta = std::numeric_limits<double>::quiet_NaN();  // log Z grows like N^theta
  std::string descriptor;
  std::vector<Region> adjacent;  // filled for boundary points
};

inline constexpr double boundary_slack = 1e-12;

namespace detail {

// lhs - rhs; comparing two disabled (infinite) couplings is undecidable and yields NaN
inline double gap(double lhs, double rhs) { return lhs - rhs; }

struct Conditions {
  Region region;
  std::vector<double> margins;  // each must be > 0
};

inline Diagram pick_diagram(double alpha, double h_sign) {
  if (h_sign < 0) return alpha > 0.5 ? Diagram::Fig4 : Diagram::Fig5;
  if (alpha > 1.0) return Diagram::Fig1;
  if (alpha > 0.5) return Diagram::Fig2;
  return Diagram::Fig3;
}

// One inequality table per figure. Margins are positive inside the open region;
// a disjunction contributes the larger of its two margins.
inline std::vector<Conditions> region_table(Diagram d, double a, double g, double z) {
  const double c = (1.0 - a) / a;  // -(alpha-1)/alpha
  // the two slanted lines; both pass through zeta = 1/2
  const double l1 = std::isinf(z) ? z : ((2 * a - 1) * z - (a - 1)) / a;
  const double l2 = std::isinf(z) ? z : ((2 * a + 1) * z - (a - 1)) / (3 * a);
  const double zc = z + c;  // zeta - (alpha-1)/alpha
  using detail::gap;
  std::vector<Conditions> t;
  switch (d) {
    case Diagram::Fig1:
      t.push_back({Region::R1, {gap(g, 1 / (2 * a)), gap(z, 0.5)}});
      t.push_back({Region::R2, {gap(g, c), gap(l1, g), gap(1 / (2 * a), g)}});
      t.push_back({Region::R3, {gap(c, g), gap(zc, g)}});
      t.push_back({Region::R4, {gap(g, l1), gap(g, zc), gap(l2, g), gap(z, g)}});
      t.push_back({Region::R5, {gap(g, l2), gap(z, -1.0), gap(0.5, z)}});
      t.push_back({Region::R6, {gap(g, z), gap(-1.0, z)}});
      break;
    case Diagram::Fig2:
      t.push_back({Region::R1, {gap(g, 1 / (2 * a)), gap(z, 0.5)}});
      t.push_back({Region::R2, {gap(g, c), gap(l1, g), gap(1 / (2 * a), g)}});
      t.push_back({Region::R3, {gap(c, g), gap(zc, g)}});
      t.push_back({Region::R5, {std::max(gap(g, l1), gap(g, zc)), gap(z, -1.0), gap(0.5, z)}});
      t.push_back({Region::R6, {gap(g, zc), gap(-1.0, z)}});
      break;
    case Diagram::Fig3:
      t.push_back({Region::R1, {gap(g, c), gap(z, 0.5)}});
      t.push_back({Region::R3, {gap(c, g), gap(zc, g)}});
      t.push_back({Region::R5, {std::max(gap(g, c), gap(g, zc)), gap(z, -1.0), gap(0.5, z)}});
      t.push_back({Region::R6, {gap(g, zc), gap(-1.0, z)}});
      break;
    case Diagram::Fig4:
      t.push_back({Region::R1, {gap(g, 1 / (2 * a)), gap(z, 0.5)}});
      t.push_back({Region::R2, {gap(g, c), gap(l1, g), gap(1 / (2 * a), g)}});
      t.push_back({Region::R3, {gap(zc, g), gap(c, g)}});
      t.push_back({Region::R4t, {gap(g, l1), gap(g, c), gap(z, 0.0), gap(0.5, z)}});
      t.push_back({Region::R5t, {gap(g, zc), gap(0.0, z)}});
      break;
    case Diagram::Fig5:
      t.push_back({Region::R1, {gap(g, c), gap(z, 0.5)}});
      t.push_back({Region::R3, {gap(c, g), gap(zc, g)}});
      t.push_back({Region::R4t, {gap(g, c), gap(z, 0.0), gap(0.5, z)}});
      t.push_back({Region::R5t, {gap(g, zc), gap(0.0, z)}});
      break;
  }
  return t;
}

inline double min_margin(const Conditions& c) {
  double m = pos_inf;
  for (double x : c.margins) m = std::min(m, std::isnan(x) ? neg_inf : x);
  return m;
}

}  // namespace detail

// Predicted exponents for an open region.
inline void fill_exponents(RegionLabel& l, double alpha, double gamma, double zeta) {
  switch (l.region) {
    case Region::R1: l.xi = 0.5; l.theta = 0.0; break;
    case Region::R2: l.xi = alpha * (1 - gamma) / (2 * alpha - 1); l.theta = l.xi / alpha - gamma; break;
    case Region::R3: l.xi = 1.0; l.theta = 1 / alpha - gamma; break;
    case Region::R4: l.xi = alpha * (zeta - gamma) / (alpha - 1); l.theta = l.xi - zeta; break;
    case Region::R5: l.xi = (1 + zeta) / 3; l.theta = l.xi - zeta; break;
    case Region::R6: l.xi = 0.0; l.theta = -zeta; break;
    case Region::R4t: l.xi = 1 - zeta; l.theta = l.xi - zeta; break;
    case Region::R5t: l.xi = 1.0; l.theta = 1 - zeta; break;
    case Region::BoundaryR4tR5t: l.xi = 1.0; l.theta = 1.0; break;
    case Region::OtherBoundary: break;
  }
  l.descriptor = limit_descriptor(l.region);
}

// Phase-diagram cell of (gamma, zeta). A disabled coupling is passed as +inf;
// h_sign = 0 means no field and is read as zeta = +inf.
inline RegionLabel classify_region(double alpha, double gamma, double zeta, double h_sign, bool beta_positive = true) {
  check_alpha(alpha);
  if (!beta_positive) gamma = pos_inf;
  if (h_sign == 0.0) {
    zeta = pos_inf;
    h_sign = 1.0;
  }
  if (std::isnan(gamma) || std::isnan(zeta)) throw ParameterError("gamma and zeta must be numbers or inf");
  RegionLabel out;
  out.diagram = detail::pick_diagram(alpha, h_sign);
  auto table = detail::region_table(out.diagram, alpha, gamma, zeta);

  if (h_sign < 0 && std::fabs(zeta) <= boundary_slack && detail::gap(gamma, (1 - alpha) / alpha) > boundary_slack) {
    out.region = Region::BoundaryR4tR5t;
    out.adjacent = {Region::R4t, Region::R5t};
    fill_exponents(out, alpha, gamma, zeta);
    return out;
  }
  std::vector<Region> inside, near;
  for (const auto& c : table) {
    double m = detail::min_margin(c);
    if (m > boundary_slack) inside.push_back(c.region);
    if (m >= -boundary_slack) near.push_back(c.region);
  }
  if (inside.size() == 1 && near.size() == 1) {
    out.region = inside.front();
    fill_exponents(out, alpha, gamma, zeta);
    return out;
  }
  out.region = Region::OtherBoundary;
  out.adjacent = near;
  out.descriptor = limit_descriptor(out.region);
  return out;
}

// True when (gamma, zeta) satisfies the strict inequality system of `r` in `d`.
inline bool region_accepts(Diagram d, Region r, double alpha, double gamma, double zeta) {
  for (const auto& c : detail::region_table(d, alpha, gamma, zeta))
    if (c.region == r) return detail::min_margin(c) > 0.0;
  return false;
}

inline std::vector<Region> accepting_regions(Diagram d, double alpha, double gamma, double zeta) {
  std::vector<Region> out;
  for (const auto& c : detail::region_table(d, alpha, gamma, zeta))
    if (detail::min_margin(c) > 0.0) out.push_back(c.region);
  return out;
}

using RegionPair = std::pair<Region, Region>;

inline RegionPair ordered_pair(Region a, Region b) { return a < b ? RegionPair{a, b} : RegionPair{b, a}; }

// Walks a grid over [-4, 4]^2, bisects every crossing between neighbouring points
// and records the largest xi jump seen for each pair of adjacent regions.
inline std::map<RegionPair, double> boundary_xi_jumps(Diagram d, double alpha, double step = 0.05) {
  auto sole = [&](double g, double z) {
    auto acc = accepting_regions(d, alpha, g, z);
    return acc.size() == 1 ? acc.front() : Region::OtherBoundary;
  };
  auto xi_of = [&](Region r, double g, double z) {
    RegionLabel l;
    l.region = r;
    fill_exponents(l, alpha, g, z);
    return l.xi;
  };
  std::map<RegionPair, double> out;
  const int cells = static_cast<int>(std::lround(8.0 / step));
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j) {
      double g0 = -4 + step * (i + 0.37), z0 = -4 + step * (j + 0.61);
      Region r0 = sole(g0, z0);
      if (r0 == Region::OtherBoundary) continue;
      for (auto [dg, dz] : {std::pair{step, 0.0}, std::pair{0.0, step}}) {
        Region r1 = sole(g0 + dg, z0 + dz);
        if (r1 == Region::OtherBoundary || r1 == r0) continue;
        double lo = 0, hi = 1;
        for (int it = 0; it < 80; ++it) {
          double mid = 0.5 * (lo + hi);
          (sole(g0 + mid * dg, z0 + mid * dz) == r0 ? lo : hi) = mid;
        }
        // a step may pass over a sliver of a third region
        double t = 0.5 * (lo + hi);
        if (sole(g0 + (t + 1e-7) * dg, z0 + (t + 1e-7) * dz) != r1) continue;
        double g = g0 + t * dg, z = z0 + t * dz;
        // only two-region lines, not corners
        int near = 0;
        for (const auto& c : detail::region_table(d, alpha, g, z)) near += detail::min_margin(c) > -1e-9;
        if (near != 2) continue;
        double jump = std::fabs(xi_of(r0, g, z) - xi_of(r1, g, z));
        auto& slot = out[ordered_pair(r0, r1)];
        slot = std::max(slot, jump);
      }
    }
  return out;
}

}  // namespace polylab
