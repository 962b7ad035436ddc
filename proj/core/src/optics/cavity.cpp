#include "cqed/optics/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"
#include "cqed/parallel.hpp"

namespace cqed::optics {

namespace {

using constants::c;
using constants::pi;
using constants::two_pi;
const cplx I{0.0, 1.0};

double positive_length(double v) { return std::isfinite(v) && v > 0.0 ? v : -1.0; }

// int_0^d exp(a z) dz, stable for a -> 0.
double int_exp(double a, double d) {
  const double x = a * d;
  if (std::abs(x) < 1e-8) return d * (1.0 + 0.5 * x);
  return std::expm1(x) / a;
}

cplx int_cexp(cplx a, double d) {
  const cplx x = a * d;
  if (std::abs(x) < 1e-8) return d * (1.0 + 0.5 * x);
  return (std::exp(x) - 1.0) / a;
}

double segment_intensity(const LayerSegment& s, double wavelength, double zrel) {
  const cplx k = two_pi * s.index / wavelength;
  const cplx e = s.forward * std::exp(I * k * zrel) + s.backward * std::exp(-I * k * zrel);
  return std::norm(e);
}

double segment_integral(const LayerSegment& s, double wavelength) {
  const cplx k = two_pi * s.index / wavelength;
  const double d = s.z_end - s.z_begin;
  const double kr = k.real(), ki = k.imag();
  double v = std::norm(s.forward) * int_exp(-2.0 * ki, d) + std::norm(s.backward) * int_exp(2.0 * ki, d);
  v += 2.0 * (s.forward * std::conj(s.backward) * int_cexp(cplx(0.0, 2.0 * kr), d)).real();
  return v;
}

// Analytic intensity maxima of a lossless segment strictly inside (0, d).
std::vector<double> segment_antinodes(const LayerSegment& s, double wavelength) {
  std::vector<double> out;
  const double d = s.z_end - s.z_begin;
  if (d <= 0.0 || std::abs(s.forward) == 0.0 || std::abs(s.backward) == 0.0) return out;
  const double k = two_pi * s.index.real() / wavelength;
  const double phi = std::arg(s.forward) - std::arg(s.backward);
  // maxima where 2 k z + phi = 2 pi m
  const double m_lo = std::ceil((phi) / two_pi - 1e-12);
  for (double m = m_lo;; m += 1.0) {
    const double z = (two_pi * m - phi) / (2.0 * k);
    if (z >= d) break;
    if (z > 0.0) out.push_back(s.z_begin + z);
  }
  return out;
}

LayerStack mirror_from_cavity(const MirrorSpec& m, double cavity_index) {
  LayerStack s{cavity_index, {}, cavity_index};
  if (const auto* l = std::get_if<LumpedMirror>(&m)) {
    s.elements.emplace_back(*l);
  } else {
    const auto& dbr = std::get<DbrMirror>(m);
    for (const auto& l : dbr.layers) s.elements.emplace_back(l);
    s.substrate_index = dbr.substrate_index;
  }
  return s;
}

double golden_max(const auto& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

double resonance_near(const CavityGeometry& g, double lambda, double halfwidth, const ResonanceSearch& opt,
                      double* transmission = nullptr) {
  const auto layout = build_cavity(g);
  ResonanceSearch fine = opt;
  fine.grid_step = std::min(opt.grid_step, halfwidth / 200.0);
  const auto res = find_resonances(layout.stack, lambda - halfwidth, lambda + halfwidth, fine);
  if (res.empty()) throw NumericError("no cavity resonance found near the requested wavelength");
  const auto best = std::min_element(res.begin(), res.end(), [&](const auto& a, const auto& b) {
    return std::abs(a.first - lambda) < std::abs(b.first - lambda);
  });
  if (transmission) *transmission = best->second;
  return best->first;
}

double local_slope(const CavityGeometry& g, double lambda, const ResonanceSearch& opt) {
  const double dg = opt.slope_gap_step;
  // expected shift ~ lambda * dg / L; search a window a few times wider
  const double window = std::max(20.0 * lambda * dg / g.air_gap, 50e-12);
  CavityGeometry plus = g, minus = g;
  plus.air_gap += dg;
  minus.air_gap -= dg;
  const double lp = resonance_near(plus, lambda, window, opt);
  const double lm = resonance_near(minus, lambda, window, opt);
  return (c / lp - c / lm) / (2.0 * dg);
}

}  // namespace

void CavityGeometry::validate() const {
  require(positive_length(air_gap) > 0.0, "air gap must be > 0");
  require(std::isfinite(diamond_thickness) && diamond_thickness >= 0.0, "diamond thickness must be >= 0");
  require(diamond_index > 0.0, "diamond index must be > 0");
  require(positive_length(mirror_roc) > 0.0, "mirror radius of curvature must be > 0");
  require(positive_length(wavelength) > 0.0, "wavelength must be > 0");
  validate_mirror(input_mirror);
  validate_mirror(output_mirror);
}

DbrMirror default_input_dbr() { return quarter_wave_dbr(1.95, 1.46, 18, 619e-9, 1.45); }
DbrMirror default_output_dbr() { return quarter_wave_dbr(1.95, 1.46, 14, 619e-9, 1.45); }

CavityGeometry paper_geometry() {
  CavityGeometry g;
  g.input_mirror = default_input_dbr();
  g.output_mirror = default_output_dbr();
  return g;
}

CavityLayout build_cavity(const CavityGeometry& geometry) {
  geometry.validate();
  CavityLayout out;
  auto& s = out.stack;
  if (const auto* l = std::get_if<LumpedMirror>(&geometry.input_mirror)) {
    s.ambient_index = 1.0;
    s.elements.emplace_back(*l);
  } else {
    const auto& dbr = std::get<DbrMirror>(geometry.input_mirror);
    s.ambient_index = dbr.substrate_index;
    for (auto it = dbr.layers.rbegin(); it != dbr.layers.rend(); ++it) s.elements.emplace_back(*it);
  }
  out.air_element = s.elements.size();
  s.elements.emplace_back(Layer{geometry.air_gap, 1.0, 0.0});
  out.has_diamond = geometry.diamond_thickness > 0.0;
  double cavity_end_index = 1.0;
  if (out.has_diamond) {
    out.diamond_element = s.elements.size();
    s.elements.emplace_back(Layer{geometry.diamond_thickness, geometry.diamond_index, 0.0});
    cavity_end_index = geometry.diamond_index;
  } else {
    out.diamond_element = out.air_element;
  }
  if (const auto* l = std::get_if<LumpedMirror>(&geometry.output_mirror)) {
    s.elements.emplace_back(*l);
    s.substrate_index = cavity_end_index;
  } else {
    const auto& dbr = std::get<DbrMirror>(geometry.output_mirror);
    for (const auto& l : dbr.layers) s.elements.emplace_back(l);
    s.substrate_index = dbr.substrate_index;
  }
  return out;
}

double round_trip_phase(const CavityGeometry& geometry, double wavelength) {
  geometry.validate();
  const auto left = mirror_from_cavity(geometry.input_mirror, 1.0);
  LayerStack right = mirror_from_cavity(geometry.output_mirror, geometry.diamond_index);
  right.ambient_index = 1.0;
  if (geometry.diamond_thickness > 0.0)
    right.elements.insert(right.elements.begin(), Layer{geometry.diamond_thickness, geometry.diamond_index, 0.0});
  else if (std::holds_alternative<LumpedMirror>(geometry.output_mirror))
    right.substrate_index = 1.0;
  const cplx rl = transfer_matrix(left, wavelength).r;
  const cplx rr = transfer_matrix(right, wavelength).r;
  const double k = two_pi / wavelength;
  return std::arg(rl * rr * std::exp(I * (2.0 * k * geometry.air_gap)));
}

const char* to_string(Branch b) { return b == Branch::air_like ? "air-like" : "diamond-like"; }

std::vector<std::pair<double, double>> find_resonances(const LayerStack& stack, double lo, double hi,
                                                       const ResonanceSearch& opt) {
  require(lo > 0.0 && hi > lo, "wavelength window must be positive and increasing");
  require(opt.grid_step > 0.0, "grid step must be > 0");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / opt.grid_step)) + 1;
  std::vector<double> lam(n), T(n);
  for (std::size_t i = 0; i < n; ++i) {
    lam[i] = lo + static_cast<double>(i) * opt.grid_step;
    T[i] = transfer_matrix(stack, lam[i]).T;
  }
  std::vector<std::pair<double, double>> out;
  auto f = [&](double l) { return transfer_matrix(stack, l).T; };
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (T[i] > T[i - 1] && T[i] >= T[i + 1] && T[i] > opt.min_transmission) {
      const double x = golden_max(f, lam[i - 1], lam[i + 1], 1e-17);
      out.emplace_back(x, f(x));
    }
  }
  return out;
}

double free_spectral_range(const CavityGeometry& g, double wavelength, const ResonanceSearch& opt) {
  g.validate();
  const auto layout = build_cavity(g);
  const double window = 1.5 * wavelength * wavelength / (2.0 * g.geometric_length());
  const auto res = find_resonances(layout.stack, wavelength - window, wavelength + window, opt);
  if (res.size() < 2) throw NumericError("fewer than two resonances around the operating wavelength");
  std::size_t k = 0;
  for (std::size_t i = 1; i < res.size(); ++i)
    if (std::abs(res[i].first - wavelength) < std::abs(res[k].first - wavelength)) k = i;
  const std::size_t lo = k == 0 ? 0 : k - 1;
  const std::size_t hi = k + 1 == res.size() ? k : k + 1;
  return (c / res[lo].first - c / res[hi].first) / static_cast<double>(hi - lo);
}

Branch classify_branch(const CavityGeometry& g, double slope, double frequency) {
  const double s = std::abs(slope) / frequency;
  const double air = 1.0 / (g.air_gap + g.diamond_thickness);
  const double dia = 1.0 / (g.air_gap + g.diamond_index * g.diamond_index * g.diamond_thickness);
  return s >= std::sqrt(air * dia) ? Branch::air_like : Branch::diamond_like;
}

DispersionResult mode_dispersion(const CavityGeometry& geometry, const std::vector<double>& gaps,
                                 double lambda_min, double lambda_max, const ResonanceSearch& opt) {
  geometry.validate();
  require(lambda_min > 0.0 && lambda_max > lambda_min, "wavelength range must be positive and increasing");
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    require(gaps[i] > 0.0, "gaps must be positive");
    if (i > 0) require(gaps[i] > gaps[i - 1], "gap grid must be strictly increasing");
  }
  std::vector<std::vector<ModePoint>> per_gap(gaps.size());
  parallel_for(gaps.size(), [&](std::size_t i) {
    CavityGeometry g = geometry;
    g.air_gap = gaps[i];
    const auto layout = build_cavity(g);
    for (const auto& [lam, T] : find_resonances(layout.stack, lambda_min, lambda_max, opt)) {
      ModePoint p;
      p.gap = gaps[i];
      p.wavelength = lam;
      p.frequency = c / lam;
      p.transmission = T;
      p.slope = local_slope(g, lam, opt);
      p.branch = classify_branch(g, p.slope, p.frequency);
      per_gap[i].push_back(p);
    }
  });
  DispersionResult out;
  std::ostringstream diag;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (per_gap[i].empty()) diag << "no resonance in window at gap " << gaps[i] << " m; ";
    for (auto& p : per_gap[i]) out.points.push_back(p);
  }
  out.diagnostic = diag.str();
  return out;
}

ModePoint operating_point(const CavityGeometry& geometry, const ResonanceSearch& opt) {
  geometry.validate();
  ModePoint p;
  p.gap = geometry.air_gap;
  p.wavelength = resonance_near(geometry, geometry.wavelength, 3e-9, opt, &p.transmission);
  p.frequency = c / p.wavelength;
  p.slope = local_slope(geometry, p.wavelength, opt);
  p.branch = classify_branch(geometry, p.slope, p.frequency);
  return p;
}

double FieldProfile::intensity_at(double zq) const {
  for (const auto& s : segments) {
    if (zq >= s.z_begin && zq <= s.z_end) return segment_intensity(s, wavelength, zq - s.z_begin) / norm;
  }
  throw ValidationError("position outside the sampled stack");
}

FieldProfile field_profile(const LayerStack& stack, double wavelength, std::size_t emitter_element,
                           double max_step) {
  require(max_step > 0.0, "sampling step must be > 0");
  require(emitter_element < stack.elements.size() && std::holds_alternative<Layer>(stack.elements[emitter_element]),
          "emitter element must be a finite layer of the stack");
  const auto tr = transfer_matrix(stack, wavelength);
  FieldProfile p;
  p.wavelength = wavelength;
  Eigen::Vector2cd amp(1.0, tr.r);
  cplx medium = stack.ambient_index;
  double z = 0.0;
  double raw_max = 0.0;
  for (std::size_t j = 0; j < stack.elements.size(); ++j) {
    const auto& e = stack.elements[j];
    if (const auto* mirror = std::get_if<LumpedMirror>(&e)) {
      amp = lumped_mirror_matrix(*mirror).partialPivLu().solve(amp);
      continue;
    }
    const auto& l = std::get<Layer>(e);
    const cplx n = l.complex_index();
    if (n != medium) amp = interface_matrix(medium, n).partialPivLu().solve(amp);
    medium = n;
    if (j == emitter_element) p.emitter_segment = p.segments.size();
    LayerSegment seg{z, z + l.thickness, n, amp(0), amp(1), j};
    p.segments.push_back(seg);
    if (l.thickness > 0.0) {
      const auto cells = static_cast<std::size_t>(std::ceil(l.thickness / max_step));
      const double dz = l.thickness / static_cast<double>(cells);
      for (std::size_t k = 0; k < cells; ++k) {
        const double zr = (static_cast<double>(k) + 0.5) * dz;
        const double v = segment_intensity(seg, wavelength, zr);
        p.z.push_back(z + zr);
        p.intensity.push_back(v);
        p.index.push_back(n.real());
        raw_max = std::max(raw_max, v);
      }
    }
    const cplx k = two_pi * n / wavelength;
    amp(0) *= std::exp(I * k * l.thickness);
    amp(1) *= std::exp(-I * k * l.thickness);
    z += l.thickness;
  }
  if (!(raw_max > 0.0)) throw NumericError("field profile vanishes everywhere");
  p.norm = raw_max;
  for (auto& v : p.intensity) v /= raw_max;

  for (const auto& s : p.segments) {
    if (s.index == cplx(1.0, 0.0)) {
      const auto a = segment_antinodes(s, wavelength);
      p.air_antinodes.insert(p.air_antinodes.end(), a.begin(), a.end());
    }
  }
  const auto& em = p.segments[p.emitter_segment];
  if (em.index.imag() == 0.0) {
    p.emitter_antinodes = segment_antinodes(em, wavelength);
  } else {
    for (std::size_t i = 1; i + 1 < p.z.size(); ++i) {
      if (p.z[i] > em.z_begin && p.z[i] < em.z_end && p.intensity[i] > p.intensity[i - 1] &&
          p.intensity[i] >= p.intensity[i + 1])
        p.emitter_antinodes.push_back(p.z[i]);
    }
  }
  if (!p.emitter_antinodes.empty()) p.emitter_antinode_distance = em.z_end - p.emitter_antinodes.back();
  p.mode_number = static_cast<int>(p.air_antinodes.size());
  if (em.index != cplx(1.0, 0.0)) p.mode_number += static_cast<int>(p.emitter_antinodes.size());

  // On resonance the transmission sits above half of the nearest maximum.
  ResonanceSearch near;
  near.grid_step = 0.05e-12;
  near.min_transmission = 0.0;
  const auto peaks = find_resonances(stack, wavelength - 20e-12, wavelength + 20e-12, near);
  double peak = 0.0, best = std::numeric_limits<double>::infinity();
  for (const auto& [l, T] : peaks) {
    if (std::abs(l - wavelength) < best) {
      best = std::abs(l - wavelength);
      peak = T;
    }
  }
  p.off_resonance = peaks.empty() || tr.T < 0.5 * peak;
  return p;
}

FieldProfile field_profile(const CavityGeometry& geometry, double wavelength, double max_step) {
  const auto layout = build_cavity(geometry);
  return field_profile(layout.stack, wavelength, layout.diamond_element, max_step);
}

double effective_length(const FieldProfile& p) {
  require(!p.segments.empty(), "empty field profile");
  const auto& em = p.segments[p.emitter_segment];
  double emax = 0.0;
  const double d = em.z_end - em.z_begin;
  if (em.index.imag() == 0.0 && !segment_antinodes(em, p.wavelength).empty()) {
    emax = std::pow(std::abs(em.forward) + std::abs(em.backward), 2);
  } else {
    for (std::size_t i = 0; i < p.z.size(); ++i)
      if (p.z[i] >= em.z_begin && p.z[i] <= em.z_end) emax = std::max(emax, p.intensity[i] * p.norm);
    emax = std::max({emax, segment_intensity(em, p.wavelength, 0.0), segment_intensity(em, p.wavelength, d)});
  }
  if (!(emax > 0.0)) throw NumericError("zero field in the emitter medium");
  double energy = 0.0;
  for (const auto& s : p.segments) energy += s.index.real() * s.index.real() * segment_integral(s, p.wavelength);
  const double ne = em.index.real();
  return 2.0 * energy / (ne * ne * emax);
}

double beam_waist(const CavityGeometry& g) {
  g.validate();
  const double L = g.geometric_length();
  if (L >= g.mirror_roc) throw ValidationError("unstable resonator: L_geo >= mirror radius of curvature");
  return std::sqrt(g.wavelength / pi * std::sqrt(L * (g.mirror_roc - L)));
}

ModeVolume mode_volume(double waist, double leff, double wavelength) {
  require(waist > 0.0 && leff > 0.0 && wavelength > 0.0, "mode volume inputs must be > 0");
  ModeVolume v;
  v.cubic_meters = pi / 4.0 * waist * waist * leff;
  v.cubic_wavelengths = v.cubic_meters / (wavelength * wavelength * wavelength);
  return v;
}

double purcell_factor(double wavelength, double index, double q, double volume_lambda3) {
  require(wavelength > 0.0 && index > 0.0 && q > 0.0 && volume_lambda3 > 0.0, "Purcell inputs must be > 0");
  return 3.0 / (4.0 * pi * pi) * q / (index * index * index * volume_lambda3);
}

double finesse_from_loss(double total_loss_ppm) {
  require(total_loss_ppm > 0.0, "total loss must be > 0");
  return two_pi / (total_loss_ppm * constants::ppm);
}

LossBudget loss_budget(double kappa, double fsr, double t_in_ppm, double t_out_ppm) {
  require(kappa > 0.0 && fsr > kappa, "loss budget requires fsr > kappa > 0");
  require(t_in_ppm >= 0.0 && t_out_ppm >= 0.0, "mirror transmittances must be >= 0");
  LossBudget b;
  b.finesse = fsr / kappa;
  b.total_loss_ppm = two_pi / b.finesse / constants::ppm;
  b.excess_loss_ppm = b.total_loss_ppm - t_in_ppm - t_out_ppm;
  b.inconsistent = b.excess_loss_ppm < 0.0;
  return b;
}

double empty_cavity_transmission(double t_in_ppm, double t_out_ppm, double total_loss_ppm, double delta_c,
                                 double kappa) {
  require(t_in_ppm >= 0.0 && t_out_ppm >= 0.0 && total_loss_ppm > 0.0, "invalid ppm inputs");
  require(t_in_ppm + t_out_ppm <= total_loss_ppm * (1.0 + 1e-12), "mirror transmittances exceed total loss");
  require(kappa > 0.0, "kappa must be > 0");
  const double tmax = 4.0 * t_in_ppm * t_out_ppm / (total_loss_ppm * total_loss_ppm);
  const double x = 2.0 * delta_c / kappa;
  return tmax / (1.0 + x * x);
}

CavityDerived characterize(const CavityGeometry& geometry, double kappa, double total_loss_ppm) {
  require(kappa > 0.0, "kappa must be > 0");
  CavityDerived d;
  const auto op = operating_point(geometry);
  d.resonance_wavelength = op.wavelength;
  d.frequency = op.frequency;
  d.dispersion_slope = op.slope;
  d.branch = op.branch;
  const auto prof = field_profile(geometry, op.wavelength);
  d.effective_length = effective_length(prof);
  d.mode_number = prof.mode_number;
  d.emitter_antinode_distance = prof.emitter_antinode_distance;
  CavityGeometry at_res = geometry;
  at_res.wavelength = op.wavelength;
  d.waist = beam_waist(at_res);
  d.mode_volume_lambda3 = mode_volume(d.waist, d.effective_length, op.wavelength).cubic_wavelengths;
  d.kappa = kappa;
  d.q_factor = op.frequency / kappa;
  d.purcell = purcell_factor(op.wavelength, geometry.diamond_index, d.q_factor, d.mode_volume_lambda3);
  d.total_loss_ppm = total_loss_ppm;
  d.finesse = finesse_from_loss(total_loss_ppm);
  d.input_transmittance_ppm = mirror_transmittance_ppm(geometry.input_mirror, 1.0, op.wavelength);
  d.output_transmittance_ppm = mirror_transmittance_ppm(geometry.output_mirror, geometry.diamond_index, op.wavelength);
  d.empty_transmission = empty_cavity_transmission(d.input_transmittance_ppm, d.output_transmittance_ppm,
                                                   total_loss_ppm, 0.0, kappa);
  return d;
}

}  // namespace cqed::optics
