#include "cqed/analysis/fitters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cqed/analysis/least_squares.hpp"
#include "cqed/ensemble/lineshape.hpp"
#include "cqed/errors.hpp"

namespace cqed::analysis {

namespace {

std::vector<double> running_mean(const std::vector<double>& v, int window) {
  const int n = static_cast<int>(v.size());
  const int h = window / 2;
  std::vector<double> out(v.size());
  for (int i = 0; i < n; ++i) {
    const int a = std::max(0, i - h), b = std::min(n - 1, i + h);
    double s = 0.0;
    for (int j = a; j <= b; ++j) s += v[j];
    out[i] = s / (b - a + 1);
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Eigen::VectorXd weights_for(const std::vector<double>& counts, Weighting w) {
  Eigen::VectorXd out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    out(i) = w == Weighting::poisson ? 1.0 / std::max(counts[i], 1.0) : 1.0;
  return out;
}

// Converts an LM result into a FitResult with the covariance convention of `w`.
FitResult finish(const std::string& model, const std::vector<std::string>& names, const LsqResult& r, Weighting w,
                 double begin, double end) {
  FitResult f;
  f.model = model;
  f.window_begin = begin;
  f.window_end = end;
  f.dof = r.dof;
  f.reduced_chi2 = r.dof > 0 ? r.chi2 / r.dof : 0.0;
  const double scale = w == Weighting::uniform ? f.reduced_chi2 : 1.0;
  bool finite = true;
  for (std::size_t j = 0; j < names.size(); ++j) {
    const double var = r.covariance(j, j) * scale;
    finite = finite && std::isfinite(var) && var >= 0.0;
    f.parameters.push_back({names[j], r.parameters(j), std::sqrt(std::max(var, 0.0))});
  }
  f.success = r.converged && finite;
  std::ostringstream os;
  os << r.message << " after " << r.iterations << " iterations, reduced chi2 " << f.reduced_chi2;
  if (!finite) os << "; covariance not finite";
  f.diagnostic = os.str();
  return f;
}

struct LineGuess {
  double center, width, amplitude, offset;
};

LineGuess guess_line(const ScanTrace& t, LineMode mode) {
  const std::size_t n = t.size();
  const std::size_t edge = std::max<std::size_t>(2, n / 10);
  std::vector<double> outer(t.counts.begin(), t.counts.begin() + edge);
  outer.insert(outer.end(), t.counts.end() - edge, t.counts.end());
  const double offset = median(outer);
  const auto s = running_mean(t.counts, 5);
  const double sign = mode == LineMode::peak ? 1.0 : -1.0;
  std::size_t k = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (sign * s[i] > sign * s[k]) k = i;
  const double amp = std::max(sign * (s[k] - offset), 1e-12 + 1e-6 * std::abs(offset));
  std::size_t lo = k, hi = k;
  while (lo > 0 && sign * (s[lo - 1] - offset) > 0.5 * amp) --lo;
  while (hi + 1 < n && sign * (s[hi + 1] - offset) > 0.5 * amp) ++hi;
  const double step = (t.frequency.back() - t.frequency.front()) / static_cast<double>(n - 1);
  const double width = std::max(t.frequency[hi] - t.frequency[lo], 2.0 * step);
  return {t.frequency[k], width, amp, offset};
}

void mark_significance(FitResult& f, const FitOptions& opt) {
  const auto& a = f.at("amplitude");
  if (!f.success) return;
  if (!(a.value > 0.0) || a.value < opt.min_significance * a.sigma) {
    f.success = false;
    f.diagnostic += "; amplitude consistent with zero";
  }
}

}  // namespace

const FitParameter& FitResult::at(const std::string& name) const {
  for (const auto& p : parameters)
    if (p.name == name) return p;
  throw ValidationError("fit result has no parameter '" + name + "'");
}

FitResult fit_lorentzian(const ScanTrace& trace, LineMode mode, const FitOptions& opt) {
  trace.validate();
  require(trace.size() >= 8, "Lorentzian fit needs at least 8 points");
  const double sign = mode == LineMode::peak ? 1.0 : -1.0;
  const auto g = guess_line(trace, mode);
  CurveModel m;
  m.value = [sign](double x, const Eigen::VectorXd& p) {
    const double u = 2.0 * (x - p(0)) / p(1);
    return p(3) + sign * p(2) / (1.0 + u * u);
  };
  m.gradient = [sign](double x, const Eigen::VectorXd& p, Eigen::Ref<Eigen::VectorXd> d) {
    const double u = 2.0 * (x - p(0)) / p(1);
    const double q = 1.0 / (1.0 + u * u);
    d(0) = sign * p(2) * 4.0 * u * q * q / p(1);
    d(1) = sign * p(2) * 2.0 * u * u * q * q / p(1);
    d(2) = sign * q;
    d(3) = 1.0;
  };
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(trace.frequency.data(), trace.size());
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(trace.counts.data(), trace.size());
  Eigen::VectorXd p0(4);
  p0 << g.center, g.width, g.amplitude, g.offset;
  const auto r = levenberg_marquardt(m, x, y, weights_for(trace.counts, opt.weighting), p0);
  auto f = finish(mode == LineMode::peak ? "lorentzian_peak" : "lorentzian_dip",
                  {"center", "fwhm", "amplitude", "offset"}, r, opt.weighting, trace.frequency.front(),
                  trace.frequency.back());
  f.parameters[1].value = std::abs(f.parameters[1].value);
  mark_significance(f, opt);
  return f;
}

FitResult fit_voigt_fixed_gaussian(const ScanTrace& trace, double gaussian_fwhm, LineMode mode,
                                   const FitOptions& opt) {
  require(gaussian_fwhm >= 0.0, "Gaussian FWHM must be >= 0");
  if (gaussian_fwhm == 0.0) {
    auto f = fit_lorentzian(trace, mode, opt);
    f.model = mode == LineMode::peak ? "voigt_peak" : "voigt_dip";
    f.parameters[1].name = "lorentzian_fwhm";
    return f;
  }
  trace.validate();
  require(trace.size() >= 8, "Voigt fit needs at least 8 points");
  const double sign = mode == LineMode::peak ? 1.0 : -1.0;
  const auto g = guess_line(trace, mode);
  // invert the Olivero-Longbothum relation for a starting Lorentzian width
  double lo = 0.0, hi = std::max(g.width, gaussian_fwhm);
  while (ensemble::olivero_fwhm(hi, gaussian_fwhm) < g.width) hi *= 2.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ensemble::olivero_fwhm(mid, gaussian_fwhm) < g.width ? lo : hi) = mid;
  }
  const double l0 = std::max(0.5 * (lo + hi), 0.05 * gaussian_fwhm);

  CurveModel m;
  m.value = [sign, gaussian_fwhm](double x, const Eigen::VectorXd& p) {
    const double lf = std::abs(p(1));
    const double peak = ensemble::voigt_density(0.0, lf, gaussian_fwhm);
    return p(3) + sign * p(2) * ensemble::voigt_density(x - p(0), lf, gaussian_fwhm) / peak;
  };
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(trace.frequency.data(), trace.size());
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(trace.counts.data(), trace.size());
  Eigen::VectorXd p0(4);
  p0 << g.center, l0, g.amplitude, g.offset;
  const auto r = levenberg_marquardt(m, x, y, weights_for(trace.counts, opt.weighting), p0);
  auto f = finish(mode == LineMode::peak ? "voigt_peak" : "voigt_dip", {"center", "lorentzian_fwhm", "amplitude", "offset"},
                  r, opt.weighting, trace.frequency.front(), trace.frequency.back());
  f.parameters[1].value = std::abs(f.parameters[1].value);
  mark_significance(f, opt);
  return f;
}

namespace {

struct ExpFit {
  LsqResult lsq;
  std::size_t begin, end;
};

ExpFit fit_exp_range(const HistogramTrace& h, std::size_t begin, std::size_t end, Weighting weighting) {
  const std::size_t n = end - begin;
  const double t0 = h.time[begin] + 0.5 * h.bin_width;
  Eigen::VectorXd x(n), y(n);
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i) = h.time[begin + i] + 0.5 * h.bin_width - t0;
    y(i) = c[i] = h.counts[begin + i];
  }
  // starting values: tail level for the offset, 1/e crossing for tau
  const std::size_t tail = std::max<std::size_t>(1, n / 10);
  double b0 = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) b0 += c[i];
  b0 /= static_cast<double>(tail);
  const auto s = running_mean(c, 3);
  const double a0 = std::max(s[0] - b0, 1e-6);
  double tau0 = 0.3 * x(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (s[i] - b0 < a0 / std::exp(1.0)) {
      tau0 = std::max(x(i), h.bin_width);
      break;
    }
  }
  CurveModel m;
  m.value = [](double t, const Eigen::VectorXd& p) { return p(1) * std::exp(-t / p(0)) + p(2); };
  m.gradient = [](double t, const Eigen::VectorXd& p, Eigen::Ref<Eigen::VectorXd> d) {
    const double e = std::exp(-t / p(0));
    d(0) = p(1) * e * t / (p(0) * p(0));
    d(1) = e;
    d(2) = 1.0;
  };
  Eigen::VectorXd p0(3);
  p0 << tau0, a0, std::max(b0, 0.0);
  Eigen::VectorXd w(n);
  for (std::size_t i = 0; i < n; ++i) w(i) = weighting == Weighting::poisson ? 1.0 / std::max(c[i], 1.0) : 1.0;
  return {levenberg_marquardt(m, x, y, w, p0), begin, end};
}

}  // namespace

std::size_t auto_window_start(const HistogramTrace& h, const ExpFitOptions& opt) {
  h.validate();
  const std::size_t n = h.size();
  const auto s = running_mean(h.counts, 3);
  const std::size_t peak = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
  // slow component estimated well after the peak, where the fast decay has died out
  const auto skip = static_cast<std::size_t>(std::ceil(2e-9 / h.bin_width));
  const auto len = static_cast<std::size_t>(std::llround(opt.window_length / h.bin_width));
  const std::size_t b = std::min(peak + skip, n);
  const std::size_t e = std::min(b + len, n);
  if (e < b + static_cast<std::size_t>(opt.min_bins)) throw ValidationError("histogram too short for automatic window");
  const auto pre = fit_exp_range(h, b, e, opt.weighting);
  const double tau = pre.lsq.parameters(0), amp = pre.lsq.parameters(1), off = pre.lsq.parameters(2);
  const double tb = h.time[b] + 0.5 * h.bin_width;
  for (std::size_t i = peak; i < b; ++i) {
    const double t = h.time[i] + 0.5 * h.bin_width;
    const double slow = amp * std::exp(-(t - tb) / tau);
    const double excess = s[i] - (slow + off);
    if (excess < opt.fast_fraction * slow) return i;
  }
  return b;
}

FitResult fit_monoexponential(const HistogramTrace& hist, std::optional<double> window_start, const ExpFitOptions& opt) {
  hist.validate();
  require(opt.window_length > 0.0, "window length must be > 0");
  std::size_t begin;
  if (window_start) {
    require(*window_start >= hist.time.front() - 1e-15 && *window_start <= hist.time.back(),
            "window start outside the histogram");
    begin = static_cast<std::size_t>(std::lower_bound(hist.time.begin(), hist.time.end(), *window_start - 1e-6 * hist.bin_width) -
                                     hist.time.begin());
  } else {
    begin = auto_window_start(hist, opt);
  }
  const auto len = static_cast<std::size_t>(std::llround(opt.window_length / hist.bin_width));
  const std::size_t end = std::min(begin + len, hist.size());
  if (end < begin + static_cast<std::size_t>(opt.min_bins))
    throw ValidationError("fit window shorter than the minimum number of bins");
  const auto r = fit_exp_range(hist, begin, end, opt.weighting);
  auto f = finish("monoexponential", {"tau", "amplitude", "offset"}, r.lsq, opt.weighting, hist.time[begin],
                  hist.time[end - 1] + hist.bin_width);
  if (f.success && !(f.value("tau") > 0.0)) {
    f.success = false;
    f.diagnostic += "; non-positive decay time";
  }
  return f;
}

}  // namespace cqed::analysis
