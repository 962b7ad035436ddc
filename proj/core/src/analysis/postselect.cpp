#include "cqed/analysis/postselect.hpp"

#include <cmath>

#include "cqed/errors.hpp"

namespace cqed::analysis {

namespace {

double grid_step(const ScanTrace& t) {
  return (t.frequency.back() - t.frequency.front()) / static_cast<double>(t.size() - 1);
}

void check_same_grid(const ScanTrace& ref, const ScanTrace& t) {
  require(t.size() == ref.size(), "postselected traces must share one frequency grid");
  const double step = grid_step(ref);
  require(std::abs(t.frequency.front() - ref.frequency.front()) <= 1e-6 * step &&
              std::abs(t.frequency.back() - ref.frequency.back()) <= 1e-6 * step,
          "postselected traces must share one frequency grid");
}

PostselectResult finish(const std::vector<ScanTrace>& kept, const std::vector<double>& centers,
                        std::vector<int> ids, std::map<std::string, std::size_t> rejected) {
  PostselectResult r;
  r.rejected = std::move(rejected);
  r.accepted = kept.size();
  r.accepted_ids = std::move(ids);
  if (kept.empty()) {
    r.fit.success = false;
    r.fit.diagnostic = "no accepted scans";
    return r;
  }
  r.sum = align_and_sum(kept, centers);
  r.average = r.sum;
  for (auto& c : r.average.counts) c /= static_cast<double>(kept.size());
  r.average.integration_time = r.sum.integration_time / static_cast<double>(kept.size());
  if (r.sum.size() >= 8) {
    r.fit = fit_lorentzian(r.sum, LineMode::peak);
  } else {
    r.fit.success = false;
    r.fit.diagnostic = "common overlap shorter than 8 points";
  }
  return r;
}

}  // namespace

ScanTrace align_and_sum(const std::vector<ScanTrace>& traces, const std::vector<double>& centers) {
  require(!traces.empty() && traces.size() == centers.size(), "need one center per trace");
  const auto& ref = traces.front();
  ref.validate();
  require(ref.size() >= 2, "traces need at least two points");
  const double step = grid_step(ref);
  const auto n = static_cast<long>(ref.size());
  long lo = -(1L << 40), hi = 1L << 40;
  std::vector<long> shift(traces.size());
  for (std::size_t k = 0; k < traces.size(); ++k) {
    check_same_grid(ref, traces[k]);
    require(std::isfinite(centers[k]), "trace center must be finite");
    shift[k] = std::lround((centers[k] - ref.frequency.front()) / step);
    lo = std::max(lo, -shift[k]);
    hi = std::min(hi, n - 1 - shift[k]);
  }
  if (hi < lo) throw NumericError("aligned traces have no common frequency overlap");
  ScanTrace out;
  out.metadata.scan_id = -1;
  out.integration_time = 0.0;
  for (long rel = lo; rel <= hi; ++rel) {
    out.frequency.push_back(static_cast<double>(rel) * step);
    double s = 0.0;
    for (std::size_t k = 0; k < traces.size(); ++k) s += traces[k].counts[static_cast<std::size_t>(rel + shift[k])];
    out.counts.push_back(s);
  }
  for (const auto& t : traces) out.integration_time += t.integration_time;
  return out;
}

PostselectResult ple_postselect_on_resonance(const std::vector<PleScan>& scans, const OnResonanceCriteria& c) {
  std::vector<ScanTrace> kept;
  std::vector<double> centers;
  std::vector<int> ids;
  std::map<std::string, std::size_t> rejected;
  for (const auto& s : scans) {
    if (!s.zpl) {
      ++rejected["missing_transmission"];
      continue;
    }
    const auto f = fit_lorentzian(*s.zpl, LineMode::dip);
    const double center = f.value("center");
    std::string reason;
    if (!f.success)
      reason = "no_dip";
    else if (center < c.band_low || center > c.band_high)
      reason = "out_of_band";
    else if (f.value("fwhm") <= c.min_width)
      reason = "too_narrow";
    else if (!(f.value("offset") > 0.0) || f.value("amplitude") / f.value("offset") <= c.min_contrast)
      reason = "low_contrast";
    if (!reason.empty() && !c.accept_all) {
      ++rejected[reason];
      continue;
    }
    kept.push_back(s.psb);
    centers.push_back(std::isfinite(center) ? center : s.zpl->frequency[s.zpl->size() / 2]);
    ids.push_back(s.psb.metadata.scan_id);
  }
  return finish(kept, centers, std::move(ids), std::move(rejected));
}

PostselectResult ple_postselect_off_resonance(const std::vector<ScanTrace>& scans, const OffResonanceCriteria& c) {
  std::vector<ScanTrace> kept;
  std::vector<double> centers;
  std::vector<int> ids;
  std::map<std::string, std::size_t> rejected;
  for (std::size_t k = 0; k < scans.size(); ++k) {
    const auto& s = scans[k];
    std::string reason;
    if (c.use_repump && !c.accept_all) {
      if (k + 1 >= scans.size())
        reason = "unknown_charge_state";
      else if (scans[k + 1].metadata.repump_applied)
        reason = "ionized";
    }
    if (!reason.empty()) {
      ++rejected[reason];
      continue;
    }
    const auto f = fit_lorentzian(s, LineMode::peak);
    const double center = f.value("center");
    if (!f.success)
      reason = "fit_failed";
    else if (center < c.band_low || center > c.band_high)
      reason = "out_of_band";
    else if (f.value("fwhm") < c.min_width || f.value("fwhm") > c.max_width)
      reason = "width_out_of_range";
    else if (f.value("amplitude") < c.min_amplitude)
      reason = "low_amplitude";
    if (!reason.empty() && !c.accept_all) {
      ++rejected[reason];
      continue;
    }
    kept.push_back(s);
    centers.push_back(std::isfinite(center) ? center : s.frequency[s.size() / 2]);
    ids.push_back(s.metadata.scan_id);
  }
  return finish(kept, centers, std::move(ids), std::move(rejected));
}

}  // namespace cqed::analysis
