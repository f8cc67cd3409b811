#include "spoofguard/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spoofguard/error.hpp"

namespace spoofguard {

namespace {

void validate_scores(const ScoreSet& s) {
  require(!s.bonafide.empty(), "score set has no bona fide trials");
  require(!s.spoof.empty(), "score set has no spoof trials");
  for (double v : s.bonafide) require(std::isfinite(v), "non-finite bona fide score");
  for (double v : s.spoof) require(std::isfinite(v), "non-finite spoof score");
}

}  // namespace

DetCurve det_curve(const ScoreSet& scores) {
  validate_scores(scores);

  std::vector<double> bona = scores.bonafide;
  std::vector<double> spoof = scores.spoof;
  std::sort(bona.begin(), bona.end());
  std::sort(spoof.begin(), spoof.end());

  DetCurve curve;
  curve.thresholds.reserve(bona.size() + spoof.size() + 2);
  curve.thresholds.push_back(-std::numeric_limits<double>::infinity());
  std::merge(bona.begin(), bona.end(), spoof.begin(), spoof.end(),
             std::back_inserter(curve.thresholds));
  curve.thresholds.erase(std::unique(curve.thresholds.begin(), curve.thresholds.end()),
                         curve.thresholds.end());
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());

  const double n_bona = static_cast<double>(bona.size());
  const double n_spoof = static_cast<double>(spoof.size());
  curve.far.reserve(curve.thresholds.size());
  curve.frr.reserve(curve.thresholds.size());
  for (double t : curve.thresholds) {
    // Counts with strict inequalities; score == threshold is neither.
    const auto above = spoof.end() - std::upper_bound(spoof.begin(), spoof.end(), t);
    const auto below = std::lower_bound(bona.begin(), bona.end(), t) - bona.begin();
    curve.far.push_back(static_cast<double>(above) / n_spoof);
    curve.frr.push_back(static_cast<double>(below) / n_bona);
  }
  return curve;
}

EerResult compute_eer(const ScoreSet& scores) {
  const DetCurve curve = det_curve(scores);
  const std::size_t n = curve.thresholds.size();

  // FAR - FRR is non-increasing in the threshold; it starts at +1 and ends
  // at -1, so a crossing always exists.
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = curve.far[i] - curve.frr[i];
    if (diff == 0.0) {
      return {curve.far[i], curve.thresholds[i]};
    }
    if (diff < 0.0) {
      const std::size_t j = i - 1;  // diff was positive here
      const double d1 = curve.far[j] - curve.frr[j];
      const double d2 = diff;
      const double t = d1 / (d1 - d2);
      const double eer = curve.far[j] + t * (curve.far[i] - curve.far[j]);
      double theta = curve.thresholds[j];
      if (std::isfinite(curve.thresholds[j]) && std::isfinite(curve.thresholds[i])) {
        theta = curve.thresholds[j] + t * (curve.thresholds[i] - curve.thresholds[j]);
      } else if (std::isfinite(curve.thresholds[i])) {
        theta = curve.thresholds[i];
      }
      return {eer, theta};
    }
  }
  fail("compute_eer: no crossing found (unreachable on a valid DET curve)");
}

std::vector<double> tdcf_curve(const ScoreSet& scores, const TdcfCosts& costs) {
  require(std::isfinite(costs.c1) && std::isfinite(costs.c2), "t-DCF costs must be finite");
  require(costs.c1 >= 0.0 && costs.c2 >= 0.0, "t-DCF costs must be non-negative");
  require(costs.c1 > 0.0 || costs.c2 > 0.0, "degenerate t-DCF: both costs are zero");

  const DetCurve curve = det_curve(scores);
  std::vector<double> tdcf(curve.thresholds.size());
  for (std::size_t i = 0; i < tdcf.size(); ++i) {
    tdcf[i] = costs.c1 * curve.frr[i] + costs.c2 * curve.far[i];
  }
  return tdcf;
}

double min_tdcf_normalized(const ScoreSet& scores, const TdcfCosts& costs) {
  require(costs.c1 > 0.0 && costs.c2 > 0.0,
          "min normalized t-DCF needs strictly positive costs");
  const std::vector<double> curve = tdcf_curve(scores, costs);
  const double lowest = *std::min_element(curve.begin(), curve.end());
  return lowest / std::min(costs.c1, costs.c2);
}

TdcfCosts tdcf_constants(const TdcfParameters& p) {
  const double prior_sum = p.pi_tar + p.pi_non + p.pi_spoof;
  require(std::abs(prior_sum - 1.0) < 1e-9,
          "t-DCF priors must sum to 1, got " + std::to_string(prior_sum));
  for (double rate : {p.pmiss_asv, p.pfa_asv, p.pmiss_spoof_asv}) {
    require(rate >= 0.0 && rate <= 1.0, "ASV error rates must lie in [0, 1]");
  }

  TdcfCosts costs;
  costs.c1 = p.pi_tar * (p.cmiss_cm - p.cmiss_asv * p.pmiss_asv) -
             p.pi_non * p.cfa_asv * p.pfa_asv;
  costs.c2 = p.cfa_cm * p.pi_spoof * (1.0 - p.pmiss_spoof_asv);
  require(costs.c1 >= 0.0,
          "ill-posed t-DCF operating point: c1 = " + std::to_string(costs.c1));
  return costs;
}

double pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
  require(xs.size() == ys.size(), "pearson_correlation: length mismatch");
  require(xs.size() >= 2, "pearson_correlation: need at least 2 points");

  const double n = static_cast<double>(xs.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= n;
  mean_y /= n;

  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  require(sxx > 0.0 && syy > 0.0, "pearson_correlation: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace spoofguard
