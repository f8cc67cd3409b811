#pragma once

#include <span>
#include <vector>

namespace spoofguard {

// Labeled detection scores. Higher score means "more bona fide".
struct ScoreSet {
  std::vector<double> bonafide;
  std::vector<double> spoof;
};

// Threshold-swept operating points. Thresholds are the sorted distinct
// observed scores plus -inf/+inf sentinels. Counting uses strict
// inequalities: FAR(t) = #{spoof > t}/#spoof, FRR(t) = #{bonafide < t}/
// #bonafide, so a score equal to the threshold is neither a false alarm
// nor a miss.
struct DetCurve {
  std::vector<double> thresholds;
  std::vector<double> far;  // non-increasing in threshold
  std::vector<double> frr;  // non-decreasing in threshold
};

// Constants of the tandem cost t-DCF(t) = c1 * FRR(t) + c2 * FAR(t).
struct TdcfCosts {
  double c1 = 1.0;
  double c2 = 1.0;
};

// Costs, priors and ASV operating point that generate (c1, c2). The
// default costs/priors follow the ASVspoof 2019 evaluation plan; they are
// configuration defaults, not measurements.
struct TdcfParameters {
  double pi_tar = 0.9405;
  double pi_non = 0.0095;
  double pi_spoof = 0.05;
  double cmiss_asv = 1.0;
  double cfa_asv = 10.0;
  double cmiss_cm = 1.0;
  double cfa_cm = 10.0;
  double pmiss_asv = 0.0;
  double pfa_asv = 0.0;
  double pmiss_spoof_asv = 0.0;
};

DetCurve det_curve(const ScoreSet& scores);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

// Walks the DET curve for the sign change of FAR - FRR and linearly
// interpolates between the two straddling operating points when no exact
// equality exists.
EerResult compute_eer(const ScoreSet& scores);

// t-DCF evaluated at every DET-curve threshold, in threshold order.
std::vector<double> tdcf_curve(const ScoreSet& scores, const TdcfCosts& costs);

// min over thresholds of t-DCF(t) / min(c1, c2); <= 1 because the
// accept-all and reject-all points reach exactly min(c1, c2).
double min_tdcf_normalized(const ScoreSet& scores, const TdcfCosts& costs);

// c1 = pi_tar*(cmiss_cm - cmiss_asv*pmiss_asv) - pi_non*cfa_asv*pfa_asv
// c2 = cfa_cm*pi_spoof*(1 - pmiss_spoof_asv)
// A negative resulting c1 is rejected as an ill-posed operating point.
TdcfCosts tdcf_constants(const TdcfParameters& params);

// Sample Pearson correlation coefficient; needs length >= 2 and nonzero
// variance on both sides.
double pearson_correlation(std::span<const double> xs, std::span<const double> ys);

}  // namespace spoofguard
