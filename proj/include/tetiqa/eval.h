#ifndef TETIQA_EVAL_H_
#define TETIQA_EVAL_H_

// Objective-vs-subjective score validation: a 4-parameter logistic maps
// objective scores to predicted MOS, then prediction accuracy (Pearson on
// the mapped scores) and monotonicity (Spearman on the raw scores) are
// reported per distortion type and overall.

#include <array>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tetiqa/image.h"

namespace tetiqa {

struct LogisticParams {
  std::array<double, 4> gamma{1.0, 0.0, 0.0, 1.0};
};

// (g1 - g2) / (1 + exp(-(q - g3) / g4)) + g2
double Logistic(const LogisticParams& params, double q);

// Least-squares logistic fit: Nelder-Mead from 8 deterministic starts
// (g1 = max MOS, g2 = min MOS, g3 in {median q, mean q}, g4 in {sd q, sd q / 3}
// and their negatives), each restarted from its optimum until it stops
// improving. A run converges when the simplex collapses or the residual
// stalls (near-linear data has no finite optimum). Throws DegenerateData for
// fewer than 5 samples or constant inputs, ConvergenceError when no start
// converges.
LogisticParams FitLogistic(std::span<const double> q, std::span<const double> mos);

double Pearson(std::span<const double> x, std::span<const double> y);

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> FractionalRanks(std::span<const double> values);

double Spearman(std::span<const double> x, std::span<const double> y);

// 10 log10(255^2 / MSE); +inf for identical planes.
double Psnr(const ImagePlane& reference, const ImagePlane& distorted);

struct EvaluationRecord {
  std::string reference_id;
  std::string distortion;
  double score = 0.0;  // objective score Q
  double mos = 0.0;
};

enum class FitMode { kPerGroup, kGlobal };

inline constexpr std::size_t kMinGroupSize = 5;
inline constexpr const char* kAllGroup = "All";

struct GroupResult {
  std::string group;
  std::size_t n = 0;
  bool ok = false;
  std::string diagnostic;  // why the group could not be evaluated
  double plcc = 0.0;
  double srocc = 0.0;
  double rmse = 0.0;
  LogisticParams params;
};

struct EvaluationReport {
  std::vector<GroupResult> groups;  // distortion labels in first-seen order, then "All"
  std::vector<double> predicted;    // MOS_p per record from the "All" mapping

  const GroupResult& all() const { return groups.back(); }
};

// Throws InvalidInput for an empty record list. Groups that cannot be
// evaluated are reported with ok = false and a diagnostic.
EvaluationReport Evaluate(std::span<const EvaluationRecord> records,
                          FitMode mode = FitMode::kPerGroup);

// Aligned text table: one column per group, one row per named report, with a
// correlation-coefficient block followed by a rank-order block.
void WriteReportTable(
    std::ostream& out,
    std::span<const std::pair<std::string, EvaluationReport>> reports);

// group,n,plcc,srocc,rmse,g1,g2,g3,g4
void WriteReportCsv(std::ostream& out, const EvaluationReport& report);

// reference_id,distortion,q,mos,mos_p
void WriteScatterCsv(std::ostream& out,
                     std::span<const EvaluationRecord> records,
                     const EvaluationReport& report);

}  // namespace tetiqa

#endif  // TETIQA_EVAL_H_
