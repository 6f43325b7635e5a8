#include "tetiqa/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include <fmt/format.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "tetiqa/errors.h"

namespace tetiqa {
namespace {

constexpr int kMaxSimplexIterations = 20000;
constexpr int kMaxRestarts = 20;
constexpr double kRelativeSizeTolerance = 1e-11;
// Near-linear data has its least-squares optimum at infinity (g4 and
// g1 - g2 growing together), so the simplex never shrinks. Such a run is
// accepted once the residual stops moving over a window of iterations.
constexpr int kStagnationWindow = 1000;
constexpr double kStagnationTolerance = 1e-12;

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const {
    gsl_multimin_fminimizer_free(m);
  }
};
using GslVector = std::unique_ptr<gsl_vector, VectorDeleter>;
using GslMinimizer = std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter>;

GslVector MakeVector(const std::array<double, 4>& values) {
  GslVector v(gsl_vector_alloc(4));
  for (std::size_t i = 0; i < 4; ++i) gsl_vector_set(v.get(), i, values[i]);
  return v;
}

struct FitData {
  std::span<const double> q;
  std::span<const double> mos;
};

double SumSquaredError(const LogisticParams& params, const FitData& data) {
  double sse = 0.0;
  for (std::size_t i = 0; i < data.q.size(); ++i) {
    const double r = data.mos[i] - Logistic(params, data.q[i]);
    sse += r * r;
  }
  return std::isfinite(sse) ? sse : std::numeric_limits<double>::max();
}

double SimplexObjective(const gsl_vector* x, void* opaque) {
  LogisticParams p;
  for (std::size_t i = 0; i < 4; ++i) p.gamma[i] = gsl_vector_get(x, i);
  if (p.gamma[3] == 0.0) return std::numeric_limits<double>::max();
  return SumSquaredError(p, *static_cast<const FitData*>(opaque));
}

struct SimplexResult {
  LogisticParams params;
  double sse = 0.0;
  bool converged = false;
};

SimplexResult RunSimplex(const FitData& data, const LogisticParams& start,
                         const std::array<double, 4>& steps, double tolerance) {
  gsl_multimin_function fn{&SimplexObjective, 4,
                           const_cast<FitData*>(&data)};
  GslVector x = MakeVector(start.gamma);
  GslVector step = MakeVector(steps);
  GslMinimizer minimizer(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 4));
  gsl_multimin_fminimizer_set(minimizer.get(), &fn, x.get(), step.get());

  SimplexResult result;
  double window_start_sse = minimizer->fval;
  for (int iter = 0; iter < kMaxSimplexIterations; ++iter) {
    const int status = gsl_multimin_fminimizer_iterate(minimizer.get());
    if (status == GSL_ENOPROG) {
      result.converged = true;
      break;
    }
    if (status != GSL_SUCCESS) break;
    const double size = gsl_multimin_fminimizer_size(minimizer.get());
    if (gsl_multimin_test_size(size, tolerance) == GSL_SUCCESS) {
      result.converged = true;
      break;
    }
    if ((iter + 1) % kStagnationWindow == 0) {
      const double sse = minimizer->fval;
      if (window_start_sse - sse <= kStagnationTolerance * window_start_sse) {
        result.converged = true;
        break;
      }
      window_start_sse = sse;
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    result.params.gamma[i] = gsl_vector_get(minimizer->x, i);
  }
  result.sse = minimizer->fval;
  return result;
}

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double StdDev(std::span<const double> v) {
  const double m = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double Median(std::span<const double> v) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  return n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

void CheckPaired(std::span<const double> x, std::span<const double> y,
                 std::size_t minimum, const char* what) {
  if (x.size() != y.size()) {
    throw InvalidInput(fmt::format("{}: length mismatch ({} vs {})", what,
                                   x.size(), y.size()));
  }
  if (x.size() < minimum) {
    throw DegenerateData(fmt::format("{}: need at least {} pairs, got {}", what,
                                     minimum, x.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw DegenerateData(fmt::format("{}: non-finite value at {}", what, i));
    }
  }
}

GroupResult EvaluateGroup(std::string name,
                          std::span<const EvaluationRecord> records,
                          std::span<const std::size_t> members,
                          const LogisticParams* fixed_mapping) {
  GroupResult g;
  g.group = std::move(name);
  g.n = members.size();
  if (g.n < kMinGroupSize) {
    g.diagnostic = fmt::format("insufficient data (n = {} < {})", g.n, kMinGroupSize);
    return g;
  }
  std::vector<double> q, mos;
  for (std::size_t i : members) {
    q.push_back(records[i].score);
    mos.push_back(records[i].mos);
  }
  try {
    g.params = fixed_mapping ? *fixed_mapping : FitLogistic(q, mos);
    std::vector<double> predicted(q.size());
    double sse = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      predicted[i] = Logistic(g.params, q[i]);
      sse += (predicted[i] - mos[i]) * (predicted[i] - mos[i]);
    }
    g.rmse = std::sqrt(sse / static_cast<double>(q.size()));
    g.plcc = Pearson(predicted, mos);
    g.srocc = Spearman(q, mos);
    g.ok = true;
  } catch (const DegenerateData& e) {
    g.diagnostic = e.what();
  }
  return g;
}

std::string Cell(const GroupResult& g, double value) {
  return g.ok ? fmt::format("{:.2f}", value) : std::string("n/a");
}

}  // namespace

double Logistic(const LogisticParams& params, double q) {
  const auto& g = params.gamma;
  return (g[0] - g[1]) / (1.0 + std::exp(-(q - g[2]) / g[3])) + g[1];
}

LogisticParams FitLogistic(std::span<const double> q, std::span<const double> mos) {
  CheckPaired(q, mos, kMinGroupSize, "fit_logistic");
  const auto [q_min, q_max] = std::minmax_element(q.begin(), q.end());
  const auto [m_min, m_max] = std::minmax_element(mos.begin(), mos.end());
  if (*q_min == *q_max) throw DegenerateData("fit_logistic: objective scores are constant");
  if (*m_min == *m_max) throw DegenerateData("fit_logistic: MOS values are constant");

  static const bool kGslQuiet = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)kGslQuiet;

  const FitData data{q, mos};
  const double q_sd = StdDev(q);
  const double mos_range = *m_max - *m_min;
  const double tolerance = kRelativeSizeTolerance * (mos_range + q_sd);

  SimplexResult best;  // best converged run
  best.sse = std::numeric_limits<double>::infinity();
  double best_any_sse = std::numeric_limits<double>::infinity();
  for (double center : {Median(q), Mean(q)}) {
    for (double width : {q_sd, q_sd / 3.0}) {
      for (double sign : {1.0, -1.0}) {
        LogisticParams start;
        start.gamma = {*m_max, *m_min, center, sign * width};
        const std::array<double, 4> steps = {0.1 * mos_range, 0.1 * mos_range,
                                             0.1 * q_sd, 0.5 * width};
        SimplexResult run = RunSimplex(data, start, steps, tolerance);
        // Restart from the optimum with a fresh simplex until the residual
        // stops improving.
        for (int r = 0; r < kMaxRestarts && run.converged; ++r) {
          std::array<double, 4> restart_steps;
          for (std::size_t i = 0; i < 4; ++i) {
            restart_steps[i] =
                std::max(0.01 * std::abs(run.params.gamma[i]), 0.01 * steps[i]);
          }
          const SimplexResult again =
              RunSimplex(data, run.params, restart_steps, tolerance);
          const bool improved = again.sse < run.sse * (1.0 - 1e-12);
          if (again.sse <= run.sse) run = again;
          if (!improved) break;
        }
        best_any_sse = std::min(best_any_sse, run.sse);
        if (run.converged && run.sse < best.sse) best = run;
      }
    }
  }
  if (!best.converged) {
    throw ConvergenceError(
        fmt::format("fit_logistic: no start converged (best SSE {})", best_any_sse),
        best_any_sse);
  }
  return best.params;
}

double Pearson(std::span<const double> x, std::span<const double> y) {
  CheckPaired(x, y, 3, "pearson");
  const double mx = Mean(x);
  const double my = Mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateData("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> FractionalRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Spearman(std::span<const double> x, std::span<const double> y) {
  CheckPaired(x, y, 3, "spearman");
  const std::vector<double> rx = FractionalRanks(x);
  const std::vector<double> ry = FractionalRanks(y);
  try {
    return Pearson(rx, ry);
  } catch (const DegenerateData&) {
    throw DegenerateData("spearman: all values of one variable are equal");
  }
}

double Psnr(const ImagePlane& reference, const ImagePlane& distorted) {
  if (reference.width() != distorted.width() ||
      reference.height() != distorted.height() || reference.empty()) {
    throw InvalidInput(fmt::format("psnr: size mismatch ({}x{} vs {}x{})",
                                   reference.width(), reference.height(),
                                   distorted.width(), distorted.height()));
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference.samples()[i] - distorted.samples()[i];
    sse += d * d;
  }
  const double mse = sse / static_cast<double>(reference.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

EvaluationReport Evaluate(std::span<const EvaluationRecord> records, FitMode mode) {
  if (records.empty()) throw InvalidInput("evaluate: no records");

  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::size_t> everyone(records.size());
  std::iota(everyone.begin(), everyone.end(), 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto it = std::find(labels.begin(), labels.end(), records[i].distortion);
    if (it == labels.end()) {
      labels.push_back(records[i].distortion);
      members.push_back({i});
    } else {
      members[static_cast<std::size_t>(it - labels.begin())].push_back(i);
    }
  }

  EvaluationReport report;
  GroupResult all = EvaluateGroup(kAllGroup, records, everyone, nullptr);
  const LogisticParams* shared =
      mode == FitMode::kGlobal && all.ok ? &all.params : nullptr;
  for (std::size_t g = 0; g < labels.size(); ++g) {
    if (mode == FitMode::kGlobal && !all.ok) {
      GroupResult failed;
      failed.group = labels[g];
      failed.n = members[g].size();
      failed.diagnostic = "global mapping unavailable: " + all.diagnostic;
      report.groups.push_back(std::move(failed));
      continue;
    }
    report.groups.push_back(EvaluateGroup(labels[g], records, members[g], shared));
  }
  if (all.ok) {
    for (const EvaluationRecord& r : records) {
      report.predicted.push_back(Logistic(all.params, r.score));
    }
  }
  report.groups.push_back(std::move(all));
  return report;
}

void WriteReportTable(
    std::ostream& out,
    std::span<const std::pair<std::string, EvaluationReport>> reports) {
  if (reports.empty()) return;
  const std::vector<GroupResult>& columns = reports.front().second.groups;
  std::size_t name_width = 10;
  for (const auto& [name, report] : reports) {
    name_width = std::max(name_width, name.size() + 2);
  }
  const auto header = [&] {
    std::string line = fmt::format("{:<{}}", "Dataset", name_width);
    for (const GroupResult& g : columns) line += fmt::format("{:>8}", g.group);
    return line;
  };
  const auto block = [&](const char* title, auto value) {
    out << title << '\n';
    for (const auto& [name, report] : reports) {
      std::string line = fmt::format("{:<{}}", name, name_width);
      for (const GroupResult& g : report.groups) {
        line += fmt::format("{:>8}", Cell(g, value(g)));
      }
      out << line << '\n';
    }
  };
  out << header() << '\n';
  block("Correlation Coefficient", [](const GroupResult& g) { return g.plcc; });
  block("Rank-Order Correlation Coefficient",
        [](const GroupResult& g) { return g.srocc; });
  for (const auto& [name, report] : reports) {
    for (const GroupResult& g : report.groups) {
      if (!g.ok) out << name << " / " << g.group << ": " << g.diagnostic << '\n';
    }
  }
}

void WriteReportCsv(std::ostream& out, const EvaluationReport& report) {
  out << "group,n,plcc,srocc,rmse,g1,g2,g3,g4\n";
  for (const GroupResult& g : report.groups) {
    if (!g.ok) {
      out << fmt::format("{},{},,,,,,,\n", g.group, g.n);
      continue;
    }
    out << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                       g.group, g.n, g.plcc, g.srocc, g.rmse, g.params.gamma[0],
                       g.params.gamma[1], g.params.gamma[2], g.params.gamma[3]);
  }
}

void WriteScatterCsv(std::ostream& out,
                     std::span<const EvaluationRecord> records,
                     const EvaluationReport& report) {
  out << "reference_id,distortion,q,mos,mos_p\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const EvaluationRecord& r = records[i];
    const std::string predicted =
        i < report.predicted.size() ? fmt::format("{:.17g}", report.predicted[i]) : "";
    out << fmt::format("{},{},{:.17g},{:.17g},{}\n", r.reference_id, r.distortion,
                       r.score, r.mos, predicted);
  }
}

}  // namespace tetiqa
