// tetiqa: reduced-reference image quality in the tetrolet domain.
//
//   tetiqa extract   <reference> <features.json>
//   tetiqa measure   <distorted> <features.json>
//   tetiqa compare   <reference> <distorted>
//   tetiqa evaluate  <manifest.csv> [--psnr] [--out-dir DIR]
//   tetiqa tiling                       (debug: coverings and orbits)
//   tetiqa decompose <image> <dump-dir> (debug: plain-text subband dump)
//
// Exit status: 0 success, 1 degenerate computation, 2 usage or I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "tetiqa/errors.h"
#include "tetiqa/eval.h"
#include "tetiqa/image_io.h"
#include "tetiqa/manifest.h"
#include "tetiqa/pipeline.h"
#include "tetiqa/rr_io.h"
#include "tetiqa/tetrolet.h"
#include "tetiqa/tiling.h"

namespace {

using namespace tetiqa;

constexpr int kExitOk = 0;
constexpr int kExitDegenerate = 1;
constexpr int kExitUsage = 2;

void PrintDistances(const Measurement& m) {
  for (const SubbandDistance& d : m.distances) {
    fmt::print("D[scale {}, orientation {}] = {:.6f}\n", d.scale, d.orientation, d.d);
  }
  fmt::print("Q = {:.6f}\n", m.q);
}

std::ofstream OpenOutput(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  return out;
}

int RunExtract(const std::string& image, const std::string& output,
               const RunConfig& config) {
  const RRFeatureSet features = ExtractFromFile(image, config);
  WriteRR(features, output);
  fmt::print("{} ({}x{}) -> {}\n", features.source_id, features.width,
             features.height, output);
  for (const SubbandFeatures& f : features.subbands) {
    fmt::print("scale {} orientation {}: k = {:.6f} lambda = {:.6f} dropped = {:.4f}\n",
               f.scale, f.orientation, f.weibull.shape, f.weibull.scale,
               f.dropped_zero_fraction);
  }
  return kExitOk;
}

int RunMeasure(const std::string& image, const std::string& rr,
               const RunConfig& config) {
  PrintDistances(MeasureFile(image, ReadRR(rr), config));
  return kExitOk;
}

int RunCompare(const std::string& reference, const std::string& distorted,
               const RunConfig& config) {
  PrintDistances(CompareFiles(reference, distorted, config));
  return kExitOk;
}

int RunEvaluate(const std::string& manifest, const RunConfig& config, bool psnr,
                const std::filesystem::path& out_dir) {
  const std::vector<ManifestRow> rows = ParseManifest(manifest);
  const BatchResult batch = ScoreManifest(rows, config, psnr);
  for (const BatchRow& r : batch.rows) {
    if (!r.ok) fmt::print(std::cerr, "skipped {}\n", r.error);
  }
  if (batch.failures) {
    fmt::print(std::cerr, "{} of {} rows failed\n", batch.failures, batch.rows.size());
  }
  const std::vector<EvaluationRecord> records = batch.Records(false);
  if (records.empty()) {
    fmt::print(std::cerr, "evaluate: no row could be scored\n");
    return kExitDegenerate;
  }

  std::vector<std::pair<std::string, EvaluationReport>> reports;
  reports.emplace_back("Proposed", Evaluate(records, config.fit_mode));
  if (psnr) reports.emplace_back("PSNR", Evaluate(batch.Records(true), config.fit_mode));

  fmt::print("# rows={} scored={} levels={} d0={} eps_reg={} fit_mode={} seed={}\n",
             batch.rows.size(), records.size(), config.levels, config.d0,
             config.epsilon_reg,
             config.fit_mode == FitMode::kGlobal ? "global" : "per-group",
             config.seed);
  WriteReportTable(std::cout, reports);

  std::filesystem::create_directories(out_dir);
  {
    auto out = OpenOutput(out_dir / "report.csv");
    WriteReportCsv(out, reports[0].second);
  }
  {
    auto out = OpenOutput(out_dir / "scatter.csv");
    WriteScatterCsv(out, records, reports[0].second);
  }
  if (psnr) {
    auto out = OpenOutput(out_dir / "report_psnr.csv");
    WriteReportCsv(out, reports[1].second);
  }

  const GroupResult& all = reports[0].second.all();
  if (!all.ok) {
    fmt::print(std::cerr, "evaluate: overall fit rejected: {}\n", all.diagnostic);
    return kExitDegenerate;
  }
  return kExitOk;
}

int RunTiling() {
  const std::vector<Covering>& coverings = CoveringDictionary();
  fmt::print("{} coverings\n", coverings.size());
  for (const Covering& c : coverings) {
    fmt::print("#{}\n{}", c.index, FormatCovering(c));
  }
  const auto orbits = FundamentalForms(coverings);
  fmt::print("\n{} fundamental forms (representative index: orbit size)\n",
             orbits.size());
  for (const auto& orbit : orbits) {
    fmt::print("#{}: {}\n{}", orbit.front(), orbit.size(),
               FormatCovering(coverings[orbit.front()]));
  }
  return kExitOk;
}

int RunDecompose(const std::string& image, const std::string& dir,
                 const RunConfig& config) {
  const CropResult crop = CropToTransformSize(LoadGrayscale(image), config.levels);
  WriteDecompositionDump(Forward(crop.plane, config.levels), dir);
  fmt::print("{}x{} (offset {}, {}) -> {}\n", crop.plane.width(),
             crop.plane.height(), crop.offset_x, crop.offset_y, dir);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-reference image quality in the tetrolet domain"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig config;
  std::string fit_mode = "per-group";
  bool psnr = false;
  std::string out_dir = ".";
  app.add_option("--levels", config.levels, "Tetrolet decomposition levels")
      ->check(CLI::Range(1, 8));
  app.add_option("--d0", config.d0, "Pooling scale constant D0")
      ->check(CLI::PositiveNumber);
  app.add_option("--eps-reg", config.epsilon_reg,
                 "Relative diagonal regularization of covariances")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--fit-mode", fit_mode, "Logistic fit: per-group or global")
      ->check(CLI::IsMember({"per-group", "global"}));
  app.add_option("--seed", config.seed, "Seed echoed in reports");
  app.add_flag("--psnr", psnr, "Add the PSNR comparator to evaluate");
  app.add_option("--out-dir", out_dir, "Directory for evaluate CSV output");

  std::string first, second;
  auto* extract = app.add_subcommand("extract", "Write RR features of a reference image");
  extract->add_option("image", first)->required();
  extract->add_option("features", second)->required();
  auto* measure = app.add_subcommand("measure", "Score a distorted image against RR features");
  measure->add_option("image", first)->required();
  measure->add_option("features", second)->required();
  auto* compare = app.add_subcommand("compare", "Score a distorted image against its reference");
  compare->add_option("reference", first)->required();
  compare->add_option("distorted", second)->required();
  auto* evaluate = app.add_subcommand("evaluate", "Correlate scores with MOS over a manifest");
  evaluate->add_option("manifest", first)->required();
  auto* tiling = app.add_subcommand("tiling", "Dump the covering dictionary");
  auto* decompose = app.add_subcommand("decompose", "Dump a tetrolet decomposition");
  decompose->add_option("image", first)->required();
  decompose->add_option("directory", second)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  config.fit_mode = fit_mode == "global" ? FitMode::kGlobal : FitMode::kPerGroup;

  try {
    if (extract->parsed()) return RunExtract(first, second, config);
    if (measure->parsed()) return RunMeasure(first, second, config);
    if (compare->parsed()) return RunCompare(first, second, config);
    if (evaluate->parsed()) return RunEvaluate(first, config, psnr, out_dir);
    if (tiling->parsed()) return RunTiling();
    if (decompose->parsed()) return RunDecompose(first, second, config);
  } catch (const DegenerateData& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kExitDegenerate;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
