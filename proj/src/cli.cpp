#include "hypoquant/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hypoquant/csv.hpp"
#include "hypoquant/heatmap.hpp"
#include "hypoquant/phantom.hpp"
#include "hypoquant/pipeline.hpp"

namespace hypoquant::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("HYPOQUANT_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("HYPOQUANT_SEED is not an unsigned integer: '") + env + "'");
  }
  return 42;
}

Rect parse_rect(const std::string& text) {
  std::vector<int> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--ref-rect expects row0,col0,rows,cols, got '" + text + "'");
    }
  }
  if (parts.size() != 4) throw UsageError("--ref-rect expects row0,col0,rows,cols, got '" + text + "'");
  return Rect{parts[0], parts[1], parts[2], parts[3]};
}

/// Flags shared by every subcommand that reads a manifest.
struct CommonFlags {
  std::string manifest;
  std::string hemisphere = "whole";
  std::string outDir = ".";
  unsigned threads = 1;
};

struct BinaryFlags {
  std::string threshold = "adaptive";
  std::size_t k = 101;
  std::string refRect;
  std::size_t tessellation = 0;
};

struct NonbinaryFlags {
  std::string sampling = "balanced";
  std::uint64_t seed = 42;
  double variance = 0.70;
  std::string rowNorm = "none";
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--manifest", f.manifest, "Dataset manifest (JSON)")->required();
  app->add_option("--hemisphere", f.hemisphere, "left, right or whole")
      ->check(CLI::IsMember({"left", "right", "whole"}));
  app->add_option("--out", f.outDir, "Output directory");
  app->add_option("--threads", f.threads, "Worker threads")->check(CLI::Range(1u, 256u));
}

void add_binary(CLI::App* app, BinaryFlags& f, bool withTessellation) {
  app->add_option("--threshold", f.threshold, "adaptive or reference")
      ->check(CLI::IsMember({"adaptive", "reference"}));
  app->add_option("--k", f.k, "Adaptive threshold candidate count")->check(CLI::Range(2, 100000));
  app->add_option("--ref-rect", f.refRect, "Reference rectangle row0,col0,rows,cols");
  if (withTessellation)
    app->add_option("--tessellation", f.tessellation, "Radial band count (0 = none)");
}

void add_nonbinary(CLI::App* app, NonbinaryFlags& f) {
  app->add_option("--sampling", f.sampling, "balanced or shuffle")
      ->check(CLI::IsMember({"balanced", "shuffle"}));
  app->add_option("--seed", f.seed, "Shuffle sampling seed (env HYPOQUANT_SEED, default 42)");
  app->add_option("--variance", f.variance, "Fraction of variance to retain")
      ->check(CLI::Range(1e-9, 1.0));
  app->add_option("--row-norm", f.rowNorm, "none or roi: (v - mean) / mean per row")
      ->check(CLI::IsMember({"none", "roi"}));
}

BinaryOptions binary_options(const CommonFlags& c, const BinaryFlags& f) {
  BinaryOptions o;
  o.hemisphere = parse_hemisphere(c.hemisphere);
  o.mode = f.threshold == "reference" ? ThresholdMode::reference : ThresholdMode::adaptive;
  o.candidates = f.k;
  if (o.mode == ThresholdMode::reference) {
    if (f.refRect.empty()) throw UsageError("--threshold reference requires --ref-rect");
    o.referenceRect = parse_rect(f.refRect);
  }
  o.tessellation = f.tessellation;
  o.threads = c.threads;
  return o;
}

NonbinaryOptions nonbinary_options(const CommonFlags& c, const NonbinaryFlags& f, std::uint64_t seed) {
  NonbinaryOptions o;
  o.hemisphere = parse_hemisphere(c.hemisphere);
  o.sampling = parse_sampling(f.sampling);
  o.seed = seed;
  o.varianceFraction = f.variance;
  o.rowNormalization = f.rowNorm == "roi" ? RowNormalization::roi : RowNormalization::none;
  o.threads = c.threads;
  return o;
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (!fs::is_directory(p)) throw Error("output directory '" + dir + "' is not usable");
  return p;
}

std::vector<std::string> numbered(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

CsvTable ranking_table(const Ranking& ranking, const std::vector<std::string>& ids,
                       std::span<const double> scores) {
  std::map<std::string, double> score;
  for (std::size_t i = 0; i < ids.size(); ++i) score[ids[i]] = scores[i];
  CsvTable t({"rank", "id", "score"});
  for (std::size_t i = 0; i < ranking.orderedIds.size(); ++i)
    t.add_row({std::to_string(i + 1), ranking.orderedIds[i], format_real(score.at(ranking.orderedIds[i]))});
  return t;
}

void write_binary_outputs(const fs::path& out, const BinaryOutcome& b, std::size_t bands,
                          const Dataset& d) {
  std::vector<std::string> header{"id", "threshold", "hypoLoad"};
  for (auto& name : numbered("f", bands)) header.push_back(name);
  CsvTable loads(header);
  auto features = b.band_features();
  for (std::size_t i = 0; i < b.results.size(); ++i) {
    std::vector<std::string> row{b.results[i].subjectId, format_real(b.results[i].threshold),
                                 format_real(b.results[i].hypoLoad)};
    if (bands)
      for (double f : features[i]) row.push_back(format_real(f));
    loads.add_row(std::move(row));
  }
  loads.write(out / "hypoload.csv");
  if (b.report) {
    CsvTable report({"threshold", "tpr", "fpr", "youden", "chosen"});
    for (std::size_t k = 0; k < b.report->candidates.size(); ++k) {
      const auto& c = b.report->candidates[k];
      report.add_row({format_real(c.threshold), format_real(c.tpr), format_real(c.fpr),
                      format_real(c.tpr - c.fpr), k == b.report->chosenIndex ? "1" : "0"});
    }
    report.write(out / "threshold_report.csv");
  }
  ranking_table(b.ranking, d.ids(), b.hypo_loads()).write(out / "ranking.csv");
}

void write_nonbinary_outputs(const fs::path& out, const NonbinaryOutcome& nb) {
  std::vector<std::string> header{"id"};
  for (auto& name : numbered("g", nb.model.retained)) header.push_back(name);
  CsvTable proj(header);
  for (const auto& p : nb.projections) {
    std::vector<std::string> row{p.subjectId};
    for (double g : p.g) row.push_back(format_real(g));
    proj.add_row(std::move(row));
  }
  proj.write(out / "projections.csv");

  std::map<std::string, std::size_t> rankOf;
  for (std::size_t i = 0; i < nb.result.ranking.orderedIds.size(); ++i)
    rankOf[nb.result.ranking.orderedIds[i]] = i + 1;
  CsvTable dist({"id", "distance", "rank"});
  for (std::size_t i = 0; i < nb.result.ids.size(); ++i)
    dist.add_row({nb.result.ids[i], format_real(nb.result.distances[i]),
                  std::to_string(rankOf.at(nb.result.ids[i]))});
  dist.write(out / "distances.csv");

  CsvTable eig({"component", "eigenvalue", "cumulative_fraction", "retained"});
  double total = 0.0, cumulative = 0.0;
  for (double v : nb.model.eigenvalues) total += v;
  for (std::size_t k = 0; k < nb.model.eigenvalues.size(); ++k) {
    cumulative += nb.model.eigenvalues[k];
    eig.add_row({std::to_string(k + 1), format_real(nb.model.eigenvalues[k]),
                 format_real(cumulative / total), k < nb.model.retained ? "1" : "0"});
  }
  eig.write(out / "eigenvalues.csv");
  ranking_table(nb.result.ranking, nb.result.ids, nb.result.distances).write(out / "ranking.csv");
}

CsvTable feature_table(const std::vector<std::string>& ids, const std::string& prefix,
                       const std::vector<std::vector<double>>& values) {
  std::vector<std::string> header{"id"};
  for (auto& name : numbered(prefix, values.empty() ? 0 : values.front().size())) header.push_back(name);
  CsvTable t(header);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<std::string> row{ids[i]};
    for (double v : values[i]) row.push_back(format_real(v));
    t.add_row(std::move(row));
  }
  return t;
}

std::vector<std::size_t> parse_size_list(const std::vector<std::string>& items, const char* flag) {
  std::vector<std::size_t> out;
  for (const auto& s : items) {
    try {
      std::size_t used = 0;
      unsigned long v = std::stoul(s, &used);
      if (used != s.size() || v == 0) throw std::invalid_argument(s);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + " expects positive integers, got '" + s + "'");
    }
  }
  return out;
}

Clustering load_truth(const std::string& path) {
  if (fs::path(path).extension() == ".csv") {
    CsvTable t = read_csv(path);
    const auto& h = t.header();
    auto idCol = std::find(h.begin(), h.end(), "id");
    auto clCol = std::find(h.begin(), h.end(), "cluster");
    if (idCol == h.end() || clCol == h.end())
      throw FormatError(path + ": truth CSV needs 'id' and 'cluster' columns");
    std::vector<std::string> ids;
    std::vector<Cluster> labels;
    for (const auto& row : t.rows()) {
      ids.push_back(row[static_cast<std::size_t>(idCol - h.begin())]);
      const auto& name = row[static_cast<std::size_t>(clCol - h.begin())];
      auto c = parse_cluster(name);
      if (!c) throw DataError(path + ": invalid cluster '" + name + "' for subject '" + ids.back() + "'");
      labels.push_back(*c);
    }
    return clustering_from_labels(ids, labels);
  }
  return ground_truth(load_manifest(path));
}

Ranking load_ranking(const std::string& path) {
  CsvTable t = read_csv(path);
  auto idCol = std::find(t.header().begin(), t.header().end(), "id");
  if (idCol == t.header().end()) throw FormatError(path + ": ranking CSV needs an 'id' column");
  Ranking r;
  for (const auto& row : t.rows()) r.orderedIds.push_back(row[static_cast<std::size_t>(idCol - t.header().begin())]);
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hypointensity quantification in ROI masks of grayscale MR slices", "hypoquant"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::uint64_t seed = 42;
  try {
    seed = default_seed();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  // phantom
  PhantomSpec spec;
  spec.seed = seed;
  std::string phantomOut;
  double noiseRatio = 0.1;
  auto* phantom = app.add_subcommand("phantom", "Generate a synthetic dataset with planted ground truth");
  phantom->add_option("--out", phantomOut, "Output directory")->required();
  phantom->add_option("--subjects", spec.subjectCount, "Subject count")->check(CLI::Range(1, 100000));
  phantom->add_option("--width", spec.width, "Image width")->check(CLI::Range(8, 4096));
  phantom->add_option("--height", spec.height, "Image height")->check(CLI::Range(8, 4096));
  phantom->add_option("--seed", spec.seed, "Generator seed");
  phantom->add_option("--base", spec.baseIntensity, "Tissue intensity");
  phantom->add_option("--delta", spec.darkDelta, "Intensity drop inside the blob");
  phantom->add_option("--noise-ratio", noiseRatio, "Noise sigma as a fraction of --delta")
      ->check(CLI::Range(0.0, 10.0));
  phantom->add_option("--max-fraction", spec.maxFraction, "Largest planted blob fraction")
      ->check(CLI::Range(0.0, 0.999));
  phantom->add_option("--jitter", spec.radiusJitter, "Per-subject ROI radius jitter (pixels)");
  phantom->add_option("--air-margin", spec.airMargin, "Zero-intensity border width");

  // binary
  CommonFlags binC;
  BinaryFlags binF;
  auto* binary = app.add_subcommand("binary", "HypoLoad per subject (threshold-based description)");
  add_common(binary, binC);
  add_binary(binary, binF, true);

  // nonbinary
  CommonFlags nbC;
  BinaryFlags nbB;
  NonbinaryFlags nbF;
  nbF.seed = seed;
  auto* nonbinary = app.add_subcommand("nonbinary", "Eigenspace distance to the darkest subject");
  add_common(nonbinary, nbC);
  add_binary(nonbinary, nbB, false);
  add_nonbinary(nonbinary, nbF);

  // features
  CommonFlags ftC;
  BinaryFlags ftB;
  NonbinaryFlags ftF;
  ftF.seed = seed;
  ftB.tessellation = 10;
  auto* features = app.add_subcommand("features", "Band hypointensities and eigenspace coefficients");
  add_common(features, ftC);
  add_binary(features, ftB, true);
  add_nonbinary(features, ftF);

  // correlate
  CommonFlags coC;
  BinaryFlags coB;
  NonbinaryFlags coF;
  coF.seed = seed;
  coB.tessellation = 10;
  std::vector<std::string> featureKinds{"binary", "nonbinary"};
  std::string mode = "single";
  std::vector<std::string> tessList{"2", "3", "4", "5", "6", "7", "8", "9", "10"};
  std::vector<std::string> descList{"1", "2", "3", "4", "5", "6", "7"};
  std::size_t runs = 1;
  std::size_t components = 0;
  bool ppm = false;
  auto* correlate = app.add_subcommand("correlate", "Kendall tau heat maps between features");
  add_common(correlate, coC);
  add_binary(correlate, coB, true);
  add_nonbinary(correlate, coF);
  correlate->add_option("--features", featureKinds, "binary,nonbinary")
      ->delimiter(',')
      ->check(CLI::IsMember({"binary", "nonbinary"}));
  correlate->add_option("--mode", mode, "single (per-feature) or multiple (descriptions)")
      ->check(CLI::IsMember({"single", "multiple"}));
  correlate->add_option("--tessellations", tessList, "Binary description sizes (multiple mode)")->delimiter(',');
  correlate->add_option("--descriptions", descList, "Nonbinary description sizes (multiple mode)")->delimiter(',');
  correlate->add_option("--runs", runs, "Runs averaged, seeds seed..seed+runs-1")->check(CLI::Range(1, 10000));
  correlate->add_option("--components", components, "Nonbinary feature count (0 = retained)");
  correlate->add_flag("--ppm", ppm, "Also render PPM heat maps");

  // evaluate
  std::string predicted, truth, evalOut = ".";
  auto* evaluate = app.add_subcommand("evaluate", "Cluster agreement of a ranking with ground truth");
  evaluate->add_option("--predicted", predicted, "Ranking CSV (column 'id', light to dark)")->required();
  evaluate->add_option("--truth", truth, "Manifest JSON or CSV with id,cluster")->required();
  evaluate->add_option("--out", evalOut, "Output directory");

  std::vector<char*> argv;
  std::vector<std::string> storage = args.empty() ? std::vector<std::string>{"hypoquant"} : args;
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    if (phantom->parsed()) {
      spec.noiseSigma = spec.darkDelta * noiseRatio;
      spec.fit_geometry();
      auto data = write_phantom(spec, phantomOut);
      Rect r = spec.reference_rect();
      out << "wrote " << data.dataset.size() << " subjects to " << phantomOut << "\n"
          << "reference rectangle: " << r.row0 << "," << r.col0 << "," << r.rows << "," << r.cols << "\n";
    } else if (binary->parsed()) {
      auto opts = binary_options(binC, binF);
      auto dir = prepare_out(binC.outDir);
      Dataset d = load_manifest(binC.manifest);
      auto b = run_binary(d, opts);
      write_binary_outputs(dir, b, opts.tessellation, d);
      if (b.report) out << "adaptive threshold: " << format_real(b.report->chosen()) << "\n";
    } else if (nonbinary->parsed()) {
      auto bopts = binary_options(nbC, nbB);
      auto nopts = nonbinary_options(nbC, nbF, nbF.seed);
      auto dir = prepare_out(nbC.outDir);
      Dataset d = load_manifest(nbC.manifest);
      auto b = run_binary(d, bopts);
      auto nb = run_nonbinary(d, nopts, b.hypo_loads());
      write_nonbinary_outputs(dir, nb);
      out << "reference subject: " << nb.result.referenceId << ", retained components: "
          << nb.model.retained << "\n";
    } else if (features->parsed()) {
      if (ftB.tessellation == 0) throw UsageError("--tessellation must be positive");
      auto bopts = binary_options(ftC, ftB);
      auto nopts = nonbinary_options(ftC, ftF, ftF.seed);
      auto dir = prepare_out(ftC.outDir);
      Dataset d = load_manifest(ftC.manifest);
      auto b = run_binary(d, bopts);
      auto nb = run_nonbinary(d, nopts, b.hypo_loads());
      feature_table(d.ids(), "f", b.band_features()).write(dir / "binary_features.csv");
      std::vector<std::vector<double>> g;
      for (const auto& p : nb.projections) g.push_back(nonbinary_features(p));
      feature_table(d.ids(), "g", g).write(dir / "nonbinary_features.csv");
    } else if (correlate->parsed()) {
      bool wantBinary = std::find(featureKinds.begin(), featureKinds.end(), "binary") != featureKinds.end();
      bool wantNonbinary =
          std::find(featureKinds.begin(), featureKinds.end(), "nonbinary") != featureKinds.end();
      auto dir = prepare_out(coC.outDir);
      Dataset d = load_manifest(coC.manifest);

      std::vector<std::size_t> tessellations =
          mode == "single" ? std::vector<std::size_t>{coB.tessellation} : parse_size_list(tessList, "--tessellations");
      if (tessellations.empty() || tessellations.front() == 0)
        throw UsageError("--tessellation must be positive");

      // Binary features do not depend on the sampling seed.
      std::vector<Feature> binaryFeatures;
      std::vector<double> hypoLoads;
      for (std::size_t bands : tessellations) {
        BinaryFlags f = coB;
        f.tessellation = bands;
        auto b = run_binary(d, binary_options(coC, f));
        hypoLoads = b.hypo_loads();
        auto bf = b.band_features();
        if (mode == "single") {
          for (std::size_t k = 0; k < bands; ++k) {
            std::vector<double> column;
            for (const auto& v : bf) column.push_back(v[k]);
            binaryFeatures.push_back(scalar_feature("f" + std::to_string(k + 1), column));
          }
        } else {
          binaryFeatures.push_back(Feature{"binary=" + std::to_string(bands), bf});
        }
      }

      std::vector<CorrMatrix> bb, nn, bn;
      for (std::size_t run = 0; run < runs; ++run) {
        std::vector<Feature> nonbinaryFeatures;
        if (wantNonbinary) {
          auto nb = run_nonbinary(d, nonbinary_options(coC, coF, coF.seed + run), hypoLoads);
          std::vector<std::vector<double>> coeffs;
          for (const auto& r : nb.rows) coeffs.push_back(project_all(nb.model, r.values));
          const std::size_t available = nb.model.eigenvectors.size();
          if (mode == "single") {
            std::size_t count = components ? components : nb.model.retained;
            if (count > available)
              throw DataError("--components " + std::to_string(count) + " exceeds the " +
                              std::to_string(available) + " available eigenvectors");
            for (std::size_t k = 0; k < count; ++k) {
              std::vector<double> column;
              for (const auto& c : coeffs) column.push_back(c[k]);
              nonbinaryFeatures.push_back(scalar_feature("g" + std::to_string(k + 1), column));
            }
          } else {
            for (std::size_t k : parse_size_list(descList, "--descriptions")) {
              if (k > available)
                throw DataError("nonbinary description " + std::to_string(k) + " exceeds the " +
                                std::to_string(available) + " available eigenvectors");
              std::vector<std::vector<double>> desc;
              for (const auto& c : coeffs) desc.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(k));
              nonbinaryFeatures.push_back(Feature{"nonbinary=" + std::to_string(k), desc});
            }
          }
        }
        if (wantBinary && run == 0) bb.push_back(correlation_matrix(binaryFeatures, binaryFeatures, coC.threads));
        if (wantNonbinary) nn.push_back(correlation_matrix(nonbinaryFeatures, nonbinaryFeatures, coC.threads));
        if (wantBinary && wantNonbinary)
          bn.push_back(correlation_matrix(binaryFeatures, nonbinaryFeatures, coC.threads));
      }
      auto emit = [&](const std::vector<CorrMatrix>& ms, const std::string& name) {
        if (ms.empty()) return;
        CorrMatrix m = average_matrices(ms);
        correlation_table(m).write(dir / (name + ".csv"));
        if (ppm) save_heatmap_ppm(dir / (name + ".ppm"), m);
      };
      emit(bb, "corr_binary_binary");
      emit(nn, "corr_nonbinary_nonbinary");
      emit(bn, "corr_binary_nonbinary");
    } else if (evaluate->parsed()) {
      auto dir = prepare_out(evalOut);
      Clustering gt = load_truth(truth);
      Ranking ranking = load_ranking(predicted);
      Clustering pred = rank_to_clusters(ranking, cluster_sizes(gt));
      AccuracyReport report = accuracy(pred, gt);

      // Table layout: per cluster, ground-truth ids beside evaluated ids.
      CsvTable table({"cluster", "ground_truth", "evaluated", "common"});
      for (const auto& a : report.clusters) {
        std::vector<std::string> gtIds, predIds;
        for (const auto& [id, c] : gt.assignment)
          if (c == a.cluster) gtIds.push_back(id);
        for (const auto& id : ranking.orderedIds)
          if (pred.assignment.at(id) == a.cluster) predIds.push_back(id);
        for (std::size_t i = 0; i < gtIds.size(); ++i)
          table.add_row({i == 0 ? std::string(to_string(a.cluster)) : "", gtIds[i], predIds[i],
                         i == 0 ? std::to_string(a.common) : ""});
      }
      table.write(dir / "comparison.csv");

      CsvTable acc({"cluster", "common", "size", "ratio"});
      for (const auto& a : report.clusters)
        acc.add_row({std::string(to_string(a.cluster)), std::to_string(a.common), std::to_string(a.truthSize),
                     format_real(static_cast<double>(a.common) / static_cast<double>(a.truthSize))});
      acc.add_row({"accuracy", "", "", format_real(report.accuracy)});
      acc.write(dir / "accuracy.csv");
      out << "accuracy: " << format_real(report.accuracy) << "\n";
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace hypoquant::cli
