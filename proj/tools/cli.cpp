#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "alaam/effects.hpp"
#include "alaam/ee.hpp"
#include "alaam/error.hpp"
#include "alaam/inference.hpp"
#include "alaam/network.hpp"
#include "alaam/rng.hpp"
#include "alaam/sa.hpp"
#include "alaam/sampler.hpp"
#include "alaam/study.hpp"
#include "alaam/textio.hpp"

namespace alaam::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Keys a manifest carries that are not options.
bool isReservedKey(const std::string& key) { return key == "command" || key == "version" || key == "rng"; }

// Prepends "--key=value" arguments read from a --config file so that flags
// given on the command line come later and win (every option takes the last value).
std::vector<std::string> expandConfig(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  if (args.size() < 2 || args[1].starts_with("-")) return args;
  std::optional<std::string> configPath;
  for (std::size_t k = 2; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) configPath = args[k + 1];
    if (args[k].starts_with("--config=")) configPath = args[k].substr(9);
  }
  if (!configPath) return args;
  std::vector<std::string> expanded{args[0], args[1]};
  for (const auto& [key, value] : textio::readKeyValueFile(*configPath)) {
    if (isReservedKey(key) || key == "config") continue;
    expanded.push_back("--" + key + "=" + value);
  }
  expanded.insert(expanded.end(), args.begin() + 2, args.end());
  return expanded;
}

void writeManifest(const fs::path& path, const CLI::App& sub) {
  textio::KeyValues kv{{"command", sub.get_name()}};
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string& name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      if (opt->get_multi_option_policy() == CLI::MultiOptionPolicy::TakeAll) {
        for (const auto& r : results) kv.emplace_back(name, r);
      } else {
        kv.emplace_back(name, results.back());
      }
    } else if (!opt->get_default_str().empty()) {
      kv.emplace_back(name, opt->get_default_str());
    }
  }
  kv.emplace_back("version", ALAAM_VERSION_STRING);
  kv.emplace_back("rng", std::string(Rng::kName));
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  textio::writeKeyValues(out, kv);
}

std::ofstream openOutput(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::vector<double> parseTheta(const std::string& text, std::size_t expected) {
  std::vector<double> theta;
  for (const auto& tok : textio::split(text, ',')) {
    auto v = textio::parseDouble(textio::trim(tok));
    if (!v || !std::isfinite(*v)) throw UsageError("--theta: '" + tok + "' is not a finite number");
    theta.push_back(*v);
  }
  if (theta.size() != expected) {
    throw UsageError("--theta has " + std::to_string(theta.size()) + " values but the model has " +
                     std::to_string(expected) + " effects");
  }
  return theta;
}

struct DataOptions {
  std::string network;
  std::string kind = "undirected";
  std::string outcome;
  std::vector<std::string> attrs;
  std::string zones;
  std::string model;
};

struct Dataset {
  Network net;
  AttributeTable attrs;
  std::optional<ZoneAssignment> zones;
  std::optional<OutcomeVector> outcome;
};

void addDataOptions(CLI::App* sub, DataOptions& d, bool outcomeRequired) {
  sub->add_option("--network", d.network, "Network file (*vertices / *edges or *arcs)")->required();
  sub->add_option("--kind", d.kind, "undirected | directed | bipartite")
      ->check(CLI::IsMember({"undirected", "directed", "bipartite"}))
      ->capture_default_str();
  auto* outcome = sub->add_option("--outcome", d.outcome, "Outcome file (0 / 1 / NA per node)");
  if (outcomeRequired) outcome->required();
  sub->add_option("--attrs", d.attrs, "Attribute table as kind:path (binary, continuous, categorical)")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sub->add_option("--zones", d.zones, "Snowball zone file; outermost-wave outcomes are held fixed");
  sub->add_option("--model", d.model, "Comma-separated effect tokens, e.g. Density,Contagion,oOb:smoker")
      ->required();
}

AttributeTable loadAttributeSpecs(const std::vector<std::string>& specs, NodeId n) {
  AttributeTable attrs(n);
  for (const auto& spec : specs) {
    for (const auto& item : textio::split(spec, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw UsageError("--attrs expects kind:path, got '" + item + "'");
      const auto kind = parseAttributeKind(item.substr(0, colon));
      attrs.merge(loadAttributes(item.substr(colon + 1), kind, n));
    }
  }
  return attrs;
}

Dataset loadDataset(const DataOptions& d) {
  Dataset ds;
  ds.net = loadNetwork(d.network, parseNetworkKind(d.kind));
  ds.attrs = loadAttributeSpecs(d.attrs, ds.net.nodeCount());
  if (!d.zones.empty()) ds.zones = loadZones(d.zones, ds.net);
  if (!d.outcome.empty()) {
    ds.outcome = bindOutcome(ds.net, loadOutcome(d.outcome));
    if (ds.zones) applySnowballConditioning(*ds.outcome, *ds.zones);
  }
  return ds;
}

ModelSpec parseModelReporting(const DataOptions& d, const Dataset& ds, std::ostream& err) {
  std::vector<std::string> warnings;
  auto spec = parseModel(d.model, ds.net.kind(), ds.attrs, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  return spec;
}

void addEEOptions(CLI::App* sub, EEConfig& ee, bool summaryOnly) {
  sub->add_option("--burnin", ee.burninIters, "EE iterations discarded before summarising")->capture_default_str();
  sub->add_option("--thin", ee.thinInterval, "Keep every n-th EE iteration")->capture_default_str();
  sub->add_option("--dz-ratio-limit", ee.dzRatioLimit, "Largest |mean(dz)/sd(dz)| of a converged run")
      ->capture_default_str();
  sub->add_option("--max-abs-theta", ee.maxAbsTheta, "Divergence bound on |theta|")->capture_default_str();
  if (summaryOnly) return;
  sub->add_option("--mee", ee.Mee, "EE iterations per run")->capture_default_str();
  sub->add_option("--ms", ee.Ms, "Metropolis steps per EE iteration")->capture_default_str();
  sub->add_option("--r", ee.r, "EE learning rate")->capture_default_str();
  sub->add_option("--c", ee.c, "EE step floor")->capture_default_str();
  sub->add_option("--init-steps", ee.initSteps, "Contrastive-divergence updates before EE")->capture_default_str();
}

void addSAOptions(CLI::App* sub, SAConfig& sa) {
  sub->add_option("--m1", sa.M1, "Phase-1 samples (0: 7 + 3p)")->capture_default_str();
  sub->add_option("--subphases", sa.subphases, "Phase-2 subphases")->capture_default_str();
  sub->add_option("--a0", sa.a0, "Initial phase-2 gain")->capture_default_str();
  sub->add_option("--m3", sa.M3, "Phase-3 samples")->capture_default_str();
  sub->add_option("--interval-factor", sa.sampleIntervalFactor, "Sampling interval in multiples of N")
      ->capture_default_str();
  sub->add_option("--phase2-factor", sa.phase2IterationFactor, "Scale of the phase-2 iteration counts")
      ->capture_default_str();
  sub->add_option("--max-restarts", sa.maxRestarts, "Restarts when phase 3 does not converge")
      ->capture_default_str();
  sub->add_option("--t-convergence", sa.tConvergence, "Convergence bound on |t|")->capture_default_str();
}

struct SimFlags {
  std::optional<std::uint64_t> burnin, interval, samples;

  SimOptions resolve(NodeId n) const {
    SimOptions opts = SimOptions::defaultsFor(n);
    if (burnin) opts.burnin = *burnin;
    if (interval) opts.interval = *interval;
    if (samples) opts.sampleCount = *samples;
    opts.validate();
    return opts;
  }
};

void addSimOptions(CLI::App* sub, SimFlags& s) {
  sub->add_option("--burnin", s.burnin, "Proposals before the first sample (default 1000 N)");
  sub->add_option("--interval", s.interval, "Proposals between samples (default 10 N)");
  sub->add_option("--samples", s.samples, "Number of retained samples (default 100)");
}

struct RunFile {
  int index;
  fs::path csv;
};

std::vector<RunFile> findRunFiles(const fs::path& dir) {
  static const std::regex pattern(R"(run_(\d+)\.csv)");
  std::vector<RunFile> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, m, pattern)) files.push_back({std::stoi(m[1]), entry.path()});
  }
  std::sort(files.begin(), files.end(), [](const RunFile& a, const RunFile& b) { return a.index < b.index; });
  return files;
}

void printPooled(std::ostream& out, const std::vector<std::string>& names, const PooledEstimate& pooled) {
  out << "Pooled over " << pooled.Nc << " of " << pooled.totalRuns << " runs\n";
  writePooledCsv(out, names, pooled);
}

std::vector<NullArm> parseNullArms(const std::vector<std::string>& specs) {
  // "Effect" or "Effect;Other=value;..." (Other is set to value in that arm).
  std::vector<NullArm> arms;
  for (const auto& spec : specs) {
    auto parts = textio::split(spec, ';');
    NullArm arm{std::string(textio::trim(parts[0])), {}};
    if (arm.effect.empty()) throw UsageError("--null needs an effect name");
    for (std::size_t k = 1; k < parts.size(); ++k) {
      const auto eq = parts[k].find('=');
      auto value = eq == std::string::npos ? std::nullopt : textio::parseDouble(textio::trim(parts[k].substr(eq + 1)));
      if (!value) throw UsageError("--null override '" + parts[k] + "' is not name=value");
      arm.overrides.emplace_back(std::string(textio::trim(parts[k].substr(0, eq))), *value);
    }
    arms.push_back(std::move(arm));
  }
  return arms;
}

void printStudyRows(std::ostream& out, const std::vector<StudyRow>& rows) {
  for (const auto& r : rows) {
    out << "  " << r.effect << " (true " << r.trueValue << "): bias " << r.bias << ", RMSE " << r.rmse << ", "
        << (r.falsePositiveRate ? "FPR " : "FNR ") << r.rate << "% [" << r.rateLow << ", " << r.rateHigh
        << "], coverage " << r.coverage << "%, samples converged " << r.samplesConverged << '\n';
  }
}

}  // namespace

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ALAAM estimation, simulation and goodness-of-fit", "alaam"};
  app.set_version_flag("--version", std::string(ALAAM_VERSION_STRING));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::string configPath;
  std::uint64_t seed = 0;
  std::string outDir = ".";
  auto common = [&](CLI::App* sub, bool stochastic) {
    sub->add_option("--config", configPath, "Flat 'key = value' file of options; command-line flags win");
    sub->add_option("--out-dir", outDir, "Directory for all outputs")->capture_default_str();
    if (stochastic) sub->add_option("--seed", seed, "Random seed (required)")->required();
  };

  DataOptions data;
  std::string thetaText;
  SAConfig saCfg;
  EEConfig eeCfg;
  SimFlags sim;
  int runs = 20;
  std::optional<int> runIndex;
  int threads = 1;

  auto* sa = app.add_subcommand("estimate-sa", "Stochastic-approximation estimate");
  common(sa, true);
  addDataOptions(sa, data, true);
  addSAOptions(sa, saCfg);
  sa->add_option("--theta", thetaText, "Starting theta, comma-separated in model order");

  auto* ee = app.add_subcommand("estimate-ee", "Equilibrium-expectation estimate with pooled runs");
  common(ee, true);
  addDataOptions(ee, data, true);
  addEEOptions(ee, eeCfg, false);
  ee->add_option("--runs", runs, "Independent EE runs")->capture_default_str()->check(CLI::PositiveNumber);
  ee->add_option("--run-index", runIndex, "Execute only this run (0-based) and write run_<i>.csv")
      ->check(CLI::NonNegativeNumber);
  ee->add_option("--threads", threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  auto* pool = app.add_subcommand("pool", "Pool run_*.csv traces found in --out-dir");
  common(pool, false);
  addEEOptions(pool, eeCfg, true);

  auto* simulate = app.add_subcommand("simulate", "Simulate outcomes at a given theta");
  common(simulate, true);
  addDataOptions(simulate, data, false);
  addSimOptions(simulate, sim);
  simulate->add_option("--theta", thetaText, "Theta, comma-separated in model order")->required();

  std::string extraModel;
  double threshold = 2.0;
  auto* gof = app.add_subcommand("gof", "Goodness-of-fit t-ratios at a fitted theta");
  common(gof, true);
  addDataOptions(gof, data, true);
  addSimOptions(gof, sim);
  gof->add_option("--theta", thetaText, "Fitted theta, comma-separated in model order")->required();
  gof->add_option("--extra", extraModel, "Comma-separated effects not in the model to test");
  gof->add_option("--threshold", threshold, "Out-of-model |t| threshold (2.0, 1.645, 1.0 or 0.3)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  StudyConfig studyCfg;
  std::string studyNetwork, studyKind = "undirected", estimatorName = "ee";
  std::vector<std::string> nullSpecs;
  auto* study = app.add_subcommand("study", "Simulation study of estimator error rates");
  common(study, true);
  study->add_option("--network", studyNetwork, "Network file (default: synthetic random graph)");
  study->add_option("--kind", studyKind, "undirected | directed")
      ->check(CLI::IsMember({"undirected", "directed"}))
      ->capture_default_str();
  study->add_option("--nodes", studyCfg.nodes, "Synthetic network size")->capture_default_str();
  study->add_option("--mean-degree", studyCfg.meanDegree, "Synthetic network mean degree")->capture_default_str();
  study->add_option("--model", studyCfg.model, "Generating model (attributes binaryAttr, continuousAttr)")
      ->required();
  study->add_option("--theta", thetaText, "Generating theta, comma-separated in model order")->required();
  study->add_option("--samples", studyCfg.sampleCount, "Simulated outcome vectors")->capture_default_str();
  study->add_option("--runs", studyCfg.runsPerSample, "EE runs pooled per sample")->capture_default_str();
  study->add_option("--estimator", estimatorName, "ee | sa")
      ->check(CLI::IsMember({"ee", "sa"}))
      ->capture_default_str();
  study->add_option("--null", nullSpecs, "Null arm: Effect[;Other=value...] generated with Effect = 0")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  study->add_option("--threads", studyCfg.threads, "Worker threads")->capture_default_str();
  study->add_option("--outcome-burnin", studyCfg.outcomeBurninFactor, "Generating burn-in in multiples of N")
      ->capture_default_str();
  study->add_option("--initial-incidence", studyCfg.initialIncidence, "Incidence of the generating start state")
      ->capture_default_str();
  addEEOptions(study, studyCfg.ee, false);
  addSAOptions(study, studyCfg.sa);

  std::vector<std::string> args;
  try {
    args = expandConfig(argc, argv);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  const fs::path dir(outDir);
  try {
    fs::create_directories(dir);

    if (sa->parsed()) {
      auto ds = loadDataset(data);
      const Model model(parseModelReporting(data, ds, err), ds.net, ds.attrs);
      std::optional<Vector> theta0;
      if (!thetaText.empty()) theta0 = toVector(parseTheta(thetaText, model.size()));
      writeManifest(dir / "manifest.txt", *sa);
      const auto result = estimateSA(model, *ds.outcome, saCfg, theta0, seed);
      auto csv = openOutput(dir / "sa_estimates.csv");
      writeSACsv(csv, model.names(), result);
      auto txt = openOutput(dir / "sa_report.txt");
      writeSAReport(txt, model.names(), result);
      writeSAReport(out, model.names(), result);
      if (!result.converged) {
        err << "error: estimation did not converge (some |t| >= " << saCfg.tConvergence << ")\n";
        return kExitNotConverged;
      }
      return kExitOk;
    }

    if (ee->parsed()) {
      auto ds = loadDataset(data);
      const Model model(parseModelReporting(data, ds, err), ds.net, ds.attrs);
      eeCfg.validate();
      const auto names = model.names();
      auto runOne = [&](int index) {
        const auto chain = runEE(model, *ds.outcome, eeCfg, seed, static_cast<std::uint64_t>(index));
        auto est = summarizeRun(chain, eeCfg);
        auto csv = openOutput(dir / ("run_" + std::to_string(index) + ".csv"));
        writeRunCsv(csv, names, chain);
        auto status = openOutput(dir / ("run_" + std::to_string(index) + ".status"));
        writeRunStatus(status, est.converged, est.failReason);
        return est;
      };
      if (runIndex) {
        if (*runIndex >= runs) throw UsageError("--run-index must be below --runs");
        writeManifest(dir / ("manifest_run_" + std::to_string(*runIndex) + ".txt"), *ee);
        const auto est = runOne(*runIndex);
        out << "run " << *runIndex << ": converged=" << (est.converged ? 1 : 0)
            << " failReason=" << toString(est.failReason) << '\n';
        return kExitOk;
      }
      writeManifest(dir / "manifest.txt", *ee);
      std::vector<RunEstimate> estimates(static_cast<std::size_t>(runs));
      parallelFor(estimates.size(), threads, [&](std::size_t k) { estimates[k] = runOne(static_cast<int>(k)); });
      const auto pooled = poolRuns(estimates);
      auto csv = openOutput(dir / "pooled_estimates.csv");
      writePooledCsv(csv, names, pooled);
      printPooled(out, names, pooled);
      return kExitOk;
    }

    if (pool->parsed()) {
      const auto files = findRunFiles(dir);
      if (files.empty()) throw Error("no run_*.csv files in " + dir.string());
      std::vector<RunEstimate> estimates;
      std::vector<std::string> names;
      for (const auto& f : files) {
        std::ifstream in(f.csv);
        if (!in) throw Error("cannot read " + f.csv.string());
        std::vector<std::string> runNames;
        auto chain = readRunCsv(in, runNames);
        if (names.empty()) names = runNames;
        if (runNames != names) throw Error(f.csv.string() + " has different effects from the other runs");
        auto statusPath = f.csv;
        statusPath.replace_extension(".status");
        if (std::ifstream status(statusPath); status) {
          const auto [converged, reason] = readRunStatus(status);
          if (reason == FailReason::Diverged) {
            chain.failed = true;
            chain.failReason = reason;
          }
        }
        estimates.push_back(summarizeRun(chain, eeCfg));
      }
      writeManifest(dir / "manifest_pool.txt", *pool);
      const auto pooled = poolRuns(estimates);
      auto csv = openOutput(dir / "pooled_estimates.csv");
      writePooledCsv(csv, names, pooled);
      printPooled(out, names, pooled);
      return kExitOk;
    }

    if (simulate->parsed()) {
      auto ds = loadDataset(data);
      const Model model(parseModelReporting(data, ds, err), ds.net, ds.attrs);
      const auto theta = parseTheta(thetaText, model.size());
      const auto opts = sim.resolve(ds.net.nodeCount());
      writeManifest(dir / "manifest.txt", *simulate);
      std::vector<SimSample> samples;
      if (ds.outcome) {
        auto check = degeneracyCheck(model, *ds.outcome, theta, opts, seed);
        auto summary = openOutput(dir / "degeneracy_summary.csv");
        writeDegeneracySummary(summary, check);
        writeDegeneracySummary(out, check);
        samples = std::move(check.samples);
      } else {
        auto init = bindOutcome(ds.net, OutcomeVector::zeros(ds.net.nodeCount()));
        if (ds.zones) applySnowballConditioning(init, *ds.zones);
        samples = simulateOutcomes(model, theta, opts, init, seed);
      }
      auto csv = openOutput(dir / "sim_stats.csv");
      writeSimulationCsv(csv, model.names(), samples);
      out << "wrote " << samples.size() << " samples to " << (dir / "sim_stats.csv").string() << '\n';
      return kExitOk;
    }

    if (gof->parsed()) {
      auto ds = loadDataset(data);
      const auto fitted = parseModelReporting(data, ds, err);
      const auto theta = parseTheta(thetaText, fitted.size());
      ModelSpec extra;
      if (!extraModel.empty()) extra = parseModel(extraModel, ds.net.kind(), ds.attrs);
      if (!isRecognisedGofThreshold(threshold)) {
        err << "warning: out-of-model threshold " << threshold << " is not one of 2.0, 1.645, 1.0, 0.3\n";
      }
      const auto opts = sim.resolve(ds.net.nodeCount());
      writeManifest(dir / "manifest.txt", *gof);
      const auto report = gofTest(fitted, extra, ds.net, ds.attrs, *ds.outcome, theta, opts, seed, threshold);
      auto txt = openOutput(dir / "gof_report.txt");
      writeGofReport(txt, report);
      auto csv = openOutput(dir / "gof_report.csv");
      writeGofCsv(csv, report);
      writeGofReport(out, report);
      return kExitOk;
    }

    if (study->parsed()) {
      if (!studyNetwork.empty()) studyCfg.networkFile = studyNetwork;
      studyCfg.kind = parseNetworkKind(studyKind);
      studyCfg.estimator = estimatorName == "sa" ? Estimator::SA : Estimator::EE;
      studyCfg.nullArms = parseNullArms(nullSpecs);
      studyCfg.seed = seed;
      for (const auto& tok : textio::split(thetaText, ',')) {
        auto v = textio::parseDouble(textio::trim(tok));
        if (!v || !std::isfinite(*v)) throw UsageError("--theta: '" + tok + "' is not a finite number");
        studyCfg.theta.push_back(*v);
      }
      writeManifest(dir / "manifest.txt", *study);
      const auto report = runStudy(studyCfg);
      auto csv = openOutput(dir / "study_report.csv");
      writeStudyCsv(csv, report.mainRows);
      out << "main arm\n";
      printStudyRows(out, report.mainRows);
      if (!report.nullRows.empty()) {
        auto nullCsv = openOutput(dir / "study_null_report.csv");
        writeStudyCsv(nullCsv, report.nullRows);
        out << "null arms\n";
        printStudyRows(out, report.nullRows);
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DegenerateModel& e) {
    err << "error: model is degenerate: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const Diverged& e) {
    err << "error: estimation diverged: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const NoConvergedRuns& e) {
    err << "error: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const StudyError& e) {
    err << "error: study failed: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const LoadError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace alaam::cli
