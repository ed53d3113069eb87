#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config_file.hpp"
#include "sigdrift/cpd.hpp"
#include "sigdrift/datagen.hpp"
#include "sigdrift/detect.hpp"
#include "sigdrift/error.hpp"
#include "sigdrift/eval.hpp"
#include "sigdrift/noise.hpp"
#include "sigdrift/signature.hpp"

namespace sigdrift::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
  std::string config_path;
  std::uint64_t seed = 42;
  std::size_t jobs = 0;

  CorpusConfig corpus;
  DetectorThresholds thresholds;
  CusumParams cusum;
  EventConfig events;
  std::size_t snr_segments = 12;
  std::string snr_mode = "segment";
  double monitoring_fraction = 0.2;
  std::vector<std::string> detectors{"sw", "snr", "cusum"};
  std::vector<std::size_t> sample_sizes{1000, 2000, 3000, 4000, 5000};
  std::size_t repeats = 30;
  std::vector<double> levels{0.5, 0.25, 0.0};

  std::string out;
  std::string csv;
  std::string trace;
  std::string profiles;
  std::string baseline;
  std::string cohorts;
  std::string provider;
  std::string signature;
  std::string spec;
  std::string spec_file;
  std::string existing;
  std::string recomputed;
  std::vector<std::string> monitored;
  std::string profile;
  std::string method = "sw";
  std::string similarity = "pcc";
  std::string trials;
  std::string flags;
  std::string flags_out;
  std::optional<double> t_s;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  out << text;
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

void write_signature_file(const Signature& sig, const fs::path& path) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  write_signature(sig, path);
}

std::vector<TrialExperience> flatten(const std::vector<TrialCohort>& cohorts) {
  std::vector<TrialExperience> out;
  for (const auto& c : cohorts) {
    out.insert(out.end(), c.experiences().begin(), c.experiences().end());
  }
  return out;
}

SnrMode parse_snr_mode(const std::string& mode) {
  return mode == "aggregate" ? SnrMode::kAggregate : SnrMode::kPerSegment;
}

ExperimentConfig experiment_config(const RunConfig& c) {
  ExperimentConfig e;
  e.corpus = c.corpus;
  e.detectors.clear();
  for (const auto& d : c.detectors) {
    e.detectors.push_back(parse_detector(d));
  }
  e.sample_sizes = c.sample_sizes;
  e.repeats = c.repeats;
  e.thresholds = c.thresholds;
  e.cusum = c.cusum;
  e.snr_segments = c.snr_segments;
  e.snr_mode = parse_snr_mode(c.snr_mode);
  e.monitoring_fraction = c.monitoring_fraction;
  return e;
}

json thresholds_json(const RunConfig& c) {
  return {{"s_p", c.thresholds.s_p},           {"s_r", c.thresholds.s_r},
          {"t_d", c.thresholds.t_d},           {"window", c.thresholds.window},
          {"cusum_k", c.cusum.k},              {"cusum_h", c.cusum.h},
          {"snr_mode", c.snr_mode}};
}

// ---- option groups ----

void add_common(CLI::App& sub, RunConfig& c) {
  sub.add_option("--config", c.config_path, "Flat 'key = value' file; flags take precedence")
      ->check(CLI::ExistingFile);
  sub.add_option("--seed", c.seed, "Random seed (falls back to $SIGDRIFT_SEED)");
}

void add_jobs(CLI::App& sub, RunConfig& c) {
  sub.add_option("--jobs", c.jobs, "Worker threads (0 = all cores)");
}

void add_corpus(CLI::App& sub, RunConfig& c) {
  auto& k = c.corpus;
  sub.add_option("--n-changed", k.n_changed, "Changed pairs per corpus");
  sub.add_option("--n-noisy", k.n_noisy, "Noisy pairs per corpus");
  sub.add_option("--distortion-fraction", k.distortion_fraction,
                 "Share of noisy pairs with AWGN distortion")
      ->check(CLI::Range(0.0, 1.0));
  sub.add_option("--attenuation-fraction", k.attenuation_fraction,
                 "Share of noisy pairs with attenuation")
      ->check(CLI::Range(0.0, 1.0));
  sub.add_flag("--paper-faithful", k.paper_faithful, "Spikes and AWGN only (no attenuation)");
  sub.add_option("--segment-length", k.segment_length, "Days replaced in a changed pair");
  sub.add_option("--spike-width", k.spike_width, "Spike width in timestamps");
  sub.add_option("--spike-magnitude", k.spike_magnitude, "Spike height in row std units");
  sub.add_option("--distortion-db", k.distortion_db, "AWGN target SNR in dB");
  sub.add_option("--attenuation-min", k.attenuation_min, "Smallest attenuation factor");
  sub.add_option("--attenuation-max", k.attenuation_max, "Largest attenuation factor");
}

void add_thresholds(CLI::App& sub, RunConfig& c) {
  auto& t = c.thresholds;
  sub.add_option("--s-p", t.s_p, "PCC threshold S^P");
  sub.add_option("--s-r", t.s_r, "RMSE threshold S^R");
  sub.add_option("--t-d", t.t_d, "Attenuation RMSE ceiling T^D");
  sub.add_option("--window", t.window, "Sliding window size W (days)");
  sub.add_option("--cusum-k", c.cusum.k, "CUSUM slack k");
  sub.add_option("--cusum-h", c.cusum.h, "CUSUM decision interval h");
  sub.add_option("--snr-mode", c.snr_mode, "SNR comparison: segment or aggregate")
      ->check(CLI::IsMember({"segment", "aggregate"}));
}

void add_experiment(CLI::App& sub, RunConfig& c) {
  add_corpus(sub, c);
  add_thresholds(sub, c);
  sub.add_option("--detectors", c.detectors, "Detectors to evaluate (sw, snr, cusum)")
      ->delimiter(',')
      ->check(CLI::IsMember({"sw", "snr", "cusum"}));
  sub.add_option("--sample-sizes", c.sample_sizes, "Pairs drawn per cell")->delimiter(',');
  sub.add_option("--repeats", c.repeats, "Simulation repeats")->check(CLI::PositiveNumber);
  sub.add_option("--snr-segments", c.snr_segments, "SNR segments d")->check(CLI::PositiveNumber);
  sub.add_option("--monitoring-fraction", c.monitoring_fraction,
                 "Monitoring corpus size relative to the evaluation corpus");
  add_jobs(sub, c);
}

// ---- commands ----

std::vector<Signature> provider_signatures(const RunConfig& c) {
  const auto profiles =
      c.profiles.empty() ? default_profiles() : profiles_from_json(read_text(c.profiles));
  const auto baseline =
      c.baseline.empty() ? default_baseline_map() : baseline_map_from_json(read_text(c.baseline));
  const auto trace =
      c.trace.empty() ? synthesize_trace(kTraceNodes, kTraceLength, c.seed) : load_trace(fs::path(c.trace));
  return build_provider_signatures(profiles, trace, TimeGrid(kGridLength), baseline, c.seed);
}

int cmd_gen_data(const RunConfig& c, std::ostream& out) {
  const fs::path dir(c.out);
  fs::create_directories(dir / "signatures");
  fs::create_directories(dir / "pairs");

  const auto profiles =
      c.profiles.empty() ? default_profiles() : profiles_from_json(read_text(c.profiles));
  const auto baseline =
      c.baseline.empty() ? default_baseline_map() : baseline_map_from_json(read_text(c.baseline));
  write_text(dir / "profiles.json", profiles_to_json(profiles) + "\n");
  write_text(dir / "baseline_map.json", to_json(baseline) + "\n");

  const auto bases = provider_signatures(c);
  for (const auto& sig : bases) {
    write_signature_file(sig, dir / "signatures" / (sig.provider_id() + ".csv"));
  }
  const auto pairs = build_corpus(bases, c.corpus, c.seed, c.jobs);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    write_signature(pairs[i].recomputed, dir / "pairs" / pair_file_name(i));
  }
  write_text(dir / "manifest.json", manifest_json(pairs, c.corpus, c.seed) + "\n");
  out << json{{"manifest", (dir / "manifest.json").string()},
              {"signatures", bases.size()},
              {"pairs", pairs.size()}}
             .dump()
      << '\n';
  return kExitOk;
}

int cmd_gen_signature(const RunConfig& c, std::ostream& out) {
  const auto cohorts = read_cohorts(fs::path(c.cohorts));
  if (cohorts.empty()) {
    throw ShapeError("cohort file has no users");
  }
  const TimeGrid grid(cohorts.front().window_length());
  const std::string provider =
      c.provider.empty() ? fs::path(c.out).stem().string() : c.provider;
  const auto sig = generate_signature(cohorts, grid, provider);
  write_signature_file(sig, c.out);
  out << json{{"signature", c.out}, {"rows", sig.row_count()}, {"length", sig.length()}}.dump()
      << '\n';
  return kExitOk;
}

int cmd_inject(const RunConfig& c, std::ostream& out) {
  if (c.spec.empty() == c.spec_file.empty()) {
    throw ParseError("give exactly one of --spec or --spec-file");
  }
  const auto spec = noise_spec_from_json(c.spec.empty() ? read_text(c.spec_file) : c.spec);
  const auto loaded = read_signature(fs::path(c.signature));
  const auto noisy = inject(loaded.signature, spec, c.seed);
  write_signature_file(noisy, c.out);
  out << json{{"recomputed", c.out}, {"noise", json::parse(to_json(spec))}, {"seed", c.seed}}.dump()
      << '\n';
  return kExitOk;
}

int cmd_detect(const RunConfig& c, std::ostream& out, std::ostream& err) {
  c.thresholds.validate();
  c.cusum.validate();
  const auto existing = read_signature(fs::path(c.existing));
  if (existing.renormalized()) {
    err << "warning: existing signature rows were re-normalized\n";
  }
  const auto recomputed = read_signature(fs::path(c.recomputed), RowPolicy::kKeepRaw);
  DetectionOutcome outcome;
  if (c.method == "sw") {
    outcome = sliding_window_detect(existing.signature, recomputed.signature, c.thresholds);
  } else if (c.method == "cusum") {
    outcome = cusum_detect(existing.signature, recomputed.signature, c.cusum);
  } else {
    if (c.profile.empty()) {
      throw ParseError("method snr requires --profile");
    }
    const auto profile = noise_profile_from_json(read_text(c.profile));
    outcome = snr_detect(existing.signature, recomputed.signature, profile,
                         parse_snr_mode(c.snr_mode));
  }
  json j = json::parse(to_json(outcome));
  j["method"] = c.method;
  j["config"] = thresholds_json(c);
  out << j.dump() << '\n';
  return outcome.is_change() ? kExitChange : kExitOk;
}

int cmd_profile(const RunConfig& c, std::ostream& out) {
  const auto existing = read_signature(fs::path(c.existing));
  std::vector<Signature> monitored;
  for (const auto& path : c.monitored) {
    monitored.push_back(read_signature(fs::path(path), RowPolicy::kKeepRaw).signature);
  }
  const auto profile = learn_monitoring_profile(existing.signature, monitored, c.snr_segments);
  const std::string text = to_json(profile);
  if (c.out.empty()) {
    out << text << '\n';
  } else {
    write_text(c.out, text + "\n");
    out << json{{"profile", c.out}, {"segments", profile.segments()}}.dump() << '\n';
  }
  return kExitOk;
}

int cmd_calibrate(const RunConfig& c, std::ostream& out) {
  const auto sig = read_signature(fs::path(c.signature)).signature;
  const auto past = flatten(read_cohorts(fs::path(c.trials)));
  const auto method = parse_similarity_method(c.similarity);
  const auto t_s = calibrate_similarity_threshold(past, sig, method);
  const auto ev = calibrate_frequency_threshold(past, sig, t_s, c.events.window_length);
  out << json{{"method", std::string(to_string(method))},
              {"t_s", t_s.value},
              {"window_length", ev.window_length},
              {"f_thresh", ev.frequency_threshold}}
             .dump()
      << '\n';
  return kExitOk;
}

int cmd_events(const RunConfig& c, std::ostream& out) {
  c.events.validate();
  std::vector<AnomalyFlag> flags;
  if (!c.flags.empty()) {
    flags = read_anomaly_flags(fs::path(c.flags));
  } else {
    if (c.signature.empty() || c.trials.empty() || !c.t_s) {
      throw ParseError("events needs --flags, or --signature, --trials and --t-s");
    }
    const auto sig = read_signature(fs::path(c.signature)).signature;
    const AnomalyThreshold threshold{parse_similarity_method(c.similarity), *c.t_s};
    for (const auto& exp : flatten(read_cohorts(fs::path(c.trials)))) {
      const auto check = is_anomalous(exp, sig, threshold);
      flags.push_back({exp.trial_start, check.anomalous, check.similarity});
    }
    std::stable_sort(flags.begin(), flags.end(),
                     [](const auto& a, const auto& b) { return a.index < b.index; });
  }
  if (!c.flags_out.empty()) {
    std::ostringstream ss;
    write_anomaly_flags(flags, ss);
    write_text(c.flags_out, ss.str());
  }
  json points = json::array();
  for (const auto& p : detect_events(flags, c.events)) {
    points.push_back({{"grid_index", p.grid_index},
                      {"anomaly_count", p.anomaly_count},
                      {"window_start", p.window_start},
                      {"window_length", p.window_length}});
  }
  out << json{{"window_length", c.events.window_length},
              {"f_thresh", c.events.frequency_threshold},
              {"change_points", points}}
             .dump()
      << '\n';
  return kExitOk;
}

int cmd_evaluate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto cfg = experiment_config(c);
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  err << "evaluate: building provider signatures\n";
  const auto bases = provider_signatures(c);
  err << "evaluate: " << cfg.repeats << " repeats x " << cfg.corpus_size() << " pairs\n";
  const auto report = run_experiment(bases, cfg, c.seed, c.jobs);
  write_text(c.out, to_json(report));
  if (!c.csv.empty()) {
    write_text(c.csv, to_csv(report));
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  err << "evaluate: done in " << secs << " s\n";
  out << json{{"report", c.out}}.dump() << '\n';
  return kExitOk;
}

int cmd_sensitivity(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto cfg = experiment_config(c);
  cfg.validate();
  const auto bases = provider_signatures(c);
  err << "sensitivity: " << c.levels.size() << " distortion levels\n";
  const auto reports = sensitivity_analysis(bases, cfg, c.levels, c.seed, c.jobs);
  json j = json::object();
  std::ostringstream csv;
  csv << "distortion_fraction,";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const std::string level = json(c.levels[i]).dump();
    j[level] = json::parse(to_json(reports[i]));
    std::istringstream rows(to_csv(reports[i]));
    std::string line;
    std::getline(rows, line);
    if (i == 0) {
      csv << line << '\n';
    }
    while (std::getline(rows, line)) {
      csv << level << ',' << line << '\n';
    }
  }
  write_text(c.out, j.dump(2) + "\n");
  if (!c.csv.empty()) {
    write_text(c.csv, csv.str());
  }
  out << json{{"report", c.out}, {"levels", c.levels}}.dump() << '\n';
  return kExitOk;
}

// Fills options missing from the command line from the config file, then
// the seed from $SIGDRIFT_SEED.
void apply_config(CLI::App& app, CLI::App& sub, const RunConfig& c) {
  if (!c.config_path.empty()) {
    std::set<std::string> known;
    for (const auto* s : app.get_subcommands({})) {
      for (const auto* o : s->get_options()) {
        for (const auto& name : o->get_lnames()) {
          known.insert(name);
        }
      }
    }
    for (const auto& [key, value] : read_config_file(c.config_path)) {
      if (key == "config") {
        continue;
      }
      auto* opt = sub.get_option_no_throw("--" + key);
      if (opt == nullptr) {
        if (!known.contains(key)) {
          throw ParseError("unknown config key '" + key + "'");
        }
        continue;
      }
      if (opt->count() == 0) {
        opt->add_result(value);
        opt->run_callback();
      }
    }
  }
  auto* seed = sub.get_option_no_throw("--seed");
  if (seed != nullptr && seed->count() == 0) {
    if (const char* env = std::getenv("SIGDRIFT_SEED"); env != nullptr && *env != '\0') {
      seed->add_result(env);
      seed->run_callback();
    }
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Detect long-term changes in IaaS performance signatures", "sigdrift"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  auto* gen_data = app.add_subcommand("gen-data", "Generate provider signatures and a labeled corpus");
  add_common(*gen_data, c);
  add_corpus(*gen_data, c);
  add_jobs(*gen_data, c);
  gen_data->add_option("--out", c.out, "Output directory")->required();
  gen_data->add_option("--trace", c.trace, "Workload trace CSV (synthesized when absent)");
  gen_data->add_option("--profiles", c.profiles, "QoS profiles JSON (defaults when absent)");
  gen_data->add_option("--baseline", c.baseline, "Baseline map JSON (defaults when absent)");

  auto* gen_sig = app.add_subcommand("gen-signature", "Average trial cohorts into a signature");
  add_common(*gen_sig, c);
  gen_sig->add_option("--cohorts", c.cohorts, "Cohort CSV (user_id,parameter,start,v0,...)")
      ->required();
  gen_sig->add_option("--out", c.out, "Signature CSV to write")->required();
  gen_sig->add_option("--provider", c.provider, "Provider id (default: output file stem)");

  auto* inj = app.add_subcommand("inject", "Inject noise into a signature");
  add_common(*inj, c);
  inj->add_option("--signature", c.signature, "Signature CSV")->required();
  inj->add_option("--spec", c.spec, "Noise spec JSON, e.g. {\"kind\":\"spike\",\"position\":10}");
  inj->add_option("--spec-file", c.spec_file, "File holding the noise spec JSON");
  inj->add_option("--out", c.out, "Noisy signature CSV to write")->required();

  auto* det = app.add_subcommand(
      "detect", "Compare a recomputed signature with the existing one (exit 2 on change)");
  add_common(*det, c);
  add_thresholds(*det, c);
  det->add_option("--existing", c.existing, "Existing signature CSV")->required();
  det->add_option("--recomputed", c.recomputed, "Recomputed signature CSV")->required();
  det->add_option("--method", c.method, "Detector: sw, snr or cusum")
      ->check(CLI::IsMember({"sw", "snr", "cusum"}));
  det->add_option("--profile", c.profile, "Noise profile JSON (method snr)");

  auto* prof = app.add_subcommand("profile", "Learn an SNR noise profile from monitored recomputations");
  add_common(*prof, c);
  prof->add_option("--existing", c.existing, "Existing signature CSV")->required();
  prof->add_option("--monitored", c.monitored, "Recomputed signatures seen while unchanged")
      ->required();
  prof->add_option("--snr-segments", c.snr_segments, "SNR segments d")->check(CLI::PositiveNumber);
  prof->add_option("--out", c.out, "Profile JSON to write (stdout when absent)");

  auto* cal = app.add_subcommand("calibrate", "Initial T_S and F_thresh from past trial users");
  add_common(*cal, c);
  cal->add_option("--signature", c.signature, "Signature CSV")->required();
  cal->add_option("--trials", c.trials, "Past trial users (cohort CSV)")->required();
  cal->add_option("--similarity", c.similarity, "pcc, ed, cs or rmse")
      ->check(CLI::IsMember({"pcc", "ed", "cs", "rmse"}));
  cal->add_option("--window-length", c.events.window_length, "Trial period T_f");

  auto* ev = app.add_subcommand("events", "Change points from a stream of anomaly flags");
  add_common(*ev, c);
  ev->add_option("--flags", c.flags, "Anomaly flag CSV (index,flag,similarity)");
  ev->add_option("--signature", c.signature, "Signature CSV (with --trials)");
  ev->add_option("--trials", c.trials, "Current trial users (cohort CSV)");
  ev->add_option("--t-s", c.t_s, "Similarity threshold T_S (with --trials)");
  ev->add_option("--similarity", c.similarity, "pcc, ed, cs or rmse")
      ->check(CLI::IsMember({"pcc", "ed", "cs", "rmse"}));
  ev->add_option("--window-length", c.events.window_length, "Trial period T_f");
  ev->add_option("--f-thresh", c.events.frequency_threshold, "Frequency threshold F_thresh");
  ev->add_option("--flags-out", c.flags_out, "Write the computed flags as CSV");

  auto* evl = app.add_subcommand("evaluate", "Benchmark the detectors on synthetic corpora");
  add_common(*evl, c);
  add_experiment(*evl, c);
  evl->add_option("--out", c.out, "Report JSON")->required();
  evl->add_option("--csv", c.csv, "Flat CSV for plotting");
  evl->add_option("--profiles", c.profiles, "QoS profiles JSON (defaults when absent)");
  evl->add_option("--baseline", c.baseline, "Baseline map JSON (defaults when absent)");
  evl->add_option("--trace", c.trace, "Workload trace CSV (synthesized when absent)");

  auto* sens = app.add_subcommand("sensitivity", "Repeat the evaluation at several distortion levels");
  add_common(*sens, c);
  add_experiment(*sens, c);
  sens->add_option("--levels", c.levels, "Distortion fractions")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  sens->add_option("--out", c.out, "Report JSON keyed by level")->required();
  sens->add_option("--csv", c.csv, "Flat CSV for plotting");
  sens->add_option("--profiles", c.profiles, "QoS profiles JSON (defaults when absent)");
  sens->add_option("--baseline", c.baseline, "Baseline map JSON (defaults when absent)");
  sens->add_option("--trace", c.trace, "Workload trace CSV (synthesized when absent)");

  CLI::App* active = nullptr;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    active = app.get_subcommands().front();
    apply_config(app, *active, c);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    const std::string name = active->get_name();
    if (name == "gen-data") return cmd_gen_data(c, out);
    if (name == "gen-signature") return cmd_gen_signature(c, out);
    if (name == "inject") return cmd_inject(c, out);
    if (name == "detect") return cmd_detect(c, out, err);
    if (name == "profile") return cmd_profile(c, out);
    if (name == "calibrate") return cmd_calibrate(c, out);
    if (name == "events") return cmd_events(c, out);
    if (name == "evaluate") return cmd_evaluate(c, out, err);
    if (name == "sensitivity") return cmd_sensitivity(c, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace sigdrift::cli
