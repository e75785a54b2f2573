// scrc command line tool: synthesize labeled streams, train gesture models,
// classify recordings, evaluate against truth, and compare the spectral
// classifier with its time-domain baseline.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric error.

#include "scrc/scrc.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using scrc::Index;
using scrc::io::json;

namespace {

struct TrainFlags {
  std::string couples_dir;
  std::string mode = "scrc";
  std::vector<int> gestures;
  scrc::pipeline::PipelineConfig cfg;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--couples", f.couples_dir, "directory of couple CSVs")
      ->required();
  cmd->add_option("--mode", f.mode, "feature mode: scrc (spectral) or crc")
      ->check(CLI::IsMember({"scrc", "crc"}));
  cmd->add_option("--gestures", f.gestures,
                  "gesture ids that must be present (default: all found)")
      ->delimiter(',');
  cmd->add_option("--window", f.cfg.window_len, "window length in samples");
  cmd->add_option("--step", f.cfg.step, "window step in samples");
  cmd->add_option("--sigma", f.cfg.sigma,
                  "ridge weight (<= 0 selects the default rule)");
  cmd->add_option("--lambda1", f.cfg.lambda1, "clustering sparsity weight");
  cmd->add_option("--lambda2", f.cfg.lambda2, "clustering smoothness weight");
  cmd->add_option("--reps", f.cfg.representatives_per_class,
                  "dictionary columns per class");
  cmd->add_option("--cluster-stride", f.cfg.cluster_stride,
                  "window decimation before clustering");
  cmd->add_option("--seed", f.cfg.seed, "training seed");
}

/// Loads every couple CSV under dir (sidecar kind == "couple").
std::vector<scrc::pipeline::GestureCoupleRecording> load_couples(
    const std::string& dir, const std::vector<int>& required,
    std::vector<scrc::io::ProvenanceInput>* prov) {
  if (!fs::is_directory(dir))
    throw scrc::DataError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<scrc::pipeline::GestureCoupleRecording> couples;
  for (const auto& path : files) {
    scrc::io::RecordingBundle bundle = scrc::io::read_recording_csv(path);
    if (bundle.meta.kind != "couple") continue;
    if (bundle.meta.gesture_id < 1)
      throw scrc::DataError(path.string() + ": couple without a gesture_id");
    scrc::pipeline::GestureCoupleRecording couple;
    couple.recording = std::move(bundle.recording);
    couple.gesture_id = bundle.meta.gesture_id;
    couple.truth = std::move(bundle.truth);
    couple.source = path.string();
    couples.push_back(std::move(couple));
    if (prov) prov->push_back({path.string(), scrc::io::digest_file(path)});
  }
  if (couples.empty())
    throw scrc::DataError("no couple recordings found in " + dir);
  for (int g : required) {
    bool found = false;
    for (const auto& c : couples) found = found || c.gesture_id == g;
    if (!found)
      throw scrc::DataError("missing couple for gesture id " +
                            std::to_string(g));
  }
  if (!required.empty()) {
    std::erase_if(couples, [&](const auto& c) {
      return std::find(required.begin(), required.end(), c.gesture_id) ==
             required.end();
    });
  }
  return couples;
}

void print_diagnostics(
    const std::vector<scrc::pipeline::CoupleDiagnostics>& diags) {
  for (const auto& d : diags) {
    std::printf("couple gesture=%d (%s): %lld windows, %lld clustered, "
                "active=%lld return=%lld%s",
                d.gesture_id, scrc::synth::label_name(d.gesture_id + 1),
                (long long)d.window_count, (long long)d.clustered_count,
                (long long)d.active_count, (long long)d.return_count,
                d.solver_converged ? "" : " [solver hit iteration cap]");
    if (d.purity >= 0.0) std::printf(", purity=%.4f", d.purity);
    std::printf("\n");
  }
}

std::vector<int> read_truth(const std::string& path, Index expected_len) {
  scrc::io::RecordingBundle bundle = scrc::io::read_recording_csv(path);
  if (bundle.truth.empty())
    throw scrc::DataError(path + " has no label column");
  if (expected_len > 0 && Index(bundle.truth.size()) != expected_len)
    throw scrc::DataError("truth length in " + path +
                          " does not match the input stream");
  return bundle.truth;
}

int run(int argc, char** argv) {
  CLI::App app{"Spectral gesture classification over multichannel streams"};
  app.require_subcommand(1);

  // --- synth ---------------------------------------------------------------
  auto* synth = app.add_subcommand(
      "synth", "generate seeded synthetic recordings with truth labels");
  std::vector<int> synth_gestures;
  int synth_cycles = 6;
  std::string synth_script, synth_out = ".", synth_name;
  std::uint64_t synth_seed = 1;
  scrc::synth::SynthConfig synth_cfg = scrc::synth::SynthConfig::defaults();
  synth->add_option("--couples", synth_gestures,
                    "gesture ids to emit one couple file each (e.g. 1,2,3)")
      ->delimiter(',');
  synth->add_option("--cycles", synth_cycles, "gesture/relax cycles per couple");
  synth->add_option("--script", synth_script,
                    "JSON script for an arbitrary labeled sequence");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--name", synth_name, "basename for sequence output");
  synth->add_option("--channels", synth_cfg.channels, "channel count");
  synth->add_option("--rate", synth_cfg.sample_rate_hz, "sample rate in Hz");
  synth->add_option("--half-period", synth_cfg.half_period,
                    "samples per couple phase");
  synth->add_option("--ramp", synth_cfg.ramp, "cross-fade length in samples");
  synth->callback([&] {
    if (synth_gestures.empty() == synth_script.empty())
      throw CLI::ValidationError(
          "synth", "pass exactly one of --couples or --script");
    if (synth_cfg.channels != 8) {
      // default signatures are laid out for 8 channels
      throw CLI::ValidationError("synth",
                                 "built-in signatures require 8 channels");
    }
    fs::create_directories(synth_out);
    if (!synth_gestures.empty()) {
      for (int g : synth_gestures) {
        scrc::synth::LabeledRecording lr =
            scrc::synth::gen_couple(g, synth_cycles, synth_cfg,
                                    scrc::mix_seed(synth_seed, uint64_t(g)));
        const fs::path path =
            fs::path(synth_out) / ("couple_g" + std::to_string(g) + ".csv");
        scrc::io::write_recording_csv(path, lr.recording, &lr.truth, "couple",
                                      g, synth_seed);
        std::printf("wrote %s (%lld samples, gesture %d)\n",
                    path.c_str(), (long long)lr.recording.length(), g);
      }
    } else {
      json script_json = scrc::io::detail::read_json_file(synth_script);
      scrc::synth::ScriptedSequence script;
      for (const auto& seg : script_json.at("segments")) {
        scrc::synth::ScriptSegment s;
        s.label = seg.at("label").get<int>();
        s.duration = seg.at("duration").get<Index>();
        s.ramp = seg.value("ramp", Index(8));
        script.segments.push_back(s);
      }
      scrc::synth::LabeledRecording lr =
          scrc::synth::gen_sequence(script, synth_cfg, synth_seed);
      const std::string base = synth_name.empty() ? "sequence" : synth_name;
      const fs::path path = fs::path(synth_out) / (base + ".csv");
      scrc::io::write_recording_csv(path, lr.recording, &lr.truth, "sequence",
                                    0, synth_seed);
      std::printf("wrote %s (%lld samples, %zu segments)\n", path.c_str(),
                  (long long)lr.recording.length(), script.segments.size());
    }
  });

  // --- train ---------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "train a model from couples");
  TrainFlags tf;
  std::string train_out, train_stamp;
  add_train_flags(train_cmd, tf);
  train_cmd->add_option("--out", train_out, "model output path")->required();
  train_cmd->add_option("--stamp", train_stamp,
                        "override the provenance timestamp");
  train_cmd->callback([&] {
    std::vector<scrc::io::ProvenanceInput> prov;
    auto couples = load_couples(tf.couples_dir, tf.gestures, &prov);
    if (tf.mode == "scrc") {
      auto result = scrc::pipeline::train<scrc::Complex>(couples, tf.cfg);
      print_diagnostics(result.diagnostics);
      scrc::io::save_model(train_out, result.model, prov, train_stamp);
      std::printf("model: %d internal classes, sigma=%g, %lld x %lld "
                  "dictionary -> %s\n",
                  result.model.dictionary.class_count,
                  result.model.config.sigma,
                  (long long)result.model.dictionary.dim(),
                  (long long)result.model.dictionary.size(),
                  train_out.c_str());
    } else {
      auto result = scrc::pipeline::train<double>(couples, tf.cfg);
      print_diagnostics(result.diagnostics);
      scrc::io::save_model(train_out, result.model, prov, train_stamp);
      std::printf("model: %d internal classes, sigma=%g, %lld x %lld "
                  "dictionary -> %s\n",
                  result.model.dictionary.class_count,
                  result.model.config.sigma,
                  (long long)result.model.dictionary.dim(),
                  (long long)result.model.dictionary.size(),
                  train_out.c_str());
    }
  });

  // --- classify ------------------------------------------------------------
  auto* classify = app.add_subcommand("classify", "label a recording");
  std::string cls_model, cls_input, cls_out;
  bool cls_unmapped = false;
  classify->add_option("--model", cls_model, "model JSON")->required();
  classify->add_option("--input", cls_input, "recording CSV")->required();
  classify->add_option("--out", cls_out, "labels CSV output")->required();
  classify->add_flag("--unmapped", cls_unmapped,
                     "report internal class ids (return phases kept apart)");
  classify->callback([&] {
    scrc::io::LoadedModel loaded = scrc::io::load_model(cls_model);
    scrc::io::RecordingBundle input = scrc::io::read_recording_csv(cls_input);
    scrc::pipeline::LabelTimeline timeline = std::visit(
        [&](const auto& model) {
          return scrc::pipeline::classify_stream(model, input.recording,
                                                 !cls_unmapped);
        },
        loaded.model);
    scrc::io::write_labels_csv(cls_out, timeline);
    std::printf("%lld labels -> %s\n", (long long)timeline.count(),
                cls_out.c_str());
  });

  // --- evaluate ------------------------------------------------------------
  auto* eval = app.add_subcommand("evaluate",
                                  "score a model against per-sample truth");
  std::string ev_model, ev_input, ev_truth, ev_report;
  Index ev_tol = 0;
  eval->add_option("--model", ev_model, "model JSON")->required();
  eval->add_option("--input", ev_input, "recording CSV")->required();
  eval->add_option("--truth", ev_truth,
                   "CSV with a label column (default: the input itself)");
  eval->add_option("--report", ev_report, "report JSON output")->required();
  eval->add_option("--tolerance", ev_tol,
                   "windows of slack around phase switches");
  eval->callback([&] {
    scrc::io::LoadedModel loaded = scrc::io::load_model(ev_model);
    scrc::io::RecordingBundle input = scrc::io::read_recording_csv(ev_input);
    std::vector<int> truth =
        ev_truth.empty() || ev_truth == ev_input
            ? input.truth
            : read_truth(ev_truth, input.recording.length());
    if (truth.empty())
      throw scrc::DataError("no truth labels: pass --truth or use an input "
                            "with a label column");
    scrc::pipeline::LabelTimeline timeline = std::visit(
        [&](const auto& model) {
          return scrc::pipeline::classify_stream(model, input.recording, true);
        },
        loaded.model);
    scrc::pipeline::EvaluationReport rep =
        scrc::pipeline::evaluate(timeline, truth, ev_tol);
    scrc::io::write_report(ev_report, scrc::io::report_to_json(rep));
    std::printf("accuracy %.4f (%lld/%lld windows, tolerance %lld) -> %s\n",
                rep.accuracy, (long long)rep.correct, (long long)rep.total,
                (long long)ev_tol, ev_report.c_str());
  });

  // --- compare -------------------------------------------------------------
  auto* compare = app.add_subcommand(
      "compare", "train spectral and time-domain models, score both");
  TrainFlags cf;
  std::string cmp_test, cmp_truth, cmp_report;
  std::vector<double> cmp_sigmas;
  bool cmp_shift = false;
  Index cmp_tol = 0;
  add_train_flags(compare, cf);
  compare->get_option("--mode")->description("ignored by compare");
  compare->add_option("--test", cmp_test, "test recording CSV")->required();
  compare->add_option("--truth", cmp_truth,
                      "CSV with a label column (default: the test input)");
  compare->add_option("--report", cmp_report, "report JSON output")
      ->required();
  compare->add_option("--sigmas", cmp_sigmas,
                      "ridge weights to sweep (default: one trained value)")
      ->delimiter(',');
  compare->add_flag("--shift-augment", cmp_shift,
                    "circularly shift every test window by a seeded offset");
  compare->add_option("--tolerance", cmp_tol,
                      "windows of slack around phase switches");
  compare->callback([&] {
    auto couples = load_couples(cf.couples_dir, cf.gestures, nullptr);
    scrc::io::RecordingBundle test = scrc::io::read_recording_csv(cmp_test);
    std::vector<int> truth =
        cmp_truth.empty() || cmp_truth == cmp_test
            ? test.truth
            : read_truth(cmp_truth, test.recording.length());
    if (truth.empty())
      throw scrc::DataError("no truth labels: pass --truth or use a test "
                            "stream with a label column");
    scrc::pipeline::ComparisonReport rep = scrc::pipeline::compare_crc_scrc(
        couples, test.recording, truth, cf.cfg, cmp_sigmas, cmp_shift,
        cmp_tol);
    scrc::io::write_report(cmp_report, scrc::io::report_to_json(rep));
    std::printf("%-12s %-10s %-10s %s\n", "sigma", "scrc", "crc", "gap");
    for (const auto& row : rep.rows)
      std::printf("%-12g %-10.4f %-10.4f %+.4f\n", row.sigma,
                  row.scrc.accuracy, row.crc.accuracy,
                  row.scrc.accuracy - row.crc.accuracy);
    std::printf("report -> %s\n", cmp_report.c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // normalize CLI11's assorted usage codes onto exit code 1
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const scrc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const scrc::NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const scrc::Error& e) {  // Data, Dimension
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
