#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "hat/config.hpp"
#include "hat/error.hpp"
#include "hat/eval.hpp"
#include "hat/io.hpp"
#include "hat/synth.hpp"
#include "hat/tracker.hpp"

#ifndef HAT_VERSION
#define HAT_VERSION "0.0.0"
#endif

namespace hat::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  return text;
}

void report_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << "error code=" << code << " message=" << one_line(message) << '\n';
}

template <typename Config>
Config resolve_config(const std::string& config_path, const std::vector<std::string>& sets) {
  Config config;
  if (!config_path.empty()) apply_settings(config, read_key_value_file(config_path));
  for (const auto& s : sets) {
    const auto [key, value] = parse_assignment(s);
    apply_setting(config, key, value);
  }
  config.validate();
  return config;
}

struct FeatureSource {
  fs::path path;
  bool csv = false;
};

FeatureBank load_features(const FeatureSource& src) {
  return src.csv ? read_features_csv(src.path) : read_features(src.path);
}

// Track command ----------------------------------------------------------------

struct TrackJob {
  std::string name;
  fs::path dets;
  FeatureSource feats;
  fs::path out;
};

struct TrackOutcome {
  std::size_t frames = 0;
  std::size_t records = 0;
  std::size_t warnings = 0;
  double load_ms = 0.0;
  double track_ms = 0.0;
  double write_ms = 0.0;
};

KeyValues manifest_header(const char* command) {
  return {{"tool", "hat"}, {"version", HAT_VERSION}, {"command", command}};
}

void append(KeyValues& kv, const KeyValues& more) { kv.insert(kv.end(), more.begin(), more.end()); }

TrackOutcome run_track_job(const TrackJob& job, const TrackerConfig& config) {
  TrackOutcome outcome;
  auto t0 = Clock::now();
  const DetectionFile dets = read_detections(job.dets);
  const FeatureBank feats = load_features(job.feats);
  const std::vector<FrameInput> frames = assemble_frames(dets, feats);
  outcome.load_ms = ms_since(t0);
  outcome.warnings = dets.warnings.size();

  t0 = Clock::now();
  Tracker tracker(config);
  for (const auto& frame : frames) tracker.step(frame);
  const std::vector<TrackRecord> records = tracker.finalize();
  outcome.track_ms = ms_since(t0);

  t0 = Clock::now();
  write_tracks(records, job.out);
  outcome.write_ms = ms_since(t0);
  outcome.frames = frames.size();
  outcome.records = records.size();

  KeyValues manifest = manifest_header("track");
  append(manifest, {{"dets", job.dets.generic_string()},
                    {"feats", job.feats.path.generic_string()},
                    {"feats_format", job.feats.csv ? "csv" : "binary"},
                    {"out", job.out.generic_string()},
                    {"seed", "none"}});
  append(manifest, describe(config));
  append(manifest, {{"frames", std::to_string(outcome.frames)},
                    {"records", std::to_string(outcome.records)},
                    {"warnings", std::to_string(outcome.warnings)},
                    {"time_load_ms", format_number(outcome.load_ms)},
                    {"time_track_ms", format_number(outcome.track_ms)},
                    {"time_write_ms", format_number(outcome.write_ms)}});
  write_text_file(fs::path(job.out.string() + ".manifest"), format_key_values(manifest));
  return outcome;
}

// Each subdirectory holding det.txt plus feats.bin (or feats.csv) is one
// sequence; results land in <out>/<name>.txt.
std::vector<TrackJob> discover_sequences(const fs::path& root, const fs::path& out_dir) {
  if (!fs::is_directory(root)) throw Error(ErrorCode::Io, "not a directory: " + root.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "det.txt")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<TrackJob> jobs;
  for (const auto& d : dirs) {
    TrackJob job;
    job.name = d.filename().string();
    job.dets = d / "det.txt";
    if (fs::exists(d / "feats.bin")) {
      job.feats = {d / "feats.bin", false};
    } else if (fs::exists(d / "feats.csv")) {
      job.feats = {d / "feats.csv", true};
    } else {
      job.feats = {d / "feats.bin", false};  // reported as a missing file when loaded
    }
    job.out = out_dir / (job.name + ".txt");
    jobs.push_back(std::move(job));
  }
  if (jobs.empty()) throw Error(ErrorCode::Io, "no sequences with det.txt under " + root.string());
  return jobs;
}

void run_track_directory(const std::vector<TrackJob>& jobs, const TrackerConfig& config,
                         std::size_t workers, const fs::path& out_dir, std::ostream& out) {
  std::vector<TrackOutcome> outcomes(jobs.size());
  std::vector<std::exception_ptr> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        outcomes[i] = run_track_job(jobs[i], config);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, jobs.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  KeyValues summary = manifest_header("track");
  append(summary, {{"sequences", std::to_string(jobs.size())}});
  append(summary, describe(config));
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    summary.emplace_back(jobs[i].name + ".records", std::to_string(outcomes[i].records));
    summary.emplace_back(jobs[i].name + ".frames", std::to_string(outcomes[i].frames));
    out << jobs[i].name << ": " << outcomes[i].records << " records over " << outcomes[i].frames
        << " frames\n";
  }
  write_text_file(out_dir / "summary.manifest", format_key_values(summary));
}

// Inspect command ----------------------------------------------------------------

// Coordinates of `f` on the first two columns of `w` (zero past the last).
std::pair<double, double> plane(const FeatureVector& f, const ProjectionMatrix* proj) {
  if (proj == nullptr) return {0.0, 0.0};
  const FeatureVector p = project(f, *proj);
  return {p.empty() ? 0.0 : p[0], p.size() > 1 ? p[1] : 0.0};
}

void run_inspect(const fs::path& dets_path, const FeatureSource& feats_src, FrameIndex target,
                 const TrackerConfig& config, const fs::path& out_path, std::ostream& out) {
  const std::vector<FrameInput> frames =
      assemble_frames(read_detections(dets_path), load_features(feats_src));
  const auto it = std::find_if(frames.begin(), frames.end(),
                               [&](const FrameInput& f) { return f.frame == target; });
  if (it == frames.end()) {
    throw Error(ErrorCode::InvalidArgument, "frame " + std::to_string(target) + " has no detections");
  }

  Tracker tracker(config);
  for (auto f = frames.begin(); f != it; ++f) tracker.step(*f);

  std::vector<FeatureQueue> queues;
  for (const auto& t : tracker.trajectories()) queues.push_back(t.queue);
  std::optional<ProjectionMatrix> pca;
  std::optional<ProjectionMatrix> fld;
  std::size_t samples = 0;
  for (const auto& q : queues) samples += q.size();
  if (samples >= 2) pca = fit_pca_projection(queues, 2);
  if (queues.size() >= 2 && samples >= queues.size() + 1) {
    fld = fit_projection(queues, config.lambda0, config.epsilon, config.centroid);
  }

  const StepReport report = tracker.step(*it);
  std::vector<TrackId> label(it->features.size(), -1);
  for (const auto& [det, id] : report.matched) label[det] = id;

  std::string csv = "kind,track_id,age,det_index,pca_x,pca_y,fld_x,fld_y\n";
  auto emit = [&](const char* kind, TrackId id, std::int64_t age, std::int64_t det,
                  const FeatureVector& f) {
    const auto [px, py] = plane(f, pca ? &*pca : nullptr);
    const auto [fx, fy] = plane(f, fld ? &*fld : nullptr);
    csv += std::string(kind) + ',' + std::to_string(id) + ',' + std::to_string(age) + ',' +
           std::to_string(det) + ',' + format_number(px) + ',' + format_number(py) + ',' +
           format_number(fx) + ',' + format_number(fy) + '\n';
  };
  for (const auto& q : queues) {
    for (const auto& e : q.entries()) emit("history", q.identity(), e.age, -1, e.feature);
  }
  for (std::size_t d = 0; d < it->features.size(); ++d) {
    emit("current", label[d], 0, static_cast<std::int64_t>(d), normalized(it->features[d]));
  }
  write_text_file(out_path, csv);
  out << "frame=" << target << "\ntracks=" << queues.size() << "\nhistory_samples=" << samples
      << "\ndetections=" << it->features.size() << "\nfld_dim=" << (fld ? fld->output_dim() : 0)
      << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Appearance-only multi-object tracker with history-aware Fisher projection", "hat"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HAT_VERSION);

  // track
  auto* track = app.add_subcommand("track", "Track detections into trajectories");
  std::string dets, feats, feats_csv, out_path, config_path, seq_dir;
  std::vector<std::string> sets;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  track->add_option("--dets", dets, "Detections file (MOT text)");
  auto* feats_opt = track->add_option("--feats", feats, "Binary feature file");
  track->add_option("--feats-csv", feats_csv, "CSV feature file")->excludes(feats_opt);
  track->add_option("--seq-dir", seq_dir, "Directory of sequences to track in parallel");
  track->add_option("--out", out_path, "Output tracks file (directory with --seq-dir)")->required();
  track->add_option("--config", config_path, "Config file of key = value lines");
  track->add_option("--set", sets, "Override one setting, key=value")->allow_extra_args(false);
  track->add_option("--jobs", jobs, "Worker threads in directory mode")->check(CLI::PositiveNumber);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic sequence");
  std::string synth_config, synth_out;
  std::vector<std::string> synth_sets;
  synth->add_option("--config", synth_config, "Config file of key = value lines");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--set", synth_sets, "Override one setting, key=value")->allow_extra_args(false);

  // eval
  auto* eval = app.add_subcommand("eval", "Score predicted tracks against ground truth");
  std::string pred_path, gt_path;
  double iou_thr = 0.5;
  eval->add_option("--pred", pred_path, "Predicted tracks")->required();
  eval->add_option("--gt", gt_path, "Ground truth")->required();
  eval->add_option("--iou", iou_thr, "IoU threshold")->check(CLI::Range(0.0, 1.0));

  // bench
  auto* bench = app.add_subcommand("bench", "Time the projection fit and tracker steps");
  BenchOptions bo;
  bench->add_option("--dim", bo.dim, "Feature dimension")->check(CLI::Range(2, 1 << 16));
  bench->add_option("--ids", bo.ids, "Identities (classes)")->check(CLI::Range(2, 1 << 16));
  bench->add_option("--queue", bo.queue, "Queue length T")->check(CLI::PositiveNumber);
  bench->add_option("--frames", bo.frames, "Measured frames")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bo.seed, "Synthetic data seed");

  // inspect
  auto* inspect = app.add_subcommand("inspect", "Dump 2-D views of features at one frame");
  std::string in_dets, in_feats, in_feats_csv, in_out, in_config;
  std::vector<std::string> in_sets;
  FrameIndex in_frame = 1;
  inspect->add_option("--dets", in_dets, "Detections file")->required();
  auto* in_feats_opt = inspect->add_option("--feats", in_feats, "Binary feature file");
  inspect->add_option("--feats-csv", in_feats_csv, "CSV feature file")->excludes(in_feats_opt);
  inspect->add_option("--frame", in_frame, "Frame to inspect")->required();
  inspect->add_option("--out", in_out, "Output CSV")->required();
  inspect->add_option("--config", in_config, "Config file of key = value lines");
  inspect->add_option("--set", in_sets, "Override one setting, key=value")->allow_extra_args(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_error(err, "USAGE", e.what());
    return kExitInput;
  }

  try {
    if (*track) {
      const auto config = resolve_config<TrackerConfig>(config_path, sets);
      if (!seq_dir.empty()) {
        fs::create_directories(out_path);
        run_track_directory(discover_sequences(seq_dir, out_path), config, jobs, out_path, out);
        return kExitOk;
      }
      if (dets.empty()) throw Error(ErrorCode::InvalidArgument, "--dets is required");
      if (feats.empty() && feats_csv.empty()) {
        throw Error(ErrorCode::InvalidArgument, "one of --feats or --feats-csv is required");
      }
      TrackJob job{"", dets, feats_csv.empty() ? FeatureSource{feats, false}
                                               : FeatureSource{feats_csv, true},
                   out_path};
      const TrackOutcome o = run_track_job(job, config);
      out << "frames=" << o.frames << "\nrecords=" << o.records << '\n';
      return kExitOk;
    }
    if (*synth) {
      const auto config = resolve_config<SynthConfig>(synth_config, synth_sets);
      const SynthOutput data = generate(config);
      const fs::path dir(synth_out);
      fs::create_directories(dir);
      write_tracks(data.gt, dir / "gt.txt");
      write_detections(data.detections.rows, dir / "det.txt");
      write_features(data.features, dir / "feats.bin");
      KeyValues manifest = manifest_header("synth");
      append(manifest, describe(config));
      append(manifest, {{"detections", std::to_string(data.detections.rows.size())},
                        {"gt_records", std::to_string(data.gt.size())}});
      write_text_file(dir / "synth.manifest", format_key_values(manifest));
      out << "detections=" << data.detections.rows.size() << "\ngt_records=" << data.gt.size()
          << '\n';
      return kExitOk;
    }
    if (*eval) {
      const auto pred = read_gt(pred_path);
      const auto gt = read_gt(gt_path);
      const EvalReport report = evaluate(pred, gt, iou_thr);
      out << format_report_text(report) << '\n' << format_report_kv(report);
      return kExitOk;
    }
    if (*bench) {
      const BenchResult r = run_bench(bo);
      out << "dim=" << bo.dim << "\nids=" << bo.ids << "\nqueue=" << bo.queue
          << "\nframes=" << bo.frames << "\nprojection_dim=" << r.projection_dim
          << "\nfits=" << r.fit_ms.size() << "\nfit_p50_ms=" << format_number(r.fit_p50_ms)
          << "\nfit_p95_ms=" << format_number(r.fit_p95_ms) << "\nfps=" << format_number(r.fps)
          << '\n';
      return kExitOk;
    }
    if (*inspect) {
      if (in_feats.empty() && in_feats_csv.empty()) {
        throw Error(ErrorCode::InvalidArgument, "one of --feats or --feats-csv is required");
      }
      const auto config = resolve_config<TrackerConfig>(in_config, in_sets);
      run_inspect(in_dets,
                  in_feats_csv.empty() ? FeatureSource{in_feats, false}
                                       : FeatureSource{in_feats_csv, true},
                  in_frame, config, in_out, out);
      return kExitOk;
    }
  } catch (const Error& e) {
    report_error(err, error_code_name(e.code()), e.what());
    return is_solver_error(e.code()) ? kExitSolver : kExitInput;
  } catch (const fs::filesystem_error& e) {
    report_error(err, "IO", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    report_error(err, "INTERNAL", e.what());
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace hat::cli
