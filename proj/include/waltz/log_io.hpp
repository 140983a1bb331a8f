#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "waltz/csv.hpp"
#include "waltz/trial.hpp"

namespace waltz {

/// Fixed per-tick CSV column order (documented in the README):
///   t, q_*, qc_*, qdc_*, then per hand: fm_{x,y,z,mx,my,mz}, fa_*, fd_*,
///   pose_{px,py,pz,qw,qx,qy,qz}, setp_*, lambda; then blend_*, step_index,
///   base_x, base_y, stopped.
inline std::string log_csv_header(const TrialLog& log) {
  if (log.records.empty()) throw InputError("log '" + log.label + "' has no records");
  const auto n = log.records.front().q.size();
  const auto nh = log.records.front().hands.size();
  std::string h = "t";
  const auto joints = [&](const std::string& prefix) {
    for (Eigen::Index i = 0; i < n; ++i) h += "," + prefix + std::to_string(i);
  };
  joints("q_");
  joints("qc_");
  joints("qdc_");
  static const char* wrench_axes[] = {"x", "y", "z", "mx", "my", "mz"};
  static const char* pose_axes[] = {"px", "py", "pz", "qw", "qx", "qy", "qz"};
  for (std::size_t hand = 0; hand < nh; ++hand) {
    const std::string p = "h" + std::to_string(hand) + "_";
    for (const char* a : wrench_axes) h += "," + p + "fm_" + a;
    for (const char* a : wrench_axes) h += "," + p + "fa_" + a;
    for (const char* a : wrench_axes) h += "," + p + "fd_" + a;
    for (const char* a : pose_axes) h += "," + p + "pose_" + a;
    for (const char* a : pose_axes) h += "," + p + "setp_" + a;
    h += "," + p + "lambda";
  }
  joints("blend_");
  h += ",torso_offset,step_index,base_x,base_y,stopped";
  return h;
}

inline std::string to_csv(const TrialLog& log) {
  std::string out = log_csv_header(log);
  out += '\n';
  const auto put = [&out](double v) {
    out += ',';
    out += csv::format(v);
  };
  const auto put_wrench = [&](const Wrench& w) {
    for (int i = 0; i < 3; ++i) put(w.force[i]);
    for (int i = 0; i < 3; ++i) put(w.moment[i]);
  };
  const auto put_pose = [&](const Pose& p) {
    for (int i = 0; i < 3; ++i) put(p.position[i]);
    put(p.orientation.w());
    put(p.orientation.x());
    put(p.orientation.y());
    put(p.orientation.z());
  };
  for (const TickRecord& r : log.records) {
    out += csv::format(r.t);
    for (Eigen::Index i = 0; i < r.q.size(); ++i) put(r.q[i]);
    for (Eigen::Index i = 0; i < r.q_c.size(); ++i) put(r.q_c[i]);
    for (Eigen::Index i = 0; i < r.qd_c.size(); ++i) put(r.qd_c[i]);
    for (const HandRecord& h : r.hands) {
      put_wrench(h.measured);
      put_wrench(h.applied);
      put_wrench(h.task);
      put_pose(h.pose);
      put_pose(h.setpoint);
      put(h.lambda);
    }
    for (Eigen::Index i = 0; i < r.blend.size(); ++i) put(r.blend[i]);
    put(r.torso_yaw_offset);
    out += ',';
    out += csv::format(r.step_index);
    put(r.base.x());
    put(r.base.y());
    out += r.stopped ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

/// Events as line-delimited JSON records: {"t": ..., "kind": ..., ...}.
inline std::string events_to_jsonl(const TrialLog& log) {
  std::string out;
  for (const TrialEvent& e : log.events) {
    json j;
    j["t"] = e.t;
    j["kind"] = e.kind;
    j["step_index"] = e.step_index;
    if (e.kind == "utterance") j["text"] = e.text;
    else if (e.kind == "step_onset") j["foot"] = e.text;
    else if (e.kind == "stop") j["hand"] = e.text;
    out += j.dump();
    out += '\n';
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << content;
}

/// Writes `<label>.csv` and `<label>_events.jsonl` into the output directory;
/// returns the CSV path.
inline std::filesystem::path write_trial_log(const TrialLog& log,
                                             const std::filesystem::path& out_dir,
                                             const std::string& stem_override = "") {
  std::string stem = stem_override.empty() ? log.label : stem_override;
  for (char& c : stem)
    if (c == '+' || c == ' ' || c == '/') c = '_';
  const auto csv_path = out_dir / (stem + ".csv");
  write_file(csv_path, to_csv(log));
  write_file(out_dir / (stem + "_events.jsonl"), events_to_jsonl(log));
  return csv_path;
}

}  // namespace waltz
