// Command-line front end: simulate single trials, run shuffled blocks,
// compute questionnaire metrics and render plots.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "waltz/waltz.hpp"

namespace fs = std::filesystem;

namespace {

waltz::TrialConfig load_trial(const std::string& path) {
  const waltz::json j = waltz::load_json_file(path);
  return waltz::trial_from_json(j, fs::path(path).parent_path().string());
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& out_dir) {
  waltz::TrialConfig cfg = load_trial(config_path);
  if (seed) cfg.seed = *seed;
  const waltz::TrialLog log = waltz::run_trial(cfg);

  const fs::path dir = !out_dir.empty()       ? fs::path(out_dir)
                       : !cfg.output_path.empty() ? fs::path(cfg.output_path)
                                                  : fs::path(".");
  const fs::path csv_path = waltz::write_trial_log(log, dir);
  std::cout << "trial " << log.label << ": " << log.records.size() << " ticks, "
            << log.steps_emitted << " steps, " << log.events.size() << " events"
            << (log.stopped ? ", stopped early" : "") << "\n"
            << "wrote " << csv_path.string() << "\n";
  return 0;
}

int cmd_block(const std::string& config_path, std::optional<std::uint64_t> seed,
              const std::string& out_dir) {
  const waltz::json j = waltz::load_json_file(config_path);
  waltz::ProtocolConfig protocol =
      waltz::protocol_from_json(j, fs::path(config_path).parent_path().string());
  if (seed) protocol.seed = *seed;

  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  waltz::json manifest;
  manifest["seed"] = protocol.seed;
  manifest["blocks"] = waltz::json::array();

  for (std::size_t b = 0; b < protocol.blocks.size(); ++b) {
    const waltz::BlockConfig& block = protocol.blocks[b];
    const waltz::BlockResult result =
        waltz::run_block(block.trials, protocol.seed + b, block.name);

    waltz::json block_entry;
    block_entry["name"] = block.name;
    block_entry["order"] = waltz::json::array();
    for (std::size_t i = 0; i < result.logs.size(); ++i) {
      const waltz::TrialLog& log = result.logs[i];
      const std::string stem =
          block.name + "_" + std::to_string(i + 1) + "_" + log.label;
      const fs::path csv_path = waltz::write_trial_log(log, dir, stem);
      waltz::json entry;
      entry["position"] = i + 1;
      entry["original_index"] = result.order[i];
      entry["label"] = log.label;
      entry["seed"] = log.seed;
      entry["stopped"] = log.stopped;
      entry["file"] = csv_path.filename().string();
      block_entry["order"].push_back(entry);
      std::cout << block.name << " #" << (i + 1) << ": " << log.label << " -> "
                << csv_path.string() << "\n";
    }
    manifest["blocks"].push_back(block_entry);
  }
  waltz::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << (dir / "manifest.json").string() << "\n";
  return 0;
}

int cmd_analyze(const std::vector<std::string>& inputs, const std::string& out_dir) {
  waltz::ResponsesData data;
  for (const std::string& path : inputs) {
    std::ifstream in(path);
    if (!in) throw waltz::InputError("cannot open '" + path + "'");
    waltz::ResponsesData part = waltz::load_responses(in, path);
    data.votes.rows.insert(data.votes.rows.end(), part.votes.rows.begin(),
                           part.votes.rows.end());
    data.votes.labels.insert(part.votes.labels.begin(), part.votes.labels.end());
    data.likert.rows.insert(data.likert.rows.end(), part.likert.rows.begin(),
                            part.likert.rows.end());
  }
  data.votes.validate();

  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  waltz::write_file(dir / "metrics.csv", waltz::metrics_csv(data));
  waltz::write_file(dir / "order_series.csv", waltz::order_series_csv(data));
  for (const std::string& w : waltz::likert_summary(data.likert).warnings)
    std::cerr << "warning: " << w << "\n";
  std::cout << "wrote " << (dir / "metrics.csv").string() << " and "
            << (dir / "order_series.csv").string() << "\n";
  return 0;
}

int cmd_plot(const std::vector<std::string>& inputs, const std::string& out_dir) {
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  for (const std::string& path : inputs) {
    std::ifstream in(path);
    if (!in) throw waltz::InputError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw waltz::InputError(path + ": empty file");
    const std::vector<std::string> header = waltz::csv::split_line(line);

    if (!header.empty() && header.front() == "trial") {
      // metrics.csv: bars for preference and vote weights, bars for likert means
      std::map<std::string, std::size_t> col;
      for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
      std::vector<std::string> trials;
      waltz::svg::Series pref{"preference", {}, {}};
      waltz::svg::Series best{"best weight", {}, {}};
      waltz::svg::Series worst{"worst weight", {}, {}};
      waltz::svg::Series conf{"confidence", {}, {}};
      waltz::svg::Series comf{"comfort", {}, {}};
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = waltz::csv::split_line(line);
        trials.push_back(f[col["trial"]]);
        pref.values.push_back(waltz::csv::parse_double(f[col["preference"]], path));
        best.values.push_back(waltz::csv::parse_double(f[col["best_weight"]], path));
        worst.values.push_back(waltz::csv::parse_double(f[col["worst_weight"]], path));
        const std::string cm = f[col["confidence_mean"]];
        const std::string km = f[col["comfort_mean"]];
        conf.values.push_back(cm.empty() ? 0.0 : waltz::csv::parse_double(cm, path));
        comf.values.push_back(km.empty() ? 0.0 : waltz::csv::parse_double(km, path));
      }
      waltz::write_file(dir / "preference.svg",
                        waltz::svg::bar_chart("Preference by trial", trials, {pref}, 1, 5));
      waltz::write_file(dir / "votes.svg",
                        waltz::svg::bar_chart("Best/worst vote weight", trials, {best, worst}));
      waltz::write_file(dir / "likert.svg",
                        waltz::svg::bar_chart("Likert means by trial", trials, {conf, comf}, 0, 5));
      std::cout << "wrote preference.svg, votes.svg, likert.svg in " << dir.string() << "\n";
    } else if (!header.empty() && header.front() == "block") {
      std::map<std::string, std::size_t> col;
      for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
      std::map<int, std::vector<std::vector<std::string>>> by_block;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = waltz::csv::split_line(line);
        by_block[waltz::csv::parse_int(f[col["block"]], path)].push_back(std::move(f));
      }
      for (const auto& [block, rows] : by_block) {
        std::vector<double> x;
        waltz::svg::Series conf{"confidence", {}, {}};
        waltz::svg::Series comf{"comfort", {}, {}};
        for (const auto& f : rows) {
          x.push_back(waltz::csv::parse_double(f[col["order"]], path));
          conf.values.push_back(waltz::csv::parse_double(f[col["confidence_mean"]], path));
          conf.spread.push_back(waltz::csv::parse_double(f[col["confidence_std"]], path));
          comf.values.push_back(waltz::csv::parse_double(f[col["comfort_mean"]], path));
          comf.spread.push_back(waltz::csv::parse_double(f[col["comfort_std"]], path));
        }
        const std::string name = "order_block" + std::to_string(block) + ".svg";
        waltz::write_file(dir / name,
                          waltz::svg::line_chart("Block " + std::to_string(block) +
                                                     " by presentation order",
                                                 x, {conf, comf}, 0, 5.5));
        std::cout << "wrote " << (dir / name).string() << "\n";
      }
    } else {
      throw waltz::InputError(path + ": unrecognized series file (expected metrics or order series)");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slow-waltz pHRI controller simulator and study toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> inputs;

  auto* simulate = app.add_subcommand("simulate", "Run a single trial");
  simulate->add_option("--config", config_path, "Trial config (JSON)")->required();
  simulate->add_option("--seed", seed, "Override the trial seed");
  simulate->add_option("--out", out_dir, "Output directory");

  auto* block = app.add_subcommand("block", "Run shuffled trial blocks");
  block->add_option("--config", config_path, "Protocol config (JSON)")->required();
  block->add_option("--seed", seed, "Override the protocol seed");
  block->add_option("--out", out_dir, "Output directory");

  auto* analyze = app.add_subcommand("analyze", "Compute study metrics from responses CSVs");
  analyze->add_option("inputs", inputs, "Responses CSV files")->required();
  analyze->add_option("--out", out_dir, "Output directory");

  auto* plot = app.add_subcommand("plot", "Render SVG charts from metric series CSVs");
  plot->add_option("inputs", inputs, "metrics.csv / order_series.csv files")->required();
  plot->add_option("--out", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, seed, out_dir);
    if (block->parsed()) return cmd_block(config_path, seed, out_dir);
    if (analyze->parsed()) return cmd_analyze(inputs, out_dir);
    if (plot->parsed()) return cmd_plot(inputs, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
