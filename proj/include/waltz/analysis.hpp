#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "waltz/csv.hpp"
#include "waltz/types.hpp"

namespace waltz {

enum class Vote { None, Best, Worst };

inline Vote vote_from_string(const std::string& s) {
  if (s.empty() || s == "none") return Vote::None;
  if (s == "best") return Vote::Best;
  if (s == "worst") return Vote::Worst;
  throw InputError("responses: vote must be best/worst/none, got '" + s + "'");
}

struct VoteRow {
  std::string participant;
  int block = 0;
  std::string trial;
  Vote vote = Vote::None;
};

/// Best/worst selections across blocks. Multiple selections per participant
/// per block are allowed; marking the same trial best and worst within one
/// block is not.
struct VoteTable {
  std::vector<VoteRow> rows;
  std::set<std::string> labels;  // trial label universe

  void validate() const {
    for (const VoteRow& a : rows) {
      if (a.vote != Vote::Best) continue;
      for (const VoteRow& b : rows) {
        if (b.vote == Vote::Worst && a.participant == b.participant &&
            a.block == b.block && a.trial == b.trial)
          throw InputError("votes: participant '" + a.participant + "' marked '" +
                           a.trial + "' both best and worst in block " +
                           std::to_string(a.block));
      }
    }
  }

  std::set<std::string> participants() const {
    std::set<std::string> out;
    for (const VoteRow& r : rows) out.insert(r.participant);
    return out;
  }
};

struct LikertRow {
  std::string participant;
  int block = 0;
  std::string trial;
  int order = 0;  // 1-based position within the block
  std::optional<int> confidence;  // 1..5
  std::optional<int> comfort;     // 1..5
};

struct LikertTable {
  std::vector<LikertRow> rows;
};

/// Preference score on [1, 5]: 3 + (2/n_p) * sum over participants of
/// +1 (marked best), -1 (marked worst), 0 otherwise. A participant who marked
/// the trial best in one block and worst in another cancels out.
inline double preference_metric(const VoteTable& votes, const std::string& trial) {
  if (!votes.labels.empty() && votes.labels.count(trial) == 0)
    throw InputError("preference_metric: unknown trial label '" + trial + "'");
  const auto participants = votes.participants();
  if (participants.empty())
    throw InputError("preference_metric: vote table has no participants");

  double sum = 0.0;
  for (const std::string& p : participants) {
    bool best = false, worst = false;
    for (const VoteRow& r : votes.rows) {
      if (r.participant != p || r.trial != trial) continue;
      if (r.vote == Vote::Best) best = true;
      if (r.vote == Vote::Worst) worst = true;
    }
    sum += (best ? 1.0 : 0.0) - (worst ? 1.0 : 0.0);
  }
  return 3.0 + (2.0 / static_cast<double>(participants.size())) * sum;
}

struct BestWorstWeight {
  double best = 0.0;
  double worst = 0.0;
};

/// Fractional vote weights within one block: each participant spreads a total
/// weight of 1 evenly over their best selections, and likewise for worst.
/// Abstentions contribute nothing.
inline std::map<std::string, BestWorstWeight> weighted_best_worst(const VoteTable& votes,
                                                                  int block) {
  std::map<std::string, BestWorstWeight> weights;
  for (const std::string& p : votes.participants()) {
    std::vector<const VoteRow*> best, worst;
    for (const VoteRow& r : votes.rows) {
      if (r.participant != p || r.block != block) continue;
      if (r.vote == Vote::Best) best.push_back(&r);
      if (r.vote == Vote::Worst) worst.push_back(&r);
    }
    for (const VoteRow* r : best)
      weights[r->trial].best += 1.0 / static_cast<double>(best.size());
    for (const VoteRow* r : worst)
      weights[r->trial].worst += 1.0 / static_cast<double>(worst.size());
  }
  return weights;
}

struct LikertStats {
  double mean = 0.0;
  double stddev = 0.0;  // population form (divide by n)
  int n = 0;
};

inline LikertStats likert_stats(const std::vector<int>& values) {
  LikertStats s;
  s.n = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (int v : values) sum += v;
  s.mean = sum / s.n;
  double sq = 0.0;
  for (int v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / s.n);
  return s;
}

struct TrialLikert {
  std::optional<LikertStats> confidence;
  std::optional<LikertStats> comfort;
};

struct OrderLikert {
  LikertStats confidence;
  LikertStats comfort;
};

struct LikertSummary {
  std::map<std::string, TrialLikert> by_trial;
  std::map<std::pair<int, int>, OrderLikert> by_order;  // (block, order)
  std::vector<std::string> warnings;
};

/// Per-trial mean and population std of both scales, plus the same aggregated
/// by within-block presentation order. Empty cells are omitted with a warning
/// rather than filled in.
inline LikertSummary likert_summary(const LikertTable& table) {
  LikertSummary out;
  std::map<std::string, std::pair<std::vector<int>, std::vector<int>>> trial_values;
  std::map<std::pair<int, int>, std::pair<std::vector<int>, std::vector<int>>> order_values;

  for (const LikertRow& r : table.rows) {
    auto check = [&](std::optional<int> v, const char* what) {
      if (v && (*v < 1 || *v > 5))
        throw InputError("likert: " + std::string(what) + " for trial '" + r.trial +
                         "' must be in 1..5");
    };
    check(r.confidence, "confidence");
    check(r.comfort, "comfort");
    auto& tv = trial_values[r.trial];
    auto& ov = order_values[{r.block, r.order}];
    if (r.confidence) {
      tv.first.push_back(*r.confidence);
      ov.first.push_back(*r.confidence);
    }
    if (r.comfort) {
      tv.second.push_back(*r.comfort);
      ov.second.push_back(*r.comfort);
    }
  }

  for (const auto& [trial, values] : trial_values) {
    TrialLikert t;
    if (!values.first.empty()) t.confidence = likert_stats(values.first);
    else out.warnings.push_back("trial '" + trial + "': no confidence responses");
    if (!values.second.empty()) t.comfort = likert_stats(values.second);
    else out.warnings.push_back("trial '" + trial + "': no comfort responses");
    out.by_trial[trial] = t;
  }
  for (const auto& [key, values] : order_values) {
    if (values.first.empty() && values.second.empty()) continue;
    out.by_order[key] = OrderLikert{likert_stats(values.first), likert_stats(values.second)};
  }
  return out;
}

// ---------------------------------------------------------------------------
// responses CSV
// ---------------------------------------------------------------------------

struct ResponsesData {
  VoteTable votes;
  LikertTable likert;
};

/// Reads questionnaire rows with header
///   participant,block,trial,order,vote,confidence,comfort
/// where vote and the scale columns may be empty.
inline ResponsesData load_responses(std::istream& in, const std::string& name = "responses") {
  std::string line;
  if (!std::getline(in, line)) throw InputError(name + ": empty file");
  const std::vector<std::string> header = csv::split_line(line);
  static const std::vector<std::string> expected = {
      "participant", "block", "trial", "order", "vote", "confidence", "comfort"};
  if (header != expected)
    throw InputError(name + ": expected header participant,block,trial,order,vote,confidence,comfort");

  ResponsesData data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = csv::split_line(line);
    if (f.size() != expected.size())
      throw InputError(name + " line " + std::to_string(line_no) + ": expected 7 fields");
    const std::string where = name + " line " + std::to_string(line_no);

    LikertRow row;
    row.participant = f[0];
    row.block = csv::parse_int(f[1], where + " block");
    row.trial = f[2];
    row.order = csv::parse_int(f[3], where + " order");
    if (!f[5].empty()) row.confidence = csv::parse_int(f[5], where + " confidence");
    if (!f[6].empty()) row.comfort = csv::parse_int(f[6], where + " comfort");
    if (row.participant.empty() || row.trial.empty())
      throw InputError(where + ": participant and trial must be nonempty");

    data.votes.labels.insert(row.trial);
    data.votes.rows.push_back(
        {row.participant, row.block, row.trial, vote_from_string(f[4])});
    data.likert.rows.push_back(std::move(row));
  }
  data.votes.validate();
  return data;
}

// ---------------------------------------------------------------------------
// metric table emitters
// ---------------------------------------------------------------------------

/// Per-trial metrics table: preference, per-block weights folded in, and the
/// Likert statistics.
inline std::string metrics_csv(const ResponsesData& data) {
  const LikertSummary likert = likert_summary(data.likert);

  std::set<int> blocks;
  for (const VoteRow& r : data.votes.rows) blocks.insert(r.block);
  std::map<std::string, BestWorstWeight> weights;
  for (int b : blocks)
    for (const auto& [trial, w] : weighted_best_worst(data.votes, b)) {
      weights[trial].best += w.best;
      weights[trial].worst += w.worst;
    }

  std::string out =
      "trial,preference,best_weight,worst_weight,"
      "confidence_mean,confidence_std,confidence_n,comfort_mean,comfort_std,comfort_n\n";
  for (const std::string& trial : data.votes.labels) {
    out += csv::quote(trial);
    out += ',' + csv::format(preference_metric(data.votes, trial));
    const BestWorstWeight w = weights.count(trial) ? weights.at(trial) : BestWorstWeight{};
    out += ',' + csv::format(w.best) + ',' + csv::format(w.worst);
    const auto it = likert.by_trial.find(trial);
    const auto put_stats = [&out](const std::optional<LikertStats>& s) {
      if (s) {
        out += ',' + csv::format(s->mean) + ',' + csv::format(s->stddev) + ',' +
               csv::format(s->n);
      } else {
        out += ",,,0";
      }
    };
    if (it != likert.by_trial.end()) {
      put_stats(it->second.confidence);
      put_stats(it->second.comfort);
    } else {
      out += ",,,0,,,0";
    }
    out += '\n';
  }
  return out;
}

/// Plot-ready series by within-block presentation order.
inline std::string order_series_csv(const ResponsesData& data) {
  const LikertSummary likert = likert_summary(data.likert);
  std::string out =
      "block,order,confidence_mean,confidence_std,comfort_mean,comfort_std,n\n";
  for (const auto& [key, stats] : likert.by_order) {
    out += csv::format(key.first) + ',' + csv::format(key.second);
    out += ',' + csv::format(stats.confidence.mean) + ',' + csv::format(stats.confidence.stddev);
    out += ',' + csv::format(stats.comfort.mean) + ',' + csv::format(stats.comfort.stddev);
    out += ',' + csv::format(std::max(stats.confidence.n, stats.comfort.n));
    out += '\n';
  }
  return out;
}

}  // namespace waltz
