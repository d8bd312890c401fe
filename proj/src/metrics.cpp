#include "jshare/metrics.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "csv.hpp"

namespace jshare {

namespace {

std::string format_fraction(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string format_ms(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

template <typename T>
std::optional<T> optional_number(const csv::Row& row, std::size_t col, std::string_view name) {
  if (row.fields.at(col).empty()) return std::nullopt;
  return csv::parse_number<T>(row, col, name);
}

std::optional<bool> optional_flag(const csv::Row& row, std::size_t col, std::string_view name) {
  const auto& f = row.fields.at(col);
  if (f.empty()) return std::nullopt;
  if (f == "1") return true;
  if (f == "0") return false;
  throw ParseError(row.line, "invalid " + std::string(name) + " '" + f + "'");
}

}  // namespace

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::NS:
      return "NS";
    case Direction::SN:
      return "SN";
    case Direction::WE:
      return "WE";
    case Direction::EW:
      return "EW";
  }
  return "NS";
}

std::optional<Direction> parse_direction(std::string_view text) {
  if (text == "NS") return Direction::NS;
  if (text == "SN") return Direction::SN;
  if (text == "WE") return Direction::WE;
  if (text == "EW") return Direction::EW;
  return std::nullopt;
}

double cost_improvement(std::span<const Plan> initial, const JointPlan& joint,
                        const SharedCostModel& model) {
  double before = 0.0;
  double after = 0.0;
  for (const auto& plan : initial) {
    if (!joint.per_agent.contains(plan.agent)) continue;
    before += plan.solo_minutes();
    after += agent_cost(joint, plan.agent, model);
  }
  if (before <= 0.0) throw InputError("cost improvement undefined for zero initial cost");
  return (before - after) / before;
}

std::optional<double> prolongation(Minutes group_total, Minutes solo_total) {
  if (solo_total <= 0) return std::nullopt;
  return static_cast<double>(group_total - solo_total) / solo_total;
}

std::optional<double> prolongation(const std::map<AgentId, Itinerary>& group,
                                   const std::map<AgentId, Itinerary>& solo) {
  Minutes group_total = 0;
  Minutes solo_total = 0;
  for (const auto& [agent, it] : group) {
    auto s = solo.find(agent);
    if (s == solo.end()) return std::nullopt;
    group_total += it.duration();
    solo_total += s->second.duration();
  }
  return prolongation(group_total, solo_total);
}

std::map<int, double> success_rates(std::span<const ExperimentResult> results) {
  std::map<int, std::pair<int, int>> counts;  // size -> (matched, total)
  for (const auto& r : results) {
    for (const auto& g : r.groups) {
      auto& [matched, total] = counts[g.size];
      matched += g.matched ? 1 : 0;
      ++total;
    }
  }
  std::map<int, double> rates;
  for (const auto& [size, c] : counts) rates[size] = static_cast<double>(c.first) / c.second;
  return rates;
}

std::map<int, double> prolongation_share_below(std::span<const ExperimentResult> results,
                                               double threshold) {
  std::map<int, std::pair<int, int>> counts;
  for (const auto& r : results) {
    for (const auto& g : r.groups) {
      auto& [below, total] = counts[g.size];
      below += (g.matched && g.delta_t && *g.delta_t < threshold) ? 1 : 0;
      ++total;
    }
  }
  std::map<int, double> shares;
  for (const auto& [size, c] : counts) shares[size] = static_cast<double>(c.first) / c.second;
  return shares;
}

std::optional<double> scenario_prolongation(const ExperimentResult& result) {
  Minutes group_total = 0;
  Minutes solo_total = 0;
  for (const auto& g : result.groups) {
    if (!g.delta_t) continue;
    group_total += g.group_duration;
    for (const auto& [agent, d] : g.solo_durations) solo_total += d;
  }
  return prolongation(group_total, solo_total);
}

void write_results_csv(std::ostream& out, std::span<const ExperimentResult> results) {
  out << kResultsHeader << '\n';
  for (const auto& r : results) {
    const std::string prefix = csv::quote(r.scenario) + ',' + std::to_string(r.n_agents) + ',' +
                               std::string(to_string(r.direction)) + ',' +
                               std::to_string(r.seed) + ',' +
                               (r.delta_c ? format_fraction(*r.delta_c) : std::string());
    const std::string timings = format_ms(r.timings.initial_ms) + ',' +
                                format_ms(r.timings.br_ms) + ',' +
                                format_ms(r.timings.timetabling_ms) + ',' +
                                format_ms(r.timings.total_ms);
    out << prefix << ",,,,,," << timings << '\n';
    for (const auto& g : r.groups) {
      out << prefix << ',' << g.group_id << ',' << g.size << ',' << (g.matched ? 1 : 0) << ','
          << (g.timed_out ? 1 : 0) << ',' << (g.delta_t ? format_fraction(*g.delta_t) : "")
          << ',' << timings << '\n';
    }
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  for (const auto& row : csv::read(in, kResultsHeader)) {
    if (row.fields.size() != 14) {
      throw ParseError(row.line, "expected 14 fields, got " + std::to_string(row.fields.size()));
    }
    ResultRow r;
    r.line = row.line;
    r.scenario = row.fields[0];
    r.n_agents = csv::parse_number<int>(row, 1, "n_agents");
    auto dir = parse_direction(row.fields[2]);
    if (!dir) throw ParseError(row.line, "invalid direction '" + row.fields[2] + "'");
    r.direction = *dir;
    r.seed = csv::parse_number<std::uint64_t>(row, 3, "seed");
    r.delta_c = optional_number<double>(row, 4, "delta_c");
    r.group_id = optional_number<int>(row, 5, "group_id");
    r.group_size = optional_number<int>(row, 6, "group_size");
    r.matched = optional_flag(row, 7, "matched");
    r.timed_out = optional_flag(row, 8, "timed_out");
    r.delta_t = optional_number<double>(row, 9, "delta_t");
    r.timings.initial_ms = csv::parse_number<double>(row, 10, "t_initial_ms");
    r.timings.br_ms = csv::parse_number<double>(row, 11, "t_br_ms");
    r.timings.timetabling_ms = csv::parse_number<double>(row, 12, "t_timetabling_ms");
    r.timings.total_ms = csv::parse_number<double>(row, 13, "t_total_ms");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<std::string> validate_results(std::span<const ResultRow> rows) {
  std::vector<std::string> problems;
  auto report = [&](const ResultRow& r, const std::string& what) {
    problems.push_back("line " + std::to_string(r.line) + ": " + what);
  };
  for (const auto& r : rows) {
    if (r.n_agents < 1) report(r, "n_agents < 1");
    if (r.delta_c && (*r.delta_c < -1e-9 || *r.delta_c >= 1.0)) {
      report(r, "delta_c outside [0, 1)");
    }
    const auto& t = r.timings;
    if (t.initial_ms < 0 || t.br_ms < 0 || t.timetabling_ms < 0 || t.total_ms < 0) {
      report(r, "negative phase timing");
    }
    if (!r.group_id) {
      if (r.group_size || r.matched || r.timed_out || r.delta_t) {
        report(r, "summary row carries group fields");
      }
      continue;
    }
    if (!r.group_size || *r.group_size < 1) report(r, "group_size < 1");
    if (r.group_size && *r.group_size > r.n_agents) report(r, "group larger than scenario");
    if (!r.matched || !r.timed_out) {
      report(r, "group row without matched/timed_out flags");
      continue;
    }
    if (*r.matched && *r.timed_out) report(r, "group both matched and timed out");
    if (r.delta_t && !*r.matched) report(r, "delta_t on an unmatched group");
  }
  return problems;
}

std::string strip_timing_columns(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string out;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t cut = line.size();
    for (int i = 0; i < 4 && cut != std::string::npos; ++i) cut = line.rfind(',', cut - 1);
    out += line.substr(0, cut == std::string::npos ? line.size() : cut);
    out += '\n';
  }
  return out;
}

}  // namespace jshare
