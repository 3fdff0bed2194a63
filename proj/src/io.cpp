#include "acs/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "acs/mechanism.hpp"

namespace acs::io {

namespace {

double positive_number(const json& obj, const std::string& field) {
  const json& v = obj.at(field);
  if (!v.is_number()) throw ValidationError("field '" + field + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x) || !(x > 0.0))
    throw ValidationError("field '" + field + "' must be positive and finite");
  return x;
}

json optional_real(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json caller_vector(const Instance& instance, std::span<const double> sorted) {
  return json(instance.to_caller_order(sorted));
}

}  // namespace

Instance parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON instance: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("instance must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "scenario" && key != "a" && key != "r" && key != "capacity")
      throw ValidationError("unknown field '" + key + "'");
  }
  for (const char* required : {"scenario", "a", "r"})
    if (!doc.contains(required))
      throw ValidationError(std::string("missing field '") + required + "'");

  if (!doc["scenario"].is_string())
    throw ValidationError("field 'scenario' must be a string");
  Scenario scenario;
  try {
    scenario = scenario_from_string(doc["scenario"].get<std::string>());
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("field 'scenario': ") + e.what());
  }

  const double a = positive_number(doc, "a");
  const json& r_field = doc["r"];
  if (!r_field.is_array()) throw ValidationError("field 'r' must be an array of numbers");
  if (r_field.size() < 2) throw ValidationError("field 'r' must list at least two users");
  std::vector<double> r;
  for (std::size_t i = 0; i < r_field.size(); ++i) {
    const json& v = r_field[i];
    const std::string where = "field 'r[" + std::to_string(i) + "]'";
    if (!v.is_number()) throw ValidationError(where + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || !(x > 0.0)) throw ValidationError(where + " must be positive and finite");
    r.push_back(x);
  }
  const double capacity = doc.contains("capacity") ? positive_number(doc, "capacity") : 1.0;
  return Instance(scenario, a, std::move(r), capacity);
}

json instance_json(const Instance& instance) {
  return json{{"scenario", to_string(instance.scenario())},
              {"a", instance.a()},
              {"r", caller_vector(instance, instance.r())},
              {"capacity", instance.capacity()}};
}

json equilibrium_json(const Instance& instance, const EquilibriumResult& result) {
  const PriceQuote p = prices(instance, result.x_star);
  const SurplusBreakdown s = surplus(instance, result.x_star);
  std::vector<std::size_t> active;
  for (std::size_t k : result.active_set) active.push_back(instance.order()[k]);
  std::sort(active.begin(), active.end());

  json out = instance_json(instance);
  out["x"] = caller_vector(instance, result.x_star.values());
  out["active_set"] = active;
  out["q"] = result.q;
  out["capacity_feasible"] = result.capacity_feasible;
  out["foc_residual"] = result.foc_residual;
  out["method"] = to_string(result.method);
  out["iterations"] = result.iterations;
  out["prices"] = json{{"mu", p.mu}, {"delta", optional_real(p.delta)},
                       {"beta", optional_real(p.beta)}};
  out["surplus"] = json{{"per_user", caller_vector(instance, s.per_user_surplus)},
                        {"per_user_cost", caller_vector(instance, s.per_user_cost)},
                        {"total_utility", s.total_utility},
                        {"total_cost", s.total_cost},
                        {"aggregate", s.aggregate_surplus}};
  return out;
}

json optimum_json(const Instance& instance, const OptimumResult& result) {
  json out = instance_json(instance);
  out["x"] = caller_vector(instance, result.x_opt.values());
  out["value"] = result.value;
  out["routing_load"] = result.routing_load;
  out["coded_rate"] = result.coded_rate;
  out["binding"] = to_string(result.binding);
  return out;
}

json poa_json(const PoaReport& r) {
  json out{{"scenario", to_string(r.scenario)},
           {"n", r.n},
           {"a", r.a},
           {"d", r.d},
           {"q_ne", r.q_ne},
           {"q_opt", r.q_opt},
           {"ne_surplus", r.ne_surplus},
           {"opt_surplus", r.opt_surplus},
           {"poa", optional_real(r.poa)},
           {"capacity_feasible", r.capacity_feasible}};
  if (r.scenario == Scenario::RoutingOnly) {
    out["routing_bound"] = optional_real(r.routing_bound);
    out["in_routing_window"] = r.in_routing_window.value_or(false);
    out["claimed_bound"] = kRoutingClaim;
  } else {
    out["coded_rate_ne"] = r.coded_rate_ne;
    out["claimed_bound"] = optional_real(r.claimed_constant);
    out["claimed_bounds"] = json{{"two_users", kTwoUserCodingClaim},
                                 {"large_n", kLargeCodingClaim}};
    out["coding_window"] = to_string(r.coding_window.value_or(CodingWindow::Outside));
    out["in_coding_window"] = r.coding_window.value_or(CodingWindow::Outside) != CodingWindow::Outside;
    out["surplus_floor"] = optional_real(r.surplus_floor);
  }
  return out;
}

json audit_json(const AuditReport& r) {
  json aggregates = json::array();
  for (const AuditAggregate& agg : r.aggregates) {
    json below = json::object();
    for (std::size_t k = 0; k < kClaims.size(); ++k)
      below[std::string(claim_label(kClaims[k]))] = agg.below[k];
    json entry{{"name", agg.name}, {"admissible", agg.admissible}, {"rejected", agg.rejected},
               {"below", below}};
    if (agg.admissible > 0) {
      entry["min_poa"] = agg.min_poa;
      entry["mean_poa"] = agg.mean_poa;
      entry["max_poa"] = agg.max_poa;
    }
    aggregates.push_back(entry);
  }
  json out{{"scenario", to_string(r.scenario)},
           {"n", r.n},
           {"samples", r.samples},
           {"seed", r.seed},
           {"applicable_claim", r.applicable_claim},
           {"claims", kClaims},
           {"feasible", r.feasible},
           {"capacity_infeasible", r.capacity_infeasible},
           {"unsupported", r.unsupported},
           {"aggregates", aggregates}};
  if (r.scenario == Scenario::CodingPair) {
    out["floor_checked"] = r.floor_checked;
    out["floor_violations"] = r.floor_violations;
    out["stated_optimum_checked"] = r.stated_optimum_checked;
    out["stated_optimum_max_rel_gap"] = r.stated_optimum_max_rel_gap;
  }
  return out;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRecord> records) {
  os << kSweepHeader << '\n';
  for (const SweepRecord& rec : records) {
    const PoaReport& r = rec.report;
    os << rec.seed << ',' << rec.index << ',' << r.n << ',' << format_real(r.a) << ','
       << format_real(r.d) << ',' << format_real(r.q_ne) << ','
       << (r.poa ? format_real(*r.poa) : std::string()) << ','
       << (r.capacity_feasible ? "true" : "false") << ',' << window_label(r) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kSweepHeader)
    throw ValidationError("missing or unexpected CSV header");
  std::vector<SweepRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 9) throw ValidationError("CSV row has wrong number of fields: " + line);
    SweepRow row;
    row.seed = std::stoull(cells[0]);
    row.index = std::stoull(cells[1]);
    row.n = std::stoull(cells[2]);
    row.a = std::stod(cells[3]);
    row.d = std::stod(cells[4]);
    row.q_ne = std::stod(cells[5]);
    if (!cells[6].empty()) row.poa = std::stod(cells[6]);
    row.capacity_feasible = cells[7] == "true";
    row.window = cells[8];
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_svg(std::ostream& os, std::span<const SweepRecord> records,
                     double reference, std::string_view title) {
  constexpr double width = 640.0, height = 400.0;
  constexpr double left = 60.0, right = 20.0, top = 40.0, bottom = 50.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double count = std::max<double>(1.0, static_cast<double>(records.size()));
  auto px = [&](double i) { return left + plot_w * (i + 0.5) / count; };
  auto py = [&](double v) { return top + plot_h * (1.0 - std::clamp(v, 0.0, 1.0)); };

  char buf[256];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
     << title << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n"
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                left, top, left, top + plot_h, left, top + plot_h, left + plot_w, top + plot_h);
  os << buf;
  for (int tick = 0; tick <= 10; tick += 2) {
    const double v = tick / 10.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" text-anchor=\"end\" font-size=\"11\">%.1f</text>\n",
                  left - 6, py(v) + 4, v);
    os << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\" font-size=\"12\">sample</text>\n"
                "<text x=\"16\" y=\"%g\" font-size=\"12\" transform=\"rotate(-90 16 %g)\">POA</text>\n",
                left + plot_w / 2, height - 12, top + plot_h / 2, top + plot_h / 2);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"red\" "
                "stroke-dasharray=\"6 4\"/>\n",
                left, py(reference), left + plot_w, py(reference));
  os << buf;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].report.poa) continue;
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"2.5\" fill=\"steelblue\"/>\n",
                  px(static_cast<double>(i)), py(*records[i].report.poa));
    os << buf;
  }
  os << "</svg>\n";
}

}  // namespace acs::io
