// Serialization for the command-line front end.
//
// Instance files:
//   {"scenario":"routing_only"|"coding_pair","a":<num>,"r":[<num>...],
//    "capacity":<num, optional, default 1>}
// Unknown fields are rejected. Per-user vectors in emitted documents use the
// caller's user order, not the internal sorted order.
#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "acs/analysis.hpp"
#include "acs/equilibrium.hpp"
#include "acs/model.hpp"
#include "acs/optimum.hpp"

namespace acs::io {

using nlohmann::json;

Instance parse_instance(std::string_view text);
json instance_json(const Instance& instance);

json equilibrium_json(const Instance& instance, const EquilibriumResult& result);
json optimum_json(const Instance& instance, const OptimumResult& result);
json poa_json(const PoaReport& report);
json audit_json(const AuditReport& report);

/// 17 significant digits; "nan"/"inf" never occur for validated data.
std::string format_real(double v);

inline constexpr std::string_view kSweepHeader =
    "seed,index,n,a,d,q_ne,poa,capacity_feasible,window";

void write_sweep_csv(std::ostream& os, std::span<const SweepRecord> records);

struct SweepRow {
  std::uint64_t seed = 0;
  std::size_t index = 0;
  std::size_t n = 0;
  double a = 0.0;
  double d = 0.0;
  double q_ne = 0.0;
  std::optional<double> poa;
  bool capacity_feasible = false;
  std::string window;
};
std::vector<SweepRow> read_sweep_csv(std::istream& is);

/// Scatter of POA against sample index with a horizontal reference line.
void write_sweep_svg(std::ostream& os, std::span<const SweepRecord> records,
                     double reference, std::string_view title);

}  // namespace acs::io
