#pragma once

#include "dmac/alloc_continuous.hpp"
#include "dmac/alloc_unit.hpp"
#include "dmac/baselines.hpp"
#include "dmac/iteropt.hpp"
#include "dmac/mdp.hpp"
#include "dmac/sim.hpp"

#include "json.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace dmac {

using json = nlohmann::ordered_json;

// Rationals travel as exact strings ("1/12", "3").
json to_json(const Rational& q);
json to_json(const DiscreteLaw& law);
json to_json(const RateFadingLaw& law);
json to_json(const GammaGrid& grid);
json to_json(const AllocationReport& report, const OutageAudit& audit);
json to_json(const OutageAudit& audit);
json to_json(const SchedulerPolicy& policy);
json to_json(const IterOptTrace& trace);
json to_json(const SimReport& report);
json to_json(const GtdmResult& r);

// Nine significant digits, as used for every CSV float.
std::string format_double(double x);

// RFC 4180 writer; the header row is written on construction.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  static std::string escape(const std::string& field);

 private:
  std::ostream& os_;
  std::size_t width_;
};

void write_power_table_csv(std::ostream& os, const PowerTable& table);
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);
void write_continuous_csv(std::ostream& os, const ContinuousAllocation& a);

}  // namespace dmac
