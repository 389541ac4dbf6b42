#pragma once

#include "dmac/config.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dmac {

struct CommandOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<IterInit> init;
  std::string format = "json";  // stdout summary: json | csv
};

struct CommandResult {
  int exit_code = 0;
  json summary;
  std::vector<std::string> files;  // written, relative to out_dir
};

CommandResult cmd_alloc(const Config& cfg, const CommandOptions& opt);
CommandResult cmd_iteropt(const Config& cfg, const CommandOptions& opt);
CommandResult cmd_simulate(const Config& cfg, const CommandOptions& opt);
CommandResult cmd_baselines(const Config& cfg, const CommandOptions& opt);
CommandResult cmd_sweep(const Config& cfg, const CommandOptions& opt);
CommandResult cmd_continuous(const Config& cfg, const CommandOptions& opt);

struct SweepRow {
  double axis;
  std::string scheme;
  double average;
  std::string source;  // analytic | simulated
};

std::vector<SweepRow> run_sweep(const Config& cfg, const CommandOptions& opt = {});

// Unit-delay optimum for any user count; L > 2 needs fixed gains.
AllocationReport allocate_config(const Config& cfg);

// Named average sum-powers of every scheme that applies to the config.
std::vector<std::pair<std::string, double>> scheme_averages(const Config& cfg, const CommandOptions& opt = {});

}  // namespace dmac
