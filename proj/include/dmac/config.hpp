#pragma once

#include "dmac/alloc_continuous.hpp"
#include "dmac/io.hpp"
#include "dmac/iteropt.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmac {

// Schema violation; path is a JSON pointer-like location such as
// "users[1].arrivals[0][1]".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct UserConfig {
  DiscreteLaw arrivals;
  std::optional<DiscreteLaw> fading;  // power gains h^2; fixed gain when absent
};

struct SimSettings {
  std::size_t slots = 100000;
  std::size_t reps = 1;
  std::uint64_t seed = 1;
  bool trace = false;
};

struct SweepConfig {
  std::string axis;  // alpha | gamma_a | p1
  std::vector<double> grid;
  std::vector<Rational> deltas;  // VIA steps for D_max > 1
  bool simulate = false;
};

struct ContinuousConfig {
  std::vector<ContinuousLawSpec> users;
  double alpha = 1.0;
};

struct Config {
  std::vector<UserConfig> users;
  std::vector<Rational> gains;
  std::size_t dmax = 1;
  std::string scheduler = "identity";
  double dd_beta = 0.9;
  Rational robust_step = Rational(1, 32);  // grid for robust scheduler rates
  IterOptConfig iteropt;
  SimSettings sim;
  std::optional<SweepConfig> sweep;
  std::optional<ContinuousConfig> continuous;

  // Per-user law; a missing fading law becomes the point mass at the gain.
  std::vector<RateFadingLaw> laws() const;
  bool fixed_fading() const;
};

Config parse_config(const json& doc);
Config load_config(const std::string& path);

// Law forms: [[v, p], ...], {"uniform": [v, ...]}, {"point": v},
// {"truncated_geometric": {"p": p, "n": n}}. Numbers or "p/q" strings.
DiscreteLaw parse_law(const json& j, const std::string& path);

}  // namespace dmac
