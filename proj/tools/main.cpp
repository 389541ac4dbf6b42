#include "dmac/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

void print_summary(const dmac::CommandResult& res, const std::string& format) {
  if (format == "csv") {
    dmac::CsvWriter w(std::cout, {"key", "value"});
    for (auto it = res.summary.begin(); it != res.summary.end(); ++it)
      w.row({it.key(), it->is_string() ? it->get<std::string>() : it->dump()});
    return;
  }
  std::cout << res.summary.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay-constrained power allocation and scheduling for the two-user multiple access channel"};
  app.require_subcommand(1);

  std::string config_path;
  dmac::CommandOptions opt;
  std::string init;
  std::uint64_t seed = 0;

  using Handler = dmac::CommandResult (*)(const dmac::Config&, const dmac::CommandOptions&);
  const std::vector<std::tuple<std::string, std::string, Handler>> commands{
      {"alloc", "Unit-delay optimal allocation, outage audit and power table", dmac::cmd_alloc},
      {"iteropt", "Alternating allocation and scheduling for D_max > 1", dmac::cmd_iteropt},
      {"simulate", "Slot-level Monte Carlo run of the configured scheduler", dmac::cmd_simulate},
      {"baselines", "Centralized, decentralized and TDMA average sum-powers", dmac::cmd_baselines},
      {"sweep", "Long-format CSV over the configured sweep axis", dmac::cmd_sweep},
      {"continuous", "Unit-delay allocation for continuous packet sizes", dmac::cmd_continuous},
  };
  Handler chosen = nullptr;
  for (const auto& [name, help, handler] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Simulation seed (overrides sim.seed)");
    sub->add_option("--init", init, "IterOpt start: tdma | unitdelay")->check(CLI::IsMember({"tdma", "unitdelay"}));
    sub->add_option("--format", opt.format, "Summary format on stdout")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    Handler h = handler;
    sub->callback([&chosen, h] { chosen = h; });
  }
  CLI11_PARSE(app, argc, argv);

  for (const auto* sub : app.get_subcommands()) {
    if (sub->count("--seed")) opt.seed = seed;
    if (!init.empty()) opt.init = init == "tdma" ? dmac::IterInit::tdma : dmac::IterInit::unitdelay;
  }
  try {
    dmac::Config cfg = dmac::load_config(config_path);
    dmac::CommandResult res = chosen(cfg, opt);
    print_summary(res, opt.format);
    return res.exit_code;
  } catch (const dmac::ConfigError& e) {
    std::cerr << "config error at " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
