// SPDX-License-Identifier: Apache-2.0
//
// iccap command line: classify | sumrate | region | pgic | sweep.
// Exit codes: 0 success, 1 parse failure (file or command line),
// 2 channel validation failure, 3 wrong regime / not parallel.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iccap/optimizer.hpp"
#include "iccap/regime.hpp"
#include "iccap/spec_io.hpp"

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw iccap::ParseError("cannot read spec file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void print_matrix(const char* name, const iccap::Mat& m) {
  std::cout << name << ":\n";
  for (iccap::Index i = 0; i < m.rows(); ++i) {
    std::cout << " ";
    for (iccap::Index j = 0; j < m.cols(); ++j) std::cout << " " << fmt(m(i, j));
    std::cout << "\n";
  }
}

// ICCAP_SEED in the environment overrides whatever --seed carried.
void apply_env_seed(iccap::SearchConfig& cfg) {
  const char* env = std::getenv("ICCAP_SEED");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end != nullptr && *end == '\0') cfg.seed = v;
}

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const iccap::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const iccap::WrongRegime& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const iccap::NotParallel& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

void cmd_classify(const std::string& path, const iccap::SearchConfig& cfg) {
  const iccap::ChannelPair ch = iccap::to_channel(iccap::parse_spec(read_file(path)));
  const iccap::RegimeReport rep = iccap::classify(ch, cfg);
  std::cout << "label: " << iccap::to_string(rep.label) << "\n";
  for (const auto& [name, value] : rep.certificates)
    std::cout << "certificate " << name << ": " << fmt(value) << "\n";
  std::cout << "search restarts_used: " << rep.search.restarts_used << "\n";
  std::cout << "search max_radius: " << fmt(rep.search.max_radius) << "\n";
}

void cmd_sumrate(const std::string& path, const iccap::SearchConfig& cfg,
                 bool bits) {
  const iccap::ChannelPair ch = iccap::to_channel(iccap::parse_spec(read_file(path)));
  const iccap::RateResult r = iccap::sum_capacity(ch, cfg);
  std::cout << "regime: " << iccap::to_string(r.regime) << "\n";
  std::cout << "capacity_certified: " << (r.capacity_certified ? "true" : "false")
            << "\n";
  if (bits)
    std::cout << "sum_rate_bits: " << fmt(r.sum_rate_nats / std::log(2.0))
              << "\n";
  else
    std::cout << "sum_rate_nats: " << fmt(r.sum_rate_nats) << "\n";
  std::cout << "seed: " << cfg.seed << "\n";
  std::cout << "restarts_used: " << r.restarts_used << "\n";
  std::cout << "multistart_spread: " << fmt(r.multistart_spread) << "\n";
  print_matrix("s1", r.achieving.s1.mat());
  print_matrix("s2", r.achieving.s2.mat());
}

void cmd_region(const std::string& path, const iccap::SearchConfig& cfg,
                int points) {
  const iccap::ChannelPair ch = iccap::to_channel(iccap::parse_spec(read_file(path)));
  const iccap::RegionBoundary b = iccap::region_boundary(ch, points, cfg);
  std::cout << "r1_nats,r2_nats,mu1\n";
  for (const auto& p : b.points)
    std::cout << fmt(p.r1_nats) << "," << fmt(p.r2_nats) << "," << fmt(p.mu1)
              << "\n";
}

void cmd_pgic(const std::string& path, const iccap::SearchConfig& cfg) {
  const iccap::ChannelSpec spec = iccap::parse_spec(read_file(path));
  if (spec.kind != iccap::ChannelSpec::Kind::parallel)
    throw iccap::NotParallel("pgic needs the parallel spec form");
  const iccap::ChannelPair ch = iccap::to_channel(spec);
  const iccap::PgicResult r = iccap::pgic_allocate(ch, cfg);
  std::cout << "sum_rate_nats: " << fmt(r.sum_rate_nats) << "\n";
  std::cout << "kkt_residual: " << fmt(r.kkt_residual) << "\n";
  std::cout << "p1_alloc:";
  for (iccap::Index i = 0; i < r.p1_alloc.size(); ++i)
    std::cout << " " << fmt(r.p1_alloc(i));
  std::cout << "\n";
  std::cout << "p2_alloc:";
  for (iccap::Index i = 0; i < r.p2_alloc.size(); ++i)
    std::cout << " " << fmt(r.p2_alloc(i));
  std::cout << "\n";
  std::cout << "per_sub_conditions:";
  for (const bool ok : r.per_sub_conditions)
    std::cout << " " << (ok ? "true" : "false");
  std::cout << "\n";
}

void cmd_sweep(const std::string& path, const iccap::SearchConfig& cfg,
               double a_from, double a_to, int a_steps, double lambda1,
               double lambda2, double rho) {
  const iccap::ChannelPair tpl = iccap::to_channel(iccap::parse_spec(read_file(path)));
  if (tpl.dim() != 2)
    throw iccap::Error("sweep template must describe a 2x2 channel");
  iccap::ChannelPair base;
  base.h1 = iccap::Mat::Identity(2, 2);
  base.h4 = iccap::Mat::Identity(2, 2);
  base.h2 = iccap::Mat(2, 2);
  base.h2 << lambda1, rho, rho, lambda2;
  base.h3 = base.h2;
  base.p1 = tpl.p1;
  base.p2 = tpl.p2;
  std::vector<double> grid;
  for (int i = 0; i < a_steps; ++i)
    grid.push_back(a_steps == 1 ? a_from
                                : a_from + (a_to - a_from) * i / (a_steps - 1));
  const auto rows = iccap::sweep_fig2(base, grid, cfg);
  std::cout << "a,regime,c_nats\n";
  for (const auto& row : rows)
    std::cout << fmt(row.a) << "," << iccap::to_string(row.regime) << ","
              << (row.c_nats ? fmt(*row.c_nats) : "") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "iccap: capacity classification and optimization for two-user Gaussian "
      "interference channels"};
  app.require_subcommand(1);

  iccap::SearchConfig cfg;
  std::string spec_path;
  bool bits = false;
  int points = 33;
  double a_from = 0.0, a_to = 1.0;
  int a_steps = 21;
  double lambda1 = 1.0, lambda2 = 1.0, rho = 0.0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("spec", spec_path, "channel spec file (JSON)")->required();
    sub->add_option("--restarts", cfg.restarts, "search restarts")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "search seed");
  };

  CLI::App* c_classify =
      app.add_subcommand("classify", "classify the interference regime");
  add_common(c_classify);

  CLI::App* c_sumrate =
      app.add_subcommand("sumrate", "compute the sum rate for the regime");
  add_common(c_sumrate);
  c_sumrate->add_flag("--bits", bits, "report the rate in bits instead of nats");

  CLI::App* c_region = app.add_subcommand(
      "region", "trace the capacity region boundary (strong regimes)");
  add_common(c_region);
  c_region->add_option("--points", points, "number of boundary weights")
      ->check(CLI::PositiveNumber);

  CLI::App* c_pgic = app.add_subcommand(
      "pgic", "allocate power across parallel subchannels");
  add_common(c_pgic);

  CLI::App* c_sweep = app.add_subcommand(
      "sweep", "sweep the interference scale and report regimes");
  add_common(c_sweep);
  c_sweep->add_option("--a-from", a_from, "sweep start")
      ->check(CLI::NonNegativeNumber);
  c_sweep->add_option("--a-to", a_to, "sweep end")
      ->check(CLI::NonNegativeNumber);
  c_sweep->add_option("--a-steps", a_steps, "number of sweep points")
      ->check(CLI::PositiveNumber);
  c_sweep->add_option("--lambda1", lambda1, "first diagonal interference gain");
  c_sweep->add_option("--lambda2", lambda2, "second diagonal interference gain");
  c_sweep->add_option("--rho", rho, "off-diagonal interference gain");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  apply_env_seed(cfg);

  if (c_classify->parsed())
    return run_guarded([&] { cmd_classify(spec_path, cfg); });
  if (c_sumrate->parsed())
    return run_guarded([&] { cmd_sumrate(spec_path, cfg, bits); });
  if (c_region->parsed())
    return run_guarded([&] { cmd_region(spec_path, cfg, points); });
  if (c_pgic->parsed()) return run_guarded([&] { cmd_pgic(spec_path, cfg); });
  if (c_sweep->parsed())
    return run_guarded([&] {
      cmd_sweep(spec_path, cfg, a_from, a_to, a_steps, lambda1, lambda2, rho);
    });
  return 1;
}
