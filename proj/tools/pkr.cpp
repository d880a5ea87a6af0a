// pkr: key rates, single estimates and sweeps from the command line.

#include "pkr/pkr.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct StateArgs {
  std::string scenario;
  std::string state = "swap";
  std::string channel = "none";
  std::string rot_theta = "0";
  std::string rot_phi = "0";
  std::string start_theta = "0";
  std::string start_phi = "0";
};

void add_state_options(CLI::App* cmd, StateArgs& a, bool with_scenario) {
  if (with_scenario) {
    cmd->add_option("--scenario", a.scenario, "Builtin scenario (see `pkr scenarios`)");
  }
  cmd->add_option("--state", a.state, "Base state: swap | mswap | mixture:p=<w>")->capture_default_str();
  cmd->add_option("--channel", a.channel,
                  "Noise on A: depolarizing:p=.. | phaseflip:p=.. | pauli:p1=..,p2=..,p3=..,p4=.. | "
                  "trig:u=..,v=..")
      ->capture_default_str();
  cmd->add_option("--rotate-theta", a.rot_theta, "Rotation of Alice's key qubit, polar angle")
      ->capture_default_str();
  cmd->add_option("--rotate-phi", a.rot_phi, "Rotation of Alice's key qubit, azimuth")->capture_default_str();
}

pkr::ScenarioSpec resolve_scenario(const StateArgs& a) {
  if (!a.scenario.empty()) {
    auto s = pkr::find_scenario(a.scenario);
    s.start = {pkr::parse_angle(a.start_theta), pkr::parse_angle(a.start_phi)};
    return s;
  }
  pkr::ScenarioSpec s;
  s.name = "custom";
  s.base = pkr::parse_base_state(a.state);
  s.channel = pkr::parse_channel_spec(a.channel);
  s.rotation = {pkr::parse_angle(a.rot_theta), pkr::parse_angle(a.rot_phi)};
  s.start = {pkr::parse_angle(a.start_theta), pkr::parse_angle(a.start_phi)};
  return s;
}

void write_rows(const std::vector<pkr::SweepRecord>& rows, const std::string& format,
                const std::string& out) {
  const auto fmt = pkr::parse_format(format);
  if (out.empty() || out == "-") {
    if (fmt == pkr::OutputFormat::csv) {
      pkr::write_csv(std::cout, rows);
    } else {
      pkr::write_json(std::cout, rows);
    }
  } else {
    pkr::emit(rows, fmt, out);
  }
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Key rates of private states and ring-sampling basis estimation"};
  app.require_subcommand(1);

  // keyrate
  StateArgs kr;
  std::string theta = "0", phi = "0", bob_theta, bob_phi;
  auto* keyrate = app.add_subcommand("keyrate", "Devetak-Winter rate at one measurement basis");
  add_state_options(keyrate, kr, false);
  keyrate->add_option("--theta", theta, "Alice basis polar angle (accepts a pi suffix)")->capture_default_str();
  keyrate->add_option("--phi", phi, "Alice basis azimuth")->capture_default_str();
  keyrate->add_option("--bob-theta", bob_theta, "Bob basis polar angle; switches to the CCQ rate");
  keyrate->add_option("--bob-phi", bob_phi, "Bob basis azimuth (default 0)");

  // estimate
  StateArgs est;
  std::string est_theta1 = "0.005pi", est_out, est_format = "csv";
  std::size_t est_points = 50;
  bool est_omit_timing = false;
  auto* estimate = app.add_subcommand("estimate", "Estimate the optimal basis from one ring");
  add_state_options(estimate, est, true);
  estimate->add_option("--theta1", est_theta1, "Ring radius")->capture_default_str();
  estimate->add_option("--points", est_points, "Ring points N (>= 4)")->capture_default_str();
  estimate->add_option("--start-theta", est.start_theta, "Ring pole, polar angle")->capture_default_str();
  estimate->add_option("--start-phi", est.start_phi, "Ring pole, azimuth")->capture_default_str();
  estimate->add_option("--out", est_out, "Output file (stdout when omitted)");
  estimate->add_option("--format", est_format, "csv | json")->capture_default_str();
  estimate->add_flag("--omit-timing", est_omit_timing, "Write wall_ms as 0 for byte-stable output");

  // sweep
  StateArgs sw;
  std::vector<std::string> sw_theta1s;
  std::vector<std::size_t> sw_points;
  std::string sw_out, sw_format;
  bool sw_omit_timing = false;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario over ring radii and point counts");
  sweep->add_option("--scenario", sw.scenario, "Builtin scenario")->required();
  sweep->add_option("--theta1-list", sw_theta1s, "Ring radii, comma separated")->delimiter(',');
  sweep->add_option("--points-list", sw_points, "Point counts, comma separated")->delimiter(',');
  sweep->add_option("--start-theta", sw.start_theta, "Ring pole, polar angle")->capture_default_str();
  sweep->add_option("--start-phi", sw.start_phi, "Ring pole, azimuth")->capture_default_str();
  sweep->add_option("--out", sw_out, "Output file")->required();
  sweep->add_option("--format", sw_format, "csv | json (default: from the file extension, else csv)");
  sweep->add_flag("--omit-timing", sw_omit_timing, "Write wall_ms as 0 for byte-stable output");

  auto* scenarios = app.add_subcommand("scenarios", "List builtin scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*keyrate) {
      const auto spec = resolve_scenario(kr);
      const pkr::KeyRateEvaluator ev(pkr::build_scenario_state(spec));
      const pkr::MeasurementAngles a{pkr::parse_angle(theta), pkr::parse_angle(phi)};
      pkr::KeyRateBreakdown k;
      if (!bob_theta.empty() || !bob_phi.empty()) {
        const pkr::MeasurementAngles b{bob_theta.empty() ? 0.0 : pkr::parse_angle(bob_theta),
                                       bob_phi.empty() ? 0.0 : pkr::parse_angle(bob_phi)};
        k = ev.ccq(a, b);
      } else {
        k = ev.cqq(a);
      }
      std::cout << (k.bob ? "ccq" : "cqq") << " iAB=" << num(k.i_ab) << " iAE=" << num(k.i_ae)
                << " key=" << num(k.key) << '\n';
    } else if (*estimate) {
      const auto spec = resolve_scenario(est);
      pkr::SweepOptions opt;
      opt.record_timing = !est_omit_timing;
      const auto rows = pkr::run_sweep(spec, {pkr::parse_angle(est_theta1)}, {est_points}, opt);
      if (!rows.front().error.empty()) throw std::runtime_error(rows.front().error);
      write_rows(rows, est_format, est_out);
      if (!rows.front().trusted()) {
        std::cerr << "pkr: warning: estimate flagged (" << (rows.front().symmetry_broken ? "symmetry broken" : "")
                  << (rows.front().low_confidence ? " low confidence" : "")
                  << (rows.front().degenerate ? " degenerate ring" : "") << "), bound not trusted\n";
      }
    } else if (*sweep) {
      const auto spec = resolve_scenario(sw);
      std::vector<double> theta1s;
      for (const auto& t : sw_theta1s) theta1s.push_back(pkr::parse_angle(t));
      if (theta1s.empty()) theta1s = pkr::default_theta1_list();
      if (sw_points.empty()) sw_points = pkr::default_points_list();
      pkr::SweepOptions opt;
      opt.record_timing = !sw_omit_timing;
      const auto rows = pkr::run_sweep(spec, theta1s, sw_points, opt);
      std::string format = sw_format;
      if (format.empty()) {
        format = sw_out.size() > 5 && sw_out.substr(sw_out.size() - 5) == ".json" ? "json" : "csv";
      }
      write_rows(rows, format, sw_out);
      std::size_t failed = 0, flagged = 0, exceeded = 0;
      for (const auto& r : rows) {
        if (!r.error.empty()) ++failed;
        if (!r.trusted()) ++flagged;
        if (r.actual_error > r.bound) ++exceeded;
      }
      std::cout << spec.name << ": " << rows.size() << " rows, " << exceeded
                << " with error above bound, " << flagged << " flagged, " << failed << " failed -> "
                << sw_out << '\n';
      if (failed == rows.size() && !rows.empty()) return 2;
    } else if (*scenarios) {
      for (const auto& s : pkr::builtin_scenarios()) {
        std::cout << s.name << "  state=" << s.base.to_string() << " channel=" << s.channel.to_string()
                  << " rotate=(" << pkr::format_angle(s.rotation.theta) << ", "
                  << pkr::format_angle(s.rotation.phi) << ")  " << s.description << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "pkr: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
