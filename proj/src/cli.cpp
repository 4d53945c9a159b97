#include "dynid/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <CLI11.hpp>

#include "dynid/errors.hpp"
#include "dynid/estimation.hpp"
#include "dynid/metrics.hpp"
#include "dynid/model.hpp"
#include "dynid/signal.hpp"
#include "dynid/simulator.hpp"
#include "dynid/solver.hpp"
#include "dynid/trajectory.hpp"

namespace dynid::cli {

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw usage_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw usage_error("failed writing '" + path + "'");
}

struct Prepared {
  SampleSet samples;
  std::optional<Biquad> current_filter;  // set when v was filtered
};

/// Low-pass qd and optionally v (zero phase) and re-derive qdd from the
/// filtered qd.
Prepared preprocess(const SampleSet& raw, double cutoff_hz, bool filter_v) {
  check_uniform(raw.t);
  Prepared out{raw, std::nullopt};
  if (cutoff_hz <= 0.0) return out;
  const Biquad f = butterworth_lowpass(cutoff_hz, 1.0 / raw.period());
  SampleSet& s = out.samples;
  s.qd = filtfilt(f, raw.qd);
  if (filter_v) {
    s.v = filtfilt(f, raw.v);
    out.current_filter = f;
  }
  s.qdd = differentiate(s.qd, s.t);
  return out;
}

/// Kinematics-only copy of a model: what identification starts from.
RobotModel kinematic_shell(const RobotModel& model) {
  RobotModel out;
  out.name = model.name;
  out.chain = model.chain;
  out.limits = model.limits;
  out.linear_threshold = model.linear_threshold;
  return out;
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

std::string kv(const std::string& key, double value) { return key + "=" + format_double(value); }

MatrixXd predict_currents_for(const InverseDynamicsSolver& solver, const VectorXd& gains,
                              const SampleSet& s) {
  MatrixXd v(s.size(), s.dof());
  for (int k = 0; k < s.size(); ++k) {
    v.row(k) = solver.torque(s.state(k)).cwiseQuotient(gains).transpose();
  }
  return v;
}

VectorXd solver_gains(const RobotModel& model) {
  if (model.stage() == Stage::kGains) return *model.gains_estimated;
  return model.gains;
}

struct Options {
  // shared
  std::string robot, model, samples, out, payload, traj, report;
  std::uint64_t seed = 0;
  double cutoff_hz = 10.0;
  std::string filter_channels = "qd,v";
  double threshold = kDefaultLinearThreshold;
  bool no_robust = false;
  // robot / payload presets
  std::string preset;
  // traj gen
  int harmonics = 5;
  double duration = 20.0, period = 20.0, rate_hz = 125.0, limit_fraction = 0.6, position_span = 2.5;
  // simulate
  double noise_v = 0.0, noise_qd = 0.0;
  std::string friction_law = "sigmoid";
  // identify linear
  int n_probe = 200;
  std::uint64_t probe_seed = 1;
  // identify gains
  std::string samples_a, samples_b;
  double lower_bound = 10.0;
  // validate
  std::string predictions, baseline, emit_predictions;
};

void cmd_robot(const Options& o, std::ostream& out) {
  if (o.preset != "ur10") throw usage_error("unknown robot preset '" + o.preset + "'");
  write_model(o.out, ur10_reference_model());
  out << "wrote=" << o.out << '\n';
}

void cmd_payload(const Options& o, std::ostream& out) {
  if (o.preset == "franka") {
    write_payload(o.out, franka_hand_payload());
  } else if (o.preset == "eccentric") {
    write_payload(o.out, eccentric_payload());
  } else {
    throw usage_error("unknown payload preset '" + o.preset + "' (expected franka or eccentric)");
  }
  out << "wrote=" << o.out << '\n';
}

void cmd_traj_gen(const Options& o, std::ostream& out) {
  const RobotModel model = read_model(o.robot);
  TrajectoryOptions topt;
  topt.harmonics = o.harmonics;
  topt.duration = o.duration;
  topt.period = o.period;
  topt.rate_hz = o.rate_hz;
  topt.limit_fraction = o.limit_fraction;
  topt.position_span = o.position_span;
  const FourierTrajectory traj = random_trajectory(model.limits, o.seed, topt);
  const TrajectorySampling sampled = sample(traj);
  write_samples(o.out, sampled.samples);
  out << "samples=" << sampled.samples.size() << '\n';
  if (sampled.truncated) out << "warning=duration is not a multiple of the sample period\n";
}

void cmd_simulate(const Options& o, std::ostream& out) {
  const RobotModel model = read_model(o.robot);
  SampleSet kin = read_samples(o.traj);
  SimulationOptions sopt;
  if (o.friction_law == "sigmoid") {
    sopt.friction = FrictionLaw::kSigmoid;
  } else if (o.friction_law == "linear") {
    sopt.friction = FrictionLaw::kLinear;
  } else {
    throw usage_error("unknown friction law '" + o.friction_law + "'");
  }
  if (!o.payload.empty()) sopt.payload = read_payload(o.payload).spec;
  sopt.noise_v = o.noise_v;
  sopt.noise_qd = o.noise_qd;
  sopt.seed = o.seed;
  const SampleSet s = simulate(model, kin, sopt);
  write_samples(o.out, s);
  out << "samples=" << s.size() << " scenario=" << scenario_tag(s.scenario) << '\n';
}

void cmd_identify_linear(const Options& o, std::ostream& out) {
  const RobotModel robot = read_model(o.robot);
  const Prepared prep = preprocess(read_samples(o.samples), o.cutoff_hz, o.filter_channels == "qd,v");
  const SampleSet& s = prep.samples;
  if (s.scenario != Scenario::kNoPayload) {
    throw usage_error("coefficient identification needs scenario-a samples (no payload)");
  }
  BaseMapOptions bopt;
  bopt.n_probe = o.n_probe;
  bopt.seed = o.probe_seed;
  const BaseParameterMap map = compute_base_map(robot.chain, bopt);
  IdentifyOptions iopt;
  iopt.threshold = o.threshold;
  iopt.robust = !o.no_robust;
  iopt.current_filter = prep.current_filter;
  const CurrentCoefficients cc = identify_coefficients(map, robot.chain, s, iopt);

  RobotModel result = kinematic_shell(robot);
  result.linear_threshold = o.threshold;
  result.base_map = map;
  result.chi = cc.chi;
  write_model(o.out, result);
  for (const auto& w : map.warnings) out << "warning=" << w << '\n';
  out << "coefficients=" << map.n_coeff() << " layout=" << map.joint_layout_size() << '\n';
}

void cmd_identify_friction(const Options& o, std::ostream& out) {
  RobotModel model = read_model(o.model);
  model.require_stage(Stage::kLinear);
  const Prepared prep = preprocess(read_samples(o.samples), o.cutoff_hz, o.filter_channels == "qd,v");
  const SampleSet& s = prep.samples;
  const MatrixXd residual =
      friction_residual_currents(*model.base_map, model.chain, *model.chi, s, prep.current_filter);
  FrictionFitOptions fopt;
  fopt.threshold = model.linear_threshold;
  fopt.current_filter = prep.current_filter;
  const FrictionFit fit = fit_friction(s.qd, residual, fopt);
  model.friction_current = fit.psi;
  model.gains_estimated.reset();
  write_model(o.out, model);
  for (std::size_t j = 0; j < fit.joints.size(); ++j) {
    out << "joint=" << j + 1 << ' ' << kv("objective", fit.joints[j].objective)
        << " samples=" << fit.joints[j].samples << '\n';
  }
}

void cmd_identify_gains(const Options& o, std::ostream& out) {
  RobotModel model = read_model(o.model);
  model.require_stage(Stage::kFriction);
  const bool filter_v = o.filter_channels == "qd,v";
  const Prepared pa = preprocess(read_samples(o.samples_a), o.cutoff_hz, filter_v);
  const Prepared pb = preprocess(read_samples(o.samples_b), o.cutoff_hz, filter_v);
  const SampleSet& a = pa.samples;
  const SampleSet& b = pb.samples;
  const PayloadFile payload = read_payload(o.payload);
  GainOptions gopt;
  gopt.threshold = model.linear_threshold;
  gopt.lower_bound = o.lower_bound;
  gopt.robust = !o.no_robust;
  if (filter_v && o.cutoff_hz > 0.0 && std::fabs(a.period() - b.period()) > 1e-12) {
    throw usage_error("scenario a and b are sampled at different rates; the shared current filter needs one rate");
  }
  gopt.current_filter = pa.current_filter;
  const GainEstimate est = estimate_gains(*model.base_map, model.chain, a, b,
                                          make_knowledge(payload.spec, payload.known),
                                          *model.friction_current, gopt);
  model.gains_estimated = est.K;
  write_model(o.out, model);
  for (std::size_t j = 0; j < est.joints.size(); ++j) {
    const JointGain& g = est.joints[j];
    out << "joint=" << j + 1 << ' ' << kv("K", g.K) << " rank=" << g.rank << '/' << g.columns
        << " regrouped=" << g.regrouped << " identifiable=" << g.gain_identifiable
        << " clamped=" << g.clamped << '\n';
  }
}

void cmd_solve(const Options& o, std::ostream& out) {
  const RobotModel model = read_model(o.model);
  std::unique_ptr<InverseDynamicsSolver> solver = make_solver(model);
  if (!o.payload.empty()) solver = solver->configure_payload(read_payload(o.payload).spec);
  const SampleSet s = read_samples(o.traj);
  if (s.dof() != solver->dof()) throw schema_error("trajectory does not match the model's joints");
  const int n = s.dof();

  std::string text = "t";
  for (const char* prefix : {"tau", "mqdd", "cqd", "f", "g"}) {
    for (int j = 1; j <= n; ++j) text += std::string(",") + prefix + std::to_string(j);
  }
  text += '\n';
  for (int k = 0; k < s.size(); ++k) {
    const JointState st = s.state(k);
    const VectorXd terms[] = {solver->torque(st), solver->inertia(st.q) * st.qdd,
                              solver->coriolis_times_qd(st.q, st.qd), solver->friction(st.qd),
                              solver->gravity(st.q)};
    text += format_double(s.t[k]);
    for (const VectorXd& v : terms) {
      for (int j = 0; j < n; ++j) text += ',' + format_double(v[j]);
    }
    text += '\n';
  }
  write_text(o.out, text);
  out << "samples=" << s.size() << '\n';
}

void cmd_validate(const Options& o, std::ostream& out) {
  const SampleSet measured = read_samples(o.samples);
  MatrixXd predicted;
  if (!o.predictions.empty()) {
    const SampleSet p = read_samples(o.predictions);
    if (p.size() != measured.size() || p.dof() != measured.dof()) {
      throw schema_error("predictions and samples differ in shape");
    }
    predicted = p.v;
  } else {
    const RobotModel model = read_model(o.model);
    std::unique_ptr<InverseDynamicsSolver> solver = make_solver(model);
    if (!o.payload.empty()) solver = solver->configure_payload(read_payload(o.payload).spec);
    if (solver->dof() != measured.dof()) throw schema_error("samples do not match the model's joints");
    const SampleSet states = preprocess(measured, o.cutoff_hz, false).samples;
    predicted = predict_currents_for(*solver, solver_gains(model), states);
  }
  if (!o.emit_predictions.empty()) {
    SampleSet p = measured;
    p.v = predicted;
    write_samples(o.emit_predictions, p);
  }
  MatrixXd baseline;
  if (!o.baseline.empty()) {
    const SampleSet b = read_samples(o.baseline);
    if (b.size() != measured.size() || b.dof() != measured.dof()) {
      throw schema_error("baseline and samples differ in shape");
    }
    baseline = b.v;
  }
  const ValidationReport report = validation_report(measured.v, predicted, measured.qd, o.threshold,
                                                    o.baseline.empty() ? nullptr : &baseline);
  write_text(o.report, format_report(report));
  out << kv("avg_mnae", report.average.mnae) << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic identification of serial manipulators", "dynid"};
  app.require_subcommand(1);
  Options o;
  std::function<void()> action;
  const CLI::Validator channels(
      [](std::string& v) { return v == "qd,v" || v == "qd" ? std::string() : "expected qd,v or qd, got " + v; },
      "CHANNELS");

  auto* robot = app.add_subcommand("robot", "write a built-in robot model");
  robot->add_option("--preset", o.preset, "preset name (ur10)")->required();
  robot->add_option("--out", o.out)->required();
  robot->callback([&] { action = [&] { cmd_robot(o, out); }; });

  auto* payload = app.add_subcommand("payload", "write a built-in payload file");
  payload->add_option("--preset", o.preset, "franka or eccentric")->required();
  payload->add_option("--out", o.out)->required();
  payload->callback([&] { action = [&] { cmd_payload(o, out); }; });

  auto* traj = app.add_subcommand("traj", "excitation trajectories");
  traj->require_subcommand(1);
  auto* gen = traj->add_subcommand("gen", "sample a random Fourier trajectory");
  gen->add_option("--robot", o.robot)->required();
  gen->add_option("--seed", o.seed)->required();
  gen->add_option("--out", o.out)->required();
  gen->add_option("--harmonics", o.harmonics)->capture_default_str();
  gen->add_option("--duration", o.duration, "seconds")->capture_default_str();
  gen->add_option("--period", o.period, "fundamental period, seconds")->capture_default_str();
  gen->add_option("--rate-hz", o.rate_hz)->capture_default_str();
  gen->add_option("--limit-fraction", o.limit_fraction)->capture_default_str();
  gen->add_option("--position-span", o.position_span, "half-width of each joint's swing, rad")->capture_default_str();
  gen->callback([&] { action = [&] { cmd_traj_gen(o, out); }; });

  auto* sim = app.add_subcommand("simulate", "synthesize currents for a trajectory");
  sim->add_option("--robot", o.robot)->required();
  sim->add_option("--traj", o.traj)->required();
  sim->add_option("--payload", o.payload);
  sim->add_option("--noise-v", o.noise_v, "current noise std, A")->capture_default_str();
  sim->add_option("--noise-qd", o.noise_qd, "velocity noise std, rad/s")->capture_default_str();
  sim->add_option("--seed", o.seed)->required();
  sim->add_option("--friction-law", o.friction_law, "sigmoid or linear")->capture_default_str();
  sim->add_option("--out", o.out)->required();
  sim->callback([&] { action = [&] { cmd_simulate(o, out); }; });

  auto* identify = app.add_subcommand("identify", "run one identification stage");
  identify->require_subcommand(1);
  auto* lin = identify->add_subcommand("linear", "current-level dynamic coefficients");
  lin->add_option("--robot", o.robot)->required();
  lin->add_option("--samples", o.samples)->required();
  lin->add_option("--out", o.out)->required();
  lin->add_option("--seed", o.probe_seed, "probe seed of the base-parameter analysis")->capture_default_str();
  lin->add_option("--n-probe", o.n_probe)->capture_default_str();
  lin->add_option("--threshold", o.threshold, "linearity threshold, rad/s")->capture_default_str();
  lin->add_option("--cutoff-hz", o.cutoff_hz, "low-pass cutoff, 0 disables")->capture_default_str();
  lin->add_option("--filter-channels", o.filter_channels, "qd,v or qd")
      ->check(channels)
      ->capture_default_str();
  lin->add_flag("--no-robust", o.no_robust, "plain least squares instead of bisquare weights");
  lin->callback([&] { action = [&] { cmd_identify_linear(o, out); }; });

  auto* fr = identify->add_subcommand("friction", "sigmoidal friction per joint");
  fr->add_option("--model", o.model)->required();
  fr->add_option("--samples", o.samples)->required();
  fr->add_option("--out", o.out)->required();
  fr->add_option("--cutoff-hz", o.cutoff_hz)->capture_default_str();
  fr->add_option("--filter-channels", o.filter_channels, "qd,v or qd")
      ->check(channels)
      ->capture_default_str();
  fr->callback([&] { action = [&] { cmd_identify_friction(o, out); }; });

  auto* gains = identify->add_subcommand("gains", "motor drive gains");
  gains->add_option("--model", o.model)->required();
  gains->add_option("--samples-a", o.samples_a, "samples without payload")->required();
  gains->add_option("--samples-b", o.samples_b, "samples with payload")->required();
  gains->add_option("--payload", o.payload)->required();
  gains->add_option("--out", o.out)->required();
  gains->add_option("--lower-bound", o.lower_bound, "N m / A")->capture_default_str();
  gains->add_option("--cutoff-hz", o.cutoff_hz)->capture_default_str();
  gains->add_option("--filter-channels", o.filter_channels, "qd,v or qd")
      ->check(channels)
      ->capture_default_str();
  gains->add_flag("--no-robust", o.no_robust);
  gains->callback([&] { action = [&] { cmd_identify_gains(o, out); }; });

  auto* solve = app.add_subcommand("solve", "torque and its terms along a trajectory");
  solve->add_option("--model", o.model)->required();
  solve->add_option("--payload", o.payload);
  solve->add_option("--traj", o.traj)->required();
  solve->add_option("--out", o.out)->required();
  solve->callback([&] { action = [&] { cmd_solve(o, out); }; });

  auto* validate = app.add_subcommand("validate", "prediction error report");
  auto* src_model = validate->add_option("--model", o.model);
  auto* src_pred = validate->add_option("--predictions", o.predictions, "CSV whose v columns are predictions");
  src_model->excludes(src_pred);
  validate->add_option("--samples", o.samples)->required();
  validate->add_option("--payload", o.payload)->excludes(src_pred);
  validate->add_option("--baseline", o.baseline, "CSV of baseline predictions");
  validate->add_option("--emit-predictions", o.emit_predictions);
  validate->add_option("--threshold", o.threshold)->capture_default_str();
  validate->add_option("--cutoff-hz", o.cutoff_hz, "filter applied to the states fed to the model")
      ->capture_default_str();
  validate->add_option("--report", o.report)->required();
  validate->callback([&] {
    if (o.model.empty() && o.predictions.empty()) {
      throw CLI::ValidationError("validate", "one of --model or --predictions is required");
    }
    action = [&] { cmd_validate(o, out); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error=1 msg=" << one_line(e.what()) << '\n';
    return 1;
  }

  try {
    action();
  } catch (const Error& e) {
    err << "error=" << e.exit_code() << " msg=" << one_line(e.what()) << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error=3 msg=" << one_line(e.what()) << '\n';
    return 3;
  }
  return 0;
}

}  // namespace dynid::cli
