#include "handoff/cli.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "CLI11.hpp"
#include "handoff/examples.hpp"

namespace handoff {
namespace {

const char* kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::labeled_mdp: return "mdp";
    case ModelKind::cognitive: return "cognitive";
    case ModelKind::automaton: return "automaton";
    case ModelKind::bundle: return "bundle";
  }
  return "?";
}

int report(std::ostream& out, const std::string& path, const char* kind,
           const std::vector<Violation>& violations) {
  if (violations.empty()) {
    out << path << ": ok (" << kind << ")\n";
    return 0;
  }
  for (const Violation& v : violations) out << path << ": " << v.where << ": " << v.message << "\n";
  return 1;
}

std::vector<Violation> validate_inputs(const InputModels& in) {
  std::vector<Violation> all;
  auto merge = [&all](const char* tag, std::vector<Violation> vs) {
    for (Violation& v : vs) {
      v.where = std::string(tag) + "." + v.where;
      all.push_back(std::move(v));
    }
  };
  merge("ma", validate_mdp(in.ma));
  merge("mh", validate_mdp(in.mh));
  merge("att", validate_cognitive(in.att));
  merge("dra", validate_automaton(in.dra));
  return all;
}

int cmd_validate(const std::vector<std::string>& paths, std::ostream& out, std::ostream& err) {
  int code = 0;
  for (const std::string& path : paths) {
    try {
      std::string text = read_file(path);
      ModelKind kind = sniff_kind(text, path);
      switch (kind) {
        case ModelKind::labeled_mdp:
          code = std::max(code, report(out, path, "mdp", validate_mdp(parse_labeled_mdp(text, path))));
          break;
        case ModelKind::cognitive:
          code = std::max(code,
                          report(out, path, "cognitive", validate_cognitive(parse_cognitive(text, path))));
          break;
        case ModelKind::automaton:
          code = std::max(code,
                          report(out, path, "automaton", validate_automaton(parse_automaton(text, path))));
          break;
        case ModelKind::bundle: {
          Bundle b = parse_bundle(text, path);
          std::vector<Violation> vs = validate_inputs(b.models);
          if (vs.empty()) instantiate(b);  // resolves every policy reference
          code = std::max(code, report(out, path, "bundle", vs));
          break;
        }
      }
    } catch (const io_error& e) {
      err << "error: " << e.what() << "\n";
      code = 2;
    } catch (const std::runtime_error& e) {
      // Structural failure on a parseable file (e.g. composition mismatch
      // inside a bundle) counts as a validation failure, not a schema one.
      err << "error: " << path << ": " << e.what() << "\n";
      code = std::max(code, 1);
    }
  }
  return code;
}

InputModels load_inputs(const std::string& ma, const std::string& mh, const std::string& att,
                        const std::string& dra) {
  InputModels in;
  in.ma = parse_labeled_mdp(read_file(ma), ma);
  in.mh = parse_labeled_mdp(read_file(mh), mh);
  in.att = parse_cognitive(read_file(att), att);
  in.dra = parse_automaton(read_file(dra), dra);
  return in;
}

std::array<double, 2> parse_weight_pair(const std::string& text) {
  std::string s = text;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream row(s);
  double w1, w2;
  std::string rest;
  if (!(row >> w1 >> w2) || (row >> rest))
    throw schema_error("--weights", "expected two comma-separated numbers");
  return {w1, w2};
}

void check_weight_sum(const std::array<double, 2>& w) {
  if (w[0] < 0.0 || w[1] < 0.0 || std::fabs(w[0] + w[1] - 1.0) > 1e-9)
    throw schema_error("--weights", "weights must be nonnegative and sum to 1");
}

void print_point(std::ostream& out, const SweepPoint& pt) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "w = (%.12g, %.12g)\nlambda = (%.12g, %.12g)\nu1 = %.12g\nu2 = %.12g\n",
                pt.weights[0], pt.weights[1], pt.lambda[0], pt.lambda[1], pt.profile.u1,
                pt.profile.u2);
  out << buf;
}

int cmd_synthesize(const InputModels& in, std::array<double, 2> weights, double eps_aug,
                   double eps_visit, const std::string& out_path, std::ostream& out,
                   std::ostream& err) {
  std::vector<Violation> vs = validate_inputs(in);
  if (!vs.empty()) return report(out, "inputs", "inputs", vs);
  SharedAutonomyMdp sa = compose_shared_autonomy(in.ma, in.mh, in.att);
  TwoStage ts = prepare_two_stage(sa, in.dra, eps_visit);
  if (ts.accepting_empty())
    err << "warning: no accepting end component; the objective is unsatisfiable from every "
           "reachable state and the policy only minimizes attention cost\n";
  SweepPoint pt = solve_point(ts, weights, eps_aug);
  if (!pt.solved) {
    err << "error: " << pt.message << "\n";
    return 1;
  }
  Bundle b = make_bundle(in, ts, pt, eps_visit);
  write_file(out_path, serialize(b));
  print_point(out, pt);
  out << "bundle written to " << out_path << "\n";
  return 0;
}

int cmd_sweep(const InputModels& in, const std::vector<std::array<double, 2>>& weights,
              double eps_aug, double eps_visit, const std::string& csv_path,
              const std::string& svg_path, std::ostream& out, std::ostream& err) {
  std::vector<Violation> vs = validate_inputs(in);
  if (!vs.empty()) return report(out, "inputs", "inputs", vs);
  SharedAutonomyMdp sa = compose_shared_autonomy(in.ma, in.mh, in.att);
  TwoStage ts = prepare_two_stage(sa, in.dra, eps_visit);
  if (ts.accepting_empty())
    err << "warning: no accepting end component; every profile has u1 = 0\n";
  std::vector<SweepPoint> points = solve_sweep(ts, weights, eps_aug);
  std::string csv = sweep_csv(points);
  if (csv_path.empty())
    out << csv;
  else {
    write_file(csv_path, csv);
    out << "sweep written to " << csv_path << "\n";
  }
  if (!svg_path.empty()) {
    write_file(svg_path, sweep_svg(points));
    out << "scatter written to " << svg_path << "\n";
  }
  for (const SweepPoint& pt : points)
    if (!pt.solved)
      err << "warning: unsolved at w1=" << pt.weights[0] << ": " << pt.message << "\n";
  return 0;
}

int cmd_example(const std::string& name, const std::string& dir, bool liveness, double gamma,
                std::ostream& out) {
  InputModels in;
  if (name == "arm") {
    ArmParams params;
    if (gamma > 0.0) params.gamma = gamma;
    in = build_arm(params);
  } else if (name == "gridworld") {
    GridParams params;
    if (gamma > 0.0) params.gamma = gamma;
    params.liveness_obstacles = liveness;
    in = build_gridworld(params);
  } else {
    throw schema_error("example", "unknown example \"" + name + "\" (arm, gridworld)");
  }
  std::filesystem::create_directories(dir);
  auto path = [&](const char* base) { return dir + "/" + name + "_" + base + ".json"; };
  write_file(path("ma"), serialize(in.ma));
  write_file(path("mh"), serialize(in.mh));
  write_file(path("att"), serialize(in.att));
  write_file(path("dra"), serialize(in.dra));
  out << path("ma") << "\n" << path("mh") << "\n" << path("att") << "\n" << path("dra") << "\n";
  return 0;
}

int cmd_simulate(const std::string& bundle_path, int traces, std::uint64_t seed, int horizon,
                 const std::string& out_path, const std::string& trace_path, std::ostream& out) {
  Bundle b = parse_bundle(read_file(bundle_path), bundle_path);
  RunnableBundle rb = instantiate(b);
  SimOptions opt;
  opt.seed = seed;
  opt.horizon = horizon;
  Estimate est = estimate(rb.product, rb.rewards, rb.policy, traces, opt);
  std::string doc = estimates_json(rb.product, est, opt);
  if (out_path.empty())
    out << doc;
  else {
    write_file(out_path, doc);
    out << "estimates written to " << out_path << "\n";
  }
  if (!trace_path.empty()) {
    Trace tr = simulate(rb.product, rb.rewards, rb.policy, opt);
    write_file(trace_path, trace_lines(rb.product, tr));
    out << "trace written to " << trace_path << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"two-stage policy synthesis for shared-autonomy systems"};
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "parse and validate model files");
  std::vector<std::string> validate_paths;
  validate->add_option("files", validate_paths, "model, automaton or bundle files")->required();

  std::string ma_path, mh_path, att_path, dra_path;
  auto add_model_options = [&](CLI::App* cmd) {
    cmd->add_option("--ma", ma_path, "autonomous-control model file")->required();
    cmd->add_option("--mh", mh_path, "human-control model file")->required();
    cmd->add_option("--att", att_path, "attention (cognitive) model file")->required();
    cmd->add_option("--dra", dra_path, "objective automaton file")->required();
  };

  auto* synthesize = app.add_subcommand("synthesize", "solve one weighted objective");
  add_model_options(synthesize);
  std::string weights_text = "0.5,0.5";
  double eps_aug = kDefaultAugmentation, eps_visit = kDefaultVisitFloor;
  std::string bundle_out = "bundle.json";
  synthesize->add_option("--weights", weights_text, "objective weights w1,w2 (sum 1)");
  synthesize->add_option("--eps-aug", eps_aug, "augmentation coefficient");
  synthesize->add_option("--eps-visit", eps_visit, "per-state visitation floor");
  synthesize->add_option("--out", bundle_out, "output bundle path");

  auto* sweep = app.add_subcommand("sweep", "solve a weight grid and export the profiles");
  add_model_options(sweep);
  int grid = 0;
  std::string weights_file, csv_path, svg_path;
  sweep->add_option("--grid", grid, "k interior grid weights i/(k+1), i=1..k");
  sweep->add_option("--weights-file", weights_file, "explicit weight list, one pair per line");
  sweep->add_option("--eps-aug", eps_aug, "augmentation coefficient");
  sweep->add_option("--eps-visit", eps_visit, "per-state visitation floor");
  sweep->add_option("--csv", csv_path, "CSV output path (default: stdout)");
  sweep->add_option("--svg", svg_path, "scatter plot output path");

  auto* example = app.add_subcommand("example", "write a built-in example's input files");
  std::string example_name, example_dir = ".";
  bool liveness = false;
  double example_gamma = 0.0;
  example->add_option("name", example_name, "arm or gridworld")->required();
  example->add_option("--out-dir", example_dir, "output directory");
  example->add_flag("--liveness", liveness,
                    "gridworld only: recurrence reading of the obstacle clause");
  example->add_option("--gamma", example_gamma, "override the discount factor");

  auto* simulate_cmd = app.add_subcommand("simulate", "run Monte-Carlo traces of a bundle");
  std::string bundle_path, estimates_out, trace_out;
  int traces = 1000, horizon = 2000;
  std::uint64_t seed = 1;
  simulate_cmd->add_option("--bundle", bundle_path, "policy bundle file")->required();
  simulate_cmd->add_option("--traces", traces, "number of traces");
  simulate_cmd->add_option("--seed", seed, "master seed");
  simulate_cmd->add_option("--horizon", horizon, "steps per trace");
  simulate_cmd->add_option("--out", estimates_out, "estimates output path (default: stdout)");
  simulate_cmd->add_option("--trace-out", trace_out, "also export the first trace");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(validate_paths, out, err);
    if (synthesize->parsed()) {
      std::array<double, 2> w = parse_weight_pair(weights_text);
      check_weight_sum(w);
      return cmd_synthesize(load_inputs(ma_path, mh_path, att_path, dra_path), w, eps_aug,
                            eps_visit, bundle_out, out, err);
    }
    if (sweep->parsed()) {
      if ((grid > 0) == !weights_file.empty())
        throw schema_error("sweep", "pass exactly one of --grid or --weights-file");
      std::vector<std::array<double, 2>> ws;
      if (grid > 0) {
        for (int i = 1; i <= grid; ++i) {
          double b = static_cast<double>(i) / (grid + 1);
          ws.push_back({b, 1.0 - b});
        }
      } else {
        ws = parse_weights_lines(read_file(weights_file), weights_file);
        if (ws.empty()) throw schema_error(weights_file, "no weight pairs found");
        for (const auto& w : ws) check_weight_sum(w);
      }
      return cmd_sweep(load_inputs(ma_path, mh_path, att_path, dra_path), ws, eps_aug, eps_visit,
                       csv_path, svg_path, out, err);
    }
    if (example->parsed()) return cmd_example(example_name, example_dir, liveness, example_gamma, out);
    if (simulate_cmd->parsed())
      return cmd_simulate(bundle_path, traces, seed, horizon, estimates_out, trace_out, out);
  } catch (const io_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;  // unreachable with require_subcommand(1)
}

}  // namespace handoff
