#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tpot/demo.hpp"
#include "tpot/matching.hpp"
#include "tpot/msssim.hpp"
#include "tpot/objective.hpp"
#include "tpot/oracles.hpp"
#include "tpot/persistence.hpp"
#include "tpot/raster.hpp"
#include "tpot/serialize.hpp"
#include "tpot/topo_loss.hpp"

namespace fs = std::filesystem;
using tpot::Json;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const Json& j, const std::string& out) {
  const std::string text = j.dump() + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw tpot::IoError("cannot open " + out + " for writing");
  f << text;
}

void write_text(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw tpot::IoError("cannot open " + out + " for writing");
  f << text;
}

std::optional<std::string> maybe(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

bool is_json_path(const std::string& path) { return fs::path(path).extension() == ".json"; }

tpot::PersistenceDiagram load_diagram(const std::string& path, tpot::Dims dims) {
  if (!is_json_path(path)) return tpot::compute_diagram(tpot::read_field(path), dims);
  std::ifstream f(path, std::ios::binary);
  if (!f) throw tpot::IoError("cannot open " + path);
  Json j;
  try {
    j = Json::parse(f);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return tpot::diagram_from_json(j, dims);
}

std::vector<double> parse_thresholds(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw UsageError("bad threshold '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty threshold list");
  return out;
}

std::vector<double> unique_descending(const tpot::ScalarField& field) {
  std::vector<double> v(field.values().begin(), field.values().end());
  std::sort(v.begin(), v.end(), std::greater<>());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

struct ObjectiveFlags {
  tpot::ObjectiveConfig cfg;
  std::string dims = "0,1";
  std::size_t scales = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda-ssim", cfg.lambda_ssim, "weight of the transport cost")->capture_default_str();
    cmd->add_option("--lambda-idt", cfg.lambda_idt, "weight of the identity cost")->capture_default_str();
    cmd->add_option("--lambda-topo", cfg.lambda_topo, "weight of the topology cost")->capture_default_str();
    cmd->add_option("--ti", cfg.gate_step, "step at which the topology term switches on")
        ->capture_default_str();
    cmd->add_option("--patch-size", cfg.patch_size)->capture_default_str();
    cmd->add_option("--dims", dims)->capture_default_str();
    cmd->add_option("--eps-min", cfg.eps_min)->capture_default_str();
    cmd->add_option("--scales", scales, "cap on MS-SSIM scales (0 = all that fit)")->capture_default_str();
  }

  tpot::ObjectiveConfig resolve(unsigned threads) const {
    auto out = cfg;
    out.dims = tpot::parse_dims(dims);
    out.threads = threads;
    out.msssim.max_scales = scales;
    out.validate();
    return out;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Topology-preserving transport cost toolkit", "tpot"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads for per-patch work (0 = all cores)")
      ->envname("TPOT_THREADS");

  int exit_code = kOk;

  // diagram
  auto* diagram = app.add_subcommand("diagram", "persistence diagram of a field");
  std::string diagram_in, diagram_dims = "0,1", diagram_out;
  diagram->add_option("field", diagram_in)->required();
  diagram->add_option("--dims", diagram_dims)->capture_default_str();
  diagram->add_option("--out", diagram_out);
  diagram->callback([&] {
    const auto d = tpot::compute_diagram(tpot::read_field(diagram_in), tpot::parse_dims(diagram_dims));
    emit(tpot::diagram_to_json(d), diagram_out);
  });

  // betti
  auto* betti = app.add_subcommand("betti", "Betti numbers at thresholds");
  std::string betti_in, betti_dims = "0,1", betti_thresholds, betti_out;
  betti->add_option("field", betti_in)->required();
  betti->add_option("--dims", betti_dims)->capture_default_str();
  betti->add_option("--thresholds", betti_thresholds, "comma-separated; default is every unique field value");
  betti->add_option("--out", betti_out);
  betti->callback([&] {
    const auto field = tpot::read_field(betti_in);
    const auto dims = tpot::parse_dims(betti_dims);
    const auto alphas =
        betti_thresholds.empty() ? unique_descending(field) : parse_thresholds(betti_thresholds);
    const auto d = tpot::compute_diagram(field, dims);
    Json j;
    j["thresholds"] = alphas;
    if (dims.zero) j["beta0"] = tpot::betti_curve(d, 0, alphas);
    if (dims.one) j["beta1"] = tpot::betti_curve(d, 1, alphas);
    emit(j, betti_out);
  });

  // match
  auto* match = app.add_subcommand("match", "persistence-rank matching of two diagrams");
  std::string match_gen, match_ref, match_dims = "0,1", match_out;
  double match_eps = 0.0;
  match->add_option("gen", match_gen, "field or diagram .json")->required();
  match->add_option("ref", match_ref, "field or diagram .json")->required();
  match->add_option("--dims", match_dims)->capture_default_str();
  match->add_option("--eps-min", match_eps)->capture_default_str();
  match->add_option("--out", match_out);
  match->callback([&] {
    const auto dims = tpot::parse_dims(match_dims);
    const auto m = tpot::match(load_diagram(match_gen, dims), load_diagram(match_ref, dims), match_eps);
    emit(tpot::matching_to_json(m), match_out);
  });

  // loss
  auto* loss = app.add_subcommand("loss", "patch-wise topology loss");
  std::string loss_gen, loss_ref, loss_dims = "0,1", loss_grad, loss_out;
  tpot::TopoLossOptions loss_opts;
  loss->add_option("gen", loss_gen)->required();
  loss->add_option("ref", loss_ref)->required();
  loss->add_option("--patch-size", loss_opts.patch_size)->capture_default_str();
  loss->add_option("--dims", loss_dims)->capture_default_str();
  loss->add_option("--eps-min", loss_opts.eps_min)->capture_default_str();
  loss->add_option("--grad-out", loss_grad, "write the gradient as TPR1");
  loss->add_option("--out", loss_out);
  loss->callback([&] {
    auto opts = loss_opts;
    opts.dims = tpot::parse_dims(loss_dims);
    opts.threads = threads;
    const auto report = tpot::topo_loss_full(tpot::read_field(loss_gen), tpot::read_field(loss_ref), opts);
    if (!loss_grad.empty()) tpot::write_grid(report.gradient, loss_grad);
    emit(tpot::topo_report_to_json(report, maybe(loss_grad)), loss_out);
  });

  // msssim
  auto* ms = app.add_subcommand("msssim", "MS-SSIM, its cost and PSNR");
  std::string ms_a, ms_b, ms_out;
  std::size_t ms_scales = 0;
  ms->add_option("a", ms_a)->required();
  ms->add_option("b", ms_b)->required();
  ms->add_option("--scales", ms_scales, "cap on scales (0 = all that fit)")->capture_default_str();
  ms->add_option("--out", ms_out);
  ms->callback([&] {
    tpot::MsssimConfig cfg;
    cfg.max_scales = ms_scales;
    const auto a = tpot::read_field(ms_a);
    const auto b = tpot::read_field(ms_b);
    const auto detail = tpot::msssim_detail(a, b, cfg);
    Json j;
    j["msssim"] = detail.value;
    j["cost"] = 1.0 - detail.value;
    j["scales"] = detail.weights.size();
    j["psnr"] = tpot::number(tpot::psnr(a, b));
    emit(j, ms_out);
  });

  // objective
  auto* obj = app.add_subcommand("objective", "evaluate the composed objective");
  ObjectiveFlags obj_flags;
  std::string obj_gen, obj_input, obj_ident, obj_topo_ref, obj_grad, obj_out;
  std::int64_t obj_step = 0;
  double obj_w1 = 0.0;
  obj->add_option("--gen", obj_gen)->required();
  obj->add_option("--input", obj_input)->required();
  obj->add_option("--ident", obj_ident, "identity-pair field y");
  obj->add_option("--topo-ref", obj_topo_ref, "diagram source (default: --input)");
  obj->add_option("--step", obj_step)->required();
  obj->add_option("--w1", obj_w1, "externally supplied Wasserstein term")->capture_default_str();
  obj->add_option("--grad-out", obj_grad, "write the gradient as TPR1");
  obj->add_option("--out", obj_out);
  obj_flags.attach(obj);
  obj->callback([&] {
    const auto cfg = obj_flags.resolve(threads);
    const auto gen = tpot::read_field(obj_gen);
    const auto input = tpot::read_field(obj_input);
    std::optional<tpot::ScalarField> ident, topo_ref;
    if (!obj_ident.empty()) ident = tpot::read_field(obj_ident);
    if (!obj_topo_ref.empty()) topo_ref = tpot::read_field(obj_topo_ref);
    tpot::ObjectiveInputs in{gen,      input, ident ? &*ident : nullptr, topo_ref ? &*topo_ref : nullptr,
                             obj_step, obj_w1};
    const auto report = tpot::evaluate(in, cfg);
    if (!obj_grad.empty()) tpot::write_grid(report.gradient, obj_grad);
    emit(tpot::objective_report_to_json(report, maybe(obj_grad)), obj_out);
  });

  // demo
  auto* demo = app.add_subcommand("demo", "projected gradient descent on a synthetic scene");
  ObjectiveFlags demo_flags;
  std::string demo_scene = "broken-ring", demo_trace_out, demo_final_out, demo_dump_dir = ".";
  std::size_t demo_size = 64;
  std::uint64_t demo_seed = 7;
  tpot::DemoOptions demo_opts;
  demo->add_option("--scene", demo_scene)->capture_default_str();
  demo->add_option("--size", demo_size)->capture_default_str();
  demo->add_option("--seed", demo_seed)->capture_default_str();
  demo->add_option("--steps", demo_opts.steps)->capture_default_str();
  demo->add_option("--eta", demo_opts.eta)->capture_default_str();
  demo->add_option("--trace-out", demo_trace_out, "trace CSV path (default: stdout)");
  demo->add_option("--final-out", demo_final_out, "final field as TPR1");
  demo->add_option("--dump-every", demo_opts.dump_every, "dump the field every k steps (0 = off)")
      ->capture_default_str();
  demo->add_option("--dump-dir", demo_dump_dir)->capture_default_str();
  demo_flags.attach(demo);
  demo->callback([&] {
    const auto cfg = demo_flags.resolve(threads);
    const auto scene = tpot::generate_scene(tpot::parse_scene(demo_scene), demo_size, demo_seed);
    auto opts = demo_opts;
    if (opts.dump_every > 0) {
      fs::create_directories(demo_dump_dir);
      opts.on_dump = [&](std::int64_t step, const tpot::ScalarField& z) {
        char name[64];
        std::snprintf(name, sizeof(name), "step_%06lld.tpr1", static_cast<long long>(step));
        tpot::write_field(z, fs::path(demo_dump_dir) / name);
      };
    }
    const auto trace = tpot::run_demo(scene, cfg, opts);
    if (!demo_final_out.empty()) tpot::write_field(trace.final_field, demo_final_out);
    write_text(tpot::trace_csv(trace), demo_trace_out);
  });

  // verify
  auto* verify = app.add_subcommand("verify", "check a diagram against the flood-fill oracle");
  std::string verify_field, verify_out;
  verify->add_option("--field", verify_field)->required();
  verify->add_option("--out", verify_out);
  verify->callback([&] {
    const auto v = tpot::verify_diagram(tpot::read_field(verify_field));
    Json j;
    j["ok"] = v.ok();
    j["thresholds_checked"] = v.thresholds_checked;
    Json mism = Json::array();
    for (const auto& m : v.mismatches) {
      Json e;
      e["threshold"] = m.threshold;
      e["dim"] = m.dim;
      e["diagram"] = m.diagram;
      e["oracle"] = m.oracle;
      mism.push_back(e);
    }
    j["mismatches"] = mism;
    emit(j, verify_out);
    if (!v.ok()) exit_code = kVerifyFailed;
  });

  // verify-grad
  auto* vgrad = app.add_subcommand("verify-grad", "analytic gradient against finite differences");
  std::string vg_gen, vg_ref, vg_cost = "topo", vg_dims = "0,1", vg_out;
  tpot::TopoLossOptions vg_opts;
  double vg_h = 1e-4, vg_tol = 1e-3;
  vgrad->add_option("--gen", vg_gen)->required();
  vgrad->add_option("--ref", vg_ref)->required();
  vgrad->add_option("--cost", vg_cost)->check(CLI::IsMember({"topo", "ssim"}))->capture_default_str();
  vgrad->add_option("--patch-size", vg_opts.patch_size)->capture_default_str();
  vgrad->add_option("--dims", vg_dims)->capture_default_str();
  vgrad->add_option("--eps-min", vg_opts.eps_min)->capture_default_str();
  vgrad->add_option("--fd-step", vg_h)->capture_default_str();
  vgrad->add_option("--tol", vg_tol)->capture_default_str();
  vgrad->add_option("--out", vg_out);
  vgrad->callback([&] {
    const auto gen = tpot::read_field(vg_gen);
    const auto ref = tpot::read_field(vg_ref);
    tpot::GradientCheck check;
    if (vg_cost == "topo") {
      auto opts = vg_opts;
      opts.dims = tpot::parse_dims(vg_dims);
      opts.threads = threads;
      check = tpot::verify_topo_gradient(gen, ref, opts, vg_h, vg_tol);
    } else {
      check = tpot::verify_ssim_gradient(gen, ref, {}, vg_h, vg_tol);
    }
    Json j;
    j["ok"] = check.ok;
    j["cost"] = vg_cost;
    j["checked"] = check.checked;
    j["max_rel_error"] = check.max_rel_error;
    j["max_abs_unchecked"] = check.max_abs_unchecked;
    j["tol"] = vg_tol;
    emit(j, vg_out);
    if (!check.ok) exit_code = kVerifyFailed;
  });

  // convert
  auto* convert = app.add_subcommand("convert", "convert between PGM and TPR1 (by output extension)");
  std::string conv_in, conv_out;
  convert->add_option("in", conv_in)->required();
  convert->add_option("out", conv_out)->required();
  convert->callback([&] {
    const auto field = tpot::read_field(conv_in);
    if (fs::path(conv_out).extension() == ".pgm") {
      tpot::write_pgm(field, conv_out);
    } else {
      tpot::write_field(field, conv_out);
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  return exit_code;
}

void report_error(const std::string& kind, const std::string& message) {
  Json j;
  j["error"] = message;
  j["kind"] = kind;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    report_error("usage", e.what());
  } catch (const tpot::ParseError& e) {
    report_error("parse", e.what());
  } catch (const tpot::IoError& e) {
    report_error("io", e.what());
  } catch (const std::invalid_argument& e) {
    report_error("invalid_argument", e.what());
  } catch (const std::exception& e) {
    report_error("runtime", e.what());
  }
  return kError;
}
