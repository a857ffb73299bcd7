// Copyright 2026 The swingup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver: catalog, calibrate, gen, train, eval, disentangle,
// swingup, embed, plus the swing and frames inspection commands.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swingup/analysis.hpp"
#include "swingup/control.hpp"
#include "swingup/core.hpp"
#include "swingup/dataset.hpp"
#include "swingup/error.hpp"
#include "swingup/models.hpp"
#include "swingup/pipeline.hpp"
#include "swingup/simdyn.hpp"
#include "swingup/tactsim.hpp"

namespace {

using namespace swingup;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitFormat = 4;
constexpr int kExitNumeric = 5;

constexpr const char* kExitCodeHelp =
    "Exit codes: 0 success, 2 bad arguments, 3 I/O failure, "
    "4 format/version mismatch, 5 numeric failure (divergence/integration).";

/// --config file plus repeated --set key=value; --set wins.
struct Settings {
  std::string config_path;
  std::vector<std::string> overrides;

  KeyValueConfig resolve(const KeyValueConfig& base = {}) const {
    KeyValueConfig c = base;
    if (!config_path.empty()) c.merge(KeyValueConfig::load(config_path));
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw InvalidArgument("--set expects key=value, got '" + kv + "'");
      }
      c.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return c;
  }
};

void add_settings(CLI::App* cmd, Settings& s) {
  cmd->add_option("--config", s.config_path, "key=value configuration file");
  cmd->add_option("--set", s.overrides, "override a configuration key (key=value), repeatable");
}

/// Writes to `path`, or stdout when the path is empty or "-".
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  fn(out);
  if (!out) throw IoError("write failed for " + path);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::logic_error&) {
      throw InvalidArgument("not a number list: '" + text + "'");
    }
  }
  if (out.empty()) throw InvalidArgument("empty number list");
  return out;
}

/// Simulator and tactile configuration recorded in a model sidecar, with
/// user overrides applied.
KeyValueConfig model_environment(const std::string& model_path, const Settings& s) {
  return s.resolve(KeyValueConfig::load(model_path + ".meta"));
}

std::vector<int> unseen_ids() { return unseen_object_ids(build_catalog().specs); }

std::vector<ObjectSpec> specs_for(const std::vector<int>& ids) {
  const auto all = build_catalog().specs;
  std::vector<ObjectSpec> out;
  for (int id : ids) out.push_back(all.at(static_cast<std::size_t>(id)));
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Tactile swing-up pipeline: simulate, learn a physical embedding, select grip control."};
  app.footer(kExitCodeHelp);
  app.require_subcommand(1);

  // catalog
  std::string catalog_out;
  auto* catalog = app.add_subcommand("catalog", "print the 33-object template table");
  catalog->add_option("--out", catalog_out, "CSV path (default stdout)");

  // calibrate
  Settings cal_settings;
  std::string cal_out;
  auto* calibrate = app.add_subcommand("calibrate", "calibrate the launch impulse, write the config");
  add_settings(calibrate, cal_settings);
  calibrate->add_option("--out", cal_out, "output config file")->required();

  // gen
  Settings gen_settings;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  int gen_workers = 1;
  auto* gen = app.add_subcommand("gen", "generate the 1650-episode dataset");
  add_settings(gen, gen_settings);
  gen->add_option("--seed", gen_seed, "global dataset seed")->required();
  gen->add_option("--out", gen_out, "dataset path (.swng)")->required();
  gen->add_option("--workers", gen_workers, "worker threads")->check(CLI::PositiveNumber);

  // train
  Settings train_settings;
  std::string train_variant, train_split = "seen", train_data, train_out, train_report;
  auto* trn = app.add_subcommand("train", "train one model variant");
  add_settings(trn, train_settings);
  trn->add_option("--variant", train_variant, "none|pp|tilting|shaking|combined")->required();
  trn->add_option("--split", train_split, "seen|unseen");
  trn->add_option("--data", train_data, "dataset path")->required();
  trn->add_option("--out", train_out, "checkpoint path (.sbnt)")->required();
  trn->add_option("--report", train_report, "per-object CSV path");
  bool train_quiet = false;
  trn->add_flag("--quiet", train_quiet, "no per-epoch progress on stderr");

  // eval
  std::string eval_model, eval_data, eval_split = "seen", eval_out;
  auto* evl = app.add_subcommand("eval", "evaluate a checkpoint and write a CSV row");
  evl->add_option("--model", eval_model, "checkpoint path")->required();
  evl->add_option("--data", eval_data, "dataset path")->required();
  evl->add_option("--split", eval_split, "seen|unseen");
  evl->add_option("--out", eval_out, "CSV path (default stdout)");
  bool eval_oracle = false;
  evl->add_flag("--oracle", eval_oracle, "also report the binned conditional-mean baseline");

  // disentangle
  Settings dis_settings;
  std::string dis_model, dis_data, dis_split = "unseen", dis_mode = "frozen", dis_out;
  auto* dis = app.add_subcommand("disentangle", "train the property probe and write its metrics");
  add_settings(dis, dis_settings);
  dis->add_option("--model", dis_model, "checkpoint path")->required();
  dis->add_option("--data", dis_data, "dataset path")->required();
  dis->add_option("--split", dis_split, "seen|unseen");
  dis->add_option("--mode", dis_mode, "frozen|end2end");
  dis->add_option("--out", dis_out, "CSV path (default stdout)");

  // swingup
  Settings sw_settings;
  std::string sw_model, sw_goals = "45,90,135,180", sw_out, sw_objects;
  int sw_trials = 5, sw_samples = kDefaultControlSamples;
  std::uint64_t sw_seed = 0;
  bool sw_oracle = false, sw_no_noise = false;
  auto* sw = app.add_subcommand("swingup", "closed-loop evaluation on the unseen objects");
  add_settings(sw, sw_settings);
  sw->add_option("--model", sw_model, "checkpoint path (omit with --oracle)");
  sw->add_option("--goals", sw_goals, "comma-separated goal angles in degrees");
  sw->add_option("--trials", sw_trials, "trials per goal")->check(CLI::PositiveNumber);
  sw->add_option("--samples", sw_samples, "control grid size")->check(CLI::Range(2, 100000));
  sw->add_option("--seed", sw_seed, "observation and launch-noise seed");
  sw->add_option("--objects", sw_objects, "comma-separated object ids (default: the unseen six)");
  sw->add_flag("--oracle", sw_oracle, "plan with the noise-free simulator instead of a model");
  sw->add_flag("--no-noise", sw_no_noise, "disable tactile and launch noise");
  sw->add_option("--out", sw_out, "CSV path (default stdout)");

  // embed
  std::string emb_model, emb_data, emb_out, emb_svg, emb_dist;
  auto* emb = app.add_subcommand("embed", "PCA projection and embedding/dynamics rank correlation");
  emb->add_option("--model", emb_model, "checkpoint path")->required();
  emb->add_option("--data", emb_data, "dataset path")->required();
  emb->add_option("--out", emb_out, "projection CSV path")->required();
  emb->add_option("--svg", emb_svg, "scatter plot path");
  emb->add_option("--distances", emb_dist, "pairwise distance CSV path");

  // swing (inspection)
  Settings swing_settings;
  int swing_object = 0;
  double swing_w = 0.5;
  std::string swing_out;
  auto* swing = app.add_subcommand("swing", "noise-free trajectory of one swing as CSV");
  add_settings(swing, swing_settings);
  swing->add_option("--object", swing_object, "object id")->required()->check(CLI::Range(0, 32));
  swing->add_option("--w", swing_w, "control parameter in [0,1]")->required();
  swing->add_option("--out", swing_out, "CSV path (default stdout)");

  // frames (inspection)
  Settings fr_settings;
  int fr_object = 0;
  std::uint64_t fr_seed = 0;
  std::string fr_out;
  auto* frames = app.add_subcommand("frames", "dump the tilt and shake marker fields of one object");
  add_settings(frames, fr_settings);
  frames->add_option("--object", fr_object, "object id")->required()->check(CLI::Range(0, 32));
  frames->add_option("--seed", fr_seed, "noise seed");
  frames->add_option("--out", fr_out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (catalog->parsed()) {
    const Catalog cat = build_catalog();
    KeyValueConfig fp;
    fp.set("catalog.rack_mass_g", cat.templ.rack_mass_g);
    fp.set("catalog.rack_offset_mm", cat.templ.rack_offset_mm);
    emit(catalog_out, [&](std::ostream& out) {
      out << "# fingerprint=" << fingerprint(fp) << '\n';
      write_catalog_csv(out, cat.specs);
    });
  } else if (calibrate->parsed()) {
    const KeyValueConfig c = cal_settings.resolve();
    SwingConfig sim = SwingConfig::from_config(c);
    sim.l_imp = calibrate_impulse(build_catalog().specs, sim);
    KeyValueConfig out = c;
    out.merge(sim.to_config());
    out.merge(TactileConfig::from_config(c).to_config());
    out.save(cal_out, "swing-up configuration");
    std::cout << "sim.l_imp=" << format_exact(sim.l_imp) << "  fingerprint=" << fingerprint(out) << '\n';
  } else if (gen->parsed()) {
    const KeyValueConfig c = gen_settings.resolve();
    SwingConfig sim = SwingConfig::from_config(c);
    if (!c.contains("sim.l_imp")) sim.l_imp = calibrate_impulse(build_catalog().specs, sim);
    const TactileConfig tact = TactileConfig::from_config(c);
    const Dataset data = generate_dataset(build_catalog().specs, sim, tact, gen_seed, gen_workers);
    save_dataset(gen_out, data);
    std::cout << "episodes=" << data.episodes.size() << "  fingerprint=" << fingerprint(data.provenance())
              << '\n';
  } else if (trn->parsed()) {
    const Variant variant = parse_variant(train_variant);
    const SplitMode mode = parse_split(train_split);
    TrainHyper hyper = TrainHyper::from_config(train_settings.resolve());
    if (!train_quiet) {
      hyper.on_epoch = [](int epoch, double loss, double test) {
        std::fprintf(stderr, "epoch %3d  train_loss %.6f  test_mae_deg %.3f\n", epoch, loss, test);
      };
    }
    const Dataset data = load_dataset(train_data);
    const SplitSpec split = make_split(data.catalog, mode);
    TrainResult r = train(data, split, variant, hyper);
    KeyValueConfig extra = data.provenance();
    extra.merge(hyper.to_config());
    extra.set("train.split", std::string(split_name(mode)));
    r.model.save(train_out, extra);
    const std::string fp = fingerprint(KeyValueConfig::load(train_out + ".meta"));
    write_train_report_csv(std::cout, {r.report}, fp);
    if (!train_report.empty()) {
      emit(train_report, [&](std::ostream& out) { write_per_object_csv(out, r.report, fp); });
    }
  } else if (evl->parsed()) {
    TrainedModel model = TrainedModel::load(eval_model);
    const Dataset data = load_dataset(eval_data);
    const SplitSpec split = make_split(data.catalog, parse_split(eval_split));
    TrainReport report = evaluate(model, data, split);
    KeyValueConfig fpc = model.metadata();
    fpc.merge(data.provenance());
    emit(eval_out, [&](std::ostream& out) {
      write_train_report_csv(out, {report}, fingerprint(fpc));
      if (eval_oracle) {
        out << "# conditional_mean_oracle_mae_deg=" << format_exact(binned_mean_oracle_mae(data, split))
            << '\n';
      }
    });
  } else if (dis->parsed()) {
    TrainedModel model = TrainedModel::load(dis_model);
    const Dataset data = load_dataset(dis_data);
    const SplitSpec split = make_split(data.catalog, parse_split(dis_split));
    const KeyValueConfig c = dis_settings.resolve();
    ProbeHyper hyper;
    hyper.lr = c.get_double("probe.lr", hyper.lr);
    if (c.contains("probe.epochs")) hyper.epochs = static_cast<int>(c.get_int("probe.epochs"));
    if (c.contains("probe.batch")) hyper.batch = static_cast<int>(c.get_int("probe.batch"));
    if (c.contains("probe.seed")) hyper.seed = static_cast<std::uint64_t>(c.get_int("probe.seed"));
    const ProbeMode mode = parse_probe_mode(dis_mode);
    const ProbeResult r = train_disentangle(model, data, split, mode, hyper);
    KeyValueConfig fpc = model.metadata();
    fpc.merge(c);
    fpc.set("probe.mode", std::string(probe_mode_name(mode)));
    emit(dis_out, [&](std::ostream& out) {
      write_probe_csv(out, {{std::string(variant_name(model.variant())) + "-" + dis_mode, r.metrics}},
                      fingerprint(fpc));
    });
  } else if (sw->parsed()) {
    if (!sw_oracle && sw_model.empty()) throw InvalidArgument("swingup needs --model or --oracle");
    TrainedModel model;
    KeyValueConfig env;
    if (!sw_oracle) {
      model = TrainedModel::load(sw_model);
      env = model_environment(sw_model, sw_settings);
    } else {
      env = sw_settings.resolve();
    }
    SwingConfig sim = SwingConfig::from_config(env);
    if (!env.contains("sim.l_imp")) sim.l_imp = calibrate_impulse(build_catalog().specs, sim);
    const TactileConfig tact = TactileConfig::from_config(env);
    ClosedLoopOptions opts;
    opts.goals = parse_list(sw_goals);
    opts.trials = sw_trials;
    opts.noise = !sw_no_noise;
    std::vector<int> ids;
    if (sw_objects.empty()) {
      ids = unseen_ids();
    } else {
      for (double v : parse_list(sw_objects)) ids.push_back(static_cast<int>(v));
    }
    for (int id : ids) {
      if (id < 0 || id > 32) throw InvalidArgument("object id out of range: " + std::to_string(id));
    }
    const Planner planner = sw_oracle ? simulator_planner(sim, sw_samples) : model_planner(model, sw_samples);
    const ClosedLoopReport report = closed_loop_eval(planner, specs_for(ids), sim, tact, sw_seed, opts);
    KeyValueConfig fpc = sim.to_config();
    fpc.merge(tact.to_config());
    fpc.set("control.samples", std::int64_t{sw_samples});
    fpc.set("control.seed", std::to_string(sw_seed));
    if (!sw_oracle) fpc.merge(model.metadata());
    emit(sw_out, [&](std::ostream& out) { write_closed_loop_csv(out, report, fingerprint(fpc)); });
  } else if (emb->parsed()) {
    TrainedModel model = TrainedModel::load(emb_model);
    const Dataset data = load_dataset(emb_data);
    const std::vector<int> ids = unseen_ids();
    const auto points = collect_embeddings(model, data, ids);
    if (points.empty() || points.front().embedding.empty()) {
      throw InvalidArgument("model variant has no embedding to project");
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(points.size()),
                      static_cast<Eigen::Index>(points.front().embedding.size()));
    std::vector<int> row_ids;
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t j = 0; j < points[i].embedding.size(); ++j) {
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = points[i].embedding[j];
      }
      row_ids.push_back(points[i].object_id);
    }
    const PcaResult pca = pca_project(x, 2);
    const CorrelationReport corr = embedding_dynamics_correlation(model, data, ids);
    KeyValueConfig fpc = model.metadata();
    fpc.merge(data.provenance());
    const std::string fp = fingerprint(fpc);
    emit(emb_out, [&](std::ostream& out) { write_projection_csv(out, row_ids, pca, fp); });
    if (!emb_svg.empty()) emit(emb_svg, [&](std::ostream& out) { write_projection_svg(out, row_ids, pca, fp); });
    if (!emb_dist.empty()) emit(emb_dist, [&](std::ostream& out) { write_distance_csv(out, corr, fp); });
    std::cout << "spearman=" << format_exact(corr.spearman) << "  explained=" << format_exact(pca.explained(0))
              << "," << format_exact(pca.explained(1)) << "  fingerprint=" << fp << '\n';
  } else if (swing->parsed()) {
    const KeyValueConfig c = swing_settings.resolve();
    SwingConfig sim = SwingConfig::from_config(c);
    if (!c.contains("sim.l_imp")) sim.l_imp = calibrate_impulse(build_catalog().specs, sim);
    const ObjectSpec spec = build_catalog().specs.at(static_cast<std::size_t>(swing_object));
    const SwingOutcome o =
        simulate_from(spec, swing_w, nominal_launch_velocity(spec, sim), sim, true);
    emit(swing_out, [&](std::ostream& out) {
      out << "# fingerprint=" << fingerprint(sim.to_config()) << '\n';
      out << "# final_angle_deg=" << format_exact(o.final_angle_deg) << '\n';
      out << "t,theta_deg,omega_rad_s\n";
      for (const auto& s : *o.trajectory) {
        out << format_exact(s.t) << ',' << format_exact(s.theta * 180.0 / 3.14159265358979323846) << ','
            << format_exact(s.omega) << '\n';
      }
    });
  } else if (frames->parsed()) {
    const TactileConfig tact = TactileConfig::from_config(fr_settings.resolve());
    const ObjectSpec spec = build_catalog().specs.at(static_cast<std::size_t>(fr_object));
    Rng rng(fr_seed);
    std::vector<std::pair<std::string, TactileFrame>> all;
    all.emplace_back("tilt20", synth_tilt_frame(spec, kTiltAnglesDeg[0], tact, rng));
    all.emplace_back("tilt45", synth_tilt_frame(spec, kTiltAnglesDeg[1], tact, rng));
    const auto shake = synth_shake_sequence(spec, tact, rng);
    for (std::size_t k = 0; k < shake.size(); ++k) all.emplace_back("shake" + std::to_string(k), shake[k]);
    emit(fr_out, [&](std::ostream& out) {
      out << "# fingerprint=" << fingerprint(tact.to_config()) << '\n';
      out << "frame,row,col,dx,dy\n";
      for (const auto& [name, f] : all) {
        for (int r = 0; r < kGridH; ++r) {
          for (int col = 0; col < kGridW; ++col) {
            out << name << ',' << r << ',' << col << ',' << f.at(r, col, 0) << ',' << f.at(r, col, 1) << '\n';
          }
        }
      }
    });
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}
