// Experiment driver: build stage artifacts, then verify, count, trend and
// test the positivity claim against them. Exit codes: 0 ok, 1 invariant
// failure, 2 configuration error, 3 resource refusal.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cantorlab/cantor.hpp"
#include "cantorlab/config.hpp"
#include "cantorlab/energy.hpp"
#include "cantorlab/errors.hpp"
#include "cantorlab/fourier.hpp"
#include "cantorlab/geometry.hpp"
#include "cantorlab/norms.hpp"
#include "cantorlab/params.hpp"
#include "cantorlab/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cantorlab;

namespace {

template <class T>
std::string big_str(const T& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string stage_file(const fs::path& out, char kind, int j) {
  return (out / (std::string(1, kind) + "_" + std::to_string(j) + ".txt")).string();
}

Stage read_stage(const fs::path& out, const ParamSequences& seq, int j) {
  EndpointSet P = read_endpoints_file(stage_file(out, 'P', j));
  EndpointSet A = read_endpoints_file(stage_file(out, 'A', j));
  if (P.stage != j || A.stage != j)
    throw invariant_error("endpoint file carries the wrong stage index");
  auto shared = std::make_shared<EndpointSet>(A);
  return Stage{std::move(P), std::move(A), StageMeasure(shared, seq)};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot open for writing: " + path.string());
  f << j.dump(2) << "\n";
}

std::vector<int> pick_stages(int stage_sel, int lo, int hi) {
  if (stage_sel >= 0) {
    if (stage_sel < lo || stage_sel > hi)
      throw config_error("--stage out of range for this command");
    return {stage_sel};
  }
  std::vector<int> out;
  for (int j = lo; j <= hi; ++j) out.push_back(j);
  return out;
}

json manifest_header(const ExperimentConfig& cfg) {
  json m;
  m["config_hash"] = config_hash(cfg);
  m["config"] = canonical_text(cfg);
  m["module_versions"] = {{"params", 1}, {"cantor", 1}, {"fourier", 1},
                          {"geometry", 1}, {"energy", 1}, {"norms", 1},
                          {"cli", 1}};
  return m;
}

int cmd_build(const ExperimentConfig& cfg) {
  const ParamSequences seq = make_sequences(cfg);
  const ValidationReport report = validate_sequences(seq, cfg.c_ratio);
  const std::string hash = config_hash(cfg);
  const fs::path out = cfg.out_dir;
  fs::create_directories(out);

  const std::vector<Stage> stages = build_all(seq, cfg.seed);

  json m = manifest_header(cfg);
  m["checks"]["branch_ratio_ok"] = report.branch_ratio_ok;
  m["checks"]["density_ratio_ok"] = report.density_ratio_ok;
  m["checks"]["subdiv_nondecreasing"] = report.subdiv_nondecreasing;
  m["checks"]["subdiv_sublinear"] = report.subdiv_sublinear;
  m["checks"]["subdiv_log_negligible"] = report.subdiv_log_negligible;
  m["branch_ratio_worst"] = report.branch_ratio_worst;
  m["density_ratio_worst"] = report.density_ratio_worst;

  json per_stage = json::array();
  for (const Stage& st : stages) {
    const int j = st.A.stage;
    write_endpoints_file(stage_file(out, 'P', j), st.P, seq, cfg.seed, hash);
    write_endpoints_file(stage_file(out, 'A', j), st.A, seq, cfg.seed, hash);
    json row;
    row["stage"] = j;
    row["seed"] = cfg.seed;
    row["progression_size"] = st.P.size();
    row["endpoint_count"] = st.A.size();
    row["S"] = big_str(seq.S_at(j));
    row["T"] = big_str(seq.T_at(j));
    row["N"] = big_str(seq.N_at(j));
    per_stage.push_back(row);
  }
  m["stages"] = per_stage;
  write_json(out / "manifest.json", m);

  std::printf("build: %d stages under %s (config %s)\n", seq.stages(),
              out.string().c_str(), hash.c_str());
  return 0;
}

int verify_decay(const ExperimentConfig& cfg, const ParamSequences& seq,
                 const fs::path& out, int stage_sel) {
  const std::string hash = config_hash(cfg);
  const Exponents& e = seq.exponents();
  json rep = manifest_header(cfg);
  json rows = json::array();
  const std::vector<int> stages = pick_stages(stage_sel, 0, seq.stages());
  for (int j : stages) {
    const Stage st = read_stage(out, seq, j);
    const DecayGrid grid =
        stage_grid(st.mu, cfg.grid_max_factor, cfg.grid_points_per_decade);
    const DecayReport dr = decay_profile(st.mu, 0.5 * e.beta0, grid);
    const std::string csv = (out / ("decay_stage" + std::to_string(j) + ".csv")).string();
    write_decay_csv(csv, dr, grid, cfg.seed, hash);
    json row;
    row["stage"] = j;
    row["c_emp"] = dr.c_emp;
    row["arg_sup"] = dr.arg_sup;
    row["csv"] = csv;
    rows.push_back(row);
    std::printf("decay: stage %d c_emp = %.6g at |xi| = %.6g\n", j, dr.c_emp,
                dr.arg_sup);
  }
  rep["stages"] = rows;

  // Radial route on the deepest requested stage; the fitted constant is
  // evidence, not a gate.
  const int last = stages.back();
  const Stage st = read_stage(out, seq, last);
  const DecayGrid grid =
      stage_grid(st.mu, cfg.grid_max_factor, cfg.grid_points_per_decade);
  const RadialDecayReport rr = radial_envelope_fit(st.mu, cfg.d, e.beta0, grid);
  rep["radial"]["stage"] = last;
  rep["radial"]["c_fit"] = rr.c_fit;
  std::printf("decay: radial envelope constant %.6g (stage %d)\n", rr.c_fit, last);

  write_json(out / "decay.json", rep);
  return 0;
}

int verify_frostman(const ExperimentConfig& cfg, const ParamSequences& seq,
                    const fs::path& out, int stage_sel) {
  const std::string hash = config_hash(cfg);
  json rep = manifest_header(cfg);
  json rows = json::array();
  for (int j : pick_stages(stage_sel, 0, seq.stages())) {
    const Stage st = read_stage(out, seq, j);
    const FrostmanReport fr =
        verify_frostman(st.mu, cfg.d, cfg.alpha, cfg.samples, cfg.seed);
    const std::string csv =
        (out / ("frostman_stage" + std::to_string(j) + ".csv")).string();
    write_frostman_csv(csv, fr, cfg.seed, hash);
    json row;
    row["stage"] = j;
    row["samples"] = cfg.samples;
    row["sup_ratio"] = fr.sup_ratio;
    row["csv"] = csv;
    rows.push_back(row);
    std::printf("frostman: stage %d sup nu(B)/r^alpha = %.6g over %d balls\n",
                j, fr.sup_ratio, cfg.samples);
  }
  rep["stages"] = rows;
  write_json(out / "frostman.json", rep);
  return 0;
}

int verify_geometry(const ExperimentConfig& cfg, const ParamSequences& seq,
                    const fs::path& out, int stage_sel) {
  json rep = manifest_header(cfg);
  json rows = json::array();
  bool all_ok = true;
  std::string first_failure;
  for (int j : pick_stages(stage_sel, 1, seq.stages())) {
    const Stage st = read_stage(out, seq, j);
    json row;
    row["stage"] = j;

    if (!check_isolation(st.A, st.P, seq)) {
      row["isolation"] = false;
      rows.push_back(row);
      all_ok = false;
      if (first_failure.empty())
        first_failure = "stage " + std::to_string(j) + " fails isolation";
      continue;
    }
    row["isolation"] = true;

    const TestFunction f = make_test_function(st, seq, cfg.d);
    const double delta = f.delta;
    double worst_lo = 1e300, worst_hi = 1e300;
    bool sandwich_ok = true;
    for (const BumpSpec& psi : f.bumps) {
      SectorRegion inner{cfg.d, psi.a, psi.thickness, delta, {}};
      SectorRegion outer{cfg.d, psi.a, psi.thickness, 2.0 * delta, {}};
      const double lo = nu_region_mass(st.mu, cfg.d, inner);
      const double hi = nu_region_mass(st.mu, cfg.d, outer);
      const double mid = bump_nu_integral(psi, st.mu);
      worst_lo = std::min(worst_lo, mid - lo);
      worst_hi = std::min(worst_hi, hi - mid);
      if (mid < lo * (1.0 - 1e-12) || mid > hi * (1.0 + 1e-12)) sandwich_ok = false;
    }
    row["bumps"] = f.bumps.size();
    row["sandwich_ok"] = sandwich_ok;
    row["sandwich_margin_lo"] = worst_lo;
    row["sandwich_margin_hi"] = worst_hi;

    // Sector mass against the w^{d-1}/T yardstick over every kept endpoint.
    double ratio_min = 1e300, ratio_max = 0.0;
    const double T = to_double(seq.T_at(j));
    for (Key k : st.A.keys) {
      for (double w : {delta, 2.0 * delta}) {
        SectorRegion reg{cfg.d, st.mu.value_of(k), st.mu.interval_length(), w, {}};
        const double mass = nu_region_mass(st.mu, cfg.d, reg);
        const double ratio = mass * T / std::pow(w, cfg.d - 1);
        ratio_min = std::min(ratio_min, ratio);
        ratio_max = std::max(ratio_max, ratio);
      }
    }
    row["cap_ratio_spread"] = ratio_max / ratio_min;

    const double total = nu_total_mass(st.mu, cfg.d);
    const double hat0 = nu_hat(st.mu, cfg.d, 0.0).real();
    row["nu_total"] = total;
    row["nu_hat0_gap"] = std::abs(total - hat0);
    if (std::abs(total - hat0) > 1e-8 * std::max(1.0, total)) {
      sandwich_ok = false;
      row["transform_consistent"] = false;
    } else {
      row["transform_consistent"] = true;
    }

    if (!sandwich_ok) {
      all_ok = false;
      if (first_failure.empty())
        first_failure = "stage " + std::to_string(j) + " fails a sector bound";
    }
    rows.push_back(row);
    std::printf("geometry: stage %d bumps = %zu spread = %.4g %s\n", j,
                f.bumps.size(), row["cap_ratio_spread"].get<double>(),
                sandwich_ok ? "ok" : "FAIL");
  }
  rep["stages"] = rows;
  write_json(out / "geometry.json", rep);
  if (!all_ok) throw invariant_error(first_failure);
  return 0;
}

int verify_window(const ExperimentConfig& cfg, const ParamSequences& seq,
                  const fs::path& out, int stage_sel) {
  const int l = stage_sel >= 0 ? stage_sel : seq.stages();
  if (l < 1 || l > seq.stages()) throw config_error("--stage out of range");
  const double delta = 1.0 / std::sqrt(to_double(seq.N_at(l)));
  const KnappBox box = make_knapp_box(cfg.d, cfg.r, delta);
  const WindowG w(box);
  const WindowReport wr = verify_window(w);

  json rep = manifest_header(cfg);
  rep["stage"] = l;
  rep["eta"] = box.eta;
  rep["delta"] = delta;
  rep["nonneg_ok"] = wr.nonneg_ok;
  rep["support_ok"] = wr.support_ok;
  rep["plateau_ok"] = wr.plateau_ok;
  rep["upper_ok"] = wr.upper_ok;
  rep["transform_ok"] = wr.transform_ok;
  rep["min_value"] = wr.min_value;
  rep["worst_plateau_margin"] = wr.worst_plateau_margin;
  rep["transform_gap"] = wr.transform_gap;
  write_json(out / "window.json", rep);

  const bool ok = wr.nonneg_ok && wr.support_ok && wr.plateau_ok &&
                  wr.upper_ok && wr.transform_ok;
  std::printf("window: stage %d plateau margin %.4g transform gap %.3g %s\n",
              l, wr.worst_plateau_margin, wr.transform_gap, ok ? "ok" : "FAIL");
  if (!ok) throw invariant_error("window checks failed; see window.json");
  return 0;
}

int cmd_energy(const ExperimentConfig& cfg, int stage_sel) {
  const ParamSequences seq = make_sequences(cfg);
  const std::string hash = config_hash(cfg);
  const fs::path out = cfg.out_dir;
  json rep = manifest_header(cfg);
  json rows = json::array();
  bool all_ok = true;
  for (int j : pick_stages(stage_sel, 1, seq.stages())) {
    const Stage st = read_stage(out, seq, j);
    const EnergyReport er = energy_report(st.P, seq, cfg.r);
    const std::string csv =
        (out / ("sumset_stage" + std::to_string(j) + "_r" +
                std::to_string(cfg.r) + ".csv"))
            .string();
    write_sumset_csv(csv, er.profile, cfg.seed, hash);
    json row;
    row["stage"] = j;
    row["r"] = cfg.r;
    row["method"] = er.profile.method;
    row["support"] = er.profile.support_size();
    row["energy"] = big_str(er.profile.energy);
    row["energy_floor"] = big_str(er.lower_bound);
    row["support_ceiling"] = big_str(er.size_bound);
    row["bound_ok"] = er.energy_ok && er.support_ok;
    rows.push_back(row);
    all_ok = all_ok && er.energy_ok && er.support_ok;
    std::printf("energy: stage %d r=%d support=%zu energy=%s %s\n", j, cfg.r,
                er.profile.support_size(), big_str(er.profile.energy).c_str(),
                (er.energy_ok && er.support_ok) ? "ok" : "FAIL");
  }
  rep["stages"] = rows;
  write_json(out / "energy.json", rep);
  if (!all_ok) throw invariant_error("an energy or support bound failed");
  return 0;
}

std::string p_tag(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  std::string s = buf;
  for (char& c : s)
    if (c == '.') c = '_';
  return s;
}

void check_classification(const RatioSeries& s) {
  // The closed-form slope and the p-threshold comparison must tell the same
  // story; these are two spellings of one inequality.
  const bool diverging = s.classification == "diverging";
  const bool threshold = s.classification == "threshold";
  if (threshold) {
    if (std::abs(s.log_slope) > 1e-9)
      throw invariant_error("threshold classification with nonzero slope");
  } else if (diverging != (s.log_slope > 0.0)) {
    throw invariant_error("ratio classification contradicts the slope sign");
  }
}

int cmd_ratio(const ExperimentConfig& cfg, int stage_sel,
              const std::string& mode, const std::vector<double>& p_values) {
  const ParamSequences seq = make_sequences(cfg);
  const std::string hash = config_hash(cfg);
  const fs::path out = cfg.out_dir;
  fs::create_directories(out);

  std::vector<std::string> modes;
  if (mode == "both") modes = {"formula", "measured"};
  else modes = {mode};

  json rep = manifest_header(cfg);
  json entries = json::array();
  for (const std::string& m : modes) {
    std::vector<int> stages;
    std::vector<Stage> built;
    if (m == "formula") {
      stages = pick_stages(stage_sel, 1, seq.stages());
    } else {
      const int hi = std::min(seq.stages(), 3);
      stages = pick_stages(stage_sel, 1, hi);
      built.reserve(static_cast<std::size_t>(stages.back()) + 1);
      for (int j = 0; j <= stages.back(); ++j)
        built.push_back(read_stage(out, seq, j));
    }
    for (double p : p_values) {
      const RatioSeries series =
          (m == "formula")
              ? ratio_trend_formula(seq, stages, p, cfg.r, cfg.d)
              : ratio_trend_measured(built, seq, stages, p, cfg.r, cfg.d);
      check_classification(series);
      const std::string csv =
          (out / ("ratio_" + m + "_p" + p_tag(p) + ".csv")).string();
      const std::string gp =
          (out / ("ratio_" + m + "_p" + p_tag(p) + ".gp")).string();
      write_ratio_csv(csv, series, seq, cfg.seed, hash);
      write_ratio_gnuplot(gp, csv);
      json row;
      row["mode"] = m;
      row["p"] = p;
      row["p0"] = series.p0;
      row["log_slope"] = series.log_slope;
      row["classification"] = series.classification;
      row["values"] = series.values;
      row["csv"] = csv;
      entries.push_back(row);
      std::printf("ratio: %s p = %g -> %s (p0 = %g)\n", m.c_str(), p,
                  series.classification.c_str(), series.p0);
    }
  }
  rep["series"] = entries;
  write_json(out / "ratio.json", rep);
  return 0;
}

int cmd_claim(const ExperimentConfig& cfg, int stage_sel) {
  if (cfg.d != 2)
    throw config_error("the positivity claim path covers d = 2");
  if (cfg.r != 2)
    throw config_error("the positivity claim path covers r = 2");
  const ParamSequences seq = make_sequences(cfg);
  const std::string hash = config_hash(cfg);
  const fs::path out = cfg.out_dir;
  const int l = stage_sel >= 0 ? stage_sel : std::min(2, seq.stages());
  if (l < 1 || l > seq.stages()) throw config_error("--stage out of range");

  const Stage st = read_stage(out, seq, l);
  const TestFunction f = make_test_function(st, seq, cfg.d);
  const double delta = f.delta;
  const WindowG w(make_knapp_box(cfg.d, cfg.r, delta));

  std::vector<std::vector<Key>> tuples;
  tuples.push_back({f.bumps[0].key, f.bumps[0].key, f.bumps[0].key,
                    f.bumps[0].key});
  for (int i = 0; i < 10; ++i) {
    Rng rng(cfg.seed, 0xC1A117ull, static_cast<std::uint64_t>(i));
    std::vector<Key> tuple;
    for (int c = 0; c < 4; ++c)
      tuple.push_back(f.bumps[rng.next_below(f.bumps.size())].key);
    tuples.push_back(tuple);
  }

  json rep = manifest_header(cfg);
  rep["stage"] = l;
  json rows = json::array();
  bool all_ok = true;
  for (const auto& tuple : tuples) {
    const TupleIntegral ti = tuple_window_integral(tuple, w, f, st.mu);
    const bool ok = ti.value.real() >= -1e-8 * ti.scale &&
                    std::abs(ti.value.imag()) <= 1e-8 * ti.scale;
    all_ok = all_ok && ok;
    json row;
    row["tuple"] = tuple;
    row["real"] = ti.value.real();
    row["imag"] = ti.value.imag();
    row["scale"] = ti.scale;
    row["grid_nodes"] = ti.grid_nodes;
    row["ok"] = ok;
    rows.push_back(row);
    std::printf("claim: tuple (%lld,%lld,%lld,%lld) I = %.3e %s\n",
                static_cast<long long>(tuple[0]), static_cast<long long>(tuple[1]),
                static_cast<long long>(tuple[2]), static_cast<long long>(tuple[3]),
                ti.value.real(), ok ? "ok" : "FAIL");
  }
  rep["tuples"] = rows;
  write_json(out / "claim.json", rep);
  if (!all_ok)
    throw invariant_error("a tuple integral left the certified half-plane");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-stage laboratory for structured Cantor measures on spheres"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  int stage_sel = -1;
  int r_override = 0;
  double p_override = 0.0;
  std::string mode = "formula";
  std::string which;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value config file")->required();
    cmd->add_option("--seed", seed_override, "override the config seed");
    cmd->add_option("--out", out_override, "override the output directory");
  };

  CLI::App* build = app.add_subcommand("build", "generate and write stage artifacts");
  add_common(build);

  CLI::App* verify = app.add_subcommand("verify", "run checks against built artifacts");
  add_common(verify);
  verify->add_option("which", which, "frostman | decay | geometry | window")
      ->required()
      ->check(CLI::IsMember({"frostman", "decay", "geometry", "window"}));
  verify->add_option("--stage", stage_sel, "restrict to one stage");

  CLI::App* energy = app.add_subcommand("energy", "sumset profiles and energy bounds");
  add_common(energy);
  energy->add_option("--stage", stage_sel, "restrict to one stage");
  energy->add_option("--r", r_override, "additive order");

  CLI::App* ratio = app.add_subcommand("ratio", "norm-ratio trend series");
  add_common(ratio);
  ratio->add_option("--stage", stage_sel, "restrict to one stage");
  ratio->add_option("--r", r_override, "additive order");
  ratio->add_option("--p", p_override, "single exponent instead of the config list");
  ratio->add_option("--mode", mode, "formula | measured | both")
      ->check(CLI::IsMember({"formula", "measured", "both"}));

  CLI::App* claim = app.add_subcommand("claim", "window-weighted tuple integrals");
  add_common(claim);
  claim->add_option("--stage", stage_sel, "stage of the test function");
  claim->add_option("--r", r_override, "additive order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    ExperimentConfig cfg = load_config_file(config_path);
    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed")) cfg.seed = seed_override;
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (r_override > 0) cfg.r = r_override;

    if (build->parsed()) return cmd_build(cfg);

    const ParamSequences seq = make_sequences(cfg);
    const fs::path out = cfg.out_dir;
    if (verify->parsed()) {
      if (which == "decay") return verify_decay(cfg, seq, out, stage_sel);
      if (which == "frostman") return verify_frostman(cfg, seq, out, stage_sel);
      if (which == "geometry") return verify_geometry(cfg, seq, out, stage_sel);
      return verify_window(cfg, seq, out, stage_sel);
    }
    if (energy->parsed()) return cmd_energy(cfg, stage_sel);
    if (ratio->parsed()) {
      std::vector<double> p_values =
          ratio->count("--p") ? std::vector<double>{p_override} : cfg.p_list;
      return cmd_ratio(cfg, stage_sel, mode, p_values);
    }
    if (claim->parsed()) return cmd_claim(cfg, stage_sel);
    return 2;
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const resource_error& e) {
    std::fprintf(stderr, "resource refusal: %s\n", e.what());
    return 3;
  } catch (const invariant_error& e) {
    std::fprintf(stderr, "invariant failure: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "invariant failure: %s\n", e.what());
    return 1;
  }
}
