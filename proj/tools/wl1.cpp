// command-line front end: single-instance recovery, Monte Carlo sweeps,
// asymptotic thresholds, optimal weights, and exponent/angle table dumps
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wl1/angles.hpp"
#include "wl1/experiments.hpp"
#include "wl1/exponents.hpp"
#include "wl1/io.hpp"
#include "wl1/model.hpp"
#include "wl1/recovery.hpp"
#include "wl1/svgplot.hpp"
#include "wl1/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<double> parse_range(const std::string& spec) {
  // "a:b:step" inclusive of both ends (within a half-step tolerance)
  double a, b, step;
  char c1, c2;
  std::istringstream ss(spec);
  if (!(ss >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
    throw CLI::ValidationError("range", "expected start:stop:step with positive step");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    double v = a + i * step;
    if (v > b + 0.5 * step) break;
    out.push_back(std::min(v, b));
  }
  return out;
}

std::string fmt(double v, const char* f = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

wl1::ExperimentPlan plan_from_json(const json& j) {
  wl1::ExperimentPlan p;
  p.n = j.at("n").get<int>();
  p.m = j.at("m").get<int>();
  p.n1 = j.at("n1").get<int>();
  p.n2 = j.at("n2").get<int>();
  p.P2 = j.at("p2").get<double>();
  p.p1_list = j.at("p1_list").get<std::vector<double>>();
  p.w2_list = j.at("w2_list").get<std::vector<double>>();
  p.trials = j.at("trials").get<int>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.success_tol = j.at("success_tol").get<double>();
  p.amplitude = wl1::amplitude_from_string(j.at("amplitude").get<std::string>());
  return p;
}

json plan_to_json(const wl1::ExperimentPlan& p) {
  return json{{"n", p.n},           {"m", p.m},
              {"n1", p.n1},         {"n2", p.n2},
              {"p2", p.P2},         {"p1_list", p.p1_list},
              {"w2_list", p.w2_list}, {"trials", p.trials},
              {"seed", p.seed},     {"success_tol", p.success_tol},
              {"amplitude", wl1::to_string(p.amplitude)}};
}

int run_recover(const json& p, const fs::path& out) {
  auto model = wl1::SparsityModel::contiguous(p.at("n").get<int>(), p.at("n1").get<int>(),
                                              p.at("p1").get<double>(), p.at("p2").get<double>());
  auto law = wl1::amplitude_from_string(p.at("amplitude").get<std::string>());
  auto inst = wl1::gaussian_instance(model, p.at("m").get<int>(), law,
                                     p.at("seed").get<std::uint64_t>());
  auto w = wl1::WeightScheme::for_model(model, p.at("w2").get<double>());
  wl1::RecoveryOptions opts;
  opts.success_tol = p.at("tol").get<double>();
  auto r = wl1::recover(inst, w, opts);

  std::ostringstream csv;
  csv << "index,x_true,x_hat,abs_error\n";
  for (int i = 0; i < model.n; ++i)
    csv << i << "," << fmt(inst.x_true.x[i], "%.17g") << "," << fmt(r.x_hat[i], "%.17g") << ","
        << fmt(std::abs(r.x_hat[i] - inst.x_true.x[i]), "%.17g") << "\n";
  wl1::write_file(out / "recover.csv", csv.str());

  json diag{{"status", wl1::to_string(r.status)},
            {"success", r.success},
            {"max_abs_error", r.max_abs_error},
            {"objective", r.objective},
            {"iterations", r.iterations},
            {"non_unique", r.non_unique},
            {"instance_hash", wl1::instance_hash(inst)}};
  wl1::write_file(out / "diagnostics.json", diag.dump(2) + "\n");
  wl1::write_manifest(out, "recover", p);
  std::cout << "recover: " << (r.success ? "success" : "failure") << " (status "
            << wl1::to_string(r.status) << ", max_abs_error " << r.max_abs_error << ")\n";
  return r.success ? 0 : 1;
}

int run_simulate(const json& p, const fs::path& out, int threads) {
  wl1::ExperimentPlan plan = plan_from_json(p.at("plan"));
  auto pts = wl1::run_plan(plan, threads);
  std::ostringstream csv;
  wl1::write_curve_csv(csv, pts);
  wl1::write_file(out / "curves.csv", csv.str());

  if (p.value("compare_theory", false)) {
    auto rep = wl1::empirical_vs_theory(plan, pts);
    std::ostringstream tcsv;
    tcsv << "W2,empirical_crossing,theoretical_threshold,gap\n";
    for (const auto& row : rep.rows)
      tcsv << fmt(row.W2) << "," << fmt(row.empirical_crossing) << ","
           << fmt(row.theoretical_threshold) << "," << fmt(row.gap) << "\n";
    wl1::write_file(out / "theory.csv", tcsv.str());
  }
  if (p.value("plot", false)) {
    wl1::SvgPlot plot;
    plot.title = "recovery rate vs P1";
    plot.xlabel = "P1";
    plot.ylabel = "recovery rate";
    for (double w2 : plan.w2_list) {
      wl1::SvgSeries s;
      s.label = "W2 = " + fmt(w2, "%g");
      for (const auto& cp : pts)
        if (cp.W2 == w2) {
          s.x.push_back(cp.P1);
          s.y.push_back(cp.rate);
        }
      plot.series.push_back(std::move(s));
    }
    std::ostringstream svg;
    plot.write(svg);
    wl1::write_file(out / "curves.svg", svg.str());
  }
  wl1::write_manifest(out, "simulate", p);
  int failures = 0;
  for (const auto& cp : pts) failures += cp.solver_failures;
  std::cout << "simulate: " << pts.size() << " curve points written";
  if (failures > 0) std::cout << " (" << failures << " solver failures counted as misses)";
  std::cout << "\n";
  return 0;
}

int run_threshold(const json& p, const fs::path& out) {
  double delta = p.at("delta").get<double>();
  double p2 = p.at("p2").get<double>();
  double g1 = p.at("gamma1").get<double>();
  double g2 = p.at("gamma2").get<double>();
  double tol = p.at("tol").get<double>();
  wl1::ExponentGridOptions gopts;
  gopts.grid_n = p.at("grid_n").get<int>();
  gopts.keep_surface = false;
  auto w2s = p.at("w2_list").get<std::vector<double>>();

  std::ostringstream csv;
  csv << "W2,P1_threshold\n";
  std::vector<double> ths;
  for (double w2 : w2s) {
    double th = wl1::threshold_P1(delta, p2, g1, g2, w2, tol, 0.0, gopts);
    ths.push_back(th);
    csv << fmt(w2) << "," << fmt(th) << "\n";
  }
  wl1::write_file(out / "threshold.csv", csv.str());
  if (p.value("plot", false)) {
    wl1::SvgPlot plot;
    plot.title = "recoverable P1 threshold vs W2";
    plot.xlabel = "W2";
    plot.ylabel = "P1 threshold";
    plot.series.push_back({"threshold", w2s, ths});
    std::ostringstream svg;
    plot.write(svg);
    wl1::write_file(out / "threshold.svg", svg.str());
  }
  wl1::write_manifest(out, "threshold", p);
  std::cout << "threshold: " << w2s.size() << " rows written\n";
  return 0;
}

int run_weights(const json& p, const fs::path& out) {
  wl1::OptimalWeightOptions opts;
  opts.W_max = p.at("w_max").get<double>();
  opts.tol_W = p.at("tol_w").get<double>();
  opts.inner_tol = p.at("inner_tol").get<double>();
  opts.grid.grid_n = p.at("grid_n").get<int>();
  auto r = wl1::optimal_weight(p.at("delta").get<double>(), p.at("p2").get<double>(),
                               p.at("gamma1").get<double>(), p.at("gamma2").get<double>(), opts);
  json j{{"W_star", r.W_star}, {"P1_star", r.P1_star}, {"threshold_evaluations", r.evaluations}};
  wl1::write_file(out / "weights.json", j.dump(2) + "\n");
  wl1::write_manifest(out, "weights", p);
  std::cout << "weights: W_star = " << r.W_star << ", P1_star = " << r.P1_star << "\n";
  return 0;
}

int run_surface(const json& p, const fs::path& out) {
  wl1::AsymptoticConfig cfg;
  cfg.delta = p.at("delta").get<double>();
  cfg.gamma1 = p.at("gamma1").get<double>();
  cfg.gamma2 = p.at("gamma2").get<double>();
  cfg.P1 = p.at("p1").get<double>();
  cfg.P2 = p.at("p2").get<double>();
  cfg.W = p.at("w").get<double>();
  wl1::ExponentGridOptions gopts;
  gopts.grid_n = p.at("grid_n").get<int>();
  auto res = wl1::recoverable(cfg, p.at("margin").get<double>(), gopts);
  std::ostringstream csv;
  res.surface.write_csv(csv);
  wl1::write_file(out / "surface.csv", csv.str());
  json j{{"recoverable", res.recoverable},
         {"max_psi", res.max_psi},
         {"argmax_t1p", res.argmax.t1p},
         {"argmax_t2p", res.argmax.t2p},
         {"note", res.note}};
  wl1::write_file(out / "verdict.json", j.dump(2) + "\n");
  wl1::write_manifest(out, "surface", p);
  std::cout << "surface: max psi = " << res.max_psi << ", recoverable = "
            << (res.recoverable ? "true" : "false") << "\n";
  return 0;
}

int run_angles(const json& p, const fs::path& out) {
  wl1::AngleQuery q;
  q.model = wl1::SparsityModel::contiguous(p.at("n").get<int>(), p.at("n1").get<int>(),
                                           p.at("p1").get<double>(), p.at("p2").get<double>());
  q.W2 = p.at("w2").get<double>();
  q.k = p.contains("k") && !p.at("k").is_null()
            ? p.at("k").get<int>()
            : static_cast<int>(std::lround(q.model.n1 * q.model.P1 + q.model.n2 * q.model.P2));
  int t1max = p.at("t1_max").get<int>(), t2max = p.at("t2_max").get<int>();
  int s1 = p.at("t1_step").get<int>(), s2 = p.at("t2_step").get<int>();
  double rel_tol = p.at("rel_tol").get<double>();

  std::ostringstream csv;
  csv << "t1,t2,log_internal,log_external,log_term\n";
  for (int t1 = 0; t1 <= t1max; t1 += s1) {
    for (int t2 = 0; t2 <= t2max; t2 += s2) {
      q.t1 = t1;
      q.t2 = t2;
      double li = wl1::internal_angle(q, rel_tol);
      double le = wl1::external_angle(q, rel_tol);
      double lt = wl1::union_bound_term(q, rel_tol);
      csv << t1 << "," << t2 << "," << fmt(li, "%.17g") << "," << fmt(le, "%.17g") << ","
          << fmt(lt, "%.17g") << "\n";
    }
  }
  wl1::write_file(out / "angles.csv", csv.str());
  wl1::write_manifest(out, "angles", p);
  std::cout << "angles: table written\n";
  return 0;
}

// merge CLI-provided params with a manifest when --from-manifest is given
json effective_params(const std::string& command, const std::string& manifest_path,
                      const json& cli_params) {
  if (manifest_path.empty()) return cli_params;
  json m = wl1::load_json(manifest_path);
  if (m.at("schema").get<std::string>() != wl1::kManifestSchema)
    throw std::runtime_error("unsupported manifest schema");
  if (m.at("command").get<std::string>() != command)
    throw std::runtime_error("manifest was written by subcommand '" +
                             m.at("command").get<std::string>() + "', not '" + command + "'");
  return m.at("params");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted-l1 sparse recovery toolkit"};
  app.set_version_flag("--version", wl1::kVersion);
  app.require_subcommand(1);
  app.fallthrough(true);

  std::string out_dir = "wl1-out";
  int threads = 0;
  app.add_option("--out", out_dir, "output directory (created if missing)")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (0 = hardware)")->capture_default_str();

  // recover
  auto* rec = app.add_subcommand("recover", "generate one instance and run weighted-l1 recovery");
  int rn = 0, rm = 0, rn1 = 0, rn2 = -1;
  double rp1 = 0, rp2 = 0, rw2 = 1.0, rtol = 1e-6;
  std::uint64_t rseed = 0;
  std::string ramp = "gaussian", rmanifest;
  rec->add_option("--n", rn, "signal dimension");
  rec->add_option("--m", rm, "measurement count");
  rec->add_option("--n1", rn1, "size of class 1");
  rec->add_option("--n2", rn2, "size of class 2 (default n - n1)");
  rec->add_option("--p1", rp1, "class-1 sparsity");
  rec->add_option("--p2", rp2, "class-2 sparsity");
  rec->add_option("--w2", rw2, "weight applied to class 2")->capture_default_str();
  rec->add_option("--seed", rseed, "RNG seed")->capture_default_str();
  rec->add_option("--amplitude", ramp, "gaussian|rademacher")->capture_default_str();
  rec->add_option("--tol", rtol, "relative success tolerance")->capture_default_str();
  rec->add_option("--from-manifest", rmanifest, "re-run parameters from a manifest file");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo recovery-rate sweep over (P1, W2)");
  int sn = 200, sm = 100, sn1 = 100, sn2 = -1, strials = 200;
  double sp2 = 0.05, stol = 1e-6;
  std::uint64_t sseed = 0;
  std::string sp1_range, sp1_list, sw2_list = "1", samp = "gaussian", splan, smanifest;
  bool scompare = false, splot = false;
  sim->add_option("--n", sn, "signal dimension")->capture_default_str();
  sim->add_option("--m", sm, "measurement count")->capture_default_str();
  sim->add_option("--n1", sn1, "size of class 1")->capture_default_str();
  sim->add_option("--n2", sn2, "size of class 2 (default n - n1)");
  sim->add_option("--p2", sp2, "class-2 sparsity")->capture_default_str();
  sim->add_option("--p1-range", sp1_range, "P1 sweep as start:stop:step");
  sim->add_option("--p1-list", sp1_list, "P1 sweep as comma list");
  sim->add_option("--w2-list", sw2_list, "W2 values, comma list")->capture_default_str();
  sim->add_option("--trials", strials, "trials per grid point")->capture_default_str();
  sim->add_option("--seed", sseed, "base seed")->capture_default_str();
  sim->add_option("--tol", stol, "relative success tolerance")->capture_default_str();
  sim->add_option("--amplitude", samp, "gaussian|rademacher")->capture_default_str();
  sim->add_flag("--compare-theory", scompare, "also write 50%-crossing vs asymptotic threshold");
  sim->add_flag("--plot", splot, "emit an SVG plot next to the CSV");
  sim->add_option("--plan", splan, "read the experiment plan from a JSON file");
  sim->add_option("--from-manifest", smanifest, "re-run parameters from a manifest file");

  // threshold
  auto* thr = app.add_subcommand("threshold", "asymptotic recoverable-P1 threshold vs W2");
  double tdelta = 0.75, tp2 = 0.1, tg1 = 0.5, tg2 = -1.0, ttol = 1e-3;
  int tgrid = 200;
  std::string tw2_range = "1:3:0.1", tw2_list, tmanifest;
  bool tplot = false;
  thr->add_option("--delta", tdelta, "measurement ratio m/n")->capture_default_str();
  thr->add_option("--p2", tp2, "class-2 sparsity")->capture_default_str();
  thr->add_option("--gamma1", tg1, "class-1 fraction n1/n")->capture_default_str();
  thr->add_option("--gamma2", tg2, "class-2 fraction (default 1 - gamma1)");
  thr->add_option("--w2-range", tw2_range, "W2 sweep as start:stop:step")->capture_default_str();
  thr->add_option("--w2-list", tw2_list, "W2 sweep as comma list (overrides range)");
  thr->add_option("--tol", ttol, "bisection tolerance in P1")->capture_default_str();
  thr->add_option("--grid-n", tgrid, "exponent grid points per axis")->capture_default_str();
  thr->add_flag("--plot", tplot, "emit an SVG plot next to the CSV");
  thr->add_option("--from-manifest", tmanifest, "re-run parameters from a manifest file");

  // weights
  auto* wgt = app.add_subcommand("weights", "optimal W2 for a two-class model");
  double wdelta = 0.75, wp2 = 0.1, wg1 = 0.5, wg2 = -1.0, wmax = 10.0, wtolw = 1e-2,
         winner = 1e-5;
  int wgrid = 200;
  std::string wmanifest;
  wgt->add_option("--delta", wdelta, "measurement ratio m/n")->capture_default_str();
  wgt->add_option("--p2", wp2, "class-2 sparsity")->capture_default_str();
  wgt->add_option("--gamma1", wg1, "class-1 fraction n1/n")->capture_default_str();
  wgt->add_option("--gamma2", wg2, "class-2 fraction (default 1 - gamma1)");
  wgt->add_option("--w-max", wmax, "upper end of the W2 search interval")->capture_default_str();
  wgt->add_option("--tol-w", wtolw, "golden-section tolerance in W2")->capture_default_str();
  wgt->add_option("--inner-tol", winner, "threshold bisection tolerance")->capture_default_str();
  wgt->add_option("--grid-n", wgrid, "exponent grid points per axis")->capture_default_str();
  wgt->add_option("--from-manifest", wmanifest, "re-run parameters from a manifest file");

  // surface
  auto* srf = app.add_subcommand("surface", "dump the exponent surface for one configuration");
  double fdelta = 0.75, fg1 = 0.5, fg2 = -1.0, fp1 = 0.3, fp2 = 0.1, fw = 1.0, fmargin = 0.0;
  int fgrid = 200;
  std::string fmanifest;
  srf->add_option("--delta", fdelta, "measurement ratio m/n")->capture_default_str();
  srf->add_option("--gamma1", fg1, "class-1 fraction n1/n")->capture_default_str();
  srf->add_option("--gamma2", fg2, "class-2 fraction (default 1 - gamma1)");
  srf->add_option("--p1", fp1, "class-1 sparsity")->capture_default_str();
  srf->add_option("--p2", fp2, "class-2 sparsity")->capture_default_str();
  srf->add_option("--w", fw, "weight ratio W2/W1")->capture_default_str();
  srf->add_option("--margin", fmargin, "required negativity margin")->capture_default_str();
  srf->add_option("--grid-n", fgrid, "grid points per axis")->capture_default_str();
  srf->add_option("--from-manifest", fmanifest, "re-run parameters from a manifest file");

  // angles
  auto* ang = app.add_subcommand("angles", "dump finite-n angle and union-bound tables");
  int an = 100, an1 = 50, an2 = -1, ak = -1, at1 = 10, at2 = 10, as1 = 1, as2 = 1;
  double ap1 = 0.3, ap2 = 0.05, aw2 = 1.0, artol = 1e-8;
  std::string amanifest;
  ang->add_option("--n", an, "signal dimension")->capture_default_str();
  ang->add_option("--n1", an1, "size of class 1")->capture_default_str();
  ang->add_option("--n2", an2, "size of class 2 (default n - n1)");
  ang->add_option("--p1", ap1, "class-1 sparsity")->capture_default_str();
  ang->add_option("--p2", ap2, "class-2 sparsity")->capture_default_str();
  ang->add_option("--w2", aw2, "weight applied to class 2")->capture_default_str();
  ang->add_option("--k", ak, "support size (default round(n1 p1 + n2 p2))");
  ang->add_option("--t1-max", at1, "largest t1")->capture_default_str();
  ang->add_option("--t2-max", at2, "largest t2")->capture_default_str();
  ang->add_option("--t1-step", as1, "t1 stride")->capture_default_str();
  ang->add_option("--t2-step", as2, "t2 stride")->capture_default_str();
  ang->add_option("--rel-tol", artol, "quadrature relative tolerance")->capture_default_str();
  ang->add_option("--from-manifest", amanifest, "re-run parameters from a manifest file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto parse_list = [](const std::string& s) {
    std::vector<double> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
  };

  try {
    fs::create_directories(out_dir);
    fs::path out(out_dir);

    if (rec->parsed()) {
      if (rmanifest.empty())  // a manifest supplies the full parameter set
        for (const char* f : {"--n", "--m", "--n1", "--p1", "--p2"})
          if (rec->count(f) == 0)
            throw std::runtime_error(std::string(f) + " is required (or use --from-manifest)");
      json p{{"n", rn},   {"m", rm},   {"n1", rn1}, {"n2", rn2 < 0 ? rn - rn1 : rn2},
             {"p1", rp1}, {"p2", rp2}, {"w2", rw2}, {"seed", rseed},
             {"amplitude", ramp}, {"tol", rtol}};
      return run_recover(effective_params("recover", rmanifest, p), out);
    }
    if (sim->parsed()) {
      json p;
      if (!smanifest.empty()) {
        p = effective_params("simulate", smanifest, p);
      } else if (!splan.empty()) {
        p = json{{"plan", wl1::load_json(splan)}, {"compare_theory", scompare}, {"plot", splot}};
      } else {
        wl1::ExperimentPlan plan;
        plan.n = sn;
        plan.m = sm;
        plan.n1 = sn1;
        plan.n2 = sn2 < 0 ? sn - sn1 : sn2;
        plan.P2 = sp2;
        plan.trials = strials;
        plan.seed = sseed;
        plan.success_tol = stol;
        plan.amplitude = wl1::amplitude_from_string(samp);
        if (!sp1_range.empty())
          plan.p1_list = parse_range(sp1_range);
        else if (!sp1_list.empty())
          plan.p1_list = parse_list(sp1_list);
        plan.w2_list = parse_list(sw2_list);
        plan.validate();
        p = json{{"plan", plan_to_json(plan)}, {"compare_theory", scompare}, {"plot", splot}};
      }
      return run_simulate(p, out, threads);
    }
    if (thr->parsed()) {
      std::vector<double> w2s =
          !tw2_list.empty() ? parse_list(tw2_list) : parse_range(tw2_range);
      json p{{"delta", tdelta}, {"p2", tp2},   {"gamma1", tg1},
             {"gamma2", tg2 < 0 ? 1.0 - tg1 : tg2}, {"w2_list", w2s}, {"tol", ttol},
             {"grid_n", tgrid}, {"plot", tplot}};
      return run_threshold(effective_params("threshold", tmanifest, p), out);
    }
    if (wgt->parsed()) {
      json p{{"delta", wdelta}, {"p2", wp2},  {"gamma1", wg1},
             {"gamma2", wg2 < 0 ? 1.0 - wg1 : wg2}, {"w_max", wmax},
             {"tol_w", wtolw},  {"inner_tol", winner}, {"grid_n", wgrid}};
      return run_weights(effective_params("weights", wmanifest, p), out);
    }
    if (srf->parsed()) {
      json p{{"delta", fdelta}, {"gamma1", fg1}, {"gamma2", fg2 < 0 ? 1.0 - fg1 : fg2},
             {"p1", fp1},       {"p2", fp2},     {"w", fw},
             {"margin", fmargin}, {"grid_n", fgrid}};
      return run_surface(effective_params("surface", fmanifest, p), out);
    }
    if (ang->parsed()) {
      json p{{"n", an},   {"n1", an1}, {"n2", an2 < 0 ? an - an1 : an2},
             {"p1", ap1}, {"p2", ap2}, {"w2", aw2},
             {"t1_max", at1}, {"t2_max", at2}, {"t1_step", as1},
             {"t2_step", as2}, {"rel_tol", artol}};
      if (ak >= 0) p["k"] = ak;
      return run_angles(effective_params("angles", amanifest, p), out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}
