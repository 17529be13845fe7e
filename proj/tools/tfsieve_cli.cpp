#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tfsieve/error.hpp"
#include "tfsieve/io.hpp"
#include "tfsieve/kernels.hpp"
#include "tfsieve/local_repro.hpp"
#include "tfsieve/poly_multiplex.hpp"
#include "tfsieve/recovery.hpp"
#include "tfsieve/sieve_bounds.hpp"
#include "tfsieve/special_fn.hpp"

using namespace tfsieve;
using io::json;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNoConvergence = 3;

struct GridOptions {
  double step = 1.0 / 16;
  double extent = 6.0;

  PhaseGrid grid() const { return PhaseGrid::centered(extent, step); }
  // At least twice as fine (halving until the Nyquist band covers the grid)
  // and a little wider, so the window support clears the grid edge.
  TimeAxis axis() const {
    double dt = step / 2;
    while (0.5 / dt < extent + 1.0) dt /= 2;
    return TimeAxis::centered(extent + 2.0, dt);
  }
};

struct Options {
  GridOptions grid;
  int r = 0;
  int j = 0;
  std::vector<double> radii;
  double p = 1.0;
  std::string region;
  std::string input;
  std::string out;
  int model_size = HermiteModel::kDefaultSize;
  double tol = 1e-6;
  int max_iter = 20000;
  std::uint64_t seed = 1;
  int threads = 0;
  // invert / synth
  int order_cap = kDefaultInversionOrder;
  std::vector<double> center{0.0, 0.0};
  std::vector<double> coeffs;
};

void emit(const Options& o, const std::string& text) {
  if (o.out.empty())
    std::cout << text;
  else
    io::write_file_atomic(o.out, text);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json complex_array(const std::vector<cplx>& v) {
  json a = json::array();
  for (const cplx& c : v) a.push_back({c.real(), c.imag()});
  return a;
}

json complex_array(const Eigen::VectorXcd& v) { return complex_array(std::vector<cplx>(v.data(), v.data() + v.size())); }

std::vector<cplx> complex_from_json(const json& j) {
  std::vector<cplx> out;
  for (const json& e : j) {
    if (e.is_number())
      out.emplace_back(e.get<double>(), 0.0);
    else if (e.is_array() && e.size() == 2)
      out.emplace_back(e[0].get<double>(), e[1].get<double>());
    else
      throw Error(ErrorCode::InvalidInput, "coefficients must be numbers or [re, im] pairs");
  }
  return out;
}

json load_json(const std::string& path) {
  try {
    return json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
  }
}

// Region given inline in a config, or as a path to a region file.
Region region_from_config(const json& j, const PhaseGrid& grid) {
  if (j.is_string()) return io::load_region(j.get<std::string>(), grid);
  return io::region_from_json(j);
}

void require_radius(double R) {
  if (!(R > 0) || !std::isfinite(R)) throw Error(ErrorCode::DomainError, "radius must be positive");
}

int cmd_constants(const Options& o) {
  if (o.radii.size() != 1) throw Error(ErrorCode::InvalidInput, "constants takes a single --R");
  const double R = o.radii.front();
  require_radius(R);
  const double s = M_PI * R * R;
  json j;
  j["r"] = o.r;
  j["j"] = o.j;
  j["R"] = R;
  j["C_jr"] = c_constant(o.j, o.r, R);
  j["C_r"] = c_constant(o.r, o.r, R);
  j["C_r_closed_form"] = 1.0 - std::exp(-s) * c_closed_poly(o.r)(s);
  j["inversion_constant"] = inversion_constant(o.j, o.r, R);
  std::cout << dump(j);
  if (!o.out.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "d,kernel_abs\n";
    for (int k = 0; k <= 100; ++k) {
      const double d = R * k / 100.0;
      csv << d << "," << kernel_abs(KernelSpec::single(o.r), d) << "\n";
    }
    io::write_file_atomic(o.out, csv.str());
  }
  return 0;
}

int cmd_bound(const Options& o) {
  if (o.region.empty()) throw Error(ErrorCode::InvalidInput, "bound needs --region");
  const PhaseGrid g = o.grid.grid();
  const Region region = io::load_region(o.region, g);
  for (double R : o.radii) require_radius(R);
  const std::vector<double> radii = o.radii.empty() ? default_radius_ladder() : o.radii;
  const SieveCertificate c = best_sieve_bound(region, o.r, radii, g, o.p);
  emit(o, dump(io::certificate_to_json(c, g)));
  return 0;
}

int cmd_recover(const Options& o) {
  if (o.input.empty()) throw Error(ErrorCode::InvalidInput, "recover needs a problem file");
  const json cfg = load_json(o.input);
  const PhaseGrid g = o.grid.grid();
  const TimeAxis ax = o.grid.axis();
  try {
    const std::string mode = cfg.value("mode", "sparse");
    if (mode != "sparse" && mode != "inpaint" && mode != "inpaint_l2")
      throw Error(ErrorCode::InvalidInput, "mode must be sparse, inpaint or inpaint_l2");
    const int r = cfg.value("r", o.r);
    const int size = cfg.value("model_size", o.model_size);
    const Region region = region_from_config(cfg.at("region"), g);
    std::vector<double> radii = cfg.value("radii", std::vector<double>{});
    if (radii.empty()) radii = o.radii.empty() ? default_radius_ladder() : o.radii;
    const RecoveryCertificate cert = certify(region, r, radii, g);
    const HermiteModel model(r, size, g, ax);

    std::optional<Eigen::VectorXcd> truth;
    TFField data(g);
    double epsilon = 0.0;
    if (cfg.contains("data")) {
      data = io::load_tffield(cfg.at("data").get<std::string>());
    } else {
      const std::vector<cplx> c = complex_from_json(cfg.at("truth"));
      if (static_cast<int>(c.size()) > model.size()) throw Error(ErrorCode::InvalidInput, "truth exceeds the model size");
      Eigen::VectorXcd t = Eigen::VectorXcd::Zero(model.size());
      for (std::size_t k = 0; k < c.size(); ++k) t(static_cast<Eigen::Index>(k)) = c[k];
      truth = t;
      data = model.synthesize(t);
      std::mt19937_64 rng(o.seed);
      std::normal_distribution<double> nd;
      const double noise = cfg.value("noise", 0.0), corruption = cfg.value("corruption", 0.0);
      TFField N(g);
      for (cplx& v : N.values()) v = noise * cplx(nd(rng), nd(rng));
      epsilon = lp_norm(N, 1.0);
      data += N;
      const Mask m = rasterize(region, g);
      for (std::size_t n = 0; n < data.values().size(); ++n) {
        if (!m.cells()[n]) continue;
        if (mode == "sparse")
          data.values()[n] += corruption * cplx(nd(rng), nd(rng));
        else
          data.values()[n] = 0.0;
      }
    }

    SolverConfig sc;
    sc.tol = o.tol;
    sc.max_iter = o.max_iter;
    const SolveResult res = mode == "sparse"    ? solve_l1_sparse(data, model, sc)
                            : mode == "inpaint" ? solve_inpaint_l1(data, region, model, sc)
                                                : solve_inpaint_l2(data, region, model);
    json out;
    out["mode"] = mode;
    out["certificate"] = {{"verdict", verdict_name(cert.verdict)},
                          {"r", cert.order},
                          {"R", cert.radius},
                          {"A_r", cert.a_density},
                          {"C_r", cert.c_constant},
                          {"stability_factor", std::isfinite(cert.stability_factor) ? json(cert.stability_factor) : json()}};
    out["converged"] = res.converged;
    out["iterations"] = res.iterations;
    out["objective"] = res.objective;
    out["coefficients"] = complex_array(res.coefficients);
    if (truth) {
      out["max_coefficient_error"] = (res.coefficients - *truth).cwiseAbs().maxCoeff();
      out["l1_error"] = lp_norm(model.synthesize(res.coefficients - *truth), 1.0);
      out["epsilon"] = epsilon;
      if (std::isfinite(cert.stability_factor)) out["stability_bound"] = cert.stability_bound(epsilon);
    }
    emit(o, dump(out));
    return res.converged ? 0 : kExitNoConvergence;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("problem file: ") + e.what());
  }
}

int cmd_synth(const Options& o) {
  if (o.out.empty()) throw Error(ErrorCode::InvalidInput, "synth needs --out");
  if (o.coeffs.empty()) throw Error(ErrorCode::InvalidInput, "synth needs --coeffs");
  if (o.center.size() != 2) throw Error(ErrorCode::InvalidInput, "--center takes x,xi");
  std::vector<cplx> c(o.coeffs.begin(), o.coeffs.end());
  const TimeAxis ax = o.grid.axis();
  const Signal f = shifted_hermite_combination(c, {o.center[0], o.center[1]}, ax);
  io::save_tffield(o.out, stft(f, hermite_signal(o.r, ax), o.grid.grid()));
  return 0;
}

int cmd_invert(const Options& o) {
  if (o.input.empty()) throw Error(ErrorCode::InvalidInput, "invert needs a field file");
  if (o.radii.size() != 1) throw Error(ErrorCode::InvalidInput, "invert takes a single --R");
  if (o.center.size() != 2) throw Error(ErrorCode::InvalidInput, "--center takes x,xi");
  require_radius(o.radii.front());
  const TFField F = io::load_tffield(o.input);
  const DiscPatch patch = DiscPatch::extract(F, {o.center[0], o.center[1]}, o.radii.front());
  const LocalInversion inv = local_invert(patch, o.r, o.order_cap);
  json out;
  out["center"] = o.center;
  out["R"] = patch.radius;
  out["r"] = o.r;
  out["coefficients"] = complex_array(inv.coefficients);
  json flagged = json::array();
  for (std::size_t k = 0; k < inv.flagged.size(); ++k)
    if (inv.flagged[k]) flagged.push_back(k);
  out["flagged"] = flagged;
  out["conditioning"] = inv.conditioning;
  emit(o, dump(out));
  return 0;
}

int cmd_decouple(const Options& o) {
  if (o.input.empty()) throw Error(ErrorCode::InvalidInput, "decouple needs a config file");
  const json cfg = load_json(o.input);
  const PhaseGrid g = o.grid.grid();
  const TimeAxis ax = o.grid.axis();
  try {
    std::vector<Region> parts;
    for (const json& c : cfg.at("components")) parts.push_back(region_from_config(c, g));
    const std::vector<double> seps = cfg.at("separations").get<std::vector<double>>();
    const int r = cfg.value("r", o.r);
    const int size = cfg.value("model_size", o.model_size);
    const auto rows = decoupling_experiment(parts, seps, hermite_signal(r, ax), g, size);
    std::ostringstream csv;
    csv.precision(17);
    csv << "separation,combined,max_component,gap,tail_mass,converged\n";
    bool ok = true;
    for (const DecouplingRow& row : rows) {
      csv << row.separation << "," << row.combined << "," << row.max_component << "," << row.gap << ","
          << row.tail_mass << "," << (row.converged ? 1 : 0) << "\n";
      ok = ok && row.converged;
    }
    emit(o, csv.str());
    return ok ? 0 : kExitNoConvergence;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("decouple config: ") + e.what());
  }
}

int cmd_heatmap(const Options& o) {
  if (o.input.empty()) throw Error(ErrorCode::InvalidInput, "heatmap needs a field file");
  if (o.out.empty()) throw Error(ErrorCode::InvalidInput, "heatmap needs --out");
  io::write_file_atomic(o.out, io::heatmap_pgm(io::load_tffield(o.input)));
  return 0;
}

int thread_count(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("TFSIEVE_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidInput, "TFSIEVE_THREADS must be a positive integer");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-frequency sieve bounds, local reproduction and recovery"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--grid-step", o.grid.step, "phase-space grid step")->check(CLI::PositiveNumber);
  app.add_option("--grid-extent", o.grid.extent, "grid half width")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--threads", o.threads, "worker cap (TFSIEVE_THREADS otherwise)")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "output file (stdout when omitted)");

  auto* constants = app.add_subcommand("constants", "C_{j,r}(R) and the kernel profile");
  constants->add_option("--r", o.r)->required()->check(CLI::NonNegativeNumber);
  constants->add_option("--j", o.j)->check(CLI::NonNegativeNumber);
  constants->add_option("--R", o.radii)->required()->expected(1);
  constants->add_option("--out", o.out, "kernel profile CSV");

  auto* bound = app.add_subcommand("bound", "best sieve certificate for a region");
  bound->add_option("--region", o.region)->required();
  bound->add_option("--r", o.r)->check(CLI::NonNegativeNumber);
  bound->add_option("--R", o.radii, "candidate radii (default ladder)")->delimiter(',');
  bound->add_option("--p", o.p)->check(CLI::Range(1.0, 1e6));
  bound->add_option("--out", o.out);

  auto* recover = app.add_subcommand("recover", "sparse-noise or inpainting recovery");
  recover->add_option("problem", o.input, "problem JSON")->required();
  recover->add_option("--r", o.r)->check(CLI::NonNegativeNumber);
  recover->add_option("--R", o.radii, "certificate radii")->delimiter(',');
  recover->add_option("--model-size", o.model_size)->check(CLI::NonNegativeNumber);
  recover->add_option("--tol", o.tol)->check(CLI::PositiveNumber);
  recover->add_option("--max-iter", o.max_iter)->check(CLI::PositiveNumber);
  recover->add_option("--out", o.out);

  auto* synth = app.add_subcommand("synth", "STFT of a shifted Hermite combination");
  synth->add_option("--coeffs", o.coeffs, "real Hermite coefficients")->required()->delimiter(',');
  synth->add_option("--center", o.center, "x,xi")->delimiter(',');
  synth->add_option("--r", o.r)->check(CLI::NonNegativeNumber);
  synth->add_option("--out", o.out)->required();

  auto* invert = app.add_subcommand("invert", "local Hermite coefficients from one disc patch");
  invert->add_option("field", o.input, "TFField file (.csv or binary)")->required();
  invert->add_option("--r", o.r)->check(CLI::NonNegativeNumber);
  invert->add_option("--J", o.order_cap)->check(CLI::NonNegativeNumber);
  invert->add_option("--R", o.radii)->required()->expected(1);
  invert->add_option("--center", o.center, "x,xi")->delimiter(',');
  invert->add_option("--out", o.out);

  auto* decouple = app.add_subcommand("decouple", "concentration of separated components");
  decouple->add_option("config", o.input, "experiment JSON")->required();
  decouple->add_option("--r", o.r)->check(CLI::NonNegativeNumber);
  decouple->add_option("--model-size", o.model_size)->check(CLI::NonNegativeNumber);
  decouple->add_option("--out", o.out);

  auto* heatmap = app.add_subcommand("heatmap", "PGM of |F|");
  heatmap->add_option("field", o.input)->required();
  heatmap->add_option("--out", o.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (const int n = thread_count(o.threads); n > 0) kernels::set_threads(n);
    if (*constants) return cmd_constants(o);
    if (*bound) return cmd_bound(o);
    if (*recover) return cmd_recover(o);
    if (*synth) return cmd_synth(o);
    if (*invert) return cmd_invert(o);
    if (*decouple) return cmd_decouple(o);
    if (*heatmap) return cmd_heatmap(o);
  } catch (const Error& e) {
    std::cerr << "tfsieve: " << e.what() << "\n";
    return e.code() == ErrorCode::Io ? kExitIo : kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "tfsieve: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
