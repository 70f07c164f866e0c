#include "tractlab/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tractlab/errors.hpp"
#include "tractlab/io.hpp"
#include "tractlab/odeorder.hpp"
#include "tractlab/wvcheck.hpp"

namespace tractlab::cli {

namespace {

using nlohmann::ordered_json;

int exitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::TractNotFound:
    case ErrorCode::SeedBelowThreshold:
    case ErrorCode::CircleMissesTract:
      return 3;
    case ErrorCode::ImageEscapesWindow:
    case ErrorCode::NotExpanding:
    case ErrorCode::ExpansionTooWeak:
    case ErrorCode::OutOfRange:
    case ErrorCode::WindowTooCoarse:
    case ErrorCode::OutsideWindow:
      return 4;
    case ErrorCode::ParseError:
    case ErrorCode::EmptyEquation:
    case ErrorCode::InsufficientTerms:
    case ErrorCode::NoKappaCandidates:
    case ErrorCode::UnknownModel:
      return 5;
    default:
      return 6;
  }
}

std::string g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Window parseWindow(const std::string& windowStr, const std::string& resStr) {
  Window win;
  if (std::sscanf(windowStr.c_str(), "%lf,%lf,%lf,%lf", &win.rect.reMin,
                  &win.rect.reMax, &win.rect.imMin, &win.rect.imMax) != 4)
    throw CLI::ValidationError("--window expects a,b,c,d");
  if (std::sscanf(resStr.c_str(), "%dx%d", &win.width, &win.height) != 2)
    throw CLI::ValidationError("--res expects WxH");
  return win;
}

Complex parseComplexFlag(const std::string& s) {
  double re = 0, im = 0;
  int n = std::sscanf(s.c_str(), "%lf,%lf", &re, &im);
  if (n < 1) throw CLI::ValidationError("expected re[,im]");
  return Complex(re, im);
}

std::string composeModelSelector(const std::string& model,
                                 const std::string& lambda) {
  if (lambda.empty()) return model;
  if (model.find(':') != std::string::npos) return model;
  return model + ":lambda=" + lambda;
}

std::string timestampUtc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void writeText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::PreconditionViolated,
                "cannot open " + path.string());
  out << text;
}

// The manifest is the only output carrying a timestamp; data files must be
// byte-identical across reruns.
void writeManifest(const std::filesystem::path& dir,
                   const std::string& command, const ordered_json& config) {
  ordered_json manifest{{"command", command},
                        {"generated_at", timestampUtc()},
                        {"config", config}};
  writeText(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::filesystem::path ensureOutDir(const std::string& outDir) {
  std::filesystem::path dir(outDir);
  std::filesystem::create_directories(dir);
  return dir;
}

Complex autoSeed(const FunctionModel& model, double R, double rmax) {
  double logR = std::log(R);
  // scan downward: the largest super-threshold point sits in the main right
  // tract rather than in a small neighborhood of a pole
  for (int k = 255; k >= 0; --k) {
    double s = std::exp(std::log(1e-2) +
                        (std::log(0.98 * rmax) - std::log(1e-2)) * k / 255.0);
    ComplexValue v = model.eval(Complex(s, 0.0));
    if (v.isPole()) continue;
    if (v.logAbs() > logR) return Complex(s, 0.0);
  }
  throw Error(ErrorCode::TractNotFound,
              "no super-threshold seed found on the positive real axis");
}

std::string profileCsv(const GrowthProfile& profile) {
  std::string csv = "r,B,a,re_zr,im_zr,exceptional\n";
  for (const GrowthSample& s : profile.samples()) {
    csv += g(s.r) + "," + g(s.B) + ",";
    if (s.a) csv += g(*s.a);
    csv += "," + g(s.zr.real()) + "," + g(s.zr.imag()) + "," +
           (s.exceptional ? "1" : "0") + "\n";
  }
  return csv;
}

ordered_json fixedPointJson(const FixedPointInfo& fp) {
  return ordered_json{{"re", fp.location.real()},
                      {"im", fp.location.imag()},
                      {"multiplier_re", fp.multiplier.real()},
                      {"multiplier_im", fp.multiplier.imag()},
                      {"type", fixedPointTypeName(fp.type)}};
}

// ---------------------------------------------------------------------------
// render
// ---------------------------------------------------------------------------

struct RenderArgs {
  std::string model = "exp";
  std::string lambda;
  std::string preset;
  std::string windowStr = "-2,2,-2,2";
  std::string resStr = "300x400";
  bool resGiven = false;
  std::string paletteName = "fig1";
  std::string seedStr;
  std::string orbitStr;  // dump the orbit record of this point
  double R = 20.0;
  double rho = 0.0;      // adds a fast-escape report to the orbit dump
  int depth = 3;
  int maxIter = 200;
  double escapeLogBound = 1e4;
  int workers = 0;
  std::string outDir = ".";
};

int cmdRender(const RenderArgs& args) {
  std::string selector = composeModelSelector(args.model, args.lambda);
  Window window = parseWindow(args.windowStr, args.resStr);
  double R = args.R;
  std::string paletteName = args.paletteName;
  std::optional<Complex> seed;
  if (!args.seedStr.empty()) seed = parseComplexFlag(args.seedStr);

  if (!args.preset.empty()) {
    auto p = findPreset(args.preset);
    if (!p) throw Error(ErrorCode::UnknownModel, "unknown preset " + args.preset);
    selector = p->modelSelector;
    window.rect = p->window.rect;
    if (!args.resGiven) {
      window.width = p->window.width;
      window.height = p->window.height;
    }
    R = p->R;
    seed = p->seed;
    paletteName = p->palette;
  }

  FunctionModel model = makeModel(selector);
  if (!seed) seed = autoSeed(model, R, std::abs(window.rect.reMax));
  TractDescriptor tract = [&] {
    try {
      return locateTract(model, R, *seed, window, args.workers);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SeedBelowThreshold)
        throw Error(ErrorCode::TractNotFound,
                    std::string("tract not found: ") + e.what());
      throw;
    }
  }();

  std::vector<FixedPointInfo> fps = findFixedPoints(model, window.rect, 24);

  RenderSpec spec;
  spec.window = window;
  spec.iteration.maxIter = args.maxIter;
  spec.iteration.escapeLogBound = args.escapeLogBound;
  spec.palette = paletteByName(paletteName);
  RenderResult result = render(model, spec, tract, fps, args.workers);

  auto dir = ensureOutDir(args.outDir);
  writePpm((dir / "image.ppm").string(), window.width, window.height,
           result.rgb);

  ordered_json hist;
  for (int c = 0; c < kOrbitClassCount; ++c)
    hist[orbitClassName(static_cast<OrbitClass>(c))] = result.histogram[c];
  ordered_json palette;
  for (int c = 0; c < kOrbitClassCount; ++c)
    palette[orbitClassName(static_cast<OrbitClass>(c))] = {
        spec.palette[c][0], spec.palette[c][1], spec.palette[c][2]};
  ordered_json fpJson = ordered_json::array();
  for (const auto& fp : fps) fpJson.push_back(fixedPointJson(fp));
  ordered_json sidecar{{"model", selector},
                       {"window", windowToJson(window)},
                       {"R", R},
                       {"seed", {(*seed).real(), (*seed).imag()}},
                       {"max_iter", args.maxIter},
                       {"escape_log_bound", args.escapeLogBound},
                       {"palette", palette},
                       {"histogram", hist},
                       {"fixed_points", fpJson}};
  writeText(dir / "image.json", sidecar.dump(2) + "\n");

  if (!args.orbitStr.empty()) {
    Complex z0 = parseComplexFlag(args.orbitStr);
    OrbitRecord rec = iterate(model, z0, &tract, fps, spec.iteration);
    ordered_json iters = ordered_json::array();
    for (const ComplexValue& v : rec.iterates) {
      ordered_json item{{"log_abs", v.logAbs()}, {"phase", v.phase()}};
      item["kind"] = v.isFinite() ? "finite"
                                  : (v.isPole() ? "pole" : "log_polar");
      if (v.isFinite()) {
        item["re"] = v.value().real();
        item["im"] = v.value().imag();
      }
      iters.push_back(item);
    }
    ordered_json orbit{{"z0", {z0.real(), z0.imag()}},
                       {"classification",
                        orbitClassName(rec.classification)},
                       {"steps_used", rec.stepsUsed},
                       {"entry_index", rec.entryIndex},
                       {"prepole_index", rec.prepoleIndex},
                       {"basin_fixed_point", rec.basinFixedPoint},
                       {"iterates", iters}};
    if (args.rho > 0.0) {
      FastEscapeReport fe =
          fastEscapeTest(model, z0, tract, args.rho, args.depth);
      orbit["fast_escape"] = ordered_json{{"rho", args.rho},
                                          {"depth_checked", fe.depthChecked},
                                          {"passed", fe.passed},
                                          {"fail_index", fe.failIndex}};
    }
    writeText(dir / "orbit.json", orbit.dump(2) + "\n");
  }

  ordered_json config{{"model", selector},
                      {"preset", args.preset},
                      {"window", windowToJson(window)},
                      {"R", R},
                      {"rho", args.rho},
                      {"palette", paletteName},
                      {"max_iter", args.maxIter},
                      {"escape_log_bound", args.escapeLogBound},
                      {"workers", args.workers}};
  writeManifest(dir, "render", config);
  std::cout << (dir / "image.ppm").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// growth
// ---------------------------------------------------------------------------

struct GrowthArgs {
  std::string model = "exp";
  std::string lambda;
  double R = 1.0;
  double rmin = 5.0;
  double rmax = 100.0;
  double logStep = 0.02;
  std::string windowStr;
  std::string resStr = "800x800";
  std::string seedStr;
  double alpha = 0.6;
  double beta = 0.75;
  double epsilon = 0.1;
  int workers = 0;
  std::string outDir = ".";
};

int cmdGrowth(const GrowthArgs& args) {
  std::string selector = composeModelSelector(args.model, args.lambda);
  FunctionModel model = makeModel(selector);

  Window window;
  if (args.windowStr.empty()) {
    double m = 1.05 * args.rmax;
    window.rect = Rect{-m, m, -m, m};
    if (std::sscanf(args.resStr.c_str(), "%dx%d", &window.width,
                    &window.height) != 2)
      throw CLI::ValidationError("--res expects WxH");
  } else {
    window = parseWindow(args.windowStr, args.resStr);
  }

  Complex seed = args.seedStr.empty()
                     ? autoSeed(model, args.R, args.rmax)
                     : parseComplexFlag(args.seedStr);
  auto tract = std::make_shared<const TractDescriptor>(
      locateTract(model, args.R, seed, window, args.workers));
  GrowthProfile profile =
      buildProfile(tract, args.rmin, args.rmax, args.logStep);

  ordered_json summary{{"model", selector},
                       {"R", args.R},
                       {"rmin", args.rmin},
                       {"rmax", args.rmax},
                       {"samples", profile.samples().size()}};

  if (profile.samples().size() >= 3) {
    std::vector<double> flagged =
        scanExceptional(profile, args.alpha, args.beta);
    summary["exceptional_radii"] = flagged;
    summary["exceptional_alpha"] = args.alpha;
    summary["exceptional_beta"] = args.beta;
  } else {
    summary["exceptional_radii"] = nullptr;
  }

  ABoundReport ab = checkABound(profile, args.epsilon);
  summary["a_bound"] = ordered_json{{"epsilon", args.epsilon},
                                    {"fraction", ab.fraction},
                                    {"violating_radii", ab.violatingRadii}};
  try {
    SqrtGrowthReport sg = checkSqrtGrowth(profile);
    summary["sqrt_growth"] = ordered_json{{"c", sg.c}, {"holds", sg.holds}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PreconditionViolated) throw;
    summary["sqrt_growth"] = nullptr;  // range spans less than a decade
  }
  summary["kappa_top_decade"] = profile.fittedKappaTopDecade();

  auto dir = ensureOutDir(args.outDir);
  writeText(dir / "profile.csv", profileCsv(profile));
  ordered_json profJson = ordered_json::array();
  for (const GrowthSample& s : profile.samples()) {
    ordered_json row{{"r", s.r}, {"B", s.B}};
    if (s.a)
      row["a"] = *s.a;
    else
      row["a"] = nullptr;
    row["zr"] = {s.zr.real(), s.zr.imag()};
    row["exceptional"] = s.exceptional;
    profJson.push_back(row);
  }
  writeText(dir / "profile.json", profJson.dump(2) + "\n");
  writeText(dir / "summary.json", summary.dump(2) + "\n");

  ordered_json config{{"model", selector},   {"R", args.R},
                      {"rmin", args.rmin},   {"rmax", args.rmax},
                      {"log_step", args.logStep},
                      {"window", windowToJson(window)},
                      {"seed", {seed.real(), seed.imag()}},
                      {"alpha", args.alpha}, {"beta", args.beta},
                      {"epsilon", args.epsilon},
                      {"workers", args.workers}};
  writeManifest(dir, "growth", config);
  std::cout << (dir / "profile.csv").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// wv-check
// ---------------------------------------------------------------------------

struct WvArgs {
  std::string model = "exp";
  std::string lambda;
  double R = 1.0;
  double r = 0.0;
  double rmin = 0.0;
  double rmax = 0.0;
  double tau = 0.75;
  int samples = 256;
  std::string windowStr;
  std::string resStr = "800x800";
  std::string seedStr;
  bool covering = false;
  double beta = 4.0;
  double gamma = 3.5;
  double forcedAlpha = 0.0;
  int workers = 0;
  std::string outDir = ".";
};

ordered_json wvReportJson(const WVReport& rep) {
  return ordered_json{{"r", rep.r},
                      {"tau", rep.tau},
                      {"a", rep.a},
                      {"zr", {rep.zr.real(), rep.zr.imag()}},
                      {"disc_radius", rep.discRadius},
                      {"disc_in_tract", rep.discInTract},
                      {"rel_err_value", rep.relErrValue},
                      {"rel_err_modulus", rep.relErrModulus},
                      {"rel_err_derivative", rep.relErrDerivative},
                      {"samples", rep.samples},
                      {"branch_tracking_failed", rep.branchTrackingFailed}};
}

int cmdWvCheck(const WvArgs& args) {
  std::string selector = composeModelSelector(args.model, args.lambda);
  FunctionModel model = makeModel(selector);

  bool sweep = args.rmax > 0.0;
  double top = sweep ? args.rmax : args.r;
  if (top <= 0.0)
    throw Error(ErrorCode::PreconditionViolated, "need --r or --rmin/--rmax");

  Window window;
  if (args.windowStr.empty()) {
    double m = 1.3 * top;
    window.rect = Rect{-m, m, -m, m};
    if (std::sscanf(args.resStr.c_str(), "%dx%d", &window.width,
                    &window.height) != 2)
      throw CLI::ValidationError("--res expects WxH");
  } else {
    window = parseWindow(args.windowStr, args.resStr);
  }

  Complex seed = args.seedStr.empty() ? autoSeed(model, args.R, top)
                                      : parseComplexFlag(args.seedStr);
  auto tract = std::make_shared<const TractDescriptor>(
      locateTract(model, args.R, seed, window, args.workers));

  double proLo = sweep ? args.rmin / 1.3 : args.r / 2.0;
  double proHi = sweep ? args.rmax * 1.2 : args.r * 2.0;
  GrowthProfile profile = buildProfile(tract, proLo, proHi);

  auto dir = ensureOutDir(args.outDir);
  ordered_json out{{"model", selector}, {"R", args.R}, {"tau", args.tau}};

  if (args.covering) {
    std::optional<double> forced;
    if (args.forcedAlpha > 0.0) forced = args.forcedAlpha;
    CoveringReport rep =
        coveringCheck(*tract, profile, args.r, args.beta, args.gamma, forced);
    ordered_json failures = ordered_json::array();
    for (Complex f : rep.failures) failures.push_back({f.real(), f.imag()});
    out["covering"] = ordered_json{{"r", args.r},
                                   {"beta", args.beta},
                                   {"gamma", args.gamma},
                                   {"alpha_used", rep.alphaUsed},
                                   {"covered", rep.covered},
                                   {"failures", failures}};
  } else if (sweep) {
    auto entries =
        exceptionalSweep(*tract, profile, args.rmin, args.rmax, args.tau,
                         args.samples);
    std::string csv =
        "r,a,disc_radius,disc_in_tract,rel_err_value,rel_err_modulus,"
        "rel_err_derivative,flagged\n";
    ordered_json list = ordered_json::array();
    for (const auto& e : entries) {
      csv += g(e.r) + "," + g(e.report.a) + "," + g(e.report.discRadius) +
             "," + (e.report.discInTract ? "1" : "0") + "," +
             g(e.report.relErrValue) + "," + g(e.report.relErrModulus) + "," +
             g(e.report.relErrDerivative) + "," + (e.flagged ? "1" : "0") +
             "\n";
      ordered_json ej = wvReportJson(e.report);
      ej["flagged"] = e.flagged;
      list.push_back(ej);
    }
    writeText(dir / "sweep.csv", csv);
    out["sweep"] = list;
  } else {
    WVReport rep = wvVerify(*tract, profile, args.r, args.tau, args.samples);
    out["report"] = wvReportJson(rep);
  }

  writeText(dir / "wvcheck.json", out.dump(2) + "\n");
  ordered_json config{{"model", selector},
                      {"R", args.R},
                      {"r", args.r},
                      {"rmin", args.rmin},
                      {"rmax", args.rmax},
                      {"tau", args.tau},
                      {"samples", args.samples},
                      {"covering", args.covering},
                      {"workers", args.workers}};
  writeManifest(dir, "wv-check", config);
  std::cout << (dir / "wvcheck.json").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// ode-bound
// ---------------------------------------------------------------------------

struct OdeArgs {
  std::string equation;
  std::string monomialsJson;
  std::string verifyWith;
  double R = 1.0;
  double rmin = 5.0;
  double rmax = 100.0;
  std::string outDir = ".";
};

std::vector<DiffMonomial> monomialsFromJson(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::vector<DiffMonomial> monomials;
  for (const auto& item : j) {
    DiffMonomial m;
    for (const auto& v : item.at("t")) m.t.push_back(v.get<int>());
    while (!m.t.empty() && m.t.back() == 0) m.t.pop_back();
    Polynomial poly;
    int power = 0;
    for (const auto& c : item.at("coeff")) {
      poly = poly + Polynomial::monomialZ(
                        power, GaussianRational{Rational(c.get<long>()),
                                                Rational(0)});
      ++power;
    }
    m.coeff = poly;
    if (!m.coeff.isZero()) monomials.push_back(std::move(m));
  }
  if (monomials.empty())
    throw Error(ErrorCode::EmptyEquation, "no nonzero monomials in JSON");
  return monomials;
}

int cmdOdeBound(const OdeArgs& args) {
  std::vector<DiffMonomial> monomials =
      !args.monomialsJson.empty() ? monomialsFromJson(args.monomialsJson)
                                  : parseEquation(args.equation);
  OrderBoundResult res = orderBound(monomials);

  ordered_json monoJson = ordered_json::array();
  for (const auto& m : monomials)
    monoJson.push_back(ordered_json{{"t", m.t},
                                    {"coeff", m.coeff.str()},
                                    {"degree", m.degree()},
                                    {"weight", m.weight()}});
  ordered_json out{{"equation", args.equation}, {"monomials", monoJson}};
  out["S"] = res.S;
  out["Lambda"] = res.Lambda;
  switch (res.verdict) {
    case OrderVerdict::Bound:
      out["verdict"] = "Bound";
      out["bound"] = rationalStr(res.bound);
      out["bound_value"] = static_cast<double>(res.bound);
      break;
    case OrderVerdict::SingletonS:
      out["verdict"] = "SingletonS";
      out["note"] =
          "no transcendental meromorphic solution with a direct singularity "
          "over infinity";
      break;
    case OrderVerdict::HypothesisFails:
      out["verdict"] = "HypothesisFails";
      out["failed_lambdas"] = res.failedLambdas;
      break;
  }
  ordered_json kappas = ordered_json::array();
  ordered_json kappaValues = ordered_json::array();
  for (const Rational& k : res.kappaCandidates) {
    kappas.push_back(rationalStr(k));
    kappaValues.push_back(static_cast<double>(k));
  }
  out["kappaCandidates"] = kappas;
  out["kappa_values"] = kappaValues;
  out["zeroWeightPolicy"] = res.zeroWeightPolicy;

  if (!args.verifyWith.empty()) {
    const auto& registry = solvingModelRegistry();
    auto it = registry.find(canonicalEquation(monomials));
    if (it == registry.end() || it->second != args.verifyWith)
      throw Error(ErrorCode::PreconditionViolated,
                  "no registered solving model links this equation to " +
                      args.verifyWith);
    FunctionModel model = makeModel(args.verifyWith);
    Window window;
    double m = 1.05 * args.rmax;
    window.rect = Rect{-m, m, -m, m};
    window.width = window.height = 800;
    Complex seed = autoSeed(model, args.R, args.rmax);
    auto tract = std::make_shared<const TractDescriptor>(
        locateTract(model, args.R, seed, window));
    GrowthProfile profile = buildProfile(tract, args.rmin, args.rmax);
    GrowthFitReport fit = verifyAgainstGrowth(res, profile);
    out["growth_fit"] = ordered_json{
        {"model", args.verifyWith},
        {"slope", fit.slope},
        {"nearest_kappa", rationalStr(fit.nearestKappa)},
        {"abs_diff", fit.absDiff}};
  }

  auto dir = ensureOutDir(args.outDir);
  writeText(dir / "ode_bound.json", out.dump(2) + "\n");
  ordered_json config{{"equation", args.equation},
                      {"verify_with", args.verifyWith},
                      {"R", args.R},
                      {"rmin", args.rmin},
                      {"rmax", args.rmax}};
  writeManifest(dir, "ode-bound", config);
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// outer-seq
// ---------------------------------------------------------------------------

struct OuterArgs {
  std::string model = "exp";
  std::string lambda;
  double R = 1.0;
  double g0Radius = 10.0;
  int steps = 2;
  std::string windowStr;
  std::string resStr = "256x256";
  std::string seedStr;
  int targetRes = 512;
  std::string outDir = ".";
};

int cmdOuterSeq(const OuterArgs& args) {
  std::string selector = composeModelSelector(args.model, args.lambda);
  FunctionModel model = makeModel(selector);

  Window window;
  if (args.windowStr.empty()) {
    double m = std::max(3.2 * args.g0Radius, 32.0);
    window.rect = Rect{-m, m, -m, m};
    if (std::sscanf(args.resStr.c_str(), "%dx%d", &window.width,
                    &window.height) != 2)
      throw CLI::ValidationError("--res expects WxH");
  } else {
    window = parseWindow(args.windowStr, args.resStr);
  }
  Complex seed = args.seedStr.empty()
                     ? autoSeed(model, args.R, window.rect.reMax)
                     : parseComplexFlag(args.seedStr);
  TractDescriptor tract = locateTract(model, args.R, seed, window);

  RegionRaster region = discRegion(window, args.g0Radius);
  ordered_json stepJson = ordered_json::array();
  int completed = 0;
  std::string failure;
  for (int s = 0; s < args.steps; ++s) {
    // size the target window from the largest log-modulus over B_n; sample
    // on the tract raster since the region window can be far coarser
    double maxLog = -std::numeric_limits<double>::infinity();
    const Window& tw = tract.window();
    for (int j = 0; j < tw.height; ++j)
      for (int i = 0; i < tw.width; ++i) {
        if (tract.raster().labelAt(i, j) != 1) continue;
        Complex z = tw.pixelCenter(i, j);
        auto rp = region.window.pixelOf(z);
        if (!rp || region.labelAt(rp->first, rp->second) == 0) continue;
        if (!tract.contains(z)) continue;
        maxLog = std::max(maxLog, model.eval(z).logAbs());
      }
    if (!std::isfinite(maxLog)) {
      failure = "no in-tract pixels left in the region";
      break;
    }
    if (maxLog > 706.0) {
      failure = "forward image exceeds the representable range";
      break;
    }
    double L = std::exp(maxLog + 2.0);
    Window target;
    target.rect = Rect{-L, L, -L, L};
    target.width = target.height = args.targetRes;
    try {
      OuterStepResult step = outerSequenceStep(model, tract, region, target);
      stepJson.push_back(ordered_json{{"step", s + 1},
                                      {"r_current", step.rCurrent},
                                      {"r_next", step.rNext},
                                      {"target_half_width", L}});
      region = std::move(step.next);
      ++completed;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ImageEscapesWindow) throw;
      failure = e.what();
      break;
    }
  }

  ordered_json out{{"model", selector},
                   {"R", args.R},
                   {"g0_radius", args.g0Radius},
                   {"steps_requested", args.steps},
                   {"steps_completed", completed},
                   {"steps", stepJson}};
  if (!failure.empty()) out["stopped"] = failure;
  auto dir = ensureOutDir(args.outDir);
  writeText(dir / "outer_seq.json", out.dump(2) + "\n");
  ordered_json config{{"model", selector},
                      {"R", args.R},
                      {"g0_radius", args.g0Radius},
                      {"steps", args.steps},
                      {"target_res", args.targetRes}};
  writeManifest(dir, "outer-seq", config);
  std::cout << out.dump(2) << "\n";
  if (completed < args.steps && !failure.empty() &&
      failure.find("representable") == std::string::npos &&
      failure.find("escapes") == std::string::npos &&
      failure.find("leaves") == std::string::npos)
    return 4;
  return 0;
}

// ---------------------------------------------------------------------------
// tract-info
// ---------------------------------------------------------------------------

struct TractInfoArgs {
  std::string model = "exp";
  std::string lambda;
  double R = 1.0;
  std::string seedStr = "3";
  std::string windowStr = "-5,5,-5,5";
  std::string resStr = "400x400";
  bool exportPgm = false;
  bool exportJson = false;
  int workers = 0;
  std::string outDir = ".";
};

int cmdTractInfo(const TractInfoArgs& args) {
  std::string selector = composeModelSelector(args.model, args.lambda);
  FunctionModel model = makeModel(selector);
  Window window = parseWindow(args.windowStr, args.resStr);
  Complex seed = parseComplexFlag(args.seedStr);
  TractDescriptor tract = locateTract(model, args.R, seed, window, args.workers);

  const char* direct = tract.direct() == Directness::DirectCandidate
                           ? "DirectCandidate"
                           : (tract.direct() == Directness::ContainsPole
                                  ? "ContainsPole"
                                  : "Unknown");
  ordered_json sectors = ordered_json::array();
  for (auto [lo, hi] : tract.farFieldSectors()) sectors.push_back({lo, hi});
  ordered_json out{{"model", selector},
                   {"R", args.R},
                   {"seed", {seed.real(), seed.imag()}},
                   {"direct", direct},
                   {"complement_bounded_window_relative",
                    tract.complementBounded()},
                   {"logarithmic_heuristic", tract.logarithmicHeuristic()},
                   {"area_fraction", tract.areaFraction()},
                   {"far_field_sectors", sectors},
                   {"poles_in_window",
                    model.polesIn(window.rect).size()}};

  auto dir = ensureOutDir(args.outDir);
  writeText(dir / "tract.json", out.dump(2) + "\n");
  if (args.exportPgm) writePgm((dir / "tract.pgm").string(), tract.raster());
  if (args.exportJson)
    writeText(dir / "tract_raster.json",
              rasterToJson(tract.raster()).dump() + "\n");
  ordered_json config{{"model", selector},
                      {"R", args.R},
                      {"seed", args.seedStr},
                      {"window", windowToJson(window)}};
  writeManifest(dir, "tract-info", config);
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = [] {
    std::vector<Preset> t;
    // odd height puts the middle pixel row exactly on the real axis, where
    // the models' invariant real dynamics live
    Window fig1{Rect{-10, 8, -12, 12}, 300, 401};
    Window fig2{Rect{-5, 10, -10, 10}, 300, 401};
    t.push_back({"fig1-left", "example1:lambda=0.5", fig1, 20.0,
                 Complex(6, 0), "fig1"});
    t.push_back({"fig1-mid", "example1:lambda=1", fig1, 20.0, Complex(6, 0),
                 "fig1"});
    t.push_back({"fig1-right", "example1:lambda=2", fig1, 20.0, Complex(6, 0),
                 "fig1"});
    t.push_back({"fig2-left", "gamma", fig2, 10.0, Complex(8, 0), "fig2"});
    t.push_back({"fig2-mid", "gamma_shift1", fig2, 10.0, Complex(8, 0),
                 "fig2"});
    t.push_back({"fig2-right", "gamma_cos", fig2, 10.0, Complex(8, 0),
                 "fig2"});
    return t;
  }();
  return table;
}

std::optional<Preset> findPreset(const std::string& name) {
  for (const Preset& p : presets())
    if (p.name == name) return p;
  return std::nullopt;
}

std::array<Rgb, kOrbitClassCount> paletteByName(const std::string& name) {
  const Rgb black{0, 0, 0};
  const Rgb white{255, 255, 255};
  const Rgb grey{128, 128, 128};
  std::array<Rgb, kOrbitClassCount> p{};
  if (name == "fig2") {
    // basin white, escaping black, the rest grey
    p[static_cast<int>(OrbitClass::EscapingInTract)] = black;
    p[static_cast<int>(OrbitClass::FastEscaping)] = black;
    p[static_cast<int>(OrbitClass::Basin)] = white;
    p[static_cast<int>(OrbitClass::Prepole)] = grey;
    p[static_cast<int>(OrbitClass::Other)] = grey;
  } else {
    // fig1: basin grey, escaping black, the rest white
    p[static_cast<int>(OrbitClass::EscapingInTract)] = black;
    p[static_cast<int>(OrbitClass::FastEscaping)] = black;
    p[static_cast<int>(OrbitClass::Basin)] = grey;
    p[static_cast<int>(OrbitClass::Prepole)] = white;
    p[static_cast<int>(OrbitClass::Other)] = white;
  }
  return p;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"direct-tract growth, Wiman-Valiron checks and escape-set "
               "rendering for meromorphic models"};
  app.require_subcommand(1);

  RenderArgs ra;
  auto* render = app.add_subcommand("render", "classify and draw escape sets");
  render->add_option("--model", ra.model);
  render->add_option("--lambda", ra.lambda);
  render->add_option("--preset", ra.preset);
  render->add_option("--window", ra.windowStr);
  auto* resOpt = render->add_option("--res", ra.resStr);
  render->parse_complete_callback([&ra, resOpt] {
    ra.resGiven = resOpt->count() > 0;
  });
  render->add_option("--palette", ra.paletteName);
  render->add_option("--seed", ra.seedStr);
  render->add_option("--R", ra.R);
  render->add_option("--rho", ra.rho);
  render->add_option("--orbit", ra.orbitStr,
                     "dump the orbit record of this point as JSON");
  render->add_option("--depth", ra.depth);
  render->add_option("--max-iter", ra.maxIter);
  render->add_option("--escape-log-bound", ra.escapeLogBound);
  render->add_option("--workers", ra.workers);
  render->add_option("-o,--out", ra.outDir);

  GrowthArgs ga;
  auto* growth = app.add_subcommand("growth", "profile B, a and M_D checks");
  growth->add_option("--model", ga.model);
  growth->add_option("--lambda", ga.lambda);
  growth->add_option("--R", ga.R);
  growth->add_option("--rmin", ga.rmin);
  growth->add_option("--rmax", ga.rmax);
  growth->add_option("--log-step", ga.logStep);
  growth->add_option("--window", ga.windowStr);
  growth->add_option("--res", ga.resStr);
  growth->add_option("--seed", ga.seedStr);
  growth->add_option("--alpha", ga.alpha);
  growth->add_option("--beta", ga.beta);
  growth->add_option("--epsilon", ga.epsilon);
  growth->add_option("--workers", ga.workers);
  growth->add_option("-o,--out", ga.outDir);

  WvArgs wa;
  auto* wv = app.add_subcommand("wv-check", "disc containment and asymptotic "
                                            "relation checks");
  wv->add_option("--model", wa.model);
  wv->add_option("--lambda", wa.lambda);
  wv->add_option("--R", wa.R);
  wv->add_option("--r", wa.r);
  wv->add_option("--rmin", wa.rmin);
  wv->add_option("--rmax", wa.rmax);
  wv->add_option("--tau", wa.tau);
  wv->add_option("--samples", wa.samples);
  wv->add_option("--window", wa.windowStr);
  wv->add_option("--res", wa.resStr);
  wv->add_option("--seed", wa.seedStr);
  wv->add_flag("--covering", wa.covering);
  wv->add_option("--beta", wa.beta);
  wv->add_option("--gamma", wa.gamma);
  wv->add_option("--alpha", wa.forcedAlpha,
                 "force the covering disc factor instead of doubling");
  wv->add_option("--workers", wa.workers);
  wv->add_option("-o,--out", wa.outDir);

  OdeArgs oa;
  auto* ode = app.add_subcommand("ode-bound",
                                 "degree/weight order bound for an algebraic "
                                 "differential equation");
  ode->add_option("equation", oa.equation);
  ode->add_option("--monomials-json", oa.monomialsJson);
  ode->add_option("--verify-with", oa.verifyWith);
  ode->add_option("--R", oa.R);
  ode->add_option("--rmin", oa.rmin);
  ode->add_option("--rmax", oa.rmax);
  ode->add_option("-o,--out", oa.outDir);

  OuterArgs ua;
  auto* outer = app.add_subcommand("outer-seq",
                                   "iterate the outer-sequence construction");
  outer->add_option("--model", ua.model);
  outer->add_option("--lambda", ua.lambda);
  outer->add_option("--R", ua.R);
  outer->add_option("--g0-radius", ua.g0Radius);
  outer->add_option("--steps", ua.steps);
  outer->add_option("--window", ua.windowStr);
  outer->add_option("--res", ua.resStr);
  outer->add_option("--seed", ua.seedStr);
  outer->add_option("--target-res", ua.targetRes);
  outer->add_option("-o,--out", ua.outDir);

  TractInfoArgs ta;
  auto* tinfo = app.add_subcommand("tract-info", "locate a tract and report "
                                                 "its verdicts");
  tinfo->add_option("--model", ta.model);
  tinfo->add_option("--lambda", ta.lambda);
  tinfo->add_option("--R", ta.R);
  tinfo->add_option("--seed", ta.seedStr);
  tinfo->add_option("--window", ta.windowStr);
  tinfo->add_option("--res", ta.resStr);
  tinfo->add_flag("--export-pgm", ta.exportPgm);
  tinfo->add_flag("--export-json", ta.exportJson);
  tinfo->add_option("--workers", ta.workers);
  tinfo->add_option("-o,--out", ta.outDir);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "flag error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (render->parsed()) return cmdRender(ra);
    if (growth->parsed()) return cmdGrowth(ga);
    if (wv->parsed()) return cmdWvCheck(wa);
    if (ode->parsed()) return cmdOdeBound(oa);
    if (outer->parsed()) return cmdOuterSeq(ua);
    if (tinfo->parsed()) return cmdTractInfo(ta);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "flag error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << errorCodeName(e.code()) << ": " << e.what() << "\n";
    return exitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 6;
  }
  return 2;
}

}  // namespace tractlab::cli
