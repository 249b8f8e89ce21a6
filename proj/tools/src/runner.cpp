#include "spectools/runner.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <speclab/experiments.hpp>
#include <speclab/limit_ops.hpp>
#include <thread>

#include "spectools/csv.hpp"
#include "spectools/svg.hpp"

namespace speclab::tools {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

const std::vector<std::string> kCommands = {"cluster", "limit",   "converge",
                                            "diagnose", "figures", "supdev"};

std::string default_laplacian(const std::string& command) {
  if (command == "cluster") return "rw";
  if (command == "converge" || command == "supdev") return "sym";
  return "unnorm";  // limit, diagnose, figures
}

LaplacianKind laplacian_from_name(const std::string& name) {
  if (name == "unnorm") return LaplacianKind::UnnormScaled;
  if (name == "sym") return LaplacianKind::SymNorm;
  return LaplacianKind::RwNorm;
}

Scenario scenario_from_config(const RunConfig& cfg) {
  const LaplacianKind kind = laplacian_from_name(cfg.laplacian);
  if (cfg.density == "twobump") {
    Scenario sc = scenario_two_bump(cfg.s, kind);
    if (cfg.kernel == "gaussian")
      sc.kernel = KernelSpec::gaussian(cfg.sigma, 1.0, 2.0);
    return sc;
  }
  Scenario sc = scenario_mixture(cfg.sigma, kind);
  if (cfg.kernel == "product")
    throw std::domain_error(
        "the product kernel is not bounded away from 0 on the mixture support");
  return sc;
}

void apply_config_file(RunConfig& cfg, const std::string& path,
                       const std::map<std::string, CLI::Option*>& opts) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("config: top level must be an object");

  const auto unset = [&](const char* key) {
    const auto it = opts.find(key);
    return it != opts.end() && it->second->count() == 0;
  };
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "version") continue;
      if (key == "command") {
        if (value.get<std::string>() != cfg.command)
          throw UsageError("config: command '" +
                           value.get<std::string>() +
                           "' does not match invoked subcommand");
        continue;
      }
      if (opts.find(key) == opts.end())
        throw UsageError("config: unknown key '" + key + "'");
      if (!unset(key.c_str())) continue;  // flags take precedence
      if (key == "density")
        cfg.density = value.get<std::string>();
      else if (key == "s")
        cfg.s = value.get<double>();
      else if (key == "kernel")
        cfg.kernel = value.get<std::string>();
      else if (key == "sigma")
        cfg.sigma = value.get<double>();
      else if (key == "laplacian")
        cfg.laplacian = value.get<std::string>();
      else if (key == "n")
        cfg.n = value.get<std::size_t>();
      else if (key == "nlist")
        cfg.n_list = value.get<std::vector<std::size_t>>();
      else if (key == "reps")
        cfg.reps = value.get<int>();
      else if (key == "seed")
        cfg.seed = value.get<std::uint64_t>();
      else if (key == "gridN")
        cfg.grid_nodes = value.get<std::size_t>();
      else if (key == "margin")
        cfg.margin = value.get<double>();
      else if (key == "probes")
        cfg.probes = value.get<std::size_t>();
      else if (key == "out")
        cfg.out_dir = value.get<std::string>();
      else if (key == "svg")
        cfg.svg = value.get<bool>();
      else if (key == "workers")
        cfg.workers = value.get<int>();
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

void validate(RunConfig& cfg) {
  if (cfg.density != "twobump" && cfg.density != "mixture")
    throw UsageError("density: must be 'twobump' or 'mixture'");
  if (cfg.kernel.empty())
    cfg.kernel = cfg.density == "twobump" ? "product" : "gaussian";
  if (cfg.kernel != "product" && cfg.kernel != "gaussian")
    throw UsageError("kernel: must be 'product' or 'gaussian'");
  if (cfg.laplacian.empty()) cfg.laplacian = default_laplacian(cfg.command);
  if (cfg.laplacian != "unnorm" && cfg.laplacian != "sym" &&
      cfg.laplacian != "rw")
    throw UsageError("laplacian: must be 'unnorm', 'sym' or 'rw'");
  if (!(cfg.s > 0.0 && cfg.s < 3.0)) throw UsageError("s: must be in (0, 3)");
  if (!(cfg.sigma > 0.0)) throw UsageError("sigma: must be positive");
  if (cfg.n < 2) throw UsageError("n: must be >= 2");
  if (cfg.reps < 1) throw UsageError("reps: must be >= 1");
  if (cfg.grid_nodes < 16) throw UsageError("gridN: must be >= 16");
  if (cfg.margin < 0.0) throw UsageError("margin: must be >= 0");
  if (cfg.probes < 100) throw UsageError("probes: must be >= 100");
  if (cfg.workers < 0) throw UsageError("workers: must be >= 0");
  if (cfg.command == "converge" || cfg.command == "supdev") {
    if (cfg.n_list.size() < 4)
      throw UsageError("nlist: need at least 4 ascending sample sizes");
    if (!std::is_sorted(cfg.n_list.begin(), cfg.n_list.end()))
      throw UsageError("nlist: sample sizes must be ascending");
    for (std::size_t n : cfg.n_list)
      if (n < 2) throw UsageError("nlist: sample sizes must be >= 2");
  }
  if (cfg.workers == 0) {
    if (const char* env = std::getenv("SPECLAB_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end == env || v < 1) throw UsageError("SPECLAB_THREADS: bad value");
      cfg.workers = static_cast<int>(v);
    } else {
      cfg.workers =
          std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    }
  }
}

void write_manifest(const RunConfig& cfg) {
  json doc;
  doc["command"] = cfg.command;
  doc["version"] = kVersion;
  doc["density"] = cfg.density;
  doc["s"] = cfg.s;
  doc["kernel"] = cfg.kernel;
  doc["sigma"] = cfg.sigma;
  doc["laplacian"] = cfg.laplacian;
  doc["n"] = cfg.n;
  doc["nlist"] = cfg.n_list;
  doc["reps"] = cfg.reps;
  doc["seed"] = cfg.seed;
  doc["gridN"] = cfg.grid_nodes;
  doc["margin"] = cfg.margin;
  doc["probes"] = cfg.probes;
  doc["svg"] = cfg.svg;
  std::ofstream out(fs::path(cfg.out_dir) / "manifest.json");
  out << doc.dump(2) << '\n';
}

void write_spectrum_csv(const fs::path& path, const SpectrumReport& report) {
  CsvWriter csv(path.string(), {"index", "eigenvalue", "status", "ipr"});
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    csv.row({std::to_string(i + 1), format_double(row.eigenvalue),
             to_string(row.status), format_double(row.ipr)});
  }
}

void write_vectors_csv(const fs::path& path, const std::vector<double>& xs,
                       const Matrix& vectors) {
  CsvWriter csv(path.string(), {"point", "x", "v1", "v2", "v3", "v4", "v5"});
  const Eigen::Index cols = std::min<Eigen::Index>(vectors.cols(), 5);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<std::string> cells = {std::to_string(i + 1),
                                      format_double(xs[i])};
    for (Eigen::Index c = 0; c < 5; ++c)
      cells.push_back(format_double(
          c < cols ? vectors(static_cast<Eigen::Index>(i), c) : 0.0));
    csv.row(cells);
  }
}

EigenSystem sample_spectrum(const RunConfig& cfg, const SampleSet& s,
                            Vector* degrees_out) {
  const Scenario sc = scenario_from_config(cfg);
  const Matrix sim = build_similarity(s, sc.kernel);
  const LaplacianKind kind = laplacian_from_name(cfg.laplacian);
  const LaplacianKind solve_kind =
      kind == LaplacianKind::RwNorm ? LaplacianKind::SymNorm : kind;
  const LaplacianMatrix lap = build_laplacian(sim, solve_kind);
  const int r = static_cast<int>(std::min<std::size_t>(10, s.size()));
  EigenSystem es = eig_sym(lap.m, r);
  if (kind == LaplacianKind::RwNorm)
    for (int j = 0; j < es.count(); ++j)
      es.vectors.col(j) = rw_from_sym(es.vectors.col(j), lap.degrees);
  if (degrees_out) *degrees_out = lap.degrees;
  return es;
}

void run_cluster(const RunConfig& cfg) {
  const Scenario sc = scenario_from_config(cfg);
  const SampleSet s = sample(sc.density, cfg.n, cfg.seed);
  Vector deg;
  const EigenSystem es = sample_spectrum(cfg, s, &deg);
  const CriticalRegion region =
      estimate_critical_region(deg, s.size(), cfg.margin);
  const SpectrumReport report = classify_eigenvalues(es, region);

  const fs::path out(cfg.out_dir);
  write_spectrum_csv(out / "eigenvalues.csv", report);
  write_vectors_csv(out / "eigenvectors.csv", s.points, es.vectors);

  const ClusterAssignment clusters = threshold_cluster(es.vectors.col(1), 0.0);
  CsvWriter labels((out / "labels.csv").string(), {"point", "x", "label"});
  for (std::size_t i = 0; i < s.size(); ++i)
    labels.row({std::to_string(i + 1), format_double(s.points[i]),
                std::to_string(clusters.labels[i])});

  if (cfg.svg) {
    std::vector<double> vals(es.values.data(), es.values.data() + es.count());
    write_eigenvalue_svg((out / "eigenvalues.svg").string(), vals, region.lo,
                         "eigenvalues (" + cfg.laplacian + ")");
    write_eigenvector_svg((out / "eigenvectors.svg").string(), s.points,
                          es.vectors.leftCols(std::min<Eigen::Index>(
                              5, es.vectors.cols())),
                          "eigenvectors 1-5");
  }
  std::cout << "cluster: n=" << s.size() << " lambda2="
            << format_double(es.values(std::min<Eigen::Index>(1, es.count() - 1)))
            << '\n';
}

void run_limit(const RunConfig& cfg) {
  const Scenario sc = scenario_from_config(cfg);
  const QuadratureGrid grid = build_grid(sc.density, cfg.grid_nodes);
  const LimitKind kind = cfg.laplacian == "unnorm" ? LimitKind::UnnormalizedU
                                                   : LimitKind::NormalizedT;
  const LimitOperatorDisc op = build_limit(kind, sc.kernel, grid);
  const int r =
      static_cast<int>(std::min<std::size_t>(10, grid.size()));
  EigenSystem es = limit_eigs(op, r);

  const bool analytic = cfg.density == "twobump" && cfg.kernel == "product";
  const DegreeFunction deg =
      analytic ? DegreeFunction::analytic_two_bump_product(sc.kernel)
               : DegreeFunction::quadrature(sc.kernel, grid);
  const EssentialRange range = essential_range(deg, cfg.probes);
  CriticalRegion region;
  region.lo = range.lo;
  region.hi = range.hi;
  region.margin = cfg.margin;

  // classify_eigenvalues expects unit-norm columns; the limit eigenvectors
  // are normalized against the grid measure, so renormalize a copy.
  EigenSystem unit = es;
  for (int j = 0; j < unit.count(); ++j) unit.vectors.col(j).normalize();
  const SpectrumReport report = classify_eigenvalues(unit, region);
  write_spectrum_csv(fs::path(cfg.out_dir) / "eigenvalues.csv", report);

  std::cout << "essential range: [" << format_double(range.lo) << ", "
            << format_double(range.hi) << "]\n";
  if (analytic && kind == LimitKind::UnnormalizedU) {
    const std::vector<double> roots = two_bump_point_spectrum(cfg.s);
    std::cout << "point spectrum outside the essential range: {";
    for (std::size_t i = 0; i < roots.size(); ++i)
      std::cout << (i ? ", " : "") << format_double(roots[i]);
    std::cout << "}\n";
    CsvWriter csv((fs::path(cfg.out_dir) / "roots.csv").string(), {"root"});
    for (double root : roots) csv.row({format_double(root)});
  }
}

void write_rate_csv(const fs::path& path, const ConvergenceSeries& series,
                    SeriesField field) {
  try {
    const RateFit fit = fit_rate(series, field);
    CsvWriter csv(path.string(), {"slope", "intercept", "r2"});
    csv.row({format_double(fit.slope), format_double(fit.intercept),
             format_double(fit.r2)});
  } catch (const std::invalid_argument& e) {
    std::cerr << "warning: rate fit skipped: " << e.what() << '\n';
  }
}

void run_converge(const RunConfig& cfg) {
  const Scenario sc = scenario_from_config(cfg);
  ConvergenceOptions opts;
  opts.grid_nodes = cfg.grid_nodes;
  opts.workers = cfg.workers;
  const ConvergenceSeries series =
      run_convergence(sc, cfg.n_list, cfg.reps, cfg.seed, opts);

  const fs::path out(cfg.out_dir);
  CsvWriter csv((out / "convergence.csv").string(),
                {"n", "rep", "lambda2_sample", "lambda2_limit", "vec_sup_err",
                 "sign"});
  for (const auto& rec : series.records)
    csv.row({std::to_string(rec.n), std::to_string(rec.rep),
             format_double(rec.lambda2_sample),
             format_double(rec.lambda2_limit), format_double(rec.vec_sup_err),
             std::to_string(rec.sign)});
  write_rate_csv(out / "rate.csv", series, SeriesField::VecSupError);
  std::cout << "converge: " << series.records.size() << " records\n";
}

void run_diagnose(const RunConfig& cfg) {
  const Scenario sc = scenario_from_config(cfg);
  const SampleSet s = sample(sc.density, cfg.n, cfg.seed);
  Vector deg;
  const EigenSystem es = sample_spectrum(cfg, s, &deg);
  const CriticalRegion region =
      estimate_critical_region(deg, s.size(), cfg.margin);
  const SpectrumReport report = classify_eigenvalues(es, region);
  const fs::path out(cfg.out_dir);
  write_spectrum_csv(out / "eigenvalues.csv", report);
  if (cfg.svg) {
    std::vector<double> vals(es.values.data(), es.values.data() + es.count());
    write_eigenvalue_svg((out / "eigenvalues.svg").string(), vals, region.lo,
                         "spectrum vs critical region");
  }
  int inside = 0;
  for (const auto& row : report.rows)
    if (row.status == EigStatus::Inside) ++inside;
  std::cout << "diagnose: critical region [" << format_double(region.lo)
            << ", " << format_double(region.hi) << "], " << inside
            << " of " << report.rows.size() << " eigenvalues inside\n";
}

std::string sigma_tag(double sigma) {
  std::string tag = format_double(sigma);
  for (char& c : tag)
    if (c == '.') c = 'p';
  return tag;
}

void run_figures_cmd(const RunConfig& cfg) {
  const FigureData data = run_figures(cfg.seed, cfg.margin);
  const fs::path out(cfg.out_dir);
  for (const auto& entry : data.entries) {
    const std::string kind_name =
        entry.kind == LaplacianKind::UnnormScaled ? "unnormalized"
                                                  : "normalized";
    const std::string base = "sigma" + sigma_tag(entry.sigma) + "_" + kind_name;
    write_spectrum_csv(out / ("eigenvalues_" + base + ".csv"), entry.report);
    write_vectors_csv(out / ("eigenvectors_" + base + ".csv"), entry.points,
                      entry.eigenvectors);
    if (cfg.svg) {
      std::vector<double> vals(entry.eigenvalues.data(),
                               entry.eigenvalues.data() +
                                   entry.eigenvalues.size());
      write_eigenvalue_svg((out / ("eigenvalues_" + base + ".svg")).string(),
                           vals, entry.min_degree_over_n,
                           "eigenvalues, sigma=" + format_double(entry.sigma) +
                               " (" + kind_name + ")");
      write_eigenvector_svg(
          (out / ("eigenvectors_" + base + ".svg")).string(), entry.points,
          entry.eigenvectors,
          "eigenvectors 1-5, sigma=" + format_double(entry.sigma) + " (" +
              kind_name + ")");
    }
  }
  std::cout << "figures: " << data.entries.size() << " panels, n=" << data.n
            << '\n';
}

void run_supdev(const RunConfig& cfg) {
  const Scenario sc = scenario_from_config(cfg);
  const ConvergenceSeries series =
      empirical_sup_deviation(sc, cfg.n_list, cfg.reps, cfg.seed,
                              cfg.grid_nodes, cfg.probes, cfg.workers);
  const fs::path out(cfg.out_dir);
  CsvWriter csv((out / "supdev.csv").string(), {"n", "rep", "sup_dev"});
  for (const auto& rec : series.records)
    csv.row({std::to_string(rec.n), std::to_string(rec.rep),
             format_double(rec.vec_sup_err)});
  write_rate_csv(out / "rate.csv", series, SeriesField::VecSupError);
  std::cout << "supdev: " << series.records.size() << " records\n";
}

}  // namespace

RunConfig parse_config(int argc, const char* const* argv) {
  RunConfig cfg;
  std::string config_path;
  CLI::App app{"spectral clustering consistency laboratory"};
  app.name("speclab");
  app.require_subcommand(1);

  std::map<std::string, std::map<std::string, CLI::Option*>> submaps;
  for (const std::string& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name, name + " study");
    auto& m = submaps[name];
    m["density"] = sub->add_option("--density", cfg.density,
                                   "data density: twobump | mixture");
    m["s"] = sub->add_option("--s", cfg.s, "two-bump plateau height");
    m["kernel"] =
        sub->add_option("--kernel", cfg.kernel, "product | gaussian");
    m["sigma"] = sub->add_option("--sigma", cfg.sigma, "gaussian kernel width");
    m["laplacian"] =
        sub->add_option("--laplacian", cfg.laplacian, "unnorm | sym | rw");
    m["n"] = sub->add_option("--n", cfg.n, "sample size");
    m["nlist"] = sub->add_option("--nlist", cfg.n_list,
                                 "comma-separated ascending sample sizes")
                     ->delimiter(',');
    m["reps"] = sub->add_option("--reps", cfg.reps, "repetitions per n");
    m["seed"] = sub->add_option("--seed", cfg.seed, "master RNG seed");
    m["gridN"] =
        sub->add_option("--gridN", cfg.grid_nodes, "quadrature grid size");
    m["margin"] = sub->add_option("--margin", cfg.margin,
                                  "relative critical-region margin");
    m["probes"] = sub->add_option("--probes", cfg.probes, "probe grid size");
    m["out"] = sub->add_option("--out", cfg.out_dir, "output directory");
    m["svg"] = sub->add_flag("--svg,!--no-svg", cfg.svg, "emit SVG plots");
    m["workers"] =
        sub->add_option("--workers", cfg.workers, "worker thread cap");
    sub->add_option("--config", config_path, "JSON config file");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::exit(0);
    }
    throw UsageError(e.what());
  }
  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  if (!config_path.empty())
    apply_config_file(cfg, config_path, submaps[cfg.command]);
  validate(cfg);
  return cfg;
}

int dispatch(const RunConfig& cfg) {
  try {
    fs::create_directories(cfg.out_dir);
    if (cfg.command == "cluster")
      run_cluster(cfg);
    else if (cfg.command == "limit")
      run_limit(cfg);
    else if (cfg.command == "converge")
      run_converge(cfg);
    else if (cfg.command == "diagnose")
      run_diagnose(cfg);
    else if (cfg.command == "figures")
      run_figures_cmd(cfg);
    else if (cfg.command == "supdev")
      run_supdev(cfg);
    else
      throw UsageError("unknown command: " + cfg.command);
    write_manifest(cfg);
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return kExitScenario;
  } catch (const std::invalid_argument& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return kExitScenario;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int run_cli(int argc, const char* const* argv) {
  try {
    const RunConfig cfg = parse_config(argc, argv);
    return dispatch(cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace speclab::tools
