// membrane: runs the convergence, shape-parameter and timing studies and
// renders their CSV output.

#include "cli_config.hpp"
#include "svg_plot.hpp"

#include "membrane/errors.hpp"
#include "membrane/experiments.hpp"
#include "membrane/parallel.hpp"
#include "membrane/points.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef MEMBRANE_VERSION
#define MEMBRANE_VERSION "dev"
#endif

namespace fs = std::filesystem;
using namespace membrane;
using nlohmann::json;

namespace {

struct Globals {
  fs::path out = "out";
  std::uint64_t seed = 1;
  int jobs = 0;  // 0: OpenMP default
  std::vector<std::string> argv;
};

struct Manifest {
  std::string command;
  json configs = json::array();
  json outputs = json::array();
  std::string config_text;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ConfigError("cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void finish(const Globals& g, const Manifest& m, std::chrono::steady_clock::time_point start) {
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json j = {{"tool", "membrane"},
            {"version", MEMBRANE_VERSION},
            {"command", m.command},
            {"argv", g.argv},
            {"seed", g.seed},
            {"jobs", m.command == "bench" ? 1 : g.jobs},
            {"cache_dir", default_cache_dir().string()},
            {"configs", m.configs},
            {"outputs", m.outputs},
            {"wall_time_s", wall}};
  if (!m.config_text.empty()) j["config_text"] = m.config_text;
  write_text(g.out / ("manifest_" + m.command + ".json"), j.dump(2) + "\n");
}

PointFormat point_format(const std::string& field, const std::string& text) {
  if (text == "angles") return PointFormat::angles;
  if (text == "unit") return PointFormat::unit_vectors;
  throw ConfigError("config field '" + field + "': expected angles or unit, got '" + text + "'");
}

void cmd_points(const Globals& g, const std::string& kind, int n, const std::string& format,
                const std::string& input, const std::string& input_format, Manifest& m) {
  const PointFormat fmt = point_format("format", format);
  fs::path file;
  if (kind == "me") {
    if (n < 1) throw ConfigError("config field 'n': must be positive");
    const auto r = minimal_energy_sphere(n, g.seed);
    if (!r.converged) spdlog::warn("minimal-energy iteration stopped before converging");
    file = g.out / minimal_energy_file_name(n, g.seed);
    save_point_set(r.nodes, file, fmt);
  } else if (kind == "fib") {
    if (n < 1) throw ConfigError("config field 'n': must be positive");
    file = g.out / ("fib_" + std::to_string(n) + ".txt");
    save_point_set(fibonacci_sphere(n), file, fmt);
  } else if (kind == "convert") {
    if (input.empty()) throw ConfigError("config field 'input': required for convert");
    const auto set = load_point_set(input, point_format("input-format", input_format));
    file = g.out / fs::path(input).filename();
    if (fs::exists(file) && fs::equivalent(file, input))
      throw ConfigError("config field 'out': convert would overwrite its input");
    save_point_set(set, file, fmt);
  } else {
    throw ConfigError("config field 'kind': unknown point kind '" + kind + "' (known: me, fib, convert)");
  }
  m.configs.push_back({{"kind", kind}, {"n", n}, {"format", format}, {"input", input},
                       {"input_format", input_format}});
  m.outputs.push_back(file.string());
}

void run_studies(const Globals& g, const std::vector<cli::StudyRun>& runs, Manifest& m) {
  for (const auto& run : runs) {
    std::ostringstream csv;
    std::vector<ErrorRow> rows;
    for (const auto& c : run.configs) {
      spdlog::info("study {}: {}D {}", run.name, c.dimension, c.object);
      auto r = convergence_study(c);
      rows.insert(rows.end(), r.rows.begin(), r.rows.end());
      json j = cli::to_json(c);
      j["run"] = run.name;
      m.configs.push_back(j);
    }
    write_convergence_csv(csv, rows);
    const fs::path file = g.out / (run.name + ".csv");
    write_text(file, csv.str());
    m.outputs.push_back(file.string());
  }
}

void run_sweeps(const Globals& g, const std::vector<cli::SweepRun>& runs, Manifest& m) {
  for (const auto& run : runs) {
    std::ostringstream csv;
    std::vector<SweepRow> rows;
    for (const auto& c : run.configs) {
      spdlog::info("sweep {}: {}D {} N={}", run.name, c.dimension, c.object, c.n);
      auto r = shape_param_sweep(c);
      rows.insert(rows.end(), r.begin(), r.end());
      json j = cli::to_json(c);
      j["run"] = run.name;
      m.configs.push_back(j);
    }
    write_sweep_csv(csv, rows);
    const fs::path file = g.out / (run.name + ".csv");
    write_text(file, csv.str());
    m.outputs.push_back(file.string());
  }
}

cli::ConfigFile load_runs(const Globals& g, const std::string& config_path, Manifest& m) {
  if (config_path.empty()) return {};
  m.config_text = read_text(config_path);
  std::istringstream in(m.config_text);
  return cli::parse_config(in, g.seed, default_cache_dir());
}

}  // namespace

int main(int argc, char** argv) {
  const auto start = std::chrono::steady_clock::now();
  Globals g;
  g.argv.assign(argv, argv + argc);

  CLI::App app{"Geometric models of immersed-boundary membranes: studies, sweeps, timing and plots"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", MEMBRANE_VERSION);
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for minimal-energy point sets")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Only print warnings and errors");

  auto* points = app.add_subcommand("points", "Generate or convert sphere point sets");
  std::string point_kind, point_fmt = "angles", point_input, point_input_fmt = "angles";
  int point_n = 0;
  points->add_option("kind", point_kind, "me | fib | convert")->required();
  points->add_option("n", point_n, "Number of points (me, fib)");
  points->add_option("--format", point_fmt, "Output format: angles | unit")->capture_default_str();
  points->add_option("--input", point_input, "Point file to convert");
  points->add_option("--input-format", point_input_fmt, "angles | unit")->capture_default_str();

  auto* study = app.add_subcommand("study", "Convergence study: error vs number of data sites");
  std::vector<std::string> study_presets;
  std::string study_config;
  study->add_option("--preset", study_presets, "Figure preset (repeatable)");
  study->add_option("--config", study_config, "Config file with [study NAME] sections")
      ->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep", "RBF shape-parameter sweep");
  std::vector<std::string> sweep_presets;
  std::string sweep_config, sweep_object = "object1", sweep_kernel = "mq", sweep_eps;
  int sweep_dim = 2, sweep_n = 24, sweep_m = 100;
  sweep->add_option("--preset", sweep_presets, "Figure preset (repeatable)");
  sweep->add_option("--config", sweep_config, "Config file with [sweep NAME] sections")
      ->check(CLI::ExistingFile);
  sweep->add_option("--dimension", sweep_dim)->capture_default_str();
  sweep->add_option("--object", sweep_object)->capture_default_str();
  sweep->add_option("--n", sweep_n, "Data sites")->capture_default_str();
  sweep->add_option("--m", sweep_m, "Sample sites")->capture_default_str();
  sweep->add_option("--kernel", sweep_kernel, "mq | imq")->capture_default_str();
  auto* eps_opt = sweep->add_option("--epsilons", sweep_eps, "Comma-separated shape parameters");

  auto* bench = app.add_subcommand("bench", "Wallclock of the force pipeline (single thread)");
  TimingConfig tc;
  std::string bench_model = "all", bench_kernel = "mq";
  bench->add_option("--model", bench_model, "pwl | fourier | rbf | all")->capture_default_str();
  bench->add_option("--dimension", tc.dimension)->capture_default_str();
  bench->add_option("--object", tc.object)->capture_default_str();
  bench->add_option("--n", tc.n, "Data sites")->capture_default_str();
  bench->add_option("--m", tc.m, "Sample sites (PWL IB points)")->capture_default_str();
  bench->add_option("--kernel", bench_kernel, "mq | imq")->capture_default_str();
  bench->add_option("--epsilon", tc.epsilon)->capture_default_str();
  bench->add_option("--trials", tc.trials)->capture_default_str();
  bench->add_option("--warmup", tc.warmup)->capture_default_str();

  auto* plot = app.add_subcommand("plot", "Render a study, sweep or ε-limit CSV as SVG");
  std::string plot_csv, plot_title;
  plot->add_option("csv", plot_csv, "Input CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--title", plot_title, "Plot title (default: CSV file name)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "error: usage: %s\n", e.what());
    return 2;
  }

  spdlog::set_level(quiet ? spdlog::level::warn : spdlog::level::info);
  spdlog::set_pattern("%^%l%$: %v");
  try {
    if (g.jobs > 0) set_num_threads(g.jobs);
    fs::create_directories(g.out);
    Manifest m;
    if (*points) {
      m.command = "points";
      cmd_points(g, point_kind, point_n, point_fmt, point_input, point_input_fmt, m);
    } else if (*study) {
      m.command = "study";
      if (study_presets.empty() && study_config.empty())
        throw ConfigError("config field 'preset': give --preset or --config");
      auto file = load_runs(g, study_config, m);
      for (const auto& name : study_presets) {
        auto configs = study_preset(name);
        for (auto& c : configs) c.seed = g.seed, c.cache_dir = default_cache_dir();
        file.studies.push_back({name, configs});
      }
      if (file.studies.empty()) throw ConfigError("config field 'study': no [study NAME] sections");
      run_studies(g, file.studies, m);
    } else if (*sweep) {
      m.command = "sweep";
      auto file = load_runs(g, sweep_config, m);
      for (const auto& name : sweep_presets) {
        auto configs = sweep_preset(name);
        for (auto& c : configs) c.seed = g.seed, c.cache_dir = default_cache_dir();
        file.sweeps.push_back({name, configs});
      }
      if (sweep_presets.empty() && sweep_config.empty()) {
        SweepConfig c;
        c.dimension = sweep_dim;
        c.object = sweep_object;
        c.n = sweep_n;
        c.m = sweep_m;
        c.kernel = parse_kernel_family(sweep_kernel);
        c.epsilons = eps_opt->count() ? cli::parse_number_list("epsilons", sweep_eps) : logspace(-2, 1, 31);
        c.seed = g.seed;
        c.cache_dir = default_cache_dir();
        c.validate();
        file.sweeps.push_back({"sweep", {c}});
      }
      if (file.sweeps.empty()) throw ConfigError("config field 'sweep': no [sweep NAME] sections");
      run_sweeps(g, file.sweeps, m);
    } else if (*bench) {
      m.command = "bench";
      // Timings are single-threaded whatever --jobs says.
      set_num_threads(1);
      tc.kernel = parse_kernel_family(bench_kernel);
      tc.seed = g.seed;
      tc.cache_dir = default_cache_dir();
      std::vector<Model> models = bench_model == "all"
                                      ? std::vector{Model::pwl, Model::fourier, Model::rbf}
                                      : std::vector{parse_model(bench_model)};
      std::vector<TimingRow> rows;
      for (Model model : models) {
        tc.model = model;
        tc.validate();
        spdlog::info("bench {} ({} trials)", to_string(model), tc.trials);
        rows.push_back(timing_bench(tc));
        m.configs.push_back(cli::to_json(tc));
      }
      std::ostringstream csv;
      write_timing_csv(csv, rows);
      const fs::path file = g.out / "timing.csv";
      write_text(file, csv.str());
      m.outputs.push_back(file.string());
    } else if (*plot) {
      m.command = "plot";
      std::ifstream in(plot_csv, std::ios::binary);
      const std::string title = plot_title.empty() ? fs::path(plot_csv).stem().string() : plot_title;
      const auto spec = cli::plot_spec_from_csv(in, title);
      const fs::path file = g.out / (fs::path(plot_csv).stem().string() + ".svg");
      write_text(file, cli::render_svg(spec));
      m.configs.push_back({{"csv", plot_csv}, {"title", title}});
      m.outputs.push_back(file.string());
    }
    finish(g, m, start);
    for (const auto& f : m.outputs) std::printf("%s\n", f.get<std::string>().c_str());
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", e.kind().c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 1;
  }
  return 0;
}
