// Command-line workflows for fitting circular mixtures to angular data:
// fit, density, moments, simulate, study.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kjmix/report.hpp"
#include "kjmix/sampling.hpp"
#include "kjmix/simulation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw kjmix::DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw kjmix::DataError("cannot write " + path);
  return out;
}

struct FitArgs {
  std::string data;
  std::string format = "radians";
  std::size_t components = 2;
  std::string method = "both";
  int starts = 100;
  double c = 0.9;
  int q = 0;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  double em_outer_tol = 0.0;
  double em_inner_tol = 1e-6;
  int em_max_outer = 200;
  std::string out;
  std::string density_csv;
  std::string histogram_csv;
  int bins = 24;
};

int cmd_fit(const FitArgs& a) {
  const auto sample = kjmix::ingest(a.data, kjmix::parse_time_format(a.format));
  std::cerr << "read " << sample.size() << " angles from " << a.data << "\n";

  kjmix::EtmConfig mmm;
  mmm.q = a.q;
  mmm.c = a.c;
  mmm.tol = a.tol;
  mmm.starts = a.starts;
  mmm.seed = a.seed;
  kjmix::EmConfig em;
  em.outer_tol = a.em_outer_tol;
  em.inner_tol = a.em_inner_tol;
  em.max_outer = a.em_max_outer;

  const kjmix::FitReport report = kjmix::fit_report(sample, a.components, a.method, mmm, em);
  open_out(a.out) << kjmix::report_to_json(report) << "\n";
  std::cerr << "method=" << report.method << " etm=" << report.etm_value
            << " loglik=" << report.loglik << " aic=" << report.aic << " bic=" << report.bic
            << "\n";
  if (!a.density_csv.empty()) {
    auto csv = open_out(a.density_csv);
    kjmix::write_density_csv(csv, report.reparam, 1024);
  }
  if (!a.histogram_csv.empty()) {
    auto csv = open_out(a.histogram_csv);
    kjmix::write_histogram_csv(csv, sample, a.bins);
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Finite mixtures of Kato-Jones circular distributions: "
               "moment-based and maximum-likelihood fitting"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file");
  app.get_config_ptr()->configurable(false);

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a mixture to angular data");
  fit_cmd->add_option("--data", fit.data, "input file, one timestamp per line")->required();
  fit_cmd->add_option("--format", fit.format, "hhmm|hhmmss|hours|radians")
      ->check(CLI::IsMember({"hhmm", "hhmmss", "hours", "radians"}));
  fit_cmd->add_option("--components,-m", fit.components, "number of components");
  fit_cmd->add_option("--method", fit.method, "mmm|mle|both")
      ->check(CLI::IsMember({"mmm", "mle", "both"}));
  fit_cmd->add_option("--starts", fit.starts, "number of random starts");
  fit_cmd->add_option("--c", fit.c, "moment weight base in (0,1)");
  fit_cmd->add_option("--q", fit.q, "highest moment order (0 = 2m)");
  fit_cmd->add_option("--tol", fit.tol, "moment-error termination tolerance");
  fit_cmd->add_option("--seed", fit.seed, "random seed");
  fit_cmd->add_option("--em-outer-tol", fit.em_outer_tol, "EM log-likelihood tolerance (0 = n*1e-6)");
  fit_cmd->add_option("--em-inner-tol", fit.em_inner_tol, "EM M-step tolerance");
  fit_cmd->add_option("--em-max-outer", fit.em_max_outer, "EM iteration cap");
  fit_cmd->add_option("--out", fit.out, "report JSON path")->required();
  fit_cmd->add_option("--density-csv", fit.density_csv, "write a 1024-point density curve");
  fit_cmd->add_option("--histogram-csv", fit.histogram_csv, "write a histogram of the data");
  fit_cmd->add_option("--bins", fit.bins, "histogram bin count");

  std::string model_path, out_path;
  int grid = 1024;
  CLI::App* density_cmd = app.add_subcommand("density", "evaluate a stored model on a grid");
  density_cmd->add_option("--model", model_path, "report or model JSON")->required();
  density_cmd->add_option("--grid", grid, "number of grid points");
  density_cmd->add_option("--out", out_path, "output CSV path")->required();

  std::string m_data, m_format = "radians", m_model;
  int m_q = 0;
  CLI::App* moments_cmd =
      app.add_subcommand("moments", "empirical vs model moments with squared differences");
  moments_cmd->add_option("--data", m_data, "input file")->required();
  moments_cmd->add_option("--format", m_format, "hhmm|hhmmss|hours|radians")
      ->check(CLI::IsMember({"hhmm", "hhmmss", "hours", "radians"}));
  moments_cmd->add_option("--model", m_model, "report or model JSON")->required();
  moments_cmd->add_option("--q", m_q, "highest moment order (0 = 2m)");

  std::string s_model, s_out, s_format = "radians";
  std::size_t s_n = 1000;
  std::uint64_t s_seed = 0;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "draw samples from a stored model");
  simulate_cmd->add_option("--model", s_model, "report or model JSON")->required();
  simulate_cmd->add_option("--n", s_n, "sample size")->required();
  simulate_cmd->add_option("--seed", s_seed, "random seed");
  simulate_cmd->add_option("--out", s_out, "output path, one value per line")->required();
  simulate_cmd->add_option("--format", s_format, "radians|hhmmss")
      ->check(CLI::IsMember({"hhmm", "hhmmss", "hours", "radians"}));

  std::string st_truth, st_out;
  std::vector<std::size_t> st_sizes{50, 100, 500};
  int st_replicates = 200;
  std::uint64_t st_seed = 0;
  int st_starts = 100;
  double st_c = 0.9;
  CLI::App* study_cmd =
      app.add_subcommand("study", "Monte Carlo comparison of the two estimators");
  study_cmd->add_option("--truth", st_truth, "true model JSON")->required();
  study_cmd->add_option("--sizes", st_sizes, "comma-separated sample sizes")->delimiter(',');
  study_cmd->add_option("--replicates", st_replicates, "replicates per size");
  study_cmd->add_option("--seed", st_seed, "random seed");
  study_cmd->add_option("--starts", st_starts, "moment-fit starts per replicate");
  study_cmd->add_option("--c", st_c, "moment weight base");
  study_cmd->add_option("--out", st_out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit);

    if (density_cmd->parsed()) {
      const auto mix = kjmix::mixture_from_json(read_file(model_path));
      auto csv = open_out(out_path);
      kjmix::write_density_csv(csv, mix, grid);
      return kExitOk;
    }

    if (moments_cmd->parsed()) {
      const auto mix = kjmix::mixture_from_json(read_file(m_model));
      const auto sample = kjmix::ingest(m_data, kjmix::parse_time_format(m_format));
      const int q = m_q > 0 ? m_q : 2 * static_cast<int>(mix.size());
      kjmix::write_moments_table(std::cout, kjmix::empirical_trig_moments(sample, q), mix);
      return kExitOk;
    }

    if (simulate_cmd->parsed()) {
      const auto mix = kjmix::mixture_from_json(read_file(s_model));
      const auto fmt = kjmix::parse_time_format(s_format);
      const auto draws = kjmix::sample(mix, s_n, s_seed);
      auto out = open_out(s_out);
      for (const auto& a : draws) out << kjmix::format_angle(a, fmt) << "\n";
      return kExitOk;
    }

    if (study_cmd->parsed()) {
      kjmix::StudyConfig cfg;
      cfg.truth = kjmix::mixture_from_json(read_file(st_truth));
      cfg.sizes = st_sizes;
      cfg.replicates = st_replicates;
      cfg.seed = st_seed;
      cfg.mmm.starts = st_starts;
      cfg.mmm.c = st_c;
      const kjmix::StudyTable table = kjmix::run_study(cfg);
      auto csv = open_out(st_out);
      kjmix::write_study_csv(csv, table);
      kjmix::write_study_csv(std::cerr, table);
      return kExitOk;
    }
  } catch (const kjmix::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
