// Command-line front end: fit, simulate, periodogram, montecarlo, dpss.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "dbw/estimation.hpp"
#include "dbw/harness.hpp"
#include "dbw/io.hpp"
#include "dbw/simulate.hpp"
#include "dbw/spectral.hpp"
#include "dbw/tapers.hpp"

namespace {

// Writes to the file when a path is given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) {
        throw std::runtime_error("cannot write " + path);
      }
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

dbw::Side side_from(const std::string& s) {
  if (s == "positive") {
    return dbw::Side::positive;
  }
  if (s == "negative") {
    return dbw::Side::negative;
  }
  return dbw::Side::all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parametric spectral estimation with the de-biased Whittle likelihood"};
  app.require_subcommand(1);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit a parametric model to a series");
  std::string input, out_path, model_name = "matern", likelihood = "debiased", taper = "none", side = "none";
  double delta = 1.0, nw = 4.0, slope = 1.5, ratio = 1.0;
  int difference = 0;
  std::size_t max_iterations = 2000;
  fit_cmd->add_option("--input", input, "CSV: one real column, or u,v columns for a complex series")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--delta", delta, "Sampling interval")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--model", model_name, "matern | matern_fixed_slope | white_noise");
  fit_cmd->add_option("--slope", slope, "alpha for matern_fixed_slope");
  fit_cmd->add_option("--amplitude-ratio", ratio, "A / c for matern_fixed_slope");
  fit_cmd->add_option("--likelihood", likelihood)->check(CLI::IsMember({"exact", "whittle", "debiased"}));
  fit_cmd->add_option("--taper", taper)->check(CLI::IsMember({"none", "dpss"}));
  fit_cmd->add_option("--nw", nw, "DPSS time-bandwidth product");
  fit_cmd->add_option("--difference", difference)->check(CLI::Range(0, 2));
  fit_cmd->add_option("--side", side)->check(CLI::IsMember({"none", "positive", "negative"}));
  fit_cmd->add_option("--max-iterations", max_iterations);
  fit_cmd->add_option("--out", out_path, "JSON output (stdout when omitted)");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Draw Gaussian series from a model");
  std::vector<double> theta;
  std::size_t n = 1000, replicates = 1;
  std::uint64_t seed = 0;
  bool complex = false;
  std::string sim_out, per_file_prefix;
  sim_cmd->add_option("--model", model_name);
  sim_cmd->add_option("--theta", theta, "True parameters")->required();
  sim_cmd->add_option("--slope", slope);
  sim_cmd->add_option("--amplitude-ratio", ratio);
  sim_cmd->add_option("--n", n)->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30));
  sim_cmd->add_option("--delta", delta)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--replicates", replicates);
  sim_cmd->add_option("--seed", seed);
  sim_cmd->add_flag("--complex", complex, "Proper complex draws, written as u,v");
  sim_cmd->add_option("--out", sim_out, "CSV with one column per replicate (stdout when omitted)");
  sim_cmd->add_option("--per-file", per_file_prefix,
                      "Write replicate r to <prefix>_<r>.csv instead of one multi-column file");

  // periodogram
  auto* pg_cmd = app.add_subcommand("periodogram", "Periodogram of a series as omega,value");
  std::string pg_in, pg_out;
  pg_cmd->add_option("--input", pg_in)->required()->check(CLI::ExistingFile);
  pg_cmd->add_option("--delta", delta)->check(CLI::PositiveNumber);
  pg_cmd->add_option("--taper", taper)->check(CLI::IsMember({"none", "dpss"}));
  pg_cmd->add_option("--nw", nw);
  pg_cmd->add_option("--out", pg_out);

  // montecarlo
  auto* mc_cmd = app.add_subcommand("montecarlo", "Run a Monte Carlo experiment");
  std::string spec_path, mc_out;
  mc_cmd->add_option("--spec", spec_path, "Experiment JSON")->required()->check(CLI::ExistingFile);
  mc_cmd->add_option("--out", mc_out, "CSV table (overrides the spec's output)");

  // dpss
  auto* dpss_cmd = app.add_subcommand("dpss", "Print the zeroth-order DPSS taper, one weight per line");
  std::size_t dpss_n = 64;
  double dpss_nw = 4.0;
  std::string dpss_out;
  dpss_cmd->add_option("--n", dpss_n)->required();
  dpss_cmd->add_option("--nw", dpss_nw);
  dpss_cmd->add_option("--out", dpss_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit_cmd) {
      const auto x = dbw::read_series_csv(input, delta);
      const auto model = dbw::make_model(model_name, slope, ratio);
      dbw::FitConfig config;
      config.spec.variant = dbw::parse_variant(likelihood);
      config.spec.taper = taper == "dpss" ? dbw::TaperKind::dpss : dbw::TaperKind::none;
      config.spec.nw = nw;
      config.spec.difference_order = difference;
      config.spec.mask.side = side_from(side);
      config.max_iterations = max_iterations;
      const auto result = dbw::fit(x, model, config);
      Output out(out_path);
      out.stream() << dbw::to_json(result, *model).dump(2) << '\n';
    } else if (*sim_cmd) {
      const auto model = dbw::make_model(model_name, slope, ratio);
      const auto plan = dbw::plan_simulation(*model, theta, n, delta, seed);
      std::vector<dbw::TimeSeries> draws;
      for (std::size_t r = 0; r < replicates; ++r) {
        draws.push_back(complex ? dbw::simulate_complex_replicate(plan, r) : dbw::simulate_replicate(plan, r));
      }
      if (!per_file_prefix.empty()) {
        for (std::size_t r = 0; r < replicates; ++r) {
          const std::string path = per_file_prefix + "_" + std::to_string(r) + ".csv";
          if (complex) {
            dbw::write_velocity_csv(path, draws[r]);
          } else {
            Output out(path);
            out.stream() << "x\n";
            for (const auto& v : draws[r].values()) {
              out.stream() << dbw::format_double(v.real()) << '\n';
            }
          }
        }
      } else {
        Output out(sim_out);
        auto& os = out.stream();
        for (std::size_t r = 0; r < replicates; ++r) {
          if (complex) {
            os << (r ? "," : "") << "u" << r << ",v" << r;
          } else {
            os << (r ? "," : "") << "x" << r;
          }
        }
        os << '\n';
        for (std::size_t t = 0; t < n; ++t) {
          for (std::size_t r = 0; r < replicates; ++r) {
            const auto v = draws[r].values()[t];
            os << (r ? "," : "") << dbw::format_double(v.real());
            if (complex) {
              os << ',' << dbw::format_double(v.imag());
            }
          }
          os << '\n';
        }
      }
    } else if (*pg_cmd) {
      const auto x = dbw::read_series_csv(pg_in, delta);
      const auto I = taper == "dpss" ? dbw::tapered_periodogram(x, dbw::dpss_taper(x.size(), nw))
                                     : dbw::periodogram(x);
      Output out(pg_out);
      out.stream() << "omega,value\n";
      for (std::size_t i = 0; i < I.values.size(); ++i) {
        out.stream() << dbw::format_double(I.grid[i]) << ',' << dbw::format_double(I.values[i]) << '\n';
      }
    } else if (*mc_cmd) {
      auto spec = dbw::load_experiment_spec(spec_path);
      if (!mc_out.empty()) {
        spec.output = mc_out;
      }
      const auto result = dbw::run_experiment(spec);
      Output out(spec.output.string());
      dbw::write_aggregate_csv(out.stream(), result.rows);
    } else if (*dpss_cmd) {
      const auto h = dbw::dpss_taper(dpss_n, dpss_nw);
      Output out(dpss_out);
      for (const double w : h.weights()) {
        out.stream() << dbw::format_double(w) << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
