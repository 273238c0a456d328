// Copyright 2026 The fdss Authors
// SPDX-License-Identifier: Apache-2.0
#include "fdss/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "fdss/config.hpp"
#include "fdss/error.hpp"
#include "fdss/exec.hpp"
#include "fdss/experiment.hpp"
#include "fdss/io.hpp"
#include "fdss/process.hpp"
#include "fdss/registry.hpp"

namespace fdss {
namespace {

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

class Clock {
 public:
  Clock() : start_(std::chrono::steady_clock::now()), started_(utc_now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  const std::string& started() const { return started_; }

 private:
  std::chrono::steady_clock::time_point start_;
  std::string started_;
};

// Options shared by every subcommand.
struct Common {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out = "-";
  std::string manifest;
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--seed", common.seed, "Master seed (required)")->required();
  cmd->add_option("--threads", common.threads, "Worker threads (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", common.out, "Output path, '-' for standard output");
  cmd->add_option("--manifest", common.manifest, "Write a JSON run manifest to this path");
}

struct CalibrationFlags {
  std::optional<std::size_t> draws;
  std::optional<std::size_t> perms;
  std::optional<std::size_t> boots;
  std::optional<double> variance_fraction;
  bool add_one = false;
};

void add_calibration(CLI::App* cmd, CalibrationFlags& flags) {
  cmd->add_option("--draws", flags.draws, "Gaussian draws for ss-asym");
  cmd->add_option("--perms", flags.perms, "Permutations for permutation calibrations");
  cmd->add_option("--boots", flags.boots, "Bootstrap samples (ss-boot, cff, fmax)");
  cmd->add_option("--variance-fraction", flags.variance_fraction,
                  "Explained variance fraction for hr");
  cmd->add_flag("--add-one", flags.add_one, "Use (count + 1) / (R + 1) p-values");
}

void apply(const CalibrationFlags& flags, CalibrationSettings& settings) {
  if (flags.draws) settings.draws = *flags.draws;
  if (flags.perms) settings.perms = *flags.perms;
  if (flags.boots) settings.boots = *flags.boots;
  if (flags.variance_fraction) settings.variance_fraction = *flags.variance_fraction;
  if (flags.add_one) settings.add_one = true;
}

nlohmann::json calibration_json(const CalibrationSettings& c) {
  return {{"draws", c.draws},
          {"perms", c.perms},
          {"boots", c.boots},
          {"variance_fraction", c.variance_fraction},
          {"add_one", c.add_one}};
}

std::vector<std::string> selector_names(const std::vector<TestId>& tests) {
  std::vector<std::string> out;
  for (TestId id : tests) {
    out.emplace_back(selector(id));
  }
  return out;
}

// The manifest goes to --manifest when given, next to a file output as
// <out>.manifest.json otherwise, and to the diagnostic stream when the data
// went to standard output.
void write_manifest(const Common& common, const std::string& command, const nlohmann::json& config,
                    const Clock& clock, std::ostream& err) {
  RunManifest manifest;
  manifest.command = command;
  manifest.config = config;
  manifest.seed = common.seed;
  manifest.threads = thread_count();
  manifest.started = clock.started();
  manifest.wall_seconds = clock.seconds();
  const std::string text = manifest_json(manifest).dump(2);
  std::string path = common.manifest;
  if (path.empty() && common.out != "-") {
    path = common.out + ".manifest.json";
  }
  if (path.empty()) {
    err << text << '\n';
    return;
  }
  OutputFile file(path, &err);
  file.stream() << text << '\n';
  file.close();
}

std::string domain_sidecar(const std::string& data) { return data + ".domain.json"; }

// Domain of a dataset: flags first, then a <data>.domain.json sidecar, then [0, 1].
DomainBounds resolve_domain(const std::string& data, std::optional<double> a,
                          std::optional<double> b) {
  DomainBounds domain{0.0, 1.0};
  std::ifstream sidecar(domain_sidecar(data));
  if (sidecar) {
    try {
      const nlohmann::json doc = nlohmann::json::parse(sidecar);
      domain.a = doc.at("a").get<double>();
      domain.b = doc.at("b").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError(domain_sidecar(data) + ": expected {\"a\": number, \"b\": number}: " +
                       e.what());
    }
  }
  if (a) domain.a = *a;
  if (b) domain.b = *b;
  return domain;
}

std::vector<std::size_t> parse_sizes(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 2) {
    throw UsageError("--sizes needs at least two group sizes");
  }
  return sizes;
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const UsageError*>(&e) != nullptr) {
    return kExitUsage;
  }
  if (dynamic_cast<const NumericalError*>(&e) != nullptr) {
    return kExitNumerical;
  }
  return kExitData;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial-sign k-sample tests for functional data", "fdss"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kArtifactVersion);

  // test
  Common test_common;
  CalibrationFlags test_cal;
  std::string test_data;
  std::string test_selectors = "ss-asym";
  std::optional<double> test_a;
  std::optional<double> test_b;
  std::string test_format = "json";
  auto* test_cmd = app.add_subcommand("test", "Run tests on a functional CSV dataset");
  test_cmd->add_option("--data", test_data, "Dataset CSV")->required();
  test_cmd->add_option("--tests", test_selectors, "Comma-separated selectors: " + selector_list());
  test_cmd->add_option("--a", test_a, "Left end of the domain (default: sidecar, else 0)");
  test_cmd->add_option("--b", test_b, "Right end of the domain (default: sidecar, else 1)");
  test_cmd->add_option("--format", test_format, "json or csv");
  add_common(test_cmd, test_common);
  add_calibration(test_cmd, test_cal);

  // simulate
  Common sim_common;
  std::string sim_process = "sbm";
  std::vector<std::size_t> sim_sizes{20, 20, 20};
  double sim_c1 = 0.0;
  double sim_c2 = 0.0;
  double sim_a = 0.25;
  double sim_b = 0.75;
  std::size_t sim_points = 100;
  auto* sim_cmd = app.add_subcommand("simulate", "Write a simulated three-group dataset");
  sim_cmd->add_option("--process", sim_process, "sbm, gbm, t<df>, sbm^2, t<df>^2, contaminated(...)");
  sim_cmd->add_option("--sizes", sim_sizes, "Group sizes")->delimiter(',');
  sim_cmd->add_option("--c1", sim_c1, "Shift coefficient of eta_1 in group 2");
  sim_cmd->add_option("--c2", sim_c2, "Shift coefficient of eta_2 in group 3");
  sim_cmd->add_option("--a", sim_a, "Left end of the domain");
  sim_cmd->add_option("--b", sim_b, "Right end of the domain");
  sim_cmd->add_option("--points", sim_points, "Grid size");
  add_common(sim_cmd, sim_common);

  // size / power
  struct StudyFlags {
    Common common;
    CalibrationFlags cal;
    std::string config;
    std::optional<std::string> process;
    std::optional<std::string> tests;
    std::vector<std::size_t> sizes;
    std::optional<std::size_t> replications;
    std::optional<double> alpha;
    std::optional<double> c1;
    std::vector<double> c2;
  };
  StudyFlags size_flags;
  StudyFlags power_flags;
  auto add_study = [&](CLI::App* cmd, StudyFlags& f) {
    cmd->add_option("--config", f.config, "Experiment configuration file")->required();
    cmd->add_option("--process", f.process, "Override the process");
    cmd->add_option("--tests", f.tests, "Override the tests (comma-separated)");
    cmd->add_option("--sizes", f.sizes, "Override the group sizes")->delimiter(',');
    cmd->add_option("--replications", f.replications, "Override the replication count");
    cmd->add_option("--alpha", f.alpha, "Override the nominal level");
    add_common(cmd, f.common);
    add_calibration(cmd, f.cal);
  };
  auto* size_cmd = app.add_subcommand("size", "Estimate sizes under the null");
  add_study(size_cmd, size_flags);
  auto* power_cmd = app.add_subcommand("power", "Estimate a power curve over c2");
  add_study(power_cmd, power_flags);
  power_cmd->add_option("--c1", power_flags.c1, "Override c1");
  power_cmd->add_option("--c2", power_flags.c2, "Override the c2 values")->delimiter(',');

  // subsample
  Common sub_common;
  CalibrationFlags sub_cal;
  std::string sub_data;
  std::string sub_tests = "ss-perm";
  std::optional<double> sub_a;
  std::optional<double> sub_b;
  std::size_t sub_size = 4;
  std::size_t sub_reps = 500;
  double sub_alpha = 0.05;
  std::string sub_study = "both";
  std::string sub_format = "json";
  auto* sub_cmd = app.add_subcommand("subsample", "Subsampling size and power study on a dataset");
  sub_cmd->add_option("--data", sub_data, "Dataset CSV")->required();
  sub_cmd->add_option("--tests", sub_tests, "Comma-separated selectors");
  sub_cmd->add_option("--a", sub_a, "Left end of the domain (default: sidecar, else 0)");
  sub_cmd->add_option("--b", sub_b, "Right end of the domain (default: sidecar, else 1)");
  sub_cmd->add_option("--subgroup-size", sub_size, "Observations per subgroup");
  sub_cmd->add_option("--replications", sub_reps, "Subsampling replications");
  sub_cmd->add_option("--alpha", sub_alpha, "Nominal level");
  sub_cmd->add_option("--study", sub_study, "size, power or both")
      ->check(CLI::IsMember({"size", "power", "both"}));
  sub_cmd->add_option("--format", sub_format, "json or csv");
  add_common(sub_cmd, sub_common);
  add_calibration(sub_cmd, sub_cal);

  // asym-power
  Common asym_common;
  std::string asym_config;
  std::optional<std::string> asym_process;
  std::optional<std::string> asym_tests;
  std::optional<double> asym_c1;
  std::vector<double> asym_c2;
  std::vector<double> asym_lambda;
  std::optional<double> asym_alpha;
  std::optional<std::size_t> asym_pairs, asym_outer, asym_inner, asym_cov, asym_draws;
  auto* asym_cmd =
      app.add_subcommand("asym-power", "Limiting powers under shrinking alternatives");
  asym_cmd->add_option("--config", asym_config, "Configuration file");
  asym_cmd->add_option("--process", asym_process, "Base process");
  asym_cmd->add_option("--tests", asym_tests, "Comma-separated subset of ss, cff, zc, hr");
  asym_cmd->add_option("--c1", asym_c1, "delta_2 = c1 eta_1");
  asym_cmd->add_option("--c2", asym_c2, "delta_3 = c2 eta_2, one or more values")->delimiter(',');
  asym_cmd->add_option("--lambda", asym_lambda, "Limiting group proportions")->delimiter(',');
  asym_cmd->add_option("--alpha", asym_alpha, "Nominal level");
  asym_cmd->add_option("--derivative-pairs", asym_pairs, "Pairs for E[s'(X - X')]");
  asym_cmd->add_option("--outer", asym_outer, "Outer nested Monte-Carlo size");
  asym_cmd->add_option("--inner", asym_inner, "Inner nested Monte-Carlo size");
  asym_cmd->add_option("--covariance-paths", asym_cov, "Paths estimating Gamma");
  asym_cmd->add_option("--gaussian-draws", asym_draws, "Gaussian draws per power value");
  add_common(asym_cmd, asym_common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    if (dynamic_cast<const CLI::ValidationError*>(&e) == nullptr) {
      err << "run with --help for usage\n";
    }
    return kExitUsage;
  }

  try {
    const Clock clock;
    if (test_cmd->parsed()) {
      set_thread_count(test_common.threads);
      const ReportFormat format = parse_report_format(test_format);
      const std::vector<TestId> tests = parse_selectors(test_selectors);
      CalibrationSettings settings;
      apply(test_cal, settings);
      const DomainBounds domain = resolve_domain(test_data, test_a, test_b);
      const GroupedSample sample = read_dataset_csv(test_data, domain);
      std::vector<TestReport> reports;
      for (TestId id : tests) {
        reports.push_back(run_test(id, sample, settings, test_common.seed));
        if (!reports.back().advice.empty()) {
          err << "note: " << reports.back().test << ": " << reports.back().advice << "\n";
        }
      }
      nlohmann::json config = {{"data", test_data},
                               {"domain", {{"a", domain.a}, {"b", domain.b}}},
                               {"tests", selector_names(tests)},
                               {"calibration", calibration_json(settings)}};
      // Embedded manifest leaves out wall-clock and thread count so reports
      // stay byte-identical across runs.
      const nlohmann::json embedded = {{"command", "test"},
                                       {"artifact_version", kArtifactVersion},
                                       {"seed", test_common.seed},
                                       {"config", config}};
      OutputFile file(test_common.out, &out);
      write_reports(reports, file.stream(), format, &embedded);
      file.close();
      if (!test_common.manifest.empty() || format == ReportFormat::csv) {
        write_manifest(test_common, "test", config, clock, err);
      }
      return kExitOk;
    }

    if (sim_cmd->parsed()) {
      set_thread_count(sim_common.threads);
      const ProcessSpec spec = parse_process_spec(sim_process);
      const GridDomain domain(sim_a, sim_b, sim_points);
      const GroupedSample sample =
          generate_grouped(spec, domain, ShiftSpec{sim_c1, sim_c2}, parse_sizes(sim_sizes),
                           sim_common.seed);
      OutputFile file(sim_common.out, &out);
      write_dataset_csv(sample, file.stream());
      file.close();
      if (sim_common.out != "-") {
        OutputFile sidecar(domain_sidecar(sim_common.out));
        sidecar.stream() << nlohmann::json{{"a", sim_a}, {"b", sim_b}}.dump() << '\n';
        sidecar.close();
      }
      write_manifest(sim_common, "simulate",
                     {{"process", to_string(spec)},
                      {"sizes", sim_sizes},
                      {"c1", sim_c1},
                      {"c2", sim_c2},
                      {"domain", {{"a", sim_a}, {"b", sim_b}, {"points", sim_points}}}},
                     clock, err);
      return kExitOk;
    }

    auto load_study = [&](const StudyFlags& f) {
      ExperimentConfig config = experiment_config(read_config(f.config));
      if (f.process) config.process = parse_process_spec(*f.process);
      if (f.tests) config.tests = parse_selectors(*f.tests);
      if (!f.sizes.empty()) config.sizes = parse_sizes(f.sizes);
      if (f.replications) config.replications = *f.replications;
      if (f.alpha) config.alpha = *f.alpha;
      if (f.c1) config.c1 = *f.c1;
      if (!f.c2.empty()) config.c2 = f.c2;
      apply(f.cal, config.calibration);
      config.seed = f.common.seed;
      return config;
    };

    if (size_cmd->parsed()) {
      set_thread_count(size_flags.common.threads);
      const ExperimentConfig config = load_study(size_flags);
      const auto rates = estimate_size(config);
      OutputFile file(size_flags.common.out, &out);
      write_size_table(rates, file.stream());
      file.close();
      for (const auto& r : rates) {
        if (r.errors > 0) {
          err << "note: " << r.test << " failed in " << r.errors
              << " replications; first error: " << r.first_error << "\n";
        }
      }
      write_manifest(size_flags.common, "size", to_json(config), clock, err);
      return kExitOk;
    }

    if (power_cmd->parsed()) {
      set_thread_count(power_flags.common.threads);
      const ExperimentConfig config = load_study(power_flags);
      const PowerCurve curve = power_curve(config);
      OutputFile file(power_flags.common.out, &out);
      write_power_table(curve, config.c1, file.stream());
      file.close();
      write_manifest(power_flags.common, "power", to_json(config), clock, err);
      return kExitOk;
    }

    if (sub_cmd->parsed()) {
      set_thread_count(sub_common.threads);
      SubsampleConfig config;
      config.subgroup_size = sub_size;
      config.replications = sub_reps;
      config.alpha = sub_alpha;
      config.tests = parse_selectors(sub_tests);
      apply(sub_cal, config.calibration);
      config.seed = sub_common.seed;
      config.size_study = sub_study != "power";
      config.power_study = sub_study != "size";
      const ReportFormat format = parse_report_format(sub_format);
      const DomainBounds domain = resolve_domain(sub_data, sub_a, sub_b);
      const GroupedSample data = read_dataset_csv(sub_data, domain);
      const SubsampleResult result = subsample_study(data, config);
      auto rate_json = [](const RateEstimate& r) {
        return nlohmann::json{{"test", r.test},         {"rate", r.rate},
                              {"standard_error", r.standard_error},
                              {"rejections", r.rejections}, {"valid", r.valid},
                              {"errors", r.errors}};
      };
      OutputFile file(sub_common.out, &out);
      if (format == ReportFormat::json) {
        nlohmann::json doc;
        doc["included_groups"] = result.included_groups;
        doc["omitted_groups"] = result.omitted_groups;
        doc["size"] = nlohmann::json::array();
        for (std::size_t t = 0; t < result.size.size(); ++t) {
          nlohmann::json entry = rate_json(result.size[t]);
          entry["by_group"] = nlohmann::json::array();
          for (std::size_t g = 0; g < result.size_by_group[t].size(); ++g) {
            nlohmann::json row = rate_json(result.size_by_group[t][g]);
            row["group"] = result.included_groups[g];
            entry["by_group"].push_back(row);
          }
          doc["size"].push_back(entry);
        }
        doc["power"] = nlohmann::json::array();
        for (const auto& r : result.power) {
          doc["power"].push_back(rate_json(r));
        }
        file.stream() << doc.dump(2) << '\n';
      } else {
        std::ostream& o = file.stream();
        o << "study,group,test,rate,standard_error,rejections,valid,errors\n";
        auto row = [&](const char* study, const std::string& group, const RateEstimate& r) {
          o << study << ',' << group << ',' << r.test << ',' << format_double(r.rate) << ','
            << format_double(r.standard_error) << ',' << r.rejections << ',' << r.valid << ','
            << r.errors << '\n';
        };
        for (std::size_t t = 0; t < result.size.size(); ++t) {
          row("size", "all", result.size[t]);
          for (std::size_t g = 0; g < result.size_by_group[t].size(); ++g) {
            row("size", result.included_groups[g], result.size_by_group[t][g]);
          }
        }
        for (const auto& r : result.power) {
          row("power", "all", r);
        }
      }
      file.close();
      for (const auto& g : result.omitted_groups) {
        err << "note: group '" << g << "' omitted from the size study (fewer than "
            << data.groups() * sub_size << " observations)\n";
      }
      write_manifest(sub_common, "subsample",
                     {{"data", sub_data},
                      {"domain", {{"a", domain.a}, {"b", domain.b}}},
                      {"subgroup_size", sub_size},
                      {"replications", sub_reps},
                      {"alpha", sub_alpha},
                      {"study", sub_study},
                      {"tests", selector_names(config.tests)},
                      {"omitted_groups", result.omitted_groups},
                      {"calibration", calibration_json(config.calibration)}},
                     clock, err);
      return kExitOk;
    }

    if (asym_cmd->parsed()) {
      set_thread_count(asym_common.threads);
      ProcessSpec process;
      std::vector<std::string> tests{"ss", "cff", "zc", "hr"};
      double c1 = 0.0;
      std::vector<double> c2{0.0};
      std::vector<double> lambda{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
      double alpha = 0.05;
      double fraction = 0.9;
      GridDomain domain(0.25, 0.75, 100);
      AsymptoticPowerSettings mc;
      if (!asym_config.empty()) {
        const Config file = read_config(asym_config);
        file.require_known({"alternative.process", "alternative.tests", "alternative.c1",
                            "alternative.c2", "alternative.c2_from", "alternative.c2_to",
                            "alternative.c2_count", "alternative.lambda", "alternative.alpha",
                            "alternative.variance_fraction", "domain.a", "domain.b",
                            "domain.points", "monte_carlo.derivative_pairs",
                            "monte_carlo.outer", "monte_carlo.inner",
                            "monte_carlo.covariance_paths", "monte_carlo.gaussian_draws"});
        if (file.has("alternative.process")) process = parse_process_spec(file.string("alternative.process"));
        if (file.has("alternative.tests")) tests = file.strings("alternative.tests");
        if (file.has("alternative.c1")) c1 = file.number("alternative.c1");
        if (file.has("alternative.c2")) c2 = file.numbers("alternative.c2");
        if (file.has("alternative.c2_count")) {
          c2 = linspace(file.number("alternative.c2_from"), file.number("alternative.c2_to"),
                        file.count("alternative.c2_count"));
        }
        if (file.has("alternative.lambda")) lambda = file.numbers("alternative.lambda");
        if (file.has("alternative.alpha")) alpha = file.number("alternative.alpha");
        if (file.has("alternative.variance_fraction")) fraction = file.number("alternative.variance_fraction");
        domain = GridDomain(file.has("domain.a") ? file.number("domain.a") : domain.a(),
                            file.has("domain.b") ? file.number("domain.b") : domain.b(),
                            file.has("domain.points") ? file.count("domain.points") : domain.size());
        if (file.has("monte_carlo.derivative_pairs")) mc.derivative_pairs = file.count("monte_carlo.derivative_pairs");
        if (file.has("monte_carlo.outer")) mc.outer = file.count("monte_carlo.outer");
        if (file.has("monte_carlo.inner")) mc.inner = file.count("monte_carlo.inner");
        if (file.has("monte_carlo.covariance_paths")) mc.covariance_paths = file.count("monte_carlo.covariance_paths");
        if (file.has("monte_carlo.gaussian_draws")) mc.gaussian_draws = file.count("monte_carlo.gaussian_draws");
      }
      if (asym_process) process = parse_process_spec(*asym_process);
      if (asym_tests) {
        tests.clear();
        std::string_view rest = *asym_tests;
        while (!rest.empty()) {
          const auto comma = rest.find(',');
          tests.emplace_back(rest.substr(0, comma));
          if (comma == std::string_view::npos) break;
          rest.remove_prefix(comma + 1);
        }
      }
      if (asym_c1) c1 = *asym_c1;
      if (!asym_c2.empty()) c2 = asym_c2;
      if (!asym_lambda.empty()) lambda = asym_lambda;
      if (asym_alpha) alpha = *asym_alpha;
      if (asym_pairs) mc.derivative_pairs = *asym_pairs;
      if (asym_outer) mc.outer = *asym_outer;
      if (asym_inner) mc.inner = *asym_inner;
      if (asym_cov) mc.covariance_paths = *asym_cov;
      if (asym_draws) mc.gaussian_draws = *asym_draws;
      for (const auto& t : tests) {
        if (t != "ss") {
          parse_asymptotic_baseline(t);
        }
      }
      if (lambda.size() != 3) {
        throw UsageError("the (c1, c2) alternative has three groups; --lambda needs 3 values");
      }

      OutputFile file(asym_common.out, &out);
      std::ostream& o = file.stream();
      o << "test,c1,c2,power,standard_error,unstable,note\n";
      for (double c : c2) {
        ShrinkingAlternative alt = figure_alternative(process, domain, c1, c);
        alt.lambda = lambda;
        for (const auto& t : tests) {
          const AsymptoticPower p =
              t == "ss" ? asymptotic_power_ss(alt, alpha, mc, asym_common.seed)
                        : asymptotic_power_baseline(parse_asymptotic_baseline(t), alt, alpha, mc,
                                                    asym_common.seed, fraction);
          std::string note = p.note;
          for (char& ch : note) {
            if (ch == ',' || ch == '\n') ch = ';';
          }
          o << t << ',' << format_double(c1) << ',' << format_double(c) << ','
            << format_double(p.power) << ',' << format_double(p.standard_error) << ','
            << (p.unstable ? "true" : "false") << ',' << note << '\n';
        }
      }
      file.close();
      write_manifest(asym_common, "asym-power",
                     {{"process", to_string(process)},
                      {"tests", tests},
                      {"c1", c1},
                      {"c2", c2},
                      {"lambda", lambda},
                      {"alpha", alpha},
                      {"variance_fraction", fraction},
                      {"domain", {{"a", domain.a()}, {"b", domain.b()}, {"points", domain.size()}}},
                      {"monte_carlo",
                       {{"derivative_pairs", mc.derivative_pairs},
                        {"outer", mc.outer},
                        {"inner", mc.inner},
                        {"covariance_paths", mc.covariance_paths},
                        {"gaussian_draws", mc.gaussian_draws}}}},
                     clock, err);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitUsage;
}

}  // namespace fdss
