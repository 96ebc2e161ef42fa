// fairlab: command-line front end for dataset generation, metrics, repair,
// histograms, the three-dataset reproduction and the trade-off sweep.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fairlab/fairlab.hpp"

namespace {

using namespace fairlab;

// Accepts inline JSON or a path to a JSON file.
nlohmann::json load_json_arg(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') return parse_json_text(arg, "inline config");
  return parse_json_text(read_text_file(arg), arg);
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw InvalidArgument("--range expects lo,hi");
  try {
    std::size_t used = 0;
    const std::string lo_text = text.substr(0, comma), hi_text = text.substr(comma + 1);
    const double lo = std::stod(lo_text, &used);
    if (used != lo_text.size()) throw InvalidArgument("--range: bad lower bound");
    const double hi = std::stod(hi_text, &used);
    if (used != hi_text.size()) throw InvalidArgument("--range: bad upper bound");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw InvalidArgument("--range expects two numbers: lo,hi");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairlab: fairness repair and fairness/accuracy trade-off experiments"};
  app.require_subcommand(1);

  std::string spec_path, in_path, out_path, config_arg, range_text, model_out;
  std::optional<std::uint64_t> resample_seed;
  std::uint64_t seed = 42;
  std::size_t bins = 50;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset from a spec file");
  gen->add_option("--spec", spec_path, "DatasetSpec JSON file")->required();
  gen->add_option("--out", out_path, "Output CSV")->required();

  auto* metrics = app.add_subcommand("metrics", "Print dataset metrics as JSON");
  metrics->add_option("--in", in_path, "Input CSV")->required();

  auto* repair = app.add_subcommand("repair", "Apply a repair to a dataset");
  repair->add_option("--in", in_path, "Input CSV")->required();
  repair->add_option("--config", config_arg, "RepairConfig as inline JSON or JSON file")->required();
  repair->add_option("--out", out_path, "Output CSV")->required();
  repair->add_option("--resample-seed", resample_seed, "Materialize weights by weighted resampling");
  repair->add_option("--model-out", model_out, "Write the fitted LFR model as JSON");

  auto* hist = app.add_subcommand("hist", "Per-group histograms of v as JSON");
  hist->add_option("--in", in_path, "Input CSV")->required();
  hist->add_option("--bins", bins, "Bin count")->check(CLI::PositiveNumber);
  hist->add_option("--range", range_text, "lo,hi (default: data range)");

  auto* reproduce_cmd = app.add_subcommand("reproduce", "Write tables, histograms and sweep for D1-D3");
  reproduce_cmd->add_option("--seed", seed, "Master seed");
  reproduce_cmd->add_option("--out", out_path, "Output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "Run a fairness/accuracy trade-off sweep");
  sweep->add_option("--config", config_arg, "ExperimentConfig as inline JSON or JSON file")->required();
  sweep->add_option("--out", out_path, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      write_csv(generate(read_spec(spec_path)), std::filesystem::path(out_path));
    } else if (metrics->parsed()) {
      std::cout << dump_json(compute_report(read_csv(in_path)));
    } else if (repair->parsed()) {
      const auto config = repair_config_from_json(load_json_arg(config_arg));
      auto result = apply_repair(config, read_csv(in_path));
      if (resample_seed) result.data = resample_by_weight(result.data, *resample_seed);
      write_csv(result.data, std::filesystem::path(out_path));
      if (!model_out.empty()) {
        if (!result.lfr_model) throw InvalidArgument("--model-out is only meaningful for the lfr method");
        write_text_file(model_out, dump_json(*result.lfr_model));
      }
    } else if (hist->parsed()) {
      const auto data = read_csv(in_path);
      double lo = 0.0, hi = 1.0;
      if (!range_text.empty()) {
        std::tie(lo, hi) = parse_range(range_text);
      } else if (!data.empty()) {
        const auto [mn, mx] = std::minmax_element(data.records.begin(), data.records.end(),
                                                  [](const Record& a, const Record& b) { return a.v < b.v; });
        lo = mn->v;
        hi = mx->v > mn->v ? mx->v : mn->v + 1.0;
      }
      auto out = nlohmann::json::array();
      for (int g : {0, 1}) out.push_back(histogram(values_of_group(data, g), bins, lo, hi, g));
      std::cout << dump_json(out);
    } else if (reproduce_cmd->parsed()) {
      reproduce_all(seed, out_path);
    } else if (sweep->parsed()) {
      const auto cfg = experiment_config_from_json(load_json_arg(config_arg));
      const auto rows = run_tradeoff_sweep(cfg);
      write_sweep(rows, out_path);
    }
  } catch (const Error& e) {
    std::cerr << "fairlab: error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fairlab: unexpected error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
