// myvt command-line driver: gen-data, train, plot, prox.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "myvt/data.hpp"
#include "myvt/plot.hpp"
#include "myvt/prox.hpp"
#include "myvt/run_config.hpp"
#include "myvt/train.hpp"

#ifndef MYVT_CODE_VERSION
#define MYVT_CODE_VERSION "unknown"
#endif

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

using nlohmann::json;

std::string flag_name(const std::string& key) {
  std::string s = key;
  for (auto& c : s)
    if (c == '_') c = '-';
  return "--" + s;
}

// Converts flag text to the JSON type the config field expects.
json typed_value(const json& prototype, const std::string& key, const std::string& text) {
  try {
    if (prototype.is_boolean()) {
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw std::invalid_argument("expected true or false");
    }
    if (prototype.is_number_unsigned()) return std::stoull(text);
    if (prototype.is_number_integer()) return std::stoll(text);
    if (prototype.is_number_float()) return std::stod(text);
    if (prototype.is_array()) {
      json arr = json::array();
      std::size_t pos = 0;
      while (pos < text.size()) {
        auto end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        arr.push_back(std::stoi(text.substr(pos, end - pos)));
        pos = end + 1;
      }
      return arr;
    }
  } catch (const std::exception&) {
    throw CLI::ValidationError(flag_name(key), "invalid value '" + text + "'");
  }
  return text;
}

struct TrainFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

void add_train_flags(CLI::App& cmd, TrainFlags& flags) {
  cmd.add_option("--config", flags.config_path, "JSON run config; flags override its values")
      ->check(CLI::ExistingFile);
  const json defaults = myvt::to_json(myvt::RunConfig{});
  const std::map<std::string, std::string> aliases = {
      {"iterations", "--iters,-K"}, {"regularizer", "--reg"},    {"inner_steps", "-T"},
      {"critic_steps", "--T-prime"}, {"batch_size", "-m,--batch"}, {"metrics_path", "--metrics"},
      {"summary_path", "--summary"}, {"data_path", "--data"}};
  for (const auto& [key, value] : defaults.items()) {
    std::string names = flag_name(key);
    if (auto a = aliases.find(key); a != aliases.end()) names += "," + a->second;
    flags.options[key] = cmd.add_option(names, flags.values[key], "config field '" + key + "'");
  }
}

myvt::RunConfig effective_config(const TrainFlags& flags) {
  myvt::RunConfig base;
  if (!flags.config_path.empty()) base = myvt::load_run_config(flags.config_path);
  const json defaults = myvt::to_json(myvt::RunConfig{});
  json overlay = json::object();
  for (const auto& [key, opt] : flags.options)
    if (opt->count() > 0) overlay[key] = typed_value(defaults.at(key), key, flags.values.at(key));
  return myvt::merge_run_config(base, overlay);
}

int cmd_train(const TrainFlags& flags) {
  const myvt::RunConfig config = effective_config(flags);
  myvt::Dataset data = config.data_path.empty() ? myvt::make_dataset(config.data)
                                                : myvt::read_dataset(config.data_path);
  std::ofstream metrics(config.metrics_path, std::ios::binary | std::ios::trunc);
  if (!metrics) throw std::runtime_error("cannot write metrics: " + config.metrics_path);
  myvt::write_metrics_header(metrics);

  myvt::RunOptions options;
  options.record_wall_time = config.record_wall_time;
  options.checkpoint_interval = config.checkpoint_interval;
  options.checkpoint_prefix = config.checkpoint_prefix;
  options.on_iteration = [&](const myvt::MetricsRow& row, const myvt::TrainState&) {
    myvt::write_metrics_row(metrics, row);
  };

  const auto start = std::chrono::steady_clock::now();
  myvt::RunResult result;
  try {
    result = myvt::run_training(config.train, data, options);
  } catch (const myvt::TrainingAborted& e) {
    metrics.flush();
    std::cerr << "myvt: numerical abort: " << e.what() << '\n';
    if (!e.last_checkpoint().empty())
      std::cerr << "myvt: last good checkpoint: " << e.last_checkpoint() << '\n';
    return kExitNumerical;
  }
  const double wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto& last = result.rows.back();
  json summary = {
      {"final_mse", last.mse},
      {"final_avg_l1", last.avg_l1},
      {"final_avg_tv", last.avg_tv},
      {"iterations", result.rows.size()},
      {"wall_s", config.record_wall_time ? wall_s : 0.0},
      {"config_echo", myvt::to_json(config)},
      {"code_version", MYVT_CODE_VERSION},
  };
  std::ofstream out(config.summary_path, std::ios::binary | std::ios::trunc);
  out << summary.dump(2) << '\n';
  std::cout << "final mse=" << last.mse << " avg_l1=" << last.avg_l1 << " avg_tv=" << last.avg_tv
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moreau-Yoshida variational transport experiments"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  myvt::SyntheticSpec spec;
  std::string gen_case = "sparse";
  std::string gen_out;
  gen->add_option("--case", gen_case, "sparse or pwc")->check(CLI::IsMember({"sparse", "pwc"}));
  gen->add_option("--seed", spec.seed, "RNG seed");
  gen->add_option("--out", gen_out, "output CSV path")->required();
  gen->add_option("--dim", spec.dim);
  gen->add_option("--n", spec.n_examples, "number of examples");
  gen->add_option("--noise-std", spec.noise_std);
  gen->add_option("--sparsity", spec.sparsity);
  gen->add_option("--segments", spec.n_segments);
  gen->add_option("--amplitude-low", spec.amplitude_low);
  gen->add_option("--amplitude-high", spec.amplitude_high);

  // train
  auto* train = app.add_subcommand("train", "Run MYVT or the VT baseline");
  TrainFlags train_flags;
  add_train_flags(*train, train_flags);

  // plot
  auto* plot = app.add_subcommand("plot", "Render metrics CSVs as an SVG chart");
  std::vector<std::string> plot_inputs;
  std::vector<std::string> plot_labels;
  std::string plot_out;
  std::string plot_norm = "l1";
  plot->add_option("--metrics", plot_inputs, "metrics CSV (repeat to overlay runs)")->required();
  plot->add_option("--label", plot_labels, "legend label per CSV");
  plot->add_option("--norm", plot_norm, "l1 or tv")->check(CLI::IsMember({"l1", "tv"}));
  plot->add_option("--out", plot_out, "output SVG path")->required();

  // prox eval
  auto* prox = app.add_subcommand("prox", "Proximal operator utilities");
  prox->require_subcommand(1);
  auto* prox_eval = prox->add_subcommand("eval", "Apply prox^lambda_g to each input vector");
  std::string prox_kind;
  double prox_lambda = 0.0;
  std::string prox_in;
  std::string prox_out;
  myvt::Regularizer prox_reg;
  prox_eval->add_option("--kind", prox_kind)->required()->check(CLI::IsMember({"l1", "tv1d", "tv2d"}));
  prox_eval->add_option("--lambda", prox_lambda)->required()->check(CLI::PositiveNumber);
  prox_eval->add_option("--input", prox_in)->required();
  prox_eval->add_option("--output", prox_out)->required();
  prox_eval->add_option("--height", prox_reg.height, "TV2D image height");
  prox_eval->add_option("--width", prox_reg.width, "TV2D image width");
  prox_eval->add_option("--admm-iters", prox_reg.admm_iters);
  prox_eval->add_option("--admm-rho", prox_reg.admm_rho);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      spec.kind = myvt::synthetic_case_from_string(gen_case);
      const myvt::Dataset data = myvt::make_dataset(spec);
      myvt::write_dataset(gen_out, data, myvt::describe(spec));
      return 0;
    }
    if (train->parsed()) return cmd_train(train_flags);
    if (plot->parsed()) {
      std::vector<myvt::MetricsSeries> series;
      for (std::size_t i = 0; i < plot_inputs.size(); ++i) {
        std::string label = i < plot_labels.size()
                                ? plot_labels[i]
                                : std::filesystem::path(plot_inputs[i]).stem().string();
        try {
          series.push_back({label, myvt::read_metrics_csv(plot_inputs[i])});
        } catch (const myvt::CsvError& e) {
          std::cerr << "myvt: " << plot_inputs[i] << ": " << e.what() << '\n';
          return kExitUsage;
        }
      }
      std::ofstream os(plot_out, std::ios::binary | std::ios::trunc);
      os << myvt::render_metrics_svg(series, plot_norm == "l1" ? myvt::NormColumn::L1 : myvt::NormColumn::TV);
      return os ? 0 : 1;
    }
    if (prox_eval->parsed()) {
      prox_reg.kind = myvt::reg_kind_from_string(prox_kind);
      std::ifstream is(prox_in);
      if (!is) throw std::invalid_argument("cannot open input: " + prox_in);
      std::vector<myvt::Vec> rows = myvt::read_vectors(is);
      for (auto& row : rows) {
        myvt::Regularizer g = prox_reg;
        if (g.kind == myvt::RegKind::TV2D && g.height == 0 && g.width == 0) {
          const auto side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(row.size()))));
          g.height = g.width = side;
        }
        row = myvt::prox(g, row, prox_lambda);
      }
      std::ofstream os(prox_out, std::ios::binary | std::ios::trunc);
      myvt::write_vectors(os, rows);
      return os ? 0 : 1;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "myvt: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "myvt: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "myvt: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
