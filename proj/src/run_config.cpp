#include "myvt/run_config.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace myvt {

using nlohmann::json;

namespace {

// Each key maps to a setter that reads the JSON value into the config.
using Setter = std::function<void(RunConfig&, const json&)>;

template <typename T>
T as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("config key '" + key + "' has the wrong type");
  }
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto str = [](auto apply) {
      return [apply](RunConfig& c, const json& v) { apply(c, as<std::string>(v, "value")); };
    };
    t["method"] = str([](RunConfig& c, const std::string& s) { c.train.method = method_from_string(s); });
    t["divergence"] = str([](RunConfig& c, const std::string& s) {
      c.train.divergence = divergence_from_string(s);
    });
    t["regularizer"] = str([](RunConfig& c, const std::string& s) {
      c.train.regularizer.kind = reg_kind_from_string(s);
    });
    t["optimizer"] = str([](RunConfig& c, const std::string& s) {
      c.train.optimizer = optimizer_from_string(s);
    });
    t["generator_activation"] = str([](RunConfig& c, const std::string& s) {
      c.train.generator_activation = activation_from_string(s);
    });
    t["critic_activation"] = str([](RunConfig& c, const std::string& s) {
      c.train.critic_activation = activation_from_string(s);
    });
    t["case"] = str([](RunConfig& c, const std::string& s) { c.data.kind = synthetic_case_from_string(s); });
    t["data_path"] = str([](RunConfig& c, const std::string& s) { c.data_path = s; });
    t["metrics_path"] = str([](RunConfig& c, const std::string& s) { c.metrics_path = s; });
    t["summary_path"] = str([](RunConfig& c, const std::string& s) { c.summary_path = s; });
    t["checkpoint_prefix"] = str([](RunConfig& c, const std::string& s) { c.checkpoint_prefix = s; });

#define MYVT_FIELD(key, member, type) \
  t[key] = [](RunConfig& c, const json& v) { c.member = as<type>(v, key); }
    MYVT_FIELD("alpha", train.alpha, double);
    MYVT_FIELD("lambda", train.lambda, double);
    MYVT_FIELD("eta_particle", train.eta_particle, double);
    MYVT_FIELD("eta_generator", train.eta_generator, double);
    MYVT_FIELD("eta_critic", train.eta_critic, double);
    MYVT_FIELD("iterations", train.iterations, int);
    MYVT_FIELD("inner_steps", train.inner_steps, int);
    MYVT_FIELD("critic_steps", train.critic_steps, int);
    MYVT_FIELD("batch_size", train.batch_size, int);
    MYVT_FIELD("n_particles", train.n_particles, int);
    MYVT_FIELD("noise_dim", train.noise_dim, int);
    MYVT_FIELD("seed", train.seed, std::uint64_t);
    MYVT_FIELD("generator_hidden", train.generator_hidden, std::vector<int>);
    MYVT_FIELD("critic_hidden", train.critic_hidden, std::vector<int>);
    MYVT_FIELD("init_scale", train.init_scale, double);
    MYVT_FIELD("clamp_eps", train.clamp_eps, double);
    MYVT_FIELD("admm_iters", train.regularizer.admm_iters, int);
    MYVT_FIELD("admm_rho", train.regularizer.admm_rho, double);
    MYVT_FIELD("cg_iters", train.regularizer.cg_iters, int);
    MYVT_FIELD("cg_tol", train.regularizer.cg_tol, double);
    MYVT_FIELD("tv_height", train.regularizer.height, int);
    MYVT_FIELD("tv_width", train.regularizer.width, int);
    MYVT_FIELD("dim", data.dim, int);
    MYVT_FIELD("n_examples", data.n_examples, int);
    MYVT_FIELD("noise_std", data.noise_std, double);
    MYVT_FIELD("sparsity", data.sparsity, int);
    MYVT_FIELD("n_segments", data.n_segments, int);
    MYVT_FIELD("amplitude_low", data.amplitude_low, double);
    MYVT_FIELD("amplitude_high", data.amplitude_high, double);
    MYVT_FIELD("data_seed", data.seed, std::uint64_t);
    MYVT_FIELD("checkpoint_interval", checkpoint_interval, int);
    MYVT_FIELD("record_wall_time", record_wall_time, bool);
#undef MYVT_FIELD
    return t;
  }();
  return table;
}

}  // namespace

json to_json(const RunConfig& c) {
  const auto& tr = c.train;
  return json{
      {"method", to_string(tr.method)},
      {"divergence", to_string(tr.divergence)},
      {"regularizer", to_string(tr.regularizer.kind)},
      {"alpha", tr.alpha},
      {"lambda", tr.lambda},
      {"eta_particle", tr.eta_particle},
      {"eta_generator", tr.eta_generator},
      {"eta_critic", tr.eta_critic},
      {"iterations", tr.iterations},
      {"inner_steps", tr.inner_steps},
      {"critic_steps", tr.critic_steps},
      {"batch_size", tr.batch_size},
      {"n_particles", tr.n_particles},
      {"noise_dim", tr.noise_dim},
      {"seed", tr.seed},
      {"optimizer", to_string(tr.optimizer)},
      {"generator_hidden", tr.generator_hidden},
      {"generator_activation", to_string(tr.generator_activation)},
      {"critic_hidden", tr.critic_hidden},
      {"critic_activation", to_string(tr.critic_activation)},
      {"init_scale", tr.init_scale},
      {"clamp_eps", tr.clamp_eps},
      {"admm_iters", tr.regularizer.admm_iters},
      {"admm_rho", tr.regularizer.admm_rho},
      {"cg_iters", tr.regularizer.cg_iters},
      {"cg_tol", tr.regularizer.cg_tol},
      {"tv_height", tr.regularizer.height},
      {"tv_width", tr.regularizer.width},
      {"case", to_string(c.data.kind)},
      {"dim", c.data.dim},
      {"n_examples", c.data.n_examples},
      {"noise_std", c.data.noise_std},
      {"sparsity", c.data.sparsity},
      {"n_segments", c.data.n_segments},
      {"amplitude_low", c.data.amplitude_low},
      {"amplitude_high", c.data.amplitude_high},
      {"data_seed", c.data.seed},
      {"data_path", c.data_path},
      {"metrics_path", c.metrics_path},
      {"summary_path", c.summary_path},
      {"checkpoint_prefix", c.checkpoint_prefix},
      {"checkpoint_interval", c.checkpoint_interval},
      {"record_wall_time", c.record_wall_time},
  };
}

RunConfig merge_run_config(RunConfig base, const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("run config must be a JSON object");
  const auto& table = setters();
  for (const auto& [key, value] : doc.items()) {
    const auto it = table.find(key);
    if (it == table.end()) throw UnknownKeyError(key);
    try {
      it->second(base, value);
    } catch (const UnknownKeyError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    }
  }
  return base;
}

RunConfig run_config_from_json(const json& doc) { return merge_run_config(RunConfig{}, doc); }

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config file " + path + ": " + e.what());
  }
  return run_config_from_json(doc);
}

}  // namespace myvt
