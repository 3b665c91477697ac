#pragma once

#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "aif/agent.hpp"
#include "aif/agent_actor_critic.hpp"
#include "aif/agent_aif.hpp"
#include "aif/agent_qlearning.hpp"

namespace aif {

// Load refused: wrong version, malformed document, or shape mismatch.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCheckpointVersion = 1;

namespace detail {

using json = nlohmann::json;

inline json layer_tensors_to_json(const Matrix& w, const Vec& b) {
  return json{{"rows", w.rows}, {"cols", w.cols}, {"weight", w.data}, {"bias", b}};
}

inline void layer_tensors_from_json(const json& j, Matrix& w, Vec& b,
                                    const std::string& ctx) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const auto& wdata = j.at("weight");
  const auto& bdata = j.at("bias");
  if (rows < 1 || cols < 1 ||
      wdata.size() != std::size_t(rows) * std::size_t(cols) ||
      bdata.size() != std::size_t(rows)) {
    throw CheckpointError("checkpoint: shape mismatch in " + ctx + ": declared " +
                          std::to_string(rows) + "x" + std::to_string(cols) +
                          " but got " + std::to_string(wdata.size()) +
                          " weights and " + std::to_string(bdata.size()) + " biases");
  }
  w = Matrix(rows, cols);
  w.data = wdata.get<Vec>();
  b = bdata.get<Vec>();
}

inline json mlp_to_json(const MlpParams& p) {
  json layers = json::array();
  for (const auto& l : p.layers) {
    json lj = layer_tensors_to_json(l.weight, l.bias);
    lj["act"] = l.act == Activation::Relu ? "relu" : "identity";
    layers.push_back(lj);
  }
  return json{{"layers", layers}};
}

inline MlpParams mlp_from_json(const json& j, const std::string& ctx) {
  MlpParams p;
  for (const auto& lj : j.at("layers")) {
    Layer l;
    layer_tensors_from_json(lj, l.weight, l.bias, ctx);
    const std::string act = lj.at("act").get<std::string>();
    if (act == "relu") l.act = Activation::Relu;
    else if (act == "identity") l.act = Activation::Identity;
    else throw CheckpointError("checkpoint: unknown activation '" + act + "'");
    p.layers.push_back(std::move(l));
  }
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw CheckpointError("checkpoint: invalid network in " + ctx + ": " + e.what());
  }
  return p;
}

inline json adam_to_json(const AdamState& s) {
  json moments = json::array();
  for (std::size_t i = 0; i < s.m.size(); ++i) {
    moments.push_back(json{{"m", layer_tensors_to_json(s.m[i].weight, s.m[i].bias)},
                           {"v", layer_tensors_to_json(s.v[i].weight, s.v[i].bias)}});
  }
  return json{{"step", s.step},
              {"beta1", s.beta1},
              {"beta2", s.beta2},
              {"epsilon", s.epsilon},
              {"moments", moments}};
}

inline AdamState adam_from_json(const json& j, const MlpParams& params,
                                const std::string& ctx) {
  AdamState s = make_adam_state(params);
  s.step = j.at("step").get<std::int64_t>();
  s.beta1 = j.at("beta1").get<double>();
  s.beta2 = j.at("beta2").get<double>();
  s.epsilon = j.at("epsilon").get<double>();
  const auto& moments = j.at("moments");
  if (moments.size() != params.layers.size()) {
    throw CheckpointError("checkpoint: moment count mismatch in " + ctx);
  }
  for (std::size_t i = 0; i < moments.size(); ++i) {
    layer_tensors_from_json(moments[i].at("m"), s.m[i].weight, s.m[i].bias, ctx);
    layer_tensors_from_json(moments[i].at("v"), s.v[i].weight, s.v[i].bias, ctx);
    if (!s.m[i].weight.same_shape(params.layers[i].weight) ||
        !s.v[i].weight.same_shape(params.layers[i].weight)) {
      throw CheckpointError("checkpoint: moment shape mismatch in " + ctx);
    }
  }
  return s;
}

}  // namespace detail

inline nlohmann::json agent_to_json(const Agent& agent) {
  using detail::adam_to_json;
  using detail::mlp_to_json;
  using json = nlohmann::json;

  json j;
  j["format_version"] = kCheckpointVersion;
  if (const auto* a = dynamic_cast<const AifAgent*>(&agent)) {
    const AifConfig& c = a->config();
    j["agent"] = "aif";
    j["observation_dim"] = a->observation_dim();
    j["action_count"] = a->action_count();
    j["learn_steps"] = a->learn_steps();
    j["config"] = json{{"gamma_precision", c.gamma_precision},
                       {"discount", c.discount},
                       {"entropy_enabled", c.entropy_enabled},
                       {"epistemic_enabled", c.epistemic_enabled},
                       {"epistemic_weight", c.epistemic_weight},
                       {"posterior_std", c.posterior_std},
                       {"learning_rate", c.learning_rate},
                       {"hidden_units", c.hidden_units},
                       {"batch_size", c.batch_size},
                       {"target_sync_period", c.target_sync_period}};
    j["transition_net"] = mlp_to_json(a->transition_net());
    j["policy_net"] = mlp_to_json(a->policy_net());
    j["efe_net"] = mlp_to_json(a->efe_net());
    j["target_net"] = mlp_to_json(a->target().params);
    j["target_last_sync"] = a->target().last_sync_step;
    j["adam_transition"] = adam_to_json(a->adam_transition());
    j["adam_policy"] = adam_to_json(a->adam_policy());
    j["adam_efe"] = adam_to_json(a->adam_efe());
    return j;
  }
  if (const auto* a = dynamic_cast<const QAgent*>(&agent)) {
    const QConfig& c = a->config();
    j["agent"] = "qlearning";
    j["observation_dim"] = a->q_net().input_dim();
    j["action_count"] = a->q_net().output_dim();
    j["learn_steps"] = a->learn_steps();
    j["config"] = json{{"discount", c.discount},
                       {"boltzmann_beta", c.boltzmann_beta},
                       {"learning_rate", c.learning_rate},
                       {"hidden_units", c.hidden_units},
                       {"batch_size", c.batch_size},
                       {"target_sync_period", c.target_sync_period}};
    j["q_net"] = mlp_to_json(a->q_net());
    j["target_net"] = mlp_to_json(a->target().params);
    j["target_last_sync"] = a->target().last_sync_step;
    j["adam"] = adam_to_json(a->adam());
    return j;
  }
  if (const auto* a = dynamic_cast<const AcAgent*>(&agent)) {
    const AcConfig& c = a->config();
    j["agent"] = "actorcritic";
    j["observation_dim"] = a->policy_net().input_dim();
    j["action_count"] = a->policy_net().output_dim();
    j["learn_steps"] = a->learn_steps();
    j["config"] = json{{"discount", c.discount},
                       {"learning_rate", c.learning_rate},
                       {"hidden_units", c.hidden_units},
                       {"batch_size", c.batch_size},
                       {"target_sync_period", c.target_sync_period}};
    j["policy_net"] = mlp_to_json(a->policy_net());
    j["critic_net"] = mlp_to_json(a->critic_net());
    j["target_net"] = mlp_to_json(a->target().params);
    j["target_last_sync"] = a->target().last_sync_step;
    j["adam_policy"] = adam_to_json(a->adam_policy());
    j["adam_critic"] = adam_to_json(a->adam_critic());
    return j;
  }
  throw CheckpointError("checkpoint: unknown agent type");
}

inline std::unique_ptr<Agent> agent_from_json(const nlohmann::json& j) {
  using detail::adam_from_json;
  using detail::mlp_from_json;

  if (!j.contains("format_version")) {
    throw CheckpointError("checkpoint: missing format_version");
  }
  const int version = j.at("format_version").get<int>();
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint: unsupported format_version " +
                          std::to_string(version) + ", expected " +
                          std::to_string(kCheckpointVersion));
  }

  EnvSpec env;
  env.observation_dim = j.at("observation_dim").get<int>();
  env.action_count = j.at("action_count").get<int>();
  const std::string kind = j.at("agent").get<std::string>();
  const auto& cj = j.at("config");
  Rng scratch(0);  // parameters are overwritten below

  if (kind == "aif") {
    AifConfig c;
    c.gamma_precision = cj.at("gamma_precision").get<double>();
    c.discount = cj.at("discount").get<double>();
    c.entropy_enabled = cj.at("entropy_enabled").get<bool>();
    c.epistemic_enabled = cj.at("epistemic_enabled").get<bool>();
    c.epistemic_weight = cj.at("epistemic_weight").get<double>();
    c.posterior_std = cj.at("posterior_std").get<double>();
    c.learning_rate = cj.at("learning_rate").get<double>();
    c.hidden_units = cj.at("hidden_units").get<int>();
    c.batch_size = cj.at("batch_size").get<int>();
    c.target_sync_period = cj.at("target_sync_period").get<int>();
    auto agent = std::make_unique<AifAgent>(env, c, scratch);
    agent->transition_net() = mlp_from_json(j.at("transition_net"), "transition_net");
    agent->policy_net() = mlp_from_json(j.at("policy_net"), "policy_net");
    agent->efe_net() = mlp_from_json(j.at("efe_net"), "efe_net");
    agent->target().params = mlp_from_json(j.at("target_net"), "target_net");
    agent->target().last_sync_step = j.at("target_last_sync").get<std::int64_t>();
    agent->adam_transition() =
        adam_from_json(j.at("adam_transition"), agent->transition_net(), "adam_transition");
    agent->adam_policy() =
        adam_from_json(j.at("adam_policy"), agent->policy_net(), "adam_policy");
    agent->adam_efe() = adam_from_json(j.at("adam_efe"), agent->efe_net(), "adam_efe");
    agent->set_learn_steps(j.at("learn_steps").get<std::int64_t>());
    return agent;
  }
  if (kind == "qlearning") {
    QConfig c;
    c.discount = cj.at("discount").get<double>();
    c.boltzmann_beta = cj.at("boltzmann_beta").get<double>();
    c.learning_rate = cj.at("learning_rate").get<double>();
    c.hidden_units = cj.at("hidden_units").get<int>();
    c.batch_size = cj.at("batch_size").get<int>();
    c.target_sync_period = cj.at("target_sync_period").get<int>();
    auto agent = std::make_unique<QAgent>(env, c, scratch);
    agent->q_net() = mlp_from_json(j.at("q_net"), "q_net");
    agent->target().params = mlp_from_json(j.at("target_net"), "target_net");
    agent->target().last_sync_step = j.at("target_last_sync").get<std::int64_t>();
    agent->adam() = adam_from_json(j.at("adam"), agent->q_net(), "adam");
    agent->set_learn_steps(j.at("learn_steps").get<std::int64_t>());
    return agent;
  }
  if (kind == "actorcritic") {
    AcConfig c;
    c.discount = cj.at("discount").get<double>();
    c.learning_rate = cj.at("learning_rate").get<double>();
    c.hidden_units = cj.at("hidden_units").get<int>();
    c.batch_size = cj.at("batch_size").get<int>();
    c.target_sync_period = cj.at("target_sync_period").get<int>();
    auto agent = std::make_unique<AcAgent>(env, c, scratch);
    agent->policy_net() = mlp_from_json(j.at("policy_net"), "policy_net");
    agent->critic_net() = mlp_from_json(j.at("critic_net"), "critic_net");
    agent->target().params = mlp_from_json(j.at("target_net"), "target_net");
    agent->target().last_sync_step = j.at("target_last_sync").get<std::int64_t>();
    agent->adam_policy() =
        adam_from_json(j.at("adam_policy"), agent->policy_net(), "adam_policy");
    agent->adam_critic() =
        adam_from_json(j.at("adam_critic"), agent->critic_net(), "adam_critic");
    agent->set_learn_steps(j.at("learn_steps").get<std::int64_t>());
    return agent;
  }
  throw CheckpointError("checkpoint: unknown agent kind '" + kind + "'");
}

inline void save_checkpoint(const Agent& agent, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  out << agent_to_json(agent).dump(1) << "\n";
}

inline std::unique_ptr<Agent> load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("checkpoint: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("checkpoint: parse error: ") + e.what());
  }
  return agent_from_json(j);
}

}  // namespace aif
