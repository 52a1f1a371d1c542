#include "hdp/config.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <set>

#include <openssl/evp.h>

#include "hdp/errors.hpp"

namespace hdp {

namespace {

const char* refresh_name(RefreshPolicy p) { return p == RefreshPolicy::kNever ? "never" : "on_improvement"; }
const char* init_mode_name(InitMode m) { return m == InitMode::kUntrained ? "untrained" : "trained"; }

bool in(double v, double lo, double hi) { return v >= lo && v <= hi; }

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out, std::vector<std::string>& bad) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    bad.push_back(std::string(key) + " (wrong type)");
  }
}

}  // namespace

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json parts = nlohmann::json::array();
  for (FeaturePart p : feature_parts) parts.push_back(to_string(p));
  return {
      {"feature_parts", parts},
      {"learning_rate_init", learning_rate_init},
      {"weight_decay_init", weight_decay_init},
      {"epoch_init", epoch_init},
      {"patience_init", patience_init},
      {"init_mode", init_mode_name(init_mode)},
      {"structural_dim", structural_dim},
      {"hidden_dim", hidden_dim},
      {"embedding_dim", embedding_dim},
      {"learning_rate", learning_rate},
      {"weight_decay", weight_decay},
      {"epoch", epoch},
      {"patience", patience},
      {"order", order},
      {"beta", beta},
      {"tau", tau},
      {"lambda", lambda},
      {"kappa", kappa},
      {"layers_hm", layers_hm},
      {"layers_ht", layers_ht},
      {"use_hm", use_hm},
      {"use_ht", use_ht},
      {"sharpen", sharpen},
      {"dropout", dropout},
      {"normalize_features", normalize_features},
      {"refresh", refresh_name(refresh)},
      {"seed", seed},
  };
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  TrainConfig c;
  const nlohmann::json known = c.to_json();
  std::vector<std::string> bad;
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) bad.push_back(item.key() + " (unknown key)");
  }
  if (j.contains("feature_parts")) {
    const auto& parts = j.at("feature_parts");
    if (!parts.is_array()) {
      bad.push_back("feature_parts (wrong type)");
    } else {
      c.feature_parts.clear();
      try {
        for (const auto& p : parts) c.feature_parts.push_back(parse_feature_part(p.get<std::string>()));
      } catch (const std::exception&) {
        bad.push_back("feature_parts (unknown part)");
      }
    }
  }
  read(j, "learning_rate_init", c.learning_rate_init, bad);
  read(j, "weight_decay_init", c.weight_decay_init, bad);
  read(j, "epoch_init", c.epoch_init, bad);
  read(j, "patience_init", c.patience_init, bad);
  read(j, "structural_dim", c.structural_dim, bad);
  read(j, "hidden_dim", c.hidden_dim, bad);
  read(j, "embedding_dim", c.embedding_dim, bad);
  read(j, "learning_rate", c.learning_rate, bad);
  read(j, "weight_decay", c.weight_decay, bad);
  read(j, "epoch", c.epoch, bad);
  read(j, "patience", c.patience, bad);
  read(j, "order", c.order, bad);
  read(j, "beta", c.beta, bad);
  read(j, "tau", c.tau, bad);
  read(j, "lambda", c.lambda, bad);
  read(j, "kappa", c.kappa, bad);
  read(j, "layers_hm", c.layers_hm, bad);
  read(j, "layers_ht", c.layers_ht, bad);
  read(j, "use_hm", c.use_hm, bad);
  read(j, "use_ht", c.use_ht, bad);
  read(j, "sharpen", c.sharpen, bad);
  read(j, "dropout", c.dropout, bad);
  read(j, "normalize_features", c.normalize_features, bad);
  read(j, "seed", c.seed, bad);
  std::string refresh = refresh_name(c.refresh);
  read(j, "refresh", refresh, bad);
  if (refresh == "never") {
    c.refresh = RefreshPolicy::kNever;
  } else if (refresh != "on_improvement") {
    bad.push_back("refresh (expected on_improvement or never)");
  }
  std::string mode = init_mode_name(c.init_mode);
  read(j, "init_mode", mode, bad);
  if (mode == "untrained") {
    c.init_mode = InitMode::kUntrained;
  } else if (mode != "trained") {
    bad.push_back("init_mode (expected trained or untrained)");
  }
  if (!bad.empty()) {
    std::string msg = "invalid config keys:";
    for (const auto& b : bad) msg += " " + b;
    throw ConfigError(msg);
  }
  c.validate();
  return c;
}

void TrainConfig::validate() const {
  std::vector<std::string> bad;
  if (feature_parts.empty()) bad.push_back("feature_parts");
  if (!in(learning_rate_init, 0.001, 0.03)) bad.push_back("learning_rate_init");
  if (!in(weight_decay_init, 0.0, 0.005)) bad.push_back("weight_decay_init");
  if (epoch_init < 1 || epoch_init > 1000) bad.push_back("epoch_init");
  if (patience_init < 1 || patience_init > 400) bad.push_back("patience_init");
  if (structural_dim != 0 && (structural_dim < 64 || structural_dim > 8192)) bad.push_back("structural_dim");
  if (hidden_dim <= 0) bad.push_back("hidden_dim");
  if (embedding_dim <= 0) bad.push_back("embedding_dim");
  if (!in(learning_rate, 0.0003, 0.03)) bad.push_back("learning_rate");
  if (!in(weight_decay, 0.0, 0.01)) bad.push_back("weight_decay");
  if (epoch < 1 || epoch > 2000) bad.push_back("epoch");
  if (patience < 1 || patience > 400) bad.push_back("patience");
  if (order != 1 && order != 2) bad.push_back("order");
  if (!in(beta, 0.0, 10.0)) bad.push_back("beta");
  if (!in(tau, 0.1, 0.5)) bad.push_back("tau");
  if (!in(lambda, 0.8, 1.2)) bad.push_back("lambda");
  if (kappa < 0 || kappa > 8) bad.push_back("kappa");
  if (layers_hm < 0 || layers_hm > 8) bad.push_back("layers_hm");
  if (layers_ht < 0 || layers_ht > 8) bad.push_back("layers_ht");
  if (!use_hm && !use_ht) bad.push_back("use_hm/use_ht");
  if (!(sharpen > 0.0 && sharpen <= 16.0)) bad.push_back("sharpen");
  if (!(dropout >= 0.0 && dropout < 1.0)) bad.push_back("dropout");
  if (!bad.empty()) {
    std::string msg = "config out of range:";
    for (const auto& b : bad) msg += " " + b;
    throw ConfigError(msg);
  }
}

InitConfig TrainConfig::init_config(int split_id) const {
  InitConfig ic;
  ic.feature_parts = feature_parts;
  ic.hidden_dim = hidden_dim;
  ic.learning_rate = learning_rate_init;
  ic.weight_decay = weight_decay_init;
  ic.epochs = epoch_init;
  ic.patience = patience_init;
  ic.dropout = dropout;
  ic.seed = split_seed(split_id);
  return ic;
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  return TrainConfig::from_json(j);
}

TrainConfig with_overrides(const TrainConfig& base, const nlohmann::json& overrides) {
  nlohmann::json j = base.to_json();
  for (const auto& item : overrides.items()) j[item.key()] = item.value();
  return TrainConfig::from_json(j);
}

Ablation parse_ablation(const std::string& name) {
  for (Ablation a : all_ablations()) {
    if (to_string(a) == name) return a;
  }
  if (name == "none" || name == "full") return Ablation::kNone;
  throw ConfigError("unknown ablation '" + name + "'");
}

std::string to_string(Ablation ablation) {
  switch (ablation) {
    case Ablation::kNone:
      return "full";
    case Ablation::kNoTpc:
      return "no-tpc";
    case Ablation::kNoSse:
      return "no-sse";
    case Ablation::kNoHm:
      return "no-hm";
    case Ablation::kNoHt:
      return "no-ht";
    case Ablation::kNoSmp:
      return "no-smp";
    case Ablation::kNoUpd:
      return "no-upd";
    case Ablation::kNoInit:
      return "no-init";
  }
  return "full";
}

const std::vector<Ablation>& all_ablations() {
  static const std::vector<Ablation> list{Ablation::kNone,  Ablation::kNoTpc, Ablation::kNoSse,
                                          Ablation::kNoHm,  Ablation::kNoHt,  Ablation::kNoSmp,
                                          Ablation::kNoUpd, Ablation::kNoInit};
  return list;
}

TrainConfig apply_ablation(TrainConfig config, Ablation ablation) {
  switch (ablation) {
    case Ablation::kNone:
      break;
    case Ablation::kNoTpc:
      config.beta = 0.0;
      break;
    case Ablation::kNoSse:
      config.structural_dim = 0;
      std::erase(config.feature_parts, FeaturePart::kStructural);
      if (config.feature_parts.empty()) config.feature_parts.push_back(FeaturePart::kEgo);
      break;
    case Ablation::kNoHm:
      config.use_hm = false;
      break;
    case Ablation::kNoHt:
      config.use_ht = false;
      break;
    case Ablation::kNoSmp:
      config.layers_hm = 0;
      config.layers_ht = 0;
      break;
    case Ablation::kNoUpd:
      config.refresh = RefreshPolicy::kNever;
      break;
    case Ablation::kNoInit:
      config.init_mode = InitMode::kUntrained;
      break;
  }
  return config;
}

std::string content_hash(const nlohmann::json& j) {
  const std::string text = j.dump();
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw ContractViolation("sha256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace hdp
