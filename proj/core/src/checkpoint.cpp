// Copyright 2026 The rdae Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rdae/checkpoint.hpp"

#include <bit>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rdae/error.hpp"

namespace rdae {
namespace {

using nlohmann::json;

constexpr int kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void put_f64(std::ostream& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::uint64_t get_u64(std::istream& in, const std::string& what) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw DataError("checkpoint: truncated while reading " + what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

json norm_to_json(const NormStats& n) {
  json j;
  j["scope"] = n.scope == NormScope::kGlobal ? "global" : "per_band";
  j["mean"] = n.mean;
  j["std"] = n.std;
  j["origin"] = n.origin;
  j["band_mean"] = std::vector<double>(n.band_mean.data(), n.band_mean.data() + n.band_mean.size());
  j["band_std"] = std::vector<double>(n.band_std.data(), n.band_std.data() + n.band_std.size());
  return j;
}

NormStats norm_from_json(const json& j) {
  NormStats n;
  n.scope = j.at("scope").get<std::string>() == "per_band" ? NormScope::kPerBand
                                                           : NormScope::kGlobal;
  n.mean = j.at("mean").get<double>();
  n.std = j.at("std").get<double>();
  n.origin = j.at("origin").get<std::string>();
  const auto bm = j.at("band_mean").get<std::vector<double>>();
  const auto bs = j.at("band_std").get<std::vector<double>>();
  n.band_mean = Eigen::Map<const Eigen::VectorXd>(bm.data(), static_cast<Eigen::Index>(bm.size()));
  n.band_std = Eigen::Map<const Eigen::VectorXd>(bs.data(), static_cast<Eigen::Index>(bs.size()));
  return n;
}

json train_config_to_json(const TrainConfig& c) {
  json j;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["patience"] = c.patience;
  j["loss_weight_lambda"] = c.loss_weight_lambda;
  j["seed"] = c.seed;
  j["optimizer"] = c.optimizer == OptimizerKind::kAdam ? "adam" : "sgd";
  return j;
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.patience = j.at("patience").get<int>();
  c.loss_weight_lambda = j.at("loss_weight_lambda").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.optimizer = j.at("optimizer").get<std::string>() == "sgd" ? OptimizerKind::kSgd
                                                              : OptimizerKind::kAdam;
  return c;
}

json header_to_json(const CheckpointHeader& h) {
  json j;
  j["version"] = h.version;
  j["system"] = h.system;
  j["kind"] = h.kind;
  if (h.has_rdae) {
    j["rdae"] = {{"num_timesteps", h.rdae.num_timesteps},
                 {"input_dim", h.rdae.input_dim},
                 {"hidden_dim", h.rdae.hidden_dim},
                 {"encoder_depth", h.rdae.encoder_depth},
                 {"decoder_depth", h.rdae.decoder_depth}};
  }
  if (h.has_snn) {
    j["snn"] = {{"input_dim", h.snn.input_dim},
                {"hidden_units", h.snn.hidden_units},
                {"num_classes", h.snn.num_classes},
                {"dropout_rate", h.snn.dropout_rate},
                {"l2_lambda", h.snn.l2_lambda}};
  }
  j["lambda"] = h.lambda;
  j["train_config"] = train_config_to_json(h.train_config);
  j["best_epoch"] = h.best_epoch;
  j["best_val_loss"] = h.best_val_loss;
  j["norm"] = norm_to_json(h.norm);
  j["class_labels"] = h.class_labels;
  j["outer_test_groups"] = h.outer_test_groups;
  j["hyperparams"] = h.hyperparams;
  json tensors = json::array();
  for (const TensorSpec& t : h.tensors) {
    tensors.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}});
  }
  j["tensors"] = tensors;
  return j;
}

CheckpointHeader header_from_json(const json& j) {
  CheckpointHeader h;
  if (!j.contains("version")) throw DataError("checkpoint header: missing version");
  h.version = j.at("version").get<int>();
  if (h.version != kVersion) {
    throw DataError("checkpoint: unsupported version " + std::to_string(h.version));
  }
  h.system = j.at("system").get<std::string>();
  h.kind = j.at("kind").get<std::string>();
  if (j.contains("rdae")) {
    h.has_rdae = true;
    const json& r = j.at("rdae");
    h.rdae.num_timesteps = r.at("num_timesteps").get<int>();
    h.rdae.input_dim = r.at("input_dim").get<int>();
    h.rdae.hidden_dim = r.at("hidden_dim").get<int>();
    h.rdae.encoder_depth = r.at("encoder_depth").get<int>();
    h.rdae.decoder_depth = r.at("decoder_depth").get<int>();
  }
  if (j.contains("snn")) {
    h.has_snn = true;
    const json& s = j.at("snn");
    h.snn.input_dim = s.at("input_dim").get<int>();
    h.snn.hidden_units = s.at("hidden_units").get<int>();
    h.snn.num_classes = s.at("num_classes").get<int>();
    h.snn.dropout_rate = s.at("dropout_rate").get<double>();
    h.snn.l2_lambda = s.at("l2_lambda").get<double>();
  }
  h.lambda = j.at("lambda").get<double>();
  h.train_config = train_config_from_json(j.at("train_config"));
  h.best_epoch = j.at("best_epoch").get<int>();
  h.best_val_loss = j.at("best_val_loss").get<double>();
  h.norm = norm_from_json(j.at("norm"));
  h.class_labels = j.at("class_labels").get<std::vector<std::string>>();
  h.outer_test_groups = j.at("outer_test_groups").get<std::vector<std::string>>();
  h.hyperparams = j.at("hyperparams").get<std::map<std::string, std::string>>();
  for (const json& t : j.at("tensors")) {
    h.tensors.push_back(
        {t.at("name").get<std::string>(), t.at("rows").get<int>(), t.at("cols").get<int>()});
  }
  return h;
}

}  // namespace

const Eigen::MatrixXd& Checkpoint::tensor(const std::string& name) const {
  for (const auto& [n, m] : tensors) {
    if (n == name) return m;
  }
  throw DataError("checkpoint: tensor '" + name + "' not present");
}

void save_checkpoint(const std::string& path, CheckpointHeader header,
                     std::vector<ParamRef> params) {
  header.version = kVersion;
  header.tensors.clear();
  for (const ParamRef& p : params) {
    header.tensors.push_back({p.name, static_cast<int>(p.value->rows()),
                              static_cast<int>(p.value->cols())});
  }
  const std::string hs = header_to_json(header).dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  put_u64(out, hs.size());
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const ParamRef& p : params) {
    for (Eigen::Index r = 0; r < p.value->rows(); ++r) {
      for (Eigen::Index c = 0; c < p.value->cols(); ++c) {
        put_f64(out, (*p.value)(r, c));
      }
    }
  }
  if (!out) throw IoError("short write to checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  const std::uint64_t hlen = get_u64(in, "header length");
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw DataError("checkpoint: truncated header: " + path);

  Checkpoint ckpt;
  try {
    ckpt.header = header_from_json(json::parse(hs));
  } catch (const json::exception& err) {
    throw DataError("checkpoint header malformed in " + path + ": " + err.what());
  }

  for (const TensorSpec& spec : ckpt.header.tensors) {
    Eigen::MatrixXd m(spec.rows, spec.cols);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        m(r, c) = std::bit_cast<double>(get_u64(in, "tensor '" + spec.name + "'"));
      }
    }
    ckpt.tensors.emplace_back(spec.name, std::move(m));
  }
  return ckpt;
}

void load_params(const Checkpoint& ckpt, std::vector<ParamRef> params) {
  for (ParamRef& p : params) {
    const Eigen::MatrixXd& src = ckpt.tensor(p.name);
    if (src.rows() != p.value->rows() || src.cols() != p.value->cols()) {
      throw DataError("checkpoint: tensor '" + p.name + "' is " +
                      std::to_string(src.rows()) + "x" + std::to_string(src.cols()) +
                      ", model expects " + std::to_string(p.value->rows()) + "x" +
                      std::to_string(p.value->cols()));
    }
    *p.value = src;
  }
}

RdaeModel rebuild_rdae(const Checkpoint& ckpt) {
  if (!ckpt.header.has_rdae) {
    throw DataError("checkpoint has no RDAE component (kind '" + ckpt.header.kind + "')");
  }
  RdaeModel model(ckpt.header.rdae);
  load_params(ckpt, model.params());
  return model;
}

SnnClassifier rebuild_snn(const Checkpoint& ckpt) {
  if (!ckpt.header.has_snn) {
    throw DataError("checkpoint has no SNN component (kind '" + ckpt.header.kind + "')");
  }
  SnnClassifier snn(ckpt.header.snn);
  load_params(ckpt, snn.params());
  return snn;
}

JointModel rebuild_joint(const Checkpoint& ckpt) {
  if (!ckpt.header.has_rdae || !ckpt.header.has_snn) {
    throw DataError("checkpoint is not a joint model (kind '" + ckpt.header.kind + "')");
  }
  JointOptions opts;
  opts.rdae = ckpt.header.rdae;
  opts.snn = ckpt.header.snn;
  opts.lambda = ckpt.header.lambda;
  JointModel model(opts);
  load_params(ckpt, model.params());
  return model;
}

}  // namespace rdae
