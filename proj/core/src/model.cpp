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

#include "rdae/model.hpp"

#include "rdae/error.hpp"

namespace rdae {
namespace {

void check_rdae_options(const RdaeOptions& o) {
  if (o.num_timesteps <= 0 || o.input_dim <= 0 || o.hidden_dim <= 0 ||
      o.encoder_depth <= 0 || o.decoder_depth <= 0) {
    throw ArgumentError("RdaeOptions: all dimensions must be positive");
  }
}

std::vector<GruLayer> make_stack(int first_in, int rest_dim, int depth,
                                 const std::string& prefix, Rng* rng) {
  std::vector<GruLayer> layers;
  layers.reserve(static_cast<std::size_t>(depth));
  for (int i = 0; i < depth; ++i) {
    const int in = i == 0 ? first_in : rest_dim;
    const std::string name = prefix + std::to_string(i);
    if (rng) {
      layers.emplace_back(in, rest_dim, name, *rng);
    } else {
      layers.emplace_back(in, rest_dim, name);
    }
  }
  return layers;
}

}  // namespace

RdaeModel::RdaeModel(const RdaeOptions& opts, Rng& rng)
    : opts_(opts),
      encoder_((check_rdae_options(opts),
                make_stack(opts.input_dim, opts.hidden_dim, opts.encoder_depth,
                           "encoder", &rng))),
      decoder_(make_stack(opts.hidden_dim, opts.input_dim, opts.decoder_depth,
                          "decoder", &rng)),
      readout_(opts.input_dim, opts.input_dim, Activation::kLinear, "readout", rng) {}

RdaeModel::RdaeModel(const RdaeOptions& opts)
    : opts_(opts),
      encoder_((check_rdae_options(opts),
                make_stack(opts.input_dim, opts.hidden_dim, opts.encoder_depth,
                           "encoder", nullptr))),
      decoder_(make_stack(opts.hidden_dim, opts.input_dim, opts.decoder_depth,
                          "decoder", nullptr)),
      readout_(opts.input_dim, opts.input_dim, Activation::kLinear, "readout") {}

RdaeModel::Forward RdaeModel::forward(const BatchSequence& x, Cache* cache) const {
  if (static_cast<int>(x.size()) != opts_.num_timesteps) {
    throw ArgumentError("rdae_forward: sequence length " + std::to_string(x.size()) +
                        ", expected " + std::to_string(opts_.num_timesteps));
  }
  if (cache) {
    cache->encoder.resize(encoder_.size());
    cache->decoder.resize(decoder_.size());
    cache->readout.resize(x.size());
  }

  BatchSequence seq = x;
  for (std::size_t i = 0; i < encoder_.size(); ++i) {
    seq = encoder_[i].forward(seq, cache ? &cache->encoder[i] : nullptr);
  }

  const Eigen::Index batch = seq.front().rows();
  const int T = opts_.num_timesteps;
  const int H = opts_.hidden_dim;
  Forward out;
  out.embedding.resize(batch, static_cast<Eigen::Index>(T) * H);
  for (int t = 0; t < T; ++t) {
    out.embedding.middleCols(static_cast<Eigen::Index>(t) * H, H) =
        seq[static_cast<std::size_t>(t)];
  }

  BatchSequence dec = seq;
  for (std::size_t i = 0; i < decoder_.size(); ++i) {
    dec = decoder_[i].forward(dec, cache ? &cache->decoder[i] : nullptr);
  }
  out.recon.resize(dec.size());
  for (std::size_t t = 0; t < dec.size(); ++t) {
    out.recon[t] = readout_.forward(dec[t], cache ? &cache->readout[t] : nullptr);
  }
  return out;
}

Eigen::MatrixXd RdaeModel::embed(const BatchSequence& x) const {
  if (static_cast<int>(x.size()) != opts_.num_timesteps) {
    throw ArgumentError("rdae embed: sequence length " + std::to_string(x.size()) +
                        ", expected " + std::to_string(opts_.num_timesteps));
  }
  BatchSequence seq = x;
  for (const GruLayer& layer : encoder_) seq = layer.forward(seq);
  const Eigen::Index batch = seq.front().rows();
  const int H = opts_.hidden_dim;
  Eigen::MatrixXd emb(batch, static_cast<Eigen::Index>(opts_.num_timesteps) * H);
  for (int t = 0; t < opts_.num_timesteps; ++t) {
    emb.middleCols(static_cast<Eigen::Index>(t) * H, H) = seq[static_cast<std::size_t>(t)];
  }
  return emb;
}

void RdaeModel::backward(const Cache& cache, const BatchSequence& drecon,
                         const Eigen::MatrixXd& dembedding) {
  const int T = opts_.num_timesteps;
  const int H = opts_.hidden_dim;

  // Reconstruction path: readout -> decoder stack -> encoder-output grads.
  BatchSequence denc_from_dec;
  if (!drecon.empty()) {
    if (static_cast<int>(drecon.size()) != T) {
      throw ArgumentError("rdae backward: drecon length mismatch");
    }
    BatchSequence d(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      d[static_cast<std::size_t>(t)] = readout_.backward(
          cache.readout[static_cast<std::size_t>(t)], drecon[static_cast<std::size_t>(t)]);
    }
    for (std::size_t i = decoder_.size(); i-- > 0;) {
      d = decoder_[i].backward(cache.decoder[i], d);
    }
    denc_from_dec = std::move(d);
  }

  // Embedding path arrives as B x (T*H); slice back into per-timestep grads.
  BatchSequence denc(static_cast<std::size_t>(T));
  const Eigen::Index batch = cache.encoder.back().h.front().rows();
  for (int t = 0; t < T; ++t) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(batch, H);
    if (!denc_from_dec.empty()) g += denc_from_dec[static_cast<std::size_t>(t)];
    if (dembedding.size() != 0) {
      g += dembedding.middleCols(static_cast<Eigen::Index>(t) * H, H);
    }
    denc[static_cast<std::size_t>(t)] = std::move(g);
  }

  BatchSequence d = std::move(denc);
  for (std::size_t i = encoder_.size(); i-- > 0;) {
    d = encoder_[i].backward(cache.encoder[i], d);
  }
}

std::vector<ParamRef> RdaeModel::params() {
  std::vector<ParamRef> out;
  for (GruLayer& l : encoder_) {
    for (ParamRef& p : l.params()) out.push_back(p);
  }
  for (GruLayer& l : decoder_) {
    for (ParamRef& p : l.params()) out.push_back(p);
  }
  for (DenseLayer::ParamRef& p : readout_.params()) {
    out.push_back({p.name, p.value, p.grad});
  }
  return out;
}

void RdaeModel::zero_grads() {
  for (GruLayer& l : encoder_) l.zero_grads();
  for (GruLayer& l : decoder_) l.zero_grads();
  readout_.zero_grads();
}

SnnClassifier::SnnClassifier(const SnnOptions& opts, Rng& rng)
    : opts_(opts),
      dense1_(opts.input_dim, opts.hidden_units, Activation::kRelu, "snn.dense1", rng),
      dense2_(opts.hidden_units, opts.num_classes, Activation::kLinear, "snn.dense2",
              rng) {
  if (opts.num_classes <= 0) {
    throw ArgumentError("SnnOptions: num_classes must be positive");
  }
}

SnnClassifier::SnnClassifier(const SnnOptions& opts)
    : opts_(opts),
      dense1_(opts.input_dim, opts.hidden_units, Activation::kRelu, "snn.dense1"),
      dense2_(opts.hidden_units, opts.num_classes, Activation::kLinear, "snn.dense2") {
  if (opts.num_classes <= 0) {
    throw ArgumentError("SnnOptions: num_classes must be positive");
  }
}

Eigen::MatrixXd SnnClassifier::forward(const Eigen::MatrixXd& embeddings, bool training,
                                       Rng* rng, Cache* cache) const {
  Cache local;
  Cache* c = cache ? cache : &local;
  Eigen::MatrixXd hidden = dense1_.forward(embeddings, &c->d1);
  if (training) {
    if (!rng) throw ArgumentError("SnnClassifier: training mode requires an RNG");
    c->mask = dropout_mask(hidden.rows(), hidden.cols(), opts_.dropout_rate, *rng);
    hidden = hidden.cwiseProduct(c->mask);
  } else {
    c->mask.resize(0, 0);
  }
  const Eigen::MatrixXd logits = dense2_.forward(hidden, &c->d2);
  return softmax_rows(logits);
}

Eigen::MatrixXd SnnClassifier::backward(const Cache& cache,
                                        const Eigen::MatrixXd& dlogits) {
  Eigen::MatrixXd dhidden = dense2_.backward(cache.d2, dlogits);
  if (cache.mask.size() != 0) dhidden = dhidden.cwiseProduct(cache.mask);
  return dense1_.backward(cache.d1, dhidden);
}

double SnnClassifier::l2_penalty() const {
  return opts_.l2_lambda *
         (dense1_.weight().squaredNorm() + dense2_.weight().squaredNorm());
}

void SnnClassifier::add_l2_grads() {
  auto d1 = dense1_.params();
  auto d2 = dense2_.params();
  *d1[0].grad += 2.0 * opts_.l2_lambda * *d1[0].value;
  *d2[0].grad += 2.0 * opts_.l2_lambda * *d2[0].value;
}

std::vector<ParamRef> SnnClassifier::params() {
  std::vector<ParamRef> out;
  for (DenseLayer::ParamRef& p : dense1_.params()) out.push_back({p.name, p.value, p.grad});
  for (DenseLayer::ParamRef& p : dense2_.params()) out.push_back({p.name, p.value, p.grad});
  return out;
}

void SnnClassifier::zero_grads() {
  dense1_.zero_grads();
  dense2_.zero_grads();
}

JointModel::JointModel(const JointOptions& opts, Rng& rng)
    : opts_(opts), rdae_(opts.rdae, rng), snn_(opts.snn, rng) {
  if (opts.snn.input_dim != opts.rdae.embedding_dim()) {
    throw ArgumentError("JointModel: SNN input dim " + std::to_string(opts.snn.input_dim) +
                        " != embedding dim " + std::to_string(opts.rdae.embedding_dim()));
  }
}

JointModel::JointModel(const JointOptions& opts)
    : opts_(opts), rdae_(opts.rdae), snn_(opts.snn) {
  if (opts.snn.input_dim != opts.rdae.embedding_dim()) {
    throw ArgumentError("JointModel: SNN input dim does not match embedding dim");
  }
}

JointModel::LossBreakdown JointModel::forward_loss(const BatchSequence& noisy,
                                                   const BatchSequence& clean,
                                                   const std::vector<int>& labels,
                                                   bool training, Rng* rng,
                                                   Cache* cache) const {
  if (noisy.size() != clean.size()) {
    throw ArgumentError("joint_loss: noisy/clean sequence length mismatch");
  }
  Cache local;
  Cache* c = cache ? cache : &local;
  c->fwd = rdae_.forward(noisy, &c->rdae);
  c->probs = snn_.forward(c->fwd.embedding, training, rng, &c->snn);

  LossBreakdown loss;
  // Mean over the batch of per-sample MSE equals the MSE over the stacked
  // entries, since every sample contributes the same T x input_dim count.
  double sq = 0.0;
  std::size_t entries = 0;
  for (std::size_t t = 0; t < clean.size(); ++t) {
    if (c->fwd.recon[t].rows() != clean[t].rows() ||
        c->fwd.recon[t].cols() != clean[t].cols()) {
      throw ArgumentError("joint_loss: clean target shape mismatch at timestep " +
                          std::to_string(t));
    }
    sq += (c->fwd.recon[t] - clean[t]).squaredNorm();
    entries += static_cast<std::size_t>(clean[t].size());
  }
  loss.recon = sq / static_cast<double>(entries);
  loss.ce = cross_entropy(c->probs, labels);
  loss.l2 = snn_.l2_penalty();
  loss.total = loss.recon + opts_.lambda * loss.ce + loss.l2;
  return loss;
}

void JointModel::backward(const Cache& cache, const BatchSequence& clean,
                          const std::vector<int>& labels) {
  const Eigen::Index batch = cache.probs.rows();
  const double entries = static_cast<double>(batch) *
                         static_cast<double>(clean.size()) *
                         static_cast<double>(clean.front().cols());

  // d(mean_batch mse)/d(recon[t]) = 2 (recon - clean) / (B * T * input_dim).
  BatchSequence drecon(clean.size());
  for (std::size_t t = 0; t < clean.size(); ++t) {
    drecon[t] = 2.0 * (cache.fwd.recon[t] - clean[t]) / entries;
  }

  // lambda * mean CE: gradient w.r.t. logits is lambda * (P - Y) / B.
  const Eigen::MatrixXd dlogits =
      opts_.lambda * cross_entropy_logit_grad(cache.probs, labels);
  const Eigen::MatrixXd dembedding = snn_.backward(cache.snn, dlogits);
  snn_.add_l2_grads();

  rdae_.backward(cache.rdae, drecon, dembedding);
}

std::vector<ParamRef> JointModel::params() {
  std::vector<ParamRef> out = rdae_.params();
  for (ParamRef& p : snn_.params()) out.push_back(p);
  return out;
}

void JointModel::zero_grads() {
  rdae_.zero_grads();
  snn_.zero_grads();
}

BatchSequence to_batch_sequence(const std::vector<const Eigen::MatrixXd*>& samples) {
  if (samples.empty()) throw ArgumentError("to_batch_sequence: empty batch");
  const Eigen::Index T = samples.front()->rows();
  const Eigen::Index D = samples.front()->cols();
  BatchSequence seq(static_cast<std::size_t>(T));
  for (Eigen::Index t = 0; t < T; ++t) {
    seq[static_cast<std::size_t>(t)].resize(static_cast<Eigen::Index>(samples.size()), D);
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i]->rows() != T || samples[i]->cols() != D) {
      throw ArgumentError("to_batch_sequence: sample " + std::to_string(i) +
                          " shape mismatch");
    }
    for (Eigen::Index t = 0; t < T; ++t) {
      seq[static_cast<std::size_t>(t)].row(static_cast<Eigen::Index>(i)) =
          samples[i]->row(t);
    }
  }
  return seq;
}

Eigen::VectorXd rdae_embed_single(const RdaeModel& model, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd emb = model.embed(to_batch_sequence({&x}));
  return emb.row(0).transpose();
}

Eigen::MatrixXd rdae_reconstruct_single(const RdaeModel& model, const Eigen::MatrixXd& x) {
  const RdaeModel::Forward fwd = model.forward(to_batch_sequence({&x}));
  Eigen::MatrixXd recon(x.rows(), x.cols());
  for (std::size_t t = 0; t < fwd.recon.size(); ++t) {
    recon.row(static_cast<Eigen::Index>(t)) = fwd.recon[t].row(0);
  }
  return recon;
}

}  // namespace rdae
