// Copyright 2026 The wbtrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wbt/student/cvae.hpp"

#include "wbt/student/deploy_obs.hpp"

namespace wbt::student {

using nlohmann::json;

const char* to_string(StudentArch a) {
  return a == StudentArch::kCvae ? "cvae" : "mlp";
}

const char* to_string(LatentMode m) {
  return m == LatentMode::kDeterministic ? "deterministic" : "stochastic";
}

StudentArch student_arch_from_string(const std::string& s) {
  if (s == "cvae") return StudentArch::kCvae;
  if (s == "mlp") return StudentArch::kMlp;
  throw ConfigError("unknown student arch '" + s + "'");
}

LatentMode latent_mode_from_string(const std::string& s) {
  if (s == "deterministic") return LatentMode::kDeterministic;
  if (s == "stochastic") return LatentMode::kStochastic;
  throw ConfigError("unknown latent mode '" + s + "'");
}

int StudentSpec::history_dim() const {
  return history * proprio_frame_dim(n_joints);
}

int StudentSpec::goal_dim() const {
  return window * goal_frame_dim(n_keypoints);
}

int StudentSpec::decoder_in_dim() const {
  if (arch == StudentArch::kMlp) return deploy_dim();
  return history_dim() + latent_dim + (explicit_ref ? goal_dim() : 0);
}

void StudentSpec::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("student spec: " + what);
  };
  require(history >= 1, "history must be >= 1");
  require(window >= 1, "window must be >= 1");
  require(latent_dim >= 1, "latent_dim must be >= 1");
  require(!hidden.empty(), "hidden must not be empty");
  for (int h : hidden) require(h >= 1, "hidden sizes must be >= 1");
  require(n_joints >= 1 && n_keypoints >= 1, "robot dimensions unset");
  require(arch == StudentArch::kMlp || oracle_dim >= 1, "oracle_dim unset");
}

json to_json(const StudentSpec& s) {
  return {{"arch", to_string(s.arch)},
          {"history", s.history},
          {"window", s.window},
          {"latent_dim", s.latent_dim},
          {"hidden", s.hidden},
          {"activation", nn::to_string(s.activation)},
          {"explicit_ref", s.explicit_ref},
          {"kl_residual", s.kl_residual},
          {"latent_mode", to_string(s.latent_mode)},
          {"seed", s.seed},
          {"n_joints", s.n_joints},
          {"n_keypoints", s.n_keypoints},
          {"oracle_dim", s.oracle_dim}};
}

StudentSpec student_spec_from_json(JsonReader r, StudentSpec s) {
  std::string arch = to_string(s.arch);
  std::string activation = nn::to_string(s.activation);
  std::string latent_mode = to_string(s.latent_mode);
  r.get("arch", arch);
  r.get("history", s.history);
  r.get("window", s.window);
  r.get("latent_dim", s.latent_dim);
  r.get("hidden", s.hidden);
  r.get("activation", activation);
  r.get("explicit_ref", s.explicit_ref);
  r.get("kl_residual", s.kl_residual);
  r.get("latent_mode", latent_mode);
  r.get("seed", s.seed);
  r.get("n_joints", s.n_joints);
  r.get("n_keypoints", s.n_keypoints);
  r.get("oracle_dim", s.oracle_dim);
  r.finish();
  s.arch = student_arch_from_string(arch);
  s.latent_mode = latent_mode_from_string(latent_mode);
  try {
    s.activation = nn::activation_from_string(activation);
  } catch (const InvalidInput& e) {
    throw ConfigError(r.where("activation") + ": " + e.what());
  }
  return s;
}

namespace {

bool is_cvae(const StudentSpec& s) { return s.arch == StudentArch::kCvae; }

std::vector<int> layers(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> l{in};
  l.insert(l.end(), hidden.begin(), hidden.end());
  l.push_back(out);
  return l;
}

std::vector<const nn::Mlp*> nets(const StudentParams& p) {
  if (!is_cvae(p.spec)) return {&p.decoder};
  return {&p.prior, &p.encoder, &p.decoder};
}

Mat clamp_cols(const Mat& raw) {
  return raw.cwiseMax(nn::kLogStdMin).cwiseMin(nn::kLogStdMax);
}

Mat clamp_mask(const Mat& raw) {
  return ((raw.array() >= nn::kLogStdMin) && (raw.array() <= nn::kLogStdMax))
      .cast<double>()
      .matrix();
}

}  // namespace

int StudentParams::n_params() const {
  int n = 0;
  for (const auto* net : nets(*this)) n += static_cast<int>(net->params.size());
  return n;
}

Vec StudentParams::pack() const {
  Vec flat(n_params());
  Eigen::Index at = 0;
  for (const auto* net : nets(*this)) {
    flat.segment(at, net->params.size()) = net->params;
    at += net->params.size();
  }
  return flat;
}

void StudentParams::unpack(const Vec& flat) {
  if (flat.size() != n_params())
    throw InvalidInput("StudentParams::unpack: size mismatch");
  Eigen::Index at = 0;
  auto take = [&](nn::Mlp& net) {
    net.params = flat.segment(at, net.params.size());
    at += net.params.size();
  };
  if (is_cvae(spec)) {
    take(prior);
    take(encoder);
  }
  take(decoder);
}

StudentParams make_student(const StudentSpec& spec) {
  spec.validate();
  StudentParams p;
  p.spec = spec;
  const int a = spec.n_joints;
  const int l = spec.latent_dim;
  auto make = [&](int in, int out, std::uint64_t stream) {
    nn::MlpSpec s;
    s.layer_sizes = layers(in, spec.hidden, out);
    s.activation = spec.activation;
    s.seed = spec.seed * 1000003ull + stream;
    s.output_gain = 0.01;
    return nn::make_mlp(s);
  };
  if (is_cvae(spec)) {
    p.prior = make(spec.prior_in_dim(), 2 * l, 1);
    p.encoder = make(spec.encoder_in_dim(), 2 * l, 2);
    p.decoder = make(spec.decoder_in_dim(), 2 * a, 3);
    p.oracle_norm = nn::RunningNormalizer::make(spec.oracle_dim);
  } else {
    p.decoder = make(spec.decoder_in_dim(), a, 3);
  }
  p.deploy_norm = nn::RunningNormalizer::make(spec.deploy_dim());
  return p;
}

namespace {

// Decoder input for normalized deploy observations and latents.
Mat decoder_input(const StudentSpec& spec, const Mat& deploy, const Mat& z) {
  if (!is_cvae(spec)) return deploy;
  const int keep = spec.explicit_ref ? spec.deploy_dim() : spec.history_dim();
  Mat in(keep + z.rows(), deploy.cols());
  in.topRows(keep) = deploy.topRows(keep);
  in.bottomRows(z.rows()) = z;
  return in;
}

nn::GaussianHead head_col(const Mat& out, Eigen::Index col, int dim) {
  nn::GaussianHead h;
  h.mean = out.col(col).head(dim);
  h.log_std = nn::clamp_log_std(out.col(col).segment(dim, dim));
  h.state_dependent = true;
  return h;
}

}  // namespace

StudentOutput student_forward(const StudentParams& params,
                              const Vec& deploy_obs, const Vec* oracle_obs,
                              ForwardMode mode, Rng* rng) {
  const auto& spec = params.spec;
  if (deploy_obs.size() != spec.deploy_dim())
    throw InvalidInput("student_forward: deploy obs size mismatch");
  const int a = spec.n_joints;
  const int l = spec.latent_dim;
  StudentOutput out;
  const Vec d = params.deploy_norm.normalize(deploy_obs);
  if (!is_cvae(spec)) {
    out.action = nn::forward_one(params.decoder, d);
    out.decoder.mean = out.action;
    return out;
  }
  out.prior = head_col(nn::forward(params.prior, d), 0, l);
  switch (mode) {
    case ForwardMode::kTrain: {
      if (oracle_obs == nullptr)
        throw InvalidInput("student_forward: train mode needs oracle obs");
      if (rng == nullptr)
        throw InvalidInput("student_forward: train mode needs an rng");
      if (oracle_obs->size() != spec.oracle_dim)
        throw InvalidInput("student_forward: oracle obs size mismatch");
      out.encoder = head_col(
          nn::forward(params.encoder, params.oracle_norm.normalize(*oracle_obs)),
          0, l);
      if (spec.kl_residual) out.encoder.mean += out.prior.mean;
      out.z = nn::sample_reparam(out.encoder, *rng).value;
      break;
    }
    case ForwardMode::kDeployPriorMean:
      out.z = out.prior.mean;
      break;
    case ForwardMode::kDeployPriorSample:
      if (rng == nullptr)
        throw InvalidInput("student_forward: sampling needs an rng");
      out.z = nn::sample_reparam(out.prior, *rng).value;
      break;
  }
  const Mat dec = nn::forward(params.decoder, decoder_input(spec, d, out.z));
  out.decoder = head_col(dec, 0, a);
  out.action = out.decoder.mean;
  return out;
}

Mat student_act(const StudentParams& params, const Mat& deploy_obs,
                LatentMode mode, Rng* rng) {
  const auto& spec = params.spec;
  if (deploy_obs.rows() != spec.deploy_dim())
    throw InvalidInput("student_act: deploy obs size mismatch");
  const Mat d = params.deploy_norm.normalize(deploy_obs);
  if (!is_cvae(spec)) return nn::forward(params.decoder, d);
  const int l = spec.latent_dim;
  const Mat prior = nn::forward(params.prior, d);
  Mat z = prior.topRows(l);
  if (mode == LatentMode::kStochastic) {
    if (rng == nullptr) throw InvalidInput("student_act: sampling needs an rng");
    const Mat sigma = clamp_cols(prior.bottomRows(l)).array().exp().matrix();
    for (Eigen::Index c = 0; c < z.cols(); ++c)
      z.col(c) += sigma.col(c).cwiseProduct(normal_vec(*rng, l));
  }
  return nn::forward(params.decoder, decoder_input(spec, d, z))
      .topRows(spec.n_joints);
}

DistillLoss distill_loss(const StudentParams& params, const Mat& deploy_norm,
                         const Mat& oracle_norm, const Mat& labels,
                         const Mat& noise, double beta, Vec* grad) {
  const auto& spec = params.spec;
  const bool cvae = is_cvae(spec);
  const int a = spec.n_joints;
  const int l = spec.latent_dim;
  if (deploy_norm.rows() != spec.deploy_dim() || labels.rows() != a ||
      labels.cols() != deploy_norm.cols())
    throw InvalidInput("distill_loss: batch shape mismatch");
  if (cvae && (oracle_norm.rows() != spec.oracle_dim ||
               oracle_norm.cols() != deploy_norm.cols() ||
               noise.rows() != l || noise.cols() != deploy_norm.cols()))
    throw InvalidInput("distill_loss: oracle/noise shape mismatch");
  if (!(beta >= 0.0)) throw InvalidInput("distill_loss: beta must be >= 0");

  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < labels.cols(); ++c)
    if (labels.col(c).allFinite()) keep.push_back(c);
  DistillLoss loss;
  loss.beta = beta;
  loss.samples = static_cast<int>(keep.size());
  loss.skipped = static_cast<int>(labels.cols()) - loss.samples;
  if (grad != nullptr) grad->setZero(params.n_params());
  if (keep.empty()) return loss;

  const Eigen::Index b = static_cast<Eigen::Index>(keep.size());
  auto select = [&](const Mat& m) {
    Mat out(m.rows(), b);
    for (Eigen::Index i = 0; i < b; ++i) out.col(i) = m.col(keep[i]);
    return out;
  };
  const Mat d = select(deploy_norm);
  const Mat y = select(labels);
  const double inv_b = 1.0 / static_cast<double>(b);

  if (!cvae) {
    nn::MlpCache cache;
    const Mat mu = nn::forward(params.decoder, d, &cache);
    const Mat diff = mu - y;
    loss.l_action = diff.squaredNorm() * inv_b;
    loss.total = loss.l_action;
    if (grad != nullptr) {
      Vec g;
      nn::backward(params.decoder, cache, 2.0 * inv_b * diff, g);
      *grad = g;
    }
    return loss;
  }

  const Mat o = select(oracle_norm);
  const Mat eps = select(noise);
  nn::MlpCache prior_cache, enc_cache, dec_cache;
  const Mat p_out = nn::forward(params.prior, d, &prior_cache);
  const Mat e_out = nn::forward(params.encoder, o, &enc_cache);
  const Mat mu_p = p_out.topRows(l);
  const Mat ls_p = clamp_cols(p_out.bottomRows(l));
  const Mat mu_e = spec.kl_residual ? Mat(mu_p + e_out.topRows(l))
                                    : Mat(e_out.topRows(l));
  const Mat ls_e = clamp_cols(e_out.bottomRows(l));
  const Mat sigma_eps = ls_e.array().exp().matrix().cwiseProduct(eps);
  const Mat z = mu_e + sigma_eps;
  const Mat dec = nn::forward(params.decoder, decoder_input(spec, d, z),
                              &dec_cache);
  const Mat diff = dec.topRows(a) - y;
  loss.l_action = diff.squaredNorm() * inv_b;

  Mat g_mu_e(l, b), g_ls_e(l, b), g_mu_p(l, b), g_ls_p(l, b);
  double kl_sum = 0.0;
  for (Eigen::Index c = 0; c < b; ++c) {
    nn::KlGrad kg;
    kl_sum += nn::kl_diag_gauss_log(mu_e.col(c), ls_e.col(c), mu_p.col(c),
                                    ls_p.col(c), grad ? &kg : nullptr);
    if (grad != nullptr) {
      g_mu_e.col(c) = kg.mu1;
      g_ls_e.col(c) = kg.log_std1;
      g_mu_p.col(c) = kg.mu2;
      g_ls_p.col(c) = kg.log_std2;
    }
  }
  loss.l_kl = kl_sum * inv_b;
  loss.total = loss.l_action + beta * loss.l_kl;
  if (grad == nullptr) return loss;

  // The decoder log std rows get no gradient.
  Mat d_dec = Mat::Zero(dec.rows(), b);
  d_dec.topRows(a) = 2.0 * inv_b * diff;
  Vec g_dec;
  const Mat d_in = nn::backward(params.decoder, dec_cache, d_dec, g_dec);
  const Mat dz = d_in.bottomRows(l);
  const double kb = beta * inv_b;

  const Mat d_mu_e = dz + kb * g_mu_e;
  Mat d_e_out(2 * l, b);
  d_e_out.topRows(l) = d_mu_e;
  d_e_out.bottomRows(l) =
      (dz.cwiseProduct(sigma_eps) + kb * g_ls_e)
          .cwiseProduct(clamp_mask(e_out.bottomRows(l)));
  Mat d_p_out(2 * l, b);
  d_p_out.topRows(l) = kb * g_mu_p;
  if (spec.kl_residual) d_p_out.topRows(l) += d_mu_e;
  d_p_out.bottomRows(l) =
      (kb * g_ls_p).cwiseProduct(clamp_mask(p_out.bottomRows(l)));

  Vec g_prior, g_enc;
  nn::backward(params.prior, prior_cache, d_p_out, g_prior);
  nn::backward(params.encoder, enc_cache, d_e_out, g_enc);
  grad->resize(params.n_params());
  *grad << g_prior, g_enc, g_dec;
  return loss;
}

}  // namespace wbt::student
