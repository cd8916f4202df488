#include "persuasion/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>

namespace persuasion {

const char* to_string(PredictorKind k) {
  switch (k) {
    case PredictorKind::Majority: return "majority";
    case PredictorKind::FeedForward: return "ff";
    case PredictorKind::Lstm: return "lstm";
  }
  return "?";
}

PredictorKind predictor_kind_from_name(const std::string& name) {
  if (name == "majority") return PredictorKind::Majority;
  if (name == "ff") return PredictorKind::FeedForward;
  if (name == "lstm") return PredictorKind::Lstm;
  throw std::invalid_argument("unknown predictor kind: " + name);
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Stable BCE from the logit: softplus(z) - y*z.
double bce_from_logit(double z, double y) {
  double sp = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return sp - y * z;
}

void fill_uniform(std::vector<double>& w, double radius, Rng& rng) {
  for (double& v : w) v = rng.uniform(-radius, radius);
}

}  // namespace

// ---------------------------------------------------------------- Majority

double MajorityModel::predict(int review_index) const {
  auto it = counts.find(review_index);
  if (it == counts.end() || it->second.second == 0) return global_go_rate;
  return static_cast<double>(it->second.first) / it->second.second;
}

MajorityModel majority_train(const std::vector<EpisodeTensor>& dataset) {
  MajorityModel model;
  long go = 0, total = 0;
  for (const EpisodeTensor& e : dataset) {
    for (std::size_t i = 0; i < e.rounds.size(); ++i) {
      // Human rows count only when the DM plausibly read the review
      // (reaction >= 3s, i.e. bin 4 or later); simulated rows always count.
      if (!e.simulated && e.reaction_bins[i] < 4) continue;
      auto& c = model.counts[e.review_index[i]];
      c.first += e.labels[i];
      c.second += 1;
      go += e.labels[i];
      total += 1;
    }
  }
  if (total == 0) throw TrainingError("majority_train: empty training set after filtering");
  model.global_go_rate = static_cast<double>(go) / total;
  return model;
}

// --------------------------------------------------------------------- MLP

// Layout: W0[h][in], b0[h], then (layers-1) x (W[h][h], b[h]), head w[h], b.
std::size_t MlpParams::param_count(int input, int hidden, int layers) {
  return static_cast<std::size_t>(hidden) * input + hidden +
         static_cast<std::size_t>(layers - 1) * (hidden * hidden + hidden) + hidden + 1;
}

MlpParams MlpParams::init(int input, int hidden, int layers, std::uint64_t seed) {
  if (layers < 1) throw std::invalid_argument("MLP needs at least one hidden layer");
  MlpParams p;
  p.input = input;
  p.hidden = hidden;
  p.layers = layers;
  p.w.resize(param_count(input, hidden, layers));
  Rng rng(derive_seed(seed, {kStreamInit, 1}));
  fill_uniform(p.w, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
  return p;
}

namespace {

struct MlpCache {
  // Pre-activation and post-ReLU values per hidden layer.
  std::vector<std::vector<double>> act;
  double logit = 0.0;
};

double mlp_forward_impl(const MlpParams& p, const double* x, MlpCache* cache) {
  const int h = p.hidden;
  std::vector<double> cur(h), next(h);
  std::size_t off = 0;
  for (int layer = 0; layer < p.layers; ++layer) {
    const int in_dim = layer == 0 ? p.input : h;
    const double* in = layer == 0 ? x : cur.data();
    const double* W = p.w.data() + off;
    const double* b = W + static_cast<std::size_t>(h) * in_dim;
    for (int j = 0; j < h; ++j) {
      double z = b[j];
      const double* row = W + static_cast<std::size_t>(j) * in_dim;
      for (int k = 0; k < in_dim; ++k) z += row[k] * in[k];
      next[j] = z > 0 ? z : 0.0;  // ReLU
    }
    cur.swap(next);
    if (cache) cache->act.push_back(cur);
    off += static_cast<std::size_t>(h) * in_dim + h;
  }
  const double* wo = p.w.data() + off;
  double z = wo[h];
  for (int j = 0; j < h; ++j) z += wo[j] * cur[j];
  if (cache) cache->logit = z;
  return z;
}

}  // namespace

double MlpParams::forward(const double* x) const {
  return sigmoid(mlp_forward_impl(*this, x, nullptr));
}

double MlpParams::loss_grad(const std::vector<const double*>& xs,
                            const std::vector<std::uint8_t>& ys,
                            std::vector<double>& grad) const {
  const int h = hidden;
  double loss = 0.0;
  std::vector<double> delta(h), delta_prev(h);
  for (std::size_t n = 0; n < xs.size(); ++n) {
    MlpCache cache;
    double z = mlp_forward_impl(*this, xs[n], &cache);
    double y = ys[n];
    loss += bce_from_logit(z, y);
    double dz = sigmoid(z) - y;

    // Head.
    std::size_t head_off = grad.size() - (h + 1);
    const double* wo = w.data() + head_off;
    const auto& top = cache.act[layers - 1];
    for (int j = 0; j < h; ++j) {
      grad[head_off + j] += dz * top[j];
      delta[j] = dz * wo[j] * (top[j] > 0 ? 1.0 : 0.0);
    }
    grad[head_off + h] += dz;

    // Hidden layers, top to bottom.
    std::size_t off = head_off;
    for (int layer = layers - 1; layer >= 0; --layer) {
      const int in_dim = layer == 0 ? input : h;
      off -= static_cast<std::size_t>(h) * in_dim + h;
      const double* in = layer == 0 ? xs[n] : cache.act[layer - 1].data();
      const double* W = w.data() + off;
      double* gW = grad.data() + off;
      double* gb = gW + static_cast<std::size_t>(h) * in_dim;
      std::fill(delta_prev.begin(), delta_prev.end(), 0.0);
      for (int j = 0; j < h; ++j) {
        double d = delta[j];
        if (d == 0.0) continue;
        gb[j] += d;
        double* grow = gW + static_cast<std::size_t>(j) * in_dim;
        const double* wrow = W + static_cast<std::size_t>(j) * in_dim;
        for (int k = 0; k < in_dim; ++k) {
          grow[k] += d * in[k];
          if (layer > 0) delta_prev[k] += d * wrow[k];
        }
      }
      if (layer > 0) {
        const auto& below = cache.act[layer - 1];
        for (int k = 0; k < h; ++k) {
          delta[k] = delta_prev[k] * (below[k] > 0 ? 1.0 : 0.0);
        }
      }
    }
  }
  return loss;
}

// -------------------------------------------------------------------- LSTM

// Layout per layer: Wx[4h][d], Wh[4h][h], b[4h], c0[h]; then head w[h], b.
// Gate row order: input, forget, cell candidate, output.
std::size_t LstmParams::param_count(int input, int hidden, int layers) {
  std::size_t n = 0;
  for (int l = 0; l < layers; ++l) {
    int d = l == 0 ? input : hidden;
    n += static_cast<std::size_t>(4 * hidden) * d + static_cast<std::size_t>(4 * hidden) * hidden +
         4 * hidden + hidden;
  }
  return n + hidden + 1;
}

LstmParams LstmParams::init(int input, int hidden, int layers, std::uint64_t seed) {
  if (layers < 1) throw std::invalid_argument("LSTM needs at least one layer");
  LstmParams p;
  p.input = input;
  p.hidden = hidden;
  p.layers = layers;
  p.w.resize(param_count(input, hidden, layers));
  Rng rng(derive_seed(seed, {kStreamInit, 2}));
  fill_uniform(p.w, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
  // The learned initial cell starts from zero.
  std::size_t off = 0;
  for (int l = 0; l < layers; ++l) {
    int d = l == 0 ? input : hidden;
    off += static_cast<std::size_t>(4 * hidden) * d + static_cast<std::size_t>(4 * hidden) * hidden +
           4 * hidden;
    std::fill(p.w.begin() + off, p.w.begin() + off + hidden, 0.0);
    off += hidden;
  }
  return p;
}

namespace {

struct LayerOffsets {
  std::size_t wx, wh, b, c0;
  int in_dim;
};

std::vector<LayerOffsets> lstm_offsets(const LstmParams& p) {
  std::vector<LayerOffsets> offs(p.layers);
  std::size_t off = 0;
  for (int l = 0; l < p.layers; ++l) {
    int d = l == 0 ? p.input : p.hidden;
    offs[l].in_dim = d;
    offs[l].wx = off;
    off += static_cast<std::size_t>(4 * p.hidden) * d;
    offs[l].wh = off;
    off += static_cast<std::size_t>(4 * p.hidden) * p.hidden;
    offs[l].b = off;
    off += 4 * p.hidden;
    offs[l].c0 = off;
    off += p.hidden;
  }
  return offs;
}

// Per-timestep, per-layer activations kept for backprop.
struct LstmCache {
  // [t][layer] -> vectors of size h (gates post-nonlinearity, c, tanh(c), h).
  std::vector<std::vector<std::array<std::vector<double>, 6>>> steps;
  std::vector<double> logits;
};

void lstm_forward_impl(const LstmParams& p, const EpisodeTensor& episode, LstmCache* cache,
                       std::vector<double>* probs) {
  const int h = p.hidden;
  const auto offs = lstm_offsets(p);
  const std::size_t head_off = p.w.size() - (h + 1);
  const double* wo = p.w.data() + head_off;
  const std::size_t T = episode.rounds.size();

  std::vector<std::vector<double>> hs(p.layers, std::vector<double>(h, 0.0));
  std::vector<std::vector<double>> cs(p.layers, std::vector<double>(h));
  for (int l = 0; l < p.layers; ++l) {
    const double* c0 = p.w.data() + offs[l].c0;
    std::copy(c0, c0 + h, cs[l].begin());
  }
  if (cache) cache->steps.resize(T);

  std::vector<double> xbuf;
  for (std::size_t t = 0; t < T; ++t) {
    const double* x = episode.rounds[t].data();
    if (cache) cache->steps[t].resize(p.layers);
    for (int l = 0; l < p.layers; ++l) {
      const int d = offs[l].in_dim;
      const double* in = l == 0 ? x : hs[l - 1].data();
      const double* Wx = p.w.data() + offs[l].wx;
      const double* Wh = p.w.data() + offs[l].wh;
      const double* b = p.w.data() + offs[l].b;
      std::vector<double> ig(h), fg(h), gg(h), og(h), tc(h);
      std::vector<double> c_prev = cs[l];
      std::vector<double> h_prev = hs[l];
      for (int j = 0; j < 4 * h; ++j) {
        double z = b[j];
        const double* xrow = Wx + static_cast<std::size_t>(j) * d;
        for (int k = 0; k < d; ++k) z += xrow[k] * in[k];
        const double* hrow = Wh + static_cast<std::size_t>(j) * h;
        for (int k = 0; k < h; ++k) z += hrow[k] * h_prev[k];
        int gate = j / h, idx = j % h;
        switch (gate) {
          case 0: ig[idx] = sigmoid(z); break;
          case 1: fg[idx] = sigmoid(z); break;
          case 2: gg[idx] = std::tanh(z); break;
          case 3: og[idx] = sigmoid(z); break;
        }
      }
      for (int j = 0; j < h; ++j) {
        cs[l][j] = fg[j] * c_prev[j] + ig[j] * gg[j];
        tc[j] = std::tanh(cs[l][j]);
        hs[l][j] = og[j] * tc[j];
      }
      if (cache) {
        auto& slot = cache->steps[t][l];
        slot[0] = std::move(ig);
        slot[1] = std::move(fg);
        slot[2] = std::move(gg);
        slot[3] = std::move(og);
        slot[4] = cs[l];
        slot[5] = tc;
      }
    }
    double z = wo[h];
    for (int j = 0; j < h; ++j) z += wo[j] * hs[p.layers - 1][j];
    if (cache) cache->logits.push_back(z);
    if (probs) probs->push_back(sigmoid(z));
  }
  (void)xbuf;
}

}  // namespace

std::vector<double> LstmParams::forward_episode(const EpisodeTensor& episode) const {
  std::vector<double> probs;
  probs.reserve(episode.rounds.size());
  lstm_forward_impl(*this, episode, nullptr, &probs);
  return probs;
}

double LstmParams::loss_grad_episode(const EpisodeTensor& episode,
                                     std::vector<double>& grad) const {
  const int h = hidden;
  const auto offs = lstm_offsets(*this);
  const std::size_t head_off = w.size() - (h + 1);
  const double* wo = w.data() + head_off;
  const std::size_t T = episode.rounds.size();

  LstmCache cache;
  lstm_forward_impl(*this, episode, &cache, nullptr);

  double loss = 0.0;
  std::vector<double> dlogit(T);
  for (std::size_t t = 0; t < T; ++t) {
    double y = episode.labels[t];
    loss += bce_from_logit(cache.logits[t], y);
    dlogit[t] = sigmoid(cache.logits[t]) - y;
  }

  std::vector<std::vector<double>> dh_next(layers, std::vector<double>(h, 0.0));
  std::vector<std::vector<double>> dc_next(layers, std::vector<double>(h, 0.0));
  std::vector<double> dz(4 * h), dx_below(std::max(input, h));

  for (std::size_t ti = T; ti-- > 0;) {
    // Gradient flowing into the top layer's hidden state from the head.
    std::vector<double> dh_from_above(h, 0.0);
    const auto& top = cache.steps[ti][layers - 1];
    for (int j = 0; j < h; ++j) {
      double ht = top[3][j] * top[5][j];
      grad[head_off + j] += dlogit[ti] * ht;
      dh_from_above[j] = dlogit[ti] * wo[j];
    }
    grad[head_off + h] += dlogit[ti];

    for (int l = layers - 1; l >= 0; --l) {
      const auto& s = cache.steps[ti][l];
      const auto& ig = s[0];
      const auto& fg = s[1];
      const auto& gg = s[2];
      const auto& og = s[3];
      const auto& tc = s[5];
      const int d = offs[l].in_dim;
      // Previous states: from the prior timestep, or the initial values.
      const double* c_prev;
      const double* h_prev;
      std::vector<double> zeros(h, 0.0);
      if (ti > 0) {
        c_prev = cache.steps[ti - 1][l][4].data();
        auto& prev = cache.steps[ti - 1][l];
        // h_prev = o * tanh(c) of the previous step; rebuild into a buffer.
        static thread_local std::vector<double> hb;
        hb.resize(h);
        for (int j = 0; j < h; ++j) hb[j] = prev[3][j] * prev[5][j];
        h_prev = hb.data();
      } else {
        c_prev = w.data() + offs[l].c0;
        h_prev = zeros.data();
      }
      const double* in =
          l == 0 ? episode.rounds[ti].data()
                 : nullptr;  // layer input; for l>0 rebuilt below from layer l-1's h
      static thread_local std::vector<double> inbuf;
      if (l > 0) {
        inbuf.resize(h);
        const auto& below = cache.steps[ti][l - 1];
        for (int j = 0; j < h; ++j) inbuf[j] = below[3][j] * below[5][j];
        in = inbuf.data();
      }

      for (int j = 0; j < h; ++j) {
        double dh = dh_from_above[j] + dh_next[l][j];
        double do_ = dh * tc[j];
        double dc = dh * og[j] * (1.0 - tc[j] * tc[j]) + dc_next[l][j];
        double di = dc * gg[j];
        double df = dc * c_prev[j];
        double dg = dc * ig[j];
        dc_next[l][j] = dc * fg[j];
        dz[0 * h + j] = di * ig[j] * (1.0 - ig[j]);
        dz[1 * h + j] = df * fg[j] * (1.0 - fg[j]);
        dz[2 * h + j] = dg * (1.0 - gg[j] * gg[j]);
        dz[3 * h + j] = do_ * og[j] * (1.0 - og[j]);
      }
      if (ti == 0) {
        // c_prev was the learned initial cell.
        double* gc0 = grad.data() + offs[l].c0;
        for (int j = 0; j < h; ++j) gc0[j] += dc_next[l][j];
        std::fill(dc_next[l].begin(), dc_next[l].end(), 0.0);
      }

      double* gWx = grad.data() + offs[l].wx;
      double* gWh = grad.data() + offs[l].wh;
      double* gb = grad.data() + offs[l].b;
      const double* Wx = w.data() + offs[l].wx;
      const double* Wh = w.data() + offs[l].wh;
      std::fill(dx_below.begin(), dx_below.begin() + d, 0.0);
      std::fill(dh_next[l].begin(), dh_next[l].end(), 0.0);
      for (int j = 0; j < 4 * h; ++j) {
        double dzj = dz[j];
        gb[j] += dzj;
        double* gx = gWx + static_cast<std::size_t>(j) * d;
        const double* xw = Wx + static_cast<std::size_t>(j) * d;
        for (int k = 0; k < d; ++k) {
          gx[k] += dzj * in[k];
          dx_below[k] += dzj * xw[k];
        }
        double* gh = gWh + static_cast<std::size_t>(j) * h;
        const double* hw = Wh + static_cast<std::size_t>(j) * h;
        for (int k = 0; k < h; ++k) {
          gh[k] += dzj * h_prev[k];
          dh_next[l][k] += dzj * hw[k];
        }
      }
      if (l > 0) {
        dh_from_above.assign(dx_below.begin(), dx_below.begin() + h);
      }
    }
  }
  return loss;
}

// ------------------------------------------------------------------- model

std::vector<double> Model::predict_episode(const EpisodeTensor& episode) const {
  std::vector<double> probs;
  switch (config.kind) {
    case PredictorKind::Majority:
      probs.reserve(episode.rounds.size());
      for (int r : episode.review_index) probs.push_back(majority.predict(r));
      return probs;
    case PredictorKind::FeedForward: {
      MlpParams p;
      p.input = kFeatureCount;
      p.hidden = config.hidden_size;
      p.layers = config.n_layers;
      p.w = params;
      probs.reserve(episode.rounds.size());
      for (const auto& x : episode.rounds) probs.push_back(p.forward(x.data()));
      return probs;
    }
    case PredictorKind::Lstm: {
      LstmParams p;
      p.input = kFeatureCount;
      p.hidden = config.hidden_size;
      p.layers = config.n_layers;
      p.w = params;
      return p.forward_episode(episode);
    }
  }
  return probs;
}

void AdamOptimizer::step(std::vector<double>& params, const std::vector<double>& grad) {
  if (m.empty()) {
    m.assign(params.size(), 0.0);
    v.assign(params.size(), 0.0);
  }
  ++step_count;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
    params[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
  }
}

Model init_model(const PredictorConfig& config) {
  Model model;
  model.config = config;
  switch (config.kind) {
    case PredictorKind::Majority:
      break;
    case PredictorKind::FeedForward:
      model.params = MlpParams::init(kFeatureCount, config.hidden_size, config.n_layers,
                                     config.seed)
                         .w;
      break;
    case PredictorKind::Lstm:
      model.params =
          LstmParams::init(kFeatureCount, config.hidden_size, config.n_layers, config.seed).w;
      break;
  }
  return model;
}

double train_epoch(Model& model, AdamOptimizer& adam, const std::vector<EpisodeTensor>& data,
                   std::uint64_t shuffle_seed) {
  Rng rng(shuffle_seed);
  double total_loss = 0.0;
  long total_rounds = 0;

  if (model.config.kind == PredictorKind::FeedForward) {
    MlpParams p;
    p.input = kFeatureCount;
    p.hidden = model.config.hidden_size;
    p.layers = model.config.n_layers;
    p.w = std::move(model.params);
    std::vector<std::pair<int, int>> rows;  // (episode, round)
    for (int e = 0; e < static_cast<int>(data.size()); ++e) {
      for (int r = 0; r < static_cast<int>(data[e].rounds.size()); ++r) rows.push_back({e, r});
    }
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      std::size_t j = i + rng.below(rows.size() - i);
      std::swap(rows[i], rows[j]);
    }
    const std::size_t batch = 32;
    std::vector<double> grad(p.w.size());
    std::vector<const double*> xs;
    std::vector<std::uint8_t> ys;
    for (std::size_t start = 0; start < rows.size(); start += batch) {
      std::size_t end = std::min(start + batch, rows.size());
      xs.clear();
      ys.clear();
      for (std::size_t i = start; i < end; ++i) {
        xs.push_back(data[rows[i].first].rounds[rows[i].second].data());
        ys.push_back(data[rows[i].first].labels[rows[i].second]);
      }
      std::fill(grad.begin(), grad.end(), 0.0);
      double loss = p.loss_grad(xs, ys, grad);
      if (!std::isfinite(loss)) {
        throw TrainingError("ff training diverged (non-finite loss) at batch starting row " +
                            std::to_string(start));
      }
      double scale = 1.0 / static_cast<double>(xs.size());
      for (double& g : grad) g *= scale;
      adam.step(p.w, grad);
      total_loss += loss;
      total_rounds += static_cast<long>(xs.size());
    }
    model.params = std::move(p.w);
  } else if (model.config.kind == PredictorKind::Lstm) {
    LstmParams p;
    p.input = kFeatureCount;
    p.hidden = model.config.hidden_size;
    p.layers = model.config.n_layers;
    p.w = std::move(model.params);
    std::vector<int> order(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) order[i] = static_cast<int>(i);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      std::size_t j = i + rng.below(order.size() - i);
      std::swap(order[i], order[j]);
    }
    std::vector<double> grad(p.w.size());
    for (int e : order) {
      const EpisodeTensor& episode = data[e];
      if (episode.rounds.empty()) continue;
      std::fill(grad.begin(), grad.end(), 0.0);
      double loss = p.loss_grad_episode(episode, grad);
      if (!std::isfinite(loss)) {
        throw TrainingError("lstm training diverged (non-finite loss) on episode " +
                            episode.dm_id + "/" + episode.strategy_id);
      }
      double scale = 1.0 / static_cast<double>(episode.rounds.size());
      for (double& g : grad) g *= scale;
      adam.step(p.w, grad);
      total_loss += loss;
      total_rounds += static_cast<long>(episode.rounds.size());
    }
    model.params = std::move(p.w);
  } else {
    throw TrainingError("train_epoch: majority model is not gradient-trained");
  }
  return total_rounds > 0 ? total_loss / total_rounds : 0.0;
}

Model train(const PredictorConfig& config, const std::vector<EpisodeTensor>& dataset,
            TrainReport* report) {
  if (dataset.empty()) throw TrainingError("train: empty dataset");
  if (config.kind == PredictorKind::Majority) {
    Model model;
    model.config = config;
    model.majority = majority_train(dataset);
    return model;
  }
  Model model = init_model(config);
  AdamOptimizer adam;
  adam.lr = config.learning_rate;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double loss = train_epoch(model, adam, dataset,
                              derive_seed(config.seed, {kStreamEpoch,
                                                        static_cast<std::uint64_t>(epoch)}));
    if (report) report->epoch_loss.push_back(loss);
  }
  return model;
}

std::vector<Model> train_ensemble(const PredictorConfig& config,
                                  const std::vector<EpisodeTensor>& dataset, int threads) {
  std::vector<Model> members(kEnsembleSize);
  auto run = [&](int i) {
    PredictorConfig c = config;
    c.seed = static_cast<std::uint64_t>(i + 1);  // seeds 1..15
    members[i] = train(c, dataset);
  };
  threads = std::max(1, threads);
  if (threads == 1) {
    for (int i = 0; i < kEnsembleSize; ++i) run(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < kEnsembleSize; i += threads) run(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  return members;
}

// ------------------------------------------------------------- checkpoints

namespace {

constexpr char kMagic[4] = {'P', 'G', 'M', 'D'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& f, T v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T get(std::ifstream& f) {
  T v;
  f.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!f) throw std::runtime_error("truncated checkpoint");
  return v;
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(kMagic, 4);
  put(f, kVersion);
  put(f, static_cast<std::uint8_t>(model.config.kind));
  put(f, static_cast<std::int32_t>(model.config.hidden_size));
  put(f, static_cast<std::int32_t>(model.config.n_layers));
  put(f, model.config.learning_rate);
  put(f, static_cast<std::int32_t>(model.config.epochs));
  put(f, model.config.seed);
  put(f, model.corpus_hash);
  put(f, model.run_config_hash);
  if (model.config.kind == PredictorKind::Majority) {
    put(f, model.majority.global_go_rate);
    // Sort entries for a canonical byte layout.
    std::vector<std::pair<int, std::pair<int, int>>> entries(model.majority.counts.begin(),
                                                             model.majority.counts.end());
    std::sort(entries.begin(), entries.end());
    put(f, static_cast<std::uint64_t>(entries.size()));
    for (const auto& [review, c] : entries) {
      put(f, static_cast<std::int32_t>(review));
      put(f, static_cast<std::int32_t>(c.first));
      put(f, static_cast<std::int32_t>(c.second));
    }
  } else {
    put(f, static_cast<std::uint64_t>(model.params.size()));
    f.write(reinterpret_cast<const char*>(model.params.data()),
            static_cast<std::streamsize>(model.params.size() * sizeof(double)));
  }
}

Model load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error(path + ": not a model checkpoint");
  }
  auto version = get<std::uint32_t>(f);
  if (version != kVersion) {
    throw std::runtime_error(path + ": unsupported checkpoint version " +
                             std::to_string(version));
  }
  Model model;
  model.config.kind = static_cast<PredictorKind>(get<std::uint8_t>(f));
  model.config.hidden_size = get<std::int32_t>(f);
  model.config.n_layers = get<std::int32_t>(f);
  model.config.learning_rate = get<double>(f);
  model.config.epochs = get<std::int32_t>(f);
  model.config.seed = get<std::uint64_t>(f);
  model.corpus_hash = get<std::uint64_t>(f);
  model.run_config_hash = get<std::uint64_t>(f);
  if (model.config.kind == PredictorKind::Majority) {
    model.majority.global_go_rate = get<double>(f);
    auto n = get<std::uint64_t>(f);
    for (std::uint64_t i = 0; i < n; ++i) {
      int review = get<std::int32_t>(f);
      int go = get<std::int32_t>(f);
      int total = get<std::int32_t>(f);
      model.majority.counts[review] = {go, total};
    }
  } else {
    auto n = get<std::uint64_t>(f);
    model.params.resize(n);
    f.read(reinterpret_cast<char*>(model.params.data()),
           static_cast<std::streamsize>(n * sizeof(double)));
    if (!f) throw std::runtime_error(path + ": truncated parameter block");
  }
  return model;
}

}  // namespace persuasion
