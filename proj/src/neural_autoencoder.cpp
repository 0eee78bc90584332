#include "bdc/neural_autoencoder.hpp"

#include <cmath>
#include <string>

#include "bdc/adam.hpp"
#include "bdc/estimators.hpp"

namespace bdc {
namespace {

void check_chain(const std::vector<DenseLayer>& layers, Index in, Index out, const char* what) {
  if (layers.empty()) fail(ErrorCode::InvalidArgument, std::string(what) + ": no layers");
  Index width = in;
  for (const auto& l : layers) {
    if (l.in() != width || l.bias.size() != l.out())
      fail(ErrorCode::InvalidArgument, std::string(what) + ": layer widths do not chain");
    if (!l.weights.allFinite() || !l.bias.allFinite())
      fail(ErrorCode::InvalidArgument, std::string(what) + ": non-finite parameter");
    width = l.out();
  }
  if (width != out) fail(ErrorCode::InvalidArgument, std::string(what) + ": wrong output width");
}

Matrix affine(const DenseLayer& l, const Matrix& in) {
  Matrix out = in * l.weights;
  out.rowwise() += l.bias.transpose();
  return out;
}

Matrix forward(const std::vector<DenseLayer>& layers, const Matrix& x) {
  Matrix a = x;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    a = affine(layers[k], a);
    if (k + 1 < layers.size()) a = a.cwiseMax(0.0);
  }
  return a;
}

DenseLayer he_layer(Index in, Index out, RngStream& rng) {
  return {rng.normal_matrix(in, out, std::sqrt(2.0 / static_cast<double>(in))), Vector::Zero(out)};
}

// Forward pass over a chain of layers that keeps what backprop needs.
struct Tape {
  std::vector<Matrix> inputs;  // input to layer k
  std::vector<Matrix> pre;     // pre-activation of layer k
  std::vector<bool> relu;
};

Matrix record(const std::vector<const DenseLayer*>& chain, const std::vector<bool>& relu, const Matrix& x,
              Tape& tape) {
  Matrix a = x;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    tape.inputs.push_back(a);
    Matrix z = affine(*chain[k], a);
    tape.pre.push_back(z);
    a = relu[k] ? Matrix(z.cwiseMax(0.0)) : z;
  }
  tape.relu = relu;
  return a;
}

}  // namespace

void Mlp::validate() const {
  if (encoder.empty() || decoder.empty()) fail(ErrorCode::InvalidArgument, "mlp: empty encoder or decoder");
  const Index d = input_dim();
  const Index p = latent_dim();
  check_chain(encoder, d, p, "mlp encoder");
  check_chain(decoder, p, d, "mlp decoder");
}

Index Mlp::parameter_count() const {
  Index count = 0;
  for (const auto* half : {&encoder, &decoder})
    for (const auto& l : *half) count += l.weights.size() + l.bias.size();
  return count;
}

Mlp init_mlp(Index input_dim, const std::vector<Index>& hidden, Index latent_dim, RngStream& rng) {
  require(input_dim > 0 && latent_dim > 0, "init_mlp: widths must be positive");
  for (Index w : hidden) require(w > 0, "init_mlp: hidden widths must be positive");
  Mlp m;
  Index width = input_dim;
  for (Index w : hidden) {
    m.encoder.push_back(he_layer(width, w, rng));
    width = w;
  }
  m.encoder.push_back(he_layer(width, latent_dim, rng));
  width = latent_dim;
  for (auto it = hidden.rbegin(); it != hidden.rend(); ++it) {
    m.decoder.push_back(he_layer(width, *it, rng));
    width = *it;
  }
  m.decoder.push_back(he_layer(width, input_dim, rng));
  return m;
}

Matrix mlp_encode(const Mlp& m, const Matrix& x) {
  if (x.cols() != m.input_dim())
    fail(ErrorCode::InvalidArgument, "mlp_encode: expected " + std::to_string(m.input_dim()) + " columns");
  return forward(m.encoder, x);
}

Matrix mlp_decode(const Mlp& m, const Matrix& z) {
  if (z.cols() != m.latent_dim())
    fail(ErrorCode::InvalidArgument, "mlp_decode: expected " + std::to_string(m.latent_dim()) + " columns");
  return forward(m.decoder, z);
}

HybridResult hybrid_backward(const Mlp& m, const Matrix& x, const Kernel& kernel, const ResponseTerm* responses) {
  if (!kernel.differentiable()) fail(ErrorCode::Unsupported, "hybrid_backward: kernel is not differentiable");
  if (x.cols() != m.input_dim()) fail(ErrorCode::InvalidArgument, "hybrid_backward: width mismatch");
  if (responses && responses->values.rows() != x.rows())
    fail(ErrorCode::InvalidArgument, "hybrid_backward: responses must have one row per sample");

  std::vector<const DenseLayer*> chain;
  std::vector<bool> relu;
  for (std::size_t k = 0; k < m.encoder.size(); ++k) {
    chain.push_back(&m.encoder[k]);
    relu.push_back(k + 1 < m.encoder.size());
  }
  for (std::size_t k = 0; k < m.decoder.size(); ++k) {
    chain.push_back(&m.decoder[k]);
    relu.push_back(k + 1 < m.decoder.size());
  }

  Tape tape;
  const Matrix recon = record(chain, relu, x, tape);

  HybridResult result;
  Matrix delta;
  if (responses) {
    const Matrix lb = gram(responses->kernel, responses->values, responses->values);
    result.loss = joint_mmd_sq(kernel, responses->kernel, {x, responses->values}, {recon, responses->values}) +
                  msre(x, recon);
    delta = rmmd_grad_reconstruction(kernel, x, recon, &lb);
  } else {
    result.loss = hybrid_loss(kernel, x, recon);
    delta = rmmd_grad_reconstruction(kernel, x, recon);
  }
  delta += (2.0 / static_cast<double>(x.rows() * x.cols())) * (recon - x);

  std::vector<DenseLayer> grads(chain.size());
  for (std::size_t k = chain.size(); k-- > 0;) {
    if (tape.relu[k]) {
      // Subgradient 0 at the kink.
      delta = delta.cwiseProduct((tape.pre[k].array() > 0.0).cast<double>().matrix());
    }
    grads[k].weights = tape.inputs[k].transpose() * delta;
    grads[k].bias = delta.colwise().sum().transpose();
    if (k > 0) delta = delta * chain[k]->weights.transpose();
  }
  result.grads.encoder.assign(grads.begin(), grads.begin() + static_cast<std::ptrdiff_t>(m.encoder.size()));
  result.grads.decoder.assign(grads.begin() + static_cast<std::ptrdiff_t>(m.encoder.size()), grads.end());
  return result;
}

Vector pack_parameters(const Mlp& m) {
  Vector out(m.parameter_count());
  Index pos = 0;
  for (const auto* half : {&m.encoder, &m.decoder})
    for (const auto& l : *half) {
      out.segment(pos, l.weights.size()) = flat(l.weights);
      pos += l.weights.size();
      out.segment(pos, l.bias.size()) = l.bias;
      pos += l.bias.size();
    }
  return out;
}

Vector pack_gradients(const MlpGrads& g) {
  Index count = 0;
  for (const auto* half : {&g.encoder, &g.decoder})
    for (const auto& l : *half) count += l.weights.size() + l.bias.size();
  Vector out(count);
  Index pos = 0;
  for (const auto* half : {&g.encoder, &g.decoder})
    for (const auto& l : *half) {
      out.segment(pos, l.weights.size()) = flat(l.weights);
      pos += l.weights.size();
      out.segment(pos, l.bias.size()) = l.bias;
      pos += l.bias.size();
    }
  return out;
}

void unpack_parameters(const Vector& values, Mlp& m) {
  require(values.size() == m.parameter_count(), "unpack_parameters: size mismatch");
  Index pos = 0;
  for (auto* half : {&m.encoder, &m.decoder})
    for (auto& l : *half) {
      flat(l.weights) = values.segment(pos, l.weights.size());
      pos += l.weights.size();
      l.bias = values.segment(pos, l.bias.size());
      pos += l.bias.size();
    }
}

Mlp train_nonlinear(const Matrix& x, const std::vector<Index>& hidden, Index latent_dim, const Kernel& kernel,
                    const TrainConfig& cfg, const TrainHooks& hooks, const std::optional<ResponseTerm>& responses) {
  cfg.validate();
  const Index n = x.rows();
  if (n < 1) fail(ErrorCode::InvalidArgument, "train_nonlinear: empty data");
  if (latent_dim < 1) fail(ErrorCode::InvalidArgument, "train_nonlinear: latent dimension must be positive");
  if (responses && responses->values.rows() != n)
    fail(ErrorCode::InvalidArgument, "train_nonlinear: responses must have one row per sample");

  const RngStream root(cfg.seed);
  RngStream init_rng = root.split(0);
  RngStream batch_rng = root.split(1);

  Mlp m = init_mlp(x.cols(), hidden, latent_dim, init_rng);
  Vector params = pack_parameters(m);
  Adam adam(cfg.adam(), params.size());

  for (Index epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    const auto batches = epoch_batches(n, cfg.batch_size, batch_rng);
    for (const auto& rows : batches) {
      const Matrix xb = gather_rows(x, rows);
      HybridResult r;
      if (responses) {
        const ResponseTerm rb{gather_rows(responses->values, rows), responses->kernel};
        r = hybrid_backward(m, xb, kernel, &rb);
      } else {
        r = hybrid_backward(m, xb, kernel);
      }
      loss_sum += r.loss;
      params += adam.step(pack_gradients(r.grads));
      unpack_parameters(params, m);
    }
    const double mean_loss = loss_sum / static_cast<double>(batches.size());
    if (!std::isfinite(mean_loss) || !params.allFinite())
      fail(ErrorCode::Divergence, "train_nonlinear: non-finite loss in epoch " + std::to_string(epoch));
    if (hooks.on_epoch) hooks.on_epoch(epoch, mean_loss);
  }
  return m;
}

}  // namespace bdc
