#include "partgan/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace partgan {

namespace {

using Eigen::Index;
using ConstMat = Eigen::Map<const MatrixRM>;
using MutMat = Eigen::Map<MatrixRM>;
using ConstVec = Eigen::Map<const Eigen::VectorXd>;
using MutVec = Eigen::Map<Eigen::VectorXd>;

Shape batched(Index n, const Shape& per_sample) {
  Shape s;
  s.reserve(per_sample.size() + 1);
  s.push_back(n);
  s.insert(s.end(), per_sample.begin(), per_sample.end());
  return s;
}

// ---- dense ----

Tensor dense_fwd(const Dense& d, const double* p, const Tensor& x) {
  Index n = x.dim(0);
  Tensor y(batched(n, {d.out_dim}));
  ConstMat w(p, d.out_dim, d.in_dim);
  ConstVec b(p + d.out_dim * d.in_dim, d.out_dim);
  y.rows().noalias() = x.rows() * w.transpose();
  y.rows().rowwise() += b.transpose();
  return y;
}

void dense_bwd(const Dense& d, const double* p, const Tensor& x, const Tensor& gy, double* gp, Tensor& gx) {
  ConstMat w(p, d.out_dim, d.in_dim);
  MutMat gw(gp, d.out_dim, d.in_dim);
  MutVec gb(gp + d.out_dim * d.in_dim, d.out_dim);
  gw.noalias() = gy.rows().transpose() * x.rows();
  gb = gy.rows().colwise().sum().transpose();
  gx.rows().noalias() = gy.rows() * w;
}

// ---- conv2d (im2col per sample) ----

struct ConvDims {
  Index h, w, oh, ow, cols;  // cols = in_ch * k * k
};

ConvDims conv_dims(const Conv2d& c, const Shape& in) {
  ConvDims d;
  d.h = in[1];
  d.w = in[2];
  d.oh = (d.h + 2 * c.padding - c.kernel) / c.stride + 1;
  d.ow = (d.w + 2 * c.padding - c.kernel) / c.stride + 1;
  d.cols = c.in_ch * c.kernel * c.kernel;
  return d;
}

void im2col(const Conv2d& c, const ConvDims& d, const double* x, MatrixRM& col) {
  for (Index ch = 0; ch < c.in_ch; ++ch) {
    const double* plane = x + ch * d.h * d.w;
    for (Index ki = 0; ki < c.kernel; ++ki) {
      for (Index kj = 0; kj < c.kernel; ++kj) {
        Index row = (ch * c.kernel + ki) * c.kernel + kj;
        double* dst = col.data() + row * d.oh * d.ow;
        for (Index oi = 0; oi < d.oh; ++oi) {
          Index si = oi * c.stride - c.padding + ki;
          if (si < 0 || si >= d.h) {
            std::fill(dst + oi * d.ow, dst + (oi + 1) * d.ow, 0.0);
            continue;
          }
          for (Index oj = 0; oj < d.ow; ++oj) {
            Index sj = oj * c.stride - c.padding + kj;
            dst[oi * d.ow + oj] = (sj >= 0 && sj < d.w) ? plane[si * d.w + sj] : 0.0;
          }
        }
      }
    }
  }
}

Tensor conv_fwd(const Conv2d& c, const double* p, const Tensor& x, const Shape& in_shape) {
  Index n = x.dim(0);
  ConvDims d = conv_dims(c, in_shape);
  Tensor y(batched(n, {c.out_ch, d.oh, d.ow}));
  ConstMat w(p, c.out_ch, d.cols);
  ConstVec b(p + c.out_ch * d.cols, c.out_ch);
  MatrixRM col(d.cols, d.oh * d.ow);
  Index xs = shape_size(in_shape);
  Index ys = c.out_ch * d.oh * d.ow;
  for (Index i = 0; i < n; ++i) {
    im2col(c, d, x.data().data() + i * xs, col);
    MutMat out(y.data().data() + i * ys, c.out_ch, d.oh * d.ow);
    out.noalias() = w * col;
    out.colwise() += b;
  }
  return y;
}

void conv_bwd(const Conv2d& c, const double* p, const Tensor& x, const Shape& in_shape, const Tensor& gy,
              double* gp, Tensor& gx) {
  Index n = x.dim(0);
  ConvDims d = conv_dims(c, in_shape);
  ConstMat w(p, c.out_ch, d.cols);
  MutMat gw(gp, c.out_ch, d.cols);
  MutVec gb(gp + c.out_ch * d.cols, c.out_ch);
  gw.setZero();
  gb.setZero();
  MatrixRM col(d.cols, d.oh * d.ow);
  MatrixRM gcol(d.cols, d.oh * d.ow);
  Index xs = shape_size(in_shape);
  Index ys = c.out_ch * d.oh * d.ow;
  gx.data().setZero();
  for (Index i = 0; i < n; ++i) {
    im2col(c, d, x.data().data() + i * xs, col);
    ConstMat go(gy.data().data() + i * ys, c.out_ch, d.oh * d.ow);
    gw.noalias() += go * col.transpose();
    gb += go.rowwise().sum();
    gcol.noalias() = w.transpose() * go;
    // col2im scatter-add
    double* gplane = gx.data().data() + i * xs;
    for (Index ch = 0; ch < c.in_ch; ++ch) {
      for (Index ki = 0; ki < c.kernel; ++ki) {
        for (Index kj = 0; kj < c.kernel; ++kj) {
          Index row = (ch * c.kernel + ki) * c.kernel + kj;
          const double* src = gcol.data() + row * d.oh * d.ow;
          for (Index oi = 0; oi < d.oh; ++oi) {
            Index si = oi * c.stride - c.padding + ki;
            if (si < 0 || si >= d.h) continue;
            for (Index oj = 0; oj < d.ow; ++oj) {
              Index sj = oj * c.stride - c.padding + kj;
              if (sj < 0 || sj >= d.w) continue;
              gplane[(ch * d.h + si) * d.w + sj] += src[oi * d.ow + oj];
            }
          }
        }
      }
    }
  }
}

// ---- batch norm ----

// Layout: x is [N, C] or [N, C, H, W]; statistics are per channel over the
// N * spatial slots. Biased variance normalizes; the running variance buffer
// stores the unbiased estimate.
struct BnDims {
  Index n, c, s;  // batch, channels, spatial size
};

BnDims bn_dims(const Tensor& x) {
  BnDims d;
  d.n = x.dim(0);
  d.c = x.dim(1);
  d.s = x.size() / (d.n * d.c);
  return d;
}

Tensor bn_fwd(const BatchNorm& b, const double* p, const double* buf_read, double* buf_write,
              const Tensor& x, Mode mode, LayerTrace* tr) {
  BnDims d = bn_dims(x);
  ConstVec gamma(p, b.channels);
  ConstVec beta(p + b.channels, b.channels);
  Tensor y(Shape(x.shape()));
  Eigen::ArrayXd mean(d.c), var(d.c);
  if (mode == Mode::train) {
    double m = static_cast<double>(d.n * d.s);
    for (Index c = 0; c < d.c; ++c) {
      double sum = 0, sq = 0;
      for (Index i = 0; i < d.n; ++i) {
        const double* seg = x.data().data() + (i * d.c + c) * d.s;
        for (Index t = 0; t < d.s; ++t) sum += seg[t];
      }
      mean[c] = sum / m;
      for (Index i = 0; i < d.n; ++i) {
        const double* seg = x.data().data() + (i * d.c + c) * d.s;
        for (Index t = 0; t < d.s; ++t) sq += (seg[t] - mean[c]) * (seg[t] - mean[c]);
      }
      var[c] = sq / m;
    }
    if (buf_write) {
      MutVec rm(buf_write, b.channels);
      MutVec rv(buf_write + b.channels, b.channels);
      double unbias = m > 1 ? m / (m - 1) : 1.0;
      for (Index c = 0; c < d.c; ++c) {
        rm[c] = (1 - b.momentum) * rm[c] + b.momentum * mean[c];
        rv[c] = (1 - b.momentum) * rv[c] + b.momentum * var[c] * unbias;
      }
    }
  } else {
    for (Index c = 0; c < d.c; ++c) {
      mean[c] = buf_read[c];
      var[c] = buf_read[b.channels + c];
    }
  }
  Eigen::ArrayXd inv_std = (var + b.epsilon).sqrt().inverse();
  Tensor xhat(Shape(x.shape()));
  for (Index i = 0; i < d.n; ++i) {
    for (Index c = 0; c < d.c; ++c) {
      Index off = (i * d.c + c) * d.s;
      for (Index t = 0; t < d.s; ++t) {
        double h = (x[off + t] - mean[c]) * inv_std[c];
        xhat[off + t] = h;
        y[off + t] = gamma[c] * h + beta[c];
      }
    }
  }
  if (tr) {
    tr->mean = std::move(mean);
    tr->inv_std = std::move(inv_std);
    tr->normalized = std::move(xhat);
  }
  return y;
}

void bn_bwd(const BatchNorm& b, const double* p, const LayerTrace& tr, const Tensor& x, const Tensor& gy,
            Mode mode, double* gp, Tensor& gx) {
  BnDims d = bn_dims(x);
  ConstVec gamma(p, b.channels);
  MutVec dgamma(gp, b.channels);
  MutVec dbeta(gp + b.channels, b.channels);
  dgamma.setZero();
  dbeta.setZero();
  for (Index i = 0; i < d.n; ++i) {
    for (Index c = 0; c < d.c; ++c) {
      Index off = (i * d.c + c) * d.s;
      for (Index t = 0; t < d.s; ++t) {
        dgamma[c] += gy[off + t] * tr.normalized[off + t];
        dbeta[c] += gy[off + t];
      }
    }
  }
  if (mode == Mode::eval) {
    // running stats are constants here
    for (Index i = 0; i < d.n; ++i)
      for (Index c = 0; c < d.c; ++c) {
        Index off = (i * d.c + c) * d.s;
        for (Index t = 0; t < d.s; ++t) gx[off + t] = gy[off + t] * gamma[c] * tr.inv_std[c];
      }
    return;
  }
  double m = static_cast<double>(d.n * d.s);
  for (Index c = 0; c < d.c; ++c) {
    // gradients through the batch mean and variance
    double dvar = 0, dmean = 0, sum_centered = 0;
    double istd = tr.inv_std[c];
    for (Index i = 0; i < d.n; ++i) {
      Index off = (i * d.c + c) * d.s;
      for (Index t = 0; t < d.s; ++t) {
        double dxhat = gy[off + t] * gamma[c];
        double centered = x[off + t] - tr.mean[c];
        dvar += dxhat * centered;
        dmean -= dxhat;
        sum_centered += centered;
      }
    }
    dvar *= -0.5 * istd * istd * istd;
    dmean = dmean * istd + dvar * (-2.0 / m) * sum_centered;
    for (Index i = 0; i < d.n; ++i) {
      Index off = (i * d.c + c) * d.s;
      for (Index t = 0; t < d.s; ++t) {
        double dxhat = gy[off + t] * gamma[c];
        gx[off + t] = dxhat * istd + dvar * 2.0 * (x[off + t] - tr.mean[c]) / m + dmean / m;
      }
    }
  }
}

// ---- upsample (nearest) ----

Tensor upsample_fwd(const Upsample& u, const Tensor& x, const Shape& in_shape) {
  Index n = x.dim(0), c = in_shape[0], h = in_shape[1], w = in_shape[2];
  Index f = u.scale_factor;
  Tensor y(batched(n, {c, h * f, w * f}));
  for (Index i = 0; i < n; ++i)
    for (Index ch = 0; ch < c; ++ch) {
      const double* src = x.data().data() + (i * c + ch) * h * w;
      double* dst = y.data().data() + (i * c + ch) * h * f * w * f;
      for (Index oi = 0; oi < h * f; ++oi)
        for (Index oj = 0; oj < w * f; ++oj) dst[oi * w * f + oj] = src[(oi / f) * w + (oj / f)];
    }
  return y;
}

void upsample_bwd(const Upsample& u, const Shape& in_shape, const Tensor& gy, Tensor& gx) {
  Index n = gy.dim(0), c = in_shape[0], h = in_shape[1], w = in_shape[2];
  Index f = u.scale_factor;
  gx.data().setZero();
  for (Index i = 0; i < n; ++i)
    for (Index ch = 0; ch < c; ++ch) {
      double* dst = gx.data().data() + (i * c + ch) * h * w;
      const double* src = gy.data().data() + (i * c + ch) * h * f * w * f;
      for (Index oi = 0; oi < h * f; ++oi)
        for (Index oj = 0; oj < w * f; ++oj) dst[(oi / f) * w + (oj / f)] += src[oi * w * f + oj];
    }
}

}  // namespace

bool Network::has_stochastic_layer() const {
  return std::any_of(layers_.begin(), layers_.end(), [](const LayerSpec& s) { return layer_is_stochastic(s); });
}

Network build_network(std::vector<LayerSpec> specs, Shape input_shape, std::uint64_t seed, double init_std) {
  if (specs.empty()) throw std::invalid_argument("network spec list is empty");
  if (input_shape.empty()) throw std::invalid_argument("network input shape is empty");
  for (Eigen::Index d : input_shape)
    if (d < 1) throw std::invalid_argument("network input shape extents must be positive");

  Network net;
  net.layers_ = std::move(specs);
  net.shapes_.push_back(std::move(input_shape));
  net.param_offsets_.push_back(0);
  net.buffer_offsets_.push_back(0);
  for (std::size_t i = 0; i < net.layers_.size(); ++i) {
    validate_layer_fields(net.layers_[i], i);
    net.shapes_.push_back(layer_output_shape(net.layers_[i], net.shapes_.back(), i));
    net.param_offsets_.push_back(net.param_offsets_.back() + layer_param_count(net.layers_[i]));
    net.buffer_offsets_.push_back(net.buffer_offsets_.back() + layer_buffer_count(net.layers_[i]));
  }
  net.params_ = Eigen::VectorXd::Zero(net.param_offsets_.back());
  net.buffers_ = Eigen::VectorXd::Zero(net.buffer_offsets_.back());

  Rng rng(seed);
  for (std::size_t i = 0; i < net.layers_.size(); ++i) {
    double* p = net.params_.data() + net.param_offsets_[i];
    if (const auto* d = std::get_if<Dense>(&net.layers_[i])) {
      for (Eigen::Index k = 0; k < d->out_dim * d->in_dim; ++k) p[k] = rng.normal() * init_std;
    } else if (const auto* c = std::get_if<Conv2d>(&net.layers_[i])) {
      Eigen::Index nw = c->out_ch * c->in_ch * c->kernel * c->kernel;
      for (Eigen::Index k = 0; k < nw; ++k) p[k] = rng.normal() * init_std;
    } else if (const auto* b = std::get_if<BatchNorm>(&net.layers_[i])) {
      for (Eigen::Index k = 0; k < b->channels; ++k) p[k] = 1.0;  // scale
      double* buf = net.buffers_.data() + net.buffer_offsets_[i];
      for (Eigen::Index k = 0; k < b->channels; ++k) buf[b->channels + k] = 1.0;  // running var
    }
  }
  return net;
}

namespace {

void check_batch(const Network& net, const Tensor& batch) {
  const Shape& in = net.input_shape();
  bool ok = batch.rank() == in.size() + 1 && batch.dim(0) >= 1;
  if (ok)
    for (std::size_t i = 0; i < in.size(); ++i) ok = ok && batch.dim(i + 1) == in[i];
  if (!ok)
    throw std::invalid_argument("batch shape " + shape_to_string(batch.shape()) +
                                " does not match network input " + shape_to_string(in));
}

Tensor run_layer(const Network& net, std::size_t i, const Tensor& x, Mode mode, Rng* rng,
                 LayerTrace* tr, Eigen::VectorXd* mutable_buffers) {
  const LayerSpec& spec = net.layers()[i];
  const double* p = net.params().data() + net.param_offset(i);
  Tensor y;
  if (const auto* d = std::get_if<Dense>(&spec)) {
    y = dense_fwd(*d, p, x);
  } else if (const auto* c = std::get_if<Conv2d>(&spec)) {
    y = conv_fwd(*c, p, x, net.shape_before(i));
  } else if (const auto* b = std::get_if<BatchNorm>(&spec)) {
    const double* br = net.buffers().data() + net.buffer_offset(i);
    double* bw = (mode == Mode::train && mutable_buffers)
                     ? mutable_buffers->data() + net.buffer_offset(i)
                     : nullptr;
    y = bn_fwd(*b, p, br, bw, x, mode, tr);
  } else if (const auto* u = std::get_if<Upsample>(&spec)) {
    y = upsample_fwd(*u, x, net.shape_before(i));
  } else if (const auto* dr = std::get_if<Dropout>(&spec)) {
    if (mode == Mode::train) {
      Tensor mask(Shape(x.shape()));
      double keep = 1.0 - dr->rate;
      for (Eigen::Index k = 0; k < mask.size(); ++k) mask[k] = (rng->uniform() >= dr->rate) ? 1.0 / keep : 0.0;
      y = Tensor(Shape(x.shape()), x.data() * mask.data());
      if (tr) tr->mask = std::move(mask);
    } else {
      y = x;
    }
  } else if (std::holds_alternative<ReLU>(spec)) {
    y = Tensor(Shape(x.shape()), x.data().max(0.0));
  } else if (const auto* l = std::get_if<LeakyReLU>(&spec)) {
    y = Tensor(Shape(x.shape()), (x.data() >= 0.0).select(x.data(), x.data() * l->slope));
  } else if (std::holds_alternative<Tanh>(spec)) {
    y = Tensor(Shape(x.shape()), x.data().tanh());
  } else if (std::holds_alternative<Sigmoid>(spec)) {
    y = Tensor(Shape(x.shape()), ((-x.data()).exp() + 1.0).inverse());
  } else if (std::holds_alternative<Reshape>(spec)) {
    y = x.reshaped(batched(x.dim(0), net.shape_after(i)));
  } else {
    throw std::logic_error("unhandled layer");
  }
  return y;
}

}  // namespace

std::pair<Tensor, ForwardTrace> forward(Network& net, const Tensor& batch, Mode mode, Rng& rng) {
  check_batch(net, batch);
  ForwardTrace trace;
  trace.net = &net;
  trace.mode = mode;
  trace.batch = batch.dim(0);
  trace.layers.resize(net.layer_count());
  Tensor x = batch;
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    LayerTrace& tr = trace.layers[i];
    Tensor y = run_layer(net, i, x, mode, &rng, &tr, &net.buffers());
    const LayerSpec& spec = net.layers()[i];
    if (std::holds_alternative<Tanh>(spec) || std::holds_alternative<Sigmoid>(spec)) tr.output = y;
    tr.input = std::move(x);
    x = std::move(y);
  }
  return {std::move(x), std::move(trace)};
}

Tensor infer(const Network& net, const Tensor& batch) {
  check_batch(net, batch);
  Tensor x = batch;
  for (std::size_t i = 0; i < net.layer_count(); ++i)
    x = run_layer(net, i, x, Mode::eval, nullptr, nullptr, nullptr);
  return x;
}

Gradients backward(const Network& net, ForwardTrace& trace, const Tensor& output_grad) {
  if (trace.net != &net || trace.layers.size() != net.layer_count())
    throw std::invalid_argument("trace does not belong to this network");
  if (trace.consumed) throw std::invalid_argument("trace already consumed by a previous backward call");
  trace.consumed = true;

  Shape want = net.output_shape();
  want.insert(want.begin(), trace.batch);
  if (output_grad.shape() != want)
    throw std::invalid_argument("output gradient shape " + shape_to_string(output_grad.shape()) +
                                " does not match network output " + shape_to_string(want));

  Gradients g;
  g.params = Eigen::VectorXd::Zero(net.param_count());
  Tensor gy = output_grad;
  for (std::size_t idx = net.layer_count(); idx-- > 0;) {
    const LayerSpec& spec = net.layers()[idx];
    const LayerTrace& tr = trace.layers[idx];
    const double* p = net.params().data() + net.param_offset(idx);
    double* gp = g.params.data() + net.param_offset(idx);
    Tensor gx(Shape(tr.input.shape()));
    if (const auto* d = std::get_if<Dense>(&spec)) {
      dense_bwd(*d, p, tr.input, gy, gp, gx);
    } else if (const auto* c = std::get_if<Conv2d>(&spec)) {
      conv_bwd(*c, p, tr.input, net.shape_before(idx), gy, gp, gx);
    } else if (const auto* b = std::get_if<BatchNorm>(&spec)) {
      bn_bwd(*b, p, tr, tr.input, gy, trace.mode, gp, gx);
    } else if (const auto* u = std::get_if<Upsample>(&spec)) {
      upsample_bwd(*u, net.shape_before(idx), gy, gx);
    } else if (std::holds_alternative<Dropout>(spec)) {
      if (trace.mode == Mode::train)
        gx = Tensor(Shape(tr.input.shape()), gy.data() * tr.mask.data());
      else
        gx = gy;  // eval: identity
    } else if (std::holds_alternative<ReLU>(spec)) {
      gx = Tensor(Shape(tr.input.shape()), (tr.input.data() > 0.0).select(gy.data(), 0.0));
    } else if (const auto* l = std::get_if<LeakyReLU>(&spec)) {
      gx = Tensor(Shape(tr.input.shape()), (tr.input.data() >= 0.0).select(gy.data(), gy.data() * l->slope));
    } else if (std::holds_alternative<Tanh>(spec)) {
      gx = Tensor(Shape(tr.input.shape()), gy.data() * (1.0 - tr.output.data().square()));
    } else if (std::holds_alternative<Sigmoid>(spec)) {
      gx = Tensor(Shape(tr.input.shape()), gy.data() * tr.output.data() * (1.0 - tr.output.data()));
    } else if (std::holds_alternative<Reshape>(spec)) {
      gx = gy.reshaped(Shape(tr.input.shape()));
    } else {
      throw std::logic_error("unhandled layer");
    }
    gy = std::move(gx);
  }
  g.input = std::move(gy);
  return g;
}

double grad_check(const Network& net, const Tensor& input, const LossFn& loss, int n_coords, double step,
                  Mode mode, Rng& rng) {
  if (net.param_count() == 0) return 0.0;
  if (mode == Mode::train && net.has_stochastic_layer())
    throw std::invalid_argument(
        "grad_check requires a deterministic forward; run networks containing dropout in eval mode");

  Network work = net;
  Rng unused(0);
  auto [out, trace] = forward(work, input, mode, unused);
  Tensor gout = loss.grad(out);
  Gradients g = backward(work, trace, gout);

  std::vector<Eigen::Index> coords(static_cast<std::size_t>(net.param_count()));
  std::iota(coords.begin(), coords.end(), Eigen::Index{0});
  if (n_coords < static_cast<int>(coords.size())) {
    std::shuffle(coords.begin(), coords.end(), rng.engine());
    coords.resize(static_cast<std::size_t>(n_coords));
  }

  double max_rel = 0.0;
  for (Eigen::Index c : coords) {
    double saved = work.params()[c];
    work.params()[c] = saved + step;
    double f_plus = loss.value(forward(work, input, mode, unused).first);
    work.params()[c] = saved - step;
    double f_minus = loss.value(forward(work, input, mode, unused).first);
    work.params()[c] = saved;
    double numeric = (f_plus - f_minus) / (2.0 * step);
    double analytic = g.params[c];
    double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

}  // namespace partgan
