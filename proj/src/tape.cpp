#include "mompo/tape.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace mompo {

namespace {

using MatrixRM = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<MatrixRM>;
using MapCM = Eigen::Map<const MatrixRM>;

MapCM cmap(const DenseArray& a, int r, int c) { return MapCM(a.data.data(), r, c); }
MapM map(DenseArray& a, int r, int c) { return MapM(a.data.data(), r, c); }

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

int Tape::push(DenseArray value, bool needs_grad, std::function<void(Tape&, int)> back) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = needs_grad;
  n.back = needs_grad ? std::move(back) : nullptr;
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

Var Tape::leaf(const DenseArray& value, bool needs_grad) {
  return Var{push(value, needs_grad, nullptr)};
}

DenseArray& Tape::grad_buf(int id) {
  Node& n = nodes_[id];
  if (!n.grad_set) {
    n.grad = DenseArray::zeros(n.value.shape);
    n.grad_set = true;
  }
  return n.grad;
}

void Tape::accumulate(int id, const DenseArray& g) {
  if (!nodes_[id].needs_grad) return;
  DenseArray& dst = grad_buf(id);
  for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += g.data[i];
}

const DenseArray& Tape::grad(Var v) const {
  const Node& n = nodes_[v.id];
  if (n.grad_set) return n.grad;
  // unreached: report zeros
  const_cast<Tape*>(this)->nodes_[v.id].grad = DenseArray::zeros(n.value.shape);
  const_cast<Tape*>(this)->nodes_[v.id].grad_set = true;
  return nodes_[v.id].grad;
}

Var Tape::matmul(Var a, Var b) {
  const DenseArray& av = value(a);
  const DenseArray& bv = value(b);
  require(av.shape.size() == 2 && bv.shape.size() == 2,
          "matmul: both operands must be rank-2, got " + shape_str(av.shape) + " x " +
              shape_str(bv.shape));
  require(av.shape[1] == bv.shape[0],
          "matmul: inner dimensions differ, " + shape_str(av.shape) + " x " + shape_str(bv.shape));
  const int m = av.shape[0], k = av.shape[1], n = bv.shape[1];
  DenseArray out = DenseArray::zeros({m, n});
  map(out, m, n).noalias() = cmap(av, m, k) * cmap(bv, k, n);
  const int pa = a.id, pb = b.id;
  int id = push(std::move(out), needs(a) || needs(b), [pa, pb, m, k, n](Tape& t, int self) {
    const DenseArray& g = t.nodes_[self].grad;
    if (t.nodes_[pa].needs_grad) {
      MapCM gm = cmap(g, m, n);
      map(t.grad_buf(pa), m, k).noalias() += gm * cmap(t.nodes_[pb].value, k, n).transpose();
    }
    if (t.nodes_[pb].needs_grad) {
      MapCM gm = cmap(g, m, n);
      map(t.grad_buf(pb), k, n).noalias() +=
          cmap(t.nodes_[pa].value, m, k).transpose() * gm;
    }
  });
  return Var{id};
}

Var Tape::add(Var a, Var b) {
  const DenseArray& av = value(a);
  const DenseArray& bv = value(b);
  if (same_shape(av, bv)) {
    DenseArray out = av;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += bv.data[i];
    const int pa = a.id, pb = b.id;
    int id = push(std::move(out), needs(a) || needs(b), [pa, pb](Tape& t, int self) {
      t.accumulate(pa, t.nodes_[self].grad);
      t.accumulate(pb, t.nodes_[self].grad);
    });
    return Var{id};
  }
  // row-vector broadcast: [m,n] + [n]
  require(av.shape.size() == 2 && bv.shape.size() == 1 && av.shape[1] == bv.shape[0],
          "add: shapes not broadcastable, " + shape_str(av.shape) + " + " + shape_str(bv.shape));
  const int m = av.shape[0], n = av.shape[1];
  DenseArray out = av;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) out.at(r, c) += bv.data[c];
  const int pa = a.id, pb = b.id;
  int id = push(std::move(out), needs(a) || needs(b), [pa, pb, m, n](Tape& t, int self) {
    const DenseArray& g = t.nodes_[self].grad;
    t.accumulate(pa, g);
    if (t.nodes_[pb].needs_grad) {
      DenseArray& gb = t.grad_buf(pb);
      for (int c = 0; c < n; ++c) {
        double acc = 0.0;
        for (int r = 0; r < m; ++r) acc += g.at(r, c);
        gb.data[c] += static_cast<float>(acc);
      }
    }
  });
  return Var{id};
}

Var Tape::sub(Var a, Var b) {
  const DenseArray& av = value(a);
  const DenseArray& bv = value(b);
  require(same_shape(av, bv),
          "sub: shape mismatch " + shape_str(av.shape) + " vs " + shape_str(bv.shape));
  DenseArray out = av;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] -= bv.data[i];
  const int pa = a.id, pb = b.id;
  int id = push(std::move(out), needs(a) || needs(b), [pa, pb](Tape& t, int self) {
    const DenseArray& g = t.nodes_[self].grad;
    t.accumulate(pa, g);
    if (t.nodes_[pb].needs_grad) {
      DenseArray& gb = t.grad_buf(pb);
      for (size_t i = 0; i < gb.data.size(); ++i) gb.data[i] -= g.data[i];
    }
  });
  return Var{id};
}

Var Tape::mul(Var a, Var b) {
  const DenseArray& av = value(a);
  const DenseArray& bv = value(b);
  require(same_shape(av, bv),
          "mul: shape mismatch " + shape_str(av.shape) + " vs " + shape_str(bv.shape));
  DenseArray out = av;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] *= bv.data[i];
  const int pa = a.id, pb = b.id;
  int id = push(std::move(out), needs(a) || needs(b), [pa, pb](Tape& t, int self) {
    const DenseArray& g = t.nodes_[self].grad;
    if (t.nodes_[pa].needs_grad) {
      DenseArray& ga = t.grad_buf(pa);
      const DenseArray& bvv = t.nodes_[pb].value;
      for (size_t i = 0; i < ga.data.size(); ++i) ga.data[i] += g.data[i] * bvv.data[i];
    }
    if (t.nodes_[pb].needs_grad) {
      DenseArray& gb = t.grad_buf(pb);
      const DenseArray& avv = t.nodes_[pa].value;
      for (size_t i = 0; i < gb.data.size(); ++i) gb.data[i] += g.data[i] * avv.data[i];
    }
  });
  return Var{id};
}

Var Tape::scale(Var a, float c) {
  DenseArray out = value(a);
  for (float& v : out.data) v *= c;
  const int pa = a.id;
  int id = push(std::move(out), needs(a), [pa, c](Tape& t, int self) {
    if (!t.nodes_[pa].needs_grad) return;
    const DenseArray& g = t.nodes_[self].grad;
    DenseArray& ga = t.grad_buf(pa);
    for (size_t i = 0; i < ga.data.size(); ++i) ga.data[i] += c * g.data[i];
  });
  return Var{id};
}

Var Tape::add_scalar(Var a, float c) {
  DenseArray out = value(a);
  for (float& v : out.data) v += c;
  const int pa = a.id;
  int id = push(std::move(out), needs(a),
                [pa](Tape& t, int self) { t.accumulate(pa, t.nodes_[self].grad); });
  return Var{id};
}

Var Tape::relu(Var a) {
  DenseArray out = value(a);
  for (float& v : out.data) v = v > 0.0f ? v : 0.0f;
  const int pa = a.id;
  int id = push(std::move(out), needs(a), [pa](Tape& t, int self) {
    if (!t.nodes_[pa].needs_grad) return;
    const DenseArray& g = t.nodes_[self].grad;
    const DenseArray& x = t.nodes_[pa].value;
    DenseArray& ga = t.grad_buf(pa);
    for (size_t i = 0; i < ga.data.size(); ++i)
      if (x.data[i] > 0.0f) ga.data[i] += g.data[i];
  });
  return Var{id};
}

Var Tape::elu(Var a) {
  DenseArray out = value(a);
  for (float& v : out.data) v = v > 0.0f ? v : std::expm1(v);
  const int pa = a.id;
  int id = push(std::move(out), needs(a), [pa](Tape& t, int self) {
    if (!t.nodes_[pa].needs_grad) return;
    const DenseArray& g = t.nodes_[self].grad;
    const DenseArray& x = t.nodes_[pa].value;
    const DenseArray& y = t.nodes_[self].value;
    DenseArray& ga = t.grad_buf(pa);
    for (size_t i = 0; i < ga.data.size(); ++i)
      ga.data[i] += g.data[i] * (x.data[i] > 0.0f ? 1.0f : y.data[i] + 1.0f);
  });
  return Var{id};
}

Var Tape::tanh(Var a) {
  DenseArray out = value(a);
  for (float& v : out.data) v = std::tanh(v);
  const int pa = a.id;
  int id = push(std::move(out), needs(a), [pa](Tape& t, int self) {
    if (!t.nodes_[pa].needs_grad) return;
    const DenseArray& g = t.nodes_[self].grad;
    const DenseArray& y = t.nodes_[self].value;
    DenseArray& ga = t.grad_buf(pa);
    for (size_t i = 0; i < ga.data.size(); ++i)
      ga.data[i] += g.data[i] * (1.0f - y.data[i] * y.data[i]);
  });
  return Var{id};
}

Var Tape::softplus(Var a) {
  DenseArray out = value(a);
  for (float& v : out.data) v = std::log1p(std::exp(-std::fabs(v))) + std::max(v, 0.0f);
  const int pa = a.id;
  int id = push(std::move(out), needs(a), [pa](Tape& t, int self) {
    if (!t.nodes_[pa].needs_grad) return;
    const DenseArray& g = t.nodes_[self].grad;
    const DenseArray& x = t.nodes_[pa].value;
    DenseArray& ga = t.grad_buf(pa);
    for (size_t i = 0; i < ga.data.size(); ++i) {
      const float xi = x.data[i];
      const float sig = xi >= 0.0f ? 1.0f / (1.0f + std::exp(-xi))
                                   : std::exp(xi) / (1.0f + std::exp(xi));
      ga.data[i] += g.data[i] * sig;
    }
  });
  return Var{id};
}

Var Tape::exp(Var a) {
  DenseArray out = value(a);
  for (float& v : out.data) v = std::exp(v);
  const int pa = a.id;
  int id = push(std::move(out), needs(a), [pa](Tape& t, int self) {
    if (!t.nodes_[pa].needs_grad) return;
    const DenseArray& g = t.nodes_[self].grad;
    const DenseArray& y = t.nodes_[self].value;
    DenseArray& ga = t.grad_buf(pa);
    for (size_t i = 0; i < ga.data.size(); ++i) ga.data[i] += g.data[i] * y.data[i];
  });
  return Var{id};
}

Var Tape::log(Var a) {
  DenseArray out = value(a);
  for (float& v : out.data) v = std::log(v);
  const int pa = a.id;
  int id = push(std::move(out), needs(a), [pa](Tape& t, int self) {
    if (!t.nodes_[pa].needs_grad) return;
    const DenseArray& g = t.nodes_[self].grad;
    const DenseArray& x = t.nodes_[pa].value;
    DenseArray& ga = t.grad_buf(pa);
    for (size_t i = 0; i < ga.data.size(); ++i) ga.data[i] += g.data[i] / x.data[i];
  });
  return Var{id};
}

Var Tape::square(Var a) {
  DenseArray out = value(a);
  for (float& v : out.data) v *= v;
  const int pa = a.id;
  int id = push(std::move(out), needs(a), [pa](Tape& t, int self) {
    if (!t.nodes_[pa].needs_grad) return;
    const DenseArray& g = t.nodes_[self].grad;
    const DenseArray& x = t.nodes_[pa].value;
    DenseArray& ga = t.grad_buf(pa);
    for (size_t i = 0; i < ga.data.size(); ++i) ga.data[i] += 2.0f * x.data[i] * g.data[i];
  });
  return Var{id};
}

Var Tape::sum_rows(Var a) {
  const DenseArray& av = value(a);
  require(av.shape.size() == 2, "sum_rows: rank-2 input required, got " + shape_str(av.shape));
  const int m = av.shape[0], n = av.shape[1];
  DenseArray out = DenseArray::zeros({m});
  for (int r = 0; r < m; ++r) {
    double acc = 0.0;
    for (int c = 0; c < n; ++c) acc += av.at(r, c);
    out.data[r] = static_cast<float>(acc);
  }
  const int pa = a.id;
  int id = push(std::move(out), needs(a), [pa, m, n](Tape& t, int self) {
    if (!t.nodes_[pa].needs_grad) return;
    const DenseArray& g = t.nodes_[self].grad;
    DenseArray& ga = t.grad_buf(pa);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < n; ++c) ga.at(r, c) += g.data[r];
  });
  return Var{id};
}

Var Tape::sum_all(Var a) {
  const DenseArray& av = value(a);
  double acc = 0.0;
  for (float v : av.data) acc += v;
  const int pa = a.id;
  int id = push(DenseArray::scalar(static_cast<float>(acc)), needs(a), [pa](Tape& t, int self) {
    if (!t.nodes_[pa].needs_grad) return;
    const float g = t.nodes_[self].grad.data[0];
    DenseArray& ga = t.grad_buf(pa);
    for (float& v : ga.data) v += g;
  });
  return Var{id};
}

Var Tape::mean_all(Var a) {
  const DenseArray& av = value(a);
  const double inv = 1.0 / static_cast<double>(av.size());
  double acc = 0.0;
  for (float v : av.data) acc += v;
  const int pa = a.id;
  int id = push(DenseArray::scalar(static_cast<float>(acc * inv)), needs(a),
                [pa, inv](Tape& t, int self) {
                  if (!t.nodes_[pa].needs_grad) return;
                  const float g = t.nodes_[self].grad.data[0] * static_cast<float>(inv);
                  DenseArray& ga = t.grad_buf(pa);
                  for (float& v : ga.data) v += g;
                });
  return Var{id};
}

Var Tape::log_softmax_rows(Var logits) {
  const DenseArray& av = value(logits);
  require(av.shape.size() == 2,
          "log_softmax_rows: rank-2 input required, got " + shape_str(av.shape));
  const int m = av.shape[0], n = av.shape[1];
  DenseArray out = av;
  for (int r = 0; r < m; ++r) {
    float mx = out.at(r, 0);
    for (int c = 1; c < n; ++c) mx = std::max(mx, out.at(r, c));
    double z = 0.0;
    for (int c = 0; c < n; ++c) z += std::exp(static_cast<double>(out.at(r, c) - mx));
    const float lse = mx + static_cast<float>(std::log(z));
    for (int c = 0; c < n; ++c) out.at(r, c) -= lse;
  }
  const int pa = logits.id;
  int id = push(std::move(out), needs(logits), [pa, m, n](Tape& t, int self) {
    if (!t.nodes_[pa].needs_grad) return;
    const DenseArray& g = t.nodes_[self].grad;
    const DenseArray& y = t.nodes_[self].value;
    DenseArray& ga = t.grad_buf(pa);
    for (int r = 0; r < m; ++r) {
      double gsum = 0.0;
      for (int c = 0; c < n; ++c) gsum += g.at(r, c);
      for (int c = 0; c < n; ++c)
        ga.at(r, c) += g.at(r, c) - static_cast<float>(std::exp(y.at(r, c)) * gsum);
    }
  });
  return Var{id};
}

Var Tape::layer_norm(Var x, Var gain, Var offset, Var* normalized_out) {
  const DenseArray& xv = value(x);
  require(xv.shape.size() == 2, "layer_norm: rank-2 input required, got " + shape_str(xv.shape));
  const int m = xv.shape[0], n = xv.shape[1];
  require(value(gain).shape == Shape{n} && value(offset).shape == Shape{n},
          "layer_norm: gain/offset must be row vectors of width " + std::to_string(n));
  DenseArray norm = DenseArray::zeros({m, n});
  std::vector<float> inv_std(m);
  for (int r = 0; r < m; ++r) {
    double mean = 0.0;
    for (int c = 0; c < n; ++c) mean += xv.at(r, c);
    mean /= n;
    double var = 0.0;
    for (int c = 0; c < n; ++c) {
      const double d = xv.at(r, c) - mean;
      var += d * d;
    }
    var /= n;
    const float is = static_cast<float>(1.0 / std::sqrt(var + kLayerNormEps));
    inv_std[r] = is;
    for (int c = 0; c < n; ++c)
      norm.at(r, c) = (xv.at(r, c) - static_cast<float>(mean)) * is;
  }
  const int px = x.id;
  int nid = push(std::move(norm), needs(x), [px, m, n, inv_std](Tape& t, int self) {
    if (!t.nodes_[px].needs_grad) return;
    const DenseArray& g = t.nodes_[self].grad;
    const DenseArray& y = t.nodes_[self].value;
    DenseArray& gx = t.grad_buf(px);
    for (int r = 0; r < m; ++r) {
      double gmean = 0.0, gymean = 0.0;
      for (int c = 0; c < n; ++c) {
        gmean += g.at(r, c);
        gymean += static_cast<double>(g.at(r, c)) * y.at(r, c);
      }
      gmean /= n;
      gymean /= n;
      for (int c = 0; c < n; ++c)
        gx.at(r, c) += inv_std[r] * static_cast<float>(g.at(r, c) - gmean - y.at(r, c) * gymean);
    }
  });
  Var norm_var{nid};
  if (normalized_out) *normalized_out = norm_var;

  // affine: norm * gain + offset (both broadcast over rows)
  const DenseArray& nv = value(norm_var);
  const DenseArray& gv = value(gain);
  DenseArray scaled = nv;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) scaled.at(r, c) *= gv.data[c];
  const int pn = norm_var.id, pg = gain.id;
  int sid = push(std::move(scaled), needs(norm_var) || needs(gain),
                 [pn, pg, m, n](Tape& t, int self) {
                   const DenseArray& g = t.nodes_[self].grad;
                   if (t.nodes_[pn].needs_grad) {
                     DenseArray& gn = t.grad_buf(pn);
                     const DenseArray& gainv = t.nodes_[pg].value;
                     for (int r = 0; r < m; ++r)
                       for (int c = 0; c < n; ++c) gn.at(r, c) += g.at(r, c) * gainv.data[c];
                   }
                   if (t.nodes_[pg].needs_grad) {
                     DenseArray& gg = t.grad_buf(pg);
                     const DenseArray& normv = t.nodes_[pn].value;
                     for (int c = 0; c < n; ++c) {
                       double acc = 0.0;
                       for (int r = 0; r < m; ++r)
                         acc += static_cast<double>(g.at(r, c)) * normv.at(r, c);
                       gg.data[c] += static_cast<float>(acc);
                     }
                   }
                 });
  return add(Var{sid}, offset);
}

void Tape::backward(Var loss) {
  const DenseArray& lv = value(loss);
  if (!lv.is_scalar())
    throw std::invalid_argument("backward: loss must be a scalar, got shape " +
                                shape_str(lv.shape));
  for (Node& n : nodes_) {
    n.grad_set = false;
    n.grad = DenseArray{};
  }
  grad_buf(loss.id).data[0] = 1.0f;
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.grad_set && n.back) n.back(*this, id);
  }
}

void Tape::clear() { nodes_.clear(); }

}  // namespace mompo
