#include "hdp/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hdp/errors.hpp"

namespace hdp {
namespace {

constexpr double kProbFloor = 1e-12;
constexpr double kNormFloor = 1e-12;

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

double cosine_similarity(const Eigen::Ref<const RowVector>& a, const Eigen::Ref<const RowVector>& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na < kNormFloor || nb < kNormFloor) return 0.0;
  return a.dot(b) / (na * nb);
}

std::size_t Tape::check(Var v) const {
  if (!v.valid()) throw ContractViolation("unrecorded value passed to tape operation");
  if (v.tape_ != this) throw ContractViolation("value recorded on a different tape");
  if (v.id_ >= nodes_.size()) throw ContractViolation("value id outside the trace");
  return v.id_;
}

Var Tape::push(Op op, Matrix value, bool requires_grad,
               std::function<void(Tape&, std::size_t)> propagate) {
  if (differentiated_) throw ContractViolation("tape already differentiated");
  Node node;
  node.op = op;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  node.propagate = std::move(propagate);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Matrix& Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

const Matrix& Tape::value(Var v) const { return nodes_[check(v)].value; }

const Matrix& Tape::grad(Var v) const { return nodes_[check(v)].grad; }

double Tape::scalar(Var v) const {
  const Matrix& m = value(v);
  if (m.rows() != 1 || m.cols() != 1) throw DimensionError("expected a 1x1 value, got " + shape(m));
  return m(0, 0);
}

Tape::Op Tape::op(Var v) const { return nodes_[check(v)].op; }

Var Tape::constant(Matrix value) { return push(Op::kConstant, std::move(value), false, nullptr); }

Var Tape::affine(Var input, ParamBlock& params) {
  const std::size_t x = check(input);
  const Matrix& in = nodes_[x].value;
  if (in.cols() != params.weights.rows()) {
    throw DimensionError("affine " + params.name + ": input " + shape(in) + " vs weights " +
                         shape(params.weights));
  }
  Matrix out = in * params.weights;
  out.rowwise() += params.bias;
  ParamBlock* p = &params;
  return push(Op::kAffine, std::move(out), true, [x, p](Tape& t, std::size_t self) {
    const Matrix& g = t.nodes_[self].grad;
    const Matrix& in_value = t.nodes_[x].value;
    p->grad_weights.noalias() += in_value.transpose() * g;
    p->grad_bias += g.colwise().sum();
    if (t.needs(x)) t.grad_buffer(x).noalias() += g * p->weights.transpose();
  });
}

Var Tape::affine(const SparseMatrix& input, ParamBlock& params) {
  if (input.cols() != params.weights.rows()) {
    throw DimensionError("affine " + params.name + ": sparse input " + std::to_string(input.rows()) +
                         "x" + std::to_string(input.cols()) + " vs weights " + shape(params.weights));
  }
  Matrix out = input * params.weights;
  out.rowwise() += params.bias;
  ParamBlock* p = &params;
  const SparseMatrix* in = &input;
  return push(Op::kSparseAffine, std::move(out), true, [in, p](Tape& t, std::size_t self) {
    const Matrix& g = t.nodes_[self].grad;
    p->grad_weights.noalias() += in->transpose() * g;
    p->grad_bias += g.colwise().sum();
  });
}

Var Tape::relu(Var xv) {
  const std::size_t x = check(xv);
  Matrix out = nodes_[x].value.cwiseMax(0.0);
  return push(Op::kRelu, std::move(out), needs(x), [x](Tape& t, std::size_t self) {
    const Matrix& g = t.nodes_[self].grad;
    t.grad_buffer(x).array() += (t.nodes_[x].value.array() > 0.0).select(g.array(), 0.0);
  });
}

Var Tape::sigmoid(Var xv) {
  const std::size_t x = check(xv);
  Matrix out = (1.0 / (1.0 + (-nodes_[x].value.array()).exp())).matrix();
  return push(Op::kSigmoid, std::move(out), needs(x), [x](Tape& t, std::size_t self) {
    const Matrix& s = t.nodes_[self].value;
    const Matrix& g = t.nodes_[self].grad;
    t.grad_buffer(x).array() += g.array() * s.array() * (1.0 - s.array());
  });
}

Var Tape::row_softmax(Var xv) {
  const std::size_t x = check(xv);
  const Matrix& in = nodes_[x].value;
  Matrix out(in.rows(), in.cols());
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    const double mx = in.row(r).maxCoeff();
    out.row(r) = (in.row(r).array() - mx).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return push(Op::kRowSoftmax, std::move(out), needs(x), [x](Tape& t, std::size_t self) {
    const Matrix& z = t.nodes_[self].value;
    const Matrix& g = t.nodes_[self].grad;
    const ColVector inner = (g.cwiseProduct(z)).rowwise().sum();
    Matrix& gx = t.grad_buffer(x);
    gx.array() += z.array() * (g.colwise() - inner).array();
  });
}

Var Tape::concat(Var lv, Var rv) {
  const std::size_t l = check(lv);
  const std::size_t r = check(rv);
  const Matrix& a = nodes_[l].value;
  const Matrix& b = nodes_[r].value;
  if (a.rows() != b.rows()) throw DimensionError("concat: " + shape(a) + " vs " + shape(b));
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  const Eigen::Index split = a.cols();
  return push(Op::kConcat, std::move(out), needs(l) || needs(r),
              [l, r, split](Tape& t, std::size_t self) {
                const Matrix& g = t.nodes_[self].grad;
                if (t.needs(l)) t.grad_buffer(l) += g.leftCols(split);
                if (t.needs(r)) t.grad_buffer(r) += g.rightCols(g.cols() - split);
              });
}

Var Tape::spmm(const SparseMatrix& a, Var xv) {
  const std::size_t x = check(xv);
  const Matrix& in = nodes_[x].value;
  if (a.cols() != in.rows()) {
    throw DimensionError("spmm: operator has " + std::to_string(a.cols()) + " columns, input " +
                         shape(in));
  }
  Matrix out = a * in;
  const SparseMatrix* op = &a;
  return push(Op::kSpmm, std::move(out), needs(x), [x, op](Tape& t, std::size_t self) {
    t.grad_buffer(x).noalias() += op->transpose() * t.nodes_[self].grad;
  });
}

Var Tape::gate_mix(Var av, Var h0v, Var mv) {
  const std::size_t a = check(av);
  const std::size_t h0 = check(h0v);
  const std::size_t m = check(mv);
  const Matrix& alpha = nodes_[a].value;
  const Matrix& base = nodes_[h0].value;
  const Matrix& mixed = nodes_[m].value;
  if (alpha.cols() != 1 || alpha.rows() != base.rows() || base.rows() != mixed.rows() ||
      base.cols() != mixed.cols()) {
    throw DimensionError("gate_mix: alpha " + shape(alpha) + ", h0 " + shape(base) + ", mixed " +
                         shape(mixed));
  }
  Matrix out = base.array().colwise() * alpha.col(0).array() +
               mixed.array().colwise() * (1.0 - alpha.col(0).array());
  return push(Op::kGateMix, std::move(out), needs(a) || needs(h0) || needs(m),
              [a, h0, m](Tape& t, std::size_t self) {
                const Matrix& g = t.nodes_[self].grad;
                const ColVector alpha_col = t.nodes_[a].value.col(0);
                if (t.needs(a)) {
                  t.grad_buffer(a).col(0) +=
                      (g.cwiseProduct(t.nodes_[h0].value - t.nodes_[m].value)).rowwise().sum();
                }
                if (t.needs(h0)) {
                  t.grad_buffer(h0).array() += g.array().colwise() * alpha_col.array();
                }
                if (t.needs(m)) {
                  t.grad_buffer(m).array() += g.array().colwise() * (1.0 - alpha_col.array());
                }
              });
}

Var Tape::dropout(Var xv, double rate, std::mt19937_64& rng) {
  const std::size_t x = check(xv);
  if (rate <= 0.0) return xv;
  if (rate >= 1.0) throw ConfigError("dropout rate must be below 1");
  const Matrix& in = nodes_[x].value;
  Matrix mask(in.rows(), in.cols());
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = keep(rng) ? scale : 0.0;
  Matrix out = in.cwiseProduct(mask);
  return push(Op::kDropout, std::move(out), needs(x),
              [x, mask = std::move(mask)](Tape& t, std::size_t self) {
                t.grad_buffer(x) += t.nodes_[self].grad.cwiseProduct(mask);
              });
}

Var Tape::cross_entropy(Var pv, std::span<const int> labels, std::span<const NodeId> mask) {
  const std::size_t p = check(pv);
  const Matrix& probs = nodes_[p].value;
  if (labels.size() != static_cast<std::size_t>(probs.rows())) {
    throw DimensionError("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                         shape(probs));
  }
  if (mask.empty()) throw ContractViolation("cross_entropy: empty mask");
  double total = 0.0;
  for (NodeId i : mask) {
    const double z = probs(i, labels[static_cast<std::size_t>(i)]);
    total -= std::log(std::max(z, kProbFloor));
  }
  Matrix out(1, 1);
  out(0, 0) = total / static_cast<double>(mask.size());
  std::vector<NodeId> rows(mask.begin(), mask.end());
  std::vector<int> cls;
  cls.reserve(rows.size());
  for (NodeId i : rows) cls.push_back(labels[static_cast<std::size_t>(i)]);
  return push(Op::kCrossEntropy, std::move(out), needs(p),
              [p, rows = std::move(rows), cls = std::move(cls)](Tape& t, std::size_t self) {
                const double upstream = t.nodes_[self].grad(0, 0);
                const Matrix& probs_value = t.nodes_[p].value;
                Matrix& gp = t.grad_buffer(p);
                const double scale = upstream / static_cast<double>(rows.size());
                for (std::size_t k = 0; k < rows.size(); ++k) {
                  const double z = probs_value(rows[k], cls[k]);
                  if (z > kProbFloor) gp(rows[k], cls[k]) -= scale / z;
                }
              });
}

Var Tape::prototype_contrastive(Var hv, ContrastiveTargets targets) {
  const std::size_t h = check(hv);
  const Matrix& reps = nodes_[h].value;
  if (targets.anchors.size() != targets.anchor_classes.size()) {
    throw DimensionError("contrastive head: anchors and classes differ in length");
  }
  if (targets.prototypes.cols() != reps.cols() ||
      targets.valid.size() != static_cast<std::size_t>(targets.prototypes.rows())) {
    throw DimensionError("contrastive head: prototypes " + shape(targets.prototypes) +
                         " incompatible with representations " + shape(reps));
  }
  if (targets.tau <= 0.0) throw ConfigError("temperature must be positive");

  const Eigen::Index num_classes = targets.prototypes.rows();
  const std::size_t num_anchors = targets.anchors.size();
  // Per anchor: similarities and softmax weights over valid classes.
  Matrix sims = Matrix::Zero(static_cast<Eigen::Index>(num_anchors), num_classes);
  Matrix weights = Matrix::Zero(static_cast<Eigen::Index>(num_anchors), num_classes);
  double total = 0.0;
  for (std::size_t a = 0; a < num_anchors; ++a) {
    const NodeId i = targets.anchors[a];
    const int j = targets.anchor_classes[a];
    if (j < 0 || j >= num_classes || !targets.valid[static_cast<std::size_t>(j)]) {
      throw ContractViolation("contrastive anchor assigned to an invalid prototype");
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < num_classes; ++k) {
      if (!targets.valid[static_cast<std::size_t>(k)]) continue;
      const double s = cosine_similarity(reps.row(i), targets.prototypes.row(k));
      sims(static_cast<Eigen::Index>(a), k) = s;
      mx = std::max(mx, std::max(s, 0.0) / targets.tau);
    }
    double denom = 0.0;
    for (Eigen::Index k = 0; k < num_classes; ++k) {
      if (!targets.valid[static_cast<std::size_t>(k)]) continue;
      const double e = std::exp(std::max(sims(static_cast<Eigen::Index>(a), k), 0.0) / targets.tau - mx);
      weights(static_cast<Eigen::Index>(a), k) = e;
      denom += e;
    }
    weights.row(static_cast<Eigen::Index>(a)) /= denom;
    total += -sims(static_cast<Eigen::Index>(a), j) / targets.tau + mx + std::log(denom);
  }
  Matrix out(1, 1);
  out(0, 0) = num_anchors == 0 ? 0.0 : total / static_cast<double>(num_anchors);

  return push(Op::kContrastive, std::move(out), needs(h) && num_anchors > 0,
              [h, targets = std::move(targets), sims = std::move(sims),
               weights = std::move(weights)](Tape& t, std::size_t self) {
                const double upstream = t.nodes_[self].grad(0, 0);
                const Matrix& reps_value = t.nodes_[h].value;
                Matrix& gh = t.grad_buffer(h);
                const double scale = upstream / static_cast<double>(targets.anchors.size());
                const Eigen::Index num_classes = targets.prototypes.rows();
                for (std::size_t a = 0; a < targets.anchors.size(); ++a) {
                  const NodeId i = targets.anchors[a];
                  const auto ai = static_cast<Eigen::Index>(a);
                  const RowVector hi = reps_value.row(i);
                  const double hn = hi.norm();
                  if (hn < kNormFloor) continue;
                  for (Eigen::Index k = 0; k < num_classes; ++k) {
                    if (!targets.valid[static_cast<std::size_t>(k)]) continue;
                    const RowVector ck = targets.prototypes.row(k);
                    const double cn = ck.norm();
                    if (cn < kNormFloor) continue;
                    const double s = sims(ai, k);
                    double ds = s > 0.0 ? weights(ai, k) / targets.tau : 0.0;
                    if (k == targets.anchor_classes[a]) ds -= 1.0 / targets.tau;
                    if (ds == 0.0) continue;
                    // d cos(h, c) / d h = c / (|h||c|) - s * h / |h|^2
                    gh.row(i) += scale * ds * (ck / (hn * cn) - s * hi / (hn * hn));
                  }
                }
              });
}

Var Tape::linear_combination(Var av, double wa, Var bv, double wb) {
  const std::size_t a = check(av);
  const std::size_t b = check(bv);
  const Matrix& x = nodes_[a].value;
  const Matrix& y = nodes_[b].value;
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw DimensionError("linear_combination: " + shape(x) + " vs " + shape(y));
  }
  Matrix out = wa * x + wb * y;
  return push(Op::kLinearCombination, std::move(out), needs(a) || needs(b),
              [a, b, wa, wb](Tape& t, std::size_t self) {
                const Matrix& g = t.nodes_[self].grad;
                if (t.needs(a)) t.grad_buffer(a) += wa * g;
                if (t.needs(b)) t.grad_buffer(b) += wb * g;
              });
}

void Tape::backward(Var loss) {
  const std::size_t root = check(loss);
  if (differentiated_) throw ContractViolation("tape already differentiated");
  const Matrix& v = nodes_[root].value;
  if (v.rows() != 1 || v.cols() != 1) throw ContractViolation("backward needs a 1x1 loss, got " + shape(v));
  differentiated_ = true;
  grad_buffer(root)(0, 0) = 1.0;
  for (std::size_t i = root + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (!n.propagate) {
      if (n.op != Op::kConstant) throw ContractViolation("operation without a gradient rule on trace");
      continue;
    }
    n.propagate(*this, i);
  }
}

}  // namespace hdp
