#include "hdp/assignment_init.hpp"

#include <cmath>

#include "hdp/errors.hpp"
#include "hdp/losses.hpp"
#include "hdp/optimizer.hpp"
#include "hdp/tape.hpp"

namespace hdp {

FeaturePart parse_feature_part(const std::string& name) {
  if (name == "ego") return FeaturePart::kEgo;
  if (name == "neighbor") return FeaturePart::kNeighbor;
  if (name == "structural") return FeaturePart::kStructural;
  throw ConfigError("unknown feature part '" + name + "' (expected ego, neighbor or structural)");
}

std::string to_string(FeaturePart part) {
  switch (part) {
    case FeaturePart::kEgo:
      return "ego";
    case FeaturePart::kNeighbor:
      return "neighbor";
    case FeaturePart::kStructural:
      return "structural";
  }
  return "ego";
}

SparseMatrix sparse_features(const Graph& graph, bool normalize_rows) {
  SparseMatrix x = graph.features.sparseView(1.0, 0.0);
  if (normalize_rows) {
    for (Eigen::Index r = 0; r < x.outerSize(); ++r) {
      double sum = 0.0;
      for (SparseMatrix::InnerIterator it(x, r); it; ++it) sum += it.value();
      if (sum != 0.0) {
        for (SparseMatrix::InnerIterator it(x, r); it; ++it) it.valueRef() /= sum;
      }
    }
  }
  x.makeCompressed();
  return x;
}

SparseMatrix neighbor_features(const SparseMatrix& features, const SparseRowStochastic& adjacency) {
  if (adjacency.rows() != features.rows()) throw DimensionError("adjacency and features differ in N");
  SparseMatrix out = adjacency.matrix() * features;
  out.makeCompressed();
  return out;
}

SparseMatrix assemble_features(const SparseMatrix& ego, const SparseMatrix& neighbor,
                               const SparseMatrix& structural, const std::vector<FeaturePart>& parts) {
  if (parts.empty()) throw ConfigError("feature_parts must not be empty");
  bool has[3] = {false, false, false};
  for (FeaturePart p : parts) has[static_cast<int>(p)] = true;
  const SparseMatrix* blocks[3] = {&ego, &neighbor, &structural};
  SparseMatrix out;
  bool first = true;
  for (int i = 0; i < 3; ++i) {
    if (!has[i] || blocks[i]->cols() == 0) continue;
    out = first ? *blocks[i] : hstack(out, *blocks[i]);
    first = false;
  }
  if (first) throw ConfigError("selected feature parts have zero total width");
  return out;
}

SoftAssignment make_assignment(Matrix assignments, std::span<const int> labels, const SplitMasks& masks) {
  SoftAssignment s;
  s.hard_labels = row_argmax(assignments);
  s.assignments = std::move(assignments);
  s.train_accuracy = accuracy(s.hard_labels, labels, masks.train);
  s.val_accuracy = accuracy(s.hard_labels, labels, masks.val);
  s.test_accuracy = accuracy(s.hard_labels, labels, masks.test);
  return s;
}

namespace {

struct InitMlp {
  ParamBlock hidden;
  ParamBlock out;

  InitMlp(Eigen::Index in, Eigen::Index width, int classes, std::mt19937_64& rng)
      : hidden("init.hidden", in, width), out("init.out", width, classes) {
    hidden.glorot_init(rng);
    out.glorot_init(rng);
  }

  Var forward(Tape& tape, const SparseMatrix& x, double dropout, std::mt19937_64* rng) {
    Var h = tape.relu(tape.affine(x, hidden));
    if (rng) h = tape.dropout(h, dropout, *rng);
    return tape.row_softmax(tape.affine(h, out));
  }

  Matrix predict(const SparseMatrix& x) {
    Tape tape;
    return tape.value(forward(tape, x, 0.0, nullptr));
  }
};

}  // namespace

SoftAssignment train_init(const SparseMatrix& features, std::span<const int> labels, int num_classes,
                          const SplitMasks& masks, const InitConfig& config) {
  if (masks.train.empty()) throw ConfigError("training mask is empty");
  std::mt19937_64 rng(config.seed);
  InitMlp mlp(features.cols(), config.hidden_dim, num_classes, rng);
  ParamRefs params{&mlp.hidden, &mlp.out};
  OptimizerConfig opt;
  opt.learning_rate = config.learning_rate;
  opt.weight_decay = config.weight_decay;

  double best_val = -1.0;
  int best_epoch = -1;
  Matrix best_z;
  int epoch = 0;
  for (; epoch < config.epochs; ++epoch) {
    for (ParamBlock* p : params) p->zero_grad();
    Tape tape;
    Var z = mlp.forward(tape, features, config.dropout, config.dropout > 0.0 ? &rng : nullptr);
    Var loss = tape.cross_entropy(z, labels, masks.train);
    const double loss_value = tape.scalar(loss);
    if (!std::isfinite(loss_value)) {
      throw NumericError("initialization loss became non-finite at epoch " + std::to_string(epoch));
    }
    Matrix current = config.dropout > 0.0 ? mlp.predict(features) : tape.value(z);
    tape.backward(loss);

    const double val = accuracy(row_argmax(current), labels, masks.val);
    if (val > best_val) {
      best_val = val;
      best_epoch = epoch;
      best_z = std::move(current);
    } else if (epoch - best_epoch >= config.patience) {
      break;
    }
    adam_step(params, opt);
  }
  SoftAssignment s = make_assignment(std::move(best_z), labels, masks);
  s.epochs_run = std::min(epoch + 1, config.epochs);
  return s;
}

SoftAssignment untrained_init(const SparseMatrix& features, std::span<const int> labels,
                              int num_classes, const SplitMasks& masks, const InitConfig& config) {
  std::mt19937_64 rng(config.seed);
  InitMlp mlp(features.cols(), config.hidden_dim, num_classes, rng);
  return make_assignment(mlp.predict(features), labels, masks);
}

}  // namespace hdp
