#include "hdp/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hdp/errors.hpp"
#include "hdp/graph_io.hpp"
#include "hdp/optimizer.hpp"

namespace hdp {

namespace {

std::vector<NodeId> train_and_val(const SplitMasks& masks) {
  std::vector<NodeId> out(masks.train);
  out.insert(out.end(), masks.val.begin(), masks.val.end());
  std::sort(out.begin(), out.end());
  return out;
}

double combined_accuracy(const Matrix& z, const Graph& graph, const std::vector<NodeId>& nodes) {
  return accuracy(row_argmax(z), graph.labels, nodes);
}

}  // namespace

PreparedInputs prepare_inputs(const Graph& graph, const SplitMasks& masks, const TrainConfig& config) {
  masks.validate(graph.num_nodes);
  PreparedInputs in;
  in.features = sparse_features(graph, config.normalize_features);
  if (config.structural_dim > 0) {
    in.targets = build_target_set(masks.train, graph.labels, config.structural_dim);
    const SparseMatrix onehot = init_onehot(in.targets, graph.num_nodes);
    const StructuralEncoding enc = encode(row_normalize(graph, true), onehot, in.targets, config.kappa);
    in.structural = enc.values.sparseView(1.0, 0.0);
    in.ego_input = hstack(in.features, in.structural);
  } else {
    in.structural = SparseMatrix(graph.num_nodes, 0);
    in.ego_input = in.features;
  }
  in.edges = khop_edge_set(graph, config.order);
  in.homophily = estimate_homophily(in.edges, graph.labels, masks.train, graph.num_nodes);
  return in;
}

std::string init_cache_key(const std::string& dataset, int split_id, const TrainConfig& config) {
  const nlohmann::json full = config.to_json();
  nlohmann::json key{{"dataset", dataset}, {"split", split_id}};
  for (const char* k : {"feature_parts", "learning_rate_init", "weight_decay_init", "epoch_init",
                        "patience_init", "init_mode", "hidden_dim", "structural_dim", "kappa",
                        "normalize_features", "dropout", "seed"}) {
    key[k] = full.at(k);
  }
  return dataset + "-" + std::to_string(split_id) + "-" + content_hash(key).substr(0, 16);
}

SoftAssignment initial_assignment(const Graph& graph, const SplitMasks& masks, const TrainConfig& config,
                                  const PreparedInputs& inputs, const MatrixCache* cache) {
  std::string key;
  if (cache) {
    key = init_cache_key(graph.name, masks.split_id, config);
    if (auto z = cache->get(key)) {
      if (z->rows() != graph.num_nodes || z->cols() != graph.num_classes) {
        throw DataError("cached assignments " + cache->path_for(key).string() + " have the wrong shape");
      }
      return make_assignment(std::move(*z), graph.labels, masks);
    }
  }
  const SparseMatrix nb = neighbor_features(inputs.features, row_normalize(graph, false));
  const SparseMatrix all = assemble_features(inputs.features, nb, inputs.structural, config.feature_parts);
  const InitConfig ic = config.init_config(masks.split_id);
  SoftAssignment s = config.init_mode == InitMode::kTrained
                         ? train_init(all, graph.labels, graph.num_classes, masks, ic)
                         : untrained_init(all, graph.labels, graph.num_classes, masks, ic);
  if (cache) cache->put(key, s.assignments);
  return s;
}

Partition partition_from(const Matrix& assignments, const PreparedInputs& inputs, double lambda,
                         double sharpen, int epoch_created) {
  const double h_hat = rescale(inputs.homophily.h_prime, lambda);
  const std::vector<double> p = edge_probabilities(assignments, inputs.edges, sharpen);
  return split(p, h_hat, inputs.edges, epoch_created);
}

ModelConfig model_config(const TrainConfig& config, const PreparedInputs& inputs, int num_classes) {
  ModelConfig mc;
  mc.input_dim = inputs.ego_input.cols();
  mc.hidden_dim = config.hidden_dim;
  mc.embedding_dim = config.embedding_dim;
  mc.num_classes = num_classes;
  mc.layers_hm = config.layers_hm;
  mc.layers_ht = config.layers_ht;
  mc.use_hm = config.use_hm;
  mc.use_ht = config.use_ht;
  mc.dropout = config.dropout;
  return mc;
}

Matrix predict(HdpModel& model, const SparseMatrix& ego_input, const PartitionOperators& ops) {
  Tape tape;
  return tape.value(model.forward(tape, ego_input, ops).assignments);
}

double evaluate(HdpModel& model, const SparseMatrix& ego_input, const PartitionOperators& ops,
                std::span<const int> labels, std::span<const NodeId> mask) {
  return accuracy(row_argmax(predict(model, ego_input, ops)), labels, mask);
}

TrainResult train(const Graph& graph, const SplitMasks& masks, const TrainConfig& config,
                  const TrainOptions& options) {
  config.validate();
  const PreparedInputs inputs = prepare_inputs(graph, masks, config);
  const SoftAssignment init = initial_assignment(graph, masks, config, inputs, options.cache);
  const std::vector<NodeId> known = train_and_val(masks);

  TrainReport report;
  report.dataset = graph.name;
  report.split_id = masks.split_id;
  report.seed = config.split_seed(masks.split_id);
  report.init_train_accuracy = init.train_accuracy;
  report.init_val_accuracy = init.val_accuracy;
  report.init_test_accuracy = init.test_accuracy;
  report.h_prime = inputs.homophily.h_prime;
  report.h_prime_fallback = inputs.homophily.fallback;
  report.h_hat = rescale(inputs.homophily.h_prime, config.lambda);

  Partition partition = partition_from(init.assignments, inputs, config.lambda, config.sharpen);
  PartitionOperators ops = PartitionOperators::build(partition, graph.num_nodes);
  report.initial_partition = partition_quality(partition, graph.labels);
  TrustSet trust = build_trust_set(init.assignments, combined_accuracy(init.assignments, graph, known));

  std::mt19937_64 rng(report.seed + 0x9e3779b97f4a7c15ULL);
  HdpModel model(model_config(config, inputs, graph.num_classes), rng);
  const ParamRefs params = model.parameters();
  OptimizerConfig opt;
  opt.learning_rate = config.learning_rate;
  opt.weight_decay = config.weight_decay;
  std::mt19937_64* dropout_rng = config.dropout > 0.0 ? &rng : nullptr;

  ParamSnapshot best_params = ParamSnapshot::capture(params);
  Partition best_partition = partition;
  Matrix best_z = init.assignments;
  double best_val = -1.0;
  int best_epoch = -1;
  report.stop_reason = "epoch_limit";

  for (int epoch = 0; epoch < config.epoch; ++epoch) {
    for (ParamBlock* p : params) p->zero_grad();
    Tape tape;
    const ForwardPass f = model.forward(tape, inputs.ego_input, ops, dropout_rng);
    const Prototypes protos = compute_prototypes(tape.value(f.ego), trust, graph.num_classes);
    Var ce = cross_entropy(tape, f.assignments, graph.labels, masks.train);
    Var tpc = config.beta > 0.0 ? tpc_loss(tape, f.ego, trust, protos, config.tau) : tape.constant(Matrix::Zero(1, 1));
    Var total = total_loss(tape, ce, tpc, config.beta);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.ce = tape.scalar(ce);
    rec.tpc = tape.scalar(tpc);
    rec.total = tape.scalar(total);
    if (!std::isfinite(rec.total)) {
      best_params.restore(params);
      if (options.failure_dir) {
        std::filesystem::create_directories(*options.failure_dir);
        Checkpoint{graph.name, masks.split_id, best_epoch, config, best_params, best_partition}.save(
            *options.failure_dir / "last_good.ckpt.json");
        write_json(*options.failure_dir / "diagnostics.json",
                   {{"epoch", epoch}, {"ce", std::to_string(rec.ce)}, {"tpc", std::to_string(rec.tpc)},
                    {"best_epoch", best_epoch}, {"trust_size", trust.nodes.size()}});
      }
      throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + " (ce=" + std::to_string(rec.ce) +
                         " tpc=" + std::to_string(rec.tpc) + ")");
    }

    Matrix z = dropout_rng ? predict(model, inputs.ego_input, ops) : tape.value(f.assignments);
    tape.backward(total);
    const std::vector<int> hard = row_argmax(z);
    rec.train_accuracy = accuracy(hard, graph.labels, masks.train);
    rec.val_accuracy = accuracy(hard, graph.labels, masks.val);
    rec.test_accuracy = accuracy(hard, graph.labels, masks.test);

    if (rec.val_accuracy > best_val) {
      best_val = rec.val_accuracy;
      best_epoch = epoch;
      best_params = ParamSnapshot::capture(params);
      best_partition = partition;
      report.train_accuracy = rec.train_accuracy;
      report.test_accuracy = rec.test_accuracy;
      if (config.refresh == RefreshPolicy::kOnImprovement) {
        partition = partition_from(z, inputs, config.lambda, config.sharpen, epoch);
        ops = PartitionOperators::build(partition, graph.num_nodes);
        trust = build_trust_set(z, accuracy(hard, graph.labels, known));
        rec.refreshed = true;
        ++report.refresh_count;
      }
      best_z = std::move(z);
    }
    report.epochs.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);
    if (epoch - best_epoch >= config.patience) {
      report.stop_reason = "patience";
      break;
    }
    adam_step(params, opt);
  }

  best_params.restore(params);
  report.best_epoch = best_epoch;
  report.best_val_accuracy = best_val;
  report.final_partition = partition_quality(best_partition, graph.labels);
  PartitionOperators best_ops = PartitionOperators::build(best_partition, graph.num_nodes);
  Checkpoint ckpt{graph.name, masks.split_id, best_epoch, config, best_params, best_partition};
  return TrainResult{std::move(model), std::move(best_partition), std::move(best_ops), std::move(best_z),
                     std::move(report), std::move(ckpt)};
}

RestoredModel restore(const Checkpoint& checkpoint, const Graph& graph, const SplitMasks& masks) {
  PreparedInputs inputs = prepare_inputs(graph, masks, checkpoint.config);
  std::mt19937_64 rng(0);
  HdpModel model(model_config(checkpoint.config, inputs, graph.num_classes), rng);
  checkpoint.params.restore(model.parameters());
  for (const auto* list : {&checkpoint.partition.hm_edges, &checkpoint.partition.ht_edges}) {
    for (const Edge& e : *list) {
      if (e.u < 0 || e.v >= graph.num_nodes || e.u >= e.v) throw DataError("checkpoint edge out of range");
    }
  }
  PartitionOperators ops = PartitionOperators::build(checkpoint.partition, graph.num_nodes);
  return RestoredModel{std::move(model), std::move(inputs), std::move(ops)};
}

}  // namespace hdp
