#include <benchmark/benchmark.h>

#include <random>

#include "hdp/graph_io.hpp"
#include "hdp/partition.hpp"
#include "hdp/synthetic.hpp"
#include "hdp/tape.hpp"
#include "hdp/trainer.hpp"

namespace {

hdp::Graph bench_graph(int n, double density) {
  hdp::SyntheticSpec spec;
  spec.num_nodes = n;
  spec.num_classes = 6;
  spec.num_features = 3000;
  spec.average_degree = 3.0;
  spec.feature_density = density;
  spec.seed = 1;
  return hdp::make_synthetic_graph(spec);
}

void BM_Spmm(benchmark::State& state) {
  const hdp::Graph g = bench_graph(static_cast<int>(state.range(0)), 0.01);
  const hdp::SparseMatrix a = hdp::row_normalize(g, true).matrix();
  const hdp::Matrix h = hdp::Matrix::Random(g.num_nodes, 128);
  for (auto _ : state) {
    hdp::Matrix out = a * h;
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Spmm)->Arg(1000)->Arg(4000);

void BM_SparseAffineBackward(benchmark::State& state) {
  const hdp::Graph g = bench_graph(static_cast<int>(state.range(0)), 0.01);
  const hdp::SparseMatrix x = hdp::sparse_features(g, true);
  std::mt19937_64 rng(0);
  hdp::ParamBlock p("w", x.cols(), 512);
  p.glorot_init(rng);
  for (auto _ : state) {
    hdp::Tape tape;
    hdp::Var y = tape.affine(x, p);
    hdp::Var loss = tape.cross_entropy(tape.row_softmax(y), g.labels, std::vector<hdp::NodeId>{0, 1, 2});
    tape.backward(loss);
    benchmark::DoNotOptimize(p.grad_weights.data());
  }
}
BENCHMARK(BM_SparseAffineBackward)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_PartitionSplit(benchmark::State& state) {
  const hdp::Graph g = bench_graph(static_cast<int>(state.range(0)), 0.01);
  const hdp::EdgeSet edges = hdp::khop_edge_set(g, 2);
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(edges.size());
  for (double& v : p) v = u(rng);
  for (auto _ : state) {
    hdp::Partition part = hdp::split(p, 0.4, edges);
    benchmark::DoNotOptimize(part.hm_edges.data());
  }
  state.counters["edges"] = static_cast<double>(edges.size());
}
BENCHMARK(BM_PartitionSplit)->Arg(1000)->Arg(4000);

void BM_TrainEpoch(benchmark::State& state) {
  const hdp::Graph g = bench_graph(static_cast<int>(state.range(0)), 0.01);
  const hdp::SplitMasks masks = hdp::random_split(g.num_nodes, 0, 0);
  hdp::TrainConfig config;
  config.epoch_init = 1;
  config.epoch = 1;
  config.structural_dim = 256;
  for (auto _ : state) {
    hdp::TrainResult r = hdp::train(g, masks, config);
    benchmark::DoNotOptimize(r.report.test_accuracy);
  }
}
BENCHMARK(BM_TrainEpoch)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
