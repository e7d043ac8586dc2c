// Serial reference vs OpenMP kernels on synthetic inputs.

#include "protctx/kernels.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

using namespace protctx;

namespace {

constexpr char kResidues[] = "ACDEFGHIKLMNPQRSTVWY";

std::vector<std::string> proteins(std::size_t n, std::size_t len, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 19);
  std::vector<std::string> out(n);
  for (auto& s : out) {
    s.resize(len);
    for (auto& c : s) c = kResidues[pick(rng)];
  }
  return out;
}

std::vector<double> points(std::size_t n, std::size_t dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> out(n * dim);
  for (auto& v : out) v = d(rng);
  return out;
}

std::vector<std::vector<std::string>> label_sets(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::string>> out(n);
  for (auto& s : out) {
    for (auto k = rng() % 6; k > 0; --k) s.push_back("1.2." + std::to_string(rng() % 8) + ".1");
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return out;
}

template <bool Serial>
void BM_identities_to(benchmark::State& state) {
  const auto refs = proteins(static_cast<std::size_t>(state.range(0)), 200, 1);
  const auto query = proteins(1, 200, 2).front();
  const AlignmentParams params;
  for (auto _ : state) {
    auto r = Serial ? kernels::identities_to_serial(query, refs, params)
                    : kernels::identities_to(query, refs, params);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Serial>
void BM_max_identities(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto queries = proteins(n, 150, 3);
  const auto refs = proteins(n, 150, 4);
  const AlignmentParams params;
  for (auto _ : state) {
    auto r = Serial ? kernels::max_identities_serial(queries, refs, params)
                    : kernels::max_identities(queries, refs, params);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <bool Serial>
void BM_distance_matrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pts = points(n, 128, 5);
  for (auto _ : state) {
    auto d = Serial ? kernels::distance_matrix_serial(pts, n, 128, DistanceMetric::Cosine)
                    : kernels::distance_matrix(pts, n, 128, DistanceMetric::Cosine);
    benchmark::DoNotOptimize(d);
  }
}

template <bool Serial>
void BM_closest_pair(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto dist = kernels::distance_matrix_serial(points(n, 16, 6), n, 16,
                                                    DistanceMetric::Euclidean);
  std::vector<std::size_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = i;
  for (auto _ : state) {
    auto p = Serial ? kernels::closest_pair_serial(dist, n, active)
                    : kernels::closest_pair(dist, n, active);
    benchmark::DoNotOptimize(p);
  }
}

template <bool Serial>
void BM_set_counts(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto preds = label_sets(n, 7);
  const auto golds = label_sets(n, 8);
  for (auto _ : state) {
    auto c = Serial ? kernels::set_counts_serial(preds, golds) : kernels::set_counts(preds, golds);
    benchmark::DoNotOptimize(c);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_identities_to<true>)->Name("identities_to/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_identities_to<false>)->Name("identities_to/omp")->Arg(64)->Arg(256);
BENCHMARK(BM_max_identities<true>)->Name("max_identities/serial")->Arg(16)->Arg(48);
BENCHMARK(BM_max_identities<false>)->Name("max_identities/omp")->Arg(16)->Arg(48);
BENCHMARK(BM_distance_matrix<true>)->Name("distance_matrix/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_distance_matrix<false>)->Name("distance_matrix/omp")->Arg(256)->Arg(1024);
BENCHMARK(BM_closest_pair<true>)->Name("closest_pair/serial")->Arg(512)->Arg(2048);
BENCHMARK(BM_closest_pair<false>)->Name("closest_pair/omp")->Arg(512)->Arg(2048);
BENCHMARK(BM_set_counts<true>)->Name("set_counts/serial")->Arg(1000)->Arg(100000);
BENCHMARK(BM_set_counts<false>)->Name("set_counts/omp")->Arg(1000)->Arg(100000);

BENCHMARK_MAIN();
