// Copyright 2026 The qbmrl Authors.
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

// Acceptance checks. Usage: qbmrl_acceptance A1 [A2 ...] [--out DIR]
// Prints one PASS/FAIL line per criterion; exits nonzero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qbmrl/boltzmann.hpp"
#include "qbmrl/experiment.hpp"
#include "qbmrl/ising.hpp"
#include "qbmrl/maze.hpp"
#include "qbmrl/rng.hpp"
#include "qbmrl/samplers.hpp"
#include "qbmrl/training.hpp"

using namespace qbmrl;

namespace {

const char* kMaze3x5 = "R....\n..W..\n..P..";

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::filesystem::path g_out = std::filesystem::temp_directory_path() / "qbmrl_acceptance";

// Random DBM with 4 + 4 hidden nodes clamped at a random one-hot visible.
struct ClampedCase {
  BoltzmannMachine bm;
  VisibleAssignment v;
};

ClampedCase random_dbm8(Rng& rng) {
  auto bm = BoltzmannMachine::dbm(6, 5, {4, 4});
  bm.randomize(rng);
  auto v = VisibleAssignment::one_hot(6, 5, rng.below(6), rng.below(5));
  return {std::move(bm), std::move(v)};
}

std::map<std::uint64_t, double> as_map(const HiddenDistribution& d) {
  return {d.mass.begin(), d.mass.end()};
}

double total_variation(const HiddenDistribution& a, const HiddenDistribution& b) {
  auto ma = as_map(a);
  auto mb = as_map(b);
  double tv = 0.0;
  for (const auto& [k, p] : ma) tv += std::abs(p - (mb.count(k) ? mb[k] : 0.0));
  for (const auto& [k, p] : mb) {
    if (!ma.count(k)) tv += p;
  }
  return 0.5 * tv;
}

Outcome a1() {
  Rng rng(101);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t hidden = 1 + rng.below(16);
    const std::size_t ns = 1 + rng.below(14);
    auto bm = BoltzmannMachine::rbm(ns, kNumActions, hidden);
    bm.randomize(rng);
    const auto v = VisibleAssignment::one_hot(ns, kNumActions, rng.below(ns), rng.below(5));
    worst = std::max(worst, std::abs(rbm_free_energy(bm, v).value - exact_free_energy(bm, v, 1.0)));
  }
  return {worst < 1e-9, "max |closed form - enumeration| = " + fmt("%.3g", worst) + " over 100 RBMs"};
}

Outcome a2() {
  Rng rng(202);
  double worst = 0.0;
  const double h = 1e-5;
  for (int t = 0; t < 20; ++t) {
    const std::size_t m = 2 + rng.below(9);
    BoltzmannMachine bm = t % 2 ? BoltzmannMachine::gbm(4, kNumActions, m)
                                : BoltzmannMachine::dbm(4, kNumActions, {m / 2, m - m / 2});
    bm.randomize(rng);
    const auto v = VisibleAssignment::one_hot(4, kNumActions, rng.below(4), rng.below(5));
    const auto ex = expectations_of(exact_hidden_distribution(bm, v, 1.0));
    auto fd = [&](std::size_t edge) {
      auto plus = bm, minus = bm;
      plus.add_to_weight(edge, h);
      minus.add_to_weight(edge, -h);
      return (exact_free_energy(plus, v, 1.0) - exact_free_energy(minus, v, 1.0)) / (2 * h);
    };
    auto rel = [](double got, double want) {
      return std::abs(got - want) / std::max(std::abs(want), 1e-3);
    };
    for (auto node : {bm.state_node(v.state()), bm.action_node(v.action())}) {
      for (const auto& link : bm.links_of_visible(node)) {
        worst = std::max(worst, rel(fd(link.edge), -ex.mean[link.hidden]));
      }
    }
    for (const auto& p : bm.hidden_pairs()) {
      worst = std::max(worst, rel(fd(p.edge), -ex.pair_mean(p.first, p.second)));
    }
  }
  return {worst < 1e-6, "max relative error = " + fmt("%.3g", worst) + " over 20 machines"};
}

Outcome a3() {
  Rng rng(303);
  double worst = 0.0;
  SaSchedule s;
  s.n_reads = 10000;
  s.n_sweeps = 1000;
  for (int t = 0; t < 20; ++t) {
    const auto c = random_dbm8(rng);
    const auto samples = sa_sample(clamp(c.bm, c.v).ising, s, rng.next_seed());
    worst = std::max(worst, total_variation(empirical_hidden_distribution(samples),
                                            exact_hidden_distribution(c.bm, c.v, 2.0)));
  }
  return {worst < 0.05, "max TV = " + fmt("%.4f", worst) + " over 20 clamped DBMs"};
}

Outcome a4() {
  Rng rng(303);  // same models as A3
  double worst = 0.0;
  SqaSchedule q;
  q.gamma_final = 0.01;
  q.n_reads = 10000;
  for (int t = 0; t < 20; ++t) {
    const auto c = random_dbm8(rng);
    const auto samples = sqa_sample(clamp(c.bm, c.v).ising, q, rng.next_seed() ^ 0x5a5a);
    worst = std::max(worst, total_variation(empirical_hidden_distribution(samples),
                                            exact_hidden_distribution(c.bm, c.v, q.beta)));
  }
  return {worst < 0.05, "max single-slice TV = " + fmt("%.4f", worst) + " over 20 clamped DBMs"};
}

Outcome a5() {
  Rng rng(505);
  double worst_sz = 0.0;
  double worst_f = 0.0;
  SqaSchedule q;
  q.gamma_initial = 2.0;
  q.gamma_final = 2.0;
  q.beta = 2.0;
  q.n_replicas = 16;
  q.n_sweeps = 200;
  q.n_reads = 20000;
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int t = 0; t < 3; ++t) {
      std::vector<double> h(n);
      for (auto& x : h) x = rng.normal();
      std::vector<Coupling> j;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) j.push_back({a, b, rng.normal()});
      IsingModel model(h, j);
      IsingModel quantum = model;
      quantum.set_transverse_field(2.0);
      const auto exact = exact_transverse_field_thermal(quantum, 2.0);
      const auto samples = sqa_sample(model, q, rng.next_seed());
      const auto ex = slice_expectations(samples);
      for (std::size_t i = 0; i < n; ++i) {
        worst_sz = std::max(worst_sz, std::abs(ex.spin_mean[i] - exact.z_mean[i]));
      }
      QuantumFreeEnergyOptions opts;
      opts.include_trotter_normalization = true;
      worst_f = std::max(worst_f, std::abs(quantum_free_energy(samples, 2.0, opts).value -
                                           exact.free_energy));
    }
  }
  return {worst_sz < 0.05 && worst_f < 0.1,
          "max |<sz> - exact| = " + fmt("%.4f", worst_sz) + ", max |F - exact| = " +
              fmt("%.4f", worst_f) + " over 12 models"};
}

Outcome a6() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = parse_maze(kMaze3x5);
  const auto opt = value_iteration(m, TransitionKernel::clear());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  using A = Action;
  const std::map<std::pair<std::size_t, std::size_t>, std::vector<Action>> drawn = {
      {{0, 0}, {A::kStay}},  {{0, 1}, {A::kLeft}},          {{0, 2}, {A::kLeft}},
      {{0, 3}, {A::kLeft}},  {{0, 4}, {A::kLeft}},          {{1, 0}, {A::kUp}},
      {{1, 1}, {A::kUp, A::kLeft}}, {{1, 3}, {A::kUp}},     {{1, 4}, {A::kUp, A::kLeft}},
      {{2, 0}, {A::kUp}},    {{2, 1}, {A::kUp, A::kLeft}},  {{2, 2}, {A::kLeft}},
      {{2, 3}, {A::kUp}},    {{2, 4}, {A::kUp, A::kLeft}}};
  std::size_t mismatches = 0;
  for (const auto& [rc, acts] : drawn) {
    mismatches += opt.optimal[*m.state_at({rc.first, rc.second})] != acts;
  }
  mismatches += drawn.size() != m.n_states();
  return {mismatches == 0 && secs < 1.0,
          std::to_string(mismatches) + " mismatching cells, " + fmt("%.4f", secs) + " s"};
}

Outcome a10() {
  const auto m = parse_maze(kMaze3x5);
  const auto opt = value_iteration(m, TransitionKernel::clear());
  const double closed = random_policy_fidelity(m, opt);
  const auto mc = monte_carlo_random_fidelity(m, opt, 100000, 1010);
  const double z = std::abs(mc.mean - closed) / mc.standard_error;
  return {z < 3.0, "closed form " + fmt("%.6f", closed) + ", Monte Carlo " + fmt("%.6f", mc.mean) +
                       " (" + fmt("%.2f", z) + " SE)"};
}

// Training study shared by A7 and A8.
struct OrderingStudy {
  std::map<std::string, AlgorithmResult> by_tag;
  double baseline = 0.0;
};

const OrderingStudy& ordering_study() {
  static const OrderingStudy result = [] {
    ExperimentSpec spec;
    spec.maze_text = kMaze3x5;
    spec.maze_path = "maze3x5";
    spec.n_runs = kDeskRuns;
    spec.n_samples = 500;
    spec.output_dir = g_out;
    for (auto a : {Algorithm::kRbmRl, Algorithm::kDbmRlSa, Algorithm::kDbmRlSqa,
                   Algorithm::kQbmRl}) {
      spec.algorithms.push_back(TrainingConfig::desk_scale(a));
    }
    auto r = run_experiment(spec);
    OrderingStudy f;
    f.baseline = r.random_baseline;
    for (auto& ar : r.algorithms) f.by_tag[ar.tag] = std::move(ar);
    return f;
  }();
  return result;
}

// Mean and standard error across runs of each run's mean over samples 401..500.
std::pair<double, double> tail_stat(const FidelityTrace& t, std::size_t window) {
  std::vector<double> per_run;
  const std::size_t ts = t.n_samples();
  for (const auto& run : t.per_run) {
    double s = 0.0;
    for (std::size_t i = ts - window + 1; i <= ts; ++i) s += run[i];
    per_run.push_back(s / static_cast<double>(window));
  }
  double mean = 0.0;
  for (double x : per_run) mean += x;
  mean /= static_cast<double>(per_run.size());
  double ss = 0.0;
  for (double x : per_run) ss += (x - mean) * (x - mean);
  const double n = static_cast<double>(per_run.size());
  return {mean, n > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0};
}

Outcome a7() {
  const auto& f = ordering_study();
  const auto [q, se_q] = tail_stat(f.by_tag.at("qbm").trace, 100);
  const auto [d, se_d] = tail_stat(f.by_tag.at("dbm-sqa").trace, 100);
  const auto [r, se_r] = tail_stat(f.by_tag.at("rbm").trace, 100);
  const bool qd = q - d > std::hypot(se_q, se_d);
  const bool dr = d - r > std::hypot(se_d, se_r);
  return {qd && dr, "last-100 mean: qbm " + fmt("%.4f", q) + " (se " + fmt("%.4f", se_q) +
                        "), dbm-sqa " + fmt("%.4f", d) + " (se " + fmt("%.4f", se_d) + "), rbm " +
                        fmt("%.4f", r) + " (se " + fmt("%.4f", se_r) + "); baseline " +
                        fmt("%.4f", f.baseline)};
}

Outcome a8() {
  const auto& f = ordering_study();
  const auto& sa = f.by_tag.at("dbm-sa").trace;
  const auto& sqa = f.by_tag.at("dbm-sqa").trace;
  std::size_t bad = 0;
  double worst = 0.0;
  for (std::size_t i = 50; i <= 500; i += 50) {
    const double pooled = std::sqrt(0.5 * (sa.std[i] * sa.std[i] + sqa.std[i] * sqa.std[i]));
    const double diff = std::abs(sa.mean[i] - sqa.mean[i]);
    worst = std::max(worst, pooled > 0 ? diff / pooled : (diff > 0 ? INFINITY : 0.0));
    bad += diff > pooled;
  }
  return {bad == 0, std::to_string(bad) + "/10 checkpoints outside 1 std; max |diff|/std = " +
                        fmt("%.3f", worst)};
}

Outcome a9() {
  std::ostringstream detail;
  std::vector<double> gaps;
  bool dominates = true;
  for (std::size_t n : {3, 5, 7}) {
    ExperimentSpec spec;
    spec.maze_text = nx5_maze(n).to_text();
    spec.maze_path = "nx5-" + std::to_string(n);
    spec.n_runs = 20;
    spec.n_samples = 500;
    spec.windows = {500};
    spec.output_dir = g_out / ("n" + std::to_string(n));
    auto rbm = TrainingConfig::desk_scale(Algorithm::kRbmRl);
    rbm.hidden_layers = {20};
    auto dbm = TrainingConfig::desk_scale(Algorithm::kDbmRlSqa);
    dbm.hidden_layers = {10, 10};
    spec.algorithms = {rbm, dbm};
    const auto r = run_experiment(spec);
    const double av_r = r.algorithms[0].averages.front().second;
    const double av_d = r.algorithms[1].averages.front().second;
    dominates &= av_d >= av_r;
    gaps.push_back(av_d - av_r);
    detail << "n=" << n << ": dbm " << fmt("%.4f", av_d) << " rbm " << fmt("%.4f", av_r)
           << " random " << fmt("%.4f", r.random_baseline) << "; ";
  }
  const bool growing = gaps[0] < gaps[1] && gaps[1] < gaps[2];
  detail << (growing ? "gap grows with n" : "gap does not grow monotonically");
  return {dominates && growing, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"A1", {"RBM closed form vs enumeration", a1}},
      {"A2", {"gradient identities", a2}},
      {"A3", {"SA matches the Boltzmann distribution", a3}},
      {"A4", {"SQA classical limit", a4}},
      {"A5", {"SQA quantum limit", a5}},
      {"A6", {"value iteration reproduces the optimal-action map", a6}},
      {"A7", {"QBM-RL > DBM-RL > RBM-RL on the 3x5 maze", a7}},
      {"A8", {"DBM-RL with SA and SQA agree", a8}},
      {"A9", {"n x 5 scaling: DBM-RL vs RBM-RL", a9}},
      {"A10", {"random baseline vs Monte Carlo", a10}},
  };

  std::vector<std::string> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--out" && i + 1 < argc) {
      g_out = argv[++i];
    } else if (criteria.count(arg)) {
      selected.push_back(arg);
    } else {
      std::fprintf(stderr, "unknown argument %s\n", arg.c_str());
      return 2;
    }
  }
  if (selected.empty()) {
    for (const auto& [id, c] : criteria) selected.push_back(id);
  }

  int failures = 0;
  for (const auto& id : selected) {
    const auto& [title, fn] = criteria.at(id);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("%s %s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id.c_str(), title.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
