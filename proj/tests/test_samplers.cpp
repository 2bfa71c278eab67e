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

#include <doctest.h>

#include <cmath>
#include <map>

#include "qbmrl/boltzmann.hpp"
#include "qbmrl/error.hpp"
#include "qbmrl/ising.hpp"
#include "qbmrl/rng.hpp"
#include "qbmrl/samplers.hpp"

using namespace qbmrl;

namespace {

SaSchedule sa(std::size_t sweeps, std::size_t reads, double beta_final = 2.0) {
  SaSchedule s;
  s.n_sweeps = sweeps;
  s.n_reads = reads;
  s.beta_final = beta_final;
  return s;
}

SqaSchedule fixed_sqa(double gamma, std::size_t sweeps, std::size_t reads,
                      std::size_t replicas = 25) {
  SqaSchedule s;
  s.gamma_initial = gamma;
  s.gamma_final = gamma;
  s.n_sweeps = sweeps;
  s.n_reads = reads;
  s.n_replicas = replicas;
  return s;
}

double fraction_plus(const SampleSet& set, std::size_t spin) {
  double plus = 0.0;
  for (const auto& r : set.reads) plus += r[spin] > 0;
  return plus / static_cast<double>(set.size());
}

}  // namespace

TEST_SUITE("samplers") {
  TEST_CASE("schedules interpolate linearly and validate") {
    SaSchedule s = sa(5, 1);
    s.beta_initial = 1.0;
    s.beta_final = 3.0;
    CHECK(s.beta_at(0) == 1.0);
    CHECK(s.beta_at(2) == doctest::Approx(2.0));
    CHECK(s.beta_at(4) == 3.0);
    CHECK(sa(1, 1).beta_at(0) == 2.0);

    SqaSchedule q;
    q.n_sweeps = 3;
    CHECK(q.gamma_at(0) == 20.0);
    CHECK(q.gamma_at(2) == doctest::Approx(0.01));

    CHECK_THROWS_AS(sa(0, 1).validate(), ParameterError);
    CHECK_THROWS_AS(sa(1, 0).validate(), ParameterError);
    CHECK_THROWS_AS(sa(1, 1, 0.001).validate(), ParameterError);
    SqaSchedule bad;
    bad.n_replicas = 1;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = SqaSchedule{};
    bad.gamma_final = 0.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    bad = SqaSchedule{};
    bad.gamma_final = 30.0;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    CHECK_THROWS_AS(sa_sample(IsingModel(2), sa(0, 1), 1), ParameterError);
  }

  TEST_CASE("SA on a free model is unbiased") {
    const auto set = sa_sample(IsingModel(5), sa(10, 4000), 3);
    const auto ex = slice_expectations(set);
    const double se = 1.0 / std::sqrt(4000.0);
    for (double m : ex.spin_mean) CHECK(std::abs(m) < 4.0 * se);
  }

  TEST_CASE("SA single spin and aligned pair follow Boltzmann at beta_final") {
    const double p = std::exp(2.0) / (std::exp(2.0) + std::exp(-2.0));
    const double se = std::sqrt(p * (1 - p) / 1e4);

    const auto one = sa_sample(IsingModel(std::vector<double>{1.0}, {}), sa(200, 10000), 17);
    CHECK(std::abs(fraction_plus(one, 0) - p) < 4.0 * se);

    const auto two = sa_sample(IsingModel({0.0, 0.0}, {{0, 1, 1.0}}), sa(200, 10000), 19);
    double aligned = 0.0;
    for (const auto& r : two.reads) aligned += r[0] == r[1];
    CHECK(std::abs(aligned / 1e4 - p) < 4.0 * se);
  }

  TEST_CASE("SA at large beta finds the ground state of a trap-free model") {
    // |h_i| exceeds the summed couplings of spin i, so the only single-flip
    // minimum is the ground state.
    Rng rng(23);
    for (int trial = 0; trial < 5; ++trial) {
      IsingModel m(4);
      for (std::size_t i = 0; i < 4; ++i) {
        m.set_bias(i, (rng.bernoulli(0.5) ? 1.0 : -1.0) * (1.0 + rng.uniform()));
        for (std::size_t j = i + 1; j < 4; ++j) m.set_coupling(i, j, 0.6 * rng.uniform() - 0.3);
      }
      double best = INFINITY;
      SpinConfiguration ground;
      for (int b = 0; b < 16; ++b) {
        std::vector<std::int8_t> s(4);
        for (int i = 0; i < 4; ++i) s[i] = (b >> i) & 1 ? 1 : -1;
        const double e = classical_energy(m, SpinConfiguration(s));
        if (e < best) best = e, ground = SpinConfiguration(s);
      }
      const auto set = sa_sample(m, sa(300, 200, 50.0), 100 + trial);
      double hits = 0.0;
      for (const auto& r : set.reads) hits += r == ground;
      CHECK(hits / 200.0 > 0.95);
    }
  }

  TEST_CASE("SA at large beta ends in single-flip local minima") {
    Rng rng(29);
    for (int trial = 0; trial < 5; ++trial) {
      IsingModel m(5);
      for (std::size_t i = 0; i < 5; ++i) {
        m.set_bias(i, rng.normal());
        for (std::size_t j = i + 1; j < 5; ++j) m.set_coupling(i, j, rng.normal());
      }
      const auto set = sa_sample(m, sa(300, 100, 50.0), 200 + trial);
      std::size_t minima = 0;
      for (const auto& r : set.reads) {
        const double e = classical_energy(m, r);
        bool local = true;
        for (std::size_t i = 0; i < 5; ++i) {
          std::vector<std::int8_t> flipped(r.spins().begin(), r.spins().end());
          flipped[i] = static_cast<std::int8_t>(-flipped[i]);
          local &= classical_energy(m, SpinConfiguration(flipped)) >= e - 1e-12;
        }
        minima += local;
      }
      CHECK(minima >= 99);
    }
  }

  TEST_CASE("sampler output is deterministic and energies recompute exactly") {
    IsingModel m({0.3, -0.2, 0.1}, {{0, 1, 0.5}, {1, 2, -0.7}});
    const auto a = sa_sample(m, sa(50, 20), 9);
    const auto b = sa_sample(m, sa(50, 20), 9);
    CHECK(a.reads == b.reads);
    CHECK(a.effective_energies == b.effective_energies);
    CHECK(a.size() == 20);
    for (std::size_t r = 0; r < a.size(); ++r) {
      CHECK(a.effective_energies[r] == classical_energy(m, a.reads[r]));
    }

    SqaSchedule q;
    q.n_sweeps = 30;
    q.n_reads = 10;
    const auto c = sqa_sample(m, q, 4);
    const auto d = sqa_sample(m, q, 4);
    CHECK(c.reads == d.reads);
    CHECK(c.n_slices == 25);
    CHECK(c.reads.front().size() == 75);
    CHECK(c.sampling_beta() == 2.0);
    const auto ext = build_effective_model(m, q.gamma_final, q.beta, q.n_replicas);
    for (std::size_t r = 0; r < c.size(); ++r) {
      CHECK(c.effective_energies[r] == effective_energy(ext, c.reads[r]));
    }
    CHECK(sa_sample(m, sa(50, 20), 10).reads != a.reads);
  }

  TEST_CASE("SQA pure transverse field has zero magnetisation") {
    const auto set = sqa_sample(IsingModel(std::vector<double>{0.0}, {}), fixed_sqa(2.0, 100, 400), 5);
    CHECK(std::abs(slice_expectations(set).spin_mean[0]) < 0.05);
  }

  TEST_CASE("SQA single spin matches the 2x2 oracle") {
    IsingModel m({1.0}, {}, 2.0);
    const double exact = exact_transverse_field_thermal(m, 2.0).z_mean[0];
    const auto set = sqa_sample(m, fixed_sqa(2.0, 200, 300), 6);
    CHECK(slice_expectations(set).spin_mean[0] == doctest::Approx(exact).epsilon(0.05 / exact));
  }

  TEST_CASE("SQA at fixed field samples the extended Boltzmann law") {
    IsingModel m({0.4, -0.3}, {{0, 1, 0.6}});
    const std::size_t r = 3;
    const double gamma = 1.0, beta = 2.0;
    const auto ext = build_effective_model(m, gamma, beta, r);
    std::map<SpinConfiguration, double> exact;
    double z = 0.0;
    for (int b = 0; b < 64; ++b) {
      std::vector<std::int8_t> s(6);
      for (int i = 0; i < 6; ++i) s[i] = (b >> i) & 1 ? 1 : -1;
      const double w = std::exp(-beta * effective_energy(ext, SpinConfiguration(s)));
      exact[SpinConfiguration(s)] = w;
      z += w;
    }
    auto q = fixed_sqa(gamma, 60, 20000, r);
    q.beta = beta;
    const auto set = sqa_sample(m, q, 77);
    std::map<SpinConfiguration, double> freq;
    for (const auto& read : set.reads) freq[read] += 1.0 / 20000.0;
    double tv = 0.0;
    for (const auto& [c, w] : exact) {
      const auto it = freq.find(c);
      tv += std::abs(w / z - (it == freq.end() ? 0.0 : it->second));
    }
    CHECK(tv / 2.0 < 0.05);
  }

  TEST_CASE("slice expectations") {
    SampleSet set;
    set.kind = SamplerKind::kSimulatedQuantumAnnealing;
    set.n_spins = 2;
    set.n_slices = 2;
    set.reads = {SpinConfiguration::uniform(4)};
    auto ex = slice_expectations(set);
    CHECK(ex.spin_mean == std::vector<double>{1.0, 1.0});
    CHECK(ex.pair(0, 1) == 1.0);
    CHECK(ex.n_points == 2);

    // Slices (+,+), (+,-); (-,-), (-,+): <s0> = 0, <s1> = 0, <s0 s1> = 0.
    set.reads = {SpinConfiguration({1, 1, 1, -1}), SpinConfiguration({-1, -1, -1, 1})};
    ex = slice_expectations(set);
    CHECK(ex.spin_mean[0] == 0.0);
    CHECK(ex.spin_mean[1] == 0.0);
    CHECK(ex.pair(0, 1) == 0.0);

    // Three points: (+,+), (+,-), (+,+) -> <s0> = 1, <s1> = 1/3, <s0 s1> = 1/3.
    SampleSet sa_set;
    sa_set.n_spins = 2;
    sa_set.reads = {SpinConfiguration({1, 1}), SpinConfiguration({1, -1}),
                    SpinConfiguration({1, 1})};
    ex = slice_expectations(sa_set);
    CHECK(ex.spin_mean[0] == 1.0);
    CHECK(ex.spin_mean[1] == doctest::Approx(1.0 / 3.0));
    CHECK(ex.pair(1, 0) == doctest::Approx(1.0 / 3.0));

    CHECK_THROWS_AS(slice_expectations(SampleSet{}), UsageError);
  }
}

TEST_SUITE("samplers_classical_limit") {
  TEST_CASE("SQA at a vanishing field reproduces the classical Boltzmann distribution") {
    Rng rng(41);
    auto bm = BoltzmannMachine::dbm(3, 5, {2, 2});
    bm.randomize(rng);
    const auto v = VisibleAssignment::one_hot(3, 5, 1, 2);
    SqaSchedule q;
    q.gamma_final = 0.01;
    q.n_reads = 10000;
    const auto samples = sqa_sample(clamp(bm, v).ising, q, 9);
    std::map<std::uint64_t, double> diff;
    for (const auto& [k, p] : empirical_hidden_distribution(samples).mass) diff[k] += p;
    for (const auto& [k, p] : exact_hidden_distribution(bm, v, q.beta).mass) diff[k] -= p;
    double tv = 0.0;
    for (const auto& [k, d] : diff) tv += std::abs(d);
    CHECK(0.5 * tv < 0.05);
  }
}
