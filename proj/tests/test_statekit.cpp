#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "protosim/errors.hpp"
#include "protosim/statekit.hpp"

using namespace protosim;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

std::vector<SubsystemSpec> atom_cavity_registry() {
  return {atom_internal("a1.int"), atom_momentum("a1.mom"), cavity_mode("C1")};
}

// |g,P0> (x) (|0>+|1>)/sqrt(2) — the standard injection state
KetState injection_state() {
  return make_state(atom_cavity_registry(),
                    {{{{"a1.int", "g"}, {"a1.mom", "P0"}, {"C1", "0"}}, {kInvSqrt2, 0.0}},
                     {{{"a1.int", "g"}, {"a1.mom", "P0"}, {"C1", "1"}}, {kInvSqrt2, 0.0}}},
                    false);
}

// random sparse state over the given registry, with distinct configs
KetState random_state(const std::vector<SubsystemSpec>& registry, int terms, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::pair<Assignment, Complex>> entries;
  std::set<std::string> seen;
  while (static_cast<int>(entries.size()) < terms) {
    Assignment config;
    std::string sig;
    for (const auto& spec : registry) {
      std::uniform_int_distribution<int> pick(0, spec.dim() - 1);
      config[spec.id] = spec.basis[pick(rng)];
      sig += config[spec.id] + "|";
    }
    if (!seen.insert(sig).second) continue;
    entries.emplace_back(std::move(config), Complex{gauss(rng), gauss(rng)});
  }
  return make_state(registry, entries, true);
}

}  // namespace

TEST_CASE("make_state: two-term injection state is normalized") {
  KetState s = injection_state();
  CHECK(s.term_count() == 2);
  CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(!s.post_selected());
}

TEST_CASE("make_state: single basis term") {
  KetState s = basis_state(atom_cavity_registry(),
                           {{"a1.int", "g"}, {"a1.mom", "P0"}, {"C1", "0"}});
  CHECK(s.term_count() == 1);
  CHECK(s.norm_squared() == doctest::Approx(1.0));
}

TEST_CASE("make_state: amplitudes (1, i)/sqrt(2) give unit norm") {
  KetState s = make_state({atom_internal("a.int")},
                          {{{{"a.int", "g"}}, {kInvSqrt2, 0.0}},
                           {{{"a.int", "e"}}, {0.0, kInvSqrt2}}},
                          false);
  CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("make_state: rejects unknown labels, unknown subsystems, zero sums") {
  auto reg = atom_cavity_registry();
  CHECK_THROWS_AS(make_state(reg, {{{{"a1.int", "x"}, {"a1.mom", "P0"}, {"C1", "0"}}, 1.0}}, true),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_state(reg, {{{{"bogus", "g"}, {"a1.mom", "P0"}, {"C1", "0"}}, 1.0}}, true),
                  std::invalid_argument);
  Assignment c{{"a1.int", "g"}, {"a1.mom", "P0"}, {"C1", "0"}};
  CHECK_THROWS_AS(make_state(reg, {{c, 1.0}, {c, -1.0}}, true), std::invalid_argument);
  CHECK_THROWS_AS(make_state(reg, {}, true), std::invalid_argument);
}

TEST_CASE("tensor: extends configs of a basis ket") {
  KetState s = injection_state();
  KetState anc = basis_state({atom_internal("b.int")}, {{"b.int", "g"}});
  KetState joint = tensor(s, anc);
  CHECK(joint.term_count() == 2);
  CHECK(joint.amplitude({{"a1.int", "g"}, {"a1.mom", "P0"}, {"C1", "1"}, {"b.int", "g"}}) ==
        Complex{kInvSqrt2, 0.0});
}

TEST_CASE("tensor: two 2-term states match the dense Kronecker oracle") {
  std::mt19937 rng(7101);
  KetState a = random_state({atom_internal("x.int"), atom_momentum("x.mom")}, 2, rng);
  KetState b = random_state({cavity_mode("cv"), atom_internal("y.int")}, 2, rng);
  KetState joint = tensor(a, b);
  CHECK(joint.term_count() == 4);
  CHECK(joint.norm_squared() == doctest::Approx(a.norm_squared() * b.norm_squared()));

  Eigen::VectorXcd dense_a = oracle::from_ket(a).psi;
  Eigen::VectorXcd dense_b = oracle::from_ket(b).psi;
  Eigen::MatrixXcd prod = oracle::kron(dense_a, dense_b);
  Eigen::VectorXcd dense_joint = oracle::from_ket(joint).psi;
  CHECK((dense_joint - prod.col(0)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("tensor: id collision is rejected") {
  KetState s = injection_state();
  CHECK_THROWS_AS(tensor(s, basis_state({atom_internal("a1.int")}, {{"a1.int", "g"}})),
                  std::invalid_argument);
}

TEST_CASE("apply_local_unitary: identity leaves the state untouched") {
  KetState s = injection_state();
  KetState t = apply_local_unitary(s, {"C1"}, Eigen::MatrixXcd::Identity(2, 2));
  for (const auto& [key, amp] : s.amplitudes()) CHECK(t.amplitudes().at(key) == amp);
}

TEST_CASE("apply_local_unitary: Pauli-X flips the internal state") {
  KetState s = basis_state(atom_cavity_registry(),
                           {{"a1.int", "g"}, {"a1.mom", "P0"}, {"C1", "0"}});
  Eigen::MatrixXcd x(2, 2);
  x << 0, 1, 1, 0;
  KetState t = apply_local_unitary(s, {"a1.int"}, x);
  CHECK(t.amplitude({{"a1.int", "e"}, {"a1.mom", "P0"}, {"C1", "0"}}) == Complex{1.0, 0.0});
  CHECK(t.term_count() == 1);
}

TEST_CASE("apply_local_unitary: Ramsey-type matrix splits |g>") {
  KetState s = basis_state({atom_internal("a.int")}, {{"a.int", "g"}});
  Eigen::MatrixXcd rz(2, 2);
  rz << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  KetState t = apply_local_unitary(s, {"a.int"}, rz);
  CHECK(std::abs(t.amplitude({{"a.int", "g"}}) - kInvSqrt2) < 1e-15);
  CHECK(std::abs(t.amplitude({{"a.int", "e"}}) - kInvSqrt2) < 1e-15);
}

TEST_CASE("apply_local_unitary: rejects non-unitary and mismatched dimensions") {
  KetState s = injection_state();
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2) * 1.5;
  CHECK_THROWS_AS(apply_local_unitary(s, {"C1"}, bad), std::invalid_argument);
  CHECK_NOTHROW(apply_local_unitary(s, {"C1"}, bad, /*allow_nonunitary=*/true));
  CHECK_THROWS_AS(apply_local_unitary(s, {"C1"}, Eigen::MatrixXcd::Identity(3, 3)),
                  std::invalid_argument);
}

TEST_CASE("apply_local_unitary: norm preserved for random unitaries on random states") {
  std::mt19937 rng(20240811);
  std::vector<SubsystemSpec> reg = {atom_internal("q.int"), atom_momentum("q.mom"),
                                    cavity_mode("cv", 2), atom_internal("r.int")};
  for (int round = 0; round < 60; ++round) {
    KetState s = random_state(reg, 1 + round % 9, rng);
    std::vector<std::vector<std::string>> target_sets = {
        {"q.int"}, {"cv"}, {"q.mom", "r.int"}, {"cv", "q.int"}};
    const auto& targets = target_sets[round % target_sets.size()];
    long dim = 1;
    for (const auto& id : targets) dim *= s.subsystem(id).dim();
    Eigen::MatrixXcd u = oracle::random_unitary(static_cast<int>(dim), rng);
    KetState t = apply_local_unitary(s, targets, u);
    CHECK(std::abs(t.norm_squared() - s.norm_squared()) < 1e-10);

    // cross-check amplitudes against the dense oracle
    oracle::Dense d = oracle::from_ket(s);
    oracle::apply(d, targets, u);
    Eigen::VectorXcd got = oracle::from_ket(t).psi;
    CHECK((got - d.psi).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("apply_local_unitary: norm preserved on a 10^4-entry state") {
  std::mt19937 rng(60101);
  std::vector<SubsystemSpec> reg;
  for (int q = 0; q < 7; ++q)
    reg.push_back(cavity_mode("m" + std::to_string(q), 3));  // 4^7 = 16384 configs
  KetState s = random_state(reg, 10000, rng);
  REQUIRE(s.term_count() == 10000);
  Eigen::MatrixXcd u = oracle::random_unitary(16, rng);
  KetState t = apply_local_unitary(s, {"m2", "m5"}, u);
  CHECK(std::abs(t.norm_squared() - s.norm_squared()) < 1e-10);
}

TEST_CASE("project_and_collapse: basis state onto its own labels") {
  KetState s = basis_state(atom_cavity_registry(),
                           {{"a1.int", "g"}, {"a1.mom", "P0"}, {"C1", "0"}});
  auto res = project_and_collapse(s, {{"a1.int", "g"}, {"a1.mom", "P0"}});
  REQUIRE(!res.impossible());
  CHECK(res.probability == doctest::Approx(1.0));
  CHECK(res.state->amplitude({{"a1.int", "g"}, {"a1.mom", "P0"}, {"C1", "0"}}) == Complex{1.0, 0.0});
  CHECK(res.state->post_selected());
}

TEST_CASE("project_and_collapse: impossible outcome is a typed result, not an exception") {
  KetState s = injection_state();
  auto res = project_and_collapse(s, {{"a1.mom", "P-2"}});
  CHECK(res.impossible());
  CHECK(res.probability == 0.0);
}

TEST_CASE("project_and_collapse: probabilities over a complete label set sum to 1") {
  std::mt19937 rng(99);
  auto reg = atom_cavity_registry();
  for (int round = 0; round < 20; ++round) {
    KetState s = random_state(reg, 5, rng);
    for (const auto& spec : reg) {
      double total = 0.0;
      for (const auto& label : spec.basis) {
        auto res = project_and_collapse(s, {{spec.id, label}});
        total += res.probability;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("project_subspace keeps coherences inside the subspace") {
  KetState s = injection_state();  // (|g,P0,0> + |g,P0,1>)/sqrt(2)
  auto res = project_subspace(s, [](const KetState&, const ConfigKey&) {
    return true;  // full space: no-op up to tag
  });
  CHECK(res.probability == doctest::Approx(1.0));
  CHECK(res.state->term_count() == 2);
}

TEST_CASE("drop_product_subsystem: untouched ancilla drops cleanly") {
  KetState s = injection_state();
  KetState anc = basis_state({cavity_mode("anc")}, {{"anc", "0"}});
  KetState joint = tensor(s, anc);
  KetState back = drop_product_subsystem(joint, "anc");
  CHECK(back.same_registry(s));
  for (const auto& [key, amp] : s.amplitudes())
    CHECK(std::abs(back.amplitudes().at(key) - amp) < 1e-12);
}

TEST_CASE("drop_product_subsystem: refuses a correlated subsystem") {
  // (|g,0> + |e,1>)/sqrt(2): cavity correlated with the atom
  KetState bell = make_state({atom_internal("a.int"), cavity_mode("cv")},
                             {{{{"a.int", "g"}, {"cv", "0"}}, {kInvSqrt2, 0.0}},
                              {{{"a.int", "e"}, {"cv", "1"}}, {kInvSqrt2, 0.0}}},
                             false);
  // oracle: the reduced cavity state is maximally mixed, purity 1/2
  oracle::Dense d = oracle::from_ket(bell);
  Eigen::MatrixXcd rho = oracle::ptrace_keep(d, {"cv"});
  CHECK(std::abs((rho * rho).trace().real() - 0.5) < 1e-12);
  CHECK_THROWS_AS(drop_product_subsystem(bell, "cv"), NonProductError);
}

TEST_CASE("drop_product_subsystem after tensor is identity up to global phase") {
  std::mt19937 rng(4242);
  for (int round = 0; round < 10; ++round) {
    KetState s = random_state(atom_cavity_registry(), 4, rng);
    KetState anc = basis_state({atom_internal("anc.int")}, {{"anc.int", "e"}});
    KetState back = drop_product_subsystem(tensor(s, anc), "anc.int");
    // compare |<s|back>|^2 = 1
    Complex overlap = 0.0;
    for (const auto& [key, amp] : s.amplitudes()) {
      auto it = back.amplitudes().find(key);
      REQUIRE(it != back.amplitudes().end());
      overlap += std::conj(amp) * it->second;
    }
    CHECK(std::abs(std::norm(overlap) - 1.0) < 1e-12);
  }
}

TEST_CASE("trace_out: Bell pair leaves a maximally mixed qubit") {
  KetState bell = make_state({atom_internal("a.int"), atom_internal("b.int")},
                             {{{{"a.int", "g"}, {"b.int", "g"}}, {kInvSqrt2, 0.0}},
                              {{{"a.int", "e"}, {"b.int", "e"}}, {0.0, -kInvSqrt2}}},
                             false);
  DensityMatrix rho = trace_out(bell, {"b.int"});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho.rho);
  CHECK(eig.eigenvalues()[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(eig.eigenvalues()[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rho.trace() == doctest::Approx(1.0));
}

TEST_CASE("trace_out: tracing everything returns the squared norm") {
  KetState s = injection_state();
  DensityMatrix rho = trace_out(s, {"a1.int", "a1.mom", "C1"});
  CHECK(rho.rho.rows() == 1);
  CHECK(rho.rho(0, 0).real() == doctest::Approx(s.norm_squared()));
}

TEST_CASE("trace_out of one tensor factor recovers the other factor exactly") {
  std::mt19937 rng(31337);
  for (int round = 0; round < 10; ++round) {
    KetState a = random_state({atom_internal("x.int"), atom_momentum("x.mom")}, 3, rng);
    KetState b = random_state({cavity_mode("cv")}, 2, rng);
    KetState joint = tensor(a, b);
    DensityMatrix rho_a = trace_out(joint, {"cv"});
    oracle::Dense d = oracle::from_ket(a);
    Eigen::MatrixXcd expected = d.psi * d.psi.adjoint();
    CHECK((rho_a.rho - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("trace_out matches the dense partial-trace oracle on random states") {
  std::mt19937 rng(5150);
  std::vector<SubsystemSpec> reg = {atom_internal("p.int"), atom_momentum("p.mom"),
                                    cavity_mode("cv", 2)};
  for (int round = 0; round < 10; ++round) {
    KetState s = random_state(reg, 6, rng);
    DensityMatrix rho = trace_out(s, {"p.int"});
    Eigen::MatrixXcd expected = oracle::ptrace_keep(oracle::from_ket(s), {"p.mom", "cv"});
    CHECK((rho.rho - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("serialization: JSON round-trip preserves amplitudes and is byte-stable") {
  KetState s = injection_state();
  auto j = state_to_json(s);
  KetState back = state_from_json(j, /*normalize=*/false);
  CHECK(back.same_registry(s));
  for (const auto& [key, amp] : s.amplitudes()) CHECK(back.amplitudes().at(key) == amp);
  CHECK(state_to_json(back).dump() == j.dump());
}

TEST_CASE("serialization: configs are sorted lexicographically by label") {
  KetState s = make_state({atom_internal("a.int")},
                          {{{{"a.int", "g"}}, {kInvSqrt2, 0.0}},
                           {{{"a.int", "e"}}, {kInvSqrt2, 0.0}}},
                          false);
  auto j = state_to_json(s);
  // "e" < "g" lexicographically
  CHECK(j["amplitudes"][0]["config"]["a.int"] == "e");
  CHECK(j["amplitudes"][1]["config"]["a.int"] == "g");
}

TEST_CASE("canonical_phase makes the first lexicographic amplitude real positive") {
  KetState s = make_state({atom_internal("a.int"), atom_internal("b.int")},
                          {{{{"a.int", "g"}, {"b.int", "g"}}, {0.0, kInvSqrt2}},
                           {{{"a.int", "e"}, {"b.int", "e"}}, {-kInvSqrt2, 0.0}}},
                          false);
  KetState c = s.canonical_phase();
  Complex first = c.amplitude({{"a.int", "e"}, {"b.int", "e"}});
  CHECK(first.real() > 0.0);
  CHECK(std::abs(first.imag()) < 1e-15);
}

TEST_CASE("rename_subsystems relabels ids without touching amplitudes") {
  KetState s = injection_state();
  KetState r = rename_subsystems(s, {{"a1.int", "a9.int"}, {"a1.mom", "a9.mom"}});
  CHECK(r.has_subsystem("a9.int"));
  CHECK(!r.has_subsystem("a1.int"));
  CHECK(r.amplitude({{"a9.int", "g"}, {"a9.mom", "P0"}, {"C1", "1"}}) == Complex{kInvSqrt2, 0.0});
}
