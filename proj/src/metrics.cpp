#include "protosim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "protosim/errors.hpp"

namespace protosim {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

constexpr double kEigClip = 1e-12;
constexpr double kEigHardError = -1e-9;

// permutation taking b's registry slots onto a's, or failure
bool align_registries(const KetState& a, const KetState& b, std::vector<int>& b_slot_of_a) {
  if (a.registry().size() != b.registry().size()) return false;
  b_slot_of_a.resize(a.registry().size());
  for (std::size_t i = 0; i < a.registry().size(); ++i) {
    int j = b.subsystem_index(a.registry()[i].id);
    if (j < 0) return false;
    const auto& sa = a.registry()[i];
    const auto& sb = b.registry()[j];
    if (sa.kind != sb.kind || sa.basis != sb.basis) return false;
    b_slot_of_a[i] = j;
  }
  return true;
}

Complex inner_product(const KetState& a, const KetState& b, const std::vector<int>& b_slot_of_a) {
  Complex overlap{0.0, 0.0};
  ConfigKey bkey(b_slot_of_a.size());
  for (const auto& [akey, amp] : a.amplitudes()) {
    for (std::size_t i = 0; i < akey.size(); ++i) bkey[b_slot_of_a[i]] = akey[i];
    auto it = b.amplitudes().find(bkey);
    if (it != b.amplitudes().end()) overlap += std::conj(amp) * it->second;
  }
  return overlap;
}

// Coefficient matrix over the occupied (side_a x rest) supports.  Exact:
// every amplitude outside the support product is zero.
Eigen::MatrixXcd support_matrix(const KetState& state, const std::vector<std::string>& side_a) {
  if (side_a.empty()) fail("bipartition: empty side");
  std::vector<bool> in_a(state.registry().size(), false);
  for (const auto& id : side_a) {
    int slot = state.subsystem_index(id);
    if (slot < 0) fail("bipartition: unknown subsystem '" + id + "'");
    if (in_a[slot]) fail("bipartition: duplicate subsystem '" + id + "'");
    in_a[slot] = true;
  }
  if (side_a.size() == state.registry().size()) fail("bipartition: nothing on the other side");

  auto split = [&](const ConfigKey& key) {
    ConfigKey ka, kb;
    for (std::size_t i = 0; i < key.size(); ++i) (in_a[i] ? ka : kb).push_back(key[i]);
    return std::pair<ConfigKey, ConfigKey>(std::move(ka), std::move(kb));
  };

  std::map<ConfigKey, int> a_index, b_index;
  for (const auto& [key, amp] : state.amplitudes()) {
    auto [ka, kb] = split(key);
    a_index.try_emplace(ka, static_cast<int>(a_index.size()));
    b_index.try_emplace(kb, static_cast<int>(b_index.size()));
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<long>(a_index.size()),
                                              static_cast<long>(b_index.size()));
  for (const auto& [key, amp] : state.amplitudes()) {
    auto [ka, kb] = split(key);
    m(a_index.at(ka), b_index.at(kb)) = amp;
  }
  return m;
}

void require_normalized(const KetState& state) {
  if (std::abs(state.norm_squared() - 1.0) > kNormTolerance)
    fail("metrics: state is not normalized");
}

double entropy_of_eigenvalues(const Eigen::VectorXd& evals) {
  double s = 0.0;
  for (long i = 0; i < evals.size(); ++i) {
    const double p = evals[i];
    if (p < kEigHardError)
      throw SimError("metrics: reduced-matrix eigenvalue " + std::to_string(p) +
                     " below the PSD floor");
    if (p > kEigClip) s -= p * std::log2(p);
  }
  return s;
}

}  // namespace

OverlapReport fidelity(const KetState& a, const KetState& b) {
  std::vector<int> perm;
  if (!align_registries(a, b, perm)) fail("fidelity: registry mismatch");
  const Complex overlap = inner_product(a, b, perm);
  const double scale = a.norm_squared() * b.norm_squared();
  OverlapReport report;
  report.fidelity = std::norm(overlap) / scale;
  report.phase = (std::abs(overlap) == 0.0) ? 0.0 : std::arg(overlap);
  return report;
}

OverlapReport fidelity_report(const KetState& a, const KetState& b) {
  std::vector<int> perm;
  if (!align_registries(a, b, perm)) return OverlapReport{0.0, 0.0, true};
  return fidelity(a, b);
}

double entanglement_entropy(const KetState& state, const std::vector<std::string>& side_a) {
  require_normalized(state);
  Eigen::MatrixXcd m = support_matrix(state, side_a);
  // reduced density matrix of side A on its occupied support
  Eigen::MatrixXcd rho = m * m.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho);
  return entropy_of_eigenvalues(eig.eigenvalues());
}

double negativity(const KetState& state, const std::vector<std::string>& side_a) {
  require_normalized(state);
  Eigen::MatrixXcd m = support_matrix(state, side_a);
  const long da = m.rows(), db = m.cols();

  // rho = |psi><psi| over the support product, partially transposed on A:
  // rho^{T_A}[(i,j),(k,l)] = psi(k,j) conj(psi(i,l))
  Eigen::MatrixXcd pt(da * db, da * db);
  for (long i = 0; i < da; ++i)
    for (long j = 0; j < db; ++j)
      for (long k = 0; k < da; ++k)
        for (long l = 0; l < db; ++l)
          pt(i * db + j, k * db + l) = m(k, j) * std::conj(m(i, l));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(pt);
  double neg = 0.0;
  for (long i = 0; i < eig.eigenvalues().size(); ++i)
    if (eig.eigenvalues()[i] < 0.0) neg -= eig.eigenvalues()[i];
  return neg;
}

}  // namespace protosim
