/*
 * oracles.hpp — independent dense brute-force machinery for tests.
 *
 * Everything in here works on flat dense vectors/matrices with plain index
 * arithmetic and deliberately shares no logic with the sparse library it is
 * used to check.  Keep it that way.
 */

#pragma once

#include <complex>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "protosim/statekit.hpp"

namespace oracle {

using Complex = std::complex<double>;

// Dense state over labeled subsystems; index is mixed radix over the
// subsystems in order (first subsystem most significant).
struct Dense {
  std::vector<std::string> ids;
  std::vector<int> dims;
  Eigen::VectorXcd psi;

  long dim() const { return psi.size(); }
  int slot(const std::string& id) const {
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i] == id) return static_cast<int>(i);
    throw std::invalid_argument("oracle: unknown id " + id);
  }
};

inline Dense dense_product(const std::vector<std::string>& ids, const std::vector<int>& dims) {
  long d = 1;
  for (int x : dims) d *= x;
  Dense out{ids, dims, Eigen::VectorXcd::Zero(d)};
  return out;
}

// digit of `index` at subsystem slot s
inline int digit(const Dense& st, long index, int s) {
  long stride = 1;
  for (std::size_t i = st.dims.size(); i-- > static_cast<std::size_t>(s) + 1;) stride *= st.dims[i];
  return static_cast<int>((index / stride) % st.dims[s]);
}

// Reads a sparse KetState into the dense representation (data transfer only).
inline Dense from_ket(const protosim::KetState& state) {
  Dense out;
  for (const auto& spec : state.registry()) {
    out.ids.push_back(spec.id);
    out.dims.push_back(spec.dim());
  }
  long d = 1;
  for (int x : out.dims) d *= x;
  out.psi = Eigen::VectorXcd::Zero(d);
  for (const auto& [key, amp] : state.amplitudes()) {
    long idx = 0;
    for (std::size_t i = 0; i < key.size(); ++i) idx = idx * out.dims[i] + key[i];
    out.psi[idx] = amp;
  }
  return out;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Applies `u` over the target subsystems (in the order given, first target
// most significant) by explicit index arithmetic.
inline void apply(Dense& st, const std::vector<std::string>& targets, const Eigen::MatrixXcd& u) {
  std::vector<int> slots;
  long tdim = 1;
  for (const auto& id : targets) {
    slots.push_back(st.slot(id));
    tdim *= st.dims[slots.back()];
  }
  std::vector<long> strides(st.dims.size());
  long s = 1;
  for (std::size_t i = st.dims.size(); i-- > 0;) {
    strides[i] = s;
    s *= st.dims[i];
  }

  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(st.dim());
  for (long idx = 0; idx < st.dim(); ++idx) {
    if (st.psi[idx] == Complex{0.0, 0.0}) continue;
    long tin = 0;
    for (int slot : slots) tin = tin * st.dims[slot] + (idx / strides[slot]) % st.dims[slot];
    long base = idx;
    for (std::size_t t = 0; t < slots.size(); ++t)
      base -= ((idx / strides[slots[t]]) % st.dims[slots[t]]) * strides[slots[t]];
    for (long tout = 0; tout < tdim; ++tout) {
      Complex c = u(tout, tin);
      if (c == Complex{0.0, 0.0}) continue;
      long rem = tout, target = base;
      for (std::size_t t = slots.size(); t-- > 0;) {
        target += (rem % st.dims[slots[t]]) * strides[slots[t]];
        rem /= st.dims[slots[t]];
      }
      out[target] += c * st.psi[idx];
    }
  }
  st.psi = std::move(out);
}

// Dense partial trace keeping `keep_ids` (result index mixed radix over the
// kept subsystems in state order).
inline Eigen::MatrixXcd ptrace_keep(const Dense& st, const std::vector<std::string>& keep_ids) {
  std::vector<bool> keep(st.dims.size(), false);
  for (const auto& id : keep_ids) keep[st.slot(id)] = true;
  long kdim = 1, ddim = 1;
  for (std::size_t i = 0; i < st.dims.size(); ++i) (keep[i] ? kdim : ddim) *= st.dims[i];

  auto split = [&](long idx) {
    long k = 0, d = 0;
    for (std::size_t i = 0; i < st.dims.size(); ++i) {
      int dig = digit(st, idx, static_cast<int>(i));
      if (keep[i])
        k = k * st.dims[i] + dig;
      else
        d = d * st.dims[i] + dig;
    }
    return std::pair<long, long>(k, d);
  };

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(kdim, kdim);
  std::vector<std::vector<std::pair<long, Complex>>> by_dropped(ddim);
  for (long idx = 0; idx < st.dim(); ++idx) {
    if (st.psi[idx] == Complex{0.0, 0.0}) continue;
    auto [k, d] = split(idx);
    by_dropped[d].emplace_back(k, st.psi[idx]);
  }
  for (const auto& entries : by_dropped)
    for (const auto& [i, a] : entries)
      for (const auto& [j, b] : entries) rho(i, j) += a * std::conj(b);
  return rho;
}

// Haar-ish random unitary via QR of a complex Gaussian matrix.
inline Eigen::MatrixXcd random_unitary(int dim, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex{gauss(rng), gauss(rng)};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    Complex d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

}  // namespace oracle
