#include "lccool/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_map>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SparseLU>

namespace lccool::lindblad {

namespace {

using RowSparse = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<Complex>;

constexpr double kInf = std::numeric_limits<double>::infinity();

int popcount(unsigned v) {
  int c = 0;
  for (; v; v >>= 1) c += static_cast<int>(v & 1u);
  return c;
}

SparseOp from_triplets(int rows, int cols, std::vector<Triplet>& trips) {
  SparseOp m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

// --- elementary operators -------------------------------------------------

SparseOp fock_annihilation(int levels) {
  std::vector<Triplet> t;
  for (int n = 1; n < levels; ++n) t.emplace_back(n - 1, n, std::sqrt(double(n)));
  return from_triplets(levels, levels, t);
}

SparseOp diagonal_op(const std::vector<double>& d) {
  std::vector<Triplet> t;
  for (int i = 0; i < static_cast<int>(d.size()); ++i) {
    if (d[i] != 0) t.emplace_back(i, i, d[i]);
  }
  return from_triplets(static_cast<int>(d.size()), static_cast<int>(d.size()), t);
}

// Per-qubit sigma_- = |e_i=0><e_i=1| on the 2^N register (bit i = excitation).
SparseOp tensor_sigma_minus(int n_qubits, int i) {
  const int dim = 1 << n_qubits;
  const unsigned bit = 1u << i;
  std::vector<Triplet> t;
  for (unsigned q = 0; q < static_cast<unsigned>(dim); ++q) {
    if (q & bit) t.emplace_back(static_cast<int>(q & ~bit), static_cast<int>(q), 1.0);
  }
  return from_triplets(dim, dim, t);
}

SparseOp tensor_sigma_z(int n_qubits, int i) {
  const int dim = 1 << n_qubits;
  const unsigned bit = 1u << i;
  std::vector<double> d(dim);
  for (int q = 0; q < dim; ++q) d[q] = (static_cast<unsigned>(q) & bit) ? 1.0 : -1.0;
  return diagonal_op(d);
}

// Collective lowering on the symmetric ladder, index k = number of excited
// qubits: J_- |k> = sqrt(k (N-k+1)) |k-1>.
SparseOp ladder_lowering(int n_qubits) {
  std::vector<Triplet> t;
  for (int k = 1; k <= n_qubits; ++k) {
    t.emplace_back(k - 1, k, std::sqrt(double(k) * double(n_qubits - k + 1)));
  }
  return from_triplets(n_qubits + 1, n_qubits + 1, t);
}

// Joint-space Kronecker product with index = fock*dimQ + qreg.
SparseOp kron_joint(const SparseOp& fock_part, const SparseOp& qubit_part) {
  const int dq = static_cast<int>(qubit_part.rows());
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(fock_part.nonZeros()) * qubit_part.nonZeros());
  for (int cf = 0; cf < fock_part.outerSize(); ++cf) {
    for (SparseOp::InnerIterator itf(fock_part, cf); itf; ++itf) {
      for (int cq = 0; cq < qubit_part.outerSize(); ++cq) {
        for (SparseOp::InnerIterator itq(qubit_part, cq); itq; ++itq) {
          t.emplace_back(itf.row() * dq + itq.row(), cf * dq + cq,
                         itf.value() * itq.value());
        }
      }
    }
  }
  return from_triplets(static_cast<int>(fock_part.rows()) * dq,
                       static_cast<int>(fock_part.cols()) * dq, t);
}

SparseOp sparse_identity(int dim) {
  SparseOp id(dim, dim);
  id.setIdentity();
  return id;
}

int state_excitation(const BasisDescriptor& basis, int qreg) {
  return basis.rep == QubitRep::TensorProduct ? popcount(static_cast<unsigned>(qreg))
                                              : qreg;
}

void attach_caches(JumpChannel& ch) {
  ch.op_dag = ch.op.adjoint();
  ch.opdag_op = (ch.op_dag * ch.op).pruned();
  ch.op_dag.makeCompressed();
  ch.opdag_op.makeCompressed();
}

double max_abs(const SparseOp& m) {
  double v = 0;
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseOp::InnerIterator it(m, c); it; ++it) v = std::max(v, std::abs(it.value()));
  }
  return v;
}

// Rough operator norm of the generator from a few seeded random directions;
// used only to scale the residual acceptance test.
double generator_scale(const LindbladModel& model) {
  const int d = model.dimension;
  std::mt19937 rng(0x5eed5u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double scale = 0;
  for (int trial = 0; trial < 4; ++trial) {
    DenseMatrix g(d, d);
    for (int c = 0; c < d; ++c) {
      for (int r = 0; r < d; ++r) g(r, c) = Complex(gauss(rng), gauss(rng));
    }
    g = 0.5 * (g + g.adjoint()).eval();
    g /= g.norm();
    scale = std::max(scale, apply_generator(model, g, false).norm());
  }
  return scale > 0 ? scale : 1.0;
}

double min_eigenvalue_estimate(const DenseMatrix& rho) {
  const int d = static_cast<int>(rho.rows());
  if (d <= 1024) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rho, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  }
  double lo = kInf;  // Gershgorin lower bound
  for (int r = 0; r < d; ++r) {
    double off = 0;
    for (int c = 0; c < d; ++c) {
      if (c != r) off += std::abs(rho(r, c));
    }
    lo = std::min(lo, rho(r, r).real() - off);
  }
  return lo;
}

DensityState finalize_state(const LindbladModel& model, DenseMatrix rho, std::string method) {
  DensityState st;
  st.hermiticity_defect = (rho - rho.adjoint().eval()).cwiseAbs().maxCoeff();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  st.trace = rho.trace().real();
  if (!std::isfinite(st.trace) || std::abs(st.trace) < 1e-6) {
    throw NonConvergence("steady-state candidate has ill-defined trace");
  }
  rho /= st.trace;
  st.rho = std::move(rho);
  st.min_eigenvalue = min_eigenvalue_estimate(st.rho);
  st.method = std::move(method);
  st.residual = apply_generator(model, st.rho, false).norm();
  return st;
}

// --- restricted direct solve ----------------------------------------------

struct PairSet {
  std::vector<std::pair<int, int>> pairs;
  std::unordered_map<long long, int> index;
  int trace_row = -1;
};

long long pair_key(int r, int c, int dim) {
  return static_cast<long long>(r) * dim + c;
}

PairSet all_pairs(int dim) {
  PairSet ps;
  ps.pairs.reserve(static_cast<size_t>(dim) * dim);
  ps.index.reserve(static_cast<size_t>(dim) * dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      ps.index.emplace(pair_key(r, c, dim), static_cast<int>(ps.pairs.size()));
      ps.pairs.emplace_back(r, c);
    }
  }
  ps.trace_row = 0;  // pair (0,0)
  return ps;
}

// delta-q = 0 sector: every generator term conserves the excitation grading,
// so the steady state is supported on index pairs of equal charge.
PairSet charge_sector_pairs(const std::vector<int>& charge, int dim) {
  std::unordered_map<int, std::vector<int>> groups;
  for (int s = 0; s < dim; ++s) groups[charge[s]].push_back(s);
  std::vector<int> charges;
  charges.reserve(groups.size());
  for (const auto& kv : groups) charges.push_back(kv.first);
  std::sort(charges.begin(), charges.end());

  PairSet ps;
  for (int q : charges) {
    const auto& states = groups[q];
    for (int r : states) {
      for (int c : states) {
        ps.index.emplace(pair_key(r, c, dim), static_cast<int>(ps.pairs.size()));
        ps.pairs.emplace_back(r, c);
      }
    }
  }
  for (int i = 0; i < static_cast<int>(ps.pairs.size()); ++i) {
    if (ps.pairs[i].first == ps.pairs[i].second) {
      ps.trace_row = i;
      break;
    }
  }
  return ps;
}

DenseMatrix solve_restricted(const LindbladModel& model, const PairSet& ps,
                             const SteadyStateOptions& opts) {
  const int dim = model.dimension;
  const int s = static_cast<int>(ps.pairs.size());

  const RowSparse h_row = model.h_rotated;
  std::vector<RowSparse> op_rows, m_rows;
  op_rows.reserve(model.channels.size());
  m_rows.reserve(model.channels.size());
  for (const auto& ch : model.channels) {
    op_rows.emplace_back(ch.op);
    m_rows.emplace_back(ch.opdag_op);
  }

  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(s) * 16);
  auto add = [&](int row, int rr, int cc, Complex v) {
    auto it = ps.index.find(pair_key(rr, cc, dim));
    if (it == ps.index.end()) {
      throw std::logic_error("generator leaves the restricted superoperator sector");
    }
    trips.emplace_back(row, it->second, v);
  };

  for (int row = 0; row < s; ++row) {
    if (row == ps.trace_row) continue;
    const auto [r, c] = ps.pairs[row];
    // -i (H rho): coefficient of rho[j,c] is -i H[r,j]
    for (RowSparse::InnerIterator it(h_row, r); it; ++it) {
      add(row, static_cast<int>(it.col()), c, Complex(0, -1) * it.value());
    }
    // +i (rho H): coefficient of rho[r,j] is +i H[j,c]
    for (SparseOp::InnerIterator it(model.h_rotated, c); it; ++it) {
      add(row, r, static_cast<int>(it.row()), Complex(0, 1) * it.value());
    }
    for (size_t k = 0; k < model.channels.size(); ++k) {
      const double rate = model.channels[k].rate;
      // 2 r L[r,j] conj(L[c,l]) rho[j,l]
      for (RowSparse::InnerIterator a(op_rows[k], r); a; ++a) {
        for (RowSparse::InnerIterator b(op_rows[k], c); b; ++b) {
          add(row, static_cast<int>(a.col()), static_cast<int>(b.col()),
              2.0 * rate * a.value() * std::conj(b.value()));
        }
      }
      // -r (M rho) and -r (rho M), M = L†L
      for (RowSparse::InnerIterator it(m_rows[k], r); it; ++it) {
        add(row, static_cast<int>(it.col()), c, -rate * it.value());
      }
      for (SparseOp::InnerIterator it(model.channels[k].opdag_op, c); it; ++it) {
        add(row, r, static_cast<int>(it.row()), -rate * it.value());
      }
    }
  }

  double mean_mag = 0;
  for (const auto& t : trips) mean_mag += std::abs(t.value());
  mean_mag = trips.empty() ? 1.0 : mean_mag / static_cast<double>(trips.size());
  const double w = mean_mag > 0 ? mean_mag : 1.0;

  for (int i = 0; i < s; ++i) {
    if (ps.pairs[i].first == ps.pairs[i].second) trips.emplace_back(ps.trace_row, i, w);
  }
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(s);
  rhs(ps.trace_row) = w;

  Eigen::VectorXcd x;
  if (s <= opts.max_dense_block) {
    DenseMatrix sd = DenseMatrix::Zero(s, s);
    for (const auto& t : trips) sd(t.row(), t.col()) += t.value();
    x = Eigen::PartialPivLU<DenseMatrix>(sd).solve(rhs);
  } else {
    SparseOp sm(s, s);
    sm.setFromTriplets(trips.begin(), trips.end());
    sm.makeCompressed();
    Eigen::SparseLU<SparseOp, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(sm);
    lu.factorize(sm);
    if (lu.info() != Eigen::Success) {
      throw NonConvergence("sparse factorization of the vectorized generator failed");
    }
    x = lu.solve(rhs);
  }
  if (!x.allFinite()) throw NonConvergence("direct steady-state solve produced non-finite values");

  DenseMatrix rho = DenseMatrix::Zero(dim, dim);
  for (int i = 0; i < s; ++i) rho(ps.pairs[i].first, ps.pairs[i].second) = x(i);
  return rho;
}

// --- adaptive RK45 (Dormand-Prince) on density matrices ---------------------

struct Rk45Result {
  DenseMatrix y;
  DenseMatrix k_last;  // FSAL stage
  double error = 0;    // scaled error estimate
};

Rk45Result rk45_step(const LindbladModel& model, const DenseMatrix& y, const DenseMatrix& k1,
                     double dt, double rtol, double atol) {
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto f = [&](const DenseMatrix& m) { return apply_generator(model, m, true); };

  const DenseMatrix k2 = f(y + dt * (a21 * k1));
  const DenseMatrix k3 = f(y + dt * (a31 * k1 + a32 * k2));
  const DenseMatrix k4 = f(y + dt * (a41 * k1 + a42 * k2 + a43 * k3));
  const DenseMatrix k5 = f(y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const DenseMatrix k6 = f(y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));

  Rk45Result out;
  out.y = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  out.k_last = f(out.y);  // FSAL
  const DenseMatrix err =
      dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * out.k_last);

  const double ymax = std::max(y.cwiseAbs().maxCoeff(), out.y.cwiseAbs().maxCoeff());
  const double scale = atol + rtol * ymax;
  out.error = err.cwiseAbs().maxCoeff() / scale;
  return out;
}

// Integrates the rotated generator from `state` to t = horizon, invoking
// `visit(t, rho)` at every accepted step boundary it is asked to stop at.
class Integrator {
 public:
  Integrator(const LindbladModel& model, DenseMatrix rho, double rtol, double atol)
      : model_(model), y_(std::move(rho)), rtol_(rtol), atol_(atol) {
    k1_ = apply_generator(model_, y_, true);
    const double k1n = k1_.cwiseAbs().maxCoeff();
    dt_ = k1n > 0 ? 0.1 / k1n : 1.0;
  }

  // Advance exactly to t_target (>= current time). The controller step dt_ is
  // what underflow is judged on; the clamp to the segment end may legitimately
  // be tiny.
  void advance_to(double t_target) {
    while (t_ < t_target) {
      const double remaining = t_target - t_;
      if (remaining <= t_target * 1e-15) {
        t_ = t_target;
        break;
      }
      const double dt = std::min(dt_, remaining);
      Rk45Result r = rk45_step(model_, y_, k1_, dt, rtol_, atol_);
      if (r.error <= 1.0) {
        t_ += dt;
        y_ = std::move(r.y);
        k1_ = std::move(r.k_last);
        const double grow = r.error > 0 ? 0.9 * std::pow(r.error, -0.2) : 5.0;
        dt_ = dt * std::min(5.0, std::max(0.2, grow));
      } else {
        dt_ = dt * std::max(0.2, 0.9 * std::pow(r.error, -0.2));
      }
      if (dt_ < std::max(1e-300, t_target * 1e-14)) {
        throw StepSizeUnderflow("integration step size underflow");
      }
    }
  }

  const DenseMatrix& state() const { return y_; }
  double time() const { return t_; }

 private:
  const LindbladModel& model_;
  DenseMatrix y_;
  DenseMatrix k1_;
  double t_ = 0;
  double dt_ = 0;
  double rtol_, atol_;
};

Observables observables_of(const LindbladModel& model, const DenseMatrix& rho, double tail_tol) {
  const int dq = model.qubit_dim();
  const int n_levels = model.fock_levels();
  Observables obs;
  double nm = 0, n2 = 0, rz = 0, tail = 0;
  for (int n = 0; n < n_levels; ++n) {
    for (int q = 0; q < dq; ++q) {
      const double p = rho(n * dq + q, n * dq + q).real();
      nm += p * n;
      n2 += p * n * (n - 1.0);
      rz += p * (2.0 * state_excitation(model.basis, q) - model.basis.n_qubits);
      if (n == n_levels - 1) tail += p;
    }
  }
  obs.n_mean = nm;
  obs.n2 = n2;
  obs.g2 = nm > 0 ? n2 / (nm * nm) : std::numeric_limits<double>::quiet_NaN();
  obs.rz = rz;
  obs.tail_probability = tail;
  obs.truncation_safe = tail < tail_tol;
  return obs;
}

}  // namespace

// --- model assembly ---------------------------------------------------------

LindbladModel build_model(const model::DressedFrame& frame,
                          const model::EnsembleConfig& ensemble,
                          const model::OscillatorParams& oscillator, int n_max,
                          const BuildOptions& options) {
  if (n_max < 1) throw DomainError("Fock cutoff n_max must be at least 1");
  if (ensemble.n_qubits < 1) throw DomainError("ensemble size must be at least 1");
  if (oscillator.nbar < 0) throw DomainError("nbar must be non-negative");

  LindbladModel m;
  m.basis.n_max = n_max;
  m.basis.n_qubits = ensemble.n_qubits;
  m.basis.rep = ensemble.mode == model::EnsembleMode::Independent ? QubitRep::TensorProduct
                                                                  : QubitRep::DickeLadder;
  if (m.basis.rep == QubitRep::TensorProduct && ensemble.n_qubits > 4) {
    std::ostringstream msg;
    msg << "tensor-product register limited to 4 qubits (requested N = "
        << ensemble.n_qubits << "); use the collective (Dicke ladder) mode for large N";
    throw DimensionTooLarge(msg.str());
  }

  const int n_levels = n_max + 1;
  const int dq = m.qubit_dim();
  const long long dim = static_cast<long long>(n_levels) * dq;
  if (dim > options.max_hilbert_dim) {
    std::ostringstream msg;
    msg << "Hilbert dimension " << dim << " exceeds budget " << options.max_hilbert_dim;
    throw DimensionTooLarge(msg.str());
  }
  m.dimension = static_cast<int>(dim);

  const int n = ensemble.n_qubits;
  const SparseOp a = fock_annihilation(n_levels);
  const SparseOp ad = SparseOp(a.adjoint());
  const SparseOp iq = sparse_identity(dq);

  std::vector<double> num(n_levels);
  for (int i = 0; i < n_levels; ++i) num[i] = i;
  const SparseOp number_op = diagonal_op(num);

  // J operators on the chosen register.
  SparseOp jm, jz;
  if (m.basis.rep == QubitRep::TensorProduct) {
    std::vector<Triplet> t;
    SparseOp sum(dq, dq);
    for (int i = 0; i < n; ++i) sum = SparseOp(sum + tensor_sigma_minus(n, i));
    jm = sum;
    std::vector<double> d(dq);
    for (int q = 0; q < dq; ++q) d[q] = popcount(static_cast<unsigned>(q)) - 0.5 * n;
    jz = diagonal_op(d);
  } else {
    jm = ladder_lowering(n);
    std::vector<double> d(dq);
    for (int k = 0; k <= n; ++k) d[k] = k - 0.5 * n;
    jz = diagonal_op(d);
  }
  const SparseOp jp = SparseOp(jm.adjoint());

  // H = omega_c a†a + Omega Jz + g~ (a J+ + a† J-) [+ g0 (a a† + a† a) Jz]
  SparseOp h = kron_joint(number_op, iq) * Complex(oscillator.omega_c, 0);
  h = SparseOp(h + kron_joint(sparse_identity(n_levels), jz) * Complex(frame.omega_rabi, 0));
  if (frame.g_tilde != 0) {
    h = SparseOp(h + (kron_joint(a, jp) + kron_joint(ad, jm)) * Complex(frame.g_tilde, 0));
  }
  if (options.include_g0 && frame.g0 != 0) {
    const SparseOp sym = SparseOp(a * ad + ad * a);  // truncated operator products
    h = SparseOp(h + kron_joint(sym, jz) * Complex(frame.g0, 0));
  }
  h.makeCompressed();
  m.hamiltonian = h;

  const double hscale = std::max(1.0, max_abs(h));
  if (max_abs(SparseOp(h - SparseOp(h.adjoint()))) > 1e-12 * hscale) {
    throw std::logic_error("assembled Hamiltonian is not Hermitian");
  }

  m.charge.resize(m.dimension);
  for (int s = 0; s < m.dimension; ++s) {
    m.charge[s] = s / dq + state_excitation(m.basis, s % dq);
  }

  auto push_channel = [&](SparseOp op, double rate, std::string label) {
    if (rate == 0) return;
    if (rate < 0) throw DomainError("negative dissipation rate");
    JumpChannel ch;
    ch.op = std::move(op);
    ch.rate = rate;
    ch.label = std::move(label);
    attach_caches(ch);
    m.channels.push_back(std::move(ch));
  };

  const SparseOp id_f = sparse_identity(n_levels);
  if (m.basis.rep == QubitRep::TensorProduct) {
    for (int i = 0; i < n; ++i) {
      const SparseOp sm = tensor_sigma_minus(n, i);
      push_channel(kron_joint(id_f, sm), frame.gamma_plus, "R_-+[" + std::to_string(i) + "]");
      push_channel(kron_joint(id_f, SparseOp(sm.adjoint())), frame.gamma_minus,
                   "R_+-[" + std::to_string(i) + "]");
      push_channel(kron_joint(id_f, tensor_sigma_z(n, i)), frame.gamma_zero,
                   "R_z[" + std::to_string(i) + "]");
    }
  } else {
    push_channel(kron_joint(id_f, jm), frame.gamma_plus, "R_-+");
    push_channel(kron_joint(id_f, jp), frame.gamma_minus, "R_+-");
    push_channel(kron_joint(id_f, SparseOp(jz * Complex(2, 0))), frame.gamma_zero, "R_z");
  }
  push_channel(kron_joint(a, iq), oscillator.kappa * (1.0 + oscillator.nbar), "a");
  push_channel(kron_joint(ad, iq), oscillator.kappa * oscillator.nbar, "a_dag");

  // Verify the excitation grading: H charge-diagonal, each jump a uniform shift.
  for (int c = 0; c < m.hamiltonian.outerSize(); ++c) {
    for (SparseOp::InnerIterator it(m.hamiltonian, c); it; ++it) {
      if (m.charge[it.row()] != m.charge[c]) {
        throw std::logic_error("Hamiltonian violates the excitation grading");
      }
    }
  }
  for (const auto& ch : m.channels) {
    int shift = std::numeric_limits<int>::min();
    for (int c = 0; c < ch.op.outerSize(); ++c) {
      for (SparseOp::InnerIterator it(ch.op, c); it; ++it) {
        const int d = m.charge[it.row()] - m.charge[c];
        if (shift == std::numeric_limits<int>::min()) {
          shift = d;
        } else if (shift != d) {
          throw std::logic_error("jump operator is not charge-homogeneous");
        }
      }
    }
  }

  m.omega_ref = oscillator.omega_c;
  SparseOp rotated = m.hamiltonian;
  {
    std::vector<Triplet> t;
    double mean_diag = 0;
    for (int s = 0; s < m.dimension; ++s) mean_diag += m.omega_ref * m.charge[s];
    mean_diag /= m.dimension;
    for (int s = 0; s < m.dimension; ++s) {
      t.emplace_back(s, s, Complex(mean_diag - m.omega_ref * m.charge[s], 0));
    }
    rotated = SparseOp(rotated + from_triplets(m.dimension, m.dimension, t));
    rotated.prune([](int, int, const Complex& v) { return std::abs(v) > 0; });
    rotated.makeCompressed();
  }
  m.h_rotated = rotated;
  return m;
}

DenseMatrix apply_generator(const LindbladModel& model, const DenseMatrix& rho,
                            bool rotated_frame) {
  const SparseOp& h = rotated_frame ? model.h_rotated : model.hamiltonian;
  DenseMatrix out = Complex(0, -1) * (h * rho - rho * h);
  for (const auto& ch : model.channels) {
    const DenseMatrix lr = ch.op * rho;
    out.noalias() += (2.0 * ch.rate) * (lr * ch.op_dag);
    out.noalias() -= ch.rate * (ch.opdag_op * rho);
    out.noalias() -= ch.rate * (rho * ch.opdag_op);
  }
  return out;
}

// --- steady state -----------------------------------------------------------

DensityState steady_state(const LindbladModel& model, const SteadyStateOptions& options) {
  bool dissipative = false;
  for (const auto& ch : model.channels) dissipative |= ch.rate > 0;
  if (!dissipative) {
    throw NonConvergence("no dissipative channel: steady manifold is degenerate");
  }

  const double scale = generator_scale(model);
  auto certified = [&](const DensityState& st) {
    return std::isfinite(st.residual) && st.residual <= options.tol * scale * st.rho.norm();
  };

  std::string diagnostics;
  const long long d2 = static_cast<long long>(model.dimension) * model.dimension;

  if (d2 <= options.max_vectorized_dim) {
    try {
      DensityState st =
          finalize_state(model, solve_restricted(model, all_pairs(model.dimension), options),
                         "direct-full");
      if (certified(st)) return st;
      diagnostics += " direct-full residual " + std::to_string(st.residual) + ";";
    } catch (const SolverError& e) {
      diagnostics += std::string(" direct-full: ") + e.what() + ";";
    }
  }

  if (!model.charge.empty()) {
    try {
      DensityState st = finalize_state(
          model, solve_restricted(model, charge_sector_pairs(model.charge, model.dimension),
                                  options),
          "direct-sector");
      if (certified(st)) return st;
      diagnostics += " direct-sector residual " + std::to_string(st.residual) + ";";
    } catch (const SolverError& e) {
      diagnostics += std::string(" direct-sector: ") + e.what() + ";";
    }
  }

  // Last resort: propagate from the maximally mixed state until the tracked
  // observables stop drifting.
  double min_rate = kInf;
  for (const auto& ch : model.channels) {
    if (ch.rate > 0) min_rate = std::min(min_rate, 2.0 * ch.rate);
  }
  const double horizon =
      options.propagation_horizon > 0 ? options.propagation_horizon : 200.0 / min_rate;
  const double block = horizon / 100.0;
  try {
    Integrator integ(model, DenseMatrix::Identity(model.dimension, model.dimension) /
                                static_cast<double>(model.dimension),
                     1e-8, 1e-12);
    Observables prev = observables_of(model, integ.state(), 1.0);
    while (integ.time() < horizon) {
      integ.advance_to(std::min(horizon, integ.time() + block));
      Observables cur = observables_of(model, integ.state(), 1.0);
      const double drift =
          std::abs(cur.n_mean - prev.n_mean) / std::max(1.0, std::abs(cur.n_mean)) +
          std::abs(cur.rz - prev.rz) / std::max(1.0, std::abs(cur.rz));
      prev = cur;
      if (drift < options.drift_tol * block * min_rate) break;
    }
    DensityState st = finalize_state(model, integ.state(), "propagation");
    if (certified(st)) return st;
    std::ostringstream msg;
    msg << "steady state not certified:" << diagnostics << " propagation residual "
        << st.residual << " after t = " << integ.time() << " (tol " << options.tol * scale
        << ")";
    throw NonConvergence(msg.str());
  } catch (const StepSizeUnderflow&) {
    throw NonConvergence("propagation fallback failed (step underflow);" + diagnostics);
  }
}

Observables observables(const LindbladModel& model, const DensityState& state,
                        double tail_tol) {
  return observables_of(model, state.rho, tail_tol);
}

std::vector<TrajectoryPoint> evolve(const LindbladModel& model, const DensityState& initial,
                                    double duration, int n_samples,
                                    const EvolveOptions& options) {
  if (duration < 0) throw DomainError("duration must be non-negative");
  std::vector<TrajectoryPoint> traj;
  traj.push_back({0.0, observables_of(model, initial.rho, options.tail_tol)});
  if (duration == 0) return traj;

  const int samples = std::max(2, n_samples);
  Integrator integ(model, initial.rho, options.rtol, options.atol);
  const double tr0 = initial.rho.trace().real();
  double max_drift = 0;
  for (int i = 1; i < samples; ++i) {
    const double t = duration * i / (samples - 1);
    integ.advance_to(t);
    max_drift = std::max(max_drift, std::abs(integ.state().trace().real() - tr0));
    traj.push_back({t, observables_of(model, integ.state(), options.tail_tol)});
  }
  if (max_drift > 1e-8 * std::max(1.0, std::abs(tr0))) {
    std::ostringstream msg;
    msg << "trace drift " << max_drift << " exceeds 1e-8 over the trajectory";
    throw NonConvergence(msg.str());
  }
  return traj;
}

DickeLadderResult dicke_rate_ladder_steady(double f, int n_qubits) {
  if (n_qubits < 1) throw DomainError("ensemble size must be at least 1");
  if (!(f >= 0)) throw DomainError("f must be non-negative");
  const int n = n_qubits;
  DickeLadderResult out;
  out.population.assign(n + 1, 0.0);

  if (f == 0) {
    out.population[n] = 1.0;  // no downward rate: everything climbs to m = +j
  } else if (std::isinf(f)) {
    out.population[0] = 1.0;
  } else {
    // Detailed balance of the birth-death chain over k = number of excited
    // qubits: P(k+1) W(k+1 -> k) = P(k) W(k -> k+1), accumulated in logs.
    std::vector<double> logw(n + 1, 0.0);
    for (int k = 0; k < n; ++k) {
      const double up_rate = (n - k) * (k + 1.0);          // gamma_- (j-m)(j+m+1)
      const double down_rate = f * ((k + 1.0) * (n - k));  // gamma_+ (j+m')(j-m'+1)
      logw[k + 1] = logw[k] + std::log(up_rate) - std::log(down_rate);
    }
    const double lmax = *std::max_element(logw.begin(), logw.end());
    double norm = 0;
    for (int k = 0; k <= n; ++k) {
      out.population[k] = std::exp(logw[k] - lmax);
      norm += out.population[k];
    }
    for (auto& p : out.population) p /= norm;
  }

  double rz = 0, pm = 0, mp = 0;
  for (int k = 0; k <= n; ++k) {
    const double p = out.population[k];
    rz += p * (2.0 * k - n);
    pm += p * (k * (n - k + 1.0));        // <(j+m)(j-m+1)>
    mp += p * ((n - k) * (k + 1.0));      // <(j-m)(j+m+1)>
  }
  out.moments.rz = rz;
  out.moments.pm_mp = pm;
  out.moments.mp_pm = mp;
  return out;
}

AdaptiveResult steady_state_adaptive(const model::DressedFrame& frame,
                                     const model::EnsembleConfig& ensemble,
                                     const model::OscillatorParams& oscillator,
                                     const AdaptiveOptions& options) {
  int n_max = options.n_max_start > 0
                  ? options.n_max_start
                  : std::max(4, static_cast<int>(std::ceil(4.0 * (oscillator.nbar + 1.0))));
  for (;;) {
    if (n_max > options.n_max_cap) {
      std::ostringstream msg;
      msg << "adaptive truncation exceeded cap n_max = " << options.n_max_cap;
      throw DimensionTooLarge(msg.str());
    }
    AdaptiveResult res;
    res.model = build_model(frame, ensemble, oscillator, n_max, options.build);
    res.state = steady_state(res.model, options.solve);
    res.obs = observables(res.model, res.state, options.tail_tol);
    if (res.obs.truncation_safe) return res;
    n_max *= 2;
  }
}

std::vector<double> thermal_fock_populations(double nbar, int n_max) {
  if (nbar < 0) throw DomainError("nbar must be non-negative");
  std::vector<double> p(static_cast<size_t>(n_max) + 1);
  const double q = nbar / (1.0 + nbar);
  double w = 1.0, norm = 0;
  for (auto& v : p) {
    v = w;
    norm += w;
    w *= q;
  }
  for (auto& v : p) v /= norm;
  return p;
}

std::vector<double> dressed_qubit_populations(const model::DressedFrame& frame,
                                              const BasisDescriptor& basis) {
  const double sum = frame.gamma_plus + frame.gamma_minus;
  if (!(sum > 0)) throw DomainError("gamma_plus + gamma_minus must be positive");
  const double p_up = frame.gamma_minus / sum;  // population of |+>
  const double p_dn = frame.gamma_plus / sum;
  const int n = basis.n_qubits;
  if (basis.rep == QubitRep::TensorProduct) {
    std::vector<double> p(1u << n);
    for (unsigned q = 0; q < p.size(); ++q) {
      double w = 1;
      for (int i = 0; i < n; ++i) w *= (q >> i & 1u) ? p_up : p_dn;
      p[q] = w;
    }
    return p;
  }
  std::vector<double> p(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double lw = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                      k * std::log(std::max(p_up, 1e-300)) +
                      (n - k) * std::log(std::max(p_dn, 1e-300));
    p[k] = std::exp(lw);
  }
  double norm = 0;
  for (double v : p) norm += v;
  for (auto& v : p) v /= norm;
  return p;
}

DensityState make_state(const LindbladModel& model, const DenseMatrix& rho) {
  if (rho.rows() != model.dimension || rho.cols() != model.dimension) {
    throw DomainError("density matrix dimension mismatch");
  }
  DensityState st;
  st.hermiticity_defect = (rho - rho.adjoint().eval()).cwiseAbs().maxCoeff();
  st.rho = 0.5 * (rho + rho.adjoint().eval());
  st.trace = st.rho.trace().real();
  if (!(std::abs(st.trace) > 0)) throw DomainError("state has zero trace");
  st.rho /= st.trace;
  st.min_eigenvalue = min_eigenvalue_estimate(st.rho);
  st.method = "input";
  st.residual = std::numeric_limits<double>::quiet_NaN();
  return st;
}

DensityState diagonal_product_state(const LindbladModel& model,
                                    const std::vector<double>& fock_populations,
                                    const std::vector<double>& qubit_populations) {
  const int dq = model.qubit_dim();
  if (static_cast<int>(fock_populations.size()) != model.fock_levels() ||
      static_cast<int>(qubit_populations.size()) != dq) {
    throw DomainError("population vector sizes do not match the basis");
  }
  DenseMatrix rho = DenseMatrix::Zero(model.dimension, model.dimension);
  for (int n = 0; n < model.fock_levels(); ++n) {
    for (int q = 0; q < dq; ++q) {
      rho(n * dq + q, n * dq + q) = fock_populations[n] * qubit_populations[q];
    }
  }
  return make_state(model, rho);
}

std::vector<double> oscillator_marginal(const LindbladModel& model, const DensityState& state) {
  const int dq = model.qubit_dim();
  std::vector<double> p(model.fock_levels(), 0.0);
  for (int n = 0; n < model.fock_levels(); ++n) {
    for (int q = 0; q < dq; ++q) p[n] += state.rho(n * dq + q, n * dq + q).real();
  }
  return p;
}

std::vector<double> qubit_marginal_diagonal(const LindbladModel& model,
                                            const DensityState& state) {
  const int dq = model.qubit_dim();
  std::vector<double> p(dq, 0.0);
  for (int n = 0; n < model.fock_levels(); ++n) {
    for (int q = 0; q < dq; ++q) p[q] += state.rho(n * dq + q, n * dq + q).real();
  }
  return p;
}

}  // namespace lccool::lindblad
