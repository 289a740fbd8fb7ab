#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "lccool/analytic.hpp"
#include "lccool/model.hpp"

namespace lccool::lindblad {

// Brute-force numerical oracle: the effective Hamiltonian plus dissipators on
// a truncated joint space (Fock cutoff x qubit register), steady-state solves,
// time evolution, and the classical Dicke rate-ladder steady state.

using Complex = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<Complex>;
using DenseMatrix = Eigen::MatrixXcd;

enum class QubitRep { TensorProduct, DickeLadder };

struct BasisDescriptor {
  int n_max = 0;      // Fock cutoff (levels 0..n_max)
  int n_qubits = 1;
  QubitRep rep = QubitRep::TensorProduct;
};

struct JumpChannel {
  SparseOp op;
  // Coefficient as written in the dissipator equations (gamma_+, gamma_-,
  // gamma_0, kappa(1+nbar), kappa nbar). Expanding the [X, Y rho] + H.c. form
  // shows each jump operator enters the generator as 2*rate * D[op]; the
  // factor 2 is applied once at generator assembly.
  double rate = 0;
  std::string label;
  // cached products used by the generator
  SparseOp op_dag;
  SparseOp opdag_op;
};

struct LindbladModel {
  BasisDescriptor basis;
  int dimension = 0;
  SparseOp hamiltonian;   // full H; frame rotating at the drive, omega_c and Omega retained
  SparseOp h_rotated;     // H - omega_ref * diag(charge), diagonal recentered
  std::vector<JumpChannel> channels;
  std::vector<int> charge;  // conserved excitation number n + (qubit excitations)
  double omega_ref = 0;     // rotating-frame reference (omega_c)

  int fock_levels() const { return basis.n_max + 1; }
  int qubit_dim() const {
    return basis.rep == QubitRep::TensorProduct ? (1 << basis.n_qubits)
                                                : basis.n_qubits + 1;
  }
};

struct BuildOptions {
  bool include_g0 = true;      // keep the dispersive g0 (a a† + a† a) R_z/2 term
  int max_hilbert_dim = 4096;  // DimensionTooLarge guard
};

// Assembles the model. Independent ensembles use the tensor-product register
// (N <= 4 cost guard) with per-qubit channels {R_-+ at 2 gamma_+},
// {R_+- at 2 gamma_-}, {R_z at 2 gamma_0}; collective ensembles use the
// symmetric Dicke ladder (dimension N+1) with the analogous collective
// operators. Oscillator channels are {a at 2 kappa(1+nbar)}, {a† at 2 kappa nbar}.
LindbladModel build_model(const model::DressedFrame& frame,
                          const model::EnsembleConfig& ensemble,
                          const model::OscillatorParams& oscillator, int n_max,
                          const BuildOptions& options = {});

struct DensityState {
  DenseMatrix rho;                // trace-normalized
  double trace = 0;               // trace before normalization
  double hermiticity_defect = 0;  // max |rho - rho†| before hermitization
  double min_eigenvalue = 0;      // smallest eigenvalue (estimate for large dims)
  double residual = 0;            // ||L(rho)||_F after a steady-state solve
  std::string method;
};

struct SteadyStateOptions {
  double tol = 1e-10;              // residual acceptance: ||L(rho)|| <= tol ||L|| ||rho||
  int max_vectorized_dim = 10000;  // full vectorized direct solve when dim^2 <= this
  int max_dense_block = 1500;      // dense LU below, sparse LU above
  double propagation_horizon = 0;  // fallback integration horizon; 0 = auto
  double drift_tol = 1e-9;         // observable drift per unit time at convergence
};

// Steady state of the generator. Tries, in order: direct solve of the full
// vectorized generator (small dimensions), direct solve restricted to the
// excitation-conserving superoperator sector, long-time propagation. Every
// candidate is certified against the full generator residual; throws
// NonConvergence (with diagnostics) when no path certifies.
DensityState steady_state(const LindbladModel& model, const SteadyStateOptions& options = {});

struct Observables {
  double n_mean = 0;
  double n2 = 0;  // <a†² a²>
  double g2 = 0;
  double rz = 0;  // <R_z>
  double tail_probability = 0;  // population at Fock level n_max
  bool truncation_safe = true;
};

Observables observables(const LindbladModel& model, const DensityState& state,
                        double tail_tol = 1e-8);

// Action of the generator on a density matrix; rotated_frame applies
// H - omega_ref*q instead of H (identical on charge-diagonal states).
DenseMatrix apply_generator(const LindbladModel& model, const DenseMatrix& rho,
                            bool rotated_frame = false);

struct EvolveOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  double tail_tol = 1e-8;
};

struct TrajectoryPoint {
  double time = 0;
  Observables obs;
};

// Adaptive RK45 integration in the charge-rotating frame (exact for the
// charge-diagonal observables reported). Samples at n_samples evenly spaced
// times including both endpoints; duration = 0 returns the initial
// observables only. Trace is preserved within 1e-8 over the trajectory.
std::vector<TrajectoryPoint> evolve(const LindbladModel& model, const DensityState& initial,
                                    double duration, int n_samples,
                                    const EvolveOptions& options = {});

struct DickeLadderResult {
  std::vector<double> population;  // over m = -N/2 .. N/2, ascending
  analytic::CollectiveMoments moments;
};

// Steady state of the (N+1)-state classical birth-death ladder with downward
// rate gamma_+ (j+m)(j-m+1) and upward rate gamma_- (j-m)(j+m+1), solved by
// detailed balance in the log domain. Accepts f = 0 and f = +infinity.
DickeLadderResult dicke_rate_ladder_steady(double f, int n_qubits);

struct AdaptiveOptions {
  double tail_tol = 1e-8;  // doubling target for the top-level population
  int n_max_start = 0;     // 0: 4*(nbar+1) rounded up
  int n_max_cap = 2048;
  BuildOptions build;
  SteadyStateOptions solve;
};

struct AdaptiveResult {
  LindbladModel model;
  DensityState state;
  Observables obs;
};

// Builds and solves with the Fock cutoff doubled until the tail population
// drops below tail_tol (or the cap is hit -> DimensionTooLarge).
AdaptiveResult steady_state_adaptive(const model::DressedFrame& frame,
                                     const model::EnsembleConfig& ensemble,
                                     const model::OscillatorParams& oscillator,
                                     const AdaptiveOptions& options = {});

// Helpers for assembling initial states and reading marginals.
std::vector<double> thermal_fock_populations(double nbar, int n_max);

// Diagonal qubit-register populations of the dressed steady state: per-qubit
// (p_-, p_+) products in the tensor representation, the binomial profile on
// the Dicke ladder.
std::vector<double> dressed_qubit_populations(const model::DressedFrame& frame,
                                              const BasisDescriptor& basis);

DensityState make_state(const LindbladModel& model, const DenseMatrix& rho);

DensityState diagonal_product_state(const LindbladModel& model,
                                    const std::vector<double>& fock_populations,
                                    const std::vector<double>& qubit_populations);

std::vector<double> oscillator_marginal(const LindbladModel& model, const DensityState& state);
std::vector<double> qubit_marginal_diagonal(const LindbladModel& model, const DensityState& state);

}  // namespace lccool::lindblad
