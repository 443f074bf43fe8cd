#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kerrcat/catspace.hpp"
#include "kerrcat/density_matrix.hpp"
#include "kerrcat/fock.hpp"
#include "kerrcat/liouville.hpp"
#include "kerrcat/model.hpp"

namespace kerrcat::dynamics {

/// Worst deviations seen along a trajectory, measured before the stored
/// states are re-Hermitized.
struct TrajectoryDiagnostics {
  double max_trace_drift = 0.0;
  double max_hermiticity_residual = 0.0;
  double min_eigenvalue = 0.0;
  long steps = 0;  ///< integrator steps or propagator applications
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ComplexMatrix> states;  ///< Hermitized density matrices
  std::vector<double> photon_number;
  std::vector<double> parity;
  std::vector<double> subspace_population;  ///< <C+|rho|C+> + <C-|rho|C->
  TrajectoryDiagnostics diagnostics;
};

enum class FullMethod {
  Propagator,  ///< exp(L dt) by scaling and squaring, reused across equal steps
  RungeKutta,  ///< embedded Dormand-Prince 5(4)
};

struct EvolveOptions {
  FullMethod method = FullMethod::Propagator;
  double rtol = 1e-8;
  double atol = 1e-10;
  long max_steps = 2'000'000;
  /// split L into the two (i + j) parity sectors when it is block diagonal
  bool use_sectors = true;
};

/// exp(L dt) for one fixed step, optionally stored per (i + j) parity sector.
class Propagator {
 public:
  Propagator(const liouville::LiouvillianMatrix& l, double dt, bool use_sectors = true);

  double dt() const { return dt_; }
  int hilbert_dim() const { return n_; }
  bool sectored() const { return sectored_; }
  ComplexVector apply(const ComplexVector& v) const;

 private:
  int n_ = 0;
  double dt_ = 0.0;
  bool sectored_ = false;
  ComplexMatrix full_;
  std::array<std::vector<Eigen::Index>, 2> index_;
  std::array<ComplexMatrix, 2> block_;
};

/// True when L never couples rho_ij with i + j even to i + j odd.
bool parity_sectors_decouple(const liouville::LiouvillianMatrix& l);

/// Integrates d vec(rho)/dt = L vec(rho), reporting at every t_grid point
/// (t_grid[0] is the time of rho0). alpha is used for the subspace
/// population observable.
Trajectory evolve_full(const ComplexMatrix& rho0, const liouville::LiouvillianMatrix& l,
                       const std::vector<double>& t_grid, double alpha,
                       const EvolveOptions& opts = {});
Trajectory evolve_full(const DensityMatrix& rho0, const model::ModelParams& params,
                       const std::vector<double>& t_grid, int dim,
                       const EvolveOptions& opts = {});

/// Evolution with shared propagators: one per distinct step length.
Trajectory evolve_with_propagators(const ComplexMatrix& rho0,
                                   const std::vector<std::shared_ptr<const Propagator>>& steps,
                                   const std::vector<double>& t_grid, double alpha);

/// Eigenmode decomposition v0 = sum_i c_i V_i of a 4x4 generator.
struct ModeDecomposition {
  Eigen::Vector4cd eigenvalues;
  Eigen::Matrix4cd modes;  ///< columns V_i
  Eigen::Vector4cd coefficients;
  double condition = 0.0;  ///< condition number of the mode matrix
};

ModeDecomposition decompose(const catspace::ReducedLiouvillian& l, const Eigen::Vector4cd& v0);

enum class ReducedMethod { Auto, Eigenmodes, Expm };

struct ReducedTrajectory {
  std::vector<double> times;
  std::vector<Eigen::Vector4cd> states;
  bool used_eigenmodes = false;
  double condition = 0.0;
};

/// Mode condition threshold above which the eigenmode path is abandoned.
inline constexpr double kModeConditionLimit = 1e8;

ReducedTrajectory evolve_reduced(const Eigen::Vector4cd& v0, const model::ReducedModel& m,
                                 const std::vector<double>& t_grid,
                                 ReducedMethod method = ReducedMethod::Auto);

/// (rho++, rho+-, rho-+, rho--) with rho_ij = <C_i|rho|C_j>.
Eigen::Vector4cd project_to_cat(const ComplexMatrix& rho, const fock::CatBasis& basis);
Eigen::Vector4cd project_to_cat(const ComplexMatrix& rho, double alpha, int dim);
/// sum_ij rho_ij |C_i><C_j| in Fock space.
ComplexMatrix embed_from_cat(const Eigen::Vector4cd& v, const fock::CatBasis& basis);
ComplexMatrix embed_from_cat(const Eigen::Vector4cd& v, double alpha, int dim);

/// 4x4 matrix of <C_i| L(|C_k><C_l|) |C_j> in the row-stacked cat basis.
catspace::ReducedLiouvillian project_generator(const liouville::LiouvillianMatrix& l,
                                               const fock::CatBasis& basis);

enum class InitialState { CatPlus, Coherent };
std::string to_string(InitialState s);

struct FidelityRecord {
  InitialState initial = InitialState::CatPlus;
  bool eps_on = false;
  double delta = 0.0;  ///< rad/us
  double t = 0.0;
  double fidelity = 0.0;
  double leakage = 0.0;
};

struct FidelityColumn {
  InitialState initial = InitialState::CatPlus;
  bool eps_on = false;
  double delta = 0.0;
  double min_fidelity = 0.0;
  double final_fidelity = 0.0;
  TrajectoryDiagnostics diagnostics;
  bool used_eigenmodes = false;
};

struct FidelityMap {
  std::vector<FidelityRecord> records;  ///< sorted by (initial, eps_on, delta, t)
  std::vector<FidelityColumn> columns;
};

struct FidelityMapOptions {
  int dim = 40;
  int workers = 1;
  EvolveOptions evolve;
};

/// For each Delta: full evolution from the Fock-space initial state and
/// reduced evolution from its cat projection, compared through the embedded
/// reduced state. params.drive is the drive used when eps_on is set.
FidelityMap fidelity_map(const std::vector<InitialState>& initials,
                         const model::ModelParams& params, const std::vector<double>& delta_grid,
                         const std::vector<double>& t_grid, bool eps_on,
                         const FidelityMapOptions& opts = {});

/// Trace distance to a reference state at each time after the transient;
/// reports whether it never increases by more than tol.
struct RelaxationCheck {
  bool monotone = true;
  double worst_increase = 0.0;
  double at_time = 0.0;
};
RelaxationCheck check_relaxation(const Trajectory& traj, const ComplexMatrix& reference,
                                 double transient_time, double tol = 1e-9);

}  // namespace kerrcat::dynamics
