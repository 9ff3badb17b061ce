#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ruzsa/finite_pmf.hpp"
#include "ruzsa/grid_density.hpp"
#include "ruzsa/group.hpp"
#include "ruzsa/joint_pmf.hpp"

namespace ruzsa {

using Rng = std::mt19937_64;

// splitmix64 finalizer of (seed, stream); used for per-trial and per-restart streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Dirichlet(concentration) weights on a random support of the given size
// (support_size == 0 means the whole group).
FinitePMF random_pmf(const GroupSpec& g, double concentration, Rng& rng, std::size_t support_size = 0);

// Random concentration and support size, point masses included.
FinitePMF random_pmf_mixed(const GroupSpec& g, Rng& rng);

// Discrete log-concave pmf on Z_m read as the interval {0, ..., m-1}.
FinitePMF random_logconcave_pmf(std::size_t m, Rng& rng);

// 1-D grid on [0, 1) whose log-density is concave and piecewise linear, sampled
// at cell midpoints; may vanish on a prefix or suffix.
GridDensity random_logconcave_grid(std::size_t cells, Rng& rng);

// Concave log-masses along Z: second differences of log masses <= tol, and
// zeros only as a contiguous prefix or suffix. Each mass may carry an absolute
// round-off of 1e-15 (CDF differences near 1), which widens tol in the tails.
bool is_discrete_logconcave(std::span<const double> masses, double tol = 1e-12);

// Atoms of a random pmf on {0, ..., m-1}, each spread evenly over `upsample`
// grid cells of width 1 / upsample.
GridDensity random_lattice_grid(std::size_t m, std::size_t upsample, Rng& rng);

JointPMF random_joint(const std::vector<GroupSpec>& groups, Rng& rng);

// Nonempty subset of a finite group.
ElementSet random_set(const GroupSpec& g, Rng& rng);

// A = M^T M + eps I with standard normal M, times a random log-uniform scale.
Eigen::MatrixXd random_pd_matrix(int n, Rng& rng, double eps = 1e-3);

// Product of random elementary integer matrices; determinant +-1.
IntegerMatrix random_gl2z(Rng& rng, int steps = 4, int max_shear = 3);

}  // namespace ruzsa
