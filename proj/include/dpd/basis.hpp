#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dpd/iq_buffer.hpp"

namespace dpd {

/// Polynomial orders used by the main (I_P) and conjugate (I_Q) branches.
struct BranchSets {
  std::vector<int> main;  // e.g. {1, 3, 5}
  std::vector<int> conj;  // e.g. {1, 3}

  /// All odd orders 1..p and 1..q.
  static BranchSets odd(int p, int q);

  int max_main() const { return main.empty() ? 0 : main.back(); }
  int max_conj() const { return conj.empty() ? 0 : conj.back(); }
  std::size_t count() const { return main.size() + conj.size(); }

  /// Throws ConfigError unless both sets are ascending, odd, non-empty and
  /// P >= Q >= 1.
  void validate() const;

  friend bool operator==(const BranchSets&, const BranchSets&) = default;
};

enum class BasisMode { plain, orthogonal };

const char* to_string(BasisMode mode);
BasisMode basis_mode_from_string(const std::string& s);

/// Coefficient tables u_{m,p} (main) and u_{m,q} (conjugate).
///
/// Row i of `u_main` belongs to order sets.main[i] and holds the
/// coefficients for the monomials |x|^{m-1} x, m = sets.main[0..i]; it is
/// lower-triangular by construction. `u_conj` is the same for the conjugate
/// family, applied to |x|^{m-1} x*.
struct PolyBasis {
  BasisMode mode = BasisMode::plain;
  BranchSets sets;
  std::vector<std::vector<cf64>> u_main;
  std::vector<std::vector<cf64>> u_conj;

  static PolyBasis plain(const BranchSets& sets);

  /// Throws ConfigError if the tables do not match `sets` or a diagonal is 0.
  void validate() const;

  friend bool operator==(const PolyBasis&, const PolyBasis&) = default;
};

/// Branch polynomial value. With `conjugate` false this is
/// psi_p(x) = sum_m u_{m,p} |x|^{m-1} x; with `conjugate` true it is
/// sum_m u_{m,q} |x|^{m-1} conj(x).
///
/// The float overload follows exactly the operation order of the
/// predistortion kernels (powers of |x|^2 built low to high).
cf32 evaluate_branch(cf32 x, int order, bool conjugate, const PolyBasis& basis);
cf64 evaluate_branch(cf64 x, int order, bool conjugate, const PolyBasis& basis);

/// Fits statistically orthonormal main and conjugate families on `training`
/// (Cholesky factor of the monomial moment matrix, inverted).
/// Throws InsufficientDataError when the buffer has fewer than 10x the
/// number of basis functions, ConditioningError for degenerate moments.
PolyBasis fit_orthogonal_basis(const IqBuffer& training, const BranchSets& sets);

/// Per-branch tap counts in branch order (main ascending, then conjugate).
struct TapLayout {
  std::vector<int> main;
  std::vector<int> conj;

  int max_taps() const;
  int total() const;  // sum of all taps (excluding the constant)
  friend bool operator==(const TapLayout&, const TapLayout&) = default;
};

/// Regression matrix [Psi_1 .. Psi_P, Psi~_1 .. Psi~_Q, 1].
///
/// Each block is a full convolution matrix of its branch sequence with
/// M + L_max - 1 rows; blocks with fewer taps are zero-padded at the bottom.
struct BasisMatrix {
  Eigen::MatrixXcd values;
  std::vector<Eigen::Index> block_offsets;  // first column of each branch
  TapLayout taps;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

BasisMatrix build_basis_matrix(std::span<const cf32> y, const TapLayout& taps,
                               const PolyBasis& basis);
BasisMatrix build_basis_matrix(std::span<const cf64> y, const TapLayout& taps,
                               const PolyBasis& basis);

nlohmann::json to_json(const PolyBasis& basis);
PolyBasis poly_basis_from_json(const nlohmann::json& j);

}  // namespace dpd
