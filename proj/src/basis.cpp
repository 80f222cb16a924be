#include "dpd/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpd/error.hpp"
#include "kernels/aph_kernel.hpp"

namespace dpd {

BranchSets BranchSets::odd(int p, int q) {
  BranchSets s;
  for (int m = 1; m <= p; m += 2) s.main.push_back(m);
  for (int m = 1; m <= q; m += 2) s.conj.push_back(m);
  return s;
}

namespace {

void validate_orders(const std::vector<int>& orders, const char* name) {
  if (orders.empty()) throw ConfigError(std::string(name) + " must not be empty");
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (orders[i] < 1 || orders[i] % 2 == 0)
      throw ConfigError(std::string(name) + " must contain odd orders >= 1, got " +
                        std::to_string(orders[i]));
    if (i > 0 && orders[i] <= orders[i - 1])
      throw ConfigError(std::string(name) + " must be strictly ascending");
  }
}

}  // namespace

void BranchSets::validate() const {
  validate_orders(main, "I_P");
  validate_orders(conj, "I_Q");
  if (max_main() < max_conj()) throw ConfigError("P must be >= Q");
}

const char* to_string(BasisMode mode) {
  return mode == BasisMode::plain ? "plain" : "orthogonal";
}

BasisMode basis_mode_from_string(const std::string& s) {
  if (s == "plain") return BasisMode::plain;
  if (s == "orthogonal") return BasisMode::orthogonal;
  throw ConfigError("unknown basis mode '" + s + "' (expected plain|orthogonal)");
}

namespace {

std::vector<std::vector<cf64>> identity_table(std::size_t n) {
  std::vector<std::vector<cf64>> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i].assign(i + 1, cf64{});
    t[i][i] = 1.0;
  }
  return t;
}

void validate_table(const std::vector<std::vector<cf64>>& t, std::size_t n, BasisMode mode,
                    const char* name) {
  if (t.size() != n)
    throw ConfigError(std::string(name) + " has " + std::to_string(t.size()) + " rows, expected " +
                      std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (t[i].size() != i + 1)
      throw ConfigError(std::string(name) + " row " + std::to_string(i) + " must have " +
                        std::to_string(i + 1) + " entries");
    for (const cf64& u : t[i])
      if (!std::isfinite(u.real()) || !std::isfinite(u.imag()))
        throw ConfigError(std::string(name) + " contains a non-finite entry");
    if (t[i][i] == cf64{}) throw ConfigError(std::string(name) + " has a zero diagonal entry");
    if (mode == BasisMode::plain) {
      for (std::size_t m = 0; m < i; ++m)
        if (t[i][m] != cf64{})
          throw ConfigError(std::string(name) + ": plain basis must have zero off-diagonals");
      if (t[i][i] != cf64{1.0})
        throw ConfigError(std::string(name) + ": plain basis must have unit diagonal");
    }
  }
}

}  // namespace

PolyBasis PolyBasis::plain(const BranchSets& sets) {
  sets.validate();
  return PolyBasis{BasisMode::plain, sets, identity_table(sets.main.size()),
                   identity_table(sets.conj.size())};
}

void PolyBasis::validate() const {
  sets.validate();
  validate_table(u_main, sets.main.size(), mode, "u_main");
  validate_table(u_conj, sets.conj.size(), mode, "u_conj");
}

namespace {

std::size_t branch_index(const std::vector<int>& orders, int order) {
  auto it = std::find(orders.begin(), orders.end(), order);
  if (it == orders.end())
    throw ConfigError("polynomial order " + std::to_string(order) + " is not in the branch set");
  return static_cast<std::size_t>(it - orders.begin());
}

}  // namespace

cf32 evaluate_branch(cf32 x, int order, bool conjugate, const PolyBasis& basis) {
  const std::vector<int>& orders = conjugate ? basis.sets.conj : basis.sets.main;
  const std::size_t idx = branch_index(orders, order);
  const kernel::Plan plan = kernel::make_basis_plan(basis);
  const kernel::Branch& br = plan.branches[conjugate ? basis.sets.main.size() + idx : idx];
  float pw[kernel::kMaxPowers];
  kernel::powers(plan, x.real(), x.imag(), pw);
  float re, im;
  kernel::branch_value(br, x.real(), x.imag(), pw, re, im);
  return {re, im};
}

namespace {

/// Row `idx` of a coefficient table applied to |x|^2 powers.
cf64 polynomial_weight(const std::vector<int>& orders, const std::vector<cf64>& row, double mag2) {
  cf64 w{};
  for (std::size_t m = 0; m < row.size(); ++m)
    w += row[m] * std::pow(mag2, (orders[m] - 1) / 2);
  return w;
}

}  // namespace

cf64 evaluate_branch(cf64 x, int order, bool conjugate, const PolyBasis& basis) {
  const std::vector<int>& orders = conjugate ? basis.sets.conj : basis.sets.main;
  const std::size_t idx = branch_index(orders, order);
  const auto& table = conjugate ? basis.u_conj : basis.u_main;
  const cf64 w = polynomial_weight(orders, table[idx], std::norm(x));
  return w * (conjugate ? std::conj(x) : x);
}

namespace {

/// u = inverse Cholesky factor of the monomial moment matrix over `mag2`.
std::vector<std::vector<cf64>> orthonormalize(const std::vector<int>& orders,
                                              std::span<const double> mag2, const char* family) {
  const std::size_t n = orders.size();
  // E[conj(t_a) t_b] with t_m = |x|^{m-1} x is E[|x|^{(a-1)+(b-1)+2}], real.
  Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                  static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const int exponent = (orders[a] - 1) / 2 + (orders[b] - 1) / 2 + 1;  // power of |x|^2
      long double sum = 0.0L;
      for (double r2 : mag2) sum += std::pow(static_cast<long double>(r2), exponent);
      const double mean = static_cast<double>(sum / static_cast<long double>(mag2.size()));
      moments(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = mean;
      moments(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = mean;
    }
  }

  // Cholesky with an explicit pivot check so degenerate moments are reported
  // rather than silently producing huge coefficients.
  constexpr double kMinRelativePivot = 1e-10;
  Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(moments.rows(), moments.cols());
  for (Eigen::Index k = 0; k < moments.rows(); ++k) {
    double pivot = moments(k, k);
    for (Eigen::Index j = 0; j < k; ++j) pivot -= chol(k, j) * chol(k, j);
    if (!(moments(k, k) > 0.0) || pivot <= kMinRelativePivot * moments(k, k)) {
      const double cond = pivot > 0.0 ? moments(k, k) / pivot
                                      : std::numeric_limits<double>::infinity();
      throw ConditioningError(std::string("degenerate amplitude moments for the ") + family +
                                  " basis (order " + std::to_string(orders[k]) +
                                  "); training signal has too little amplitude variation",
                              cond);
    }
    chol(k, k) = std::sqrt(pivot);
    for (Eigen::Index i = k + 1; i < moments.rows(); ++i) {
      double v = moments(i, k);
      for (Eigen::Index j = 0; j < k; ++j) v -= chol(i, j) * chol(k, j);
      chol(i, k) = v / chol(k, k);
    }
  }

  const Eigen::MatrixXd inv = chol.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(moments.rows(), moments.cols()));
  std::vector<std::vector<cf64>> u(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t m = 0; m <= i; ++m)
      u[i].push_back(inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)));
  return u;
}

}  // namespace

PolyBasis fit_orthogonal_basis(const IqBuffer& training, const BranchSets& sets) {
  sets.validate();
  const std::size_t needed = 10 * sets.count();
  if (training.size() < needed)
    throw InsufficientDataError("orthogonal basis fit needs at least " + std::to_string(needed) +
                                " samples, got " + std::to_string(training.size()));
  std::vector<double> mag2(training.size());
  std::transform(training.samples().begin(), training.samples().end(), mag2.begin(),
                 [](cf32 x) { return std::norm(cf64(x)); });

  PolyBasis basis;
  basis.mode = BasisMode::orthogonal;
  basis.sets = sets;
  basis.u_main = orthonormalize(sets.main, mag2, "main");
  basis.u_conj = orthonormalize(sets.conj, mag2, "conjugate");
  return basis;
}

int TapLayout::max_taps() const {
  int m = 0;
  for (int t : main) m = std::max(m, t);
  for (int t : conj) m = std::max(m, t);
  return m;
}

int TapLayout::total() const {
  int s = 0;
  for (int t : main) s += t;
  for (int t : conj) s += t;
  return s;
}

namespace {

template <typename T>
BasisMatrix build_matrix(std::span<const std::complex<T>> y, const TapLayout& taps,
                         const PolyBasis& basis) {
  basis.validate();
  if (taps.main.size() != basis.sets.main.size() || taps.conj.size() != basis.sets.conj.size())
    throw ConfigError("tap layout does not match the branch sets");
  for (int t : taps.main)
    if (t < 1) throw ConfigError("every branch needs at least one tap");
  for (int t : taps.conj)
    if (t < 1) throw ConfigError("every branch needs at least one tap");
  const Eigen::Index M = static_cast<Eigen::Index>(y.size());
  const Eigen::Index L = taps.max_taps();
  if (M < L)
    throw InsufficientDataError("basis matrix needs at least " + std::to_string(L) +
                                " samples, got " + std::to_string(M));

  BasisMatrix out;
  out.taps = taps;
  out.values = Eigen::MatrixXcd::Zero(M + L - 1, taps.total() + 1);

  Eigen::VectorXcd branch(M);
  Eigen::Index col = 0;
  auto add_block = [&](int order, bool conjugate, int n_taps) {
    for (Eigen::Index n = 0; n < M; ++n)
      branch(n) = evaluate_branch(cf64(y[static_cast<std::size_t>(n)]), order, conjugate, basis);
    out.block_offsets.push_back(col);
    for (int k = 0; k < n_taps; ++k, ++col) out.values.col(col).segment(k, M) = branch;
  };
  for (std::size_t i = 0; i < basis.sets.main.size(); ++i)
    add_block(basis.sets.main[i], false, taps.main[i]);
  for (std::size_t i = 0; i < basis.sets.conj.size(); ++i)
    add_block(basis.sets.conj[i], true, taps.conj[i]);
  out.values.col(col).setOnes();
  return out;
}

}  // namespace

BasisMatrix build_basis_matrix(std::span<const cf32> y, const TapLayout& taps,
                               const PolyBasis& basis) {
  return build_matrix<float>(y, taps, basis);
}

BasisMatrix build_basis_matrix(std::span<const cf64> y, const TapLayout& taps,
                               const PolyBasis& basis) {
  return build_matrix<double>(y, taps, basis);
}

namespace {

nlohmann::json table_json(const std::vector<std::vector<cf64>>& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t) {
    nlohmann::json r = nlohmann::json::array();
    for (const cf64& u : row) r.push_back({u.real(), u.imag()});
    rows.push_back(r);
  }
  return rows;
}

std::vector<std::vector<cf64>> table_from(const nlohmann::json& j) {
  std::vector<std::vector<cf64>> t;
  for (const auto& row : j) {
    std::vector<cf64> r;
    for (const auto& u : row) {
      if (!u.is_array() || u.size() != 2) throw ConfigError("basis table entries must be [re, im]");
      r.emplace_back(u[0].get<double>(), u[1].get<double>());
    }
    t.push_back(std::move(r));
  }
  return t;
}

}  // namespace

nlohmann::json to_json(const PolyBasis& basis) {
  return {{"mode", to_string(basis.mode)},
          {"I_P", basis.sets.main},
          {"I_Q", basis.sets.conj},
          {"u_main", table_json(basis.u_main)},
          {"u_conj", table_json(basis.u_conj)}};
}

PolyBasis poly_basis_from_json(const nlohmann::json& j) {
  try {
    PolyBasis basis;
    basis.mode = basis_mode_from_string(j.at("mode").get<std::string>());
    basis.sets.main = j.at("I_P").get<std::vector<int>>();
    basis.sets.conj = j.at("I_Q").get<std::vector<int>>();
    basis.u_main = table_from(j.at("u_main"));
    basis.u_conj = table_from(j.at("u_conj"));
    basis.validate();
    return basis;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed basis document: ") + e.what());
  }
}

}  // namespace dpd
