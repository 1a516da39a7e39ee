#include "divekit/instance.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace divekit {

char sense_code(RowSense s) {
  switch (s) {
    case RowSense::kLe: return 'L';
    case RowSense::kGe: return 'G';
    case RowSense::kEq: return 'E';
  }
  return '?';
}

RowSense sense_from_code(char c) {
  switch (c) {
    case 'L': return RowSense::kLe;
    case 'G': return RowSense::kGe;
    case 'E': return RowSense::kEq;
    default: throw InvalidInstance(std::string("unknown row sense '") + c + "'");
  }
}

double MilpInstance::objective_value(std::span<const double> x) const {
  double z = 0.0;
  for (int j = 0; j < num_vars; ++j) z += objective[j] * x[j];
  return z;
}

double MilpInstance::row_activity(int i, std::span<const double> x) const {
  double a = 0.0;
  for (int k = row_start[i]; k < row_start[i + 1]; ++k) a += values[k] * x[col_index[k]];
  return a;
}

void MilpInstance::validate() const {
  auto fail = [this](const std::string& what) {
    throw InvalidInstance("instance '" + name + "': " + what);
  };
  if (num_vars < 0 || num_rows < 0) fail("negative dimensions");
  if (static_cast<int>(objective.size()) != num_vars || static_cast<int>(lower.size()) != num_vars ||
      static_cast<int>(upper.size()) != num_vars || static_cast<int>(divable.size()) != num_vars ||
      static_cast<int>(is_integer.size()) != num_vars)
    fail("column vector length mismatch");
  if (static_cast<int>(row_start.size()) != num_rows + 1 || static_cast<int>(sense.size()) != num_rows ||
      static_cast<int>(rhs.size()) != num_rows)
    fail("row vector length mismatch");
  if (row_start.front() != 0 || row_start.back() != static_cast<int>(values.size()) ||
      col_index.size() != values.size())
    fail("malformed CSR storage");
  for (int j = 0; j < num_vars; ++j) {
    if (!std::isfinite(objective[j])) fail("non-finite objective coefficient");
    if (std::isnan(lower[j]) || std::isnan(upper[j])) fail("NaN bound");
    if (lower[j] > upper[j]) fail("lower bound exceeds upper bound for column " + std::to_string(j));
    if (divable[j] && !is_integer[j]) fail("divable column " + std::to_string(j) + " is not integer");
  }
  for (size_t k = 0; k < integers.size(); ++k) {
    if (integers[k] < 0 || integers[k] >= num_vars) fail("integer index out of range");
    if (k > 0 && integers[k] <= integers[k - 1]) fail("integer index set not sorted/unique");
    if (!is_integer[integers[k]]) fail("integer mirror out of sync");
  }
  if (static_cast<size_t>(std::count(is_integer.begin(), is_integer.end(), 1)) != integers.size())
    fail("integer mirror out of sync");
  for (int i = 0; i < num_rows; ++i) {
    if (row_start[i + 1] < row_start[i]) fail("row pointers not monotone");
    if (!std::isfinite(rhs[i])) fail("non-finite right-hand side");
    std::vector<int> cols(row_cols(i).begin(), row_cols(i).end());
    std::sort(cols.begin(), cols.end());
    if (std::adjacent_find(cols.begin(), cols.end()) != cols.end())
      fail("duplicate entry in row " + std::to_string(i));
    for (int k = row_start[i]; k < row_start[i + 1]; ++k) {
      if (col_index[k] < 0 || col_index[k] >= num_vars) fail("column index out of range");
      if (!std::isfinite(values[k])) fail("non-finite coefficient");
    }
  }
}

MilpBuilder::MilpBuilder(std::string name) { inst_.name = std::move(name); }

int MilpBuilder::add_var(double lower, double upper, double cost, bool integer, std::string name) {
  const int j = inst_.num_vars++;
  inst_.lower.push_back(lower <= -kInfinity ? -kInfinity : lower);
  inst_.upper.push_back(upper >= kInfinity ? kInfinity : upper);
  inst_.objective.push_back(cost);
  inst_.is_integer.push_back(integer ? 1 : 0);
  inst_.divable.push_back(0);
  inst_.var_names.push_back(std::move(name));
  return j;
}

int MilpBuilder::add_row(std::vector<RowEntry> entries, RowSense sense, double rhs, std::string name) {
  std::map<int, double> merged;
  for (const auto& e : entries) merged[e.col] += e.value;
  for (const auto& [col, v] : merged) {
    if (v == 0.0) continue;
    inst_.col_index.push_back(col);
    inst_.values.push_back(v);
  }
  inst_.row_start.push_back(static_cast<int>(inst_.values.size()));
  inst_.sense.push_back(sense);
  inst_.rhs.push_back(rhs);
  inst_.row_names.push_back(std::move(name));
  return inst_.num_rows++;
}

void refresh_divable(MilpInstance& inst) {
  inst.integers.clear();
  inst.divable.assign(inst.num_vars, 0);
  for (int j = 0; j < inst.num_vars; ++j) {
    if (!inst.is_integer[j]) continue;
    inst.integers.push_back(j);
    inst.divable[j] = inst.lower[j] < inst.upper[j] ? 1 : 0;
  }
}

MilpInstance MilpBuilder::build() && {
  refresh_divable(inst_);
  inst_.validate();
  return std::move(inst_);
}

double max_violation(const MilpInstance& inst, std::span<const double> x) {
  double worst = 0.0;
  for (int j = 0; j < inst.num_vars; ++j) {
    if (!std::isfinite(x[j])) return kInfinity;
    worst = std::max({worst, inst.lower[j] - x[j], x[j] - inst.upper[j]});
    if (inst.is_integer[j]) worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
  }
  for (int i = 0; i < inst.num_rows; ++i) {
    const double a = inst.row_activity(i, x);
    const double b = inst.rhs[i];
    switch (inst.sense[i]) {
      case RowSense::kLe: worst = std::max(worst, a - b); break;
      case RowSense::kGe: worst = std::max(worst, b - a); break;
      case RowSense::kEq: worst = std::max(worst, std::abs(a - b)); break;
    }
  }
  return worst;
}

bool is_feasible(const MilpInstance& inst, std::span<const double> x, double tol) {
  return static_cast<int>(x.size()) >= inst.num_vars && max_violation(inst, x) <= tol;
}

bool is_integral(const MilpInstance& inst, std::span<const double> x, double tol) {
  for (int j : inst.integers)
    if (std::abs(x[j] - std::round(x[j])) > tol) return false;
  return true;
}

StandardLp to_standard_form(const MilpInstance& inst) {
  StandardLp lp;
  const int n = inst.num_vars;
  const int m = inst.num_rows;
  lp.num_rows = m;
  lp.slack_start = n;

  // Column counts for the original block.
  std::vector<int> count(n, 0);
  for (int c : inst.col_index) ++count[c];
  int num_slacks = 0;
  for (int i = 0; i < m; ++i) num_slacks += inst.sense[i] != RowSense::kEq;
  lp.num_cols = n + num_slacks;

  lp.col_start.assign(lp.num_cols + 1, 0);
  for (int j = 0; j < n; ++j) lp.col_start[j + 1] = lp.col_start[j] + count[j];
  const int structural_nnz = lp.col_start[n];
  lp.row_index.resize(structural_nnz + num_slacks);
  lp.values.resize(structural_nnz + num_slacks);
  std::vector<int> fill(lp.col_start.begin(), lp.col_start.begin() + n);
  for (int i = 0; i < m; ++i) {
    for (int k = inst.row_start[i]; k < inst.row_start[i + 1]; ++k) {
      const int j = inst.col_index[k];
      lp.row_index[fill[j]] = i;
      lp.values[fill[j]] = inst.values[k];
      ++fill[j];
    }
  }

  lp.objective = inst.objective;
  lp.lower = inst.lower;
  lp.upper = inst.upper;
  lp.rhs = inst.rhs;
  lp.origin.resize(n);
  for (int j = 0; j < n; ++j) lp.origin[j] = j;

  int col = n;
  for (int i = 0; i < m; ++i) {
    if (inst.sense[i] == RowSense::kEq) continue;
    const int k = lp.col_start[col];
    lp.row_index[k] = i;
    lp.values[k] = inst.sense[i] == RowSense::kLe ? 1.0 : -1.0;
    lp.col_start[col + 1] = k + 1;
    lp.objective.push_back(0.0);
    lp.lower.push_back(0.0);
    lp.upper.push_back(kInfinity);
    lp.origin.push_back(-(i + 1));
    ++col;
  }
  return lp;
}

std::vector<double> with_slacks(const MilpInstance& inst, const StandardLp& lp,
                                std::span<const double> x) {
  std::vector<double> full(lp.num_cols, 0.0);
  std::copy(x.begin(), x.begin() + inst.num_vars, full.begin());
  for (int j = lp.slack_start; j < lp.num_cols; ++j) {
    const int i = lp.slack_row(j);
    const double a = inst.row_activity(i, x);
    full[j] = inst.sense[i] == RowSense::kLe ? inst.rhs[i] - a : a - inst.rhs[i];
  }
  return full;
}

}  // namespace divekit
