#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "divekit/common.hpp"

namespace divekit {

enum class RowSense : uint8_t { kLe, kGe, kEq };

char sense_code(RowSense s);
RowSense sense_from_code(char c);

struct RowEntry {
  int col;
  double value;
};

// A mixed-integer linear program
//
//   min c^T x  s.t.  A_i x (<=|>=|=) b_i,  lower <= x <= upper,  x_j integer for j in I.
//
// Rows are stored in CSR form. Infinite bounds use the kInfinity sentinel.
// Instances are plain values; build them with MilpBuilder or the generators
// and treat them as immutable afterwards.
struct MilpInstance {
  std::string name;
  int num_vars = 0;
  int num_rows = 0;
  std::vector<double> objective;
  std::vector<int> row_start{0};
  std::vector<int> col_index;
  std::vector<double> values;
  std::vector<RowSense> sense;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<int> integers;    // sorted, unique
  std::vector<char> is_integer;  // dense mirror of `integers`
  std::vector<char> divable;
  std::vector<std::string> var_names;
  std::vector<std::string> row_names;

  std::span<const int> row_cols(int i) const {
    return {col_index.data() + row_start[i], static_cast<size_t>(row_start[i + 1] - row_start[i])};
  }
  std::span<const double> row_values(int i) const {
    return {values.data() + row_start[i], static_cast<size_t>(row_start[i + 1] - row_start[i])};
  }
  int num_nonzeros() const { return static_cast<int>(values.size()); }

  double objective_value(std::span<const double> x) const;
  double row_activity(int i, std::span<const double> x) const;

  // Throws InvalidInstance when an invariant is violated.
  void validate() const;
};

// Incremental construction of a MilpInstance.
class MilpBuilder {
 public:
  explicit MilpBuilder(std::string name = {});

  int add_var(double lower, double upper, double cost, bool integer, std::string name = {});
  int add_binary(double cost, std::string name = {}) { return add_var(0.0, 1.0, cost, true, std::move(name)); }
  // Duplicate columns within one row are summed; zero coefficients dropped.
  int add_row(std::vector<RowEntry> entries, RowSense sense, double rhs, std::string name = {});

  // Finalizes the index set and divability flags and validates the result.
  MilpInstance build() &&;

 private:
  MilpInstance inst_;
};

// Recomputes `integers`, `is_integer` consistency and the default divability
// rule: integer, not fixed. Instances never contain slack columns, so every
// unfixed integer variable is divable.
void refresh_divable(MilpInstance& inst);

// Maximum violation of rows, bounds and integrality at x (0 when feasible).
double max_violation(const MilpInstance& inst, std::span<const double> x);
bool is_feasible(const MilpInstance& inst, std::span<const double> x, double tol = 1e-6);
bool is_integral(const MilpInstance& inst, std::span<const double> x, double tol = 1e-6);

// The LP in bounded standard form  min c^T x  s.t.  A x = b,  lower <= x <= upper.
// Columns [0, slack_start) are the original variables in their original
// order; LE rows get a slack with coefficient +1, GE rows a surplus with
// coefficient -1, both bounded to [0, inf). The matrix is stored by columns.
struct StandardLp {
  int num_rows = 0;
  int num_cols = 0;
  int slack_start = 0;
  std::vector<double> objective;
  std::vector<int> col_start{0};
  std::vector<int> row_index;
  std::vector<double> values;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;
  // origin[j] = j for original columns, -(i + 1) for the slack of row i.
  std::vector<int> origin;

  std::span<const int> col_rows(int j) const {
    return {row_index.data() + col_start[j], static_cast<size_t>(col_start[j + 1] - col_start[j])};
  }
  std::span<const double> col_values(int j) const {
    return {values.data() + col_start[j], static_cast<size_t>(col_start[j + 1] - col_start[j])};
  }
  bool is_slack(int j) const { return j >= slack_start; }
  int slack_row(int j) const { return is_slack(j) ? -origin[j] - 1 : -1; }
};

StandardLp to_standard_form(const MilpInstance& inst);

// Completes an original-space point with the slack values it implies.
std::vector<double> with_slacks(const MilpInstance& inst, const StandardLp& lp,
                                std::span<const double> x);

}  // namespace divekit
