#pragma once

// Multiple correspondence analysis over the fact population, test-values per
// member, test-value driven cube arrangement and the homogeneity score used
// to compare arrangements.

#include "xdw/cube.hpp"
#include "xdw/warehouse.hpp"

#include <string>
#include <vector>

namespace xdw {

/// One categorical variable: the members of (dim, level), columns
/// [offset, offset + members.size()) of the indicator matrix.
struct IndicatorBlock {
  std::string dim_id;
  std::string level_id;
  std::vector<std::string> members;
  std::size_t offset = 0;
};

/// Sparse 0/1 table: row i has a 1 in column cells[i][q] for each variable q.
struct IndicatorMatrix {
  std::vector<IndicatorBlock> variables;
  std::vector<std::size_t> fact_rows;          // index into the fact table
  std::vector<std::vector<std::size_t>> cells; // per row, one global column per variable
  std::vector<std::size_t> frequency;          // per column

  std::size_t rows() const { return cells.size(); }
  std::size_t columns() const { return frequency.size(); }
  std::size_t variable_count() const { return variables.size(); }
  bool zero_frequency(std::size_t column) const { return frequency[column] == 0; }
  const IndicatorBlock &variable_of(std::size_t column) const;
  const std::string &member_of(std::size_t column) const;
  std::vector<std::vector<int>> dense() const;
};

/// Facts failing a predicate are left out; members come from each level in
/// document order, restricted like build_cube restricts axis members.
/// Throws unknown-dimension, unknown-level, duplicate-variable, no-variables.
IndicatorMatrix build_indicator_matrix(const Warehouse &w, const std::vector<AxisSpec> &variables,
                                       const std::vector<Predicate> &predicates = {});

/// Variables are the cube axes (document member order), context its
/// predicates. Throws synthetic-axis, no-provenance.
IndicatorMatrix build_indicator_matrix(const Cube &cube);

struct FactorialResult {
  std::vector<double> eigenvalues;                     // non-increasing, all > 1e-12
  std::vector<std::vector<double>> member_coordinates; // per column, per axis (zeros for empty columns)
  std::vector<std::vector<double>> fact_coordinates;   // per row, per axis
  double total_inertia = 0;                            // (J - Q) / Q over occupied columns
};

/// Principal coordinates for members and facts. Deterministic; on each axis
/// the first member with a nonzero coordinate is positive. Throws
/// too-few-facts (n < 2) and degenerate-variable (one occupied member).
FactorialResult mca_axes(const IndicatorMatrix &indicator);

struct TestValue {
  std::size_t column = 0;
  bool testable = false; // false when the member is carried by no fact or by all
  std::vector<double> values; // per factorial axis
};

/// t(j, a) = G(j, a) * sqrt(n_j (n - 1) / (n - n_j)), with G the member's
/// principal coordinate (the mean fact coordinate over its facts / sqrt(lambda)).
std::vector<TestValue> test_values(const FactorialResult &result, const IndicatorMatrix &indicator);

/// Reorder every axis that is a variable of `indicator`: testable members by
/// axis-1 test-value descending, then axis 2 descending, then id; untestable
/// members last by id. Cells are untouched.
Cube arrange_cube(const Cube &cube, const IndicatorMatrix &indicator, const std::vector<TestValue> &values);

struct HomogeneityScore {
  double value = 0;
  std::size_t cell_count = 0;      // positions in the full grid
  std::size_t full_cell_count = 0; // non-empty cells
};

/// Neighbors differ by one step along one axis' member order. A full pair
/// scores 1 - |v - v'| / range (1 when the range of full values is 0), a
/// mixed pair 0. Score = sum over full cells of neighbor similarity divided
/// by the total neighbor count of full cells, 0 when that count is 0.
HomogeneityScore homogeneity(const Cube &cube);

} // namespace xdw
