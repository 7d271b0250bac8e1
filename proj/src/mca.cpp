#include "xdw/mca.hpp"

#include "xdw/error.hpp"
#include "xdw/hierarchy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace xdw {

const IndicatorBlock &IndicatorMatrix::variable_of(std::size_t column) const {
  for (const auto &v : variables)
    if (column >= v.offset && column < v.offset + v.members.size()) return v;
  throw Error("bad-column", "indicator column " + std::to_string(column) + " out of range");
}

const std::string &IndicatorMatrix::member_of(std::size_t column) const {
  const auto &v = variable_of(column);
  return v.members[column - v.offset];
}

std::vector<std::vector<int>> IndicatorMatrix::dense() const {
  std::vector<std::vector<int>> out(rows(), std::vector<int>(columns(), 0));
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t c : cells[i]) out[i][c] = 1;
  return out;
}

IndicatorMatrix build_indicator_matrix(const Warehouse &w, const std::vector<AxisSpec> &variables,
                                       const std::vector<Predicate> &predicates) {
  if (variables.empty()) throw Error("no-variables", "correspondence analysis needs at least one variable");
  const WarehouseIndex index(w);

  struct Resolved {
    const DimensionIndex *dim;
    std::size_t level;
    std::vector<std::size_t> selected;
  };
  std::vector<Resolved> preds;
  for (const auto &p : predicates) {
    const DimensionIndex &di = index.dimension(p.dim_id);
    Resolved r{&di, di.level_index(p.level_id), {}};
    for (const auto &m : p.members) {
      const std::size_t pos = di.position(r.level, m);
      if (pos == DimensionIndex::npos)
        throw Error("unknown-member", "level '" + p.level_id + "' has no member '" + m + "'");
      r.selected.push_back(pos);
    }
    preds.push_back(std::move(r));
  }

  IndicatorMatrix out;
  std::vector<const DimensionIndex *> dims;
  std::vector<std::size_t> levels;
  // Per variable: level position -> global column (npos when filtered out).
  std::vector<std::vector<std::size_t>> column_of;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t offset = 0;
  for (const auto &v : variables) {
    if (!seen.insert({v.dim_id, v.level_id}).second)
      throw Error("duplicate-variable", "variable " + v.dim_id + "/" + v.level_id + " appears twice");
    const DimensionIndex &di = index.dimension(v.dim_id);
    const std::size_t li = di.level_index(v.level_id);
    IndicatorBlock block{v.dim_id, v.level_id, {}, offset};
    std::vector<std::size_t> cols(di.members(li).size(), DimensionIndex::npos);
    for (std::size_t p = 0; p < di.members(li).size(); ++p) {
      bool keep = true;
      for (const auto &r : preds)
        if (r.dim == &di && !di.related(li, p, r.level, r.selected)) keep = false;
      if (!keep) continue;
      cols[p] = offset + block.members.size();
      block.members.push_back(di.members(li)[p]);
    }
    offset += block.members.size();
    out.variables.push_back(std::move(block));
    dims.push_back(&di);
    levels.push_back(li);
    column_of.push_back(std::move(cols));
  }
  out.frequency.assign(offset, 0);

  for (std::size_t r = 0; r < w.facts.rows.size(); ++r) {
    const FactRow &row = w.facts.rows[r];
    bool keep = true;
    for (const auto &p : preds) {
      auto it = row.members.find(p.dim->spec().id);
      const std::size_t a = it == row.members.end() ? DimensionIndex::npos : p.dim->roll_up_finest(it->second, p.level);
      if (std::find(p.selected.begin(), p.selected.end(), a) == p.selected.end()) {
        keep = false;
        break;
      }
    }
    if (!keep) continue;
    std::vector<std::size_t> cells;
    for (std::size_t q = 0; q < variables.size(); ++q) {
      auto it = row.members.find(variables[q].dim_id);
      const std::size_t a = it == row.members.end() ? DimensionIndex::npos : dims[q]->roll_up_finest(it->second, levels[q]);
      if (a == DimensionIndex::npos)
        throw Error("broken-hierarchy", "fact " + std::to_string(r + 1) + " does not reach level '" +
                                            variables[q].level_id + "'");
      if (column_of[q][a] == DimensionIndex::npos) {
        keep = false;
        break;
      }
      cells.push_back(column_of[q][a]);
    }
    if (!keep) continue;
    for (std::size_t c : cells) ++out.frequency[c];
    out.fact_rows.push_back(r);
    out.cells.push_back(std::move(cells));
  }
  return out;
}

IndicatorMatrix build_indicator_matrix(const Cube &cube) {
  if (!cube.source) throw Error("no-provenance", "the cube has no source warehouse");
  std::vector<AxisSpec> vars;
  for (const auto &a : cube.axes) {
    if (a.synthetic) throw Error("synthetic-axis", "axis '" + a.dim_id + "' was pulled from cell content");
    vars.push_back({a.dim_id, a.level_id});
  }
  return build_indicator_matrix(*cube.source, vars, cube.predicates);
}

FactorialResult mca_axes(const IndicatorMatrix &ind) {
  const std::size_t n = ind.rows(), q = ind.variable_count();
  if (n < 2) throw Error("too-few-facts", "correspondence analysis needs at least 2 facts, got " + std::to_string(n));
  for (const auto &v : ind.variables) {
    std::size_t occupied = 0;
    for (std::size_t j = 0; j < v.members.size(); ++j) occupied += ind.frequency[v.offset + j] > 0;
    if (occupied < 2)
      throw Error("degenerate-variable", "variable " + v.dim_id + "/" + v.level_id + " has fewer than 2 occupied members");
  }

  // Occupied columns only; empty columns carry no mass.
  std::vector<std::size_t> cols;
  std::vector<std::size_t> compact(ind.columns(), static_cast<std::size_t>(-1));
  for (std::size_t j = 0; j < ind.columns(); ++j)
    if (!ind.zero_frequency(j)) {
      compact[j] = cols.size();
      cols.push_back(j);
    }
  const std::size_t jj = cols.size();
  const double nd = static_cast<double>(n), qd = static_cast<double>(q);

  // S = D_r^-1/2 (P - r c^T) D_c^-1/2 with P = Z / (nQ), r_i = 1/n, c_j = n_j / (nQ).
  Eigen::VectorXd c(jj);
  for (std::size_t k = 0; k < jj; ++k) c(static_cast<Eigen::Index>(k)) = static_cast<double>(ind.frequency[cols[k]]) / (nd * qd);
  const Eigen::VectorXd inv_sqrt_c = c.array().rsqrt();
  Eigen::MatrixXd s(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(jj));
  const double sqrt_r = std::sqrt(1.0 / nd);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < jj; ++k)
      s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          -sqrt_r * c(static_cast<Eigen::Index>(k)) * inv_sqrt_c(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t col : ind.cells[i]) {
      const auto k = static_cast<Eigen::Index>(compact[col]);
      s(static_cast<Eigen::Index>(i), k) += (1.0 / (nd * qd)) / sqrt_r * inv_sqrt_c(k);
    }

  const Eigen::MatrixXd gram = s.transpose() * s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) throw Error("eigen-failure", "eigen decomposition did not converge");
  const Eigen::VectorXd evals = solver.eigenvalues();
  const Eigen::MatrixXd evecs = solver.eigenvectors();

  FactorialResult out;
  out.total_inertia = static_cast<double>(jj - q) / qd;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index e = evals.size() - 1; e >= 0; --e)
    if (evals(e) > 1e-12 && kept.size() < jj - q) kept.push_back(e);

  const std::size_t axes = kept.size();
  out.member_coordinates.assign(ind.columns(), std::vector<double>(axes, 0.0));
  out.fact_coordinates.assign(n, std::vector<double>(axes, 0.0));
  for (std::size_t a = 0; a < axes; ++a) {
    const double lambda = evals(kept[a]);
    Eigen::VectorXd v = evecs.col(kept[a]);
    // Member principal coordinates G = D_c^-1/2 v sqrt(lambda).
    Eigen::VectorXd g = inv_sqrt_c.cwiseProduct(v) * std::sqrt(lambda);
    double sign = 1.0;
    for (Eigen::Index k = 0; k < g.size(); ++k)
      if (std::abs(g(k)) > 1e-12) {
        sign = g(k) > 0 ? 1.0 : -1.0;
        break;
      }
    v *= sign;
    g *= sign;
    // Fact principal coordinates F = D_r^-1/2 S v.
    const Eigen::VectorXd f = (s * v) * std::sqrt(nd);
    out.eigenvalues.push_back(lambda);
    for (std::size_t k = 0; k < jj; ++k) out.member_coordinates[cols[k]][a] = g(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < n; ++i) out.fact_coordinates[i][a] = f(static_cast<Eigen::Index>(i));
  }
  return out;
}

std::vector<TestValue> test_values(const FactorialResult &result, const IndicatorMatrix &ind) {
  const double n = static_cast<double>(ind.rows());
  std::vector<TestValue> out;
  for (std::size_t j = 0; j < ind.columns(); ++j) {
    TestValue t{j, false, {}};
    const double nj = static_cast<double>(ind.frequency[j]);
    if (nj > 0 && nj < n) {
      t.testable = true;
      const double scale = std::sqrt(nj * (n - 1) / (n - nj));
      for (double g : result.member_coordinates[j]) t.values.push_back(g * scale);
    }
    out.push_back(std::move(t));
  }
  return out;
}

Cube arrange_cube(const Cube &cube, const IndicatorMatrix &ind, const std::vector<TestValue> &values) {
  Cube out = cube;
  for (const auto &v : ind.variables) {
    auto ai = out.axis_index(v.dim_id);
    if (!ai || out.axes[*ai].level_id != v.level_id || out.axes[*ai].synthetic) continue;
    std::unordered_map<std::string, const TestValue *> by_member;
    for (std::size_t k = 0; k < v.members.size(); ++k) {
      const std::size_t col = v.offset + k;
      for (const auto &t : values)
        if (t.column == col) by_member.emplace(v.members[k], &t);
    }
    auto axis_value = [&](const TestValue *t, std::size_t a) { return t && a < t->values.size() ? t->values[a] : 0.0; };
    std::vector<std::string> order = out.axes[*ai].members;
    std::sort(order.begin(), order.end(), [&](const std::string &x, const std::string &y) {
      auto fx = by_member.find(x), fy = by_member.find(y);
      const TestValue *tx = fx == by_member.end() || !fx->second->testable ? nullptr : fx->second;
      const TestValue *ty = fy == by_member.end() || !fy->second->testable ? nullptr : fy->second;
      if ((tx != nullptr) != (ty != nullptr)) return tx != nullptr;
      if (tx && ty) {
        if (axis_value(tx, 0) != axis_value(ty, 0)) return axis_value(tx, 0) > axis_value(ty, 0);
        if (axis_value(tx, 1) != axis_value(ty, 1)) return axis_value(tx, 1) > axis_value(ty, 1);
      }
      return x < y;
    });
    out = switch_members(out, v.dim_id, order);
  }
  return out;
}

HomogeneityScore homogeneity(const Cube &cube) {
  HomogeneityScore score;
  const std::size_t dims = cube.axes.size();
  std::vector<std::size_t> extent(dims);
  std::vector<std::unordered_map<std::string, std::size_t>> rank(dims);
  score.cell_count = 1;
  for (std::size_t a = 0; a < dims; ++a) {
    extent[a] = cube.axes[a].members.size();
    score.cell_count *= extent[a];
    for (std::size_t m = 0; m < extent[a]; ++m) rank[a].emplace(cube.axes[a].members[m], m);
  }
  if (dims == 0) score.cell_count = 0;

  // Full cells by grid position.
  std::map<std::vector<std::size_t>, double> full;
  for (const auto &[coord, v] : cube.cells) {
    if (v.count == 0) continue;
    std::vector<std::size_t> pos(dims);
    bool on_grid = true;
    for (std::size_t a = 0; a < dims; ++a) {
      auto it = rank[a].find(coord[a]);
      if (it == rank[a].end()) on_grid = false;
      else pos[a] = it->second;
    }
    if (on_grid) full.emplace(std::move(pos), v.value);
  }
  score.full_cell_count = full.size();
  if (full.empty()) return score;

  double lo = full.begin()->second, hi = lo;
  for (const auto &kv : full) {
    lo = std::min(lo, kv.second);
    hi = std::max(hi, kv.second);
  }
  const double range = hi - lo;
  double similarity = 0;
  std::size_t neighbors = 0;
  for (const auto &[pos, v] : full) {
    for (std::size_t a = 0; a < dims; ++a)
      for (int step : {-1, 1}) {
        if ((step < 0 && pos[a] == 0) || (step > 0 && pos[a] + 1 >= extent[a])) continue;
        std::vector<std::size_t> other = pos;
        other[a] = step < 0 ? pos[a] - 1 : pos[a] + 1;
        ++neighbors;
        auto it = full.find(other);
        if (it != full.end()) similarity += range > 0 ? 1.0 - std::abs(v - it->second) / range : 1.0;
      }
  }
  score.value = neighbors ? similarity / static_cast<double>(neighbors) : 0.0;
  return score;
}

} // namespace xdw
