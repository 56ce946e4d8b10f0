#include "rlcp/bnb.hpp"

#include <Eigen/Eigenvalues>
#include <fstream>
#include <queue>

namespace rlcp {

EigenSplit eigen_split(const MathProgram& prog) {
  EigenSplit out;
  const int n = prog.num_vars();
  for (int c = 0; c < int(prog.quad.size()); ++c) {
    const Matrix& H = prog.quad[c].H;
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    Matrix Hp = Matrix::Zero(n, n);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    for (int k = 0; k < n; ++k) {
      double ev = es.eigenvalues()[k];
      if (ev > EigenSplit::kEigTol * scale)
        Hp += ev * es.eigenvectors().col(k) * es.eigenvectors().col(k).transpose();
      else if (ev < -EigenSplit::kEigTol * scale)
        out.terms.push_back({c, -ev, es.eigenvectors().col(k)});
    }
    out.Hplus.push_back(Hp);
  }
  return out;
}

std::optional<std::vector<std::pair<double, double>>> bound_box(
    const MathProgram& prog, const EigenSplit& split) {
  // linear relaxation over the variables that actually appear in a linear
  // row or carry a bound; free epigraph scalars would make the LP singular
  const int n0 = prog.num_vars();
  std::vector<int> to_red(n0, -1);
  std::vector<int> sel;
  for (int i = 0; i < n0; ++i) {
    bool used = prog.var_nonneg[i];
    for (const auto& lc : prog.lin)
      if (lc.a[i] != 0.0) {
        used = true;
        break;
      }
    for (const auto& t : split.terms)
      if (t.nu[i] != 0.0) used = true;
    if (used) {
      to_red[i] = int(sel.size());
      sel.push_back(i);
    }
  }
  MathProgram lp;
  for (int i : sel) lp.add_var(prog.var_names[i], prog.var_nonneg[i]);
  for (const auto& lc : prog.lin) {
    Vector a = Vector::Zero(int(sel.size()));
    for (int i = 0; i < n0; ++i)
      if (lc.a[i] != 0.0) a[to_red[i]] = lc.a[i];
    lp.add_linear(a, lc.rel, lc.b, lc.label);
  }
  std::vector<std::pair<double, double>> box;
  for (const auto& term : split.terms) {
    Vector c = Vector::Zero(int(sel.size()));
    for (int i = 0; i < n0; ++i)
      if (term.nu[i] != 0.0) c[to_red[i]] = std::sqrt(term.lambda) * term.nu[i];
    double lo = 0, hi = 0;
    for (int dir = 0; dir < 2; ++dir) {
      lp.obj.c = dir == 0 ? c : Vector(-c);
      SolverRequest rq(lp);
      SolutionPoint sp = solve_lp(rq);
      if (sp.status == SolveStatus::Infeasible) return std::nullopt;
      require(sp.status != SolveStatus::Unbounded, ErrorCode::Unbounded,
              "bound_box: split-variable LP is unbounded; add box bounds on x");
      require(sp.optimal(), ErrorCode::SolverFailure,
              "bound_box: LP solve failed");
      (dir == 0 ? lo : hi) = (dir == 0 ? sp.objective : -sp.objective);
    }
    box.push_back({lo, hi});
  }
  return box;
}

MathProgram relax(const MathProgram& prog, const EigenSplit& split,
                  const BnbNode& node) {
  MathProgram rel;
  rel.var_names = prog.var_names;
  rel.var_nonneg = prog.var_nonneg;
  rel.obj = prog.obj;
  rel.lin = prog.lin;
  rel.soc = prog.soc;
  const int n0 = prog.num_vars();
  const int T = int(split.terms.size());
  int y0 = rel.add_vars("y_split", T, false);
  const int total = rel.num_vars();
  // pad existing rows/objective
  for (auto& lc : rel.lin) {
    Vector a = Vector::Zero(total);
    a.head(n0) = lc.a;
    lc.a = a;
  }
  for (auto& sc : rel.soc) {
    Matrix A = Matrix::Zero(sc.A.rows(), total);
    A.leftCols(n0) = sc.A;
    sc.A = A;
    Vector c = Vector::Zero(total);
    c.head(n0) = sc.c;
    sc.c = c;
  }
  {
    Vector c = Vector::Zero(total);
    if (rel.obj.c.size()) c.head(n0) = rel.obj.c;
    rel.obj.c = c;
    if (rel.obj.H.size()) {
      Matrix H = Matrix::Zero(total, total);
      H.topLeftCorner(n0, n0) = rel.obj.H;
      rel.obj.H = H;
    }
  }
  // convexified quadratic constraints with secant terms
  for (int c = 0; c < int(prog.quad.size()); ++c) {
    const auto& qc = prog.quad[c];
    Matrix H = Matrix::Zero(total, total);
    H.topLeftCorner(n0, n0) = split.Hplus[c];
    Vector lin = Vector::Zero(total);
    lin.head(n0) = qc.c;
    double d = qc.d;
    for (int j = 0; j < T; ++j) {
      if (split.terms[j].quad_index != c) continue;
      const double l = node.lo[j], u = node.hi[j];
      // -y^2 <= -(y - l)(u + l) - l^2 = -(u + l) y + l u
      lin[y0 + j] += -(u + l);
      d -= l * u;
    }
    rel.add_quadratic(H, lin, d, qc.label + "-secant");
  }
  // coupling rows and bound rows for the split variables
  for (int j = 0; j < T; ++j) {
    Vector a = Vector::Zero(total);
    a[y0 + j] = 1.0;
    a.head(n0) -= std::sqrt(split.terms[j].lambda) * split.terms[j].nu;
    rel.add_linear(a, Rel::Eq, 0.0, "y-coupling");
    Vector ab = Vector::Zero(total);
    ab[y0 + j] = 1.0;
    rel.add_linear(ab, Rel::Ge, node.lo[j], "y-lo");
    rel.add_linear(ab, Rel::Le, node.hi[j], "y-hi");
  }
  return rel;
}

namespace {

struct HeapEntry {
  double lb;
  int order;
  size_t slot;
  bool operator>(const HeapEntry& o) const {
    return lb > o.lb || (lb == o.lb && order > o.order);
  }
};

}  // namespace

BnbResult bnb_solve(const MathProgram& prog_in, const ExactEvaluator& exact,
                    const BnbOptions& opts) {
  // epigraph-ize a quadratic objective so every nonconvexity sits in the
  // constraint list
  MathProgram prog = prog_in;
  if (prog.obj.H.size() && prog.obj.H.cwiseAbs().maxCoeff() > 0) {
    int t_obj = prog.add_var("t_obj", false);
    const int total = prog.num_vars();
    // pad the pre-existing rows first, then append the epigraph constraint
    for (auto& lc : prog.lin) {
      Vector a = Vector::Zero(total);
      a.head(total - 1) = lc.a;
      lc.a = a;
    }
    for (auto& sc : prog.soc) {
      Matrix A = Matrix::Zero(sc.A.rows(), total);
      A.leftCols(total - 1) = sc.A;
      sc.A = A;
      Vector cc = Vector::Zero(total);
      cc.head(total - 1) = sc.c;
      sc.c = cc;
    }
    for (auto& qc : prog.quad) {
      Matrix H2 = Matrix::Zero(total, total);
      H2.topLeftCorner(total - 1, total - 1) = qc.H;
      qc.H = H2;
      Vector cc = Vector::Zero(total);
      cc.head(total - 1) = qc.c;
      qc.c = cc;
    }
    Matrix H = Matrix::Zero(total, total);
    H.topLeftCorner(total - 1, total - 1) = prog.obj.H;
    Vector c = Vector::Zero(total);
    c.head(total - 1) = prog.obj.c;
    c[t_obj] = -1.0;
    prog.add_quadratic(H, c, 0.0, "obj-epigraph");
    prog.obj.H = Matrix();
    prog.obj.c = Vector::Zero(total);
    prog.obj.c[t_obj] = 1.0;
  }

  BnbResult out;
  out.incumbent.status = SolveStatus::Failed;
  EigenSplit split = eigen_split(prog);

  std::ofstream trace;
  if (!opts.trace_path.empty()) trace.open(opts.trace_path);
  auto log_node = [&](const BnbNode& nd, const char* action) {
    if (!trace.is_open()) return;
    trace << nd.id << " " << nd.parent << " [";
    for (size_t j = 0; j < nd.lo.size(); ++j)
      trace << (j ? "," : "") << nd.lo[j];
    trace << "] [";
    for (size_t j = 0; j < nd.hi.size(); ++j)
      trace << (j ? "," : "") << nd.hi[j];
    trace << "] " << nd.lb << " " << nd.ub << " " << action << "\n";
  };

  auto solve_node = [&](BnbNode& nd) -> bool {
    MathProgram rel = relax(prog, split, nd);
    SolverRequest rq(rel);
    rq.feas_tol = opts.feas_tol;
    SolutionPoint sp = solve_convex(rq);
    if (sp.status == SolveStatus::Infeasible) return false;
    require(sp.optimal() || sp.status == SolveStatus::IterationLimit,
            ErrorCode::SolverFailure, "bnb: node relaxation failed");
    double gap_slack = 0.0;
    if (auto it = sp.info.find("gap"); it != sp.info.end())
      gap_slack = std::max(it->second, 0.0);
    nd.lb = sp.objective - gap_slack - 1e-12 * (1.0 + std::abs(sp.objective));
    Vector v = sp.v.head(prog.num_vars());
    nd.ub = exact(v);
    if (!std::isfinite(nd.lb)) return false;
    if (nd.ub < out.stats.glb_ub) {
      out.stats.glb_ub = nd.ub;
      out.incumbent.v = v;
      out.incumbent.objective = nd.ub;
      out.incumbent.status = SolveStatus::Optimal;
    }
    return true;
  };

  if (split.terms.empty()) {
    // already convex: the root closes immediately with gap zero
    BnbNode root;
    root.id = 1;
    if (solve_node(root)) {
      out.stats.glb_lb = root.lb;
      // convex case: relaxation value is exact
      out.stats.glb_ub = std::min(out.stats.glb_ub, root.lb);
      out.incumbent.objective = out.stats.glb_ub;
      out.stats.converged = true;
    }
    out.stats.nodes_solved = 1;
    log_node(root, "root-convex");
    return out;
  }

  auto box = bound_box(prog, split);
  if (!box) {
    out.incumbent.status = SolveStatus::Infeasible;
    return out;
  }

  std::vector<BnbNode> store;
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> heap;
  int next_id = 1, order = 0;

  BnbNode root;
  root.id = next_id++;
  for (auto& [lo, hi] : *box) {
    root.lo.push_back(lo);
    root.hi.push_back(hi);
  }
  if (!solve_node(root)) {
    out.incumbent.status = SolveStatus::Infeasible;
    return out;
  }
  out.stats.nodes_solved = 1;
  out.stats.glb_lb = root.lb;
  log_node(root, "root");
  store.push_back(root);
  heap.push({root.lb, order++, 0});

  double prev_lb = -std::numeric_limits<double>::infinity();
  while (!heap.empty() && out.stats.nodes_solved < opts.node_cap) {
    HeapEntry top = heap.top();
    // smallest lower bound in the list is the global lower bound
    out.stats.glb_lb = top.lb;
    if (out.stats.glb_lb < prev_lb - 1e-9) out.stats.lb_monotone = false;
    prev_lb = std::max(prev_lb, out.stats.glb_lb);
    if (out.stats.glb_ub - out.stats.glb_lb < opts.eps) {
      out.stats.converged = true;
      break;
    }
    heap.pop();
    BnbNode parent = store[top.slot];
    if (parent.lb >= out.stats.glb_ub - opts.eps) {
      // prune: cannot improve the incumbent
      if (parent.lb < out.stats.glb_ub - opts.eps - 1e-9)
        out.stats.pruning_sound = false;
      log_node(parent, "prune");
      continue;
    }
    // branch on the widest coordinate, ties by lowest index
    int jbar = 0;
    double wbar = -1;
    for (size_t j = 0; j < parent.lo.size(); ++j) {
      double w = parent.hi[j] - parent.lo[j];
      if (w > wbar + 1e-15) {
        wbar = w;
        jbar = int(j);
      }
    }
    double phi = 0.5 * (parent.lo[jbar] + parent.hi[jbar]);
    for (int side = 0; side < 2; ++side) {
      BnbNode child = parent;
      child.id = next_id++;
      child.parent = parent.id;
      (side == 0 ? child.hi[jbar] : child.lo[jbar]) = phi;
      if (!solve_node(child)) {
        log_node(child, "infeasible");
        ++out.stats.nodes_solved;
        continue;
      }
      ++out.stats.nodes_solved;
      if (child.lb < out.stats.glb_ub) {
        log_node(child, "branch");
        store.push_back(child);
        heap.push({child.lb, order++, store.size() - 1});
      } else {
        log_node(child, "bound-prune");
      }
    }
  }
  if (!heap.empty() && !out.stats.converged) {
    out.stats.glb_lb = heap.top().lb;
    if (out.stats.glb_ub - out.stats.glb_lb < opts.eps)
      out.stats.converged = true;
  } else if (heap.empty()) {
    // list exhausted: every node was pruned against the incumbent
    out.stats.glb_lb = out.stats.glb_ub;
    out.stats.converged = true;
  }
  return out;
}

BnbResult bnb_solve(const UncertainLCP& problem, const RcArtifact& art,
                    const BnbOptions& opts) {
  const int x0 = art.x_index, n = art.n;
  ExactEvaluator exact = [&problem, x0, n](const Vector& v) {
    Vector x = v.segment(x0, n).cwiseMax(0.0);
    return robust_worst_gap(problem, x).as_double();
  };
  return bnb_solve(art.program, exact, opts);
}

}  // namespace rlcp
