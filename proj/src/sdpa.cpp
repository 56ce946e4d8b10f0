#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "rlcp/program_ir.hpp"

namespace rlcp {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Entry {
  int matno, blkno, i, j;  // 1-based per SDPA conventions
  double value;
};

}  // namespace

// SDPA sparse emitter for the linear + PSD fragment:
//   min c'v  s.t.  sum_j v_j F_j + F0 >= 0 per PSD block, linear rows and
//   nonnegative variables mapped into one diagonal block.
// File semantics (SDPA): min c'x s.t. sum_i x_i F_i - F0file >= 0, so
// F0file = -F0 blockwise.
std::string emit_sdpa(const MathProgram& prog) {
  require(prog.quad.empty() && prog.soc.empty(), ErrorCode::UnsupportedFeature,
          "emit_sdpa: quadratic/second-order-cone constraints are not "
          "representable in SDPA input");
  require(prog.obj.H.size() == 0, ErrorCode::UnsupportedFeature,
          "emit_sdpa: objective must be linear");
  const int m = prog.num_vars();
  require(m > 0, ErrorCode::InvalidArgument, "emit_sdpa: empty program");

  std::vector<int> block_sizes;
  std::vector<Entry> entries;

  int blk = 0;
  for (const auto& pc : prog.psd) {
    ++blk;
    const int N = int(pc.F0.rows());
    block_sizes.push_back(N);
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) {
        if (pc.F0(i, j) != 0.0)
          entries.push_back({0, blk, i + 1, j + 1, -pc.F0(i, j)});
      }
    for (size_t k = 0; k < pc.vars.size(); ++k)
      for (int i = 0; i < int(pc.F[k].rows()); ++i)
        for (int j = i; j < int(pc.F[k].cols()); ++j)
          if (pc.F[k](i, j) != 0.0)
            entries.push_back({pc.vars[k] + 1, blk, i + 1, j + 1, pc.F[k](i, j)});
  }

  // diagonal block: one slot per >= row (Le negated, Eq split), then one per
  // nonnegative variable
  struct Slot {
    Vector a;
    double b;
  };
  std::vector<Slot> slots;
  for (const auto& lc : prog.lin) {
    if (lc.rel == Rel::Ge || lc.rel == Rel::Eq) slots.push_back({lc.a, lc.b});
    if (lc.rel == Rel::Le || lc.rel == Rel::Eq) slots.push_back({-lc.a, -lc.b});
  }
  for (int i = 0; i < m; ++i)
    if (prog.var_nonneg[i]) {
      Vector a = Vector::Zero(m);
      a[i] = 1.0;
      slots.push_back({a, 0.0});
    }
  if (!slots.empty()) {
    ++blk;
    block_sizes.push_back(-int(slots.size()));
    for (size_t s = 0; s < slots.size(); ++s) {
      const int d = int(s) + 1;
      if (slots[s].b != 0.0) entries.push_back({0, blk, d, d, slots[s].b});
      for (int i = 0; i < m; ++i)
        if (slots[s].a[i] != 0.0)
          entries.push_back({i + 1, blk, d, d, slots[s].a[i]});
    }
  }

  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return std::tie(x.matno, x.blkno, x.i, x.j) <
           std::tie(y.matno, y.blkno, y.i, y.j);
  });

  std::ostringstream os;
  os << m << "\n" << block_sizes.size() << "\n";
  for (size_t k = 0; k < block_sizes.size(); ++k)
    os << (k ? " " : "") << block_sizes[k];
  os << "\n";
  Vector c = prog.obj.c.size() ? prog.obj.c : Vector::Zero(m);
  for (int i = 0; i < m; ++i) os << (i ? " " : "") << fmt(c[i]);
  os << "\n";
  for (const auto& e : entries)
    os << e.matno << " " << e.blkno << " " << e.i << " " << e.j << " "
       << fmt(e.value) << "\n";
  return os.str();
}

MathProgram parse_sdpa(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  auto next_data_line = [&]() -> std::string {
    while (std::getline(is, line)) {
      size_t pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos) continue;
      if (line[pos] == '*' || line[pos] == '"') continue;
      return line;
    }
    throw Error(ErrorCode::ParseError, "parse_sdpa: unexpected end of input");
  };

  int m = 0, nblocks = 0;
  {
    std::istringstream ls(next_data_line());
    require(bool(ls >> m) && m > 0, ErrorCode::ParseError,
            "parse_sdpa: bad variable count");
  }
  {
    std::istringstream ls(next_data_line());
    require(bool(ls >> nblocks) && nblocks > 0, ErrorCode::ParseError,
            "parse_sdpa: bad block count");
  }
  std::vector<int> sizes(nblocks);
  {
    std::istringstream ls(next_data_line());
    for (int k = 0; k < nblocks; ++k) {
      std::string tok;
      require(bool(ls >> tok), ErrorCode::ParseError,
              "parse_sdpa: missing block size");
      // tolerate parenthesized/comma forms
      std::string cleaned;
      for (char ch : tok)
        if (ch != '(' && ch != ')' && ch != ',' && ch != '{' && ch != '}')
          cleaned += ch;
      sizes[k] = std::stoi(cleaned);
      require(sizes[k] != 0, ErrorCode::ParseError, "parse_sdpa: zero block");
    }
  }

  MathProgram prog;
  for (int i = 0; i < m; ++i) prog.add_var("v" + std::to_string(i + 1), false);
  prog.obj.c = Vector::Zero(m);
  {
    std::istringstream ls(next_data_line());
    for (int i = 0; i < m; ++i) {
      double v;
      require(bool(ls >> v), ErrorCode::ParseError,
              "parse_sdpa: objective vector too short");
      prog.obj.c[i] = v;
    }
  }

  // accumulate blocks
  std::vector<Matrix> F0(nblocks);
  std::vector<std::vector<Matrix>> F(nblocks);
  for (int k = 0; k < nblocks; ++k) {
    const int N = std::abs(sizes[k]);
    F0[k] = Matrix::Zero(N, N);
    F[k].assign(m, Matrix::Zero(N, N));
  }
  while (std::getline(is, line)) {
    size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '*' || line[pos] == '"') continue;
    std::istringstream ls(line);
    int matno, blkno, i, j;
    double v;
    require(bool(ls >> matno >> blkno >> i >> j >> v), ErrorCode::ParseError,
            "parse_sdpa: malformed entry line: " + line);
    require(blkno >= 1 && blkno <= nblocks, ErrorCode::ParseError,
            "parse_sdpa: block index out of range");
    require(matno >= 0 && matno <= m, ErrorCode::ParseError,
            "parse_sdpa: matrix index out of range");
    const int N = std::abs(sizes[blkno - 1]);
    require(i >= 1 && j >= 1 && i <= N && j <= N, ErrorCode::ParseError,
            "parse_sdpa: entry indices out of range");
    Matrix& dst = (matno == 0) ? F0[blkno - 1] : F[blkno - 1][matno - 1];
    dst(i - 1, j - 1) = v;
    dst(j - 1, i - 1) = v;
  }

  for (int k = 0; k < nblocks; ++k) {
    if (sizes[k] > 0) {
      PsdConstraint pc;
      pc.F0 = -F0[k];
      for (int i = 0; i < m; ++i) {
        pc.vars.push_back(i);
        pc.F.push_back(F[k][i]);
      }
      prog.psd.push_back(std::move(pc));
    } else {
      const int N = -sizes[k];
      for (int d = 0; d < N; ++d) {
        Vector a(m);
        for (int i = 0; i < m; ++i) a[i] = F[k][i](d, d);
        prog.add_linear(a, Rel::Ge, F0[k](d, d));
      }
    }
  }
  return prog;
}

}  // namespace rlcp
