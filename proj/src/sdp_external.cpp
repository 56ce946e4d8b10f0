#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rlcp/solver.hpp"

namespace rlcp {

ExternalSdpConfig ExternalSdpConfig::from_environment() {
  ExternalSdpConfig cfg;
  if (const char* cmd = std::getenv("RLCP_SDP_SOLVER")) cfg.command = cmd;
  if (const char* dir = std::getenv("RLCP_SDP_WORKDIR")) cfg.work_dir = dir;
  return cfg;
}

// Accepts either a bare whitespace-separated vector on the first
// non-comment line (CSDP/SDPA "yMat/xVec" style primal line) or a line
// starting with "xVec" followed by values.
Vector parse_sdpa_solution(const std::string& text, int nvars) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '*' || line[pos] == '"') continue;
    std::string payload = line;
    if (line.compare(pos, 4, "xVec") == 0)
      payload = line.substr(pos + 4);
    // strip brackets/commas that some solvers add
    for (char& ch : payload)
      if (ch == '{' || ch == '}' || ch == ',' || ch == '[' || ch == ']')
        ch = ' ';
    std::istringstream ls(payload);
    Vector v(nvars);
    int k = 0;
    double val;
    while (k < nvars && (ls >> val)) v[k++] = val;
    require(k == nvars, ErrorCode::ParseError,
            "sdp solution: expected " + std::to_string(nvars) +
                " primal values, found " + std::to_string(k));
    return v;
  }
  throw Error(ErrorCode::ParseError, "sdp solution: no data line found");
}

SolutionPoint sdp_roundtrip(const MathProgram& prog,
                            const ExternalSdpConfig& cfg) {
  SolutionPoint pt;
  if (!cfg.configured()) {
    pt.status = SolveStatus::Skipped;
    pt.info["reason_no_backend"] = 1.0;
    return pt;
  }
  const std::string in_path = cfg.work_dir + "/rlcp_sdp_in.dat-s";
  const std::string out_path = cfg.work_dir + "/rlcp_sdp_out.sol";
  {
    std::ofstream f(in_path);
    require(f.good(), ErrorCode::SolverFailure, "cannot write " + in_path);
    f << emit_sdpa(prog);
  }
  const std::string cmd = cfg.command + " " + in_path + " " + out_path +
                          " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  if (rc != 0) {
    pt.status = SolveStatus::Failed;
    pt.info["exit_code"] = rc;
    return pt;
  }
  std::ifstream f(out_path);
  require(f.good(), ErrorCode::SolverFailure,
          "external solver produced no solution file");
  std::stringstream buf;
  buf << f.rdbuf();
  Vector v = parse_sdpa_solution(buf.str(), prog.num_vars());

  // verify LMI feasibility before reporting optimal
  double viol = prog.max_violation(v);
  pt.v = v;
  pt.objective = prog.obj.value(v);
  pt.info["violation"] = viol;
  pt.status = (viol <= 1e-6 * std::max(1.0, v.cwiseAbs().maxCoeff()))
                  ? SolveStatus::Optimal
                  : SolveStatus::Failed;
  return pt;
}

}  // namespace rlcp
