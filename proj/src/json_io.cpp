#include "rlcp/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rlcp {

namespace {

using nlohmann::json;

double num(const json& j, const std::string& where) {
  require(j.is_number(), ErrorCode::ParseError,
          "ulcp-v1: expected a number at " + where);
  double v = j.get<double>();
  require(std::isfinite(v), ErrorCode::ParseError,
          "ulcp-v1: non-finite entry at " + where);
  return v;
}

Vector vec(const json& j, const std::string& where) {
  require(j.is_array(), ErrorCode::ParseError,
          "ulcp-v1: expected an array at " + where);
  Vector v(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    v[int(i)] = num(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

Matrix mat(const json& j, const std::string& where) {
  require(j.is_array() && !j.empty(), ErrorCode::ParseError,
          "ulcp-v1: expected a row-major matrix at " + where);
  const int rows = int(j.size());
  Matrix m;
  for (int r = 0; r < rows; ++r) {
    Vector row = vec(j[r], where + "[" + std::to_string(r) + "]");
    if (r == 0) m = Matrix(rows, row.size());
    require(row.size() == m.cols(), ErrorCode::ParseError,
            "ulcp-v1: ragged matrix at " + where);
    m.row(r) = row;
  }
  return m;
}

json jvec(const Vector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json jmat(const Matrix& m) {
  json a = json::array();
  for (int r = 0; r < m.rows(); ++r) a.push_back(jvec(m.row(r).transpose()));
  return a;
}

UncertaintySet parse_set(const json& ju, int L) {
  require(ju.is_object() && ju.contains("kind"), ErrorCode::ParseError,
          "ulcp-v1: uncertainty must be {kind, params}");
  std::string kind = ju.at("kind").get<std::string>();
  const json params = ju.value("params", json::object());
  if (kind == "box_inf") return UncertaintySet::box_inf(L);
  if (kind == "ball_one") return UncertaintySet::ball_one(L);
  if (kind == "ball_two") return UncertaintySet::ball_two(L);
  if (kind == "box_inf_nonneg") return UncertaintySet::box_inf_nonneg(L);
  if (kind == "ball_one_nonneg") return UncertaintySet::ball_one_nonneg(L);
  if (kind == "finite") {
    std::vector<Vector> us;
    for (const auto& row : params.at("scenarios"))
      us.push_back(vec(row, "scenarios"));
    return UncertaintySet::finite(us);
  }
  if (kind == "conic") {
    ConicSet cs;
    cs.P = mat(params.at("P"), "P");
    cs.p = vec(params.at("p"), "p");
    if (params.contains("Q") && !params.at("Q").empty())
      cs.Q = mat(params.at("Q"), "Q");
    else
      cs.Q = Matrix::Zero(cs.P.rows(), 0);
    const json cone = params.at("cone");
    cs.K.nonneg = cone.value("nonneg", 0);
    if (cone.contains("soc"))
      for (const auto& d : cone.at("soc")) cs.K.soc.push_back(d.get<int>());
    return UncertaintySet::conic_set(std::move(cs));
  }
  if (kind == "cholesky") {
    CholeskySet cs;
    for (const auto& A : params.at("A")) cs.A.push_back(mat(A, "A"));
    for (const auto& q : params.at("q")) cs.q.push_back(vec(q, "q"));
    return UncertaintySet::cholesky_ua(std::move(cs));
  }
  throw Error(ErrorCode::ParseError, "ulcp-v1: unknown uncertainty kind " + kind);
}

}  // namespace

UncertainLCP read_ulcp_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("ulcp-v1: ") + e.what());
  }
  require(j.value("schema", "ulcp-v1") == "ulcp-v1", ErrorCode::ParseError,
          "unsupported schema (want ulcp-v1)");
  const int n = j.at("n").get<int>();
  const int L = j.at("L").get<int>();
  require(n >= 1 && L >= 0, ErrorCode::ParseError, "ulcp-v1: bad dimensions");
  AffineFamily fam;
  fam.M0 = mat(j.at("M0"), "M0");
  fam.q0 = vec(j.at("q0"), "q0");
  require(fam.M0.rows() == n && fam.M0.cols() == n && fam.q0.size() == n,
          ErrorCode::ParseError, "ulcp-v1: M0/q0 dimension mismatch");
  if (j.contains("shifts"))
    for (const auto& sh : j.at("shifts")) {
      fam.Ms.push_back(mat(sh.at("M"), "shifts.M"));
      fam.qs.push_back(vec(sh.at("q"), "shifts.q"));
    }
  require(int(fam.Ms.size()) == L, ErrorCode::ParseError,
          "ulcp-v1: L disagrees with the shift list");
  UncertaintySet set = parse_set(j.at("uncertainty"), L);
  std::optional<QExtra> extra;
  if (j.contains("q_extra")) {
    QExtra qe;
    for (const auto& sh : j.at("q_extra").at("shifts"))
      qe.qs.push_back(vec(sh, "q_extra.shifts"));
    qe.set = parse_set(j.at("q_extra").at("uncertainty"), int(qe.qs.size()));
    extra = std::move(qe);
  }
  return UncertainLCP::make(std::move(fam), std::move(set), std::move(extra));
}

UncertainLCP load_ulcp_file(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), ErrorCode::ParseError, "cannot open " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return read_ulcp_json(buf.str());
}

std::string write_ulcp_json(const UncertainLCP& p) {
  json j;
  j["schema"] = "ulcp-v1";
  j["n"] = p.n();
  j["L"] = p.family.L();
  j["M0"] = jmat(p.family.M0);
  j["q0"] = jvec(p.family.q0);
  j["shifts"] = json::array();
  for (int l = 0; l < p.family.L(); ++l)
    j["shifts"].push_back({{"M", jmat(p.family.Ms[l])},
                           {"q", jvec(p.family.qs[l])}});
  json ju;
  ju["kind"] = set_kind_name(p.set.kind);
  json params = json::object();
  switch (p.set.kind) {
    case SetKind::FiniteScenarios: {
      json sc = json::array();
      for (const auto& u : p.set.scenarios) sc.push_back(jvec(u));
      params["scenarios"] = sc;
      break;
    }
    case SetKind::Conic: {
      const auto& cs = *p.set.conic;
      params["P"] = jmat(cs.P);
      params["Q"] = jmat(cs.Q);
      params["p"] = jvec(cs.p);
      params["cone"] = {{"nonneg", cs.K.nonneg}, {"soc", cs.K.soc}};
      break;
    }
    case SetKind::CholeskyUA: {
      const auto& cs = *p.set.cholesky;
      json As = json::array(), qs = json::array();
      for (const auto& A : cs.A) As.push_back(jmat(A));
      for (const auto& q : cs.q) qs.push_back(jvec(q));
      params["A"] = As;
      params["q"] = qs;
      break;
    }
    default:
      break;
  }
  ju["params"] = params;
  j["uncertainty"] = ju;
  if (p.q_extra) {
    json qe;
    json sh = json::array();
    for (const auto& q : p.q_extra->qs) sh.push_back(jvec(q));
    qe["shifts"] = sh;
    json ju2;
    ju2["kind"] = set_kind_name(p.q_extra->set.kind);
    ju2["params"] = json::object();
    qe["uncertainty"] = ju2;
    j["q_extra"] = qe;
  }
  return j.dump(2);
}

Vector read_point_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("point: ") + e.what());
  }
  if (j.is_array()) return vec(j, "point");
  require(j.contains("x"), ErrorCode::ParseError, "point file needs an 'x' array");
  return vec(j.at("x"), "x");
}

Vector load_point_file(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), ErrorCode::ParseError, "cannot open " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return read_point_json(buf.str());
}

}  // namespace rlcp
