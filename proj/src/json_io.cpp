#include "ratesyn/json_io.hpp"

#include <json.hpp>
#include <stdexcept>

namespace ratesyn {
namespace io {

using nlohmann::json;

namespace {

json matrix_to_value(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_value(const json& v) {
  if (!v.is_array()) throw std::invalid_argument("json: expected a matrix (array of rows)");
  const int rows = static_cast<int>(v.size());
  if (rows == 0) return Matrix::Zero(0, 0);
  const int cols = static_cast<int>(v[0].size());
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(v[i].size()) != cols)
      throw std::invalid_argument("json: ragged matrix rows");
    for (int j = 0; j < cols; ++j) m(i, j) = v[i][j].get<double>();
  }
  return m;
}

}  // namespace

std::string matrix_to_json(const Matrix& m) { return matrix_to_value(m).dump(); }

std::string statespace_to_json(const StateSpace& g) {
  json j;
  j["a"] = matrix_to_value(g.a);
  j["b"] = matrix_to_value(g.b);
  j["c"] = matrix_to_value(g.c);
  j["d"] = matrix_to_value(g.d);
  return j.dump();
}

StateSpace statespace_from_json(const std::string& text) {
  json j = json::parse(text);
  Matrix a = matrix_from_value(j.at("a"));
  Matrix b = matrix_from_value(j.at("b"));
  Matrix c = matrix_from_value(j.at("c"));
  Matrix d = matrix_from_value(j.at("d"));
  // Allow omitted dimensions for empty-state systems.
  if (a.size() == 0 && b.size() == 0 && c.size() == 0) {
    return StateSpace::gain(d);
  }
  if (b.size() == 0) b = Matrix::Zero(a.rows(), d.cols());
  if (c.size() == 0) c = Matrix::Zero(d.rows(), a.cols());
  return StateSpace(a, b, c, d);
}

std::string multiplier_to_json(const ZamesFalbParams& params) {
  json j;
  j["rho"] = params.rho;
  j["class"] = params.class_tag == MultiplierClass::Repeated ? "repeated" : "full";
  json blocks = json::array();
  for (int i = params.length(); i >= 0; --i) blocks.push_back(matrix_to_value(params.blocks[i]));
  j["blocks"] = blocks;
  return j.dump();
}

ZamesFalbParams multiplier_from_json(const std::string& text) {
  json j = json::parse(text);
  ZamesFalbParams p;
  p.rho = j.at("rho").get<double>();
  const std::string cls = j.at("class").get<std::string>();
  if (cls == "repeated")
    p.class_tag = MultiplierClass::Repeated;
  else if (cls == "full")
    p.class_tag = MultiplierClass::Full;
  else
    throw std::invalid_argument("multiplier json: unknown class " + cls);
  const auto& blocks = j.at("blocks");
  const int ell = static_cast<int>(blocks.size()) - 1;
  if (ell < 0) throw std::invalid_argument("multiplier json: empty block list");
  p.blocks.resize(ell + 1);
  for (int k = 0; k < static_cast<int>(blocks.size()); ++k)
    p.blocks[ell - k] = matrix_from_value(blocks[k]);
  p.block_dim = static_cast<int>(p.blocks[0].rows());
  return p;
}

std::string algorithm_to_json(const AlgorithmRealization& alg) {
  json j;
  j["d"] = alg.d;
  j["ac"] = matrix_to_value(alg.ac);
  j["bc"] = matrix_to_value(alg.bc);
  j["cc"] = matrix_to_value(alg.cc);
  j["dc"] = matrix_to_value(alg.dc);
  j["a"] = matrix_to_value(alg.a);
  j["b"] = matrix_to_value(alg.b);
  j["c"] = matrix_to_value(alg.c);
  return j.dump();
}

AlgorithmRealization algorithm_from_json(const std::string& text) {
  json j = json::parse(text);
  const int d = j.at("d").get<int>();
  AlgorithmRealization alg;
  alg.d = d;
  alg.ac = matrix_from_value(j.at("ac"));
  alg.bc = matrix_from_value(j.at("bc"));
  alg.cc = matrix_from_value(j.at("cc"));
  alg.dc = matrix_from_value(j.at("dc"));
  if (j.contains("a")) {
    alg.a = matrix_from_value(j.at("a"));
    alg.b = matrix_from_value(j.at("b"));
    alg.c = matrix_from_value(j.at("c"));
    if (alg.bc.size() == 0) alg.bc = Matrix::Zero(alg.ac.rows(), d);
    if (alg.cc.size() == 0) alg.cc = Matrix::Zero(d, alg.ac.rows());
  } else {
    AlgorithmRealization assembled =
        AlgorithmRealization::from_factor(alg.ac, alg.bc, alg.cc, alg.dc, d);
    alg = assembled;
  }
  return alg;
}

std::string certificate_to_json(const RateCertificate& cert) {
  json j;
  j["rho"] = cert.rho;
  j["ell"] = cert.ell;
  j["class"] = cert.class_tag == MultiplierClass::Repeated ? "repeated" : "full";
  j["lambda"] = json::parse(multiplier_to_json(cert.lambda));
  j["margin"] = cert.margin;
  switch (cert.method) {
    case CertifyMethod::AnalysisLmi: j["method"] = "analysis_lmi"; break;
    case CertifyMethod::Pick: j["method"] = "pick"; break;
    case CertifyMethod::ClosedForm: j["method"] = "closed_form"; break;
  }
  return j.dump();
}

RateCertificate certificate_from_json(const std::string& text) {
  json j = json::parse(text);
  RateCertificate cert;
  cert.rho = j.at("rho").get<double>();
  cert.ell = j.at("ell").get<int>();
  cert.class_tag = j.at("class").get<std::string>() == "full" ? MultiplierClass::Full
                                                              : MultiplierClass::Repeated;
  cert.lambda = multiplier_from_json(j.at("lambda").dump());
  cert.margin = j.at("margin").get<double>();
  const std::string method = j.value("method", "analysis_lmi");
  cert.method = method == "pick" ? CertifyMethod::Pick
              : method == "closed_form" ? CertifyMethod::ClosedForm
                                        : CertifyMethod::AnalysisLmi;
  return cert;
}

std::string lmi_problem_to_json(const lmi::LmiProblem& problem, const Config& cfg) {
  ConeProblem cone = problem.assemble(cfg);
  json j;
  json vars = json::array();
  for (const auto& v : problem.vars) {
    json jv;
    jv["name"] = v.name;
    switch (v.kind) {
      case lmi::VarKind::Symmetric:
        jv["kind"] = "symmetric";
        jv["n"] = v.n;
        break;
      case lmi::VarKind::General:
        jv["kind"] = "general";
        jv["rows"] = v.rows;
        jv["cols"] = v.cols;
        break;
      case lmi::VarKind::ZamesFalb:
        jv["kind"] = "zames_falb";
        jv["ell"] = v.zf.ell;
        jv["d"] = v.zf.d;
        jv["rho"] = v.zf.rho;
        jv["class"] = v.zf.class_tag == MultiplierClass::Repeated ? "repeated" : "full";
        break;
    }
    jv["coords"] = v.dim();
    vars.push_back(jv);
  }
  j["variables"] = vars;
  j["num_scalars"] = cone.num_vars;
  j["objective"] = problem.objective == lmi::ObjectiveKind::FeasibilityMargin
                       ? "maximize_margin"
                       : (problem.objective == lmi::ObjectiveKind::Maximize ? "maximize"
                                                                            : "minimize");

  json blocks = json::array();
  for (size_t i = 0; i < cone.psd.size(); ++i) {
    json jb;
    jb["label"] = problem.constraints[i].label;
    jb["sense"] = problem.constraints[i].sense == lmi::Sense::PositiveDefinite ? ">0" : "<0";
    jb["f0"] = matrix_to_value(cone.psd[i].f0);
    json fk = json::array();
    for (const auto& f : cone.psd[i].fk) fk.push_back(matrix_to_value(f));
    jb["fk"] = fk;
    blocks.push_back(jb);
  }
  j["psd_blocks"] = blocks;
  j["lp_const"] = matrix_to_value(cone.lp_const);
  j["lp_coeffs"] = matrix_to_value(cone.lp_coeffs);
  return j.dump();
}

}  // namespace io
}  // namespace ratesyn
