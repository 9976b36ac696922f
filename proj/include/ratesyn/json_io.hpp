#pragma once

#include <string>

#include "ratesyn/analysis.hpp"
#include "ratesyn/lmi.hpp"

namespace ratesyn {
namespace io {

std::string matrix_to_json(const Matrix& m);

std::string statespace_to_json(const StateSpace& g);
StateSpace statespace_from_json(const std::string& text);

/// {"rho": r, "class": "repeated"|"full", "blocks": [...]} with blocks
/// listed oldest tap first (Lambda_ell, ..., Lambda_1, Lambda_0).
std::string multiplier_to_json(const ZamesFalbParams& params);
ZamesFalbParams multiplier_from_json(const std::string& text);

std::string algorithm_to_json(const AlgorithmRealization& alg);
AlgorithmRealization algorithm_from_json(const std::string& text);

std::string certificate_to_json(const RateCertificate& cert);
RateCertificate certificate_from_json(const std::string& text);

/// Self-describing dump of an assembled problem (variables, blocks, senses)
/// for external-solver cross-checks.
std::string lmi_problem_to_json(const lmi::LmiProblem& problem, const Config& cfg = {});

}  // namespace io
}  // namespace ratesyn
