// SPDX-License-Identifier: Apache-2.0
#include "awm/error.hpp"

namespace awm {

const char* errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::argument: return "argument";
    case Errc::parameter: return "parameter";
    case Errc::domain: return "domain";
    case Errc::extrapolation: return "extrapolation";
    case Errc::integrability: return "integrability";
    case Errc::undefined_regime: return "undefined-regime";
    case Errc::infeasible: return "infeasible-parameters";
    case Errc::step_size: return "step-size";
    case Errc::discretization: return "discretization";
    case Errc::range: return "range";
    case Errc::parse: return "parse";
    case Errc::record: return "record";
    case Errc::no_crossover: return "no-crossover";
    case Errc::fit_failed: return "fit";
    case Errc::io: return "io";
  }
  return "unknown";
}

void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace awm
