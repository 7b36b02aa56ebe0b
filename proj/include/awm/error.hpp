// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace awm {

enum class Errc {
  argument,
  parameter,
  domain,
  extrapolation,
  integrability,
  undefined_regime,
  infeasible,
  step_size,
  discretization,
  range,
  parse,
  record,
  no_crossover,
  fit_failed,
  io,
};

const char* errc_name(Errc c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& msg);

inline void require(bool ok, Errc code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace awm
