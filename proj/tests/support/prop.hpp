// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <sstream>
#include <string>

#include "awm/rng.hpp"

namespace prop {

struct Outcome {
  int cases = 0;
  int failures = 0;
  std::uint64_t first_failing_seed = 0;
  std::string first_message;
};

/// Runs `check` on `cases` inputs drawn by `gen`. Each case gets its own seed
/// derived from `seed`, so a failure can be replayed alone. `check` returns an
/// empty string on success.
template <class Gen, class Check>
Outcome forall(int cases, std::uint64_t seed, Gen gen, Check check) {
  Outcome o;
  awm::Rng master(seed);
  for (int k = 0; k < cases; ++k) {
    std::uint64_t s = master.next();
    awm::Rng rng(s);
    auto input = gen(rng);
    std::string msg = check(input);
    ++o.cases;
    if (!msg.empty()) {
      if (o.failures == 0) {
        o.first_failing_seed = s;
        o.first_message = msg;
      }
      ++o.failures;
    }
  }
  return o;
}

inline std::string describe(const Outcome& o) {
  std::ostringstream os;
  os << o.failures << "/" << o.cases << " failed";
  if (o.failures) os << "; first (case seed " << o.first_failing_seed << "): " << o.first_message;
  return os.str();
}

inline double uniform(awm::Rng& r, double lo, double hi) { return lo + (hi - lo) * r.uniform(); }

}  // namespace prop
