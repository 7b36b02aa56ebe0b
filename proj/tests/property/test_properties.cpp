// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "properties.hpp"

TEST_CASE("property suites") {
  for (const auto& p : props::all()) {
    auto o = p.run();
    INFO(p.name << ": " << prop::describe(o));
    CHECK(o.cases >= 1000);
    CHECK(o.failures == 0);
  }
}
