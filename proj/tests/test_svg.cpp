// Copyright 2026 The mcflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>

#include "doctest.h"
#include "mcflow/svg.hpp"
#include "support.hpp"

using namespace mcflow;

namespace {

bool comments_clean(const std::string& doc) {
  std::size_t pos = 0;
  while ((pos = doc.find("<!--", pos)) != std::string::npos) {
    const std::size_t end = doc.find("-->", pos + 4);
    if (end == std::string::npos) return false;
    if (doc.substr(pos + 4, end - pos - 4).find("--") != std::string::npos) return false;
    pos = end + 3;
  }
  return true;
}

}  // namespace

TEST_CASE("line charts embed their data") {
  svg::Series s{"a--b", {0.0, 1.0, 2.0}, {1.0, 10.0, 100.0}};
  svg::ChartOptions o;
  o.title = "x < y";
  o.log_y = true;
  const std::string doc = svg::line_chart({s}, o);
  CHECK(doc.rfind("<svg", 0) == 0);
  CHECK(doc.find("<!-- data: series,x,y") != std::string::npos);
  CHECK(doc.find(",2,100\n") != std::string::npos);
  CHECK(doc.find("x &lt; y") != std::string::npos);
  CHECK(comments_clean(doc));
  CHECK_THROWS(svg::line_chart({svg::Series{"bad", {0.0}, {}}}, o));
}

TEST_CASE("silhouettes of a mesh run") {
  const auto& t = testing::short_sphere();
  const std::string doc = svg::silhouettes(t, {0, t.snapshots.size() - 1}, "sphere");
  CHECK(doc.find("<!-- data: snapshot,time") != std::string::npos);
  CHECK(doc.find("<path") != std::string::npos);
  CHECK(comments_clean(doc));
  CHECK_THROWS(svg::silhouettes(t, {t.snapshots.size()}, "x"));
}
