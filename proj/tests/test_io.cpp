/*
 * Copyright 2026 The hsbm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <sstream>

#include "hsbm/hsbm.hpp"
#include "test_util.hpp"

using namespace hsbm;

TEST(HypergraphFormat, RoundTrip) {
  const auto z = sample_membership(60, CommunityPrior::uniform(2), 1);
  const auto q = scale_to_probabilities(testutil::symmetric_tensors(2, {{2, {6, 1}}, {4, {3, 1}}}), 60);
  const auto h = sample_hypergraph(60, z, q, 2);
  std::stringstream buf;
  write_hypergraph(buf, h);
  EXPECT_EQ(read_hypergraph(buf), h);
}

TEST(HypergraphFormat, OneBasedIdsAndComments) {
  std::istringstream in("# demo\nn=4 orders=2,3\n2 1 2\n\n3 2 3 4\n");
  const auto h = read_hypergraph(in);
  EXPECT_EQ(h.vertex_count(), 4u);
  ASSERT_EQ(h.edge_count(2), 1u);
  EXPECT_EQ(h.edge(2, 0)[0], 0u);
  EXPECT_EQ(h.edge(3, 0)[2], 3u);
}

TEST(HypergraphFormat, Errors) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_hypergraph(in);
  };
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("orders=2\n"), ParseError);
  EXPECT_THROW(parse("n=3 orders=2\n2 2 1\n"), ParseError);
  EXPECT_THROW(parse("n=3 orders=2\n2 1 4\n"), ParseError);
  EXPECT_THROW(parse("n=3 orders=2\n2 1\n"), ParseError);
  EXPECT_THROW(parse("n=3 orders=2\n3 1 2 3\n"), ParseError);
  EXPECT_THROW(parse("n=3 orders=2\n2 1 2\n2 1 2\n"), ParseError);
  EXPECT_THROW(parse("n=3 orders=2\n2 1 x\n"), ParseError);
  try {
    parse("n=3 orders=2\n2 1 2\n2 3 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(MembershipFormat, RoundTrip) {
  const MembershipVector z({0, 2, 1, 1, 0}, 3);
  std::stringstream buf;
  write_membership(buf, z);
  EXPECT_EQ(buf.str(), "1\n3\n2\n2\n1\n");
  EXPECT_EQ(read_membership(buf), z);
}

TEST(MembershipFormat, Errors) {
  std::istringstream zero("1\n0\n");
  EXPECT_THROW(read_membership(zero), ParseError);
  std::istringstream big("1\n3\n");
  EXPECT_THROW(read_membership(big, 2), ParseError);
  std::istringstream bad("1\nq\n");
  EXPECT_THROW(read_membership(bad), ParseError);
}
