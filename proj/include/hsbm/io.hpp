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

#pragma once

/*
 * Text formats.
 *
 * Hypergraph file:
 *
 *   n=<n> orders=<m1,m2,...>
 *   <m> v1 v2 ... vm        (one edge per line, strictly increasing 1-based ids)
 *
 * Membership file: one 1-based label per line.
 */

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsbm/model.hpp"

namespace hsbm {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline void write_hypergraph(std::ostream& os, const NonUniformHypergraph& h) {
  os << "n=" << h.vertex_count() << " orders=";
  const auto orders = h.orders();
  for (std::size_t i = 0; i < orders.size(); ++i) os << (i ? "," : "") << orders[i];
  os << '\n';
  h.for_each_edge([&](int m, std::span<const Vertex> e) {
    os << m;
    for (Vertex v : e) os << ' ' << (v + 1);
    os << '\n';
  });
}

inline NonUniformHypergraph read_hypergraph(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  auto next_content_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++lineno;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next_content_line()) throw ParseError("missing header", lineno);

  std::size_t n = 0;
  bool have_n = false;
  std::vector<int> orders;
  {
    std::istringstream header(line);
    std::string token;
    while (header >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) throw ParseError("malformed header token '" + token + "'", lineno);
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      try {
        if (key == "n") {
          n = std::stoul(value);
          have_n = true;
        } else if (key == "orders") {
          std::istringstream list(value);
          std::string item;
          while (std::getline(list, item, ',')) {
            if (!item.empty()) orders.push_back(std::stoi(item));
          }
        } else {
          throw ParseError("unknown header key '" + key + "'", lineno);
        }
      } catch (const std::logic_error&) {
        throw ParseError("bad header value '" + value + "'", lineno);
      }
    }
  }
  if (!have_n) throw ParseError("header lacks n=", lineno);

  NonUniformHypergraph h(n, orders);
  while (next_content_line()) {
    std::istringstream row(line);
    long long m = 0;
    if (!(row >> m) || m < 2) throw ParseError("bad edge order", lineno);
    if (std::find(orders.begin(), orders.end(), m) == orders.end()) {
      throw ParseError("edge order " + std::to_string(m) + " not declared in header", lineno);
    }
    std::vector<Vertex> edge;
    long long id = 0;
    while (row >> id) {
      if (id < 1 || static_cast<std::size_t>(id) > n) throw ParseError("vertex id out of range", lineno);
      if (!edge.empty() && static_cast<Vertex>(id - 1) <= edge.back()) {
        throw ParseError("vertex ids must be strictly increasing", lineno);
      }
      edge.push_back(static_cast<Vertex>(id - 1));
    }
    if (!row.eof()) throw ParseError("non-numeric vertex id", lineno);
    if (static_cast<long long>(edge.size()) != m) {
      throw ParseError("edge has " + std::to_string(edge.size()) + " vertices, expected " +
                           std::to_string(m),
                       lineno);
    }
    h.add_edge(std::move(edge));
  }
  try {
    h.canonicalize();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), lineno);
  }
  return h;
}

inline void write_membership(std::ostream& os, const MembershipVector& z) {
  for (int l : z.labels()) os << (l + 1) << '\n';
}

// Reads labels; K is the largest label unless `communities` is given.
inline MembershipVector read_membership(std::istream& is, int communities = 0) {
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  int max_label = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    int label = 0;
    try {
      label = std::stoi(line);
    } catch (const std::logic_error&) {
      throw ParseError("bad label", lineno);
    }
    if (label < 1) throw ParseError("labels are 1-based", lineno);
    max_label = std::max(max_label, label);
    labels.push_back(label - 1);
  }
  const int K = communities > 0 ? communities : std::max(max_label, 1);
  if (max_label > K) throw ParseError("label exceeds community count", lineno);
  return MembershipVector(std::move(labels), K);
}

inline NonUniformHypergraph load_hypergraph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_hypergraph(in);
}

inline MembershipVector load_membership(const std::string& path, int communities = 0) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_membership(in, communities);
}

}  // namespace hsbm
