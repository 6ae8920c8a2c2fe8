// Copyright 2026 The unilink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// Dataset ingestion, canonical on-disk form, splitting and Table-style
// statistics.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "unilink/evaluation.hpp"
#include "unilink/graph_core.hpp"

namespace unilink {

enum class EdgeFormat { kAuto, kPairs, kAdjacency };

inline EdgeFormat parse_edge_format(const std::string& s) {
  if (s == "auto") return EdgeFormat::kAuto;
  if (s == "pairs") return EdgeFormat::kPairs;
  if (s == "adjacency") return EdgeFormat::kAdjacency;
  throw Error(ErrorKind::kParse, "unknown edge format '" + s + "'");
}

// Bipartite user/item graph plus the original ids (index = internal id).
struct Dataset {
  std::string name;
  Graph graph;
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;

  Index num_users() const { return static_cast<Index>(user_ids.size()); }
  Index num_items() const { return static_cast<Index>(item_ids.size()); }
};

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == '\t' || ch == ',' || ch == ' ' || ch == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline bool looks_like_header(const std::vector<std::string>& tokens) {
  bool named = false;
  for (const auto& t : tokens) {
    if (std::any_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); })) return false;
    std::string lower(t);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower.find("user") != std::string::npos || lower.find("item") != std::string::npos ||
        lower == "src" || lower == "dst" || lower == "source" || lower == "target") {
      named = true;
    }
  }
  return named;
}

inline bool parse_integer(const std::string& s, long long& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Ids that are all integers sort numerically, otherwise lexicographically.
inline std::vector<std::string> sorted_ids(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  bool numeric = true;
  long long tmp = 0;
  for (const auto& s : ids) numeric = numeric && parse_integer(s, tmp);
  if (numeric) {
    std::sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
      long long x = 0, y = 0;
      parse_integer(a, x);
      parse_integer(b, y);
      return x < y;
    });
  }
  return ids;
}

inline std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

using RawEdge = std::pair<std::string, std::string>;

inline Dataset dataset_from_raw(const std::vector<RawEdge>& raw, std::string name = {}) {
  std::vector<std::string> users, items;
  users.reserve(raw.size());
  items.reserve(raw.size());
  for (const auto& [u, i] : raw) {
    users.push_back(u);
    items.push_back(i);
  }
  Dataset d;
  d.name = std::move(name);
  d.user_ids = detail::sorted_ids(std::move(users));
  d.item_ids = detail::sorted_ids(std::move(items));
  std::unordered_map<std::string, Index> uid, iid;
  for (std::size_t k = 0; k < d.user_ids.size(); ++k) uid.emplace(d.user_ids[k], static_cast<Index>(k));
  for (std::size_t k = 0; k < d.item_ids.size(); ++k) iid.emplace(d.item_ids[k], static_cast<Index>(k));
  const Index nu = d.num_users();
  std::vector<NodePair> edges;
  edges.reserve(raw.size());
  for (const auto& [u, i] : raw) edges.emplace_back(uid.at(u), nu + iid.at(i));
  d.graph = build_graph(nu + d.num_items(), edges, Partition{nu, d.num_items()});
  return d;
}

// Two-column user/item pairs (tab, comma or space separated, optional
// header) or one line per user: "user item item ...". Lines starting with
// '#' are comments.
inline std::vector<RawEdge> parse_raw_edges(std::istream& in, EdgeFormat format) {
  std::vector<std::pair<Index, std::vector<std::string>>> lines;
  std::string line;
  Index line_no = 0;
  bool first_data = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line[0] == '#') continue;
    auto tokens = detail::tokenize(line);
    if (tokens.empty()) continue;
    if (first_data) {
      first_data = false;
      if (detail::looks_like_header(tokens)) continue;
    }
    lines.emplace_back(line_no, std::move(tokens));
  }
  if (lines.empty()) throw Error(ErrorKind::kEmpty, "edge list has no data lines");
  if (format == EdgeFormat::kAuto) {
    const bool pairs = std::all_of(lines.begin(), lines.end(), [](const auto& l) { return l.second.size() == 2; });
    format = pairs ? EdgeFormat::kPairs : EdgeFormat::kAdjacency;
  }
  std::vector<RawEdge> raw;
  for (const auto& [no, tokens] : lines) {
    if (format == EdgeFormat::kPairs) {
      if (tokens.size() != 2) {
        throw Error(ErrorKind::kParse, "line " + std::to_string(no) + ": expected 2 fields, found " +
                                           std::to_string(tokens.size()));
      }
      raw.emplace_back(tokens[0], tokens[1]);
    } else {
      for (std::size_t k = 1; k < tokens.size(); ++k) raw.emplace_back(tokens[0], tokens[k]);
    }
  }
  if (raw.empty()) throw Error(ErrorKind::kEmpty, "edge list has no links");
  return raw;
}

inline Dataset load_edge_list(std::istream& in, EdgeFormat format = EdgeFormat::kAuto, std::string name = {}) {
  return dataset_from_raw(parse_raw_edges(in, format), std::move(name));
}

inline Dataset load_edge_list(const std::string& path, EdgeFormat format = EdgeFormat::kAuto) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  auto stem = path.substr(path.find_last_of('/') + 1);
  return load_edge_list(in, format, stem.substr(0, stem.find('.')));
}

inline std::uint64_t canonical_checksum(const Dataset& d) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Edge& e : d.graph.edges()) {
    h = detail::fnv1a(h, d.user_ids[static_cast<std::size_t>(e.u)] + '\t' +
                             d.item_ids[static_cast<std::size_t>(e.v - d.num_users())] + '\n');
  }
  return h;
}

// Sorted tab-separated pairs with a comment header carrying counts and a
// checksum of the data lines.
inline void write_canonical(const Dataset& d, std::ostream& out) {
  char sum[32];
  std::snprintf(sum, sizeof(sum), "%016llx", static_cast<unsigned long long>(canonical_checksum(d)));
  out << "# unilink canonical edge list\n";
  out << "# users=" << d.num_users() << " items=" << d.num_items() << " links=" << d.graph.num_edges()
      << " checksum=" << sum << '\n';
  for (const Edge& e : d.graph.edges()) {
    out << d.user_ids[static_cast<std::size_t>(e.u)] << '\t'
        << d.item_ids[static_cast<std::size_t>(e.v - d.num_users())] << '\n';
  }
}

inline void write_canonical(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  write_canonical(d, out);
  if (!out) throw Error(ErrorKind::kIo, "write to '" + path + "' failed");
}

struct DatasetStats {
  Index nodes = 0;
  Index links = 0;
  Index users = 0;
  Index items = 0;
  Real density = 0;          // |E| / (|U| |I|) for bipartite graphs
  Real general_density = 0;  // |E| / (|V| (|V| - 1) / 2)
};

inline DatasetStats compute_stats(const Graph& g) {
  DatasetStats s;
  s.nodes = g.num_nodes();
  s.links = g.num_edges();
  const Real n = static_cast<Real>(s.nodes);
  s.general_density = s.nodes > 1 ? static_cast<Real>(s.links) / (n * (n - 1) / 2) : 0.0;
  if (auto p = g.partition()) {
    s.users = p->num_users;
    s.items = p->num_items;
    const Real cells = static_cast<Real>(p->num_users) * static_cast<Real>(p->num_items);
    s.density = cells > 0 ? static_cast<Real>(s.links) / cells : 0.0;
  } else {
    s.density = s.general_density;
  }
  return s;
}

struct ExpectedStats {
  Index nodes = 0;
  Index links = 0;
  Real density_percent = 0;
  int density_decimals = 3;  // precision the expectation was published with
};

struct StatsCheck {
  bool pass = true;
  DatasetStats computed;
  std::vector<std::string> mismatches;
};

// Node and link counts must match exactly; density must round to the
// expected percentage at its published precision.
inline StatsCheck verify_stats(const Graph& g, const ExpectedStats& expected) {
  StatsCheck c;
  c.computed = compute_stats(g);
  if (c.computed.nodes != expected.nodes) {
    c.mismatches.push_back("nodes: computed " + std::to_string(c.computed.nodes) + ", expected " +
                           std::to_string(expected.nodes));
  }
  if (c.computed.links != expected.links) {
    c.mismatches.push_back("links: computed " + std::to_string(c.computed.links) + ", expected " +
                           std::to_string(expected.links));
  }
  const Real half_unit = 0.5 * std::pow(10.0, -expected.density_decimals);
  const Real percent = 100.0 * c.computed.density;
  if (std::abs(percent - expected.density_percent) > half_unit + 1e-12) {
    c.mismatches.push_back("density: computed " + std::to_string(percent) + "%, expected " +
                           std::to_string(expected.density_percent) + "%");
  }
  c.pass = c.mismatches.empty();
  return c;
}

// Per-user seeded split. Every user with at least one link keeps one in
// train; users left without a test item are flagged.
inline SplitSet split_dataset(const Graph& graph, std::array<Real, 3> ratios, std::uint64_t seed) {
  const auto& part = graph.partition();
  if (!part) throw Error(ErrorKind::kInvalidArgument, "splitting requires a user/item partition");
  for (Real r : ratios) {
    if (r < 0) throw Error(ErrorKind::kInvalidArgument, "split ratios must be nonnegative");
  }
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
    throw Error(ErrorKind::kInvalidArgument, "split ratios must sum to 1");
  }
  SplitSet s;
  s.num_users = part->num_users;
  s.num_items = part->num_items;
  s.seed = seed;
  s.ratios = ratios;
  const auto nu = static_cast<std::size_t>(s.num_users);
  s.train.resize(nu);
  s.validation.resize(nu);
  s.test.resize(nu);
  std::mt19937_64 rng(seed);
  for (Index u = 0; u < s.num_users; ++u) {
    std::vector<Index> items;
    for (SparseMatrix::InnerIterator it(graph.adjacency(), u); it; ++it) items.push_back(it.col() - s.num_users);
    const auto n = static_cast<Index>(items.size());
    std::shuffle(items.begin(), items.end(), rng);
    Index n_val = std::llround(static_cast<Real>(n) * ratios[1]);
    Index n_test = std::llround(static_cast<Real>(n) * ratios[2]);
    while (n > 0 && n_val + n_test > n - 1) {
      if (n_val > 0) {
        --n_val;
      } else {
        --n_test;
      }
    }
    if (n == 0) {
      n_val = n_test = 0;
    }
    const auto uu = static_cast<std::size_t>(u);
    s.test[uu].assign(items.begin(), items.begin() + n_test);
    s.validation[uu].assign(items.begin() + n_test, items.begin() + n_test + n_val);
    s.train[uu].assign(items.begin() + n_test + n_val, items.end());
    for (auto* v : {&s.train[uu], &s.validation[uu], &s.test[uu]}) std::sort(v->begin(), v->end());
    if (s.test[uu].empty()) s.flagged_users.push_back(u);
  }
  return s;
}

inline void write_split(const Dataset& d, const SplitSet& s, std::ostream& out) {
  out << "# unilink split seed=" << s.seed << " ratios=" << s.ratios[0] << ',' << s.ratios[1] << ','
      << s.ratios[2] << '\n';
  const char* names[] = {"train", "validation", "test"};
  for (Index u = 0; u < s.num_users; ++u) {
    const auto uu = static_cast<std::size_t>(u);
    const std::vector<Index>* parts[] = {&s.train[uu], &s.validation[uu], &s.test[uu]};
    for (int p = 0; p < 3; ++p) {
      for (Index i : *parts[p]) {
        out << d.user_ids[uu] << '\t' << d.item_ids[static_cast<std::size_t>(i)] << '\t' << names[p] << '\n';
      }
    }
  }
}

// Reads a three-column split file back against the full dataset.
inline SplitSet read_split(const Dataset& d, std::istream& in) {
  SplitSet s;
  s.num_users = d.num_users();
  s.num_items = d.num_items();
  const auto nu = static_cast<std::size_t>(s.num_users);
  s.train.resize(nu);
  s.validation.resize(nu);
  s.test.resize(nu);
  std::unordered_map<std::string, Index> uid, iid;
  for (std::size_t k = 0; k < d.user_ids.size(); ++k) uid.emplace(d.user_ids[k], static_cast<Index>(k));
  for (std::size_t k = 0; k < d.item_ids.size(); ++k) iid.emplace(d.item_ids[k], static_cast<Index>(k));
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      if (line.rfind("# unilink split seed=", 0) == 0) {
        s.seed = std::stoull(line.substr(21));
        const auto pos = line.find("ratios=");
        if (pos != std::string::npos) {
          const auto t = detail::tokenize(line.substr(pos + 7));
          for (std::size_t k = 0; k < 3 && k < t.size(); ++k) s.ratios[k] = std::stod(t[k]);
        }
      }
      continue;
    }
    const auto t = detail::tokenize(line);
    if (t.size() != 3) throw Error(ErrorKind::kParse, "split line " + std::to_string(line_no) + ": expected 3 fields");
    const auto u = uid.find(t[0]);
    const auto i = iid.find(t[1]);
    if (u == uid.end() || i == iid.end()) {
      throw Error(ErrorKind::kParse, "split line " + std::to_string(line_no) + ": unknown id");
    }
    const auto uu = static_cast<std::size_t>(u->second);
    if (t[2] == "train") {
      s.train[uu].push_back(i->second);
    } else if (t[2] == "validation") {
      s.validation[uu].push_back(i->second);
    } else if (t[2] == "test") {
      s.test[uu].push_back(i->second);
    } else {
      throw Error(ErrorKind::kParse, "split line " + std::to_string(line_no) + ": unknown part '" + t[2] + "'");
    }
  }
  for (std::size_t u = 0; u < nu; ++u) {
    for (auto* v : {&s.train[u], &s.validation[u], &s.test[u]}) std::sort(v->begin(), v->end());
    if (s.test[u].empty()) s.flagged_users.push_back(static_cast<Index>(u));
  }
  return s;
}

// Bipartite planted-community benchmark: each user draws most of its items
// from its own community, with popularity skew inside communities.
struct SyntheticSpec {
  Index users = 250;
  Index items = 250;
  Index communities = 5;
  Index min_degree = 8;
  Index max_degree = 24;
  Real in_community = 0.85;
  std::uint64_t seed = 42;
};

inline std::vector<RawEdge> generate_bipartite(const SyntheticSpec& spec) {
  if (spec.users < 1 || spec.items < 1 || spec.communities < 1 || spec.min_degree < 1 ||
      spec.max_degree < spec.min_degree || spec.max_degree > spec.items) {
    throw Error(ErrorKind::kInvalidArgument, "invalid synthetic graph specification");
  }
  std::mt19937_64 rng(spec.seed);
  std::vector<std::vector<Index>> community_items(static_cast<std::size_t>(spec.communities));
  for (Index i = 0; i < spec.items; ++i) community_items[static_cast<std::size_t>(i % spec.communities)].push_back(i);
  // Zipf-like popularity inside each community.
  std::vector<std::discrete_distribution<std::size_t>> popularity;
  for (const auto& members : community_items) {
    std::vector<Real> w(members.size());
    for (std::size_t r = 0; r < w.size(); ++r) w[r] = 1.0 / std::pow(static_cast<Real>(r + 1), 0.6);
    popularity.emplace_back(w.begin(), w.end());
  }
  std::uniform_int_distribution<Index> degree(spec.min_degree, spec.max_degree);
  std::uniform_int_distribution<Index> any_item(0, spec.items - 1);
  std::bernoulli_distribution inside(spec.in_community);
  std::vector<RawEdge> out;
  for (Index u = 0; u < spec.users; ++u) {
    const auto c = static_cast<std::size_t>(u % spec.communities);
    const Index d = degree(rng);
    std::vector<Index> chosen;
    for (int guard = 0; static_cast<Index>(chosen.size()) < d && guard < 100000; ++guard) {
      const Index item = inside(rng) ? community_items[c][popularity[c](rng)] : any_item(rng);
      if (std::find(chosen.begin(), chosen.end(), item) == chosen.end()) chosen.push_back(item);
    }
    std::sort(chosen.begin(), chosen.end());
    for (Index i : chosen) out.emplace_back("u" + std::to_string(u), "i" + std::to_string(i));
  }
  return out;
}

}  // namespace unilink
