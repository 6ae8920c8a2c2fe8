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

// Training-dynamics diagnostics: the mean positive link kernel, embedding
// norms and the four-substep norm trace of a propagation step.

#include <array>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "unilink/kernel_engine.hpp"

namespace unilink {

// Relative slack for "norm did not grow" checks.
inline constexpr Real kContractionSlack = 1e-12;

struct TrajectoryRecord {
  Index step = 0;
  Real mean_k_plus = 0;
  Real frob_norm = 0;
  std::optional<std::array<Real, 4>> substeps;

  bool operator==(const TrajectoryRecord&) const = default;
};

// Mean of K+ over its mask support (stored entries), not over all |V|^2 cells.
inline Real mean_positive_kernel(const LinkKernels& kernels) {
  const Index n = kernels.k_plus.nonZeros();
  if (n == 0) throw Error(ErrorKind::kEmpty, "positive kernel has empty support");
  Real sum = 0;
  for (Index i = 0; i < kernels.k_plus.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(kernels.k_plus, i); it; ++it) sum += it.value();
  }
  return sum / static_cast<Real>(n);
}

inline Real frobenius(const DenseMatrix& x) { return x.norm(); }

struct SubstepSummary {
  std::array<Real, 4> norms{};
  bool first_contracts = true;  // |P X| <= |X|
  bool third_contracts = true;  // |P Y| <= |Y|
  bool contracts() const noexcept { return first_contracts && third_contracts; }
};

inline SubstepSummary substep_trace(const SubstepTrace& trace) {
  if (trace.entries.size() != 4) {
    throw Error(ErrorKind::kInvalidArgument,
                "substep trace has " + std::to_string(trace.entries.size()) + " entries, expected 4");
  }
  SubstepSummary s;
  for (std::size_t i = 0; i < 4; ++i) {
    if (trace.entries[i].first != static_cast<int>(i) + 1) {
      throw Error(ErrorKind::kInvalidArgument, "substep trace out of order");
    }
    s.norms[i] = trace.entries[i].second;
  }
  s.first_contracts = s.norms[0] <= trace.input_norm * (1 + kContractionSlack);
  s.third_contracts = s.norms[2] <= s.norms[1] * (1 + kContractionSlack);
  return s;
}

namespace detail {

inline std::string format_real(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace detail

inline constexpr const char* kTrajectoryHeader = "step,mean_k_plus,frob_norm,sub1,sub2,sub3,sub4";

inline void write_trajectories(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
  out << kTrajectoryHeader << '\n';
  for (const auto& r : records) {
    out << r.step << ',' << detail::format_real(r.mean_k_plus) << ',' << detail::format_real(r.frob_norm);
    for (std::size_t i = 0; i < 4; ++i) {
      out << ',';
      if (r.substeps) out << detail::format_real((*r.substeps)[i]);
    }
    out << '\n';
  }
}

inline void emit_trajectories(const std::vector<TrajectoryRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  write_trajectories(out, records);
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "write to '" + path + "' failed");
}

inline std::vector<TrajectoryRecord> read_trajectories(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader) {
    throw Error(ErrorKind::kParse, "missing trajectory header");
  }
  std::vector<TrajectoryRecord> out;
  Index line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_fields(line, ',');
    if (f.size() != 7) throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": expected 7 fields");
    try {
      TrajectoryRecord r;
      r.step = std::stoll(f[0]);
      r.mean_k_plus = std::stod(f[1]);
      r.frob_norm = std::stod(f[2]);
      if (!f[3].empty()) {
        r.substeps = std::array<Real, 4>{std::stod(f[3]), std::stod(f[4]), std::stod(f[5]), std::stod(f[6])};
      }
      out.push_back(r);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return out;
}

inline std::vector<TrajectoryRecord> read_trajectories(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  return read_trajectories(in);
}

}  // namespace unilink
