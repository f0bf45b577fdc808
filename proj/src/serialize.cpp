// Copyright 2026 The libimc Authors
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

#include "imc/serialize.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "imc/errors.hpp"

namespace imc {

std::string format_double(double v) {
  char buf[40];
  // round-trippable and independent of the global locale
  for (int precision : {15, 16, 17}) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    double back = 0.0;
    std::sscanf(buf, "%lg", &back);
    if (back == v) break;
  }
  return buf;
}

void write_sample_csv(std::ostream& os, const RunLengthSample& sample,
                      const std::string& metadata_json) {
  os << "# " << metadata_json << "\n";
  os << "index,count,weight";
  for (int d = 1; d <= sample.dim; ++d) os << ",x_" << d;
  os << "\n";
  for (std::size_t i = 0; i < sample.size(); ++i) {
    os << i << ',' << sample.counts[i] << ',' << format_double(sample.weights[i]);
    const auto x = sample.point(i);
    for (const double xi : x) os << ',' << format_double(xi);
    os << "\n";
  }
}

RunLengthSample read_sample_csv(std::istream& is, std::string* metadata_json) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
    fail(errc::io, "sample CSV must start with a '# <json>' metadata line");
  }
  if (metadata_json) *metadata_json = line.substr(2);
  if (!std::getline(is, line)) fail(errc::io, "sample CSV is missing the column header");

  int dim = 0;
  for (std::size_t pos = 0; (pos = line.find(",x_", pos)) != std::string::npos; ++pos) ++dim;

  RunLengthSample sample;
  sample.dim = dim;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');  // index, implicit
    if (!std::getline(row, cell, ',')) fail(errc::io, "sample CSV row missing count");
    sample.counts.push_back(std::stoll(cell));
    if (!std::getline(row, cell, ',')) fail(errc::io, "sample CSV row missing weight");
    sample.weights.push_back(std::stod(cell));
    for (int d = 0; d < dim; ++d) {
      if (!std::getline(row, cell, ',')) fail(errc::io, "sample CSV row missing coordinate");
      sample.points.push_back(std::stod(cell));
    }
  }
  return sample;
}

}  // namespace imc
