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

#ifndef IMC_SERIALIZE_HPP
#define IMC_SERIALIZE_HPP

#include <iosfwd>
#include <string>

#include "imc/engine.hpp"

namespace imc {

/// Shortest-roundtrip decimal rendering of a double ("%.17g"-compatible,
/// locale-independent); every writer funnels through this so identical runs
/// produce byte-identical files.
std::string format_double(double v);

/// Writes the run-length sample as CSV preceded by a single `# <json>`
/// metadata line: columns index,count,weight,x_1..x_d.
void write_sample_csv(std::ostream& os, const RunLengthSample& sample,
                      const std::string& metadata_json);

/// Reads back a sample written by write_sample_csv; the metadata line is
/// returned through metadata_json when non-null.
RunLengthSample read_sample_csv(std::istream& is, std::string* metadata_json = nullptr);

}  // namespace imc

#endif
