// Copyright 2026 The accmfg Authors
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

#ifndef ACCMFG_JSON_IO_HPP
#define ACCMFG_JSON_IO_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "accmfg/fields.hpp"
#include "accmfg/measures.hpp"

namespace accmfg {

using json = nlohmann::ordered_json;

/// JSON schemas (versioned, documented in the README):
///  - grid:          accmfg.grid.v1      {d, n_x, v_max, n_v, w_max, n_w, h}
///  - grid measure:  accmfg.measure.v1   sparse: state ids (row-major
///                    ordering: id = xflat * n_v^d + vflat), coordinates and
///                    weights of the nonzero nodes
///  - pair measure:  accmfg.control_measure.v1  same with (x, v, w) nodes
///  - value field:   accmfg.value_field.v1      dense values, row-major
json grid_to_json(const PhaseGrid& grid);
PhaseGrid::Spec grid_spec_from_json(const json& j);

json measure_to_json(const GridMeasure& m, const PhaseGrid& grid);
GridMeasure measure_from_json(const json& j, const PhaseGrid& grid);

json control_measure_to_json(const ControlMeasure& mu, const PhaseGrid& grid);
ControlMeasure control_measure_from_json(const json& j, const PhaseGrid& grid);

json value_field_to_json(const ValueField& f, const PhaseGrid& grid);

/// Deterministic serialization (2-space indent, "\n" line ends, keys in
/// insertion order) and the FNV-1a hash of it, used by run manifests.
std::string canonical_dump(const json& j);
std::uint64_t fnv1a_hash(const std::string& text);
void write_text_file(const std::string& path, const std::string& text);

/// CSV with columns x.., v.., value (17 significant digits).
void write_value_field_csv(const std::string& path, const ValueField& f,
                           const PhaseGrid& grid);

}  // namespace accmfg

#endif  // ACCMFG_JSON_IO_HPP
