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

#include "accmfg/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace accmfg {

json grid_to_json(const PhaseGrid& grid) {
  const PhaseGrid::Spec& s = grid.spec();
  json j;
  j["schema"] = "accmfg.grid.v1";
  j["d"] = s.d;
  j["n_x"] = s.n_x;
  j["v_max"] = s.v_max;
  j["n_v"] = s.n_v;
  j["w_max"] = s.w_max;
  j["n_w"] = s.n_w;
  j["h"] = s.h;
  return j;
}

PhaseGrid::Spec grid_spec_from_json(const json& j) {
  PhaseGrid::Spec s;
  s.d = j.at("d").get<int>();
  s.n_x = j.at("n_x").get<int>();
  s.v_max = j.at("v_max").get<double>();
  s.n_v = j.at("n_v").get<int>();
  s.w_max = j.at("w_max").get<double>();
  s.n_w = j.at("n_w").get<int>();
  s.h = j.at("h").get<double>();
  return s;
}

json measure_to_json(const GridMeasure& m, const PhaseGrid& grid) {
  json j;
  j["schema"] = "accmfg.measure.v1";
  j["grid"] = grid_to_json(grid);
  j["ordering"] = "state id = xflat * n_v^d + vflat (row-major)";
  json ids = json::array(), xs = json::array(), vs = json::array(),
       ws = json::array();
  for (int s = 0; s < grid.num_states(); ++s) {
    if (m.weights[s] == 0.0) continue;
    Vec x, v;
    grid.state_coords(s, &x, &v);
    ids.push_back(s);
    json xv = json::array(), vv = json::array();
    for (int a = 0; a < grid.dim(); ++a) {
      xv.push_back(x[a]);
      vv.push_back(v[a]);
    }
    xs.push_back(xv);
    vs.push_back(vv);
    ws.push_back(m.weights[s]);
  }
  j["state_id"] = ids;
  j["x"] = xs;
  j["v"] = vs;
  j["weight"] = ws;
  return j;
}

GridMeasure measure_from_json(const json& j, const PhaseGrid& grid) {
  if (j.at("schema").get<std::string>() != "accmfg.measure.v1")
    throw std::invalid_argument("measure_from_json: unexpected schema");
  GridMeasure m(grid);
  const json& ids = j.at("state_id");
  const json& ws = j.at("weight");
  for (std::size_t k = 0; k < ids.size(); ++k)
    m.weights.at(ids[k].get<int>()) = ws[k].get<double>();
  return m;
}

json control_measure_to_json(const ControlMeasure& mu, const PhaseGrid& grid) {
  json j;
  j["schema"] = "accmfg.control_measure.v1";
  j["grid"] = grid_to_json(grid);
  j["ordering"] = "pair id = state id * n_w^d + wflat (row-major)";
  json ids = json::array(), xs = json::array(), vs = json::array(),
       cs = json::array(), ws = json::array();
  const int nw = grid.num_w();
  for (std::size_t p = 0; p < mu.weights.size(); ++p) {
    if (mu.weights[p] == 0.0) continue;
    int sid = static_cast<int>(p) / nw;
    int wf = static_cast<int>(p) % nw;
    Vec x, v;
    grid.state_coords(sid, &x, &v);
    Vec w = grid.control_coords(wf);
    ids.push_back(static_cast<std::int64_t>(p));
    json xv = json::array(), vv = json::array(), wv = json::array();
    for (int a = 0; a < grid.dim(); ++a) {
      xv.push_back(x[a]);
      vv.push_back(v[a]);
      wv.push_back(w[a]);
    }
    xs.push_back(xv);
    vs.push_back(vv);
    cs.push_back(wv);
    ws.push_back(mu.weights[p]);
  }
  j["pair_id"] = ids;
  j["x"] = xs;
  j["v"] = vs;
  j["w"] = cs;
  j["weight"] = ws;
  return j;
}

ControlMeasure control_measure_from_json(const json& j,
                                         const PhaseGrid& grid) {
  if (j.at("schema").get<std::string>() != "accmfg.control_measure.v1")
    throw std::invalid_argument("control_measure_from_json: bad schema");
  ControlMeasure mu(grid);
  const json& ids = j.at("pair_id");
  const json& ws = j.at("weight");
  for (std::size_t k = 0; k < ids.size(); ++k)
    mu.weights.at(ids[k].get<std::int64_t>()) = ws[k].get<double>();
  return mu;
}

json value_field_to_json(const ValueField& f, const PhaseGrid& grid) {
  json j;
  j["schema"] = "accmfg.value_field.v1";
  j["grid"] = grid_to_json(grid);
  j["ordering"] = "state id = xflat * n_v^d + vflat (row-major)";
  j["values"] = f.values;
  return j;
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
}

void write_value_field_csv(const std::string& path, const ValueField& f,
                           const PhaseGrid& grid) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot open for writing: " + path);
  std::fprintf(fp, "%s", grid.dim() == 1 ? "x0,v0,value\n"
                                         : "x0,x1,v0,v1,value\n");
  for (int s = 0; s < grid.num_states(); ++s) {
    Vec x, v;
    grid.state_coords(s, &x, &v);
    for (int a = 0; a < grid.dim(); ++a) std::fprintf(fp, "%.17g,", x[a]);
    for (int a = 0; a < grid.dim(); ++a) std::fprintf(fp, "%.17g,", v[a]);
    std::fprintf(fp, "%.17g\n", f.values[s]);
  }
  std::fclose(fp);
}

}  // namespace accmfg
