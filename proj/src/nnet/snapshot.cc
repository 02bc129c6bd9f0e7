// Copyright 2026 The ECW Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ecw/nnet/snapshot.h"

#include "ecw/errors.h"

namespace ecw::nnet {

using nlohmann::json;

json MatrixToJson(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json VectorToJson(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::MatrixXd MatrixFromJson(const json& doc) {
  if (!doc.is_array()) throw ConfigError("matrix must be a JSON array");
  const auto rows = static_cast<Eigen::Index>(doc.size());
  const auto cols =
      rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(doc[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(doc[r].size()) != cols) {
      throw ConfigError("ragged matrix in snapshot");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = doc[r][c].get<double>();
  }
  return m;
}

Eigen::VectorXd VectorFromJson(const json& doc) {
  if (!doc.is_array()) throw ConfigError("vector must be a JSON array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(doc.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = doc[i].get<double>();
  return v;
}

namespace {

json LayerJson(const Dense& layer) {
  return {{"w", MatrixToJson(layer.w)}, {"b", VectorToJson(layer.b)}};
}

json MomentJson(const Dense& layer) {
  return {{"m_w", MatrixToJson(layer.m_w)},
          {"v_w", MatrixToJson(layer.v_w)},
          {"m_b", VectorToJson(layer.m_b)},
          {"v_b", VectorToJson(layer.v_b)}};
}

Dense LayerFromJson(const json& weights, const json& moments, int in,
                    int out) {
  Dense layer(in, out);
  auto load_m = [&](Eigen::MatrixXd& dst, const json& src) {
    Eigen::MatrixXd m = MatrixFromJson(src);
    if (m.rows() != out || m.cols() != in) {
      throw ConfigError("snapshot matrix shape mismatch");
    }
    dst = std::move(m);
  };
  auto load_v = [&](Eigen::VectorXd& dst, const json& src) {
    Eigen::VectorXd v = VectorFromJson(src);
    if (v.size() != out) throw ConfigError("snapshot vector shape mismatch");
    dst = std::move(v);
  };
  load_m(layer.w, weights.at("w"));
  load_v(layer.b, weights.at("b"));
  if (!moments.is_null()) {
    load_m(layer.m_w, moments.at("m_w"));
    load_m(layer.v_w, moments.at("v_w"));
    load_v(layer.m_b, moments.at("m_b"));
    load_v(layer.v_b, moments.at("v_b"));
  }
  return layer;
}

}  // namespace

json ToJson(const NetParams& params, const NetSpec& spec) {
  json doc;
  doc["layers"] = json::array();
  doc["heads"] = json::object();
  json adam = {{"layers", json::array()}, {"heads", json::object()}};
  for (const Dense& layer : params.hidden) {
    doc["layers"].push_back(LayerJson(layer));
    adam["layers"].push_back(MomentJson(layer));
  }
  for (std::size_t h = 0; h < params.heads.size(); ++h) {
    doc["heads"][spec.heads[h].name] = LayerJson(params.heads[h]);
    adam["heads"][spec.heads[h].name] = MomentJson(params.heads[h]);
  }
  doc["adam"] = std::move(adam);
  doc["step"] = params.step;
  return doc;
}

NetParams ParamsFromJson(const json& doc, const NetSpec& spec) {
  spec.Validate();
  try {
    NetParams params;
    const json& layers = doc.at("layers");
    if (layers.size() != spec.hidden_dims.size()) {
      throw ConfigError("snapshot has the wrong number of hidden layers");
    }
    const json adam = doc.value("adam", json::object());
    int in = spec.input_dim;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      json moments = adam.contains("layers") ? adam["layers"][l] : json();
      params.hidden.push_back(
          LayerFromJson(layers[l], moments, in, spec.hidden_dims[l]));
      in = spec.hidden_dims[l];
    }
    for (const auto& head : spec.heads) {
      json moments = adam.contains("heads") && adam["heads"].contains(head.name)
                         ? adam["heads"][head.name]
                         : json();
      params.heads.push_back(
          LayerFromJson(doc.at("heads").at(head.name), moments, in, head.dim));
    }
    params.step = doc.value("step", std::int64_t{0});
    return params;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed network snapshot: ") + e.what());
  }
}

}  // namespace ecw::nnet
