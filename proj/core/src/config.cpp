// Copyright 2026 The seqfuse Authors.
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

#include "seqfuse/config.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "seqfuse/error.hpp"

namespace seqfuse {

namespace {

using json = nlohmann::json;

const std::set<std::string>& known_fields() {
  static const std::set<std::string> fields = {
      "target",       "learning_rate", "adam_beta1",   "adam_beta2",  "adam_eps",
      "dropout_rate", "max_time_step", "chunking",     "embed_dim",   "hidden_units",
      "head_hidden",  "epochs",        "patience",     "seed",        "track_order"};
  return fields;
}

template <typename T>
void read_field(const json& doc, const char* name, T& out) {
  if (!doc.contains(name)) return;
  try {
    out = doc.at(name).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::kInvalidArgument, std::string("config field '") + name +
                                                 "' has the wrong type");
  }
}

void read_count(const json& doc, const char* name, std::size_t& out) {
  if (!doc.contains(name)) return;
  const json& v = doc.at(name);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string("config field '") + name + "' must be a non-negative integer");
  }
  out = v.get<std::size_t>();
}

}  // namespace

void TrainConfig::validate() const {
  if (target.empty()) throw Error(ErrorKind::kInvalidArgument, "config field 'target' is empty");
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "config field 'learning_rate' must be > 0");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "config field 'dropout_rate' must be in [0, 1)");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "config fields 'adam_beta1/2' must be in [0, 1)");
  }
  if (!(adam_eps > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "config field 'adam_eps' must be > 0");
  }
  if (max_time_step < 1) {
    throw Error(ErrorKind::kInvalidArgument, "config field 'max_time_step' must be >= 1");
  }
  if (embed_dim < 1 || hidden_units < 1 || head_hidden < 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "config fields 'embed_dim', 'hidden_units', 'head_hidden' must be >= 1");
  }
  if (patience < 1) throw Error(ErrorKind::kInvalidArgument, "config field 'patience' must be >= 1");
}

std::string train_config_to_json(const TrainConfig& c) {
  json doc;
  doc["target"] = c.target;
  doc["learning_rate"] = c.learning_rate;
  doc["adam_beta1"] = c.adam_beta1;
  doc["adam_beta2"] = c.adam_beta2;
  doc["adam_eps"] = c.adam_eps;
  doc["dropout_rate"] = c.dropout_rate;
  doc["max_time_step"] = c.max_time_step;
  doc["chunking"] = c.chunking;
  doc["embed_dim"] = c.embed_dim;
  doc["hidden_units"] = c.hidden_units;
  doc["head_hidden"] = c.head_hidden;
  doc["epochs"] = c.epochs;
  doc["patience"] = c.patience;
  doc["seed"] = c.seed;
  doc["track_order"] = c.track_order;
  return doc.dump();
}

TrainConfig train_config_from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kInvalidArgument, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::kInvalidArgument, "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!known_fields().contains(key)) {
      throw Error(ErrorKind::kInvalidArgument, "unknown config field '" + key + "'");
    }
  }
  if (!doc.contains("target")) {
    throw Error(ErrorKind::kInvalidArgument, "missing required config field 'target'");
  }

  TrainConfig c;
  read_field(doc, "target", c.target);
  read_field(doc, "learning_rate", c.learning_rate);
  read_field(doc, "adam_beta1", c.adam_beta1);
  read_field(doc, "adam_beta2", c.adam_beta2);
  read_field(doc, "adam_eps", c.adam_eps);
  read_field(doc, "dropout_rate", c.dropout_rate);
  read_count(doc, "max_time_step", c.max_time_step);
  read_field(doc, "chunking", c.chunking);
  read_count(doc, "embed_dim", c.embed_dim);
  read_count(doc, "hidden_units", c.hidden_units);
  read_count(doc, "head_hidden", c.head_hidden);
  read_count(doc, "epochs", c.epochs);
  read_count(doc, "patience", c.patience);
  if (doc.contains("seed")) {
    const json& v = doc.at("seed");
    if (!v.is_number_integer()) {
      throw Error(ErrorKind::kInvalidArgument, "config field 'seed' must be an integer");
    }
    c.seed = v.is_number_unsigned() ? v.get<std::uint64_t>()
                                    : static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  read_field(doc, "track_order", c.track_order);
  c.validate();
  return c;
}

}  // namespace seqfuse
