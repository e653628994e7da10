//
// Copyright 2026 The Cleanmark Authors
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
//

#include "cleanmark/blob_io.h"
#include "cleanmark/hash.h"
#include "cleanmark/json_util.h"
#include "cleanmark/trigger.h"

namespace cleanmark {
namespace {

using nlohmann::json;

std::string TensorToBase64(std::span<const size_t> shape, std::span<const float> data) {
  std::vector<uint64_t> dims(shape.begin(), shape.end());
  return Base64Encode(EncodeTensorF32(dims, data));
}

std::vector<float> TensorFromBase64(const std::string& text, std::span<const size_t> shape,
                                    const std::string& path) {
  TensorBlob blob;
  try {
    blob = DecodeTensor(Base64Decode(text));
  } catch (const FormatError& e) {
    throw ConfigError(path, e.what());
  }
  if (blob.dtype != DType::kF32 ||
      !std::equal(blob.dims.begin(), blob.dims.end(), shape.begin(), shape.end())) {
    throw ConfigError(path, "tensor blob does not match the declared shape");
  }
  return blob.f32;
}

std::string PositionName(WordPosition p) {
  switch (p) {
    case WordPosition::kInitial:
      return "initial";
    case WordPosition::kMiddle:
      return "middle";
    case WordPosition::kEnd:
      return "end";
  }
  return "end";
}

WordPosition ParsePosition(const std::string& name, const std::string& path) {
  if (name == "initial") return WordPosition::kInitial;
  if (name == "middle") return WordPosition::kMiddle;
  if (name == "end") return WordPosition::kEnd;
  throw ConfigError(path, "position must be initial, middle or end");
}

}  // namespace

json TriggerToJson(const TriggerSpec& spec) {
  json doc;
  doc["kind"] = std::string(TriggerKind(spec));
  if (const auto* p = std::get_if<PatchTrigger>(&spec)) {
    doc["shape"] = p->shape;
    doc["pattern"] = TensorToBase64(p->shape, p->pattern);
    doc["mask"] = TensorToBase64(p->shape, p->mask);
    doc["transparency"] = p->transparency;
    doc["row"] = p->row;
    doc["col"] = p->col;
  } else if (const auto* b = std::get_if<BlendTrigger>(&spec)) {
    doc["shape"] = b->shape;
    doc["pattern"] = TensorToBase64(b->shape, b->pattern);
    doc["blend_ratio"] = b->blend_ratio;
  } else if (const auto* i = std::get_if<ImpulseTrigger>(&spec)) {
    doc["amplitude"] = i->amplitude;
    doc["position"] = i->position;
    doc["length_fraction"] = i->length_fraction;
  } else if (const auto* w = std::get_if<WordTrigger>(&spec)) {
    doc["word"] = w->word;
    doc["position"] = PositionName(w->position);
  } else if (const auto* s = std::get_if<StyleTrigger>(&spec)) {
    doc["will"] = s->will_id;
    doc["have"] = s->have_id;
    doc["been"] = s->been_id;
    json table = json::array();
    for (const auto& [verb, participle] : s->participles) table.push_back({verb, participle});
    doc["participles"] = table;
  }
  return doc;
}

TriggerSpec TriggerFromJson(const json& doc, const std::string& path) {
  JsonReader r(doc, path);
  const auto kind = r.Required<std::string>("kind");
  TriggerSpec spec;
  if (kind == "patch") {
    PatchTrigger p;
    p.shape = r.Required<std::vector<size_t>>("shape");
    p.pattern = TensorFromBase64(r.Required<std::string>("pattern"), p.shape, r.Child("pattern"));
    p.mask = TensorFromBase64(r.Required<std::string>("mask"), p.shape, r.Child("mask"));
    p.transparency = r.Required<double>("transparency");
    p.row = r.Required<size_t>("row");
    p.col = r.Required<size_t>("col");
    spec = std::move(p);
  } else if (kind == "blend") {
    BlendTrigger b;
    b.shape = r.Required<std::vector<size_t>>("shape");
    b.pattern = TensorFromBase64(r.Required<std::string>("pattern"), b.shape, r.Child("pattern"));
    b.blend_ratio = r.Required<double>("blend_ratio");
    spec = std::move(b);
  } else if (kind == "impulse") {
    ImpulseTrigger i;
    i.amplitude = r.Required<double>("amplitude");
    i.position = r.Required<size_t>("position");
    i.length_fraction = r.Required<double>("length_fraction");
    spec = i;
  } else if (kind == "word") {
    WordTrigger w;
    w.word = r.Required<uint32_t>("word");
    w.position = ParsePosition(r.Required<std::string>("position"), r.Child("position"));
    spec = w;
  } else if (kind == "style") {
    StyleTrigger s;
    s.will_id = r.Required<uint32_t>("will");
    s.have_id = r.Required<uint32_t>("have");
    s.been_id = r.Required<uint32_t>("been");
    for (const auto& pair :
         r.Required<std::vector<std::pair<uint32_t, uint32_t>>>("participles")) {
      s.participles[pair.first] = pair.second;
    }
    spec = std::move(s);
  } else {
    throw ConfigError(r.Child("kind"), "unknown trigger kind '" + kind + "'");
  }
  r.RejectUnknown();
  return spec;
}

}  // namespace cleanmark
