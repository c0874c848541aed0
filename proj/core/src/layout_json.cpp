// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#include <json.hpp>

#include "lmc/error.hpp"
#include "lmc/packet_model.hpp"

namespace lmc {

namespace {

using nlohmann::json;

ByteOrder byte_order_from_string(const std::string& s) {
  if (s == "lsb_first") return ByteOrder::kLsbFirst;
  if (s == "msb_first") return ByteOrder::kMsbFirst;
  throw ParameterError("byte_order must be \"lsb_first\" or \"msb_first\"");
}

}  // namespace

PacketLayout layout_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("layout descriptor is not valid JSON: ") + e.what());
  }
  try {
    std::vector<RangeFieldSpec> fields;
    for (const auto& f : doc.at("range_fields")) {
      RangeFieldSpec spec;
      spec.offset = f.at("offset").get<std::uint32_t>();
      spec.width_bits = f.value("width_bits", 16);
      spec.byte_order = byte_order_from_string(f.value("byte_order", std::string("lsb_first")));
      fields.push_back(spec);
    }
    std::vector<ConstantFieldSpec> constants;
    if (doc.contains("constant_fields")) {
      for (const auto& c : doc.at("constant_fields")) {
        ConstantFieldSpec spec;
        spec.offset = c.at("offset").get<std::uint32_t>();
        spec.expected = c.at("expected").get<Bytes>();
        constants.push_back(spec);
      }
    }
    return PacketLayout(doc.at("packet_size").get<std::uint32_t>(), std::move(fields),
                        doc.at("step_size_mm").get<double>(),
                        doc.value("max_masked_bits", 15), doc.value("vendor_accuracy_mm", 0.0),
                        std::move(constants));
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad layout descriptor: ") + e.what());
  }
}

std::string layout_to_json(const PacketLayout& layout) {
  json doc;
  doc["packet_size"] = layout.packet_size();
  doc["step_size_mm"] = layout.step_size_mm();
  doc["max_masked_bits"] = layout.max_masked_bits();
  doc["vendor_accuracy_mm"] = layout.vendor_accuracy_mm();
  doc["range_fields"] = json::array();
  for (const auto& f : layout.range_fields()) {
    doc["range_fields"].push_back({
        {"offset", f.offset},
        {"width_bits", f.width_bits},
        {"byte_order", f.byte_order == ByteOrder::kLsbFirst ? "lsb_first" : "msb_first"},
    });
  }
  doc["constant_fields"] = json::array();
  for (const auto& c : layout.constant_fields()) {
    doc["constant_fields"].push_back({{"offset", c.offset}, {"expected", c.expected}});
  }
  return doc.dump(2);
}

}  // namespace lmc
