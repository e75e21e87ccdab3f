#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "deckfuse/types.hpp"

namespace deckfuse {

/// Parse a survey bundle from its XML wire format.
///
/// Schema (all values in canonical units: feet, volts, seconds, meters for
/// sensor spacing):
///
///   <survey bridge_id="...">
///     <deck x_min="0" x_max="40" y_min="0" y_max="12"/>   <!-- optional -->
///     <material nu="0.2" rho="2400"/>
///     <ie x="1.5" y="2.0">
///       <trace dt="1e-05">0.01 -0.02 ...</trace>
///     </ie>
///     <usw x="1.5" y="2.0" spacing="0.3">
///       <in dt="2e-06">...</in>
///       <out dt="2e-06">...</out>
///     </usw>
///   </survey>
///
/// Samples are whitespace-separated decimals. When <deck> is omitted the
/// extent is the bounding box of the record coordinates. Malformed XML
/// raises ParseError with line/column; a missing mandatory field raises
/// SchemaError naming the field; invariant violations raise ValidationError.
SurveyBundle parse_xml_bundle(std::string_view xml_bytes);

SurveyBundle read_xml_bundle(const std::filesystem::path& path);

/// Serialize a bundle back to the same schema. Deterministic: shortest
/// round-trip float formatting, records in container order.
std::string write_xml_bundle(const SurveyBundle& bundle);

}  // namespace deckfuse
