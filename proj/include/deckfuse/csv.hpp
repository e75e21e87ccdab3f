#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "deckfuse/types.hpp"

namespace deckfuse {

// Feature CSV contract: header exactly `x,y,value`, UTF-8, LF line endings,
// '.' decimal point, no thousands separators. Values are written with
// shortest round-trip formatting, so read(write(p)) == p exactly.

void write_feature_csv(const std::vector<FeaturePoint>& points,
                       const std::filesystem::path& path);

std::vector<FeaturePoint> read_feature_csv(const std::filesystem::path& path,
                                           Modality modality);

// Fused-point CSV carries the modality column: header `x,y,value,modality`.
void write_fused_csv(const std::vector<FeaturePoint>& points,
                     const std::filesystem::path& path);

std::vector<FeaturePoint> read_fused_csv(const std::filesystem::path& path);

// Detected / ground-truth box CSV: header `x_min,x_max,y_min,y_max`.
void write_box_csv(const std::vector<DataBox>& boxes, const std::filesystem::path& path);

std::vector<DataBox> read_box_csv(const std::filesystem::path& path);

}  // namespace deckfuse
