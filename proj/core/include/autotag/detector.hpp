#pragma once

#include "autotag/cells.hpp"
#include "autotag/detect_params.hpp"
#include "autotag/dictionary.hpp"
#include "autotag/geometry.hpp"
#include "autotag/image.hpp"

#include <string>
#include <vector>

namespace autotag {

struct Detection
{
    int id = -1;
    Quad corners;  // corner 0 is the marker's canonical top-left
    int rotation = 0;
    int corrected_bits = 0;
    double confidence = 0.0;
};

/// Full classical pipeline: adaptive binarization, outer-contour quads,
/// rectification, Otsu cell voting and dictionary decode. Detections whose
/// corner bounding boxes overlap with IoU > 0.9 are merged (higher confidence
/// wins). Output is sorted by corner 0 (y, then x), then id.
std::vector<Detection> detect_markers(const GrayImage& image, const MarkerDictionary& dict,
                                      const DetectParams& params = {});
std::vector<Detection> detect_markers(const RgbImage& image, const MarkerDictionary& dict,
                                      const DetectParams& params = {});

/// One JSON object terminated by a newline:
/// {"image": name, "id": k, "confidence": c, "corners": [[x,y] x4], "corrected_bits": e}
std::string detection_to_json_line(const std::string& image_name, const Detection& det);

} // namespace autotag
