#include "autotag/detector.hpp"

#include "autotag/contour.hpp"
#include "autotag/errors.hpp"
#include "autotag/homography.hpp"
#include "autotag/threshold.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <stdexcept>

namespace autotag {

void DetectParams::validate() const
{
    if (window < 3 || window % 2 == 0) {
        throw std::invalid_argument("window must be odd and >= 3");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    }
    if (!(min_area >= 0.0 && min_area < max_area && max_area <= 1.0)) {
        throw std::invalid_argument("areas must satisfy 0 <= min_area < max_area <= 1");
    }
    if (rectified_side < 0) {
        throw std::invalid_argument("rectified_side must be >= 0");
    }
    if (!(cell_margin >= 0.0 && cell_margin < 0.5)) {
        throw std::invalid_argument("cell_margin must lie in [0, 0.5)");
    }
}

std::vector<Detection> detect_markers(const GrayImage& image, const MarkerDictionary& dict,
                                      const DetectParams& params)
{
    params.validate();
    if (image.width < params.window || image.height < params.window) {
        return {};
    }
    const int total_cells = dict.cells + 2;
    const int side = params.rectified_side > 0 ? params.rectified_side : 8 * total_cells;

    const BinaryImage binary = binarize_adaptive(image, params.window, params.offset);
    std::vector<Detection> found;
    for (const Quad& quad : extract_quad_candidates(binary, params)) {
        DecodeResult res;
        try {
            const Homography h = homography_from_quad(quad, side);
            const GrayImage canonical = rectify(image, h, side);
            res = decode_cells(read_cells(canonical, total_cells, params.cell_margin), dict);
        } catch (const Error&) {
            continue;
        }
        if (!res.accepted()) {
            continue;
        }
        found.push_back(Detection{res.id, rotate_corners(quad, res.rotation), res.rotation,
                                  res.corrected_bits, res.confidence});
    }

    // Same region found twice: keep the more confident one.
    std::stable_sort(found.begin(), found.end(), [](const Detection& a, const Detection& b) {
        return a.confidence > b.confidence;
    });
    std::vector<Detection> kept;
    for (const Detection& d : found) {
        const Box box = bounding_box(d.corners);
        const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
            return box_iou(box, bounding_box(k.corners)) > 0.9;
        });
        if (!dup) {
            kept.push_back(d);
        }
    }
    std::sort(kept.begin(), kept.end(), [](const Detection& a, const Detection& b) {
        const Point2d& pa = a.corners.corners[0];
        const Point2d& pb = b.corners.corners[0];
        if (pa.y != pb.y) {
            return pa.y < pb.y;
        }
        if (pa.x != pb.x) {
            return pa.x < pb.x;
        }
        return a.id < b.id;
    });
    return kept;
}

std::vector<Detection> detect_markers(const RgbImage& image, const MarkerDictionary& dict,
                                      const DetectParams& params)
{
    return detect_markers(to_gray(image), dict, params);
}

std::string detection_to_json_line(const std::string& image_name, const Detection& det)
{
    nlohmann::ordered_json corners = nlohmann::ordered_json::array();
    for (const Point2d& p : det.corners.corners) {
        corners.push_back({p.x, p.y});
    }
    const nlohmann::ordered_json line = {{"image", image_name},
                                         {"id", det.id},
                                         {"confidence", det.confidence},
                                         {"corners", corners},
                                         {"corrected_bits", det.corrected_bits}};
    return line.dump() + "\n";
}

} // namespace autotag
