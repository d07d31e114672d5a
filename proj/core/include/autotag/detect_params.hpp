#pragma once

namespace autotag {

struct DetectParams
{
    // First-pass adaptive-mean binarization.
    int window = 23;
    int offset = 7;

    // Candidate quad area as a fraction of the image area.
    double min_area = 0.0005;
    double max_area = 0.95;

    // Douglas-Peucker tolerance as a fraction of contour perimeter.
    double epsilon = 0.03;

    // Side of the rectified marker image in pixels; 0 means 8 px per cell.
    int rectified_side = 0;

    // Fraction of each cell ignored on every side when voting.
    double cell_margin = 0.2;

    // Throws std::invalid_argument describing the first bad field.
    void validate() const;
};

} // namespace autotag
