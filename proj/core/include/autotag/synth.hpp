#pragma once

#include "autotag/dictionary.hpp"
#include "autotag/geometry.hpp"
#include "autotag/image.hpp"
#include "autotag/labels.hpp"
#include "autotag/random.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace autotag {

// ---------------------------------------------------------------------------
// Photometric augmentation
// ---------------------------------------------------------------------------

/// Symmetric ranges are +/- fractions. Scale factor is drawn from
/// [1 - scale_min, 1 + scale_max].
struct AugmentationSpec
{
    double brightness = 1.00;
    double contrast = 0.50;
    double hue = 0.028;
    double saturation = 0.10;
    double scale_min = 0.0;
    double scale_max = 0.50;
    // Marker center in pixels; unset places it uniformly at random.
    std::optional<Point2d> fixed_position;

    /// All ranges zero, random placement.
    static AugmentationSpec none();
    /// The ranges a stock YOLO training run uses.
    static AugmentationSpec yolo();

    void validate() const;
};

struct JitterFactors
{
    double brightness = 0.0;
    double contrast = 0.0;
    double hue = 0.0;
    double saturation = 0.0;
};

JitterFactors sample_jitter(const AugmentationSpec& spec, Rng& rng);

/// Brightness p*(1+b), contrast (p-128)*(1+c)+128, then hue rotation by
/// h*360 deg and saturation S*(1+s) in HSV; clamped after every stage. Zero
/// factors skip their stage, so all-zero factors return the input unchanged.
RgbImage apply_jitter(const RgbImage& image, const JitterFactors& factors);

RgbImage photometric_jitter(const RgbImage& image, const AugmentationSpec& spec, Rng& rng);

// ---------------------------------------------------------------------------
// Degradations
// ---------------------------------------------------------------------------

struct KernelTap
{
    int dx = 0;
    int dy = 0;
    double weight = 0.0;
};

/// Normalized 1-px line of `length` taps centred on the origin.
std::vector<KernelTap> motion_kernel(int length, double angle);
/// Normalized uniform disk: all offsets with dx^2 + dy^2 <= radius^2.
std::vector<KernelTap> disk_kernel(double radius);

/// Sparse correlation with clamp-to-edge borders, rounded per channel.
template <int C>
Image<C> convolve(const Image<C>& image, const std::vector<KernelTap>& kernel);

template <int C>
Image<C> motion_blur(const Image<C>& image, int length, double angle);
template <int C>
Image<C> defocus_blur(const Image<C>& image, double radius);

RgbImage add_gaussian_noise(const RgbImage& image, double sigma, Rng& rng);
RgbImage occlude(const RgbImage& image, double fraction, int count, Rng& rng);

struct MotionBlurSpec
{
    int length = 1;
    double angle = 0.0;  // radians
};

struct OcclusionSpec
{
    double fraction = 0.0;
    int count = 1;
};

struct DegradationSpec
{
    std::optional<MotionBlurSpec> motion_blur;
    std::optional<double> defocus_radius;
    std::optional<double> noise_sigma;
    std::optional<OcclusionSpec> occlusion;

    bool any() const noexcept
    {
        return motion_blur || defocus_radius || noise_sigma || occlusion;
    }
    void validate() const;
};

/// Order: occlusion, defocus, motion blur, noise.
RgbImage apply_degradation(const RgbImage& image, const DegradationSpec& spec, Rng& rng);

// ---------------------------------------------------------------------------
// Scene composition
// ---------------------------------------------------------------------------

struct Placement
{
    int id = 0;
    double side = 64.0;   // outer black border side in pixels, before tilt
    Point2d center;       // projected marker center in pixels
    double tilt = 0.0;    // out-of-plane rotation, radians
    double tilt_axis = 0.0;  // in-plane direction of the tilt axis, radians
    double roll = 0.0;    // in-plane rotation, radians (clockwise on screen)
};

struct GroundTruth
{
    int id = 0;
    Quad quad;  // projected outer border corners, corner 0 = marker top-left
    NormalizedBBox bbox;
};

struct Scene
{
    RgbImage image;
    std::vector<GroundTruth> truths;
};

// Pinhole distance, in marker sides, used by the tilt projection.
constexpr double kCameraDistanceSides = 3.0;

/// Corners of a centred square of half-size `half_extent`, rolled, tilted and
/// projected to the image. Corner order: top-left, top-right, bottom-right,
/// bottom-left of the unrotated square.
Quad project_square(const Placement& p, double half_extent);

/// Axis-aligned box covering the marker and its one-cell white quiet zone.
Box placement_footprint(const Placement& p, int cells);

/// Renders every placement with its quiet zone using 4x4 supersampled
/// coverage. Throws OutOfBounds if a footprint leaves the image and
/// PlacementOverlap if two footprints intersect.
Scene compose_scene(const RgbImage& background, const std::vector<Placement>& placements,
                    const MarkerDictionary& dict);

RgbImage solid_background(int width, int height, std::uint8_t level);
/// Smooth value noise (three octaves) with a random base tone.
RgbImage noise_background(int width, int height, Rng& rng);

// ---------------------------------------------------------------------------
// Mosaic
// ---------------------------------------------------------------------------

struct LabeledImage
{
    RgbImage image;
    std::vector<AnnotationRecord> labels;
};

/// Split point drawn uniformly from the central half of the canvas.
LabeledImage mosaic(const std::array<LabeledImage, 4>& items, int out_width, int out_height,
                    Rng& rng);

/// Each source is resized to half the canvas and anchored at the split point
/// (top-left source ends at the split, and so on), then cropped to its
/// quadrant. Boxes are clipped to the quadrant and dropped when less than 10%
/// of their area remains. Uncovered canvas is gray 114.
LabeledImage mosaic_at(const std::array<LabeledImage, 4>& items, int out_width, int out_height,
                       Point2d split);

// ---------------------------------------------------------------------------
// Dataset builder
// ---------------------------------------------------------------------------

enum class Split
{
    Train,
    Val,
    Test,
};

const char* to_string(Split s) noexcept;

/// Per-split degradation sampling. With `probability` an image receives one
/// degradation picked uniformly among the enabled kinds (a kind is enabled
/// when its maximum is positive).
struct DegradationPolicy
{
    double probability = 0.5;
    int max_blur_length = 15;
    double max_defocus_radius = 3.0;
    double max_noise_sigma = 8.0;
    double max_occlusion = 0.0;
};

struct DatasetConfig
{
    std::vector<int> marker_ids;  // empty = every dictionary id
    int train = 130;
    int val = 25;
    int test = 200;
    std::uint64_t seed = 0;
    int width = 320;
    int height = 240;
    double marker_side = 64.0;
    double max_tilt = 0.5235987755982988;  // 30 deg
    double max_roll = 3.141592653589793;
    AugmentationSpec augmentation;
    std::array<DegradationPolicy, 3> degradation{};
    std::vector<std::string> backgrounds{"solid", "noise"};  // also "dir"
    std::filesystem::path background_dir;
    std::string image_format = "png";
    int jobs = 1;

    void validate() const;
    std::string to_json() const;
    /// Missing keys keep their defaults.
    static DatasetConfig from_json(const std::string& text);
};

/// Per-image seed: mix64(master ^ split tag ^ index).
std::uint64_t image_seed(std::uint64_t master, Split split, std::uint64_t index);

struct DatasetResult
{
    int images = 0;
    std::array<int, 3> per_split{};
    std::string manifest;  // contents of manifest.json
};

/// images/{train,val,test}, labels/{train,val,test}, manifest.json under
/// `output_dir`. Labels come from the composition geometry, never from the
/// detector. On an I/O failure the manifest of finished images is still
/// written (with an "error" field) and the exception propagates.
DatasetResult build_dataset(const DatasetConfig& config, const MarkerDictionary& dict,
                            const std::filesystem::path& output_dir);

/// One dataset image in memory, exactly as build_dataset would produce it.
struct SampledImage
{
    std::string stem;
    Scene scene;
    std::string record;  // manifest entry (JSON object)
};

SampledImage synthesize_image(const DatasetConfig& config, const MarkerDictionary& dict,
                              Split split, int index,
                              const std::vector<RgbImage>& background_pool = {});

} // namespace autotag
