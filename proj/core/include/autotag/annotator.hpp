#pragma once

#include "autotag/detect_params.hpp"
#include "autotag/detector.hpp"
#include "autotag/dictionary.hpp"
#include "autotag/labels.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace autotag {

/// Dictionary id -> contiguous zero-based class index.
class ClassMap
{
public:
    /// id k -> class k for every id of the dictionary.
    static ClassMap identity(int dictionary_size);
    /// Class i is ids[i]; ids must be distinct and non-negative.
    static ClassMap from_ids(std::vector<int> ids);

    int size() const noexcept { return static_cast<int>(ids_.size()); }
    // -1 when the id is not mapped.
    int class_of(int id) const noexcept;
    int id_of(int class_index) const { return ids_.at(class_index); }
    std::string class_name(int class_index) const;

private:
    std::vector<int> ids_;
    std::map<int, int> classes_;
};

struct AnnotateOptions
{
    DetectParams detect;
    // Detections with confidence below this are dropped; 0 keeps all.
    double min_confidence = 0.0;
    // Worker threads for annotate_dataset; 1 runs inline.
    int jobs = 1;
};

struct SkippedFile
{
    std::string file;
    std::string reason;
};

struct AnnotationSummary
{
    int images_processed = 0;
    int images_with_detections = 0;
    int total_records = 0;
    std::vector<int> per_class;  // indexed by class
    std::vector<SkippedFile> skipped;  // sorted by file name

    std::string to_json() const;
};

/// Records sorted by (class_index, cx, cy). Unmapped ids are dropped.
std::vector<AnnotationRecord> annotate_image(const RgbImage& image, const MarkerDictionary& dict,
                                             const AnnotateOptions& options,
                                             const ClassMap& class_map);
std::vector<AnnotationRecord> annotate_image(const GrayImage& image, const MarkerDictionary& dict,
                                             const AnnotateOptions& options,
                                             const ClassMap& class_map);

/// Writes <stem>.txt per readable image (empty when nothing was found),
/// classes.txt, and summary.json into output_dir.
AnnotationSummary annotate_dataset(const std::filesystem::path& input_dir,
                                   const std::filesystem::path& output_dir,
                                   const MarkerDictionary& dict, const AnnotateOptions& options);
AnnotationSummary annotate_dataset(const std::filesystem::path& input_dir,
                                   const std::filesystem::path& output_dir,
                                   const MarkerDictionary& dict, const AnnotateOptions& options,
                                   const ClassMap& class_map);

/// Supported image files directly inside `dir`, sorted by file name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

} // namespace autotag
