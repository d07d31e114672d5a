#include "autotag/annotator.hpp"

#include "autotag/errors.hpp"
#include "autotag/image_io.hpp"
#include "autotag/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>

namespace autotag {

namespace fs = std::filesystem;

ClassMap ClassMap::identity(int dictionary_size)
{
    std::vector<int> ids(static_cast<std::size_t>(std::max(0, dictionary_size)));
    for (int i = 0; i < dictionary_size; ++i) {
        ids[i] = i;
    }
    return from_ids(std::move(ids));
}

ClassMap ClassMap::from_ids(std::vector<int> ids)
{
    ClassMap m;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0) {
            throw std::invalid_argument("class map ids must be non-negative");
        }
        if (!m.classes_.emplace(ids[i], static_cast<int>(i)).second) {
            throw std::invalid_argument("class map id " + std::to_string(ids[i]) + " repeated");
        }
    }
    m.ids_ = std::move(ids);
    return m;
}

int ClassMap::class_of(int id) const noexcept
{
    const auto it = classes_.find(id);
    return it == classes_.end() ? -1 : it->second;
}

std::string ClassMap::class_name(int class_index) const
{
    return "marker_" + std::to_string(id_of(class_index));
}

std::string AnnotationSummary::to_json() const
{
    nlohmann::ordered_json skipped_json = nlohmann::ordered_json::array();
    for (const auto& s : skipped) {
        skipped_json.push_back({{"file", s.file}, {"reason", s.reason}});
    }
    const nlohmann::ordered_json doc = {{"images_processed", images_processed},
                                        {"images_with_detections", images_with_detections},
                                        {"total_records", total_records},
                                        {"per_class", per_class},
                                        {"skipped", skipped_json}};
    return doc.dump(2) + "\n";
}

namespace {

std::vector<AnnotationRecord> records_from(const std::vector<Detection>& detections, int width,
                                           int height, const AnnotateOptions& options,
                                           const ClassMap& class_map)
{
    std::vector<AnnotationRecord> records;
    for (const Detection& d : detections) {
        const int cls = class_map.class_of(d.id);
        if (cls < 0 || d.confidence < options.min_confidence) {
            continue;
        }
        try {
            records.push_back({cls, quad_to_bbox(d.corners, width, height)});
        } catch (const ZeroArea&) {
        }
    }
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        if (a.class_index != b.class_index) {
            return a.class_index < b.class_index;
        }
        if (a.bbox.cx != b.bbox.cx) {
            return a.bbox.cx < b.bbox.cx;
        }
        return a.bbox.cy < b.bbox.cy;
    });
    return records;
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(path.string() + ": cannot open for writing");
    }
    out << text;
    if (!out.flush()) {
        throw IoError(path.string() + ": write failed");
    }
}

} // namespace

std::vector<AnnotationRecord> annotate_image(const GrayImage& image, const MarkerDictionary& dict,
                                             const AnnotateOptions& options,
                                             const ClassMap& class_map)
{
    return records_from(detect_markers(image, dict, options.detect), image.width, image.height,
                        options, class_map);
}

std::vector<AnnotationRecord> annotate_image(const RgbImage& image, const MarkerDictionary& dict,
                                             const AnnotateOptions& options,
                                             const ClassMap& class_map)
{
    return annotate_image(to_gray(image), dict, options, class_map);
}

std::vector<fs::path> list_images(const fs::path& dir)
{
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_supported_image(entry.path())) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    return files;
}

AnnotationSummary annotate_dataset(const fs::path& input_dir, const fs::path& output_dir,
                                   const MarkerDictionary& dict, const AnnotateOptions& options)
{
    return annotate_dataset(input_dir, output_dir, dict, options, ClassMap::identity(dict.size()));
}

AnnotationSummary annotate_dataset(const fs::path& input_dir, const fs::path& output_dir,
                                   const MarkerDictionary& dict, const AnnotateOptions& options,
                                   const ClassMap& class_map)
{
    options.detect.validate();
    if (!fs::is_directory(input_dir)) {
        throw IoError(input_dir.string() + ": not a directory");
    }
    fs::create_directories(output_dir);
    const auto files = list_images(input_dir);

    struct Outcome
    {
        std::optional<std::vector<AnnotationRecord>> records;
        std::string error;
    };
    std::vector<Outcome> outcomes(files.size());
    parallel_for(files.size(), options.jobs, [&](std::size_t i) {
        RgbImage image;
        try {
            image = read_rgb(files[i]);
        } catch (const Error& e) {
            outcomes[i].error = e.what();
            return;
        }
        auto records = annotate_image(image, dict, options, class_map);
        write_file(output_dir / (files[i].stem().string() + ".txt"), format_labels(records));
        outcomes[i].records = std::move(records);
    });

    AnnotationSummary summary;
    summary.per_class.assign(static_cast<std::size_t>(class_map.size()), 0);
    for (std::size_t i = 0; i < files.size(); ++i) {
        const Outcome& o = outcomes[i];
        if (!o.records) {
            summary.skipped.push_back({files[i].filename().string(), o.error});
            continue;
        }
        ++summary.images_processed;
        if (!o.records->empty()) {
            ++summary.images_with_detections;
        }
        for (const auto& r : *o.records) {
            ++summary.total_records;
            ++summary.per_class[r.class_index];
        }
    }

    std::string classes;
    for (int c = 0; c < class_map.size(); ++c) {
        classes += class_map.class_name(c) + "\n";
    }
    write_file(output_dir / "classes.txt", classes);
    write_file(output_dir / "summary.json", summary.to_json());
    return summary;
}

} // namespace autotag
