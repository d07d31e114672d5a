#include "autotag/synth.hpp"

#include "autotag/errors.hpp"
#include "autotag/image_io.hpp"
#include "autotag/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <stdexcept>

namespace autotag {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::array<Split, 3> kSplits{Split::Train, Split::Val, Split::Test};

// Distinct per-split constants folded into the per-image seed.
constexpr std::uint64_t split_tag(Split s) noexcept
{
    switch (s) {
    case Split::Train: return 0x7472000000000000ULL;
    case Split::Val: return 0x7661000000000000ULL;
    case Split::Test: return 0x7465000000000000ULL;
    }
    return 0;
}

int split_count(const DatasetConfig& c, Split s) noexcept
{
    switch (s) {
    case Split::Train: return c.train;
    case Split::Val: return c.val;
    case Split::Test: return c.test;
    }
    return 0;
}

std::vector<int> marker_ids(const DatasetConfig& c, const MarkerDictionary& dict)
{
    if (!c.marker_ids.empty()) {
        for (int id : c.marker_ids) {
            (void)dict.bits(id);
        }
        return c.marker_ids;
    }
    std::vector<int> ids(static_cast<std::size_t>(dict.size()));
    for (int i = 0; i < dict.size(); ++i) {
        ids[i] = i;
    }
    return ids;
}

ojson policy_to_json(const DegradationPolicy& p)
{
    return {{"probability", p.probability},
            {"max_blur_length", p.max_blur_length},
            {"max_defocus_radius", p.max_defocus_radius},
            {"max_noise_sigma", p.max_noise_sigma},
            {"max_occlusion", p.max_occlusion}};
}

template <typename T>
void read_key(const ojson& j, const char* key, T& out)
{
    if (j.contains(key)) {
        j.at(key).get_to(out);
    }
}

DegradationPolicy policy_from_json(const ojson& j, DegradationPolicy p)
{
    read_key(j, "probability", p.probability);
    read_key(j, "max_blur_length", p.max_blur_length);
    read_key(j, "max_defocus_radius", p.max_defocus_radius);
    read_key(j, "max_noise_sigma", p.max_noise_sigma);
    read_key(j, "max_occlusion", p.max_occlusion);
    return p;
}

std::string image_extension(const DatasetConfig& c)
{
    return "." + c.image_format;
}

std::string make_stem(Split split, int id, int k)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_m%02d_%04d", to_string(split), id, k);
    return buf;
}

struct SampledDegradation
{
    DegradationSpec spec;
    ojson record;
};

SampledDegradation sample_degradation(const DegradationPolicy& policy, Rng& rng)
{
    SampledDegradation out{{}, nullptr};
    const double draw = uniform01(rng);
    std::vector<const char*> kinds;
    if (policy.max_blur_length > 1) {
        kinds.push_back("motion_blur");
    }
    if (policy.max_defocus_radius > 0) {
        kinds.push_back("defocus");
    }
    if (policy.max_noise_sigma > 0) {
        kinds.push_back("noise");
    }
    if (policy.max_occlusion > 0) {
        kinds.push_back("occlusion");
    }
    if (kinds.empty() || !(draw < policy.probability)) {
        return out;
    }
    const std::string kind =
        kinds[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(kinds.size()) - 1))];
    if (kind == "motion_blur") {
        MotionBlurSpec m;
        m.length = static_cast<int>(uniform_int(rng, 2, policy.max_blur_length));
        m.angle = uniform(rng, 0.0, 3.141592653589793);
        out.spec.motion_blur = m;
        out.record = {{"kind", kind}, {"length", m.length}, {"angle", m.angle}};
    } else if (kind == "defocus") {
        const double r = uniform(rng, 1.0, std::max(1.0, policy.max_defocus_radius));
        out.spec.defocus_radius = r;
        out.record = {{"kind", kind}, {"radius", r}};
    } else if (kind == "noise") {
        const double s = uniform(rng, 0.0, policy.max_noise_sigma);
        out.spec.noise_sigma = s;
        out.record = {{"kind", kind}, {"sigma", s}};
    } else {
        OcclusionSpec o;
        o.fraction = uniform(rng, 0.0, policy.max_occlusion);
        o.count = static_cast<int>(uniform_int(rng, 1, 3));
        out.spec.occlusion = o;
        out.record = {{"kind", kind}, {"fraction", o.fraction}, {"count", o.count}};
    }
    return out;
}

std::vector<RgbImage> load_background_pool(const DatasetConfig& c)
{
    std::vector<RgbImage> pool;
    if (std::find(c.backgrounds.begin(), c.backgrounds.end(), "dir") == c.backgrounds.end()) {
        return pool;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(c.background_dir)) {
        if (entry.is_regular_file() && is_supported_image(entry.path())) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        pool.push_back(resize_bilinear(read_rgb(f), c.width, c.height));
    }
    if (pool.empty()) {
        throw IoError(c.background_dir.string() + ": no background images");
    }
    return pool;
}

} // namespace

const char* to_string(Split s) noexcept
{
    switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
    }
    return "?";
}

std::uint64_t image_seed(std::uint64_t master, Split split, std::uint64_t index)
{
    return mix64(master ^ split_tag(split) ^ index);
}

void DatasetConfig::validate() const
{
    if (train < 0 || val < 0 || test < 0) {
        throw std::invalid_argument("split counts must be >= 0");
    }
    if (width < 16 || height < 16) {
        throw std::invalid_argument("image size must be at least 16x16");
    }
    if (!(marker_side >= 8.0)) {
        throw std::invalid_argument("marker_side must be >= 8 px");
    }
    if (!(max_tilt >= 0.0 && max_tilt < 1.4)) {
        throw std::invalid_argument("max_tilt must lie in [0, 1.4) rad");
    }
    if (!(max_roll >= 0.0) || !std::isfinite(max_roll)) {
        throw std::invalid_argument("max_roll must be finite and >= 0");
    }
    augmentation.validate();
    for (const auto& p : degradation) {
        if (!(p.probability >= 0.0 && p.probability <= 1.0)) {
            throw std::invalid_argument("degradation probability must lie in [0, 1]");
        }
        if (p.max_blur_length < 0 || !(p.max_defocus_radius >= 0.0) ||
            !(p.max_noise_sigma >= 0.0)) {
            throw std::invalid_argument("degradation maxima must be >= 0");
        }
        if (!(p.max_occlusion >= 0.0 && p.max_occlusion < 1.0)) {
            throw std::invalid_argument("max_occlusion must lie in [0, 1)");
        }
    }
    if (backgrounds.empty()) {
        throw std::invalid_argument("at least one background kind is required");
    }
    for (const auto& b : backgrounds) {
        if (b != "solid" && b != "noise" && b != "dir") {
            throw std::invalid_argument("unknown background kind '" + b + "'");
        }
        if (b == "dir" && background_dir.empty()) {
            throw std::invalid_argument("background kind 'dir' needs background_dir");
        }
    }
    if (image_format != "png" && image_format != "ppm") {
        throw std::invalid_argument("image_format must be png or ppm");
    }
}

std::string DatasetConfig::to_json() const
{
    ojson aug = {{"brightness", augmentation.brightness},
                 {"contrast", augmentation.contrast},
                 {"hue", augmentation.hue},
                 {"saturation", augmentation.saturation},
                 {"scale_min", augmentation.scale_min},
                 {"scale_max", augmentation.scale_max},
                 {"fixed_position", nullptr}};
    if (augmentation.fixed_position) {
        aug["fixed_position"] = {augmentation.fixed_position->x, augmentation.fixed_position->y};
    }
    const ojson doc = {{"marker_ids", marker_ids},
                       {"train", train},
                       {"val", val},
                       {"test", test},
                       {"seed", seed},
                       {"width", width},
                       {"height", height},
                       {"marker_side", marker_side},
                       {"max_tilt", max_tilt},
                       {"max_roll", max_roll},
                       {"augmentation", aug},
                       {"degradation",
                        {{"train", policy_to_json(degradation[0])},
                         {"val", policy_to_json(degradation[1])},
                         {"test", policy_to_json(degradation[2])}}},
                       {"backgrounds", backgrounds},
                       {"background_dir", background_dir.string()},
                       {"image_format", image_format}};
    return doc.dump(2);
}

DatasetConfig DatasetConfig::from_json(const std::string& text)
{
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const ojson::exception& e) {
        throw std::invalid_argument(std::string("dataset config: ") + e.what());
    }
    if (!j.is_object()) {
        throw std::invalid_argument("dataset config must be a JSON object");
    }
    DatasetConfig c;
    try {
        read_key(j, "marker_ids", c.marker_ids);
        read_key(j, "train", c.train);
        read_key(j, "val", c.val);
        read_key(j, "test", c.test);
        read_key(j, "seed", c.seed);
        read_key(j, "width", c.width);
        read_key(j, "height", c.height);
        read_key(j, "marker_side", c.marker_side);
        read_key(j, "max_tilt", c.max_tilt);
        read_key(j, "max_roll", c.max_roll);
        read_key(j, "backgrounds", c.backgrounds);
        read_key(j, "image_format", c.image_format);
        read_key(j, "jobs", c.jobs);
        if (j.contains("background_dir")) {
            c.background_dir = j.at("background_dir").get<std::string>();
        }
        if (j.contains("augmentation")) {
            const ojson& a = j.at("augmentation");
            if (a.is_string()) {
                const auto name = a.get<std::string>();
                if (name == "none") {
                    c.augmentation = AugmentationSpec::none();
                } else if (name == "yolo") {
                    c.augmentation = AugmentationSpec::yolo();
                } else if (name != "default") {
                    throw std::invalid_argument("unknown augmentation preset '" + name + "'");
                }
            } else {
                read_key(a, "brightness", c.augmentation.brightness);
                read_key(a, "contrast", c.augmentation.contrast);
                read_key(a, "hue", c.augmentation.hue);
                read_key(a, "saturation", c.augmentation.saturation);
                read_key(a, "scale_min", c.augmentation.scale_min);
                read_key(a, "scale_max", c.augmentation.scale_max);
                if (a.contains("fixed_position") && !a.at("fixed_position").is_null()) {
                    const auto xy = a.at("fixed_position").get<std::vector<double>>();
                    if (xy.size() != 2) {
                        throw std::invalid_argument("fixed_position needs [x, y]");
                    }
                    c.augmentation.fixed_position = Point2d{xy[0], xy[1]};
                }
            }
        }
        if (j.contains("degradation")) {
            const ojson& d = j.at("degradation");
            for (std::size_t s = 0; s < kSplits.size(); ++s) {
                const char* name = to_string(kSplits[s]);
                if (d.contains(name)) {
                    c.degradation[s] = policy_from_json(d.at(name), c.degradation[s]);
                }
            }
        }
    } catch (const ojson::exception& e) {
        throw std::invalid_argument(std::string("dataset config: ") + e.what());
    }
    return c;
}

SampledImage synthesize_image(const DatasetConfig& config, const MarkerDictionary& dict,
                              Split split, int index, const std::vector<RgbImage>& background_pool)
{
    const std::vector<int> ids = marker_ids(config, dict);
    const int per_marker = split_count(config, split);
    if (index < 0 || per_marker == 0 ||
        index >= per_marker * static_cast<int>(ids.size())) {
        throw std::out_of_range("image index outside the split");
    }
    const int id = ids[static_cast<std::size_t>(index / per_marker)];
    const int k = index % per_marker;
    const std::uint64_t seed = image_seed(config.seed, split, static_cast<std::uint64_t>(index));
    Rng rng(seed);

    // Background.
    const std::string& kind = config.backgrounds[static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<int>(config.backgrounds.size()) - 1))];
    RgbImage background;
    ojson bg_record = {{"kind", kind}};
    if (kind == "solid") {
        const auto level = static_cast<std::uint8_t>(uniform_int(rng, 40, 220));
        background = solid_background(config.width, config.height, level);
        bg_record["level"] = level;
    } else if (kind == "noise") {
        background = noise_background(config.width, config.height, rng);
    } else {
        if (background_pool.empty()) {
            throw std::invalid_argument("background kind 'dir' needs a loaded image pool");
        }
        const auto pick = static_cast<std::size_t>(
            uniform_int(rng, 0, static_cast<int>(background_pool.size()) - 1));
        background = background_pool[pick];
        bg_record["index"] = pick;
    }

    // Placement.
    const AugmentationSpec& aug = config.augmentation;
    Placement p;
    p.id = id;
    p.side = config.marker_side * uniform(rng, 1.0 - aug.scale_min, 1.0 + aug.scale_max);
    p.tilt = uniform(rng, 0.0, config.max_tilt);
    p.tilt_axis = uniform(rng, 0.0, 3.141592653589793);
    p.roll = uniform(rng, -config.max_roll, config.max_roll);
    const Box fp = placement_footprint(p, dict.cells);  // centred on the origin
    const double lo_x = -fp.x0 + 1.0;
    const double hi_x = config.width - fp.x1 - 1.0;
    const double lo_y = -fp.y0 + 1.0;
    const double hi_y = config.height - fp.y1 - 1.0;
    if (aug.fixed_position) {
        p.center = *aug.fixed_position;
    } else {
        if (lo_x > hi_x || lo_y > hi_y) {
            throw std::invalid_argument("marker of side " + std::to_string(p.side) +
                                        " px does not fit a " + std::to_string(config.width) +
                                        "x" + std::to_string(config.height) + " image");
        }
        p.center = {uniform(rng, lo_x, hi_x), uniform(rng, lo_y, hi_y)};
    }

    SampledImage out;
    out.stem = make_stem(split, id, k);
    out.scene = compose_scene(background, {p}, dict);

    const JitterFactors jitter = sample_jitter(aug, rng);
    out.scene.image = apply_jitter(out.scene.image, jitter);

    const SampledDegradation deg =
        sample_degradation(config.degradation[static_cast<std::size_t>(split)], rng);
    if (deg.spec.any()) {
        out.scene.image = apply_degradation(out.scene.image, deg.spec, rng);
    }

    ojson corners = ojson::array();
    for (const Point2d& c : out.scene.truths.front().quad.corners) {
        corners.push_back({c.x, c.y});
    }
    const ojson placement = {{"id", p.id},
                             {"side", p.side},
                             {"center", {p.center.x, p.center.y}},
                             {"tilt", p.tilt},
                             {"tilt_axis", p.tilt_axis},
                             {"roll", p.roll},
                             {"corners", corners}};
    const ojson record = {
        {"file", std::string("images/") + to_string(split) + "/" + out.stem +
                     image_extension(config)},
        {"label", std::string("labels/") + to_string(split) + "/" + out.stem + ".txt"},
        {"split", to_string(split)},
        {"seed", seed},
        {"background", bg_record},
        {"placements", ojson::array({placement})},
        {"jitter",
         {{"brightness", jitter.brightness},
          {"contrast", jitter.contrast},
          {"hue", jitter.hue},
          {"saturation", jitter.saturation}}},
        {"degradation", deg.record}};
    out.record = record.dump();
    return out;
}

DatasetResult build_dataset(const DatasetConfig& config, const MarkerDictionary& dict,
                            const fs::path& output_dir)
{
    config.validate();
    const std::vector<int> ids = marker_ids(config, dict);
    const std::vector<RgbImage> pool = load_background_pool(config);

    for (Split s : kSplits) {
        fs::create_directories(output_dir / "images" / to_string(s));
        fs::create_directories(output_dir / "labels" / to_string(s));
    }

    ojson manifest = {{"seed", config.seed},
                      {"config", ojson::parse(config.to_json())},
                      {"counts", ojson::object()},
                      {"images", ojson::array()}};
    DatasetResult result;
    std::optional<std::string> failure;
    std::exception_ptr error;

    for (std::size_t si = 0; si < kSplits.size() && !failure; ++si) {
        const Split split = kSplits[si];
        const std::size_t total =
            static_cast<std::size_t>(split_count(config, split)) * ids.size();
        std::vector<std::string> records(total);
        try {
            parallel_for(total, config.jobs, [&](std::size_t i) {
                SampledImage img = synthesize_image(config, dict, split, static_cast<int>(i), pool);
                std::vector<AnnotationRecord> labels;
                for (const GroundTruth& gt : img.scene.truths) {
                    labels.push_back({gt.id, gt.bbox});
                }
                const fs::path image_path = output_dir / "images" / to_string(split) /
                                            (img.stem + image_extension(config));
                write_image(image_path, img.scene.image);
                write_text_atomic(output_dir / "labels" / to_string(split) / (img.stem + ".txt"),
                                  format_labels(labels));
                records[i] = std::move(img.record);
            });
        } catch (const std::exception& e) {
            failure = e.what();
            error = std::current_exception();
        }
        int done = 0;
        for (const auto& r : records) {
            if (!r.empty()) {
                manifest["images"].push_back(ojson::parse(r));
                ++done;
            }
        }
        manifest["counts"][to_string(split)] = done;
        result.per_split[si] = done;
        result.images += done;
    }

    std::string classes;
    for (int id = 0; id < dict.size(); ++id) {
        classes += "marker_" + std::to_string(id) + "\n";
    }
    if (failure) {
        manifest["error"] = *failure;
    }
    result.manifest = manifest.dump(2) + "\n";
    write_text_atomic(output_dir / "manifest.json", result.manifest);
    if (error) {
        std::rethrow_exception(error);
    }
    write_text_atomic(output_dir / "classes.txt", classes);
    return result;
}

} // namespace autotag
