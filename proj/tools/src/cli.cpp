#include "cli.hpp"

#include "autotag/annotator.hpp"
#include "autotag/detector.hpp"
#include "autotag/dictionary.hpp"
#include "autotag/errors.hpp"
#include "autotag/evaluator.hpp"
#include "autotag/image_io.hpp"
#include "autotag/parallel.hpp"
#include "autotag/synth.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

namespace autotag::cli {

namespace fs = std::filesystem;

namespace {

// Reads a JSON object into CLI11 config items. Flat keys bind to the active
// subcommand when it owns an option of that name, otherwise to the root;
// nested objects address subcommands explicitly. Underscores match dashes.
class JsonConfig : public CLI::Config
{
public:
    JsonConfig(const CLI::App* root, const CLI::App* active) : root_(root), active_(active) {}

    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override
    {
        nlohmann::ordered_json j = nlohmann::ordered_json::object();
        for (const CLI::Option* opt : app->get_options()) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) {
                continue;
            }
            const std::string& name = opt->get_lnames().front();
            if (opt->count() > 0) {
                const auto& results = opt->results();
                if (results.size() == 1) {
                    j[name] = results.front();
                } else {
                    j[name] = results;
                }
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        }
        return j.dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override
    {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw CLI::ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) {
            throw CLI::ConfigError("config must be a JSON object");
        }
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j.items()) {
            const std::string name = dashed(key);
            if (value.is_object()) {
                const CLI::App* sub = root_->get_subcommand_no_throw(key);
                if (sub == nullptr) {
                    throw CLI::ConfigError("config section '" + key + "' matches no subcommand");
                }
                for (const auto& [sub_key, sub_value] : value.items()) {
                    if (sub->get_option_no_throw("--" + dashed(sub_key)) == nullptr) {
                        throw CLI::ConfigError("config key '" + key + "." + sub_key +
                                               "' matches no option");
                    }
                    add_item(items, {key}, dashed(sub_key), sub_value);
                }
                continue;
            }
            std::vector<std::string> parents;
            if (active_ != nullptr && active_->get_option_no_throw("--" + name) != nullptr) {
                parents.push_back(active_->get_name());
            } else if (root_->get_option_no_throw("--" + name) == nullptr) {
                throw CLI::ConfigError("config key '" + key + "' matches no option");
            }
            add_item(items, parents, name, value);
        }
        return items;
    }

private:
    static std::string dashed(std::string s)
    {
        for (char& c : s) {
            if (c == '_') {
                c = '-';
            }
        }
        return s;
    }

    static std::string scalar(const nlohmann::json& v)
    {
        if (v.is_string()) {
            return v.get<std::string>();
        }
        if (v.is_boolean()) {
            return v.get<bool>() ? "true" : "false";
        }
        return v.dump();
    }

    static void add_item(std::vector<CLI::ConfigItem>& items, std::vector<std::string> parents,
                         std::string name, const nlohmann::json& value)
    {
        if (value.is_null()) {
            return;
        }
        CLI::ConfigItem item;
        item.parents = std::move(parents);
        item.name = std::move(name);
        if (value.is_array()) {
            for (const auto& v : value) {
                item.inputs.push_back(scalar(v));
            }
        } else {
            item.inputs.push_back(scalar(value));
        }
        items.push_back(std::move(item));
    }

    const CLI::App* root_;
    const CLI::App* active_;
};

struct Logger
{
    std::ostream& err;
    int verbosity = 0;

    void info(const std::string& msg) const
    {
        if (verbosity > 0) {
            err << msg << "\n";
        }
    }
};

void add_detect_options(CLI::App* sub, DetectParams& p)
{
    sub->add_option("--window", p.window, "Adaptive threshold window (odd, px)")
        ->capture_default_str();
    sub->add_option("--offset", p.offset, "Adaptive threshold offset (gray levels)")
        ->capture_default_str();
    sub->add_option("--min-area", p.min_area, "Minimum quad area as image fraction")
        ->capture_default_str();
    sub->add_option("--max-area", p.max_area, "Maximum quad area as image fraction")
        ->capture_default_str();
    sub->add_option("--epsilon", p.epsilon, "Polygon simplification, fraction of perimeter")
        ->capture_default_str();
    sub->add_option("--cell-margin", p.cell_margin, "Ignored border of each cell when sampling")
        ->capture_default_str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_text_atomic(path, text);
    }
}

std::vector<fs::path> image_inputs(const fs::path& input)
{
    if (fs::is_directory(input)) {
        return list_images(input);
    }
    if (!is_supported_image(input)) {
        throw IoError(input.string() + ": unsupported image type");
    }
    return {input};
}

struct ImageDetections
{
    std::string name;
    int width = 0;
    int height = 0;
    std::vector<Detection> detections;
};

std::vector<ImageDetections> detect_all(const std::vector<fs::path>& files,
                                        const MarkerDictionary& dict, const DetectParams& params,
                                        int jobs)
{
    std::vector<ImageDetections> results(files.size());
    parallel_for(files.size(), jobs, [&](std::size_t i) {
        const GrayImage image = read_gray(files[i]);
        results[i] = {files[i].filename().string(), image.width, image.height,
                      detect_markers(image, dict, params)};
    });
    return results;
}

std::vector<Prediction> predictions_of(const std::vector<ImageDetections>& all)
{
    std::vector<Prediction> preds;
    for (const auto& r : all) {
        auto p = to_predictions(r.name, r.detections, r.width, r.height);
        preds.insert(preds.end(), p.begin(), p.end());
    }
    return preds;
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(path.string() + ": cannot open");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Fiducial marker detection, auto-annotation, synthesis and evaluation",
                 "autotag"};
    app.require_subcommand(1);
    int verbosity = 0;
    app.add_flag("-v,--verbose", verbosity, "Progress messages on standard error");
    app.set_config("--config", "", "JSON file mirroring the flags; flags win");

    // gen-dict
    auto* gen = app.add_subcommand("gen-dict", "Generate a marker dictionary");
    int gen_cells = 5;
    int gen_count = 28;
    int gen_tau = 7;
    std::uint64_t gen_seed = 42;
    std::int64_t gen_budget = kDefaultGenerationBudget;
    std::string gen_out;
    gen->add_option("--cells", gen_cells, "Payload cells per side")->capture_default_str();
    gen->add_option("--count", gen_count, "Number of markers")->capture_default_str();
    gen->add_option("--tau", gen_tau, "Minimum rotational Hamming distance")
        ->capture_default_str();
    gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
    gen->add_option("--budget", gen_budget, "Candidate draws before giving up")
        ->capture_default_str();
    gen->add_option("-o,--output", gen_out, "Output JSON (default: standard output)");

    // render
    auto* render = app.add_subcommand("render", "Render marker images");
    std::string render_dict;
    std::vector<int> render_ids;
    int render_ppc = 10;
    int render_quiet = 1;
    std::string render_out;
    render->add_option("--dict", render_dict, "Dictionary JSON")->required()->check(CLI::ExistingFile);
    render->add_option("--ids", render_ids, "Marker ids (default: all)")->delimiter(',');
    render->add_option("--ppc", render_ppc, "Pixels per cell")->capture_default_str();
    render->add_option("--quiet-zone", render_quiet, "White margin in cells")->capture_default_str();
    render->add_option("-o,--output", render_out, "Output directory")->required();

    // synth
    auto* synth = app.add_subcommand("synth", "Build a synthetic train/val/test dataset");
    std::string synth_dict;
    std::string synth_out;
    std::string synth_dataset_config;
    DatasetConfig sc;
    double synth_tilt_deg = 30.0;
    double synth_roll_deg = 180.0;
    std::string synth_aug = "default";
    double deg_prob = 0.5;
    int max_blur = 15;
    double max_defocus = 3.0;
    double max_noise = 8.0;
    double max_occlusion = 0.0;
    synth->add_option("--dict", synth_dict, "Dictionary JSON")->required()->check(CLI::ExistingFile);
    synth->add_option("-o,--output", synth_out, "Output directory")->required();
    synth->add_option("--dataset-config", synth_dataset_config, "DatasetConfig JSON")
        ->check(CLI::ExistingFile);
    auto* o_train = synth->add_option("--train", sc.train, "Training images per marker")
                        ->capture_default_str();
    auto* o_val =
        synth->add_option("--val", sc.val, "Validation images per marker")->capture_default_str();
    auto* o_test =
        synth->add_option("--test", sc.test, "Test images per marker")->capture_default_str();
    auto* o_seed = synth->add_option("--seed", sc.seed, "Master seed")->capture_default_str();
    auto* o_width = synth->add_option("--width", sc.width, "Image width")->capture_default_str();
    auto* o_height =
        synth->add_option("--height", sc.height, "Image height")->capture_default_str();
    auto* o_side = synth->add_option("--marker-side", sc.marker_side, "Marker side in px")
                       ->capture_default_str();
    auto* o_tilt = synth->add_option("--max-tilt", synth_tilt_deg, "Maximum tilt, degrees")
                       ->capture_default_str();
    auto* o_roll = synth->add_option("--max-roll", synth_roll_deg, "Maximum roll, degrees")
                       ->capture_default_str();
    auto* o_ids = synth->add_option("--ids", sc.marker_ids, "Marker ids (default: all)")
                      ->delimiter(',');
    auto* o_aug = synth->add_option("--augmentation", synth_aug, "default, none or yolo")
                      ->check(CLI::IsMember({"default", "none", "yolo"}))
                      ->capture_default_str();
    auto* o_prob =
        synth->add_option("--degradation-prob", deg_prob, "Per-image degradation probability")
            ->capture_default_str();
    auto* o_blur = synth->add_option("--max-blur", max_blur, "Maximum motion blur length, px")
                       ->capture_default_str();
    auto* o_defocus = synth->add_option("--max-defocus", max_defocus, "Maximum defocus radius")
                          ->capture_default_str();
    auto* o_noise = synth->add_option("--max-noise", max_noise, "Maximum noise sigma")
                        ->capture_default_str();
    auto* o_occ = synth->add_option("--max-occlusion", max_occlusion, "Maximum occluded fraction")
                      ->capture_default_str();
    auto* o_bg = synth->add_option("--backgrounds", sc.backgrounds, "solid, noise, dir")
                     ->delimiter(',');
    std::string bg_dir;
    auto* o_bg_dir = synth->add_option("--background-dir", bg_dir, "Background image directory");
    auto* o_format =
        synth->add_option("--format", sc.image_format, "png or ppm")->capture_default_str();
    int synth_jobs = 1;
    synth->add_option("--jobs", synth_jobs, "Worker threads")->capture_default_str();

    // annotate
    auto* annotate = app.add_subcommand("annotate", "Write YOLO labels from classical detections");
    std::string ann_dict;
    std::string ann_in;
    std::string ann_out;
    AnnotateOptions ann;
    annotate->add_option("--dict", ann_dict, "Dictionary JSON")->required()->check(CLI::ExistingFile);
    annotate->add_option("-i,--input", ann_in, "Image directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    annotate->add_option("-o,--output", ann_out, "Label directory")->required();
    annotate->add_option("--min-confidence", ann.min_confidence, "Drop weaker detections")
        ->capture_default_str();
    annotate->add_option("--jobs", ann.jobs, "Worker threads")->capture_default_str();
    add_detect_options(annotate, ann.detect);

    // detect
    auto* detect = app.add_subcommand("detect", "Detect markers and print JSON lines");
    std::string det_dict;
    std::string det_in;
    std::string det_out;
    std::string det_preds;
    DetectParams det_params;
    int det_jobs = 1;
    detect->add_option("--dict", det_dict, "Dictionary JSON")->required()->check(CLI::ExistingFile);
    detect->add_option("-i,--input", det_in, "Image file or directory")
        ->required()
        ->check(CLI::ExistingPath);
    detect->add_option("-o,--output", det_out, "JSON lines file (default: standard output)");
    detect->add_option("--predictions", det_preds, "Also write a predictions CSV");
    detect->add_option("--jobs", det_jobs, "Worker threads")->capture_default_str();
    add_detect_options(detect, det_params);

    // eval
    auto* eval = app.add_subcommand("eval", "Threshold sweep of a predictions file");
    std::string eval_preds;
    std::string eval_labels;
    double eval_iou = 0.5;
    std::vector<double> eval_thresholds = default_thresholds();
    std::string eval_dataset;
    std::string eval_method = "external";
    std::string eval_out;
    eval->add_option("--preds", eval_preds, "Predictions CSV")->required()->check(CLI::ExistingFile);
    eval->add_option("--labels", eval_labels, "Ground-truth label directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    eval->add_option("--iou", eval_iou, "Minimum IoU for a match")->capture_default_str();
    eval->add_option("--thresholds", eval_thresholds, "Confidence thresholds")->delimiter(',');
    eval->add_option("--dataset", eval_dataset, "Dataset tag for the report");
    eval->add_option("--method", eval_method, "Method tag for the report")->capture_default_str();
    eval->add_option("-o,--output", eval_out,
                     "Report prefix for .csv and .json (default: CSV on standard output)");

    // compare
    auto* compare = app.add_subcommand("compare", "Classical detector versus external predictions");
    std::string cmp_dict;
    std::string cmp_images;
    std::string cmp_labels;
    std::string cmp_preds;
    double cmp_iou = 0.5;
    std::vector<double> cmp_thresholds = default_thresholds();
    std::string cmp_dataset;
    std::string cmp_method = "external";
    std::string cmp_out;
    DetectParams cmp_params;
    int cmp_jobs = 1;
    compare->add_option("--dict", cmp_dict, "Dictionary JSON")->required()->check(CLI::ExistingFile);
    compare->add_option("--images", cmp_images, "Test image directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    compare->add_option("--labels", cmp_labels, "Ground-truth label directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    compare->add_option("--preds", cmp_preds, "External predictions CSV")
        ->required()
        ->check(CLI::ExistingFile);
    compare->add_option("--iou", cmp_iou, "Minimum IoU for a match")->capture_default_str();
    compare->add_option("--thresholds", cmp_thresholds, "Confidence thresholds")->delimiter(',');
    compare->add_option("--dataset", cmp_dataset, "Dataset tag for the report");
    compare->add_option("--method", cmp_method, "Tag of the external predictions")
        ->capture_default_str();
    compare->add_option("-o,--output", cmp_out,
                        "Report prefix for .csv and .json (default: CSV on standard output)");
    compare->add_option("--jobs", cmp_jobs, "Worker threads")->capture_default_str();
    add_detect_options(compare, cmp_params);

    for (CLI::App* sub : app.get_subcommands({})) {
        sub->fallthrough();
    }

    const CLI::App* active = nullptr;
    for (const std::string& a : args) {
        if (auto* sub = app.get_subcommand_no_throw(a)) {
            active = sub;
            break;
        }
    }
    app.config_formatter(std::make_shared<JsonConfig>(&app, active));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const std::string sub = active != nullptr ? active->get_name() + " " : "";
        err << "Run 'autotag " << sub << "--help' for usage.\n";
        return kUsage;
    }

    const Logger log{err, verbosity};
    try {
        if (*gen) {
            const MarkerDictionary dict =
                generate_dictionary(gen_cells, gen_count, gen_tau, gen_seed, gen_budget);
            if (const auto violation = find_dictionary_violation(dict)) {
                throw Error("generated dictionary is invalid: " + *violation);
            }
            write_output(gen_out, dictionary_to_json(dict), out);
            log.info("dictionary: " + std::to_string(dict.size()) + " markers, " +
                     std::to_string(dict.cells) + "x" + std::to_string(dict.cells) +
                     ", tau " + std::to_string(dict.tau));
        } else if (*render) {
            const MarkerDictionary dict = load_dictionary(render_dict);
            if (render_ids.empty()) {
                for (int i = 0; i < dict.size(); ++i) {
                    render_ids.push_back(i);
                }
            }
            fs::create_directories(render_out);
            for (int id : render_ids) {
                const GrayImage img = render_marker(dict, id, render_ppc, render_quiet);
                write_image(fs::path(render_out) / ("marker_" + std::to_string(id) + ".png"), img);
            }
            log.info("rendered " + std::to_string(render_ids.size()) + " markers");
        } else if (*synth) {
            const MarkerDictionary dict = load_dictionary(synth_dict);
            DatasetConfig config;
            if (!synth_dataset_config.empty()) {
                config = DatasetConfig::from_json(read_text(synth_dataset_config));
            }
            const auto given = [](const CLI::Option* o) { return o->count() > 0; };
            if (given(o_train)) config.train = sc.train;
            if (given(o_val)) config.val = sc.val;
            if (given(o_test)) config.test = sc.test;
            if (given(o_seed)) config.seed = sc.seed;
            if (given(o_width)) config.width = sc.width;
            if (given(o_height)) config.height = sc.height;
            if (given(o_side)) config.marker_side = sc.marker_side;
            if (given(o_tilt)) config.max_tilt = synth_tilt_deg * std::numbers::pi / 180.0;
            if (given(o_roll)) config.max_roll = synth_roll_deg * std::numbers::pi / 180.0;
            if (given(o_ids)) config.marker_ids = sc.marker_ids;
            if (given(o_aug)) {
                config.augmentation = synth_aug == "none"   ? AugmentationSpec::none()
                                      : synth_aug == "yolo" ? AugmentationSpec::yolo()
                                                            : AugmentationSpec{};
            }
            for (auto& p : config.degradation) {
                if (given(o_prob)) p.probability = deg_prob;
                if (given(o_blur)) p.max_blur_length = max_blur;
                if (given(o_defocus)) p.max_defocus_radius = max_defocus;
                if (given(o_noise)) p.max_noise_sigma = max_noise;
                if (given(o_occ)) p.max_occlusion = max_occlusion;
            }
            if (given(o_bg)) config.backgrounds = sc.backgrounds;
            if (given(o_bg_dir)) config.background_dir = bg_dir;
            if (given(o_format)) config.image_format = sc.image_format;
            config.jobs = synth_jobs;
            const DatasetResult result = build_dataset(config, dict, synth_out);
            log.info("dataset: " + std::to_string(result.per_split[0]) + " train, " +
                     std::to_string(result.per_split[1]) + " val, " +
                     std::to_string(result.per_split[2]) + " test images");
        } else if (*annotate) {
            const MarkerDictionary dict = load_dictionary(ann_dict);
            const AnnotationSummary summary = annotate_dataset(ann_in, ann_out, dict, ann);
            for (const auto& s : summary.skipped) {
                err << "warning: skipped " << s.file << ": " << s.reason << "\n";
            }
            log.info("annotated " + std::to_string(summary.images_processed) + " images, " +
                     std::to_string(summary.total_records) + " labels");
        } else if (*detect) {
            det_params.validate();
            const MarkerDictionary dict = load_dictionary(det_dict);
            const auto files = image_inputs(det_in);
            const auto all = detect_all(files, dict, det_params, det_jobs);
            std::string lines;
            for (const auto& r : all) {
                for (const Detection& d : r.detections) {
                    lines += detection_to_json_line(r.name, d);
                }
            }
            write_output(det_out, lines, out);
            if (!det_preds.empty()) {
                write_text_atomic(det_preds, format_predictions(predictions_of(all)));
            }
            log.info("processed " + std::to_string(files.size()) + " images");
        } else if (*eval) {
            const auto preds = load_predictions(eval_preds);
            const auto truths = load_truths(eval_labels);
            EvalReport report = threshold_sweep(preds, truths, eval_thresholds, eval_iou);
            report.dataset = eval_dataset;
            report.method = eval_method;
            if (eval_out.empty()) {
                out << report.to_csv();
            } else {
                write_report(report, eval_out);
            }
        } else if (*compare) {
            cmp_params.validate();
            const MarkerDictionary dict = load_dictionary(cmp_dict);
            const auto truths = load_truths(cmp_labels);
            const auto external = load_predictions(cmp_preds);
            const auto classical =
                predictions_of(detect_all(list_images(cmp_images), dict, cmp_params, cmp_jobs));
            EvalReport a = threshold_sweep(classical, truths, cmp_thresholds, cmp_iou);
            a.dataset = cmp_dataset;
            a.method = "classical";
            EvalReport b = threshold_sweep(external, truths, cmp_thresholds, cmp_iou);
            b.dataset = cmp_dataset;
            b.method = cmp_method;
            if (cmp_out.empty()) {
                out << comparison_csv({a, b});
            } else {
                write_comparison({a, b}, cmp_out);
            }
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    }
    return kOk;
}

} // namespace autotag::cli
