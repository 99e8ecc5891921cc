// cvstool — command-line front end for the label-map safety-criteria
// pipeline: stream fusion, per-frame assessment, run scoring, the
// edge-aware training loss, and synthetic corpus generation.

#include "cvs/error.hpp"
#include "cvs/fusion.hpp"
#include "cvs/label_map.hpp"
#include "cvs/metrics.hpp"
#include "cvs/roi.hpp"
#include "cvs/rules.hpp"
#include "cvs/sobel_loss.hpp"
#include "cvs/synth.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

using nlohmann::json;

struct RunConfig {
    cvs::FusionMode fusion_mode = cvs::FusionMode::BackgroundFill;
    cvs::AssessConfig assess;
    cvs::LossConfig loss;
};

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

int parse_int(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        cvs::fail(cvs::Errc::InvalidArgument,
                  "config key " + key + ": expected an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        cvs::fail(cvs::Errc::InvalidArgument,
                  "config key " + key + ": expected a number, got '" + value + "'");
    }
}

cvs::FusionMode parse_fusion_mode(const std::string& value) {
    if (value == "background_fill") return cvs::FusionMode::BackgroundFill;
    if (value == "fat_overwrite") return cvs::FusionMode::FatOverwrite;
    cvs::fail(cvs::Errc::InvalidArgument, "unknown fusion mode '" + value + "'");
}

cvs::ChannelReduce parse_channel_reduce(const std::string& value) {
    if (value == "sum") return cvs::ChannelReduce::Sum;
    if (value == "max") return cvs::ChannelReduce::Max;
    cvs::fail(cvs::Errc::InvalidArgument, "unknown channel reduce '" + value + "'");
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "fusion.mode") {
        cfg.fusion_mode = parse_fusion_mode(value);
    } else if (key == "roi.k_edge") {
        cfg.assess.roi.k_edge = parse_int(value, key);
    } else if (key == "roi.step_deg") {
        cfg.assess.roi.step_deg = parse_double(value, key);
    } else if (key == "roi.max_sweep_deg") {
        cfg.assess.roi.max_sweep_deg = parse_double(value, key);
    } else if (key == "roi.min_area") {
        cfg.assess.roi.min_area = parse_double(value, key);
    } else if (key == "rules.t_liver") {
        cfg.assess.rules.t_liver = parse_int(value, key);
    } else if (key == "rules.t_cp") {
        cfg.assess.rules.t_cp = parse_int(value, key);
    } else if (key == "rules.min_cluster") {
        cfg.assess.rules.min_cluster = parse_int(value, key);
    } else if (key == "loss.lambda") {
        cfg.loss.lambda = parse_double(value, key);
    } else if (key == "loss.beta") {
        cfg.loss.smooth_l1_beta = parse_double(value, key);
    } else if (key == "loss.channel_reduce") {
        cfg.loss.channel_reduce = parse_channel_reduce(value);
    } else {
        cvs::fail(cvs::Errc::InvalidArgument, "unknown config key '" + key + "'");
    }
}

// Flat key=value file; '#' starts a comment, blank lines are ignored.
RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) cvs::fail(cvs::Errc::MissingFile, "cannot open config " + path.string());
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string entry = trimmed(line);
        if (entry.empty()) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            cvs::fail(cvs::Errc::InvalidArgument,
                      path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        }
        apply_config_entry(cfg, trimmed(entry.substr(0, eq)), trimmed(entry.substr(eq + 1)));
    }
    return cfg;
}

json assessment_to_json(const std::string& frame, const cvs::CvsAssessment& a) {
    json j;
    j["c1"] = a.c1;
    j["c2"] = a.c2;
    j["c3"] = a.c3;
    j["cvs"] = a.cvs;
    j["evidence"] = {
        {"artery_clusters_in_roi", a.evidence.artery_clusters_in_roi},
        {"cystic_plate_largest_in_roi", a.evidence.cystic_plate_largest_in_roi},
        {"duct_clusters_in_roi", a.evidence.duct_clusters_in_roi},
        {"fat_in_roi", a.evidence.fat_in_roi},
        {"liver_largest_in_roi", a.evidence.liver_largest_in_roi},
    };
    j["frame"] = frame;
    if (a.roi) {
        json quad = json::array();
        for (const cvs::Vec2& v : a.roi->vertices())
            quad.push_back(json::array({v.x, v.y}));
        j["roi"] = quad;
    } else {
        j["roi"] = json{{"failure", a.roi_failure ? cvs::roi_failure_name(*a.roi_failure)
                                                  : "unknown"}};
    }
    return j;
}

// A frame that cannot even be loaded still produces a report line: all
// criteria false, with the error name in place of a region.
json error_line(const std::string& frame, cvs::Errc code) {
    cvs::CvsAssessment blank;
    json j = assessment_to_json(frame, blank);
    j["roi"] = json{{"failure", cvs::errc_name(code)}};
    return j;
}

struct FrameTruth {
    cvs::CriterionLabels labels;
    cvs::RoiQuad quad;
};

std::filesystem::path truth_path_for(const std::filesystem::path& pgm) {
    std::filesystem::path p = pgm;
    p.replace_extension();
    p += ".truth.json";
    return p;
}

FrameTruth load_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) cvs::fail(cvs::Errc::MissingTruth, "missing truth file " + path.string());
    try {
        json j;
        in >> j;
        FrameTruth t;
        t.labels = {j.at("c1").get<bool>(), j.at("c2").get<bool>(), j.at("c3").get<bool>(),
                    j.at("cvs").get<bool>()};
        const json& q = j.at("quad");
        if (!q.is_array() || q.size() != 4) throw std::runtime_error("quad must have 4 points");
        auto pt = [&](int i) {
            return cvs::Vec2{q[i].at(0).get<double>(), q[i].at(1).get<double>()};
        };
        t.quad = cvs::RoiQuad{pt(0), pt(1), pt(2), pt(3)};
        return t;
    } catch (const cvs::Error&) {
        throw;
    } catch (const std::exception& e) {
        cvs::fail(cvs::Errc::InvalidArgument,
                  "malformed truth file " + path.string() + ": " + e.what());
    }
}

void write_overlay(const std::filesystem::path& path, const cvs::LabelMap& map,
                   const cvs::RoiQuad& quad) {
    constexpr std::uint8_t kEdgeValue = 250; // outside every palette on purpose
    const int w = map.width();
    const int h = map.height();
    std::vector<std::uint8_t> px(map.data().begin(), map.data().end());
    auto plot = [&](long x, long y) {
        if (x >= 0 && x < w && y >= 0 && y < h)
            px[std::size_t(y) * w + x] = kEdgeValue;
    };
    auto line = [&](const cvs::Vec2& p, const cvs::Vec2& q) {
        long x0 = std::lround(p.x), y0 = std::lround(p.y);
        const long x1 = std::lround(q.x), y1 = std::lround(q.y);
        const long dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
        const long dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
        long err = dx + dy;
        while (true) {
            plot(x0, y0);
            if (x0 == x1 && y0 == y1) break;
            const long e2 = 2 * err;
            if (e2 >= dy) { err += dy; x0 += sx; }
            if (e2 <= dx) { err += dx; y0 += sy; }
        }
    };
    const auto v = quad.vertices();
    for (int i = 0; i < 4; ++i) line(v[i], v[(i + 1) % 4]);

    // Raw P5 — the edge value is deliberately not a palette entry, so this
    // bypasses LabelMap and writes no sidecar. Overlays are for eyeballs.
    std::ofstream out(path, std::ios::binary);
    if (!out) cvs::fail(cvs::Errc::IoFailure, "cannot write " + path.string());
    out << "P5\n" << w << " " << h << "\n255\n";
    out.write(reinterpret_cast<const char*>(px.data()), std::streamsize(px.size()));
    if (!out) cvs::fail(cvs::Errc::IoFailure, "write failed for " + path.string());
}

// Runs fn(0..n-1) on `jobs` threads, keeping results in input order. The
// first exception wins and is rethrown after all workers drain.
template <typename T, typename Fn>
std::vector<T> run_indexed(int jobs, int n, Fn fn) {
    std::vector<T> results(n);
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                results[i] = fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int count = std::min(jobs, n);
    pool.reserve(count);
    for (int i = 0; i < count; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

struct AssessOptions {
    std::vector<std::string> inputs;
    std::string config_path;
    std::string out_path;
    std::string overlay_dir;
    int jobs = 1;
    bool use_reference_quads = false;
};

// Arguments may be frame files or directories to scan for .pgm files; the
// final list is sorted by frame name so reports are stable regardless of
// shell glob order.
std::vector<std::filesystem::path> expand_inputs(const std::vector<std::string>& inputs) {
    std::vector<std::filesystem::path> frames;
    for (const std::string& raw : inputs) {
        const std::filesystem::path p(raw);
        std::error_code ec;
        if (std::filesystem::is_directory(p, ec)) {
            for (const auto& entry : std::filesystem::directory_iterator(p)) {
                if (entry.path().extension() == ".pgm") frames.push_back(entry.path());
            }
        } else {
            frames.push_back(p);
        }
    }
    std::sort(frames.begin(), frames.end(),
              [](const std::filesystem::path& a, const std::filesystem::path& b) {
                  const std::string sa = a.stem().string(), sb = b.stem().string();
                  return sa != sb ? sa < sb : a.string() < b.string();
              });
    return frames;
}

RunConfig config_or_default(const std::string& path) {
    return path.empty() ? RunConfig{} : load_run_config(path);
}

int run_fuse(const std::string& p1_path, const std::string& p2_path,
             const std::string& out_path, const std::string& mode_flag,
             const std::string& config_path) {
    RunConfig cfg = config_or_default(config_path);
    if (!mode_flag.empty()) cfg.fusion_mode = parse_fusion_mode(mode_flag);
    const cvs::LabelMap p1 = cvs::load_label_map(p1_path);
    const cvs::LabelMap p2 = cvs::load_label_map(p2_path);
    const cvs::LabelMap fused = cvs::fuse_streams(p1, p2, cfg.fusion_mode);
    cvs::save_label_map(fused, out_path);
    return 0;
}

int run_assess(const AssessOptions& opt) {
    const RunConfig cfg = config_or_default(opt.config_path);
    const std::vector<std::filesystem::path> frames = expand_inputs(opt.inputs);
    std::optional<std::filesystem::path> overlay_dir;
    if (!opt.overlay_dir.empty()) {
        overlay_dir = opt.overlay_dir;
        std::error_code ec;
        std::filesystem::create_directories(*overlay_dir, ec);
        if (ec) cvs::fail(cvs::Errc::IoFailure, "cannot create " + overlay_dir->string());
    }

    auto frame_line = [&](int i) -> std::string {
        const std::filesystem::path& pgm = frames[i];
        const std::string stem = pgm.stem().string();
        try {
            const cvs::LabelMap map = cvs::load_label_map(pgm);
            cvs::CvsAssessment a;
            if (opt.use_reference_quads) {
                const FrameTruth truth = load_truth(truth_path_for(pgm));
                a = cvs::assess_with_quad(map, truth.quad, cfg.assess.rules);
            } else {
                a = cvs::assess_cvs(map, cfg.assess);
            }
            if (overlay_dir && a.roi)
                write_overlay(*overlay_dir / (stem + ".overlay.pgm"), map, *a.roi);
            return assessment_to_json(stem, a).dump();
        } catch (const cvs::Error& e) {
            if (e.code() == cvs::Errc::InvariantViolation) throw;
            return error_line(stem, e.code()).dump();
        }
    };
    const auto lines = run_indexed<std::string>(opt.jobs, int(frames.size()), frame_line);

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!opt.out_path.empty()) {
        file.open(opt.out_path, std::ios::binary);
        if (!file) cvs::fail(cvs::Errc::IoFailure, "cannot write " + opt.out_path);
        os = &file;
    }
    for (const std::string& line : lines) *os << line << "\n";
    os->flush();
    if (!*os) cvs::fail(cvs::Errc::IoFailure, "write failed");
    return 0;
}

json binary_metrics_json(const cvs::BinaryMetrics& m) {
    auto field = [](const std::optional<double>& v) {
        return v ? json(*v) : json(nullptr);
    };
    return json{{"acc", field(m.acc)},
                {"bacc", field(m.bacc)},
                {"npv", field(m.npv)},
                {"ppv", field(m.ppv)}};
}

// Scores an assess report against the truth files for its frames. Every
// report frame must have a truth file; extra truth files are ignored.
int run_eval(const std::string& report_path, const std::string& truth_dir) {
    std::ifstream in(report_path);
    if (!in) cvs::fail(cvs::Errc::MissingFile, "cannot open report " + report_path);

    std::vector<cvs::CriterionLabels> truth, pred;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trimmed(line).empty()) continue;
        std::string frame;
        try {
            const json j = json::parse(line);
            frame = j.at("frame").get<std::string>();
            pred.push_back({j.at("c1").get<bool>(), j.at("c2").get<bool>(),
                            j.at("c3").get<bool>(), j.at("cvs").get<bool>()});
        } catch (const std::exception& e) {
            cvs::fail(cvs::Errc::InvalidArgument, report_path + ":" + std::to_string(lineno) +
                                                      ": malformed report line: " + e.what());
        }
        const auto truth_path =
            std::filesystem::path(truth_dir) / (frame + ".truth.json");
        truth.push_back(load_truth(truth_path).labels);
    }
    if (truth.empty())
        cvs::fail(cvs::Errc::InvalidArgument, "report " + report_path + " has no frames");
    const cvs::RunScore score = cvs::score_run(truth, pred);

    json j;
    j["c1"] = binary_metrics_json(cvs::binary_metrics(score.c1));
    j["c2"] = binary_metrics_json(cvs::binary_metrics(score.c2));
    j["c3"] = binary_metrics_json(cvs::binary_metrics(score.c3));
    j["cvs"] = binary_metrics_json(cvs::binary_metrics(score.cvs));
    j["frames"] = truth.size();
    std::cout << j.dump() << "\n";
    return 0;
}

struct LossOptions {
    std::string pred_path;
    std::string target_path;
    std::string config_path;
    std::string grad_out;
    double lambda = 1.0;
    double beta = 1.0;
    std::string channel_reduce;
    bool lambda_set = false;
    bool beta_set = false;
    bool check_grad = false;
    double grad_tol = 1e-5;
};

int run_loss(const LossOptions& opt) {
    RunConfig cfg = config_or_default(opt.config_path);
    if (opt.lambda_set) cfg.loss.lambda = opt.lambda;
    if (opt.beta_set) cfg.loss.smooth_l1_beta = opt.beta;
    if (!opt.channel_reduce.empty())
        cfg.loss.channel_reduce = parse_channel_reduce(opt.channel_reduce);

    const cvs::Tensor3 target = cvs::load_tensor_text(opt.target_path);
    cvs::Tensor3 pred = cvs::load_tensor_text(opt.pred_path);
    cvs::validate_one_hot(target);
    cvs::validate_prob_map(pred);

    const cvs::LossBreakdown breakdown = cvs::compute_loss(target, pred, cfg.loss);
    json j;
    j["ce"] = breakdown.ce;
    j["sobel"] = breakdown.sobel;
    j["total"] = breakdown.total;

    const cvs::Tensor3 grad = cvs::grad_total_loss(target, pred, cfg.loss);
    if (!opt.grad_out.empty()) cvs::save_tensor_text(opt.grad_out, grad);

    double max_rel_err = 0.0;
    if (opt.check_grad) {
        const double h = 1e-5;
        for (std::size_t i = 0; i < pred.data.size(); ++i) {
            const double orig = pred.data[i];
            pred.data[i] = orig + h;
            const double up = cvs::total_loss(target, pred, cfg.loss);
            pred.data[i] = orig - h;
            const double down = cvs::total_loss(target, pred, cfg.loss);
            pred.data[i] = orig;
            const double fd = (up - down) / (2.0 * h);
            const double denom =
                std::max({std::abs(fd), std::abs(grad.data[i]), 1.0});
            max_rel_err = std::max(max_rel_err, std::abs(fd - grad.data[i]) / denom);
        }
        j["grad_max_rel_err"] = max_rel_err;
    }

    std::cout << j.dump() << "\n";
    if (opt.check_grad && max_rel_err > opt.grad_tol) {
        cvs::fail(cvs::Errc::InvariantViolation,
                  "analytic gradient disagrees with finite differences (max rel err " +
                      std::to_string(max_rel_err) + ")");
    }
    return 0;
}

struct SynthOptions {
    std::string out_dir;
    int n = 0;
    std::uint64_t seed = 1;
    double positive_fraction = 0.25;
    double flip_rate = 0.0;
};

int run_synth(const SynthOptions& opt) {
    if (opt.flip_rate < 0.0 || opt.flip_rate > 1.0)
        cvs::fail(cvs::Errc::InvalidArgument, "--flip-rate must be in [0, 1]");
    const cvs::CorpusParams params{opt.n, opt.seed, opt.positive_fraction};
    const auto entries = cvs::generate_corpus(params, opt.out_dir);

    if (opt.flip_rate > 0.0) {
        // Label noise for robustness experiments: each flipped pixel moves
        // to a different class, so the flip rate equals the differ rate.
        // Truth files describe the clean scene and stay untouched.
        const std::uint64_t noise_seed = cvs::mix_seed(opt.seed, 0xF11Bu);
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const auto pgm = std::filesystem::path(opt.out_dir) / (entries[i].stem + ".pgm");
            const cvs::LabelMap map = cvs::load_label_map(pgm);
            std::vector<std::uint8_t> px(map.data().begin(), map.data().end());
            cvs::Lcg64 rng(cvs::mix_seed(noise_seed, i));
            for (std::uint8_t& p : px) {
                if (rng.unit() < opt.flip_rate)
                    p = std::uint8_t((p + 1 + rng.next() % 7) % 8);
            }
            const cvs::LabelMap noisy(map.width(), map.height(), std::move(px),
                                      map.palette());
            cvs::save_label_map(noisy, pgm);
        }
    }

    int positives = 0;
    for (const auto& e : entries) positives += e.truth.cvs ? 1 : 0;
    json j;
    j["dir"] = opt.out_dir;
    j["frames"] = entries.size();
    j["positives"] = positives;
    std::cout << j.dump() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Safety-criteria assessment over semantic label maps"};
    app.require_subcommand(1);

    std::string fuse_p1, fuse_p2, fuse_out, fuse_mode, fuse_config;
    CLI::App* fuse = app.add_subcommand("fuse", "Merge two label-map streams");
    fuse->add_option("--p1", fuse_p1, "First-stream label map (PGM)")->required();
    fuse->add_option("--p2", fuse_p2, "Second-stream label map (PGM)")->required();
    fuse->add_option("--out", fuse_out, "Output fused map (PGM)")->required();
    fuse->add_option("--mode", fuse_mode, "background_fill | fat_overwrite");
    fuse->add_option("--config", fuse_config, "key=value config file");

    AssessOptions assess_opt;
    CLI::App* assess = app.add_subcommand("assess", "Per-frame criteria report (JSON lines)");
    assess->add_option("inputs", assess_opt.inputs,
                       "Fused label maps (PGM) or directories of them")
        ->expected(-1);
    assess->add_option("--config", assess_opt.config_path, "key=value config file");
    assess->add_option("--out", assess_opt.out_path, "Report path (default stdout)");
    assess->add_option("--overlay", assess_opt.overlay_dir,
                       "Directory for region-outline PGM overlays");
    assess->add_option("--jobs", assess_opt.jobs, "Worker threads")
        ->check(CLI::Range(1, 256));
    assess->add_flag("--use-reference-quads", assess_opt.use_reference_quads,
                     "Evaluate rules on <frame>.truth.json quads instead of estimating");

    std::string eval_report, eval_truth_dir;
    CLI::App* eval = app.add_subcommand("eval", "Score an assess report against truth files");
    eval->add_option("--report", eval_report, "JSON-lines report from assess")->required();
    eval->add_option("--truth-dir", eval_truth_dir, "Directory of <frame>.truth.json files")
        ->required();

    LossOptions loss_opt;
    CLI::App* loss = app.add_subcommand("loss", "Edge-aware segmentation loss on tensors");
    loss->add_option("--pred", loss_opt.pred_path, "Predicted probability tensor")->required();
    loss->add_option("--target", loss_opt.target_path, "One-hot target tensor")->required();
    loss->add_option("--config", loss_opt.config_path, "key=value config file");
    auto* lambda_opt = loss->add_option("--lambda", loss_opt.lambda, "Edge-term weight");
    auto* beta_opt = loss->add_option("--beta", loss_opt.beta, "Smooth-L1 transition point");
    loss->add_option("--channel-reduce", loss_opt.channel_reduce, "sum | max");
    loss->add_flag("--check-grad", loss_opt.check_grad,
                   "Compare analytic gradient against finite differences");
    loss->add_option("--grad-tol", loss_opt.grad_tol, "Max relative error allowed");
    loss->add_option("--grad-out", loss_opt.grad_out, "Write the analytic gradient tensor");

    SynthOptions synth_opt;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic labelled corpus");
    synth->add_option("--out", synth_opt.out_dir, "Output directory")->required();
    synth->add_option("--n", synth_opt.n, "Number of frames")->required();
    synth->add_option("--seed", synth_opt.seed, "Base seed");
    synth->add_option("--positive-fraction", synth_opt.positive_fraction,
                      "Fraction of frames meeting all criteria")
        ->check(CLI::Range(0.0, 1.0));
    synth->add_option("--flip-rate", synth_opt.flip_rate,
                      "Per-pixel label noise applied after rendering");

    try {
        app.parse(argc, argv);
        loss_opt.lambda_set = lambda_opt->count() > 0;
        loss_opt.beta_set = beta_opt->count() > 0;
        if (*fuse) return run_fuse(fuse_p1, fuse_p2, fuse_out, fuse_mode, fuse_config);
        if (*assess) return run_assess(assess_opt);
        if (*eval) return run_eval(eval_report, eval_truth_dir);
        if (*loss) return run_loss(loss_opt);
        if (*synth) return run_synth(synth_opt);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        const json j{{"error", "InvalidArgument"}, {"message", e.what()}};
        std::cerr << j.dump() << "\n";
        return 2;
    } catch (const cvs::Error& e) {
        const json j{{"error", cvs::errc_name(e.code())}, {"message", e.what()}};
        std::cerr << j.dump() << "\n";
        return cvs::errc_is_input_error(e.code()) ? 2 : 3;
    } catch (const std::exception& e) {
        const json j{{"error", "InvariantViolation"}, {"message", e.what()}};
        std::cerr << j.dump() << "\n";
        return 3;
    }
}
