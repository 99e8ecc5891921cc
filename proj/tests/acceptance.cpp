// End-to-end acceptance gate. Each check prints one [PASS]/[FAIL] line; the
// process exits with the number of failed checks. Tolerances are part of the
// contract and are pinned inline.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cvs/fusion.hpp"
#include "cvs/label_map.hpp"
#include "cvs/metrics.hpp"
#include "cvs/regions.hpp"
#include "cvs/roi.hpp"
#include "cvs/rules.hpp"
#include "cvs/sobel_loss.hpp"
#include "cvs/synth.hpp"
#include "helpers.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace cvs;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CmdResult {
    int code = -1;
    std::string out;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CmdResult run_tool(const std::string& args) {
    static int counter = 0;
    const fs::path out =
        fs::temp_directory_path() / ("cvs_acc_out_" + std::to_string(counter++) + ".txt");
    const std::string cmd = std::string("\"") + CVSTOOL_PATH + "\" " + args + " > \"" +
                            out.string() + "\" 2> /dev/null";
    const int status = std::system(cmd.c_str());
    CmdResult r;
    r.code = status == -1 ? -1 : (WIFEXITED(status) ? WEXITSTATUS(status) : -1);
    r.out = slurp(out);
    return r;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

// Random one-hot target plus normalized strictly-positive prediction.
std::pair<Tensor3, Tensor3> random_tensor_pair(Lcg64& rng, int c, int h, int w) {
    Tensor3 g = Tensor3::zeros(c, h, w);
    Tensor3 p = Tensor3::zeros(c, h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            g.at(rng.uniform(0, c - 1), y, x) = 1.0;
            double sum = 0.0;
            for (int ch = 0; ch < c; ++ch) sum += (p.at(ch, y, x) = 0.05 + rng.unit());
            for (int ch = 0; ch < c; ++ch) p.at(ch, y, x) /= sum;
        }
    }
    return {g, p};
}

LabelMap random_map(Lcg64& rng, int w, int h, const ClassPalette& palette, int max_id) {
    std::vector<std::uint8_t> px(std::size_t(w) * h);
    for (auto& v : px) v = std::uint8_t(rng.uniform(0, max_id));
    return LabelMap(w, h, std::move(px), palette);
}

bool check_gradients(std::string& note) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Lcg64 rng(seed);
        const auto [g, p] = random_tensor_pair(rng, 3, 8, 8);
        const LossConfig cfg;
        const Tensor3 analytic = grad_total_loss(g, p, cfg);
        const Tensor3 numeric = oracle::finite_difference_grad(
            p, [&, g = g](const Tensor3& q) { return total_loss(g, q, cfg); }, 1e-5);
        const double err = oracle::max_relative_error(analytic, numeric);
        if (!(err < 1e-5)) {
            note = "seed " + std::to_string(seed) + " max rel err " + std::to_string(err);
            return false;
        }

        LossConfig off;
        off.lambda = 0.0;
        const LossBreakdown b = compute_loss(g, p, off);
        if (b.sobel != 0.0 || b.total != cross_entropy(g, p)) {
            note = "lambda 0 did not collapse to cross entropy";
            return false;
        }
    }
    return true;
}

bool check_step_golden(std::string& note) {
    const int w = 8, h = 6;
    Image2d img = Image2d::zeros(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 4; x < w; ++x) img.at(x, y) = 1.0;
    const Image2d m = sobel_magnitude(img);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const bool beside_step = x == 3 || x == 4;
            const double v = m.at(x, y);
            if (beside_step && std::abs(v - 8.0) > 1e-9) {
                note = "expected 8 at (" + std::to_string(x) + "," + std::to_string(y) +
                       "), got " + std::to_string(v);
                return false;
            }
            if (!beside_step && v > 2e-6) {
                note = "expected the epsilon floor at (" + std::to_string(x) + "," +
                       std::to_string(y) + "), got " + std::to_string(v);
                return false;
            }
        }
    }
    return true;
}

bool check_fusion_conservation(std::string& note) {
    Lcg64 rng(33);
    const ClassPalette s1 = ClassPalette::stream1();
    const ClassPalette s2 = ClassPalette::stream2();
    const ClassId fat2 = *s2.id_of("fat");
    for (int trial = 0; trial < 100; ++trial) {
        const int w = rng.uniform(8, 40), h = rng.uniform(8, 40);
        const LabelMap p1 = random_map(rng, w, h, s1, int(s1.size()) - 1);
        const LabelMap p2 = random_map(rng, w, h, s2, int(s2.size()) - 1);
        std::size_t fat_in = 0;
        for (const auto v : p2.data()) fat_in += v == fat2;

        for (const FusionMode mode : {FusionMode::BackgroundFill, FusionMode::FatOverwrite}) {
            const LabelMap fused = fuse_streams(p1, p2, mode);
            std::size_t fat_out = 0;
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    if (fused.at(x, y) == cls::fat) {
                        ++fat_out;
                    } else if (fused.at(x, y) != p1.at(x, y)) {
                        note = "non-fat pixel diverged from the anatomy stream";
                        return false;
                    }
                }
            }
            if (fat_out > fat_in) {
                note = "fused fat exceeds the fat stream's fat";
                return false;
            }
        }
    }
    return true;
}

bool check_components_oracle(std::string& note) {
    Lcg64 rng(44);
    for (int trial = 0; trial < 200; ++trial) {
        const int max_id = trial % 2 == 0 ? 7 : 1;  // sparse speckle / dense blobs
        const LabelMap map = random_map(rng, 32, 32, ClassPalette::fused(), max_id);
        const ClassId target = ClassId(rng.uniform(0, max_id));
        for (const Connectivity conn : {Connectivity::Four, Connectivity::Eight}) {
            const auto got = connected_components(map, target, conn);
            const std::vector<std::uint8_t> px(map.data().begin(), map.data().end());
            const auto want =
                oracle::components(px, 32, 32, target, conn == Connectivity::Eight);
            if (got.size() != want.size()) {
                note = "component count mismatch on trial " + std::to_string(trial);
                return false;
            }
            for (std::size_t i = 0; i < got.size(); ++i) {
                if (got[i].pixels != want[i]) {
                    note = "component " + std::to_string(i) + " mismatch on trial " +
                           std::to_string(trial);
                    return false;
                }
            }
        }
    }
    return true;
}

bool check_nearest_pair_oracle(std::string& note) {
    Lcg64 rng(55);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = rng.uniform(1, 500), m = rng.uniform(1, 500);
        const bool grid = trial % 3 == 0;  // integer grids force distance ties
        auto draw = [&]() -> Vec2 {
            if (grid) return {double(rng.uniform(0, 30)), double(rng.uniform(0, 30))};
            return {rng.unit() * 100.0, rng.unit() * 100.0};
        };
        std::vector<Vec2> a, b;
        for (int i = 0; i < n; ++i) a.push_back(draw());
        for (int i = 0; i < m; ++i) b.push_back(draw());
        const NearestPairResult got = nearest_pair(a, b);
        const NearestPairResult want = oracle::nearest_pair(a, b);
        if (!(got.a == want.a) || !(got.b == want.b) || got.distance != want.distance) {
            note = "pair or distance mismatch on trial " + std::to_string(trial);
            return false;
        }
    }
    return true;
}

bool check_roi_recovery(std::string& note) {
    int successes = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const bool f1 = (seed & 1) != 0, f2 = (seed & 2) != 0, f3 = (seed & 4) != 0;
        const bool with_fat = !(seed % 7 == 0 && f1);
        const Scene scene = generate_canonical_scene(seed, f1, f2, f3, with_fat);
        const RoiResult r = estimate_roi(scene.map);
        if (!r.ok()) continue;
        ++successes;
        const auto est = r.estimate->quad.vertices();
        const auto ref = scene.reference_quad.vertices();
        for (int i = 0; i < 4; ++i) {
            if (norm(est[std::size_t(i)] - ref[std::size_t(i)]) > 3.0) {
                note = "vertex " + std::to_string(i) + " off by more than 3 px at seed " +
                       std::to_string(seed);
                return false;
            }
        }
    }
    if (successes < 95) {
        note = "only " + std::to_string(successes) + "/100 scenes recovered";
        return false;
    }

    const int shifts[4][2] = {{5, -7}, {-9, 4}, {11, 9}, {-30, -25}};
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SceneSpec spec = canonical_scene_spec(seed, true, true, true);
        spec.specks = {0, 0};
        const RoiResult base = estimate_roi(generate_scene(spec).map);
        const auto& s = shifts[seed % 4];
        const RoiResult moved =
            estimate_roi(generate_scene(test_util::shift_scene_spec(spec, s[0], s[1])).map);
        if (!base.ok() || !moved.ok()) {
            note = "shifted scene failed to recover at seed " + std::to_string(seed);
            return false;
        }
        const Vec2 d{double(s[0]), double(s[1])};
        const auto u = base.estimate->quad.vertices();
        const auto v = moved.estimate->quad.vertices();
        for (std::size_t i = 0; i < 4; ++i) {
            if (!(v[i] == u[i] + d)) {
                note = "translation equivariance broke at seed " + std::to_string(seed);
                return false;
            }
        }
    }
    return true;
}

bool check_rule_oracle(std::string& note) {
    Lcg64 rng(66);
    const RuleThresholds th;
    for (std::uint64_t seed = 200; seed < 300; ++seed) {
        const bool f1 = rng.uniform(0, 1) == 1;
        const bool f2 = rng.uniform(0, 1) == 1;
        const bool f3 = rng.uniform(0, 1) == 1;
        const Scene scene = generate_canonical_scene(seed, f1, f2, f3);
        const CvsAssessment a = assess_with_quad(scene.map, scene.reference_quad, th);
        const oracle::EvidenceCounts ev =
            oracle::recount_evidence(scene.map, scene.reference_quad, th.min_cluster);
        const bool counts_match =
            a.evidence.fat_in_roi == ev.fat_in_roi &&
            a.evidence.liver_largest_in_roi == ev.liver_largest_in_roi &&
            a.evidence.cystic_plate_largest_in_roi == ev.cystic_plate_largest_in_roi &&
            a.evidence.duct_clusters_in_roi == ev.duct_clusters_in_roi &&
            a.evidence.artery_clusters_in_roi == ev.artery_clusters_in_roi;
        if (!counts_match) {
            note = "evidence recount mismatch at seed " + std::to_string(seed);
            return false;
        }
        const bool c1 = ev.fat_in_roi == 0 && ev.liver_largest_in_roi > std::size_t(th.t_liver);
        const bool c2 = ev.cystic_plate_largest_in_roi > std::size_t(th.t_cp);
        const bool c3 = ev.duct_clusters_in_roi == 1 && ev.artery_clusters_in_roi == 1;
        if (a.c1 != c1 || a.c2 != c2 || a.c3 != c3 || a.cvs != (c1 && c2 && c3)) {
            note = "criterion booleans disagree with the recount at seed " +
                   std::to_string(seed);
            return false;
        }
    }

    // Exactly-at-threshold clusters must stay negative (strict inequality).
    auto block_map = [](char ch, int count_x, int count_y, int extra) {
        std::vector<std::string> rows(20, std::string(20, '0'));
        for (int y = 0; y < count_y; ++y)
            for (int x = 0; x < count_x; ++x) rows[std::size_t(2 + y)][std::size_t(2 + x)] = ch;
        if (extra > 0) rows[std::size_t(2 + count_y)][2] = ch;
        return test_util::map_from_rows(rows);
    };
    RuleEvidence ev;
    if (assess_c1(block_map('4', 10, 10, 0), test_util::whole_image_quad(20, 20), th, ev)) {
        note = "a 100-pixel liver cluster passed the strict threshold";
        return false;
    }
    if (!assess_c1(block_map('4', 10, 10, 1), test_util::whole_image_quad(20, 20), th, ev)) {
        note = "a 101-pixel liver cluster failed";
        return false;
    }
    if (assess_c2(block_map('6', 10, 10, 0), test_util::whole_image_quad(20, 20), th, ev)) {
        note = "a 100-pixel plate cluster passed the strict threshold";
        return false;
    }
    return true;
}

bool all_ones(const json& section) {
    for (const char* key : {"acc", "bacc", "ppv", "npv"}) {
        if (!section.contains(key) || !section.at(key).is_number() ||
            section.at(key).get<double>() != 1.0)
            return false;
    }
    return true;
}

bool check_end_to_end(std::string& note) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir = test_util::fresh_dir("acc_e2e");
    if (run_tool("synth --out " + quoted(dir) + " --n 200 --seed 1 --positive-fraction 0.25")
            .code != 0) {
        note = "synth failed";
        return false;
    }

    const fs::path ref_rep = dir / "ref.jsonl";
    if (run_tool("assess " + quoted(dir) + " --use-reference-quads --jobs 4 --out " +
                 quoted(ref_rep))
            .code != 0) {
        note = "assess with reference regions failed";
        return false;
    }
    const CmdResult ref_eval =
        run_tool("eval --report " + quoted(ref_rep) + " --truth-dir " + quoted(dir));
    if (ref_eval.code != 0) {
        note = "eval failed on the reference report";
        return false;
    }
    const json ref_json = json::parse(ref_eval.out);
    for (const char* crit : {"c1", "c2", "c3", "cvs"}) {
        if (!all_ones(ref_json.at(crit))) {
            note = std::string(crit) + " not perfect with reference regions: " +
                   ref_json.at(crit).dump();
            return false;
        }
    }

    const fs::path est_rep = dir / "est.jsonl";
    if (run_tool("assess " + quoted(dir) + " --jobs 4 --out " + quoted(est_rep)).code != 0) {
        note = "assess with estimated regions failed";
        return false;
    }
    const CmdResult est_eval =
        run_tool("eval --report " + quoted(est_rep) + " --truth-dir " + quoted(dir));
    if (est_eval.code != 0) {
        note = "eval failed on the estimated report";
        return false;
    }
    const json est_json = json::parse(est_eval.out);
    const json& bacc = est_json.at("cvs").at("bacc");
    if (!bacc.is_number() || bacc.get<double>() < 0.95) {
        note = "cvs balanced accuracy with estimated regions: " + bacc.dump();
        return false;
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (seconds >= 60.0) {
        note = "pipeline took " + std::to_string(seconds) + " s";
        return false;
    }
    return true;
}

bool check_metric_goldens(std::string& note) {
    const BinaryMetrics m = binary_metrics({1, 0, 98, 1});
    if (!m.acc || *m.acc != 0.99 || !m.bacc || *m.bacc != 0.75) {
        note = "confusion golden off: acc/bacc misreported";
        return false;
    }

    // All-negative predictions against a mixed truth: precision undefined and
    // serialized as null by the evaluator.
    const fs::path dir = test_util::fresh_dir("acc_null");
    for (const bool positive : {true, false}) {
        json truth;
        for (const char* key : {"c1", "c2", "c3", "cvs"}) truth[key] = positive;
        truth["quad"] = json::array(
            {json::array({0.0, 0.0}), json::array({5.0, 0.0}), json::array({5.0, 5.0}),
             json::array({0.0, 5.0})});
        std::ofstream(dir / (std::string(positive ? "pos" : "neg") + ".truth.json"))
            << truth.dump() << "\n";
    }
    std::ofstream report(dir / "report.jsonl");
    for (const char* frame : {"pos", "neg"}) {
        json line{{"frame", frame}, {"c1", false}, {"c2", false}, {"c3", false},
                  {"cvs", false}};
        report << line.dump() << "\n";
    }
    report.close();
    const CmdResult r = run_tool("eval --report " + quoted(dir / "report.jsonl") +
                                 " --truth-dir " + quoted(dir));
    if (r.code != 0) {
        note = "eval failed on the all-negative report";
        return false;
    }
    const json j = json::parse(r.out);
    if (!j.at("cvs").at("ppv").is_null()) {
        note = "undefined precision was not serialized as null: " + j.at("cvs").dump();
        return false;
    }
    return true;
}

bool check_cli_determinism(std::string& note) {
    const fs::path d1 = test_util::fresh_dir("acc_det1");
    const fs::path d2 = test_util::fresh_dir("acc_det2");
    for (const fs::path& d : {d1, d2}) {
        if (run_tool("synth --out " + quoted(d) + " --n 20 --seed 9 --flip-rate 0.02")
                .code != 0) {
            note = "synth failed";
            return false;
        }
    }
    for (const auto& entry : fs::directory_iterator(d1)) {
        if (slurp(entry.path()) != slurp(d2 / entry.path().filename())) {
            note = "corpus file differs between runs: " + entry.path().filename().string();
            return false;
        }
    }

    const fs::path rep1 = d1 / "r1.jsonl", rep4 = d1 / "r4.jsonl", rep4b = d1 / "r4b.jsonl";
    if (run_tool("assess " + quoted(d1) + " --jobs 1 --out " + quoted(rep1)).code != 0 ||
        run_tool("assess " + quoted(d1) + " --jobs 4 --out " + quoted(rep4)).code != 0 ||
        run_tool("assess " + quoted(d1) + " --jobs 4 --out " + quoted(rep4b)).code != 0) {
        note = "assess failed";
        return false;
    }
    const std::string r1 = slurp(rep1);
    if (r1.empty() || r1 != slurp(rep4) || r1 != slurp(rep4b)) {
        note = "assess reports differ across job counts or repeats";
        return false;
    }

    const std::string e1 =
        run_tool("eval --report " + quoted(rep1) + " --truth-dir " + quoted(d1)).out;
    const std::string e2 =
        run_tool("eval --report " + quoted(rep4) + " --truth-dir " + quoted(d1)).out;
    if (e1.empty() || e1 != e2) {
        note = "eval output differs between identical runs";
        return false;
    }
    return true;
}

struct Check {
    int id;
    const char* what;
    std::function<bool(std::string&)> run;
};

} // namespace

int main() {
    const std::vector<Check> checks{
        {1, "loss gradient matches finite differences; zero lambda drops the edge term",
         check_gradients},
        {2, "vertical-step edge magnitude is exactly 8 beside the step, floor elsewhere",
         check_step_golden},
        {3, "fusion keeps non-fat pixels bit-exact and never invents fat (100 pairs)",
         check_fusion_conservation},
        {4, "connected components equal brute-force flood fill (200 maps, both adjacencies)",
         check_components_oracle},
        {5, "nearest pair equals exhaustive search (200 instances up to 500x500)",
         check_nearest_pair_oracle},
        {6, "region recovery >= 95%, vertices within 3 px, exact shift equivariance",
         check_roi_recovery},
        {7, "rule engine equals a direct recount; at-threshold clusters stay negative",
         check_rule_oracle},
        {8, "synth -> assess -> eval: perfect with reference regions, bacc >= 0.95 "
            "estimated, under 60 s",
         check_end_to_end},
        {9, "metric goldens acc 0.99 / bacc 0.75; undefined precision serializes as null",
         check_metric_goldens},
        {10, "repeated cli runs byte-identical, including parallel assess",
         check_cli_determinism},
    };

    int failures = 0;
    for (const Check& c : checks) {
        std::string note;
        bool ok = false;
        try {
            ok = c.run(note);
        } catch (const std::exception& e) {
            note = std::string("unexpected exception: ") + e.what();
        }
        if (ok) {
            std::printf("[PASS] criterion %d: %s\n", c.id, c.what);
        } else {
            std::printf("[FAIL] criterion %d: %s%s%s\n", c.id, c.what,
                        note.empty() ? "" : " -- ", note.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    return failures;
}
