#include "cvs/sobel_loss.hpp"

#include "cvs/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace cvs {

namespace {

constexpr double kEps = 1e-12;     // under the magnitude square root
constexpr double kLogClamp = 1e-12; // probability floor inside the log

constexpr double kKx[3][3] = {{2, 0, -2}, {4, 0, -4}, {2, 0, -2}};
constexpr double kKy[3][3] = {{2, 4, 2}, {0, 0, 0}, {-2, -4, -2}};

int clamp_idx(int v, int hi) { return std::clamp(v, 0, hi - 1); }

struct SobelParts {
    Image2d gx;
    Image2d gy;
    Image2d mag;
};

SobelParts sobel_parts(const Image2d& img) {
    SobelParts out{Image2d::zeros(img.width, img.height), Image2d::zeros(img.width, img.height),
                   Image2d::zeros(img.width, img.height)};
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double gx = 0.0;
            double gy = 0.0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const double s =
                        img.at(clamp_idx(x + dx, img.width), clamp_idx(y + dy, img.height));
                    gx += kKx[dy + 1][dx + 1] * s;
                    gy += kKy[dy + 1][dx + 1] * s;
                }
            }
            out.gx.at(x, y) = gx;
            out.gy.at(x, y) = gy;
            out.mag.at(x, y) = std::sqrt(gx * gx + gy * gy + kEps);
        }
    }
    return out;
}

Image2d channel(const Tensor3& t, int c) {
    Image2d img = Image2d::zeros(t.width, t.height);
    std::copy_n(t.data.begin() + t.index(c, 0, 0), std::size_t(t.width) * t.height,
                img.v.begin());
    return img;
}

void check_shapes(const Tensor3& g, const Tensor3& p, const char* op) {
    if (!g.same_shape(p)) {
        std::ostringstream oss;
        oss << op << ": shape " << g.channels << "x" << g.height << "x" << g.width << " vs "
            << p.channels << "x" << p.height << "x" << p.width;
        fail(Errc::ShapeMismatch, oss.str());
    }
    if (g.channels < 1 || g.height < 1 || g.width < 1) {
        fail(Errc::ShapeMismatch, std::string(op) + ": empty tensor");
    }
}

void check_config(const LossConfig& cfg) {
    if (!(cfg.lambda >= 0.0)) fail(Errc::InvalidArgument, "lambda must be >= 0");
    if (!(cfg.smooth_l1_beta > 0.0)) fail(Errc::InvalidArgument, "smooth_l1_beta must be > 0");
}

// Reduced edge map; when `argmax` is non-null it receives, per pixel, the
// first channel attaining the Max reduction (unused for Sum).
Image2d edge_map(const std::vector<SobelParts>& parts, int width, int height,
                 ChannelReduce reduce, std::vector<int>* argmax = nullptr) {
    Image2d e = Image2d::zeros(width, height);
    if (argmax) argmax->assign(std::size_t(width) * height, 0);
    const int channels = int(parts.size());
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (reduce == ChannelReduce::Sum) {
                double s = 0.0;
                for (int c = 0; c < channels; ++c) s += parts[c].mag.at(x, y);
                e.at(x, y) = s;
            } else {
                double best = parts[0].mag.at(x, y);
                int best_c = 0;
                for (int c = 1; c < channels; ++c) {
                    if (parts[c].mag.at(x, y) > best) {
                        best = parts[c].mag.at(x, y);
                        best_c = c;
                    }
                }
                e.at(x, y) = best;
                if (argmax) (*argmax)[std::size_t(y) * width + x] = best_c;
            }
        }
    }
    return e;
}

double smooth_l1_grad(double x, double beta) {
    if (std::abs(x) < beta) return x / beta;
    return x > 0 ? 1.0 : -1.0;
}

std::vector<SobelParts> all_parts(const Tensor3& t) {
    std::vector<SobelParts> parts;
    parts.reserve(t.channels);
    for (int c = 0; c < t.channels; ++c) parts.push_back(sobel_parts(channel(t, c)));
    return parts;
}

} // namespace

Image2d Image2d::zeros(int width, int height) {
    Image2d img;
    img.width = width;
    img.height = height;
    img.v.assign(std::size_t(width) * height, 0.0);
    return img;
}

Tensor3 Tensor3::zeros(int channels, int height, int width) {
    Tensor3 t;
    t.channels = channels;
    t.height = height;
    t.width = width;
    t.data.assign(std::size_t(channels) * height * width, 0.0);
    return t;
}

Image2d sobel_magnitude(const Image2d& image) {
    if (image.width < 1 || image.height < 1) {
        fail(Errc::ShapeMismatch, "sobel_magnitude: empty image");
    }
    return sobel_parts(image).mag;
}

double smooth_l1(double x, double beta) {
    if (!(beta > 0.0)) fail(Errc::InvalidArgument, "smooth_l1: beta must be > 0");
    const double a = std::abs(x);
    if (a < beta) return 0.5 * x * x / beta;
    return a - 0.5 * beta;
}

double sobel_loss(const Tensor3& g, const Tensor3& p, const LossConfig& cfg) {
    check_shapes(g, p, "sobel_loss");
    check_config(cfg);
    const Image2d eg = edge_map(all_parts(g), g.width, g.height, cfg.channel_reduce);
    const Image2d ep = edge_map(all_parts(p), p.width, p.height, cfg.channel_reduce);
    double sum = 0.0;
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            sum += smooth_l1(eg.at(x, y) - ep.at(x, y), cfg.smooth_l1_beta);
        }
    }
    return sum / (double(g.width) * g.height);
}

double cross_entropy(const Tensor3& g, const Tensor3& p) {
    check_shapes(g, p, "cross_entropy");
    double sum = 0.0;
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            for (int c = 0; c < g.channels; ++c) {
                const double gv = g.at(c, y, x);
                if (gv != 0.0) sum -= gv * std::log(std::max(p.at(c, y, x), kLogClamp));
            }
        }
    }
    return sum / (double(g.width) * g.height);
}

double total_loss(const Tensor3& g, const Tensor3& p, const LossConfig& cfg) {
    check_shapes(g, p, "total_loss");
    check_config(cfg);
    const double ce = cross_entropy(g, p);
    if (cfg.lambda == 0.0) return ce;
    return ce + cfg.lambda * sobel_loss(g, p, cfg);
}

LossBreakdown compute_loss(const Tensor3& g, const Tensor3& p, const LossConfig& cfg) {
    check_shapes(g, p, "compute_loss");
    check_config(cfg);
    LossBreakdown out;
    out.ce = cross_entropy(g, p);
    if (cfg.lambda == 0.0) {
        out.total = out.ce;  // edge term skipped, not just zero-weighted
        return out;
    }
    out.sobel = sobel_loss(g, p, cfg);
    out.total = out.ce + cfg.lambda * out.sobel;
    return out;
}

Tensor3 grad_total_loss(const Tensor3& g, const Tensor3& p, const LossConfig& cfg) {
    check_shapes(g, p, "grad_total_loss");
    check_config(cfg);
    const double n = double(g.width) * g.height;
    Tensor3 grad = Tensor3::zeros(p.channels, p.height, p.width);

    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            for (int c = 0; c < g.channels; ++c) {
                const double gv = g.at(c, y, x);
                const double pv = p.at(c, y, x);
                // Flat below the clamp, so the derivative vanishes there.
                if (gv != 0.0 && pv > kLogClamp) grad.at(c, y, x) -= gv / (n * pv);
            }
        }
    }
    if (cfg.lambda == 0.0) return grad;

    const auto parts_p = all_parts(p);
    std::vector<int> argmax;
    const Image2d eg = edge_map(all_parts(g), g.width, g.height, cfg.channel_reduce);
    const Image2d ep = edge_map(parts_p, p.width, p.height, cfg.channel_reduce,
                                cfg.channel_reduce == ChannelReduce::Max ? &argmax : nullptr);

    for (int c = 0; c < p.channels; ++c) {
        const SobelParts& sp = parts_p[c];
        for (int y = 0; y < p.height; ++y) {
            for (int x = 0; x < p.width; ++x) {
                if (cfg.channel_reduce == ChannelReduce::Max &&
                    argmax[std::size_t(y) * p.width + x] != c) {
                    continue;
                }
                const double diff = eg.at(x, y) - ep.at(x, y);
                const double w =
                    -cfg.lambda * smooth_l1_grad(diff, cfg.smooth_l1_beta) / n;
                if (w == 0.0) continue;
                const double m = sp.mag.at(x, y);
                const double dgx = w * sp.gx.at(x, y) / m;
                const double dgy = w * sp.gy.at(x, y) / m;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int sx = clamp_idx(x + dx, p.width);
                        const int sy = clamp_idx(y + dy, p.height);
                        grad.at(c, sy, sx) +=
                            dgx * kKx[dy + 1][dx + 1] + dgy * kKy[dy + 1][dx + 1];
                    }
                }
            }
        }
    }
    return grad;
}

void validate_one_hot(const Tensor3& t) {
    for (int y = 0; y < t.height; ++y) {
        for (int x = 0; x < t.width; ++x) {
            int ones = 0;
            for (int c = 0; c < t.channels; ++c) {
                const double v = t.at(c, y, x);
                if (v == 1.0) {
                    ++ones;
                } else if (v != 0.0) {
                    std::ostringstream oss;
                    oss << "one-hot tensor has value " << v << " at (" << c << "," << y << ","
                        << x << ")";
                    fail(Errc::InvalidArgument, oss.str());
                }
            }
            if (ones != 1) {
                std::ostringstream oss;
                oss << "one-hot tensor has " << ones << " ones at pixel (" << y << "," << x
                    << ")";
                fail(Errc::InvalidArgument, oss.str());
            }
        }
    }
}

void validate_prob_map(const Tensor3& t) {
    for (int y = 0; y < t.height; ++y) {
        for (int x = 0; x < t.width; ++x) {
            double sum = 0.0;
            for (int c = 0; c < t.channels; ++c) {
                const double v = t.at(c, y, x);
                if (!(v >= 0.0 && v <= 1.0)) {
                    std::ostringstream oss;
                    oss << "probability tensor has value " << v << " at (" << c << "," << y
                        << "," << x << ")";
                    fail(Errc::InvalidArgument, oss.str());
                }
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-6) {
                std::ostringstream oss;
                oss << "probability tensor sums to " << sum << " at pixel (" << y << "," << x
                    << ")";
                fail(Errc::InvalidArgument, oss.str());
            }
        }
    }
}

Tensor3 load_tensor_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::MissingFile, "cannot open tensor file " + path.string());
    long long c = 0;
    long long h = 0;
    long long w = 0;
    if (!(in >> c >> h >> w) || c < 1 || h < 1 || w < 1 || c > 4096 || h > 8192 || w > 8192) {
        fail(Errc::InvalidArgument, "bad tensor header in " + path.string());
    }
    Tensor3 t = Tensor3::zeros(int(c), int(h), int(w));
    for (double& v : t.data) {
        if (!(in >> v)) {
            fail(Errc::InvalidArgument, "tensor file " + path.string() + " is truncated");
        }
    }
    double extra = 0.0;
    if (in >> extra) {
        fail(Errc::InvalidArgument, "tensor file " + path.string() + " has trailing values");
    }
    return t;
}

void save_tensor_text(const std::filesystem::path& path, const Tensor3& t) {
    std::ofstream out(path);
    if (!out) fail(Errc::IoFailure, "cannot write tensor file " + path.string());
    out.precision(std::numeric_limits<double>::max_digits10);
    out << t.channels << " " << t.height << " " << t.width << "\n";
    for (int c = 0; c < t.channels; ++c) {
        for (int y = 0; y < t.height; ++y) {
            for (int x = 0; x < t.width; ++x) {
                if (x) out << " ";
                out << t.at(c, y, x);
            }
            out << "\n";
        }
    }
    if (!out) fail(Errc::IoFailure, "write failed for tensor file " + path.string());
}

} // namespace cvs
