#pragma once

#include <filesystem>
#include <vector>

namespace cvs {

// Dense real image, row-major.
struct Image2d {
    int width = 0;
    int height = 0;
    std::vector<double> v;

    static Image2d zeros(int width, int height);
    double at(int x, int y) const { return v[std::size_t(y) * width + x]; }
    double& at(int x, int y) { return v[std::size_t(y) * width + x]; }
};

// Dense real tensor, channel-major then row-major.
struct Tensor3 {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    static Tensor3 zeros(int channels, int height, int width);
    std::size_t index(int c, int y, int x) const {
        return (std::size_t(c) * height + y) * width + x;
    }
    double at(int c, int y, int x) const { return data[index(c, y, x)]; }
    double& at(int c, int y, int x) { return data[index(c, y, x)]; }
    bool same_shape(const Tensor3& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
};

// How per-channel edge magnitudes collapse into one edge map.
enum class ChannelReduce { Sum, Max };

struct LossConfig {
    double lambda = 1.0;
    double smooth_l1_beta = 1.0;
    ChannelReduce channel_reduce = ChannelReduce::Sum;
};

// Gradient-magnitude image: sqrt(Gx^2 + Gy^2 + 1e-12), where Gx/Gy are
// cross-correlations (kernels applied unflipped) with
//   Gx = [[2,0,-2],[4,0,-4],[2,0,-2]],  Gy = [[2,4,2],[0,0,0],[-2,-4,-2]]
// under replicate border padding. The epsilon keeps the result
// differentiable where both derivatives vanish.
Image2d sobel_magnitude(const Image2d& image);

// 0.5*x^2/beta for |x| < beta, |x| - 0.5*beta otherwise.
double smooth_l1(double x, double beta = 1.0);

// Mean over pixels of smooth_l1(edge(g) - edge(p)) where edge() is the
// channel-reduced per-channel sobel_magnitude. Throws ShapeMismatch.
double sobel_loss(const Tensor3& g, const Tensor3& p, const LossConfig& cfg = {});

// Mean over pixels of -log(p at the true class), probabilities clamped at
// 1e-12. Throws ShapeMismatch.
double cross_entropy(const Tensor3& g, const Tensor3& p);

// cross_entropy + lambda * sobel_loss. With lambda == 0 the edge term is
// skipped entirely, so the result equals cross_entropy bit-exactly.
double total_loss(const Tensor3& g, const Tensor3& p, const LossConfig& cfg = {});

struct LossBreakdown {
    double ce = 0.0;
    double sobel = 0.0;
    double total = 0.0;
};

LossBreakdown compute_loss(const Tensor3& g, const Tensor3& p, const LossConfig& cfg = {});

// Exact partial derivatives of total_loss with respect to every element of
// p, treating the elements as free variables (no renormalisation). For the
// Max reduction, ties route the subgradient to the first maximal channel.
Tensor3 grad_total_loss(const Tensor3& g, const Tensor3& p, const LossConfig& cfg = {});

// Throw InvalidArgument unless t is one-hot (values in {0,1}, exactly one 1
// per pixel) / a probability map (values in [0,1], per-pixel sum within
// 1e-6 of 1).
void validate_one_hot(const Tensor3& t);
void validate_prob_map(const Tensor3& t);

// Dense text tensor format: header line "channels height width", then for
// each channel `height` lines of `width` space-separated decimals. Values
// round-trip exactly.
Tensor3 load_tensor_text(const std::filesystem::path& path);
void save_tensor_text(const std::filesystem::path& path, const Tensor3& t);

} // namespace cvs
