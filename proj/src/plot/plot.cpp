#include "plot/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "support/errors.hpp"

namespace echofilter::plot {

namespace {

struct Image {
    int w, h;
    std::vector<uint8_t> px;  // rgb

    Image(int w_, int h_) : w(w_), h(h_), px(static_cast<size_t>(w_) * h_ * 3, 255) {}

    void set(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
        if (x < 0 || x >= w || y < 0 || y >= h) return;
        const size_t i = (static_cast<size_t>(y) * w + x) * 3;
        px[i] = r;
        px[i + 1] = g;
        px[i + 2] = b;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path);
        out << "P6\n" << w << " " << h << "\n255\n";
        out.write(reinterpret_cast<const char*>(px.data()),
                  static_cast<std::streamsize>(px.size()));
    }
};

}  // namespace

void render_echogram(const core::Echogram& eg, const std::vector<LineOverlay>& overlays,
                     const std::string& path, double db_lo, double db_hi) {
    const int np = eg.n_pings(), nd = eg.n_depths();
    if (np < 1 || nd < 1) throw DomainError("empty echogram");
    Image img(np, nd);
    for (int i = 0; i < np; ++i) {
        for (int k = 0; k < nd; ++k) {
            if (!eg.present_at(i, k)) {
                img.set(i, k, 40, 40, 40);
                continue;
            }
            double t = (eg.at(i, k) - db_lo) / (db_hi - db_lo);
            t = std::clamp(t, 0.0, 1.0);
            // blue -> cyan -> yellow ramp
            const auto r = static_cast<uint8_t>(255.0 * std::clamp(2.0 * t - 1.0, 0.0, 1.0));
            const auto g = static_cast<uint8_t>(255.0 * std::clamp(2.0 * t, 0.0, 1.0) * 0.9);
            const auto b = static_cast<uint8_t>(255.0 * std::clamp(1.5 - 2.0 * t, 0.0, 1.0));
            img.set(i, k, r, g, b);
        }
    }
    const double d0 = eg.depths.front();
    const double step = eg.depth_step() > 0 ? eg.depth_step() : 1.0;
    for (const auto& ov : overlays) {
        if (!ov.line) continue;
        for (int i = 0; i < np && i < ov.line->n_pings(); ++i) {
            if (!ov.line->valid.empty() && !ov.line->valid[i]) continue;
            const int k = static_cast<int>(std::lround((ov.line->depths[i] - d0) / step));
            img.set(i, k, ov.r, ov.g, ov.b);
            img.set(i, k + 1, ov.r, ov.g, ov.b);
        }
    }
    img.save(path);
}

void render_error_cdf(const std::vector<CdfSeries>& series, const std::string& path,
                      int width, int height) {
    if (width < 16 || height < 16) throw DomainError("chart too small");
    Image img(width, height);
    const int margin = 8;
    // axes
    for (int x = margin; x < width - margin; ++x) img.set(x, height - margin, 0, 0, 0);
    for (int y = margin; y < height - margin; ++y) img.set(margin, y, 0, 0, 0);

    double t_max = 1e-9;
    for (const auto& s : series)
        for (const auto& p : s.curve) t_max = std::max(t_max, p.threshold);

    for (const auto& s : series) {
        int px = -1, py = -1;
        for (const auto& p : s.curve) {
            const int x = margin + static_cast<int>((width - 2 * margin - 1) * p.threshold /
                                                    t_max);
            const int y = height - margin -
                          static_cast<int>((height - 2 * margin - 1) * p.fraction);
            if (px >= 0) {
                const int steps = std::max(std::abs(x - px), std::abs(y - py)) + 1;
                for (int t = 0; t <= steps; ++t) {
                    const int ix = px + (x - px) * t / steps;
                    const int iy = py + (y - py) * t / steps;
                    img.set(ix, iy, s.r, s.g, s.b);
                }
            } else {
                img.set(x, y, s.r, s.g, s.b);
            }
            px = x;
            py = y;
        }
    }
    img.save(path);
}

}  // namespace echofilter::plot
