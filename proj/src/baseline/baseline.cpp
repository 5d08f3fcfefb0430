#include "baseline/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "support/errors.hpp"

namespace echofilter::baseline {

core::Echogram gaussian_blur_2d(const core::Echogram& eg, int kernel, double sigma) {
    if (kernel < 1 || kernel % 2 == 0) throw DomainError("blur kernel side must be odd");
    if (sigma <= 0.0) throw DomainError("blur sigma must be positive");
    const int radius = kernel / 2;
    std::vector<double> k1(kernel);
    for (int i = -radius; i <= radius; ++i)
        k1[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));

    const int np = eg.n_pings(), nd = eg.n_depths();
    // separable mask-weighted pass: numerator conv(v*m), denominator conv(m)
    std::vector<double> num(static_cast<size_t>(np) * nd, 0.0);
    std::vector<double> den(static_cast<size_t>(np) * nd, 0.0);
    for (int i = 0; i < np; ++i) {
        for (int d = 0; d < nd; ++d) {
            double n = 0.0, m = 0.0;
            for (int r = -radius; r <= radius; ++r) {
                const int s = i + r;
                if (s < 0 || s >= np) continue;
                const size_t idx = static_cast<size_t>(s) * nd + d;
                if (!eg.present[idx]) continue;
                n += k1[r + radius] * eg.sv[idx];
                m += k1[r + radius];
            }
            num[static_cast<size_t>(i) * nd + d] = n;
            den[static_cast<size_t>(i) * nd + d] = m;
        }
    }
    core::Echogram out = eg;
    for (int i = 0; i < np; ++i) {
        for (int d = 0; d < nd; ++d) {
            double n = 0.0, m = 0.0;
            for (int r = -radius; r <= radius; ++r) {
                const int s = d + r;
                if (s < 0 || s >= nd) continue;
                const size_t idx = static_cast<size_t>(i) * nd + s;
                n += k1[r + radius] * num[idx];
                m += k1[r + radius] * den[idx];
            }
            const size_t idx = static_cast<size_t>(i) * nd + d;
            if (m > 0.0) {
                out.sv[idx] = static_cast<float>(n / m);
                out.present[idx] = 1;
            } else {
                out.sv[idx] = 0.0f;
                out.present[idx] = 0;
            }
        }
    }
    return out;
}

core::BoundaryLine threshold_offset_pick(const core::Echogram& blurred,
                                         const core::BoundaryLine& surface, double min_db) {
    const int np = blurred.n_pings(), nd = blurred.n_depths();
    core::BoundaryLine line;
    line.depths.assign(np, 0.0);
    line.valid.assign(np, 1);
    for (int i = 0; i < np; ++i) {
        int start = 0;
        if (i < static_cast<int>(surface.depths.size()) &&
            (surface.valid.empty() || surface.valid[i])) {
            start = std::clamp(
                static_cast<int>(std::lround((surface.depths[i] - blurred.depths[0]) /
                                             blurred.depth_step())),
                0, nd - 1);
        }
        int found = -1;
        for (int d = start; d < nd; ++d) {
            const size_t idx = static_cast<size_t>(i) * nd + d;
            if (!blurred.present[idx]) continue;
            if (blurred.sv[idx] < min_db) {
                found = d;
                break;
            }
        }
        if (found >= 0) {
            line.depths[i] = blurred.depths[found];
        } else {
            line.depths[i] = blurred.depths[nd - 1];
            line.valid[i] = 0;
        }
    }
    return line;
}

core::BoundaryLine best_bottom_candidate(const core::Echogram& eg, double good_pick_db,
                                         double discrimination_db, double backstep_db,
                                         bool invert) {
    const int np = eg.n_pings(), nd = eg.n_depths();
    core::BoundaryLine line;
    line.depths.assign(np, 0.0);
    line.valid.assign(np, 0);
    std::vector<double> v(nd);
    std::vector<uint8_t> ok(nd);
    for (int i = 0; i < np; ++i) {
        for (int d = 0; d < nd; ++d) {
            const size_t idx = static_cast<size_t>(i) * nd + d;
            ok[d] = eg.present[idx];
            v[d] = invert ? -eg.sv[idx] - 150.0 : eg.sv[idx];
        }
        // strongest sample that heads a sustained strong layer; ties keep the
        // shallowest so backstepping starts from the layer's near edge
        int pick = -1;
        for (int d = 0; d + 2 < nd; ++d) {
            if (!ok[d] || v[d] <= good_pick_db) continue;
            if (ok[d + 1] && v[d + 1] > discrimination_db && ok[d + 2] &&
                v[d + 2] > discrimination_db) {
                if (pick < 0 || v[d] > v[pick]) pick = d;
            }
        }
        if (pick < 0) continue;
        // retreat toward the echosounder while the signal stays strong
        while (pick > 0 && ok[pick - 1] && v[pick - 1] >= backstep_db) --pick;
        line.depths[i] = eg.depths[pick];
        line.valid[i] = 1;
    }
    return line;
}

BaselineLines baseline_annotate(const core::Echogram& eg, const BaselineConfig& cfg) {
    const core::Echogram blurred = gaussian_blur_2d(eg, cfg.blur_kernel, cfg.blur_sigma);
    BaselineLines out;
    if (eg.orientation == core::Orientation::kDownfacing) {
        out.seafloor = best_bottom_candidate(blurred, cfg.good_pick_db, cfg.discrimination_db,
                                             cfg.backstep_db, false);
        for (size_t i = 0; i < out.seafloor.depths.size(); ++i)
            if (out.seafloor.valid[i]) out.seafloor.depths[i] += cfg.bottom_offset;
        out.surface.depths.assign(eg.n_pings(), eg.depths.empty() ? 0.0 : eg.depths[0]);
        out.surface.valid.assign(eg.n_pings(), 1);
    } else {
        out.surface = best_bottom_candidate(blurred, cfg.good_pick_db, cfg.discrimination_db,
                                            cfg.surface_backstep_db, false);
    }
    // entrained air: strong-to-quiet transition below the surface line
    core::BoundaryLine search_from = out.surface;
    out.entrained_air = threshold_offset_pick(blurred, search_from, cfg.threshold_min_db);
    return out;
}

}  // namespace echofilter::baseline
