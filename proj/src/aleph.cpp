#include "aleph/aleph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aleph {

double compensate_velocity(double v_image, double s, CompensationMode mode,
                           const CsfParams& p) {
    double v_r = p.v_min;
    switch (mode) {
        case CompensationMode::Zero:
            v_r = p.v_min;
            break;
        case CompensationMode::Full:
            v_r = v_image - std::min(p.tracking_efficiency * v_image + p.v_min, p.v_max);
            break;
        case CompensationMode::Saliency:
            v_r = v_image - std::min(s * v_image + p.v_min, p.v_max);
            break;
    }
    return std::max(v_r, p.v_min);
}

double csf_value(double rho, double v_r, const CsfParams& p) {
    const double k = 6.1 + 7.3 * std::pow(std::abs(std::log10(p.c2 * v_r / 3.0)), 3.0);
    const double rho_max = 45.9 / (p.c2 * v_r + 2.0);
    const double w = 2.0 * M_PI * rho * p.c1;
    return k * p.c0 * p.c2 * v_r * w * w * std::exp(-4.0 * M_PI * p.c1 * rho / rho_max);
}

CsfPeak csf_peak(double v_r, const CsfParams& p) {
    const double rho_max = 45.9 / (p.c2 * v_r + 2.0);
    const double rho_peak = rho_max / (2.0 * M_PI * p.c1);
    if (p.max_mode == CsfMaxMode::Literal)
        return {rho_max, rho_peak};  // branch at rho_max, ceiling as typeset
    return {rho_peak, csf_value(rho_peak, v_r, p)};
}

double elevation_factor(double rho_band, double v_r, const CsfParams& p) {
    const CsfPeak peak = csf_peak(v_r, p);
    double f = 1.0;
    if (rho_band > peak.rho_peak) f = peak.csf_max / csf_value(rho_band, v_r, p);
    return std::clamp(f, 1.0, 250.0);
}

AlephMap compute_aleph(const BandWeights& bands, const VelocityField& vel,
                       const SaliencyMap& sal, CompensationMode mode,
                       const CsfParams& p, const DisplayGeometry& geom) {
    const int w = bands.width, h = bands.height;
    if (vel.width != w || vel.height != h)
        throw std::invalid_argument("compute_aleph: velocity size mismatch");
    if (mode == CompensationMode::Saliency) {
        if (sal.empty() || sal.s.width != w || sal.s.height != h)
            throw std::invalid_argument("compute_aleph: saliency map missing or mismatched");
    }

    // Band centers are octaves of the pixel grid; the table is stated for
    // 31 px/deg and scales with the actual angular resolution.
    double rho[7];
    for (int i = 0; i < 7; ++i)
        rho[i] = kBandPeakCpd[i] * (geom.pixels_per_degree / 31.0);

    AlephMap out;
    out.value = ImageBuffer::scalar(w, h);
    const size_t n = out.value.data.size();
    for (size_t i = 0; i < n; ++i) {
        const double v_i = std::hypot(double(vel.vx[i]), double(vel.vy[i]));
        const double s = mode == CompensationMode::Saliency ? sal.s.data[i] : 0.0;
        const double v_r = compensate_velocity(v_i, s, mode, p);
        const CsfPeak peak = csf_peak(v_r, p);
        double acc = 0;
        for (int b = 0; b < 7; ++b) {
            const double r = bands.r[b].data[i];
            if (r == 0.0f) continue;
            double f = 1.0;
            if (rho[b] > peak.rho_peak)
                f = std::clamp(peak.csf_max / csf_value(rho[b], v_r, p), 1.0, 250.0);
            acc += r * f;
        }
        out.value.data[i] = float(acc);
    }
    return out;
}

}  // namespace aleph
