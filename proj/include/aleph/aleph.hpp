#pragma once

#include "aleph/image.hpp"
#include "aleph/motion.hpp"
#include "aleph/pyramid.hpp"
#include "aleph/saliency.hpp"

namespace aleph {

enum class CompensationMode { Zero, Full, Saliency };

// How the contrast ceiling of the velocity-dependent sensitivity curve is
// taken: Analytic evaluates the curve at its true peak frequency
// rho_max/(2*pi*c1); Literal uses that frequency value itself as the ceiling
// and switches the elevation branch at rho_max.
enum class CsfMaxMode { Analytic, Literal };

struct CsfParams {
    double c0 = 1.14;
    double c1 = 0.67;
    double c2 = 1.7;
    double v_min = 0.15;               // deg/s, drift floor
    double v_max = 80.0;               // deg/s, tracking ceiling
    double tracking_efficiency = 0.82;
    CsfMaxMode max_mode = CsfMaxMode::Analytic;
};

// Retinal velocity after eye-tracking compensation, clamped to >= v_min.
// Zero: v_min. Full: v_I - min(eff*v_I + v_min, v_max). Saliency: the
// tracking efficiency is the per-pixel saliency s.
double compensate_velocity(double v_image, double s, CompensationMode mode,
                           const CsfParams& p = {});

// Spatiotemporal contrast sensitivity at spatial frequency rho (cpd) and
// retinal velocity v_r (deg/s).
double csf_value(double rho, double v_r, const CsfParams& p = {});

struct CsfPeak {
    double rho_peak;  // cpd; elevation starts above this frequency
    double csf_max;
};

CsfPeak csf_peak(double v_r, const CsfParams& p = {});

// Contrast elevation for a band centered at rho_band: csf_max / csf(rho_band)
// above the peak frequency, 1 below it, clamped to [1, 250].
double elevation_factor(double rho_band, double v_r, const CsfParams& p = {});

struct AlephMap {
    ImageBuffer value;  // per-pixel tolerance elevation in [1, 250]
};

// Per-pixel sum over the seven bands of R_i * elevation(rho_i, v_r). The
// saliency map may be empty unless mode == Saliency.
AlephMap compute_aleph(const BandWeights& bands, const VelocityField& vel,
                       const SaliencyMap& sal, CompensationMode mode,
                       const CsfParams& p = {},
                       const DisplayGeometry& geom = {});

}  // namespace aleph
