//! Straight-line reference for the motion-histogram fidelity score.

use mdma_kit::harness::scenario::FlowField;
use mdma_kit::layout::SpatialMask;

const MAGNITUDE_BINS: usize = 32;
const DIRECTION_BINS: usize = 16;
const DIRECTION_MIN_MAGNITUDE: f64 = 1e-6;

fn masked_samples(flow: &FlowField, mask: &SpatialMask) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for r in 0..flow.grid_h() {
        for c in 0..flow.grid_w() {
            if mask.grid.get(r, c) {
                let (dx, dy) = flow.get(r, c);
                let mag = ((dx as f64) * (dx as f64) + (dy as f64) * (dy as f64)).sqrt();
                out.push((mag, (dy as f64).atan2(dx as f64)));
            }
        }
    }
    out
}

/// Normalized-histogram intersection: sum of per-bin minima of the two
/// frequency vectors.
fn intersection(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        acc += x.min(y);
    }
    acc
}

/// Fidelity between two masked flow sample sets: mean of the magnitude- and
/// direction-histogram intersections. Magnitudes use 32 uniform bins over
/// the pooled range of both sides; directions use 16 angular bins with
/// near-zero displacements excluded.
fn fidelity(samples_a: &[(f64, f64)], samples_b: &[(f64, f64)]) -> f64 {
    if samples_a.is_empty() && samples_b.is_empty() {
        return 1.0;
    }
    if samples_a.is_empty() || samples_b.is_empty() {
        return 0.0;
    }

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(m, _) in samples_a.iter().chain(samples_b) {
        if m < lo {
            lo = m;
        }
        if m > hi {
            hi = m;
        }
    }

    let histogram = |samples: &[(f64, f64)]| -> (Vec<f64>, Vec<f64>, usize) {
        let mut mag = vec![0.0f64; MAGNITUDE_BINS];
        let mut dir = vec![0.0f64; DIRECTION_BINS];
        let mut moving = 0usize;
        for &(m, a) in samples {
            let mb = if hi > lo {
                let b = (((m - lo) / (hi - lo)) * MAGNITUDE_BINS as f64).floor() as usize;
                b.min(MAGNITUDE_BINS - 1)
            } else {
                0
            };
            mag[mb] += 1.0;
            if m >= DIRECTION_MIN_MAGNITUDE {
                let t = (a + std::f64::consts::PI) / (2.0 * std::f64::consts::PI);
                let db = ((t * DIRECTION_BINS as f64).floor() as usize).min(DIRECTION_BINS - 1);
                dir[db] += 1.0;
                moving += 1;
            }
        }
        for v in &mut mag {
            *v /= samples.len() as f64;
        }
        if moving > 0 {
            for v in &mut dir {
                *v /= moving as f64;
            }
        }
        (mag, dir, moving)
    };

    let (mag_a, dir_a, moving_a) = histogram(samples_a);
    let (mag_b, dir_b, moving_b) = histogram(samples_b);
    let h_mag = intersection(&mag_a, &mag_b);
    let h_dir = if moving_a == 0 && moving_b == 0 {
        1.0
    } else if moving_a == 0 || moving_b == 0 {
        0.0
    } else {
        intersection(&dir_a, &dir_b)
    };
    0.5 * (h_mag + h_dir)
}

/// Single-pair fidelity.
pub fn naive_flow_fidelity(
    flow_a: &FlowField,
    mask_a: &SpatialMask,
    flow_b: &FlowField,
    mask_b: &SpatialMask,
) -> f64 {
    fidelity(&masked_samples(flow_a, mask_a), &masked_samples(flow_b, mask_b))
}

/// Track fidelity: samples from every frame transition pooled per side.
/// `tracks` must be one mask longer than `flows`; the trailing mask is
/// unused because there is no transition out of the last frame.
pub fn naive_flow_fidelity_tracks(
    flows_a: &[FlowField],
    track_a: &[SpatialMask],
    flows_b: &[FlowField],
    track_b: &[SpatialMask],
) -> f64 {
    assert_eq!(track_a.len(), flows_a.len() + 1);
    assert_eq!(track_b.len(), flows_b.len() + 1);
    let mut samples_a = Vec::new();
    for (flow, mask) in flows_a.iter().zip(track_a) {
        samples_a.extend(masked_samples(flow, mask));
    }
    let mut samples_b = Vec::new();
    for (flow, mask) in flows_b.iter().zip(track_b) {
        samples_b.extend(masked_samples(flow, mask));
    }
    fidelity(&samples_a, &samples_b)
}
