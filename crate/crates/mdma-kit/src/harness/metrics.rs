//! Evaluation metrics: mask overlap, motion-histogram fidelity, and an
//! attention isolation probe.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::attention::{masked_attention, MaskMode, ProjectedTokens};
use crate::error::{Error, Result};
use crate::layout::SpatialMask;
use crate::mask::AttentionMask;
use crate::rng::{seeded_stream, streams};

use super::scenario::FlowField;

/// Intersection-over-union of two binary masks. Both empty → 1.0 (identical).
pub fn mask_iou(a: &SpatialMask, b: &SpatialMask) -> Result<f64> {
    if a.grid.rows() != b.grid.rows() || a.grid.cols() != b.grid.cols() {
        return Err(Error::DimensionMismatch {
            what: "mask grids",
            expected: format!("{}x{}", a.grid.rows(), a.grid.cols()),
            got: format!("{}x{}", b.grid.rows(), b.grid.cols()),
        });
    }
    let mut inter: u64 = 0;
    let mut union: u64 = 0;
    for (&x, &y) in a.grid.data().iter().zip(b.grid.data()) {
        if x != 0 && y != 0 {
            inter += 1;
        }
        if x != 0 || y != 0 {
            union += 1;
        }
    }
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}

pub const MAGNITUDE_BINS: usize = 32;
pub const DIRECTION_BINS: usize = 16;
/// Cells whose displacement magnitude is below this contribute no direction.
pub const DIRECTION_MIN_MAGNITUDE: f32 = 1e-6;

/// Integer histogram counts for one side of a fidelity comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
struct MotionHistogram {
    magnitude: Vec<u64>,
    direction: Vec<u64>,
    /// Total cells counted into the magnitude histogram.
    magnitude_total: u64,
    /// Total cells counted into the direction histogram (moving cells only).
    direction_total: u64,
}

fn magnitudes_and_angles(
    flow: &FlowField,
    mask: &SpatialMask,
) -> Result<Vec<(f64, f64)>> {
    if mask.grid.rows() != flow.grid_h() || mask.grid.cols() != flow.grid_w() {
        return Err(Error::DimensionMismatch {
            what: "flow/mask grids",
            expected: format!("{}x{}", flow.grid_h(), flow.grid_w()),
            got: format!("{}x{}", mask.grid.rows(), mask.grid.cols()),
        });
    }
    let mut out = Vec::new();
    for r in 0..flow.grid_h() {
        for c in 0..flow.grid_w() {
            if !mask.grid.get(r, c) {
                continue;
            }
            let (dx, dy) = flow.get(r, c);
            if !dx.is_finite() || !dy.is_finite() {
                return Err(Error::NonFinite("flow field"));
            }
            let mag = ((dx as f64).powi(2) + (dy as f64).powi(2)).sqrt();
            let angle = (dy as f64).atan2(dx as f64);
            out.push((mag, angle));
        }
    }
    Ok(out)
}

/// Histograms the pooled samples of both sides over a shared magnitude range.
fn histogram_pair(
    samples_a: &[(f64, f64)],
    samples_b: &[(f64, f64)],
) -> (MotionHistogram, MotionHistogram) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(m, _) in samples_a.iter().chain(samples_b) {
        lo = lo.min(m);
        hi = hi.max(m);
    }
    let span = hi - lo;
    let mag_bin = |m: f64| -> usize {
        if span <= 0.0 {
            return 0;
        }
        let b = (((m - lo) / span) * MAGNITUDE_BINS as f64).floor() as usize;
        b.min(MAGNITUDE_BINS - 1)
    };
    let dir_bin = |a: f64| -> usize {
        let t = (a + std::f64::consts::PI) / (2.0 * std::f64::consts::PI);
        ((t * DIRECTION_BINS as f64).floor() as usize).min(DIRECTION_BINS - 1)
    };
    let build = |samples: &[(f64, f64)]| -> MotionHistogram {
        let mut magnitude = vec![0u64; MAGNITUDE_BINS];
        let mut direction = vec![0u64; DIRECTION_BINS];
        let mut direction_total = 0u64;
        for &(m, a) in samples {
            magnitude[mag_bin(m)] += 1;
            if m >= DIRECTION_MIN_MAGNITUDE as f64 {
                direction[dir_bin(a)] += 1;
                direction_total += 1;
            }
        }
        MotionHistogram {
            magnitude,
            direction,
            magnitude_total: samples.len() as u64,
            direction_total,
        }
    };
    (build(samples_a), build(samples_b))
}

/// Normalized histogram intersection computed on integer counts:
/// Σ_b min(count_a[b]·total_b, count_b[b]·total_a) / (total_a·total_b).
/// Exact 1.0 when the count vectors are identical.
fn intersection(counts_a: &[u64], total_a: u64, counts_b: &[u64], total_b: u64) -> f64 {
    debug_assert_eq!(counts_a.len(), counts_b.len());
    if total_a == 0 || total_b == 0 {
        return 0.0;
    }
    let mut acc: u64 = 0;
    for (&ca, &cb) in counts_a.iter().zip(counts_b) {
        acc += (ca * total_b).min(cb * total_a);
    }
    acc as f64 / (total_a as f64 * total_b as f64)
}

fn fidelity_from_histograms(ha: &MotionHistogram, hb: &MotionHistogram) -> f64 {
    let h_mag = intersection(&ha.magnitude, ha.magnitude_total, &hb.magnitude, hb.magnitude_total);
    let h_dir = if ha.direction_total == 0 && hb.direction_total == 0 {
        1.0
    } else if ha.direction_total == 0 || hb.direction_total == 0 {
        0.0
    } else {
        intersection(&ha.direction, ha.direction_total, &hb.direction, hb.direction_total)
    };
    0.5 * (h_mag + h_dir)
}

/// Motion fidelity between two flow fields restricted to object masks:
/// the mean of magnitude- and direction-histogram intersections. Symmetric,
/// in [0, 1], and exactly 1.0 when both restricted flows are identical.
pub fn flow_fidelity(
    flow_a: &FlowField,
    mask_a: &SpatialMask,
    flow_b: &FlowField,
    mask_b: &SpatialMask,
) -> Result<f64> {
    let sa = magnitudes_and_angles(flow_a, mask_a)?;
    let sb = magnitudes_and_angles(flow_b, mask_b)?;
    if sa.is_empty() && sb.is_empty() {
        return Ok(1.0);
    }
    if sa.is_empty() || sb.is_empty() {
        return Ok(0.0);
    }
    let (ha, hb) = histogram_pair(&sa, &sb);
    Ok(fidelity_from_histograms(&ha, &hb))
}

/// Fidelity over whole tracks: samples from every frame transition are pooled
/// into one histogram per side before intersecting. `flows_*[l]` pairs with
/// `track_*[l]` (the mask at the transition's source frame), so tracks must be
/// one frame longer than the flow lists.
pub fn flow_fidelity_tracks(
    flows_a: &[FlowField],
    track_a: &[SpatialMask],
    flows_b: &[FlowField],
    track_b: &[SpatialMask],
) -> Result<f64> {
    if track_a.len() != flows_a.len() + 1 {
        return Err(Error::DimensionMismatch {
            what: "track length",
            expected: format!("{}", flows_a.len() + 1),
            got: format!("{}", track_a.len()),
        });
    }
    if track_b.len() != flows_b.len() + 1 {
        return Err(Error::DimensionMismatch {
            what: "track length",
            expected: format!("{}", flows_b.len() + 1),
            got: format!("{}", track_b.len()),
        });
    }
    let mut sa = Vec::new();
    for (flow, mask) in flows_a.iter().zip(track_a) {
        sa.extend(magnitudes_and_angles(flow, mask)?);
    }
    let mut sb = Vec::new();
    for (flow, mask) in flows_b.iter().zip(track_b) {
        sb.extend(magnitudes_and_angles(flow, mask)?);
    }
    if sa.is_empty() && sb.is_empty() {
        return Ok(1.0);
    }
    if sa.is_empty() || sb.is_empty() {
        return Ok(0.0);
    }
    let (ha, hb) = histogram_pair(&sa, &sb);
    Ok(fidelity_from_histograms(&ha, &hb))
}

/// Result of an isolation probe: the largest output change observed at any
/// token belonging to a *different* object than the one perturbed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakReport {
    pub max_abs_delta: f32,
    pub trials: usize,
}

/// Perturbs the keys/values of `object`'s motion tokens and motion-text
/// tokens and measures how much the attention output changes at tokens tied
/// to *other* objects (their motion tokens, their motion-text tokens, and
/// their masked video tokens). With exact masking and disjoint object masks
/// the supremum is exactly zero; with multiplicative logit masking it is not.
pub fn leak_probe(
    tokens: &ProjectedTokens,
    mask: &AttentionMask,
    object_masks: &[Vec<SpatialMask>],
    object: usize,
    mode: MaskMode,
    trials: usize,
    seed: u64,
) -> Result<LeakReport> {
    let layout = mask.layout();
    if tokens.total_tokens() != layout.total() {
        return Err(Error::DimensionMismatch {
            what: "token count",
            expected: format!("{}", layout.total()),
            got: format!("{}", tokens.total_tokens()),
        });
    }
    if object_masks.len() != layout.n_objects() {
        return Err(Error::SpanCountMismatch {
            expected: layout.n_objects(),
            got: object_masks.len(),
        });
    }
    if object >= layout.n_objects() {
        return Err(Error::IndexOutOfRange {
            what: "object",
            got: object,
            limit: layout.n_objects(),
        });
    }
    if trials < 1 {
        return Err(Error::InvalidCount {
            what: "trials",
            min: 1,
            got: trials,
        });
    }
    for track in object_masks {
        layout.validate_mask_track(track)?;
    }

    // Tokens to perturb: the object's motion span plus its motion-text span.
    // (Text tokens come first in the sequence, so text-span indices are
    // already global.)
    let mut perturbed: Vec<usize> = Vec::new();
    perturbed.extend(layout.motion_span_global(object)?.indices());
    perturbed.extend(layout.text_motion_spans()[object].indices());

    // Tokens to observe: everything tied to any *other* object.
    let mut observed: Vec<usize> = Vec::new();
    for other in 0..layout.n_objects() {
        if other == object {
            continue;
        }
        observed.extend(layout.motion_span_global(other)?.indices());
        observed.extend(layout.text_motion_spans()[other].indices());
        observed.extend(layout.object_video_tokens(&object_masks[other])?);
    }
    observed.sort_unstable();
    observed.dedup();
    if observed.is_empty() {
        return Err(Error::EmptySelection);
    }

    let dense = mask.dense()?;
    let baseline = masked_attention(tokens, &dense, mode)?;

    let mut rng = seeded_stream(seed, streams::LEAK);
    let mut max_abs_delta: f32 = 0.0;
    for _ in 0..trials {
        let mut perturbed_tokens = tokens.clone();
        for &t in &perturbed {
            let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Vec<f32>> {
                (0..tokens.n_heads())
                    .map(|_| {
                        (0..tokens.head_dim())
                            .map(|_| rng.sample::<f32, _>(StandardNormal))
                            .collect()
                    })
                    .collect()
            };
            let k_rows = draw(&mut rng);
            let v_rows = draw(&mut rng);
            perturbed_tokens.set_k_token(t, &k_rows)?;
            perturbed_tokens.set_v_token(t, &v_rows)?;
        }
        let output = masked_attention(&perturbed_tokens, &dense, mode)?;
        for h in 0..tokens.n_heads() {
            for &t in &observed {
                let base = baseline.offset(&[h, t, 0])?;
                for d in 0..tokens.head_dim() {
                    let idx = base + d;
                    let delta = (output.data()[idx] - baseline.data()[idx]).abs();
                    if delta > max_abs_delta {
                        max_abs_delta = delta;
                    }
                }
            }
        }
    }
    Ok(LeakReport {
        max_abs_delta,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::scenario::{generate_scenario, random_projected_tokens, ScenarioSpec};
    use crate::mask::{assemble, AssembleOptions, Phase};
    use crate::tensor::BinaryMatrix;

    fn mask_of(frame: usize, rows: usize, cols: usize, ones: &[(usize, usize)]) -> SpatialMask {
        let mut grid = BinaryMatrix::zeros(rows, cols);
        for &(r, c) in ones {
            grid.set(r, c, true);
        }
        SpatialMask::new(frame, grid)
    }

    #[test]
    fn iou_basics() {
        let a = mask_of(0, 2, 2, &[(0, 0), (0, 1)]);
        let b = mask_of(0, 2, 2, &[(0, 1), (1, 1)]);
        assert_eq!(mask_iou(&a, &a).unwrap(), 1.0);
        assert_eq!(mask_iou(&a, &b).unwrap(), 1.0 / 3.0);
        let empty = mask_of(0, 2, 2, &[]);
        assert_eq!(mask_iou(&empty, &empty).unwrap(), 1.0);
        assert_eq!(mask_iou(&a, &empty).unwrap(), 0.0);
    }

    #[test]
    fn fidelity_identical_flows_is_exactly_one() {
        let flow = FlowField::uniform(4, 4, 1.0, -0.5);
        let mask = mask_of(0, 4, 4, &[(0, 0), (1, 1), (2, 2)]);
        let ff = flow_fidelity(&flow, &mask, &flow, &mask).unwrap();
        assert_eq!(ff, 1.0);
    }

    #[test]
    fn fidelity_uniform_reversal_is_exactly_half() {
        // Same magnitudes everywhere, directions offset by pi: magnitude
        // intersection 1, direction intersection 0.
        let fwd = FlowField::uniform(4, 4, 1.0, 0.0);
        let rev = FlowField::uniform(4, 4, -1.0, 0.0);
        let mask = mask_of(0, 4, 4, &[(0, 0), (3, 3)]);
        let ff = flow_fidelity(&fwd, &mask, &rev, &mask).unwrap();
        assert_eq!(ff, 0.5);
    }

    #[test]
    fn fidelity_empty_sides() {
        let flow = FlowField::uniform(2, 2, 1.0, 0.0);
        let empty = mask_of(0, 2, 2, &[]);
        let full = mask_of(0, 2, 2, &[(0, 0)]);
        assert_eq!(flow_fidelity(&flow, &empty, &flow, &empty).unwrap(), 1.0);
        assert_eq!(flow_fidelity(&flow, &empty, &flow, &full).unwrap(), 0.0);
    }

    #[test]
    fn fidelity_static_masks_with_zero_flow_is_one() {
        // All displacements below the direction cutoff: both direction
        // histograms empty -> direction term 1.0; magnitudes identical.
        let flow = FlowField::zeros(3, 3);
        let mask = mask_of(0, 3, 3, &[(1, 1)]);
        assert_eq!(flow_fidelity(&flow, &mask, &flow, &mask).unwrap(), 1.0);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded() {
        let a = FlowField::uniform(3, 3, 0.7, 0.2);
        let mut b = FlowField::uniform(3, 3, -0.3, 0.9);
        b.set(0, 0, 2.0, 2.0);
        let ma = mask_of(0, 3, 3, &[(0, 0), (1, 1), (2, 0)]);
        let mb = mask_of(0, 3, 3, &[(0, 0), (2, 2)]);
        let ab = flow_fidelity(&a, &ma, &b, &mb).unwrap();
        let ba = flow_fidelity(&b, &mb, &a, &ma).unwrap();
        assert_eq!(ab, ba);
        assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn track_fidelity_length_checks() {
        let flows = vec![FlowField::zeros(2, 2)];
        let track = vec![mask_of(0, 2, 2, &[(0, 0)])];
        let err = flow_fidelity_tracks(&flows, &track, &flows, &track).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn exact_masking_has_zero_leak_and_logit_masking_does_not() {
        let spec = ScenarioSpec::with_default_objects(42, 2, 2, 6, 6, 1, 1, 0.0, 4).unwrap();
        let scenario = generate_scenario(&spec).unwrap();
        let layout = &scenario.layout;
        let tracks = scenario.gt_mask_lists();
        let mask = assemble(layout, &tracks, Phase::Inference, AssembleOptions::default()).unwrap();
        let tokens = random_projected_tokens(42, 2, layout.total(), 4).unwrap();

        let exact = leak_probe(&tokens, &mask, &tracks, 0, MaskMode::NegInf, 3, 42).unwrap();
        assert_eq!(exact.max_abs_delta, 0.0);

        let leaky = leak_probe(&tokens, &mask, &tracks, 0, MaskMode::MulLogits, 3, 42).unwrap();
        assert!(leaky.max_abs_delta > 0.0);
    }
}
