//! Synthetic scenes with analytic ground truth.
//!
//! A scenario is built from per-object blob + motion specs. Each object's
//! grid cells carry a feature signature that travels with the object, so
//! correlation-based propagation is well-posed and its expected behavior can
//! be stated analytically:
//!
//! * Signatures: one random channel-space direction per object plus one for
//!   the background, Gram-Schmidt orthogonalized against each other. Object
//!   signatures have norm 2, the background norm 1.
//! * Jitter: every cell adds a small (norm 0.05) vector orthogonal to all
//!   signatures, making cells within one object distinguishable while
//!   keeping cross-cell correlations far below the mask threshold even for
//!   single-cell objects. Object
//!   jitter is indexed by the cell's position *within the blob*, so a moving
//!   cell keeps its exact feature vector from frame to frame; background
//!   jitter is fixed per grid cell.
//! * Denoising-step noise: per-step additive Gaussian noise with scale
//!   σ_i = σ0 · max(0, c−1−i)/(c−1) for step i (0-based) and convergence
//!   step c (1-based), i.e. linearly decaying and exactly zero from step c
//!   on. Steps with σ = 0 reuse the clean features bit-for-bit.
//!
//! Masks and flows come from the motion specs themselves, not from any
//! propagation, so they serve as ground truth.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::attention::ProjectedTokens;
use crate::error::{Error, Result};
use crate::layout::{build_layout, Span, SpatialMask, TokenLayout};
use crate::rmpm::{FeatureSequence, MaskTrack};
use crate::rng::{seeded_stream, streams};
use crate::tensor::{BinaryMatrix, Tensor};

/// Per-frame motion of one object, in grid cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MotionSpec {
    Static,
    /// Shift by (dx columns, dy rows) every frame.
    Translate { dx: i32, dy: i32 },
    /// Rotate about the blob center by this many degrees every frame; cell
    /// positions are rounded to the grid.
    Rotate { degrees_per_frame: f32 },
}

impl MotionSpec {
    pub fn label(&self) -> String {
        match self {
            MotionSpec::Static => "static".into(),
            MotionSpec::Translate { dx, dy } => format!("translate({dx:+},{dy:+})"),
            MotionSpec::Rotate { degrees_per_frame } => {
                format!("rotate({degrees_per_frame} deg/frame)")
            }
        }
    }
}

/// An axis-aligned blob of cells at frame 0: top-left (row, col) and size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Blob {
    pub row: usize,
    pub col: usize,
    pub height: usize,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub blob: Blob,
    pub motion: MotionSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub seed: u64,
    pub frames: usize,
    pub grid_h: usize,
    pub grid_w: usize,
    pub channels: usize,
    /// Denoising steps to synthesize features for.
    pub steps: usize,
    /// 1-based step at which additive noise first reaches exactly zero.
    pub convergence_step: usize,
    /// Noise scale at the first step.
    pub noise_sigma: f32,
    pub objects: Vec<ObjectSpec>,
    /// Reject object placements whose frame-0 blobs overlap.
    pub disjoint: bool,
}

impl ScenarioSpec {
    /// Default placement for `objects` objects on the grid: equal square
    /// blobs along the left edge, spread vertically, all translating one
    /// cell per frame to the right.
    #[allow(clippy::too_many_arguments)]
    pub fn with_default_objects(
        seed: u64,
        objects: usize,
        frames: usize,
        grid_h: usize,
        grid_w: usize,
        steps: usize,
        convergence_step: usize,
        noise_sigma: f32,
        channels: usize,
    ) -> Result<Self> {
        if objects < 1 {
            return Err(Error::InvalidCount {
                what: "objects",
                min: 1,
                got: objects,
            });
        }
        let side = (grid_h.min(grid_w) / 5).max(1);
        let specs = (0..objects)
            .map(|k| {
                let row = if objects == 1 {
                    (grid_h - side) / 2
                } else {
                    1 + k * (grid_h.saturating_sub(side + 2)) / (objects - 1)
                };
                ObjectSpec {
                    blob: Blob {
                        row,
                        col: 1,
                        height: side,
                        width: side,
                    },
                    motion: MotionSpec::Translate { dx: 1, dy: 0 },
                }
            })
            .collect();
        Ok(Self {
            seed,
            frames,
            grid_h,
            grid_w,
            channels,
            steps,
            convergence_step,
            noise_sigma,
            objects: specs,
            disjoint: true,
        })
    }

    /// Noise scale at a 0-based step index.
    pub fn noise_at(&self, step: usize) -> f32 {
        let c = self.convergence_step;
        if c <= 1 || step + 1 >= c {
            return 0.0;
        }
        self.noise_sigma * ((c - 1 - step) as f32 / (c - 1) as f32)
    }
}

/// Exact displacement field between consecutive frames: (dx, dy) per cell,
/// dx along columns, dy along rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    grid_h: usize,
    grid_w: usize,
    data: Vec<f32>,
}

impl FlowField {
    pub fn zeros(grid_h: usize, grid_w: usize) -> Self {
        Self {
            grid_h,
            grid_w,
            data: vec![0.0; grid_h * grid_w * 2],
        }
    }

    pub fn grid_h(&self) -> usize {
        self.grid_h
    }

    pub fn grid_w(&self) -> usize {
        self.grid_w
    }

    pub fn get(&self, r: usize, c: usize) -> (f32, f32) {
        let i = (r * self.grid_w + c) * 2;
        (self.data[i], self.data[i + 1])
    }

    pub fn set(&mut self, r: usize, c: usize, dx: f32, dy: f32) {
        let i = (r * self.grid_w + c) * 2;
        self.data[i] = dx;
        self.data[i + 1] = dy;
    }

    pub fn to_tensor(&self) -> Result<Tensor> {
        Tensor::new(vec![self.grid_h, self.grid_w, 2], self.data.clone())
    }

    pub fn from_tensor(t: &Tensor) -> Result<Self> {
        let dims = t.dims();
        if dims.len() != 3 || dims[2] != 2 {
            return Err(Error::DimensionMismatch {
                what: "flow tensor shape",
                expected: "[grid_h, grid_w, 2]".into(),
                got: format!("{dims:?}"),
            });
        }
        t.validate_finite("flow field")?;
        Ok(Self {
            grid_h: dims[0],
            grid_w: dims[1],
            data: t.data().to_vec(),
        })
    }

    /// Uniform field with one displacement everywhere.
    pub fn uniform(grid_h: usize, grid_w: usize, dx: f32, dy: f32) -> Self {
        let mut field = Self::zeros(grid_h, grid_w);
        for r in 0..grid_h {
            for c in 0..grid_w {
                field.set(r, c, dx, dy);
            }
        }
        field
    }
}

/// A generated scene: geometry, per-step features, and analytic truth.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub layout: TokenLayout,
    /// Noise-free features; per-step features converge to these.
    pub clean_features: FeatureSequence,
    pub features_per_step: Vec<FeatureSequence>,
    pub gt_masks: Vec<MaskTrack>,
    /// flows[l] is the displacement from frame l to l+1 (frames−1 fields).
    pub flows: Vec<FlowField>,
    pub motion_labels: Vec<String>,
}

impl Scenario {
    /// Ground-truth first-frame masks, one per object — the propagation seeds.
    pub fn first_masks(&self) -> Vec<SpatialMask> {
        self.gt_masks.iter().map(|t| t.masks[0].clone()).collect()
    }

    /// Ground-truth masks as per-object per-frame lists.
    pub fn gt_mask_lists(&self) -> Vec<Vec<SpatialMask>> {
        self.gt_masks.iter().map(|t| t.masks.clone()).collect()
    }
}

/// Position of each blob cell at a given frame, paired with its base-cell
/// index within the blob. The earliest base cell wins when rounding makes
/// two cells land on the same grid cell.
fn object_cells_at_frame(
    spec: &ObjectSpec,
    frame: usize,
    grid_h: usize,
    grid_w: usize,
    object: usize,
) -> Result<Vec<(usize, usize, usize)>> {
    let blob = &spec.blob;
    if blob.height < 1 || blob.width < 1 {
        return Err(Error::Scenario(format!(
            "object {object} blob must be at least 1x1"
        )));
    }
    let mut out: Vec<(usize, usize, usize)> = Vec::new();
    let mut claimed = vec![false; grid_h * grid_w];
    let center_r = blob.row as f32 + (blob.height as f32 - 1.0) / 2.0;
    let center_c = blob.col as f32 + (blob.width as f32 - 1.0) / 2.0;
    for base in 0..blob.height * blob.width {
        let br = blob.row + base / blob.width;
        let bc = blob.col + base % blob.width;
        let (r, c) = match spec.motion {
            MotionSpec::Static => (br as i64, bc as i64),
            MotionSpec::Translate { dx, dy } => (
                br as i64 + dy as i64 * frame as i64,
                bc as i64 + dx as i64 * frame as i64,
            ),
            MotionSpec::Rotate { degrees_per_frame } => {
                let theta = (degrees_per_frame as f64).to_radians() * frame as f64;
                let (dy0, dx0) = (br as f64 - center_r as f64, bc as f64 - center_c as f64);
                let rc = center_c as f64 + dx0 * theta.cos() - dy0 * theta.sin();
                let rr = center_r as f64 + dx0 * theta.sin() + dy0 * theta.cos();
                (rr.round() as i64, rc.round() as i64)
            }
        };
        if r < 0 || c < 0 || r >= grid_h as i64 || c >= grid_w as i64 {
            return Err(Error::Scenario(format!(
                "object {object} leaves the {grid_h}x{grid_w} grid at frame {frame}"
            )));
        }
        let (r, c) = (r as usize, c as usize);
        if !claimed[r * grid_w + c] {
            claimed[r * grid_w + c] = true;
            out.push((r, c, base));
        }
    }
    Ok(out)
}

/// Continuous per-cell displacement of an object's base cell from frame
/// `frame` to `frame + 1`, as (dx, dy).
fn cell_flow(spec: &ObjectSpec, base: usize, frame: usize) -> (f32, f32) {
    match spec.motion {
        MotionSpec::Static => (0.0, 0.0),
        MotionSpec::Translate { dx, dy } => (dx as f32, dy as f32),
        MotionSpec::Rotate { degrees_per_frame } => {
            let blob = &spec.blob;
            let center_r = blob.row as f64 + (blob.height as f64 - 1.0) / 2.0;
            let center_c = blob.col as f64 + (blob.width as f64 - 1.0) / 2.0;
            let br = (blob.row + base / blob.width) as f64;
            let bc = (blob.col + base % blob.width) as f64;
            let (dy0, dx0) = (br - center_r, bc - center_c);
            let step = (degrees_per_frame as f64).to_radians();
            let t0 = step * frame as f64;
            let t1 = step * (frame + 1) as f64;
            let x0 = dx0 * t0.cos() - dy0 * t0.sin();
            let y0 = dx0 * t0.sin() + dy0 * t0.cos();
            let x1 = dx0 * t1.cos() - dy0 * t1.sin();
            let y1 = dx0 * t1.sin() + dy0 * t1.cos();
            ((x1 - x0) as f32, (y1 - y0) as f32)
        }
    }
}

/// Subtracts projections onto `basis` rows (each unit norm), then scales the
/// remainder to `target_norm`. Errors only if the remainder is numerically
/// zero, which random draws do not produce.
fn orthogonalized(raw: &[f32], basis: &[Vec<f32>], target_norm: f32) -> Result<Vec<f32>> {
    let mut v = raw.to_vec();
    for b in basis {
        let proj = crate::tensor::dot(&v, b);
        for (x, bc) in v.iter_mut().zip(b) {
            *x -= proj * bc;
        }
    }
    let norm = crate::tensor::dot(&v, &v).sqrt();
    if norm < 1e-6 {
        return Err(Error::Scenario(
            "degenerate feature direction; raise channels".into(),
        ));
    }
    for x in &mut v {
        *x = *x / norm * target_norm;
    }
    Ok(v)
}

/// Builds the scene: layout, analytic masks and flows, clean features, and
/// the per-step noisy feature schedule.
pub fn generate_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    let k_objects = spec.objects.len();
    if k_objects < 1 {
        return Err(Error::InvalidCount {
            what: "objects",
            min: 1,
            got: 0,
        });
    }
    for (what, got) in [
        ("frames", spec.frames),
        ("grid_h", spec.grid_h),
        ("grid_w", spec.grid_w),
        ("steps", spec.steps),
        ("convergence_step", spec.convergence_step),
    ] {
        if got < 1 {
            return Err(Error::InvalidCount { what, min: 1, got });
        }
    }
    if spec.channels < k_objects + 2 {
        return Err(Error::Scenario(format!(
            "channels must be at least objects + 2 = {} to give every object a distinct signature, got {}",
            k_objects + 2,
            spec.channels
        )));
    }
    if !spec.noise_sigma.is_finite() || spec.noise_sigma < 0.0 {
        return Err(Error::Scenario("noise_sigma must be finite and >= 0".into()));
    }

    // Analytic object trajectories, masks, and ownership maps.
    let cells = spec.grid_h * spec.grid_w;
    let mut gt_masks: Vec<MaskTrack> = Vec::with_capacity(k_objects);
    // owner[frame][cell] = (object, base cell) of the earliest object there.
    let mut owner: Vec<Vec<Option<(usize, usize)>>> = vec![vec![None; cells]; spec.frames];
    for (k, object) in spec.objects.iter().enumerate() {
        let mut masks = Vec::with_capacity(spec.frames);
        for l in 0..spec.frames {
            let mut grid = BinaryMatrix::zeros(spec.grid_h, spec.grid_w);
            for (r, c, base) in object_cells_at_frame(object, l, spec.grid_h, spec.grid_w, k)? {
                grid.set(r, c, true);
                let slot = &mut owner[l][r * spec.grid_w + c];
                if slot.is_none() {
                    *slot = Some((k, base));
                }
            }
            masks.push(SpatialMask::new(l, grid));
        }
        gt_masks.push(MaskTrack { object: k, masks });
    }
    if spec.disjoint {
        for a in 0..k_objects {
            for b in (a + 1)..k_objects {
                let ga = &gt_masks[a].masks[0].grid;
                let gb = &gt_masks[b].masks[0].grid;
                if ga.data().iter().zip(gb.data()).any(|(&x, &y)| x != 0 && y != 0) {
                    return Err(Error::Scenario(format!(
                        "objects {a} and {b} overlap at frame 0 but disjoint placement was requested"
                    )));
                }
            }
        }
    }

    // Feature signatures and jitter, all from the scenario stream.
    let mut rng = seeded_stream(spec.seed, streams::SCENARIO);
    let draw = |n: usize, rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f32> {
        (0..n).map(|_| rng.sample::<f32, _>(StandardNormal)).collect()
    };
    let mut basis: Vec<Vec<f32>> = Vec::with_capacity(k_objects + 1);
    let raw = draw(spec.channels, &mut rng);
    basis.push(orthogonalized(&raw, &[], 1.0)?);
    for _ in 0..k_objects {
        let raw = draw(spec.channels, &mut rng);
        let unit = orthogonalized(&raw, &basis, 1.0)?;
        basis.push(unit);
    }
    let background_sig: Vec<f32> = basis[0].clone(); // norm 1
    let object_sigs: Vec<Vec<f32>> = basis[1..]
        .iter()
        .map(|u| u.iter().map(|x| x * 2.0).collect())
        .collect();

    let jitter = |rng: &mut rand_chacha::ChaCha8Rng| -> Result<Vec<f32>> {
        let raw = draw(spec.channels, rng);
        orthogonalized(&raw, &basis, 0.05)
    };
    let mut background_jitter = Vec::with_capacity(cells);
    for _ in 0..cells {
        background_jitter.push(jitter(&mut rng)?);
    }
    let mut object_jitter: Vec<Vec<Vec<f32>>> = Vec::with_capacity(k_objects);
    for object in &spec.objects {
        let blob_cells = object.blob.height * object.blob.width;
        let mut table = Vec::with_capacity(blob_cells);
        for _ in 0..blob_cells {
            table.push(jitter(&mut rng)?);
        }
        object_jitter.push(table);
    }

    // Clean features: each cell is its owner's signature plus the jitter that
    // travels with it (object cells) or sits at it (background cells).
    let mut clean_frames = Vec::with_capacity(spec.frames);
    for frame_owner in owner.iter() {
        let mut frame = Vec::with_capacity(cells * spec.channels);
        for (cell, who) in frame_owner.iter().enumerate() {
            match who {
                Some((k, base)) => {
                    let sig = &object_sigs[*k];
                    let jit = &object_jitter[*k][*base];
                    for ch in 0..spec.channels {
                        frame.push(sig[ch] + jit[ch]);
                    }
                }
                None => {
                    let jit = &background_jitter[cell];
                    for ch in 0..spec.channels {
                        frame.push(background_sig[ch] + jit[ch]);
                    }
                }
            }
        }
        clean_frames.push(frame);
    }
    let clean_features =
        FeatureSequence::new(spec.grid_h, spec.grid_w, spec.channels, clean_frames)?;

    // Per-step noisy copies; σ = 0 steps share the clean features exactly.
    let mut noise_rng = seeded_stream(spec.seed, streams::NOISE);
    let mut features_per_step = Vec::with_capacity(spec.steps);
    for step in 0..spec.steps {
        let sigma = spec.noise_at(step);
        if sigma == 0.0 {
            features_per_step.push(clean_features.clone());
            continue;
        }
        let mut frames = Vec::with_capacity(spec.frames);
        for l in 0..spec.frames {
            let clean = clean_features.frame(l);
            let mut noisy = Vec::with_capacity(clean.len());
            for &x in clean {
                let n: f32 = noise_rng.sample(StandardNormal);
                noisy.push(x + sigma * n);
            }
            frames.push(noisy);
        }
        features_per_step.push(FeatureSequence::new(
            spec.grid_h,
            spec.grid_w,
            spec.channels,
            frames,
        )?);
    }

    // Analytic flows between consecutive frames; overlapping claims resolve
    // to the owner recorded above.
    let mut flows = Vec::with_capacity(spec.frames.saturating_sub(1));
    for l in 0..spec.frames.saturating_sub(1) {
        let mut field = FlowField::zeros(spec.grid_h, spec.grid_w);
        for (cell, who) in owner[l].iter().enumerate() {
            if let Some((k, base)) = who {
                let (dx, dy) = cell_flow(&spec.objects[*k], *base, l);
                field.set(cell / spec.grid_w, cell % spec.grid_w, dx, dy);
            }
        }
        flows.push(field);
    }

    // One motion-text span per object: token 2k, with odd tokens and the
    // final token left as non-motion text.
    let n_text = 2 * k_objects + 1;
    let spans = (0..k_objects).map(|k| Span::new(2 * k, 2 * k + 1)).collect();
    let layout = build_layout(
        n_text,
        2,
        k_objects,
        spec.frames,
        spec.grid_h,
        spec.grid_w,
        spans,
    )?;

    let motion_labels = spec.objects.iter().map(|o| o.motion.label()).collect();
    Ok(Scenario {
        spec: spec.clone(),
        layout,
        clean_features,
        features_per_step,
        gt_masks,
        flows,
        motion_labels,
    })
}

/// Standard-normal Q/K/V fixture for attention experiments.
pub fn random_projected_tokens(
    seed: u64,
    n_heads: usize,
    total_tokens: usize,
    head_dim: usize,
) -> Result<ProjectedTokens> {
    let mut rng = seeded_stream(seed, streams::QKV);
    let n = n_heads * total_tokens * head_dim;
    let mut draw = || -> Vec<f32> {
        (0..n).map(|_| rng.sample::<f32, _>(StandardNormal)).collect()
    };
    let q = draw();
    let k = draw();
    let v = draw();
    ProjectedTokens::new(n_heads, total_tokens, head_dim, q, k, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_spec() -> ScenarioSpec {
        ScenarioSpec {
            seed: 5,
            frames: 3,
            grid_h: 4,
            grid_w: 4,
            channels: 4,
            steps: 2,
            convergence_step: 1,
            noise_sigma: 0.0,
            objects: vec![ObjectSpec {
                blob: Blob {
                    row: 0,
                    col: 0,
                    height: 1,
                    width: 1,
                },
                motion: MotionSpec::Translate { dx: 1, dy: 0 },
            }],
            disjoint: true,
        }
    }

    #[test]
    fn translate_blob_path_and_flow() {
        let scenario = generate_scenario(&tiny_spec()).unwrap();
        for (l, expect_col) in [(0usize, 0usize), (1, 1), (2, 2)] {
            let grid = &scenario.gt_masks[0].masks[l].grid;
            assert_eq!(grid.count_ones(), 1);
            assert!(grid.get(0, expect_col), "frame {l}");
        }
        assert_eq!(scenario.flows.len(), 2);
        assert_eq!(scenario.flows[0].get(0, 0), (1.0, 0.0));
        assert_eq!(scenario.flows[0].get(0, 1), (0.0, 0.0));
        assert_eq!(scenario.flows[1].get(0, 1), (1.0, 0.0));
    }

    #[test]
    fn static_blob_is_constant_with_zero_flow() {
        let mut spec = tiny_spec();
        spec.objects[0].motion = MotionSpec::Static;
        let scenario = generate_scenario(&spec).unwrap();
        for l in 0..3 {
            assert!(scenario.gt_masks[0].masks[l].grid.get(0, 0));
        }
        for flow in &scenario.flows {
            for r in 0..4 {
                for c in 0..4 {
                    assert_eq!(flow.get(r, c), (0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn leaving_the_grid_is_an_error() {
        let mut spec = tiny_spec();
        spec.frames = 6;
        let err = generate_scenario(&spec).unwrap_err();
        assert!(matches!(err, Error::Scenario(_)), "{err}");
    }

    #[test]
    fn overlapping_initial_blobs_rejected_when_disjoint() {
        let mut spec = tiny_spec();
        spec.channels = 8;
        spec.objects.push(ObjectSpec {
            blob: Blob {
                row: 0,
                col: 0,
                height: 2,
                width: 2,
            },
            motion: MotionSpec::Static,
        });
        spec.frames = 2;
        assert!(matches!(
            generate_scenario(&spec),
            Err(Error::Scenario(_))
        ));
    }

    #[test]
    fn object_features_travel_with_the_object() {
        let scenario = generate_scenario(&tiny_spec()).unwrap();
        let f0 = scenario.clean_features.frame(0);
        let f1 = scenario.clean_features.frame(1);
        let ch = scenario.spec.channels;
        // Object cell (0,0) at frame 0 equals object cell (0,1) at frame 1.
        assert_eq!(&f0[0..ch], &f1[ch..2 * ch]);
        // Background cell (2,2) keeps its own feature in both frames.
        let cell = 2 * 4 + 2;
        assert_eq!(&f0[cell * ch..(cell + 1) * ch], &f1[cell * ch..(cell + 1) * ch]);
    }

    #[test]
    fn noise_schedule_decays_linearly_to_zero() {
        let mut spec = tiny_spec();
        spec.channels = 5;
        spec.steps = 5;
        spec.convergence_step = 3;
        spec.noise_sigma = 4.0;
        assert_eq!(spec.noise_at(0), 4.0);
        assert_eq!(spec.noise_at(1), 2.0);
        assert_eq!(spec.noise_at(2), 0.0);
        assert_eq!(spec.noise_at(3), 0.0);
        let scenario = generate_scenario(&spec).unwrap();
        assert_ne!(
            scenario.features_per_step[0].frame(0),
            scenario.clean_features.frame(0)
        );
        for step in 2..5 {
            assert_eq!(
                scenario.features_per_step[step], scenario.clean_features,
                "step {step}"
            );
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_scenario(&tiny_spec()).unwrap();
        let b = generate_scenario(&tiny_spec()).unwrap();
        assert_eq!(a.clean_features, b.clean_features);
        assert_eq!(a.features_per_step, b.features_per_step);
        assert_eq!(a.gt_masks, b.gt_masks);
    }

    #[test]
    fn default_objects_fit_the_acceptance_geometry() {
        let spec =
            ScenarioSpec::with_default_objects(11, 2, 8, 16, 16, 10, 3, 4.0, 8).unwrap();
        assert_eq!(spec.objects.len(), 2);
        let scenario = generate_scenario(&spec).unwrap();
        assert_eq!(scenario.gt_masks.len(), 2);
        assert_eq!(scenario.flows.len(), 7);
        assert_eq!(scenario.layout.n_objects(), 2);
    }

    #[test]
    fn rotation_stays_on_grid_and_flows_are_tangential() {
        let spec = ScenarioSpec {
            seed: 9,
            frames: 4,
            grid_h: 9,
            grid_w: 9,
            channels: 4,
            steps: 1,
            convergence_step: 1,
            noise_sigma: 0.0,
            objects: vec![ObjectSpec {
                blob: Blob {
                    row: 3,
                    col: 3,
                    height: 3,
                    width: 3,
                },
                motion: MotionSpec::Rotate {
                    degrees_per_frame: 30.0,
                },
            }],
            disjoint: true,
        };
        let scenario = generate_scenario(&spec).unwrap();
        // Center cell never moves; its flow is exactly zero.
        assert_eq!(scenario.flows[0].get(4, 4), (0.0, 0.0));
        // A corner cell moves; its flow is nonzero.
        let (dx, dy) = scenario.flows[0].get(3, 3);
        assert!(dx != 0.0 || dy != 0.0);
        // All masks have the full cell count preserved or reduced by
        // rounding collisions, never grown.
        for mask in &scenario.gt_masks[0].masks {
            assert!(mask.grid.count_ones() <= 9);
            assert!(mask.grid.count_ones() >= 1);
        }
    }
}
