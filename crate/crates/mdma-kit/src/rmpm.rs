//! Recursive mask propagation across frames.
//!
//! Given per-frame latent features and a first-frame object mask, each later
//! frame's mask is inferred by correlating that frame's features against a
//! set of *anchor* frames whose masks are already known:
//!
//! 1. The first frame's (feature, mask) pair is pinned and participates in
//!    every correlation.
//! 2. A sliding window holds up to `W` of the most recent (feature, mask)
//!    pairs. Before computing frame l, the oldest entry is evicted if the
//!    window is full; after frame l's mask is computed, (F_l, M_l) is
//!    appended. At steady state a correlation therefore sees the pinned
//!    first frame plus the W−1 most recent frames.
//! 3. The correlation is C = Norm(F_l) · Norm(F_anc ⊙ M_anc)ᵀ, where Norm is
//!    per-cell (row) L2 normalization with zero rows mapped to zero rows, and
//!    the anchor features are masked before normalization.
//! 4. The propagated score S = M_anc · Cᵀ sums, for each cell of frame l,
//!    its correlation with every masked anchor cell. The new mask is
//!    S > mean(S), with a constant score map defined to yield the empty mask
//!    (the strict threshold has nothing above the mean; making the guard
//!    explicit keeps float rounding from deciding the degenerate case).
//!
//! The dynamic variant wraps this per denoising step: once the step-to-step
//! mask difference falls below a threshold α the tracks freeze and later
//! steps reuse them without recomputing.
//!
//! All reductions run in ascending index order in f32; masks and thresholds
//! are bit-reproducible.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::layout::SpatialMask;
use crate::tensor::{dot, BinaryMatrix, Matrix, Tensor};

/// Per-frame latent feature maps: L frames, each grid_h×grid_w cells by
/// `channels` values, stored cell-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSequence {
    grid_h: usize,
    grid_w: usize,
    channels: usize,
    frames: Vec<Vec<f32>>,
}

impl FeatureSequence {
    pub fn new(grid_h: usize, grid_w: usize, channels: usize, frames: Vec<Vec<f32>>) -> Result<Self> {
        for (what, got) in [
            ("grid_h", grid_h),
            ("grid_w", grid_w),
            ("channels", channels),
        ] {
            if got < 1 {
                return Err(Error::InvalidCount { what, min: 1, got });
            }
        }
        if frames.is_empty() {
            return Err(Error::ZeroFrames);
        }
        let expect = grid_h * grid_w * channels;
        for frame in &frames {
            if frame.len() != expect {
                return Err(Error::DimensionMismatch {
                    what: "feature frame",
                    expected: format!("{expect} values"),
                    got: format!("{} values", frame.len()),
                });
            }
            if frame.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("features"));
            }
        }
        Ok(Self {
            grid_h,
            grid_w,
            channels,
            frames,
        })
    }

    /// Parses the on-disk packing: shape [frames, grid_h, grid_w, channels].
    pub fn from_tensor(t: &Tensor) -> Result<Self> {
        let dims = t.dims();
        if dims.len() != 4 {
            return Err(Error::DimensionMismatch {
                what: "feature tensor shape",
                expected: "[frames, grid_h, grid_w, channels]".into(),
                got: format!("{dims:?}"),
            });
        }
        let (l, gh, gw, ch) = (dims[0], dims[1], dims[2], dims[3]);
        let per = gh * gw * ch;
        let frames = (0..l)
            .map(|i| t.data()[i * per..(i + 1) * per].to_vec())
            .collect();
        Self::new(gh, gw, ch, frames)
    }

    pub fn to_tensor(&self) -> Result<Tensor> {
        let mut data = Vec::with_capacity(self.frames.len() * self.grid_h * self.grid_w * self.channels);
        for frame in &self.frames {
            data.extend_from_slice(frame);
        }
        Tensor::new(
            vec![self.frames.len(), self.grid_h, self.grid_w, self.channels],
            data,
        )
    }

    pub fn frames(&self) -> usize {
        self.frames.len()
    }

    pub fn grid_h(&self) -> usize {
        self.grid_h
    }

    pub fn grid_w(&self) -> usize {
        self.grid_w
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn cells(&self) -> usize {
        self.grid_h * self.grid_w
    }

    pub fn frame(&self, l: usize) -> &[f32] {
        &self.frames[l]
    }

    /// Copy with one frame's features multiplied by a scalar (test support
    /// for the normalization-invariance property).
    pub fn with_scaled_frame(&self, l: usize, factor: f32) -> Result<Self> {
        if l >= self.frames.len() {
            return Err(Error::IndexOutOfRange {
                what: "frame",
                got: l,
                limit: self.frames.len(),
            });
        }
        let mut frames = self.frames.clone();
        for x in &mut frames[l] {
            *x *= factor;
        }
        Self::new(self.grid_h, self.grid_w, self.channels, frames)
    }
}

/// The correlation anchors: the pinned first frame plus up to `capacity`
/// recent (feature, mask) pairs in insertion order.
#[derive(Debug, Clone)]
pub struct AnchorWindow {
    capacity: usize,
    grid_h: usize,
    grid_w: usize,
    channels: usize,
    pinned: (Vec<f32>, BinaryMatrix),
    entries: VecDeque<(Vec<f32>, BinaryMatrix)>,
}

impl AnchorWindow {
    pub fn new(
        capacity: usize,
        grid_h: usize,
        grid_w: usize,
        channels: usize,
        first_feature: &[f32],
        first_mask: &BinaryMatrix,
    ) -> Result<Self> {
        if capacity < 1 {
            return Err(Error::InvalidCount {
                what: "window capacity",
                min: 1,
                got: capacity,
            });
        }
        let window = Self {
            capacity,
            grid_h,
            grid_w,
            channels,
            pinned: (first_feature.to_vec(), first_mask.clone()),
            entries: VecDeque::new(),
        };
        window.check_pair(first_feature, first_mask)?;
        Ok(window)
    }

    fn check_pair(&self, feature: &[f32], mask: &BinaryMatrix) -> Result<()> {
        if feature.len() != self.grid_h * self.grid_w * self.channels {
            return Err(Error::DimensionMismatch {
                what: "anchor feature",
                expected: format!("{} values", self.grid_h * self.grid_w * self.channels),
                got: format!("{} values", feature.len()),
            });
        }
        if mask.rows() != self.grid_h || mask.cols() != self.grid_w {
            return Err(Error::DimensionMismatch {
                what: "anchor mask",
                expected: format!("{}x{}", self.grid_h, self.grid_w),
                got: format!("{}x{}", mask.rows(), mask.cols()),
            });
        }
        Ok(())
    }

    /// Evicts the oldest windowed entry if the window is at capacity. The
    /// pinned first frame is never evicted.
    pub fn make_room(&mut self) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
    }

    pub fn append(&mut self, feature: Vec<f32>, mask: BinaryMatrix) -> Result<()> {
        self.check_pair(&feature, &mask)?;
        if self.entries.len() >= self.capacity {
            return Err(Error::InvalidConfig(
                "anchor window append past capacity".into(),
            ));
        }
        self.entries.push_back((feature, mask));
        Ok(())
    }

    /// Anchors in correlation order: pinned first frame, then windowed
    /// entries oldest to newest.
    pub fn anchors(&self) -> impl Iterator<Item = (&[f32], &BinaryMatrix)> {
        std::iter::once((&self.pinned.0[..], &self.pinned.1))
            .chain(self.entries.iter().map(|(f, m)| (&f[..], m)))
    }

    pub fn anchor_count(&self) -> usize {
        1 + self.entries.len()
    }

    pub fn cells(&self) -> usize {
        self.grid_h * self.grid_w
    }

    pub fn channels(&self) -> usize {
        self.channels
    }
}

/// One object's masks across all frames.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskTrack {
    pub object: usize,
    pub masks: Vec<SpatialMask>,
}

/// Per-row (per-cell) L2 normalization; rows with zero norm stay zero rather
/// than dividing by zero.
fn normalize_rows(rows: usize, channels: usize, data: &[f32]) -> Vec<f32> {
    let mut out = vec![0.0f32; data.len()];
    for i in 0..rows {
        let row = &data[i * channels..(i + 1) * channels];
        let mut sq = 0.0f32;
        for &x in row {
            sq += x * x;
        }
        let norm = sq.sqrt();
        if norm > 0.0 {
            for c in 0..channels {
                out[i * channels + c] = row[c] / norm;
            }
        }
    }
    out
}

/// Correlation between a frame and the window's anchors:
/// C = Norm(F_l) · Norm(F_anc ⊙ M_anc)ᵀ, shape (cells × anchor_count·cells).
pub fn correlation(frame: &[f32], window: &AnchorWindow) -> Result<Matrix> {
    let cells = window.cells();
    let channels = window.channels();
    if frame.len() != cells * channels {
        return Err(Error::DimensionMismatch {
            what: "frame feature",
            expected: format!("{} values", cells * channels),
            got: format!("{} values", frame.len()),
        });
    }
    let normed = normalize_rows(cells, channels, frame);

    // Masked, normalized anchor rows, concatenated pinned-then-window.
    let anchor_cells = window.anchor_count() * cells;
    let mut anchors = Vec::with_capacity(anchor_cells * channels);
    for (feature, mask) in window.anchors() {
        let mut masked = vec![0.0f32; cells * channels];
        for i in 0..cells {
            let keep = mask.data()[i] != 0;
            if keep {
                masked[i * channels..(i + 1) * channels]
                    .copy_from_slice(&feature[i * channels..(i + 1) * channels]);
            }
        }
        anchors.extend(normalize_rows(cells, channels, &masked));
    }

    let mut c = Matrix::zeros(cells, anchor_cells);
    for i in 0..cells {
        let fi = &normed[i * channels..(i + 1) * channels];
        for j in 0..anchor_cells {
            let aj = &anchors[j * channels..(j + 1) * channels];
            c.set(i, j, dot(fi, aj));
        }
    }
    Ok(c)
}

/// Thresholded propagation score: S = M_anc · Cᵀ, then S > mean(S).
/// A constant score map yields the all-zero mask.
pub fn propagate_step(c: &Matrix, window: &AnchorWindow, frame: usize) -> Result<SpatialMask> {
    let cells = window.cells();
    let anchor_cells = window.anchor_count() * cells;
    if c.rows() != cells || c.cols() != anchor_cells {
        return Err(Error::DimensionMismatch {
            what: "correlation shape",
            expected: format!("{cells}x{anchor_cells}"),
            got: format!("{}x{}", c.rows(), c.cols()),
        });
    }
    let mut anchor_mask = Vec::with_capacity(anchor_cells);
    for (_, mask) in window.anchors() {
        for &m in mask.data() {
            anchor_mask.push(m as f32);
        }
    }
    let mut s = vec![0.0f32; cells];
    for (i, si) in s.iter_mut().enumerate() {
        *si = dot(&anchor_mask, c.row(i));
    }
    Ok(SpatialMask::new(
        frame,
        threshold_above_mean(&s, window.grid_h, window.grid_w),
    ))
}

/// Binarizes a flat score map at its mean (strict ">", constant map → all
/// zeros) into a grid.
fn threshold_above_mean(scores: &[f32], grid_h: usize, grid_w: usize) -> BinaryMatrix {
    let bits = crate::tensor::mean_threshold_bits(scores);
    let mut mask = BinaryMatrix::zeros(grid_h, grid_w);
    for (i, &on) in bits.iter().enumerate() {
        if on {
            mask.set(i / grid_w, i % grid_w, true);
        }
    }
    mask
}

/// Propagates one object's first-frame mask through every frame. The
/// returned track is labeled object 0; callers tracking several objects
/// relabel it.
pub fn propagate_object(
    features: &FeatureSequence,
    first_mask: &SpatialMask,
    window_capacity: usize,
) -> Result<MaskTrack> {
    if first_mask.frame != 0 {
        return Err(Error::DimensionMismatch {
            what: "first mask frame index",
            expected: "0".into(),
            got: format!("{}", first_mask.frame),
        });
    }
    if first_mask.grid.rows() != features.grid_h() || first_mask.grid.cols() != features.grid_w() {
        return Err(Error::DimensionMismatch {
            what: "first mask grid",
            expected: format!("{}x{}", features.grid_h(), features.grid_w()),
            got: format!("{}x{}", first_mask.grid.rows(), first_mask.grid.cols()),
        });
    }
    let mut window = AnchorWindow::new(
        window_capacity,
        features.grid_h(),
        features.grid_w(),
        features.channels(),
        features.frame(0),
        &first_mask.grid,
    )?;
    let mut masks = Vec::with_capacity(features.frames());
    masks.push(first_mask.clone());
    for l in 1..features.frames() {
        window.make_room();
        let c = correlation(features.frame(l), &window)?;
        let mask = propagate_step(&c, &window, l)?;
        window.append(features.frame(l).to_vec(), mask.grid.clone())?;
        masks.push(mask);
    }
    Ok(MaskTrack { object: 0, masks })
}

/// Propagates every object independently. `jobs` > 1 splits objects across
/// that many threads; the result is identical to the sequential run.
pub fn propagate_all(
    features: &FeatureSequence,
    first_masks: &[SpatialMask],
    window_capacity: usize,
    jobs: usize,
) -> Result<Vec<MaskTrack>> {
    let run = |k: usize| -> Result<MaskTrack> {
        let mut track = propagate_object(features, &first_masks[k], window_capacity)?;
        track.object = k;
        Ok(track)
    };
    let n = first_masks.len();
    if jobs <= 1 || n <= 1 {
        return (0..n).map(run).collect();
    }
    let workers = jobs.min(n);
    let results: Vec<Result<MaskTrack>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let run = &run;
                scope.spawn(move || -> Vec<(usize, Result<MaskTrack>)> {
                    (w..n).step_by(workers).map(|k| (k, run(k))).collect()
                })
            })
            .collect();
        let mut slots: Vec<Option<Result<MaskTrack>>> = (0..n).map(|_| None).collect();
        for handle in handles {
            for (k, result) in handle.join().expect("propagation worker panicked") {
                slots[k] = Some(result);
            }
        }
        slots.into_iter().map(|s| s.expect("object not computed")).collect()
    });
    results.into_iter().collect()
}

/// Mean Hamming fraction between two sets of tracks: the average, over all
/// objects and frames, of the fraction of grid cells that differ.
pub fn mask_difference(a: &[MaskTrack], b: &[MaskTrack]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::DimensionMismatch {
            what: "track sets",
            expected: format!("{} non-empty", a.len()),
            got: format!("{}", b.len()),
        });
    }
    let mut differing = 0u64;
    let mut cells_total = 0u64;
    for (ta, tb) in a.iter().zip(b) {
        if ta.masks.len() != tb.masks.len() {
            return Err(Error::DimensionMismatch {
                what: "track frames",
                expected: format!("{}", ta.masks.len()),
                got: format!("{}", tb.masks.len()),
            });
        }
        for (ma, mb) in ta.masks.iter().zip(&tb.masks) {
            if ma.grid.rows() != mb.grid.rows() || ma.grid.cols() != mb.grid.cols() {
                return Err(Error::DimensionMismatch {
                    what: "track grids",
                    expected: format!("{}x{}", ma.grid.rows(), ma.grid.cols()),
                    got: format!("{}x{}", mb.grid.rows(), mb.grid.cols()),
                });
            }
            for (x, y) in ma.grid.data().iter().zip(mb.grid.data()) {
                if x != y {
                    differing += 1;
                }
                cells_total += 1;
            }
        }
    }
    Ok(differing as f64 / cells_total as f64)
}

/// Early-freeze state for per-denoising-step propagation.
#[derive(Debug, Clone)]
pub struct DynamicState {
    alpha: f64,
    frozen: bool,
    frozen_step: Option<usize>,
    last_tracks: Option<Vec<MaskTrack>>,
    propagation_calls: usize,
}

impl DynamicState {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be in [0, 1], got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            frozen: false,
            frozen_step: None,
            last_tracks: None,
            propagation_calls: 0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn frozen(&self) -> bool {
        self.frozen
    }

    pub fn frozen_step(&self) -> Option<usize> {
        self.frozen_step
    }

    pub fn propagation_calls(&self) -> usize {
        self.propagation_calls
    }

    pub fn last_tracks(&self) -> Option<&[MaskTrack]> {
        self.last_tracks.as_deref()
    }
}

/// One denoising step of the dynamic variant.
///
/// If frozen, the stored tracks are returned and nothing is recomputed.
/// Otherwise a full propagation runs, the step-to-step mask difference is
/// compared against α (skipped at the first step, which has no predecessor),
/// and the state freezes — permanently — once the difference drops below α.
pub fn dynamic_update(
    state: &mut DynamicState,
    step: usize,
    features: &FeatureSequence,
    first_masks: &[SpatialMask],
    window_capacity: usize,
    jobs: usize,
) -> Result<Vec<MaskTrack>> {
    if state.frozen {
        return Ok(state
            .last_tracks
            .clone()
            .expect("frozen state always holds tracks"));
    }
    let tracks = propagate_all(features, first_masks, window_capacity, jobs)?;
    state.propagation_calls += 1;
    if let Some(prev) = &state.last_tracks {
        if mask_difference(prev, &tracks)? < state.alpha {
            state.frozen = true;
            state.frozen_step = Some(step);
        }
    }
    state.last_tracks = Some(tracks.clone());
    Ok(tracks)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Features where every cell has a distinct one-hot signature, identical
    /// in every frame.
    fn orthonormal_static(frames: usize, grid_h: usize, grid_w: usize) -> FeatureSequence {
        let cells = grid_h * grid_w;
        let mut frame = vec![0.0f32; cells * cells];
        for i in 0..cells {
            frame[i * cells + i] = 1.0;
        }
        FeatureSequence::new(grid_h, grid_w, cells, vec![frame; frames]).unwrap()
    }

    fn blob_mask(frame: usize, grid_h: usize, grid_w: usize, cells_on: &[usize]) -> SpatialMask {
        let mut grid = BinaryMatrix::zeros(grid_h, grid_w);
        for &i in cells_on {
            grid.set(i / grid_w, i % grid_w, true);
        }
        SpatialMask::new(frame, grid)
    }

    #[test]
    fn correlation_of_identical_unit_features_is_identity() {
        let features = orthonormal_static(2, 2, 2);
        let window = AnchorWindow::new(
            2,
            2,
            2,
            4,
            features.frame(0),
            &BinaryMatrix::ones(2, 2),
        )
        .unwrap();
        let c = correlation(features.frame(1), &window).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(c.get(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn zero_anchor_mask_zeroes_the_correlation() {
        let features = orthonormal_static(2, 2, 2);
        let window = AnchorWindow::new(
            2,
            2,
            2,
            4,
            features.frame(0),
            &BinaryMatrix::zeros(2, 2),
        )
        .unwrap();
        let c = correlation(features.frame(1), &window).unwrap();
        assert!(c.data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn constant_scores_give_empty_mask() {
        // All cells share one signature, so every correlation row is equal
        // and the strict mean threshold fires nowhere.
        let frame = vec![1.0f32; 4 * 3];
        let features = FeatureSequence::new(2, 2, 3, vec![frame.clone(), frame]).unwrap();
        let track = propagate_object(&features, &SpatialMask::full(0, 2, 2), 1).unwrap();
        assert_eq!(track.masks[1].grid.count_ones(), 0);
    }

    #[test]
    fn one_hot_anchor_propagates_to_the_matching_cell() {
        let features = orthonormal_static(2, 2, 2);
        let first = blob_mask(0, 2, 2, &[2]);
        let track = propagate_object(&features, &first, 1).unwrap();
        assert_eq!(track.masks[1].grid, first.grid);
    }

    #[test]
    fn single_frame_returns_only_the_first_mask() {
        let features = orthonormal_static(1, 2, 2);
        let first = blob_mask(0, 2, 2, &[0, 1]);
        let track = propagate_object(&features, &first, 2).unwrap();
        assert_eq!(track.masks.len(), 1);
        assert_eq!(track.masks[0], first);
    }

    #[test]
    fn static_scene_track_is_constant() {
        let features = orthonormal_static(5, 3, 3);
        let first = blob_mask(0, 3, 3, &[0, 1, 4]);
        let track = propagate_object(&features, &first, 2).unwrap();
        for l in 1..5 {
            assert_eq!(track.masks[l].grid, first.grid, "frame {l}");
            assert_eq!(track.masks[l].frame, l);
        }
    }

    #[test]
    fn window_never_exceeds_capacity_and_pins_first() {
        let features = orthonormal_static(6, 2, 2);
        let mut window = AnchorWindow::new(
            2,
            2,
            2,
            4,
            features.frame(0),
            &BinaryMatrix::ones(2, 2),
        )
        .unwrap();
        for l in 1..6 {
            window.make_room();
            assert!(window.anchor_count() <= 3);
            window
                .append(features.frame(l).to_vec(), BinaryMatrix::ones(2, 2))
                .unwrap();
        }
        assert_eq!(window.anchor_count(), 3); // pinned + 2
    }

    #[test]
    fn parallel_propagation_matches_sequential() {
        let features = orthonormal_static(4, 3, 3);
        let firsts: Vec<SpatialMask> = vec![
            blob_mask(0, 3, 3, &[0, 1]),
            blob_mask(0, 3, 3, &[4]),
            blob_mask(0, 3, 3, &[7, 8]),
        ];
        let seq = propagate_all(&features, &firsts, 2, 1).unwrap();
        let par = propagate_all(&features, &firsts, 2, 3).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq[2].object, 2);
    }

    #[test]
    fn mask_difference_examples() {
        let track = |cells: Vec<&[usize]>| MaskTrack {
            object: 0,
            masks: cells
                .into_iter()
                .enumerate()
                .map(|(l, on)| blob_mask(l, 2, 2, on))
                .collect(),
        };
        let a = [track(vec![&[0, 1], &[2]])];
        assert_eq!(mask_difference(&a, &a).unwrap(), 0.0);

        let b = [track(vec![&[2, 3], &[0, 1, 3]])];
        assert_eq!(mask_difference(&a, &b).unwrap(), 1.0);

        let c = [track(vec![&[0, 1], &[2, 3]])];
        assert_eq!(mask_difference(&a, &c).unwrap(), 0.125);
    }

    #[test]
    fn dynamic_freezes_on_identical_steps_and_stays_frozen() {
        let features = orthonormal_static(3, 2, 2);
        let first = vec![blob_mask(0, 2, 2, &[1])];
        let mut state = DynamicState::new(0.05).unwrap();
        let t0 = dynamic_update(&mut state, 0, &features, &first, 2, 1).unwrap();
        assert!(!state.frozen());
        let t1 = dynamic_update(&mut state, 1, &features, &first, 2, 1).unwrap();
        assert!(state.frozen());
        assert_eq!(state.propagation_calls(), 2);
        assert_eq!(state.frozen_step(), Some(1));
        assert_eq!(t0, t1);
        let t2 = dynamic_update(&mut state, 2, &features, &first, 2, 1).unwrap();
        assert_eq!(state.propagation_calls(), 2);
        assert_eq!(t1, t2);
    }

    #[test]
    fn alpha_zero_never_freezes() {
        let features = orthonormal_static(3, 2, 2);
        let first = vec![blob_mask(0, 2, 2, &[1])];
        let mut state = DynamicState::new(0.0).unwrap();
        for step in 0..5 {
            dynamic_update(&mut state, step, &features, &first, 2, 1).unwrap();
        }
        assert!(!state.frozen());
        assert_eq!(state.propagation_calls(), 5);
    }

    #[test]
    fn alpha_out_of_range_rejected() {
        assert!(DynamicState::new(-0.1).is_err());
        assert!(DynamicState::new(1.5).is_err());
        assert!(DynamicState::new(0.0).is_ok());
        assert!(DynamicState::new(1.0).is_ok());
    }
}
