//! Straight-line reference for windowed mask propagation.

use mdma_kit::layout::SpatialMask;
use mdma_kit::rmpm::FeatureSequence;
use mdma_kit::tensor::BinaryMatrix;

/// Per-cell L2 normalization written out longhand; rows with zero norm stay
/// zero.
fn normalize(cells: usize, channels: usize, data: &[f32]) -> Vec<f32> {
    let mut out = vec![0.0f32; data.len()];
    for i in 0..cells {
        let mut sq = 0.0f32;
        for c in 0..channels {
            sq += data[i * channels + c] * data[i * channels + c];
        }
        let norm = sq.sqrt();
        if norm > 0.0 {
            for c in 0..channels {
                out[i * channels + c] = data[i * channels + c] / norm;
            }
        }
    }
    out
}

/// Propagates a first-frame mask through all frames, transcribing the
/// definition: the first frame stays pinned as a permanent anchor, a window
/// holds up to `w` recent (feature, mask) pairs and evicts its oldest entry
/// when full before every step, and each step scores cells by summed cosine
/// against the masked anchor cells (pinned first, then window entries oldest
/// to newest) and keeps the cells scoring strictly above the score mean — a
/// constant score map keeps nothing.
pub fn naive_propagate(
    features: &FeatureSequence,
    first_mask: &SpatialMask,
    w: usize,
) -> Vec<SpatialMask> {
    assert!(w >= 1, "window capacity must be at least 1");
    assert_eq!(first_mask.frame, 0, "first mask must be frame 0");
    let grid_h = features.grid_h();
    let grid_w = features.grid_w();
    let channels = features.channels();
    let cells = grid_h * grid_w;

    let pinned: (Vec<f32>, Vec<u8>) = (
        features.frame(0).to_vec(),
        first_mask.grid.data().to_vec(),
    );
    let mut recent: Vec<(Vec<f32>, Vec<u8>)> = Vec::new();
    let mut masks = vec![first_mask.clone()];

    for l in 1..features.frames() {
        if recent.len() == w {
            recent.remove(0);
        }

        // Normalized current frame and masked-then-normalized anchors, in
        // pinned-then-window order.
        let current = normalize(cells, channels, features.frame(l));
        let mut anchors: Vec<(Vec<f32>, Vec<u8>)> = Vec::new();
        for (feature, mask) in std::iter::once(&pinned).chain(recent.iter()) {
            let mut masked = vec![0.0f32; cells * channels];
            for i in 0..cells {
                if mask[i] != 0 {
                    for c in 0..channels {
                        masked[i * channels + c] = feature[i * channels + c];
                    }
                }
            }
            anchors.push((normalize(cells, channels, &masked), mask.clone()));
        }

        // Score each cell: sum of mask-weighted cosines over every anchor
        // cell, anchors in order, cells ascending within each anchor.
        let mut scores = vec![0.0f32; cells];
        for (i, score) in scores.iter_mut().enumerate() {
            let mut acc = 0.0f32;
            for (anchor, mask) in &anchors {
                for j in 0..cells {
                    let mut cos = 0.0f32;
                    for c in 0..channels {
                        cos += current[i * channels + c] * anchor[j * channels + c];
                    }
                    acc += mask[j] as f32 * cos;
                }
            }
            *score = acc;
        }

        // Strict above-mean threshold; constant map keeps nothing.
        let mut min = f32::INFINITY;
        let mut max = f32::NEG_INFINITY;
        for &s in &scores {
            if s < min {
                min = s;
            }
            if s > max {
                max = s;
            }
        }
        let mut grid = BinaryMatrix::zeros(grid_h, grid_w);
        if min != max {
            let mut total = 0.0f32;
            for &s in &scores {
                total += s;
            }
            let mean = total / cells as f32;
            for i in 0..cells {
                if scores[i] > mean {
                    grid.set(i / grid_w, i % grid_w, true);
                }
            }
        }

        recent.push((features.frame(l).to_vec(), grid.data().to_vec()));
        masks.push(SpatialMask::new(l, grid));
    }
    masks
}
