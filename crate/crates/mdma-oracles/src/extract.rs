//! Straight-line reference for text-attention mask extraction.

use mdma_kit::attention::ProjectedTokens;
use mdma_kit::layout::{SpatialMask, TokenLayout};
use mdma_kit::tensor::BinaryMatrix;

/// Scores every video token by the mean scaled Q·K against the selected text
/// tokens (heads ascending, selection in the order given), thresholds the
/// score map strictly above its mean — a constant map gives all-zero — and
/// chops the result into per-frame grids.
pub fn naive_extract(
    tokens: &ProjectedTokens,
    selection: &[usize],
    layout: &TokenLayout,
) -> Vec<SpatialMask> {
    let heads = tokens.n_heads();
    let dim = tokens.head_dim();
    let scale = 1.0 / (dim as f32).sqrt();
    let cells = layout.grid_h() * layout.grid_w();
    let video_offset = layout.n_text() + layout.n_objects() * layout.n_motion_per_object();
    let n_video = layout.frames() * cells;

    let mut scores = vec![0.0f32; n_video];
    for (v, score) in scores.iter_mut().enumerate() {
        let mut acc = 0.0f32;
        for head in 0..heads {
            for &p in selection {
                let qrow = tokens.q_row(head, p);
                let krow = tokens.k_row(head, video_offset + v);
                let mut dot = 0.0f32;
                for c in 0..dim {
                    dot += qrow[c] * krow[c];
                }
                acc += dot * scale;
            }
        }
        *score = acc / (heads * selection.len()) as f32;
    }

    // Strict above-mean threshold; a constant map binarizes to all-zero.
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
    let bits: Vec<bool> = if min == max {
        vec![false; n_video]
    } else {
        let mut total = 0.0f32;
        for &s in &scores {
            total += s;
        }
        let mean = total / n_video as f32;
        scores.iter().map(|&s| s > mean).collect()
    };

    let mut masks = Vec::with_capacity(layout.frames());
    for l in 0..layout.frames() {
        let mut grid = BinaryMatrix::zeros(layout.grid_h(), layout.grid_w());
        for i in 0..cells {
            if bits[l * cells + i] {
                grid.set(i / layout.grid_w(), i % layout.grid_w(), true);
            }
        }
        masks.push(SpatialMask::new(l, grid));
    }
    masks
}
