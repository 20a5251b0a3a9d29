//! Entry-by-entry reference for the assembled attention mask.

use mdma_kit::layout::{SpatialMask, TokenLayout};
use mdma_kit::mask::{AssembleOptions, Phase};

/// Which part of the sequence a global index belongs to.
enum Who {
    Text(usize),
    Motion(usize),
    Video { frame: usize, row: usize, col: usize },
}

fn classify(layout: &TokenLayout, idx: usize) -> Who {
    let n_text = layout.n_text();
    let n_motion = layout.n_objects() * layout.n_motion_per_object();
    let cells = layout.grid_h() * layout.grid_w();
    if idx < n_text {
        Who::Text(idx)
    } else if idx < n_text + n_motion {
        Who::Motion((idx - n_text) / layout.n_motion_per_object())
    } else {
        let v = idx - n_text - n_motion;
        Who::Video {
            frame: v / cells,
            row: (v % cells) / layout.grid_w(),
            col: (v % cells) % layout.grid_w(),
        }
    }
}

fn span_object(layout: &TokenLayout, text_idx: usize) -> Option<usize> {
    layout
        .text_motion_spans()
        .iter()
        .position(|s| s.contains(text_idx))
}

/// Decides one (query `p`, key `q`) entry of the assembled mask directly
/// from the block rules.
pub fn naive_mask_entry(
    layout: &TokenLayout,
    object_masks: &[Vec<SpatialMask>],
    phase: Phase,
    options: AssembleOptions,
    p: usize,
    q: usize,
) -> bool {
    let training = matches!(phase, Phase::Training);
    let mask_bit = |k: usize, frame: usize, row: usize, col: usize| -> bool {
        object_masks[k][frame].grid.get(row, col)
    };
    match (classify(layout, p), classify(layout, q)) {
        // Motion tokens never attend to motion tokens, own object included.
        (Who::Motion(_), Who::Motion(_)) => false,
        // Motion <-> video couples exactly through the object's mask.
        (Who::Motion(a), Who::Video { frame, row, col }) => mask_bit(a, frame, row, col),
        (Who::Video { frame, row, col }, Who::Motion(b)) => mask_bit(b, frame, row, col),
        // Motion-text <-> motion couples a span only with its own object.
        (Who::Text(tp), Who::Motion(b)) => span_object(layout, tp) == Some(b),
        (Who::Motion(a), Who::Text(tq)) => span_object(layout, tq) == Some(a),
        // The remaining blocks constrain only at inference.
        (Who::Text(tp), Who::Text(tq)) => {
            if training {
                true
            } else {
                match (span_object(layout, tp), span_object(layout, tq)) {
                    (Some(a), Some(b)) => a == b,
                    _ => true,
                }
            }
        }
        (Who::Text(tp), Who::Video { frame, row, col }) => {
            if training {
                true
            } else {
                match span_object(layout, tp) {
                    Some(k) => mask_bit(k, frame, row, col),
                    None => !options.literal_t2v,
                }
            }
        }
        (Who::Video { frame, row, col }, Who::Text(tq)) => {
            if training {
                true
            } else {
                match span_object(layout, tq) {
                    Some(k) => mask_bit(k, frame, row, col),
                    None => !options.literal_t2v,
                }
            }
        }
        (Who::Video { .. }, Who::Video { .. }) => {
            if training {
                true
            } else if options.literal_identity_v2v {
                p == q
            } else {
                true
            }
        }
    }
}

/// The full dense mask, one entry at a time, row-major.
pub fn naive_dense_mask(
    layout: &TokenLayout,
    object_masks: &[Vec<SpatialMask>],
    phase: Phase,
    options: AssembleOptions,
) -> Vec<u8> {
    let total = layout.total();
    let mut out = Vec::with_capacity(total * total);
    for p in 0..total {
        for q in 0..total {
            out.push(naive_mask_entry(layout, object_masks, phase, options, p, q) as u8);
        }
    }
    out
}
