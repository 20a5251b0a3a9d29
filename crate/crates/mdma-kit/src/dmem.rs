//! Training-stage object mask extraction from attention.
//!
//! Uses the model's own text→video attention as a free segmenter: score each
//! video token by its mean scaled dot product against the selected text
//! tokens (averaged over those tokens and over heads), then keep the tokens
//! scoring strictly above the mean of the score map. The binarized map,
//! reshaped per frame, is the object's mask.
//!
//! Averaging runs over heads in ascending order and over the selected text
//! tokens in the order given; the mean threshold shares the crate-wide rule
//! that a constant score map binarizes to all-zero.

use crate::attention::ProjectedTokens;
use crate::error::{Error, Result};
use crate::layout::{SpatialMask, TokenLayout};
use crate::tensor::{dot, mean_threshold_bits, BinaryMatrix};

/// The text tokens standing in for one object's query representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextQuerySelection {
    pub object: usize,
    pub text_token_indices: Vec<usize>,
}

impl TextQuerySelection {
    pub fn new(object: usize, text_token_indices: Vec<usize>) -> Self {
        Self {
            object,
            text_token_indices,
        }
    }
}

/// Per-video-token attention scores against the selection, then a strict
/// above-mean threshold, reshaped to one mask per frame.
pub fn extract_training_mask(
    tokens: &ProjectedTokens,
    selection: &TextQuerySelection,
    layout: &TokenLayout,
) -> Result<Vec<SpatialMask>> {
    if tokens.total_tokens() != layout.total() {
        return Err(Error::DimensionMismatch {
            what: "token count vs layout",
            expected: format!("{}", layout.total()),
            got: format!("{}", tokens.total_tokens()),
        });
    }
    if selection.text_token_indices.is_empty() {
        return Err(Error::EmptySelection);
    }
    if selection.object >= layout.n_objects() {
        return Err(Error::IndexOutOfRange {
            what: "selection object",
            got: selection.object,
            limit: layout.n_objects(),
        });
    }
    for &p in &selection.text_token_indices {
        if p >= layout.n_text() {
            return Err(Error::IndexOutOfRange {
                what: "selected text token",
                got: p,
                limit: layout.n_text(),
            });
        }
    }

    let scale = 1.0 / (tokens.head_dim() as f32).sqrt();
    let offset = layout.video_offset();
    let n_video = layout.n_video();
    let count = (tokens.n_heads() * selection.text_token_indices.len()) as f32;
    let mut scores = Vec::with_capacity(n_video);
    for q in 0..n_video {
        let mut acc = 0.0f32;
        for head in 0..tokens.n_heads() {
            for &p in &selection.text_token_indices {
                acc += dot(tokens.q_row(head, p), tokens.k_row(head, offset + q)) * scale;
            }
        }
        scores.push(acc / count);
    }

    let bits = mean_threshold_bits(&scores);
    let cells = layout.cells_per_frame();
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
    Ok(masks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{build_layout, Span};

    fn layout_2x2(frames: usize) -> TokenLayout {
        build_layout(4, 1, 1, frames, 2, 2, vec![Span::new(0, 2)]).unwrap()
    }

    /// One head, all-zero K except the requested video token.
    fn tokens_with_hot_video(layout: &TokenLayout, hot: usize) -> ProjectedTokens {
        let total = layout.total();
        let d = 2;
        let mut q = vec![0.0f32; total * d];
        q[0] = 10.0; // selected text token 0
        let mut k = vec![0.0f32; total * d];
        k[(layout.video_offset() + hot) * d] = 1.0;
        let v = vec![0.0f32; total * d];
        ProjectedTokens::new(1, total, d, q, k, v).unwrap()
    }

    #[test]
    fn constant_key_rows_give_all_zero_masks() {
        let layout = layout_2x2(2);
        let total = layout.total();
        let d = 2;
        let q: Vec<f32> = (0..total * d).map(|i| (i % 5) as f32 - 2.0).collect();
        let k = vec![0.75f32; total * d];
        let v = vec![0.0f32; total * d];
        let tokens = ProjectedTokens::new(1, total, d, q, k, v).unwrap();
        let selection = TextQuerySelection::new(0, vec![0, 1]);
        let masks = extract_training_mask(&tokens, &selection, &layout).unwrap();
        assert_eq!(masks.len(), 2);
        for mask in masks {
            assert_eq!(mask.grid.count_ones(), 0);
        }
    }

    #[test]
    fn single_hot_video_token_gives_one_hot_mask() {
        let layout = layout_2x2(1);
        let tokens = tokens_with_hot_video(&layout, 3);
        let selection = TextQuerySelection::new(0, vec![0]);
        let masks = extract_training_mask(&tokens, &selection, &layout).unwrap();
        assert_eq!(masks[0].grid.count_ones(), 1);
        assert!(masks[0].grid.get(1, 1));
    }

    #[test]
    fn positive_scaling_of_queries_preserves_the_mask() {
        let layout = layout_2x2(2);
        let total = layout.total();
        let d = 3;
        let q: Vec<f32> = (0..total * d).map(|i| ((i * 7 % 13) as f32) - 6.0).collect();
        let k: Vec<f32> = (0..total * d).map(|i| ((i * 5 % 11) as f32) - 5.0).collect();
        let v = vec![0.0f32; total * d];
        let tokens = ProjectedTokens::new(1, total, d, q.clone(), k.clone(), v.clone()).unwrap();
        let selection = TextQuerySelection::new(0, vec![0, 1]);
        let base = extract_training_mask(&tokens, &selection, &layout).unwrap();
        for factor in [0.5f32, 2.0, 1024.0] {
            let scaled_q: Vec<f32> = q.iter().map(|x| x * factor).collect();
            let scaled =
                ProjectedTokens::new(1, total, d, scaled_q, k.clone(), v.clone()).unwrap();
            let masks = extract_training_mask(&scaled, &selection, &layout).unwrap();
            assert_eq!(masks, base, "factor {factor}");
        }
    }

    #[test]
    fn invalid_selections_rejected() {
        let layout = layout_2x2(1);
        let tokens = tokens_with_hot_video(&layout, 0);
        assert!(matches!(
            extract_training_mask(&tokens, &TextQuerySelection::new(0, vec![]), &layout),
            Err(Error::EmptySelection)
        ));
        assert!(matches!(
            extract_training_mask(&tokens, &TextQuerySelection::new(0, vec![4]), &layout),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            extract_training_mask(&tokens, &TextQuerySelection::new(1, vec![0]), &layout),
            Err(Error::IndexOutOfRange { .. })
        ));
    }
}
