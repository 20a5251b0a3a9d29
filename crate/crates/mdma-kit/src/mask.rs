//! Block-structured binary attention masks.
//!
//! The full mask over a `[text | motion | video]` sequence is assembled from
//! nine blocks, one per (query segment, key segment) pair. Five blocks carry
//! structure:
//!
//! * `motion→motion` — always the zero matrix: motion tokens of different
//!   objects (and of the same object) never attend to each other.
//! * `motion→video` / `video→motion` — motion token of object k attends
//!   exactly to object k's video tokens (union over objects), and
//!   symmetrically.
//! * `text→motion` / `motion→text` — text tokens inside object k's
//!   motion-text span attend exactly to object k's motion tokens; all other
//!   text rows are zero here, and symmetrically.
//! * `text→video` / `video→text` — motion-text rows are restricted to their
//!   object's video tokens; rows for all other text are unconstrained
//!   (all-ones) by default, since appearance/background text must still see
//!   the video. `literal_t2v` switches those rows to all-zero instead.
//! * `text→text` — all-ones except that motion-text spans of *different*
//!   objects may not attend to each other.
//!
//! `video→video` is all-ones by default (video self-attention unconstrained);
//! `literal_identity_v2v` materializes an identity matrix there instead, for
//! comparison.
//!
//! In training phase only the motion-coupled blocks constrain: m→m, m→v
//! (with v→m) and t→m (with m→t) keep their structure and every other block
//! is overwritten with all-ones. In inference phase all nine blocks apply.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::layout::{SpatialMask, TokenLayout};
use crate::tensor::{BinaryMatrix, Tensor};

/// Cap on materializing the full dense mask, in entries.
pub const DENSE_CAP_ENTRIES: u64 = 1 << 24;

/// Whether the mask is built for training or inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Training,
    Inference,
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "training" => Ok(Phase::Training),
            "inference" => Ok(Phase::Inference),
            other => Err(Error::UnknownMode(other.to_string())),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Training => "training",
            Phase::Inference => "inference",
        })
    }
}

/// Literal-reading switches. Defaults follow the documented intent; the
/// literal variants exist so both readings can be compared.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AssembleOptions {
    /// Use an identity matrix for video→video instead of all-ones.
    pub literal_identity_v2v: bool,
    /// Zero the text→video rows of text tokens outside every motion span
    /// instead of leaving them unconstrained.
    pub literal_t2v: bool,
}

/// Per-object membership bitmaps over the video segment: `member[k][q] = 1`
/// iff local video token q belongs to object k.
fn video_membership(layout: &TokenLayout, object_masks: &[Vec<SpatialMask>]) -> Result<Vec<Vec<u8>>> {
    if object_masks.len() != layout.n_objects() {
        return Err(Error::DimensionMismatch {
            what: "object mask tracks",
            expected: format!("{}", layout.n_objects()),
            got: format!("{}", object_masks.len()),
        });
    }
    let offset = layout.video_offset();
    let mut member = Vec::with_capacity(object_masks.len());
    for track in object_masks {
        let mut bits = vec![0u8; layout.n_video()];
        for idx in layout.object_video_tokens(track)? {
            bits[idx - offset] = 1;
        }
        member.push(bits);
    }
    Ok(member)
}

/// motion→video block (K·d_m × n_video): motion token p of object k may
/// attend to video token q iff q belongs to object k; union over objects.
pub fn build_m2v(layout: &TokenLayout, object_masks: &[Vec<SpatialMask>]) -> Result<BinaryMatrix> {
    let member = video_membership(layout, object_masks)?;
    let mut block = BinaryMatrix::zeros(layout.n_motion(), layout.n_video());
    for k in 0..layout.n_objects() {
        for p in layout.motion_spans()[k].indices() {
            for (q, &m) in member[k].iter().enumerate() {
                if m != 0 {
                    block.set(p, q, true);
                }
            }
        }
    }
    Ok(block)
}

/// motion→motion block: the zero matrix, always.
pub fn build_m2m(layout: &TokenLayout) -> BinaryMatrix {
    BinaryMatrix::zeros(layout.n_motion(), layout.n_motion())
}

/// text→video block (n_text × n_video): motion-text rows are restricted to
/// their object's video tokens; all other rows are all-ones unless `literal`
/// (then all-zero).
pub fn build_t2v(
    layout: &TokenLayout,
    object_masks: &[Vec<SpatialMask>],
    literal: bool,
) -> Result<BinaryMatrix> {
    let member = video_membership(layout, object_masks)?;
    let mut block = if literal {
        BinaryMatrix::zeros(layout.n_text(), layout.n_video())
    } else {
        BinaryMatrix::ones(layout.n_text(), layout.n_video())
    };
    for k in 0..layout.n_objects() {
        for p in layout.text_motion_spans()[k].indices() {
            for (q, &m) in member[k].iter().enumerate() {
                block.set(p, q, m != 0);
            }
        }
    }
    Ok(block)
}

/// text→text block (n_text × n_text): all-ones except zeros between
/// motion-text spans of different objects, in both orders.
pub fn build_t2t(layout: &TokenLayout) -> BinaryMatrix {
    let mut block = BinaryMatrix::ones(layout.n_text(), layout.n_text());
    let spans = layout.text_motion_spans();
    for k1 in 0..spans.len() {
        for k2 in 0..spans.len() {
            if k1 == k2 {
                continue;
            }
            for p in spans[k1].indices() {
                for q in spans[k2].indices() {
                    block.set(p, q, false);
                }
            }
        }
    }
    block
}

/// text→motion block (n_text × K·d_m): motion-text rows of object k attend
/// exactly to object k's motion tokens; all other rows are zero.
pub fn build_t2m(layout: &TokenLayout) -> BinaryMatrix {
    let mut block = BinaryMatrix::zeros(layout.n_text(), layout.n_motion());
    for k in 0..layout.n_objects() {
        for p in layout.text_motion_spans()[k].indices() {
            for q in layout.motion_spans()[k].indices() {
                block.set(p, q, true);
            }
        }
    }
    block
}

fn identity(n: usize) -> BinaryMatrix {
    let mut m = BinaryMatrix::zeros(n, n);
    for i in 0..n {
        m.set(i, i, true);
    }
    m
}

/// The assembled mask: nine blocks plus the layout and phase they were built
/// for. Immutable once assembled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttentionMask {
    layout: TokenLayout,
    phase: Phase,
    text_text: BinaryMatrix,
    text_motion: BinaryMatrix,
    text_video: BinaryMatrix,
    motion_text: BinaryMatrix,
    motion_motion: BinaryMatrix,
    motion_video: BinaryMatrix,
    video_text: BinaryMatrix,
    video_motion: BinaryMatrix,
    video_video: BinaryMatrix,
}

/// Builds all nine blocks for the given phase.
///
/// In training phase only m→m, m→v/v→m and t→m/m→t constrain; every other
/// block — including v→v even under `literal_identity_v2v` — is all-ones,
/// because inactive blocks must leave attention unchanged.
pub fn assemble(
    layout: &TokenLayout,
    object_masks: &[Vec<SpatialMask>],
    phase: Phase,
    options: AssembleOptions,
) -> Result<AttentionMask> {
    let motion_video = build_m2v(layout, object_masks)?;
    let video_motion = motion_video.transpose();
    let motion_motion = build_m2m(layout);
    let text_motion = build_t2m(layout);
    let motion_text = text_motion.transpose();

    let (text_text, text_video, video_text, video_video) = match phase {
        Phase::Training => (
            BinaryMatrix::ones(layout.n_text(), layout.n_text()),
            BinaryMatrix::ones(layout.n_text(), layout.n_video()),
            BinaryMatrix::ones(layout.n_video(), layout.n_text()),
            BinaryMatrix::ones(layout.n_video(), layout.n_video()),
        ),
        Phase::Inference => {
            let text_video = build_t2v(layout, object_masks, options.literal_t2v)?;
            let video_text = text_video.transpose();
            let video_video = if options.literal_identity_v2v {
                identity(layout.n_video())
            } else {
                BinaryMatrix::ones(layout.n_video(), layout.n_video())
            };
            (build_t2t(layout), text_video, video_text, video_video)
        }
    };

    Ok(AttentionMask {
        layout: layout.clone(),
        phase,
        text_text,
        text_motion,
        text_video,
        motion_text,
        motion_motion,
        motion_video,
        video_text,
        video_motion,
        video_video,
    })
}

impl AttentionMask {
    pub fn layout(&self) -> &TokenLayout {
        &self.layout
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn text_text(&self) -> &BinaryMatrix {
        &self.text_text
    }

    pub fn text_motion(&self) -> &BinaryMatrix {
        &self.text_motion
    }

    pub fn text_video(&self) -> &BinaryMatrix {
        &self.text_video
    }

    pub fn motion_text(&self) -> &BinaryMatrix {
        &self.motion_text
    }

    pub fn motion_motion(&self) -> &BinaryMatrix {
        &self.motion_motion
    }

    pub fn motion_video(&self) -> &BinaryMatrix {
        &self.motion_video
    }

    pub fn video_text(&self) -> &BinaryMatrix {
        &self.video_text
    }

    pub fn video_motion(&self) -> &BinaryMatrix {
        &self.video_motion
    }

    pub fn video_video(&self) -> &BinaryMatrix {
        &self.video_video
    }

    /// Materializes the full (total × total) mask. Capped at
    /// `DENSE_CAP_ENTRIES` entries; larger requests are an error rather than
    /// an allocation.
    pub fn dense(&self) -> Result<BinaryMatrix> {
        let total = self.layout.total() as u64;
        let entries = total * total;
        if entries > DENSE_CAP_ENTRIES {
            return Err(Error::DenseTooLarge {
                entries,
                cap: DENSE_CAP_ENTRIES,
            });
        }
        let total = self.layout.total();
        let mo = self.layout.motion_offset();
        let vo = self.layout.video_offset();
        let mut dense = BinaryMatrix::zeros(total, total);
        let mut blit = |block: &BinaryMatrix, row0: usize, col0: usize| {
            for r in 0..block.rows() {
                for c in 0..block.cols() {
                    dense.set(row0 + r, col0 + c, block.get(r, c));
                }
            }
        };
        blit(&self.text_text, 0, 0);
        blit(&self.text_motion, 0, mo);
        blit(&self.text_video, 0, vo);
        blit(&self.motion_text, mo, 0);
        blit(&self.motion_motion, mo, mo);
        blit(&self.motion_video, mo, vo);
        blit(&self.video_text, vo, 0);
        blit(&self.video_motion, vo, mo);
        blit(&self.video_video, vo, vo);
        Ok(dense)
    }

    /// Dense mask as an f32 tensor of shape [total, total], for serialization.
    pub fn dense_tensor(&self) -> Result<Tensor> {
        let dense = self.dense()?;
        Tensor::new(vec![dense.rows(), dense.cols()], dense.to_f32())
    }
}
