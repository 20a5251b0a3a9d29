//! Geometry of the concatenated token sequence.
//!
//! A sequence is laid out as `[text | motion | video]`. Text tokens occupy
//! `[0, n_text)`. Each of the `K` objects owns a contiguous run of `d_m`
//! motion tokens, ordered by object index, so motion tokens occupy
//! `[n_text, n_text + K*d_m)`. Video tokens follow, ordered frame-major then
//! row-major, so per-frame slices are contiguous.
//!
//! Each object also names a span of text tokens — the part of the prompt
//! describing that object's motion. Those spans are disjoint and may leave
//! gaps (text that describes appearance, background, style, ...).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{BinaryMatrix, Tensor};

/// A half-open index range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, idx: usize) -> bool {
        idx >= self.start && idx < self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

/// Which segment of the concatenated sequence a global index falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    Text,
    Motion,
    Video,
}

/// Index geometry of one `[text | motion | video]` sequence.
///
/// Immutable after construction; all derived quantities are plain arithmetic
/// over the stored counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenLayout {
    n_text: usize,
    n_motion_per_object: usize,
    n_objects: usize,
    frames: usize,
    grid_h: usize,
    grid_w: usize,
    text_motion_spans: Vec<Span>,
    /// Derived: object k's motion tokens at `[k*d_m, (k+1)*d_m)` within the
    /// motion segment. Stored so the serialized form is self-describing.
    motion_spans: Vec<Span>,
}

/// Validates counts and spans and derives the motion spans.
pub fn build_layout(
    n_text: usize,
    n_motion_per_object: usize,
    n_objects: usize,
    frames: usize,
    grid_h: usize,
    grid_w: usize,
    text_motion_spans: Vec<Span>,
) -> Result<TokenLayout> {
    for (what, got) in [
        ("n_text", n_text),
        ("n_motion_per_object", n_motion_per_object),
        ("n_objects", n_objects),
        ("frames", frames),
        ("grid_h", grid_h),
        ("grid_w", grid_w),
    ] {
        if got < 1 {
            return Err(Error::InvalidCount { what, min: 1, got });
        }
    }
    if text_motion_spans.len() != n_objects {
        return Err(Error::SpanCountMismatch {
            expected: n_objects,
            got: text_motion_spans.len(),
        });
    }
    for span in &text_motion_spans {
        if span.is_empty() || span.end > n_text {
            return Err(Error::SpanOutOfRange {
                what: "text-motion span",
                start: span.start,
                end: span.end,
                len: n_text,
            });
        }
    }
    for i in 0..text_motion_spans.len() {
        for j in (i + 1)..text_motion_spans.len() {
            let (a, b) = (&text_motion_spans[i], &text_motion_spans[j]);
            if a.overlaps(b) {
                return Err(Error::OverlappingSpans {
                    a_start: a.start,
                    a_end: a.end,
                    b_start: b.start,
                    b_end: b.end,
                });
            }
        }
    }
    let motion_spans = (0..n_objects)
        .map(|k| Span::new(k * n_motion_per_object, (k + 1) * n_motion_per_object))
        .collect();
    let layout = TokenLayout {
        n_text,
        n_motion_per_object,
        n_objects,
        frames,
        grid_h,
        grid_w,
        text_motion_spans,
        motion_spans,
    };
    // Reject geometries whose total length cannot be represented.
    layout.checked_total()?;
    Ok(layout)
}

impl TokenLayout {
    pub fn n_text(&self) -> usize {
        self.n_text
    }

    pub fn n_motion_per_object(&self) -> usize {
        self.n_motion_per_object
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn grid_h(&self) -> usize {
        self.grid_h
    }

    pub fn grid_w(&self) -> usize {
        self.grid_w
    }

    pub fn text_motion_spans(&self) -> &[Span] {
        &self.text_motion_spans
    }

    pub fn motion_spans(&self) -> &[Span] {
        &self.motion_spans
    }

    /// Total motion tokens, K * d_m.
    pub fn n_motion(&self) -> usize {
        self.n_objects * self.n_motion_per_object
    }

    /// Total video tokens, L * grid_h * grid_w.
    pub fn n_video(&self) -> usize {
        self.frames * self.grid_h * self.grid_w
    }

    pub fn cells_per_frame(&self) -> usize {
        self.grid_h * self.grid_w
    }

    /// Global index of the first motion token.
    pub fn motion_offset(&self) -> usize {
        self.n_text
    }

    /// Global index of the first video token.
    pub fn video_offset(&self) -> usize {
        self.n_text + self.n_motion()
    }

    pub fn total(&self) -> usize {
        self.video_offset() + self.n_video()
    }

    fn checked_total(&self) -> Result<usize> {
        let n_motion = self
            .n_objects
            .checked_mul(self.n_motion_per_object)
            .ok_or(Error::DimOverflow)?;
        let n_video = self
            .frames
            .checked_mul(self.grid_h)
            .and_then(|v| v.checked_mul(self.grid_w))
            .ok_or(Error::DimOverflow)?;
        self.n_text
            .checked_add(n_motion)
            .and_then(|v| v.checked_add(n_video))
            .ok_or(Error::DimOverflow)
    }

    /// Object k's motion span in global sequence coordinates.
    pub fn motion_span_global(&self, k: usize) -> Result<Span> {
        if k >= self.n_objects {
            return Err(Error::IndexOutOfRange {
                what: "object index",
                got: k,
                limit: self.n_objects,
            });
        }
        let local = self.motion_spans[k];
        Ok(Span::new(
            self.motion_offset() + local.start,
            self.motion_offset() + local.end,
        ))
    }

    /// Classifies a global index into its segment.
    pub fn segment(&self, idx: usize) -> Result<Segment> {
        if idx < self.n_text {
            Ok(Segment::Text)
        } else if idx < self.video_offset() {
            Ok(Segment::Motion)
        } else if idx < self.total() {
            Ok(Segment::Video)
        } else {
            Err(Error::IndexOutOfRange {
                what: "global token index",
                got: idx,
                limit: self.total(),
            })
        }
    }

    /// Global index of the video token at (frame, row, col).
    pub fn video_token_index(&self, frame: usize, row: usize, col: usize) -> Result<usize> {
        if frame >= self.frames {
            return Err(Error::IndexOutOfRange {
                what: "frame",
                got: frame,
                limit: self.frames,
            });
        }
        if row >= self.grid_h {
            return Err(Error::IndexOutOfRange {
                what: "row",
                got: row,
                limit: self.grid_h,
            });
        }
        if col >= self.grid_w {
            return Err(Error::IndexOutOfRange {
                what: "col",
                got: col,
                limit: self.grid_w,
            });
        }
        Ok(self.video_offset() + frame * self.cells_per_frame() + row * self.grid_w + col)
    }

    /// Inverse of `video_token_index`.
    pub fn video_coords(&self, idx: usize) -> Result<(usize, usize, usize)> {
        let off = self.video_offset();
        if idx < off || idx >= self.total() {
            return Err(Error::IndexOutOfRange {
                what: "video token index",
                got: idx,
                limit: self.total(),
            });
        }
        let rel = idx - off;
        let frame = rel / self.cells_per_frame();
        let within = rel % self.cells_per_frame();
        Ok((frame, within / self.grid_w, within % self.grid_w))
    }

    /// Global video-token indices covered by an object's per-frame masks,
    /// ascending. One mask per frame, in frame order.
    pub fn object_video_tokens(&self, masks: &[SpatialMask]) -> Result<Vec<usize>> {
        self.validate_mask_track(masks)?;
        let mut out = Vec::new();
        for (l, mask) in masks.iter().enumerate() {
            for r in 0..self.grid_h {
                for c in 0..self.grid_w {
                    if mask.grid.get(r, c) {
                        out.push(self.video_token_index(l, r, c)?);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Checks a per-frame mask list against this layout: one mask per frame,
    /// frames in order, grids of the right shape.
    pub fn validate_mask_track(&self, masks: &[SpatialMask]) -> Result<()> {
        if masks.len() != self.frames {
            return Err(Error::DimensionMismatch {
                what: "spatial masks per frame",
                expected: format!("{}", self.frames),
                got: format!("{}", masks.len()),
            });
        }
        for (l, mask) in masks.iter().enumerate() {
            if mask.frame != l {
                return Err(Error::DimensionMismatch {
                    what: "spatial mask frame index",
                    expected: format!("{l}"),
                    got: format!("{}", mask.frame),
                });
            }
            if mask.grid.rows() != self.grid_h || mask.grid.cols() != self.grid_w {
                return Err(Error::DimensionMismatch {
                    what: "spatial mask grid",
                    expected: format!("{}x{}", self.grid_h, self.grid_w),
                    got: format!("{}x{}", mask.grid.rows(), mask.grid.cols()),
                });
            }
        }
        Ok(())
    }

    /// Validates a layout that arrived from outside `build_layout` (e.g. a
    /// parsed JSON document), including the stored derived spans.
    pub fn validate(&self) -> Result<()> {
        let rebuilt = build_layout(
            self.n_text,
            self.n_motion_per_object,
            self.n_objects,
            self.frames,
            self.grid_h,
            self.grid_w,
            self.text_motion_spans.clone(),
        )?;
        if rebuilt.motion_spans != self.motion_spans {
            return Err(Error::InvalidConfig(
                "motion_spans do not match the spans derived from the counts".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let layout: TokenLayout = serde_json::from_str(s)?;
        layout.validate()?;
        Ok(layout)
    }
}

/// One object's binary mask over the latent grid of a single frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpatialMask {
    pub frame: usize,
    pub grid: BinaryMatrix,
}

impl SpatialMask {
    pub fn new(frame: usize, grid: BinaryMatrix) -> Self {
        Self { frame, grid }
    }

    pub fn full(frame: usize, grid_h: usize, grid_w: usize) -> Self {
        Self::new(frame, BinaryMatrix::ones(grid_h, grid_w))
    }

    pub fn empty(frame: usize, grid_h: usize, grid_w: usize) -> Self {
        Self::new(frame, BinaryMatrix::zeros(grid_h, grid_w))
    }
}

/// Reads per-object mask tracks from a `[objects, frames, grid_h, grid_w]`
/// tensor of exact 0.0/1.0 entries.
pub fn mask_tracks_from_tensor(t: &Tensor) -> Result<Vec<Vec<SpatialMask>>> {
    let dims = t.dims();
    if dims.len() != 4 {
        return Err(Error::DimensionMismatch {
            what: "mask tensor shape",
            expected: "[objects, frames, grid_h, grid_w]".into(),
            got: format!("{dims:?}"),
        });
    }
    let (k_objects, frames, grid_h, grid_w) = (dims[0], dims[1], dims[2], dims[3]);
    t.validate_binary()?;
    let cells = grid_h * grid_w;
    let mut tracks = Vec::with_capacity(k_objects);
    for k in 0..k_objects {
        let mut masks = Vec::with_capacity(frames);
        for l in 0..frames {
            let start = (k * frames + l) * cells;
            let grid = BinaryMatrix::from_f32(grid_h, grid_w, &t.data()[start..start + cells])?;
            masks.push(SpatialMask::new(l, grid));
        }
        tracks.push(masks);
    }
    Ok(tracks)
}

/// Writes per-object mask tracks as a `[objects, frames, grid_h, grid_w]`
/// tensor. All tracks must share one geometry and be non-empty.
pub fn mask_tracks_to_tensor(tracks: &[Vec<SpatialMask>]) -> Result<Tensor> {
    let first = tracks
        .first()
        .and_then(|t| t.first())
        .ok_or(Error::EmptyMask)?;
    let (grid_h, grid_w) = (first.grid.rows(), first.grid.cols());
    let frames = tracks[0].len();
    let mut data = Vec::with_capacity(tracks.len() * frames * grid_h * grid_w);
    for track in tracks {
        if track.len() != frames {
            return Err(Error::DimensionMismatch {
                what: "frames per track",
                expected: format!("{frames}"),
                got: format!("{}", track.len()),
            });
        }
        for (l, mask) in track.iter().enumerate() {
            if mask.frame != l {
                return Err(Error::DimensionMismatch {
                    what: "spatial mask frame index",
                    expected: format!("{l}"),
                    got: format!("{}", mask.frame),
                });
            }
            if mask.grid.rows() != grid_h || mask.grid.cols() != grid_w {
                return Err(Error::DimensionMismatch {
                    what: "spatial mask grid",
                    expected: format!("{grid_h}x{grid_w}"),
                    got: format!("{}x{}", mask.grid.rows(), mask.grid.cols()),
                });
            }
            data.extend(mask.grid.to_f32());
        }
    }
    Tensor::new(vec![tracks.len(), frames, grid_h, grid_w], data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_layout() -> TokenLayout {
        build_layout(6, 2, 2, 1, 2, 2, vec![Span::new(1, 2), Span::new(4, 5)]).unwrap()
    }

    #[test]
    fn derived_totals_and_motion_spans() {
        let layout = demo_layout();
        assert_eq!(layout.total(), 14);
        assert_eq!(
            layout.motion_spans(),
            &[Span::new(0, 2), Span::new(2, 4)]
        );

        let small = build_layout(3, 1, 1, 2, 1, 1, vec![Span::new(0, 1)]).unwrap();
        assert_eq!(small.total(), 6);
    }

    #[test]
    fn overlapping_spans_rejected() {
        let err = build_layout(6, 2, 2, 1, 2, 2, vec![Span::new(1, 3), Span::new(2, 4)]);
        assert!(matches!(err, Err(Error::OverlappingSpans { .. })));
    }

    #[test]
    fn span_count_and_range_checked() {
        assert!(matches!(
            build_layout(6, 2, 2, 1, 2, 2, vec![Span::new(1, 2)]),
            Err(Error::SpanCountMismatch {
                expected: 2,
                got: 1
            })
        ));
        assert!(matches!(
            build_layout(6, 2, 1, 1, 2, 2, vec![Span::new(5, 7)]),
            Err(Error::SpanOutOfRange { .. })
        ));
        assert!(matches!(
            build_layout(6, 2, 1, 1, 2, 2, vec![Span::new(3, 3)]),
            Err(Error::SpanOutOfRange { .. })
        ));
    }

    #[test]
    fn video_token_indices() {
        let layout = demo_layout();
        assert_eq!(layout.video_token_index(0, 0, 0).unwrap(), 10);
        assert_eq!(layout.video_token_index(0, 1, 1).unwrap(), 13);
        let small = build_layout(3, 1, 1, 2, 1, 1, vec![Span::new(0, 1)]).unwrap();
        assert_eq!(small.video_token_index(1, 0, 0).unwrap(), 5);
        assert!(layout.video_token_index(1, 0, 0).is_err());
        assert!(layout.video_token_index(0, 2, 0).is_err());
        assert!(layout.video_token_index(0, 0, 2).is_err());
    }

    #[test]
    fn object_video_tokens_examples() {
        let layout = demo_layout();
        let full = vec![SpatialMask::full(0, 2, 2)];
        assert_eq!(
            layout.object_video_tokens(&full).unwrap(),
            vec![10, 11, 12, 13]
        );
        let empty = vec![SpatialMask::empty(0, 2, 2)];
        assert!(layout.object_video_tokens(&empty).unwrap().is_empty());

        let mut left = BinaryMatrix::zeros(2, 2);
        left.set(0, 0, true);
        left.set(1, 0, true);
        let tokens = layout
            .object_video_tokens(&[SpatialMask::new(0, left)])
            .unwrap();
        assert_eq!(tokens, vec![10, 12]);
    }

    #[test]
    fn segments_partition_the_sequence() {
        let layout = demo_layout();
        let mut counts = [0usize; 3];
        for idx in 0..layout.total() {
            match layout.segment(idx).unwrap() {
                Segment::Text => counts[0] += 1,
                Segment::Motion => counts[1] += 1,
                Segment::Video => counts[2] += 1,
            }
        }
        assert_eq!(counts, [6, 4, 4]);
        assert!(layout.segment(layout.total()).is_err());
    }

    #[test]
    fn json_round_trip_validates() {
        let layout = demo_layout();
        let json = layout.to_json().unwrap();
        let back = TokenLayout::from_json(&json).unwrap();
        assert_eq!(layout, back);

        let tampered = json.replace("\"n_objects\": 2", "\"n_objects\": 3");
        assert!(TokenLayout::from_json(&tampered).is_err());
    }
}
