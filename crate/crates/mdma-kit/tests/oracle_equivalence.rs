//! Equivalence of the library against the naive reference implementations in
//! `mdma-oracles`. The references recompute every quantity from its written
//! definition — one scalar at a time, no shared code paths — so agreement
//! here checks the optimized implementations against the definitions rather
//! than against themselves.

use rand::Rng;

use mdma_kit::attention::{masked_attention, MaskMode};
use mdma_kit::dmem::{extract_training_mask, TextQuerySelection};
use mdma_kit::harness::metrics::{flow_fidelity, flow_fidelity_tracks};
use mdma_kit::harness::scenario::{random_projected_tokens, FlowField};
use mdma_kit::layout::{build_layout, Span, SpatialMask, TokenLayout};
use mdma_kit::mask::{assemble, AssembleOptions, Phase};
use mdma_kit::rmpm::{propagate_object, FeatureSequence};
use mdma_kit::rng::seeded_rng;
use mdma_kit::tensor::BinaryMatrix;

use mdma_oracles::attention::naive_attention;
use mdma_oracles::blocks::naive_dense_mask;
use mdma_oracles::extract::naive_extract;
use mdma_oracles::fidelity::{naive_flow_fidelity, naive_flow_fidelity_tracks};
use mdma_oracles::propagate::naive_propagate;

fn random_layout(rng: &mut impl Rng) -> TokenLayout {
    let objects = rng.gen_range(1..=4);
    let d_m = rng.gen_range(1..=4);
    let frames = rng.gen_range(1..=4);
    let grid_h = rng.gen_range(1..=6);
    let grid_w = rng.gen_range(1..=6);
    let mut spans = Vec::with_capacity(objects);
    let mut cursor = 0usize;
    for _ in 0..objects {
        cursor += rng.gen_range(0..=1);
        let len = rng.gen_range(1..=2);
        spans.push(Span::new(cursor, cursor + len));
        cursor += len;
    }
    let n_text = cursor + rng.gen_range(0..=2);
    build_layout(n_text, d_m, objects, frames, grid_h, grid_w, spans).unwrap()
}

fn random_tracks(rng: &mut impl Rng, layout: &TokenLayout) -> Vec<Vec<SpatialMask>> {
    (0..layout.n_objects())
        .map(|_| {
            (0..layout.frames())
                .map(|frame| {
                    let mut grid = BinaryMatrix::zeros(layout.grid_h(), layout.grid_w());
                    for r in 0..layout.grid_h() {
                        for c in 0..layout.grid_w() {
                            if rng.gen_bool(0.3) {
                                grid.set(r, c, true);
                            }
                        }
                    }
                    SpatialMask::new(frame, grid)
                })
                .collect()
        })
        .collect()
}

const FLAG_COMBOS: [AssembleOptions; 4] = [
    AssembleOptions {
        literal_identity_v2v: false,
        literal_t2v: false,
    },
    AssembleOptions {
        literal_identity_v2v: true,
        literal_t2v: false,
    },
    AssembleOptions {
        literal_identity_v2v: false,
        literal_t2v: true,
    },
    AssembleOptions {
        literal_identity_v2v: true,
        literal_t2v: true,
    },
];

#[test]
fn dense_mask_matches_naive_entry_rule() {
    for seed in 0..60u64 {
        let mut rng = seeded_rng(seed);
        let layout = random_layout(&mut rng);
        let tracks = random_tracks(&mut rng, &layout);
        for phase in [Phase::Training, Phase::Inference] {
            for options in FLAG_COMBOS {
                let dense = assemble(&layout, &tracks, phase, options)
                    .unwrap()
                    .dense()
                    .unwrap();
                let expected = naive_dense_mask(&layout, &tracks, phase, options);
                let total = layout.total();
                for p in 0..total {
                    for q in 0..total {
                        assert_eq!(
                            dense.get(p, q),
                            expected[p * total + q] != 0,
                            "seed {seed} phase {phase:?} options {options:?} entry ({p}, {q})"
                        );
                    }
                }
            }
        }
    }
}

/// A mask for attention tests: mostly random bits, with the first row forced
/// all-zero so every mode's empty-row fallback is on the tested path.
fn random_attention_mask(rng: &mut impl Rng, total: usize) -> BinaryMatrix {
    let mut mask = BinaryMatrix::zeros(total, total);
    for p in 0..total {
        for q in 0..total {
            if rng.gen_bool(0.6) {
                mask.set(p, q, true);
            }
        }
    }
    for q in 0..total {
        mask.set(0, q, false);
    }
    mask
}

#[test]
fn masked_attention_matches_naive_bitwise() {
    for seed in 0..40u64 {
        let mut rng = seeded_rng(seed);
        let heads = rng.gen_range(1..=3);
        let total = rng.gen_range(2..=24);
        let dim = rng.gen_range(1..=6);
        let tokens = random_projected_tokens(seed, heads, total, dim).unwrap();
        let mask = random_attention_mask(&mut rng, total);
        let dense: Vec<u8> = (0..total)
            .flat_map(|p| (0..total).map(move |q| (p, q)))
            .map(|(p, q)| mask.get(p, q) as u8)
            .collect();
        for mode in [MaskMode::MulLogits, MaskMode::NegInf, MaskMode::MulProbs] {
            let out = masked_attention(&tokens, &mask, mode).unwrap();
            let expected = naive_attention(&tokens, &dense, mode);
            assert_eq!(out.data().len(), expected.len());
            for (i, (got, want)) in out.data().iter().zip(&expected).enumerate() {
                assert_eq!(
                    got.to_bits(),
                    want.to_bits(),
                    "seed {seed} mode {mode:?} flat index {i}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn masked_attention_matches_naive_on_structured_masks() {
    for seed in 100..130u64 {
        let mut rng = seeded_rng(seed);
        let layout = random_layout(&mut rng);
        let tracks = random_tracks(&mut rng, &layout);
        let total = layout.total();
        if total > 120 {
            continue;
        }
        let mask = assemble(&layout, &tracks, Phase::Inference, FLAG_COMBOS[0])
            .unwrap()
            .dense()
            .unwrap();
        let dense: Vec<u8> = (0..total)
            .flat_map(|p| (0..total).map(move |q| (p, q)))
            .map(|(p, q)| mask.get(p, q) as u8)
            .collect();
        let tokens = random_projected_tokens(seed, 2, total, 4).unwrap();
        for mode in [MaskMode::MulLogits, MaskMode::NegInf, MaskMode::MulProbs] {
            let out = masked_attention(&tokens, &mask, mode).unwrap();
            let expected = naive_attention(&tokens, &dense, mode);
            for (got, want) in out.data().iter().zip(&expected) {
                assert_eq!(got.to_bits(), want.to_bits(), "seed {seed} mode {mode:?}");
            }
        }
    }
}

#[test]
fn extraction_matches_naive() {
    for seed in 0..100u64 {
        let mut rng = seeded_rng(seed);
        let layout = random_layout(&mut rng);
        let tokens = random_projected_tokens(
            seed,
            rng.gen_range(1..=3),
            layout.total(),
            rng.gen_range(1..=6),
        )
        .unwrap();
        let object = rng.gen_range(0..layout.n_objects());
        let span = layout.text_motion_spans()[object];
        let mut indices: Vec<usize> = span.indices().collect();
        if rng.gen_bool(0.5) {
            indices.reverse();
        }
        if rng.gen_bool(0.3) && layout.n_text() > span.len() {
            indices.push(if span.start > 0 { 0 } else { layout.n_text() - 1 });
        }
        let selection = TextQuerySelection::new(object, indices.clone());
        let masks = extract_training_mask(&tokens, &selection, &layout).unwrap();
        let expected = naive_extract(&tokens, &indices, &layout);
        assert_eq!(masks, expected, "seed {seed}");
    }
}

fn random_features(rng: &mut impl Rng, frames: usize, h: usize, w: usize, ch: usize) -> FeatureSequence {
    let per_frame: Vec<Vec<f32>> = (0..frames)
        .map(|_| (0..h * w * ch).map(|_| rng.gen_range(-2.0f32..2.0)).collect())
        .collect();
    FeatureSequence::new(h, w, ch, per_frame).unwrap()
}

fn random_first_mask(rng: &mut impl Rng, h: usize, w: usize) -> SpatialMask {
    let mut grid = BinaryMatrix::zeros(h, w);
    for r in 0..h {
        for c in 0..w {
            if rng.gen_bool(0.25) {
                grid.set(r, c, true);
            }
        }
    }
    SpatialMask::new(0, grid)
}

#[test]
fn propagation_matches_naive_bitwise() {
    let mut cases = 0;
    for seed in 0..120u64 {
        let mut rng = seeded_rng(seed);
        let frames = rng.gen_range(1..=8);
        let h = rng.gen_range(1..=8);
        let w = rng.gen_range(1..=8);
        let ch = rng.gen_range(1..=8);
        let window = rng.gen_range(1..=3);
        let features = random_features(&mut rng, frames, h, w, ch);
        let first = random_first_mask(&mut rng, h, w);
        let track = propagate_object(&features, &first, window).unwrap();
        let expected = naive_propagate(&features, &first, window);
        assert_eq!(track.masks, expected, "seed {seed} window {window}");
        cases += 1;
    }
    assert!(cases >= 100);
}

fn random_flow(rng: &mut impl Rng, h: usize, w: usize) -> FlowField {
    let mut flow = FlowField::zeros(h, w);
    for r in 0..h {
        for c in 0..w {
            flow.set(r, c, rng.gen_range(-3.0f32..3.0), rng.gen_range(-3.0f32..3.0));
        }
    }
    flow
}

fn random_frame_mask(rng: &mut impl Rng, frame: usize, h: usize, w: usize) -> SpatialMask {
    let mut grid = BinaryMatrix::zeros(h, w);
    for r in 0..h {
        for c in 0..w {
            if rng.gen_bool(0.4) {
                grid.set(r, c, true);
            }
        }
    }
    SpatialMask::new(frame, grid)
}

#[test]
fn flow_fidelity_matches_naive_within_float_noise() {
    for seed in 0..200u64 {
        let mut rng = seeded_rng(seed);
        let h = rng.gen_range(1..=8);
        let w = rng.gen_range(1..=8);
        let flow_a = random_flow(&mut rng, h, w);
        let flow_b = random_flow(&mut rng, h, w);
        let mask_a = random_frame_mask(&mut rng, 0, h, w);
        let mask_b = random_frame_mask(&mut rng, 0, h, w);
        let got = flow_fidelity(&flow_a, &mask_a, &flow_b, &mask_b).unwrap();
        let want = naive_flow_fidelity(&flow_a, &mask_a, &flow_b, &mask_b);
        assert!(
            (got - want).abs() <= 1e-12,
            "seed {seed}: {got} vs {want}"
        );
    }
}

#[test]
fn track_fidelity_matches_naive_within_float_noise() {
    for seed in 200..260u64 {
        let mut rng = seeded_rng(seed);
        let h = rng.gen_range(1..=6);
        let w = rng.gen_range(1..=6);
        let transitions = rng.gen_range(1..=4);
        let flows_a: Vec<FlowField> = (0..transitions).map(|_| random_flow(&mut rng, h, w)).collect();
        let flows_b: Vec<FlowField> = (0..transitions).map(|_| random_flow(&mut rng, h, w)).collect();
        let track_a: Vec<SpatialMask> = (0..=transitions)
            .map(|l| random_frame_mask(&mut rng, l, h, w))
            .collect();
        let track_b: Vec<SpatialMask> = (0..=transitions)
            .map(|l| random_frame_mask(&mut rng, l, h, w))
            .collect();
        let got = flow_fidelity_tracks(&flows_a, &track_a, &flows_b, &track_b).unwrap();
        let want = naive_flow_fidelity_tracks(&flows_a, &track_a, &flows_b, &track_b);
        assert!(
            (got - want).abs() <= 1e-12,
            "seed {seed}: {got} vs {want}"
        );
    }
}
