//! Straight-line reference for masked multi-head attention.

use mdma_kit::attention::{MaskMode, ProjectedTokens};

/// Masked attention output `[heads, tokens, dim]` computed directly from the
/// definitions: scaled dot-product logits, the mode's masking rule, then a
/// probability-weighted sum over every value row (zero weights included).
pub fn naive_attention(tokens: &ProjectedTokens, dense_mask: &[u8], mode: MaskMode) -> Vec<f32> {
    let h = tokens.n_heads();
    let t = tokens.total_tokens();
    let d = tokens.head_dim();
    assert_eq!(dense_mask.len(), t * t, "dense mask must be tokens x tokens");
    let scale = 1.0 / (d as f32).sqrt();
    let allowed = |p: usize, q: usize| dense_mask[p * t + q] != 0;

    let mut out = vec![0.0f32; h * t * d];
    for head in 0..h {
        for p in 0..t {
            // Logits.
            let mut logits = vec![0.0f32; t];
            for (q, logit) in logits.iter_mut().enumerate() {
                let qrow = tokens.q_row(head, p);
                let krow = tokens.k_row(head, q);
                let mut acc = 0.0f32;
                for c in 0..d {
                    acc += qrow[c] * krow[c];
                }
                *logit = acc * scale;
            }

            // Probabilities under the masking rule.
            let mut probs = vec![0.0f32; t];
            match mode {
                MaskMode::MulLogits => {
                    // Zero the excluded logits, then softmax over everything.
                    let mut z = vec![0.0f32; t];
                    for q in 0..t {
                        z[q] = if allowed(p, q) { logits[q] } else { 0.0 };
                    }
                    let mut max = f32::NEG_INFINITY;
                    for &v in &z {
                        if v > max {
                            max = v;
                        }
                    }
                    let mut denom = 0.0f32;
                    for q in 0..t {
                        let e = (z[q] - max).exp();
                        probs[q] = e;
                        denom += e;
                    }
                    for v in &mut probs {
                        *v /= denom;
                    }
                }
                MaskMode::NegInf => {
                    // Softmax over the permitted entries only; a row with
                    // nothing permitted stays all-zero.
                    let mut max = f32::NEG_INFINITY;
                    for q in 0..t {
                        if allowed(p, q) && logits[q] > max {
                            max = logits[q];
                        }
                    }
                    if max > f32::NEG_INFINITY {
                        let mut denom = 0.0f32;
                        for q in 0..t {
                            if allowed(p, q) {
                                denom += (logits[q] - max).exp();
                            }
                        }
                        for q in 0..t {
                            if allowed(p, q) {
                                probs[q] = (logits[q] - max).exp() / denom;
                            }
                        }
                    }
                }
                MaskMode::MulProbs => {
                    // Plain softmax, zero the excluded entries, renormalize.
                    let mut max = f32::NEG_INFINITY;
                    for &v in &logits {
                        if v > max {
                            max = v;
                        }
                    }
                    let mut denom = 0.0f32;
                    for q in 0..t {
                        denom += (logits[q] - max).exp();
                    }
                    let mut kept = 0.0f32;
                    for q in 0..t {
                        if allowed(p, q) {
                            let v = (logits[q] - max).exp() / denom;
                            probs[q] = v;
                            kept += v;
                        }
                    }
                    if kept == 0.0 {
                        probs.fill(0.0);
                    } else {
                        for q in 0..t {
                            if allowed(p, q) {
                                probs[q] /= kept;
                            }
                        }
                    }
                }
            }

            // Output row: weighted sum over all value rows.
            let base = (head * t + p) * d;
            for q in 0..t {
                let vrow = tokens.v_row(head, q);
                for c in 0..d {
                    out[base + c] += probs[q] * vrow[c];
                }
            }
        }
    }
    out
}
