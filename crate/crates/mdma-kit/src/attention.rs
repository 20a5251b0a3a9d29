//! Reference masked multi-head attention.
//!
//! Scores are `Q·Kᵀ/√d` per head. A binary mask over the full token sequence
//! is applied in one of three modes:
//!
//! * `mul_logits` — multiply the raw logits by the mask, then softmax. This
//!   is the naive reading of "apply the mask to the attention map": it does
//!   NOT block attention, because a zeroed logit still contributes exp(0)=1
//!   to the softmax. Kept so the gap is demonstrable.
//! * `neg_inf` — masked softmax: excluded entries are treated as −∞, i.e.
//!   the softmax runs over permitted entries only. Rows with no permitted
//!   entry produce all-zero probability rows. This is the default.
//! * `mul_probs` — softmax first, then zero the excluded probabilities and
//!   renormalize the row; rows with nothing permitted go to zero.
//!
//! In `neg_inf` and `mul_probs` modes an excluded entry's probability is a
//! literal 0.0, so support containment is exact, not approximate.
//!
//! All reductions (max, sums, the probability-weighted V sums) run in
//! ascending index order in f32, per the crate-wide determinism rule.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{BinaryMatrix, Tensor};

/// How a binary mask is applied to attention scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskMode {
    MulLogits,
    NegInf,
    MulProbs,
}

impl FromStr for MaskMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mul_logits" => Ok(MaskMode::MulLogits),
            "neg_inf" => Ok(MaskMode::NegInf),
            "mul_probs" => Ok(MaskMode::MulProbs),
            other => Err(Error::UnknownMode(other.to_string())),
        }
    }
}

impl fmt::Display for MaskMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MaskMode::MulLogits => "mul_logits",
            MaskMode::NegInf => "neg_inf",
            MaskMode::MulProbs => "mul_probs",
        })
    }
}

/// Projected Q/K/V for one sequence: each `[n_heads, total_tokens, head_dim]`
/// row-major. Entries are validated finite on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedTokens {
    n_heads: usize,
    total_tokens: usize,
    head_dim: usize,
    q: Vec<f32>,
    k: Vec<f32>,
    v: Vec<f32>,
}

impl ProjectedTokens {
    pub fn new(
        n_heads: usize,
        total_tokens: usize,
        head_dim: usize,
        q: Vec<f32>,
        k: Vec<f32>,
        v: Vec<f32>,
    ) -> Result<Self> {
        for (what, got) in [
            ("n_heads", n_heads),
            ("total_tokens", total_tokens),
            ("head_dim", head_dim),
        ] {
            if got < 1 {
                return Err(Error::InvalidCount { what, min: 1, got });
            }
        }
        let expect = n_heads
            .checked_mul(total_tokens)
            .and_then(|v| v.checked_mul(head_dim))
            .ok_or(Error::DimOverflow)?;
        for (name, buf) in [("Q", &q), ("K", &k), ("V", &v)] {
            if buf.len() != expect {
                return Err(Error::DimensionMismatch {
                    what: "projected token buffer",
                    expected: format!("{expect} entries"),
                    got: format!("{} entries in {name}", buf.len()),
                });
            }
        }
        let tokens = Self {
            n_heads,
            total_tokens,
            head_dim,
            q,
            k,
            v,
        };
        for (name, buf) in [("Q", &tokens.q), ("K", &tokens.k), ("V", &tokens.v)] {
            if buf.iter().any(|x| !x.is_finite()) {
                let _ = name;
                return Err(Error::NonFinite("projected tokens"));
            }
        }
        Ok(tokens)
    }

    /// Parses the on-disk packing: one tensor of shape [3, heads, tokens, dim]
    /// holding Q, K, V stacked along the first axis.
    pub fn from_tensor(t: &Tensor) -> Result<Self> {
        let dims = t.dims();
        if dims.len() != 4 || dims[0] != 3 {
            return Err(Error::DimensionMismatch {
                what: "qkv tensor shape",
                expected: "[3, heads, tokens, dim]".into(),
                got: format!("{dims:?}"),
            });
        }
        let (h, tokens, d) = (dims[1], dims[2], dims[3]);
        let chunk = h * tokens * d;
        let data = t.data();
        Self::new(
            h,
            tokens,
            d,
            data[0..chunk].to_vec(),
            data[chunk..2 * chunk].to_vec(),
            data[2 * chunk..3 * chunk].to_vec(),
        )
    }

    pub fn to_tensor(&self) -> Result<Tensor> {
        let mut data = Vec::with_capacity(3 * self.q.len());
        data.extend_from_slice(&self.q);
        data.extend_from_slice(&self.k);
        data.extend_from_slice(&self.v);
        Tensor::new(
            vec![3, self.n_heads, self.total_tokens, self.head_dim],
            data,
        )
    }

    pub fn n_heads(&self) -> usize {
        self.n_heads
    }

    pub fn total_tokens(&self) -> usize {
        self.total_tokens
    }

    pub fn head_dim(&self) -> usize {
        self.head_dim
    }

    fn row_range(&self, head: usize, token: usize) -> std::ops::Range<usize> {
        let start = (head * self.total_tokens + token) * self.head_dim;
        start..start + self.head_dim
    }

    pub fn q_row(&self, head: usize, token: usize) -> &[f32] {
        &self.q[self.row_range(head, token)]
    }

    pub fn k_row(&self, head: usize, token: usize) -> &[f32] {
        &self.k[self.row_range(head, token)]
    }

    pub fn v_row(&self, head: usize, token: usize) -> &[f32] {
        &self.v[self.row_range(head, token)]
    }

    /// Overwrites token `token`'s key row in every head. Used by the leak
    /// probe to perturb another object's tokens.
    pub fn set_k_token(&mut self, token: usize, rows: &[Vec<f32>]) -> Result<()> {
        self.set_token(true, token, rows)
    }

    /// Overwrites token `token`'s value row in every head.
    pub fn set_v_token(&mut self, token: usize, rows: &[Vec<f32>]) -> Result<()> {
        self.set_token(false, token, rows)
    }

    fn set_token(&mut self, is_k: bool, token: usize, rows: &[Vec<f32>]) -> Result<()> {
        if token >= self.total_tokens {
            return Err(Error::IndexOutOfRange {
                what: "token index",
                got: token,
                limit: self.total_tokens,
            });
        }
        if rows.len() != self.n_heads || rows.iter().any(|r| r.len() != self.head_dim) {
            return Err(Error::DimensionMismatch {
                what: "replacement rows",
                expected: format!("{} rows of {}", self.n_heads, self.head_dim),
                got: format!("{} rows", rows.len()),
            });
        }
        for (head, row) in rows.iter().enumerate() {
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("replacement rows"));
            }
            let range = self.row_range(head, token);
            let buf = if is_k { &mut self.k } else { &mut self.v };
            buf[range].copy_from_slice(row);
        }
        Ok(())
    }
}

/// Raw scores `Q·Kᵀ/√d`, shape [heads, tokens, tokens].
pub fn attention_scores(tokens: &ProjectedTokens) -> Result<Tensor> {
    let h = tokens.n_heads();
    let t = tokens.total_tokens();
    let scale = 1.0 / (tokens.head_dim() as f32).sqrt();
    let mut data = Vec::with_capacity(h * t * t);
    for head in 0..h {
        for p in 0..t {
            let q = tokens.q_row(head, p);
            for qi in 0..t {
                data.push(crate::tensor::dot(q, tokens.k_row(head, qi)) * scale);
            }
        }
    }
    let scores = Tensor::new(vec![h, t, t], data)?;
    scores.validate_finite("attention scores")?;
    Ok(scores)
}

/// Turns scores into per-row probabilities under the mask, broadcast over
/// heads. `mask` must be `tokens × tokens`.
pub fn apply_mask(scores: &Tensor, mask: &BinaryMatrix, mode: MaskMode) -> Result<Tensor> {
    let dims = scores.dims();
    if dims.len() != 3 || dims[1] != dims[2] {
        return Err(Error::DimensionMismatch {
            what: "score tensor shape",
            expected: "[heads, tokens, tokens]".into(),
            got: format!("{dims:?}"),
        });
    }
    let (h, t) = (dims[0], dims[1]);
    if mask.rows() != t || mask.cols() != t {
        return Err(Error::DimensionMismatch {
            what: "mask shape",
            expected: format!("{t}x{t}"),
            got: format!("{}x{}", mask.rows(), mask.cols()),
        });
    }
    let mut out = vec![0.0f32; h * t * t];
    for head in 0..h {
        for p in 0..t {
            let row_off = (head * t + p) * t;
            let row = &scores.data()[row_off..row_off + t];
            let out_row = &mut out[row_off..row_off + t];
            match mode {
                MaskMode::MulLogits => {
                    // Literal elementwise product on the logits; the softmax
                    // then runs over every entry, masked ones included.
                    let mut max = f32::NEG_INFINITY;
                    for q in 0..t {
                        let z = if mask.get(p, q) { row[q] } else { 0.0 };
                        out_row[q] = z;
                        if z > max {
                            max = z;
                        }
                    }
                    let mut denom = 0.0f32;
                    for q in 0..t {
                        let e = (out_row[q] - max).exp();
                        out_row[q] = e;
                        denom += e;
                    }
                    for q in 0..t {
                        out_row[q] /= denom;
                    }
                }
                MaskMode::NegInf => {
                    // Softmax over permitted entries only; excluded entries
                    // stay exactly 0.0.
                    let mut max = f32::NEG_INFINITY;
                    for q in 0..t {
                        if mask.get(p, q) && row[q] > max {
                            max = row[q];
                        }
                    }
                    if max == f32::NEG_INFINITY {
                        continue; // nothing permitted: zero row
                    }
                    let mut denom = 0.0f32;
                    for q in 0..t {
                        if mask.get(p, q) {
                            denom += (row[q] - max).exp();
                        }
                    }
                    for q in 0..t {
                        if mask.get(p, q) {
                            out_row[q] = (row[q] - max).exp() / denom;
                        }
                    }
                }
                MaskMode::MulProbs => {
                    // Plain softmax, then zero excluded entries and
                    // renormalize what is left.
                    let mut max = f32::NEG_INFINITY;
                    for q in 0..t {
                        if row[q] > max {
                            max = row[q];
                        }
                    }
                    let mut denom = 0.0f32;
                    for q in 0..t {
                        denom += (row[q] - max).exp();
                    }
                    let mut kept = 0.0f32;
                    for q in 0..t {
                        if mask.get(p, q) {
                            let pq = (row[q] - max).exp() / denom;
                            out_row[q] = pq;
                            kept += pq;
                        }
                    }
                    if kept == 0.0 {
                        for q in 0..t {
                            out_row[q] = 0.0;
                        }
                    } else {
                        for q in 0..t {
                            if mask.get(p, q) {
                                out_row[q] /= kept;
                            }
                        }
                    }
                }
            }
        }
    }
    Tensor::new(vec![h, t, t], out)
}

/// Full masked attention: probabilities · V, shape [heads, tokens, dim].
pub fn masked_attention(
    tokens: &ProjectedTokens,
    mask: &BinaryMatrix,
    mode: MaskMode,
) -> Result<Tensor> {
    let probs = apply_mask(&attention_scores(tokens)?, mask, mode)?;
    let h = tokens.n_heads();
    let t = tokens.total_tokens();
    let d = tokens.head_dim();
    let mut out = vec![0.0f32; h * t * d];
    for head in 0..h {
        for p in 0..t {
            let prob_off = (head * t + p) * t;
            let prow = &probs.data()[prob_off..prob_off + t];
            let out_off = (head * t + p) * d;
            for q in 0..t {
                let w = prow[q];
                if w == 0.0 {
                    continue; // exact zeros contribute nothing; skipping keeps
                              // excluded K/V rows out of the arithmetic entirely
                }
                let vrow = tokens.v_row(head, q);
                for c in 0..d {
                    out[out_off + c] += w * vrow[c];
                }
            }
        }
    }
    Tensor::new(vec![h, t, d], out)
}
