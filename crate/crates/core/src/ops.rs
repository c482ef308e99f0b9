//! Pointwise non-linearities and pooling operators, each carrying its
//! Lipschitz constant and whether it fixes zero.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{Shape, Signal};

/// Pointwise Lipschitz non-linearity acting on complex samples. The tanh,
/// ReLU, and sigmoid variants apply to real and imaginary parts
/// independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonLinearity {
    Modulus,
    Relu,
    Tanh,
    LogisticSigmoid,
}

impl NonLinearity {
    pub const ALL: [NonLinearity; 4] = [
        NonLinearity::Modulus,
        NonLinearity::Relu,
        NonLinearity::Tanh,
        NonLinearity::LogisticSigmoid,
    ];

    /// Declared Lipschitz constant `L`. These are the constants the
    /// admissibility condition works with; for ReLU and tanh the split
    /// real/imaginary form is tighter, so tests treat `L` as an upper bound.
    pub fn lipschitz(self) -> f64 {
        match self {
            NonLinearity::Modulus => 1.0,
            NonLinearity::Relu => 2.0,
            NonLinearity::Tanh => 2.0,
            NonLinearity::LogisticSigmoid => 0.5,
        }
    }

    /// Whether `rho(0) = 0`, the hypothesis of the energy bounds. The
    /// logistic sigmoid maps 0 to 0.5 + 0.5i.
    pub fn maps_zero_to_zero(self) -> bool {
        !matches!(self, NonLinearity::LogisticSigmoid)
    }

    pub fn apply_scalar(self, z: Complex64) -> Complex64 {
        match self {
            NonLinearity::Modulus => Complex64::new(z.norm(), 0.0),
            NonLinearity::Relu => Complex64::new(z.re.max(0.0), z.im.max(0.0)),
            NonLinearity::Tanh => Complex64::new(z.re.tanh(), z.im.tanh()),
            NonLinearity::LogisticSigmoid => Complex64::new(sigmoid(z.re), sigmoid(z.im)),
        }
    }

    pub fn apply(self, f: &Signal) -> Signal {
        let mut out = f.clone();
        for v in out.values_mut() {
            *v = self.apply_scalar(*v);
        }
        out
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolingKind {
    Subsample,
    Average,
    Max,
    Identity,
}

/// Pooling operator `P: H_N -> H_{N/S}`. In 2-D it acts on `S`x`S` blocks,
/// so one application divides the element count by `S^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolingOp {
    kind: PoolingKind,
    factor: usize,
    weights: Option<Vec<f64>>,
}

impl PoolingOp {
    pub fn subsample(factor: usize) -> Result<Self> {
        Self::new(PoolingKind::Subsample, factor, None)
    }

    pub fn max(factor: usize) -> Result<Self> {
        Self::new(PoolingKind::Max, factor, None)
    }

    pub fn average_uniform(factor: usize) -> Result<Self> {
        let w = vec![1.0 / factor as f64; factor];
        Self::new(PoolingKind::Average, factor, Some(w))
    }

    pub fn average(weights: Vec<f64>) -> Result<Self> {
        let factor = weights.len();
        Self::new(PoolingKind::Average, factor, Some(weights))
    }

    pub fn identity() -> Self {
        PoolingOp { kind: PoolingKind::Identity, factor: 1, weights: None }
    }

    pub fn new(kind: PoolingKind, factor: usize, weights: Option<Vec<f64>>) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidParameter("pooling factor must be >= 1".into()));
        }
        if kind == PoolingKind::Identity && factor != 1 {
            return Err(Error::InvalidParameter("identity pooling has factor 1".into()));
        }
        match (kind, &weights) {
            (PoolingKind::Average, Some(w)) => {
                if w.len() != factor {
                    return Err(Error::InvalidParameter(format!(
                        "average pooling needs exactly {factor} weights, got {}",
                        w.len()
                    )));
                }
                if w.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidParameter("pooling weights must be finite".into()));
                }
            }
            (PoolingKind::Average, None) => {
                return Self::average_uniform(factor);
            }
            (_, Some(_)) => {
                return Err(Error::InvalidParameter(
                    "weights are only meaningful for average pooling".into(),
                ));
            }
            _ => {}
        }
        Ok(PoolingOp { kind, factor, weights })
    }

    pub fn kind(&self) -> PoolingKind {
        self.kind
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Lipschitz constant `R` for the given dimensionality. Sub-sampling,
    /// max, and identity have `R = 1` in any dimension. A 1-D average with
    /// weights `a_k` has `R = S^{1/2} max|a_k|`; the 2-D block average is
    /// the row pass composed with the column pass, so the constant squares.
    pub fn lipschitz(&self, dims: u8) -> f64 {
        match self.kind {
            PoolingKind::Subsample | PoolingKind::Max | PoolingKind::Identity => 1.0,
            PoolingKind::Average => {
                let alpha = self
                    .weights
                    .as_ref()
                    .map(|w| w.iter().fold(0.0f64, |m, x| m.max(x.abs())))
                    .unwrap_or(1.0 / self.factor as f64);
                let r1 = (self.factor as f64).sqrt() * alpha;
                if dims == 2 {
                    r1 * r1
                } else {
                    r1
                }
            }
        }
    }

    /// All four kinds satisfy `P(0) = 0`.
    pub fn maps_zero_to_zero(&self) -> bool {
        true
    }

    pub fn output_len(&self, n: usize) -> Result<usize> {
        if !n.is_multiple_of(self.factor) {
            return Err(Error::NotDivisible { n, s: self.factor });
        }
        Ok(n / self.factor)
    }

    pub fn apply(&self, f: &Signal) -> Result<Signal> {
        let n = f.len();
        let m = self.output_len(n)?;
        // Only sub-sampling and the identity reduce to "no pooling" at
        // S = 1; a factor-1 max still takes the modulus, a factor-1
        // weighted average still scales.
        if matches!(self.kind, PoolingKind::Identity | PoolingKind::Subsample) && self.factor == 1 {
            return Ok(f.clone());
        }
        let s = self.factor;
        let out = match f.shape() {
            Shape::OneD(_) => {
                let v = f.values();
                let mut out = Vec::with_capacity(m);
                for b in 0..m {
                    out.push(self.pool_block(v[b * s..(b + 1) * s].iter().copied(), None));
                }
                Signal::new(Shape::OneD(m), out)?
            }
            Shape::TwoD(_) => {
                let v = f.values();
                let mut out = Vec::with_capacity(m * m);
                for br in 0..m {
                    for bc in 0..m {
                        let block = (0..s).flat_map(|dr| {
                            (0..s).map(move |dc| v[(br * s + dr) * n + (bc * s + dc)])
                        });
                        out.push(self.pool_block(block, Some(s)));
                    }
                }
                Signal::new(Shape::TwoD(m), out)?
            }
        };
        Ok(out)
    }

    // `side` is Some(S) for a 2-D S x S block walked row-major.
    fn pool_block<I: Iterator<Item = Complex64>>(&self, block: I, side: Option<usize>) -> Complex64 {
        match self.kind {
            PoolingKind::Identity | PoolingKind::Subsample => block.into_iter().next().unwrap(),
            PoolingKind::Max => {
                let m = block.map(|z| z.norm()).fold(0.0f64, f64::max);
                Complex64::new(m, 0.0)
            }
            PoolingKind::Average => {
                let w = self.weights.as_ref().expect("average weights validated");
                let mut acc = Complex64::new(0.0, 0.0);
                match side {
                    None => {
                        for (k, z) in block.enumerate() {
                            acc += z * w[k];
                        }
                    }
                    Some(s) => {
                        for (i, z) in block.enumerate() {
                            acc += z * (w[i / s] * w[i % s]);
                        }
                    }
                }
                acc
            }
        }
    }
}

/// One side-by-side evaluation of the pooling Lipschitz inequality
/// `|Pf - Ph|_2 <= R |f - h|_2`.
pub fn verify_pool_lipschitz(p: &PoolingOp, f: &Signal, h: &Signal) -> Result<(f64, f64, bool)> {
    f.check_same_shape(h)?;
    let lhs = p.apply(f)?.sub(&p.apply(h)?)?.l2();
    let rhs = p.lipschitz(f.shape().dims()) * f.sub(h)?.l2();
    Ok((lhs, rhs, lhs <= rhs + 1e-12))
}
