//! Periodic discrete signals: DFT, circular convolution, cyclic translation,
//! and norms, for 1-D length-`N` and square 2-D `N`x`N` data.

pub mod io;

use std::cell::RefCell;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Shape of a signal: 1-D of length `n`, or square 2-D `n`x`n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    OneD(usize),
    TwoD(usize),
}

impl Shape {
    /// Per-dimension length `N`.
    pub fn len(&self) -> usize {
        match *self {
            Shape::OneD(n) | Shape::TwoD(n) => n,
        }
    }

    /// Total number of stored samples (`N` or `N^2`).
    pub fn elems(&self) -> usize {
        match *self {
            Shape::OneD(n) => n,
            Shape::TwoD(n) => n * n,
        }
    }

    pub fn dims(&self) -> u8 {
        match *self {
            Shape::OneD(_) => 1,
            Shape::TwoD(_) => 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(*self, Shape::OneD(0) | Shape::TwoD(0))
    }

    pub(crate) fn from_dims(n: usize, dims: u8) -> Result<Shape> {
        match dims {
            1 => Ok(Shape::OneD(n)),
            2 => Ok(Shape::TwoD(n)),
            d => Err(Error::Format(format!("dims must be 1 or 2, got {d}"))),
        }
    }
}

/// The three norms used throughout the operator bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub sup: f64,
}

/// An N-periodic complex-valued signal, stored over one period
/// (row-major for 2-D). Indexing is cyclic.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    shape: Shape,
    values: Vec<Complex64>,
}

impl Signal {
    pub fn new(shape: Shape, values: Vec<Complex64>) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::InvalidParameter("signal length must be >= 1".into()));
        }
        if values.len() != shape.elems() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for shape {:?}",
                values.len(),
                shape
            )));
        }
        Ok(Signal { shape, values })
    }

    pub fn new_1d(values: Vec<Complex64>) -> Result<Self> {
        let n = values.len();
        Signal::new(Shape::OneD(n), values)
    }

    pub fn new_2d(n: usize, values: Vec<Complex64>) -> Result<Self> {
        Signal::new(Shape::TwoD(n), values)
    }

    pub fn from_real_1d(values: &[f64]) -> Self {
        Signal {
            shape: Shape::OneD(values.len()),
            values: values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn zeros(shape: Shape) -> Self {
        Signal {
            shape,
            values: vec![Complex64::new(0.0, 0.0); shape.elems()],
        }
    }

    /// The delta signal: 1 at the origin, 0 elsewhere.
    pub fn delta(shape: Shape) -> Self {
        let mut s = Signal::zeros(shape);
        s.values[0] = Complex64::new(1.0, 0.0);
        s
    }

    /// `e^{2 pi i k n / N}` at every sample; for 2-D, `bin` is the row-major
    /// flat index of the 2-D frequency pair. The DFT of this signal is
    /// supported on exactly that bin.
    pub fn complex_exponential(shape: Shape, bin: usize) -> Self {
        let n = shape.len();
        let mut values = Vec::with_capacity(shape.elems());
        match shape {
            Shape::OneD(_) => {
                for t in 0..n {
                    let phase = 2.0 * std::f64::consts::PI * (bin * t % n) as f64 / n as f64;
                    values.push(Complex64::from_polar(1.0, phase));
                }
            }
            Shape::TwoD(_) => {
                let (kr, kc) = (bin / n, bin % n);
                for r in 0..n {
                    for c in 0..n {
                        let cycles = (kr * r + kc * c) % n;
                        let phase = 2.0 * std::f64::consts::PI * cycles as f64 / n as f64;
                        values.push(Complex64::from_polar(1.0, phase));
                    }
                }
            }
        }
        Signal { shape, values }
    }

    /// Component-wise complex standard normal draw.
    pub fn random_normal<R: Rng + ?Sized>(shape: Shape, rng: &mut R) -> Self {
        let values = (0..shape.elems())
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Signal { shape, values }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shape.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Cyclic 1-D access: `self[n mod N]` (valid for 2-D via flat index only
    /// through `values()`; use `at2` for 2-D).
    pub fn at(&self, n: i64) -> Complex64 {
        let len = self.shape.elems() as i64;
        self.values[(n.rem_euclid(len)) as usize]
    }

    /// Cyclic 2-D access by (row, col).
    pub fn at2(&self, r: i64, c: i64) -> Complex64 {
        let n = self.shape.len() as i64;
        self.values[(r.rem_euclid(n) * n + c.rem_euclid(n)) as usize]
    }

    /// Discrete Fourier transform, unnormalized:
    /// `F[k] = sum_n f[n] e^{-2 pi i k n / N}` (per axis in 2-D).
    pub fn dft(&self) -> Signal {
        let mut values = self.values.clone();
        match self.shape {
            Shape::OneD(n) => fft_pass(&mut values, n, false),
            Shape::TwoD(n) => fft2(&mut values, n, false),
        }
        Signal { shape: self.shape, values }
    }

    /// Inverse DFT with the `1/N` (or `1/N^2`) normalization, so
    /// `idft(dft(f)) == f`.
    pub fn idft(&self) -> Signal {
        let mut values = self.values.clone();
        match self.shape {
            Shape::OneD(n) => fft_pass(&mut values, n, true),
            Shape::TwoD(n) => fft2(&mut values, n, true),
        }
        let scale = 1.0 / self.shape.elems() as f64;
        for v in &mut values {
            *v *= scale;
        }
        Signal { shape: self.shape, values }
    }

    /// Direct-summation DFT. Quadratic; kept as the independent route the
    /// fast transform is checked against, and as a fallback that cannot
    /// depend on the factorization of `N`.
    pub fn dft_direct(&self) -> Signal {
        match self.shape {
            Shape::OneD(n) => {
                let values = (0..n).map(|k| direct_bin(&self.values, k, n)).collect();
                Signal { shape: self.shape, values }
            }
            Shape::TwoD(n) => {
                // Row transform then column transform, each by direct summation.
                let mut rows: Vec<Complex64> = Vec::with_capacity(n * n);
                for r in 0..n {
                    let row = &self.values[r * n..(r + 1) * n];
                    for k in 0..n {
                        rows.push(direct_bin(row, k, n));
                    }
                }
                let mut out = vec![Complex64::new(0.0, 0.0); n * n];
                for c in 0..n {
                    let col: Vec<Complex64> = (0..n).map(|r| rows[r * n + c]).collect();
                    for k in 0..n {
                        out[k * n + c] = direct_bin(&col, k, n);
                    }
                }
                Signal { shape: self.shape, values: out }
            }
        }
    }

    /// Circular convolution via pointwise product of spectra.
    pub fn circ_conv(&self, g: &Signal) -> Result<Signal> {
        self.check_same_shape(g)?;
        Ok(self.conv_with_spectrum(&g.dft()))
    }

    /// Circular convolution against a precomputed spectrum of the filter.
    /// One forward transform of `self`, a pointwise product, one inverse.
    pub fn conv_with_spectrum(&self, g_hat: &Signal) -> Signal {
        debug_assert_eq!(self.shape, g_hat.shape);
        let mut spec = self.dft();
        for (a, b) in spec.values.iter_mut().zip(g_hat.values.iter()) {
            *a *= b;
        }
        spec.idft()
    }

    /// Circular convolution by direct summation. The hand-checkable oracle
    /// for the transform route; quadratic per dimension.
    pub fn circ_conv_direct(&self, g: &Signal) -> Result<Signal> {
        self.check_same_shape(g)?;
        let out = match self.shape {
            Shape::OneD(n) => {
                let mut out = vec![Complex64::new(0.0, 0.0); n];
                for (no, o) in out.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..n {
                        acc += self.values[k] * g.at(no as i64 - k as i64);
                    }
                    *o = acc;
                }
                out
            }
            Shape::TwoD(n) => {
                let mut out = vec![Complex64::new(0.0, 0.0); n * n];
                for ro in 0..n {
                    for co in 0..n {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for r in 0..n {
                            for c in 0..n {
                                acc += self.values[r * n + c]
                                    * g.at2(ro as i64 - r as i64, co as i64 - c as i64);
                            }
                        }
                        out[ro * n + co] = acc;
                    }
                }
                out
            }
        };
        Ok(Signal { shape: self.shape, values: out })
    }

    /// 2-D circular convolution with a separable filter, computed as a
    /// row pass with `row_filter` followed by a column pass with
    /// `col_filter`. Agrees with `circ_conv` against the outer-product atom.
    pub fn circ_conv_separable(&self, col_filter: &[Complex64], row_filter: &[Complex64]) -> Result<Signal> {
        let n = match self.shape {
            Shape::TwoD(n) => n,
            Shape::OneD(_) => {
                return Err(Error::ShapeMismatch("separable convolution needs a 2-D signal".into()))
            }
        };
        if col_filter.len() != n || row_filter.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "filter lengths {}x{} against 2-D signal of side {n}",
                col_filter.len(),
                row_filter.len()
            )));
        }
        let mut row_hat = row_filter.to_vec();
        fft_pass(&mut row_hat, n, false);
        let mut col_hat = col_filter.to_vec();
        fft_pass(&mut col_hat, n, false);

        let mut work = self.values.clone();
        for r in 0..n {
            let row = &mut work[r * n..(r + 1) * n];
            conv_lane(row, &row_hat, n);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                col[r] = work[r * n + c];
            }
            conv_lane(&mut col, &col_hat, n);
            for r in 0..n {
                work[r * n + c] = col[r];
            }
        }
        Ok(Signal { shape: self.shape, values: work })
    }

    /// Cyclic translation `(T_m f)[n] = f[n - m]`; for 2-D, both axes shift
    /// by `m`.
    pub fn translate(&self, m: i64) -> Signal {
        let out = match self.shape {
            Shape::OneD(n) => (0..n).map(|k| self.at(k as i64 - m)).collect(),
            Shape::TwoD(n) => {
                let mut out = Vec::with_capacity(n * n);
                for r in 0..n {
                    for c in 0..n {
                        out.push(self.at2(r as i64 - m, c as i64 - m));
                    }
                }
                out
            }
        };
        Signal { shape: self.shape, values: out }
    }

    /// l1, l2, and sup norms over one period.
    pub fn norms(&self) -> Norms {
        let mut l1 = 0.0;
        let mut sq = 0.0;
        let mut sup: f64 = 0.0;
        for v in &self.values {
            let a = v.norm();
            l1 += a;
            sq += v.norm_sqr();
            sup = sup.max(a);
        }
        Norms { l1, l2: sq.sqrt(), sup }
    }

    pub fn l2(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn scale(&self, c: Complex64) -> Signal {
        Signal {
            shape: self.shape,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Signal) -> Result<Signal> {
        self.check_same_shape(other)?;
        Ok(Signal {
            shape: self.shape,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Signal) -> Result<Signal> {
        self.check_same_shape(other)?;
        Ok(Signal {
            shape: self.shape,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Largest componentwise distance; the workhorse of exactness tests.
    pub fn max_abs_diff(&self, other: &Signal) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_same_shape(&self, other: &Signal) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(())
    }
}

fn direct_bin(values: &[Complex64], k: usize, n: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (t, v) in values.iter().enumerate() {
        let phase = -2.0 * std::f64::consts::PI * ((k * t) % n) as f64 / n as f64;
        acc += v * Complex64::from_polar(1.0, phase);
    }
    acc
}

// In-place 1-D convolution of one lane against a precomputed filter spectrum.
fn conv_lane(lane: &mut [Complex64], filter_hat: &[Complex64], n: usize) {
    fft_pass(lane, n, false);
    for (a, b) in lane.iter_mut().zip(filter_hat) {
        *a *= b;
    }
    fft_pass(lane, n, true);
    let scale = 1.0 / n as f64;
    for a in lane.iter_mut() {
        *a *= scale;
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized transform of contiguous length-`n` lanes.
pub(crate) fn fft_pass(values: &mut [Complex64], n: usize, inverse: bool) {
    debug_assert_eq!(values.len() % n, 0);
    PLANNER.with(|p| {
        let fft = if inverse {
            p.borrow_mut().plan_fft_inverse(n)
        } else {
            p.borrow_mut().plan_fft_forward(n)
        };
        for lane in values.chunks_mut(n) {
            fft.process(lane);
        }
    });
}

/// Unnormalized 2-D transform of a row-major `n`x`n` buffer.
pub(crate) fn fft2(values: &mut [Complex64], n: usize, inverse: bool) {
    fft_pass(values, n, inverse);
    transpose(values, n);
    fft_pass(values, n, inverse);
    transpose(values, n);
}

fn transpose(values: &mut [Complex64], n: usize) {
    for r in 0..n {
        for c in (r + 1)..n {
            values.swap(r * n + c, c * n + r);
        }
    }
}
