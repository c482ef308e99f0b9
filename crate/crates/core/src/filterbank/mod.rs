//! Convolutional sets with computable frame bounds.
//!
//! A bank is a finite atom collection `{g_lambda}` (optionally augmented by
//! an output-generating atom chi) over a fixed signal shape. Its tightest
//! Bessel bound is `B* = max_k sum_lambda |g_lambda_hat[k]|^2`; the minimum
//! of the same spectrum sum is the frame lower bound `A`, and `A > 0`
//! certifies that translated atoms span the signal space.

mod wavelet;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{Shape, Signal};

pub use wavelet::WaveletFamily;

/// Direction tag of a tensorized wavelet atom; `None` for 1-D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    None,
    Horizontal,
    Vertical,
    Diagonal,
}

impl Direction {
    fn short(&self) -> &'static str {
        match self {
            Direction::None => "",
            Direction::Horizontal => "h",
            Direction::Vertical => "v",
            Direction::Diagonal => "d",
        }
    }
}

/// Structured index of an atom: wavelet (scale, direction) for the shipped
/// banks, or an opaque tag for custom and random atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomLabel {
    Wavelet { scale: u32, direction: Direction },
    Tag(String),
}

impl AtomLabel {
    /// Wavelet scale when the label carries one; drives path pruning.
    pub fn scale(&self) -> Option<u32> {
        match self {
            AtomLabel::Wavelet { scale, .. } => Some(*scale),
            AtomLabel::Tag(_) => None,
        }
    }
}

impl std::fmt::Display for AtomLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AtomLabel::Wavelet { scale, direction } => {
                write!(f, "j{scale}{}", direction.short())
            }
            AtomLabel::Tag(t) => write!(f, "tag:{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub label: AtomLabel,
    pub filter: Signal,
}

/// Result of evaluating the Bessel inequality on one signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// A convolutional set with cached frame bounds. Immutable after
/// construction; the cached spectra make repeated propagation cheap and safe
/// to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    atoms: Vec<Atom>,
    output_atom: Option<Signal>,
    shape: Shape,
    spectra: Vec<Signal>,
    output_spectrum: Option<Signal>,
    frame_lower: f64,
    frame_upper: f64,
}

impl FilterBank {
    /// Builds a bank from explicit atoms, plus an optional output atom that
    /// participates in the frame-bound accounting.
    pub fn new(atoms: Vec<Atom>, output_atom: Option<Signal>) -> Result<Self> {
        let first = atoms
            .first()
            .ok_or_else(|| Error::InvalidParameter("a filter bank needs at least one atom".into()))?;
        let shape = first.filter.shape();
        for a in &atoms {
            if a.filter.shape() != shape {
                return Err(Error::ShapeMismatch(format!(
                    "atom {} has shape {:?}, bank has {:?}",
                    a.label,
                    a.filter.shape(),
                    shape
                )));
            }
        }
        if let Some(chi) = &output_atom {
            if chi.shape() != shape {
                return Err(Error::ShapeMismatch(format!(
                    "output atom has shape {:?}, bank has {:?}",
                    chi.shape(),
                    shape
                )));
            }
        }
        let spectra: Vec<Signal> = atoms.iter().map(|a| a.filter.dft()).collect();
        let output_spectrum = output_atom.as_ref().map(|chi| chi.dft());
        let mut bank = FilterBank {
            atoms,
            output_atom,
            shape,
            spectra,
            output_spectrum,
            frame_lower: 0.0,
            frame_upper: 0.0,
        };
        let spectrum = bank.frame_spectrum();
        bank.frame_lower = spectrum.iter().copied().fold(f64::INFINITY, f64::min);
        bank.frame_upper = spectrum.iter().copied().fold(0.0, f64::max);
        Ok(bank)
    }

    /// Shipped undecimated wavelet bank (`J` scales, 1-D or tensorized 2-D)
    /// with the scale-`J` low-pass as output atom.
    pub fn wavelet(family: WaveletFamily, scales: u32, n: usize, dims: u8) -> Result<Self> {
        wavelet::wavelet_bank(family, scales, n, dims)
    }

    /// Gaussian random atoms, for property tests and unstructured banks.
    pub fn random<R: Rng + ?Sized>(count: usize, shape: Shape, rng: &mut R) -> Result<Self> {
        let atoms = (0..count)
            .map(|k| Atom {
                label: AtomLabel::Tag(format!("rnd{k}")),
                filter: Signal::random_normal(shape, rng),
            })
            .collect();
        FilterBank::new(atoms, None)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn output_atom(&self) -> Option<&Signal> {
        self.output_atom.as_ref()
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn atom_by_label(&self, label: &AtomLabel) -> Result<usize> {
        self.atoms
            .iter()
            .position(|a| &a.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub(crate) fn spectrum_of(&self, idx: usize) -> &Signal {
        &self.spectra[idx]
    }

    /// Replaces the output atom and recomputes the cached bounds.
    pub fn with_output_atom(self, output_atom: Option<Signal>) -> Result<Self> {
        FilterBank::new(self.atoms, output_atom)
    }

    /// Per-bin spectrum sum `sum_lambda |g_lambda_hat[k]|^2` (output atom
    /// included when present), row-major over bins in 2-D. The scan behind
    /// both frame bounds and the tightness witness.
    pub fn frame_spectrum(&self) -> Vec<f64> {
        let elems = self.shape.elems();
        let mut sum = vec![0.0; elems];
        for spec in self
            .spectra
            .iter()
            .chain(self.output_spectrum.iter())
        {
            for (s, v) in sum.iter_mut().zip(spec.values()) {
                *s += v.norm_sqr();
            }
        }
        sum
    }

    /// The tightest Bessel bound `B*`.
    pub fn bessel_bound(&self) -> f64 {
        self.frame_upper
    }

    /// Frame bounds `(A, B)`. `A > 0` certifies completeness; `A = 0` is
    /// legal and surfaced as a warning by the CLI.
    pub fn frame_bounds(&self) -> (f64, f64) {
        (self.frame_lower, self.frame_upper)
    }

    /// Frequency bin attaining `B*`.
    pub fn maximizing_bin(&self) -> usize {
        let spectrum = self.frame_spectrum();
        let mut best = 0;
        for (k, &v) in spectrum.iter().enumerate() {
            if v > spectrum[best] {
                best = k;
            }
        }
        best
    }

    /// Evaluates `sum_lambda |f * g_lambda|_2^2 <= B* |f|_2^2` by actually
    /// convolving, with relative slack 1e-9.
    pub fn verify_bessel_inequality(&self, f: &Signal) -> Result<BesselCheck> {
        if f.shape() != self.shape {
            return Err(Error::ShapeMismatch(format!(
                "signal {:?} against bank {:?}",
                f.shape(),
                self.shape
            )));
        }
        let f_hat = f.dft();
        let mut lhs = 0.0;
        for spec in self.spectra.iter().chain(self.output_spectrum.iter()) {
            let mut prod = f_hat.clone();
            for (a, b) in prod.values_mut().iter_mut().zip(spec.values()) {
                *a *= b;
            }
            lhs += prod.idft().energy();
        }
        let rhs = self.bessel_bound() * f.energy();
        Ok(BesselCheck { lhs, rhs, holds: lhs <= rhs + 1e-9 * rhs })
    }

    /// Rescales every atom (and the output atom) by `C^{-1/2}` with
    /// `C = B* max{1, R^2 L^2}`, so the scaled bank satisfies
    /// `B <= min{1, R^{-2} L^{-2}}`.
    pub fn normalized_for_admissibility(&self, l: f64, r: f64) -> Result<Self> {
        if l <= 0.0 || r <= 0.0 {
            return Err(Error::InvalidParameter(
                "Lipschitz constants must be positive".into(),
            ));
        }
        let b = self.bessel_bound();
        if b <= 0.0 {
            return Err(Error::InvalidParameter(
                "cannot normalize a bank with zero Bessel bound".into(),
            ));
        }
        let c = b * (r * r * l * l).max(1.0);
        let scale = Complex64::new(c.sqrt().recip(), 0.0);
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { label: a.label.clone(), filter: a.filter.scale(scale) })
            .collect();
        let chi = self.output_atom.as_ref().map(|x| x.scale(scale));
        FilterBank::new(atoms, chi)
    }
}

/// JSON form of a bank: the shipped wavelet families by name, or explicit
/// atom arrays for custom banks.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BankSpec {
    Wavelet {
        family: WaveletFamily,
        scales: u32,
        length: usize,
        dims: u8,
    },
    Custom {
        length: usize,
        dims: u8,
        atoms: Vec<AtomData>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        output_atom: Option<AtomData>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomData {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<AtomLabel>,
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<f64>,
}

impl AtomData {
    pub fn from_signal(label: Option<AtomLabel>, sig: &Signal) -> Self {
        AtomData {
            label,
            re: sig.values().iter().map(|v| v.re).collect(),
            im: sig.values().iter().map(|v| v.im).collect(),
        }
    }

    fn to_signal(&self, shape: Shape) -> Result<Signal> {
        if self.re.len() != shape.elems() {
            return Err(Error::Config(format!(
                "atom holds {} samples, bank shape needs {}",
                self.re.len(),
                shape.elems()
            )));
        }
        if !self.im.is_empty() && self.im.len() != self.re.len() {
            return Err(Error::Config("re/im arrays differ in length".into()));
        }
        let values = self
            .re
            .iter()
            .enumerate()
            .map(|(k, &re)| Complex64::new(re, self.im.get(k).copied().unwrap_or(0.0)))
            .collect();
        Signal::new(shape, values)
    }
}

impl BankSpec {
    pub fn build(&self) -> Result<FilterBank> {
        match self {
            BankSpec::Wavelet { family, scales, length, dims } => {
                FilterBank::wavelet(*family, *scales, *length, *dims)
            }
            BankSpec::Custom { length, dims, atoms, output_atom } => {
                let shape = Shape::from_dims(*length, *dims)
                    .map_err(|e| Error::Config(e.to_string()))?;
                let atoms = atoms
                    .iter()
                    .enumerate()
                    .map(|(k, a)| {
                        Ok(Atom {
                            label: a
                                .label
                                .clone()
                                .unwrap_or(AtomLabel::Tag(format!("a{k}"))),
                            filter: a.to_signal(shape)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let chi = output_atom
                    .as_ref()
                    .map(|a| a.to_signal(shape))
                    .transpose()?;
                FilterBank::new(atoms, chi)
            }
        }
    }
}
