//! Undecimated wavelet filters built by zero-insertion upsampling of the
//! base analysis pair, so every scale becomes a plain full-length circular
//! convolution filter. 2-D banks are separable tensor products sensitive to
//! the horizontal, vertical, and diagonal directions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{Shape, Signal};

use super::{Atom, AtomLabel, Direction, FilterBank};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveletFamily {
    Haar,
    Db2,
    #[serde(rename = "rbio2_2", alias = "rbio2.2")]
    Rbio22,
}

impl WaveletFamily {
    pub const ALL: [WaveletFamily; 3] =
        [WaveletFamily::Haar, WaveletFamily::Db2, WaveletFamily::Rbio22];

    pub fn name(&self) -> &'static str {
        match self {
            WaveletFamily::Haar => "haar",
            WaveletFamily::Db2 => "db2",
            WaveletFamily::Rbio22 => "rbio2.2",
        }
    }

    /// Analysis (low-pass, high-pass) tap pair, standard published
    /// coefficients with the sqrt(2) normalization.
    pub fn decomposition_pair(&self) -> (Vec<f64>, Vec<f64>) {
        let s2 = std::f64::consts::SQRT_2;
        let half_s2 = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            WaveletFamily::Haar => {
                let h = vec![half_s2, half_s2];
                let g = vec![half_s2, -half_s2];
                (h, g)
            }
            WaveletFamily::Db2 => {
                let s3 = 3.0f64.sqrt();
                let h = vec![
                    (1.0 + s3) / (4.0 * s2),
                    (3.0 + s3) / (4.0 * s2),
                    (3.0 - s3) / (4.0 * s2),
                    (1.0 - s3) / (4.0 * s2),
                ];
                // Alternating flip of the low-pass.
                let g = vec![h[3], -h[2], h[1], -h[0]];
                (h, g)
            }
            WaveletFamily::Rbio22 => {
                // Analysis side of the reverse biorthogonal 2.2 pair: the
                // 3-tap spline low-pass with the alternating-sign flip of
                // the dual 5-tap low-pass as band-pass.
                let h = vec![s2 / 4.0, s2 / 2.0, s2 / 4.0];
                let g = vec![
                    -s2 / 8.0,
                    -s2 / 4.0,
                    3.0 * s2 / 4.0,
                    -s2 / 4.0,
                    -s2 / 8.0,
                ];
                (h, g)
            }
        }
    }
}

impl std::str::FromStr for WaveletFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar" => Ok(WaveletFamily::Haar),
            "db2" => Ok(WaveletFamily::Db2),
            "rbio2.2" | "rbio2_2" => Ok(WaveletFamily::Rbio22),
            other => Err(Error::Config(format!("unknown wavelet family {other:?}"))),
        }
    }
}

/// Equivalent full-length filters of the undecimated cascade: band-pass for
/// scales `1..=j_scales` and the low-pass approximation at every scale.
struct Cascade {
    bands: Vec<Vec<f64>>,
    approx: Vec<Vec<f64>>,
}

fn cascade(family: WaveletFamily, j_scales: u32) -> Cascade {
    let (h, g) = family.decomposition_pair();
    let mut approx_taps = vec![1.0];
    let mut bands = Vec::new();
    let mut approx = Vec::new();
    for j in 1..=j_scales {
        let m = 1usize << (j - 1);
        bands.push(lin_conv(&approx_taps, &upsample(&g, m)));
        approx_taps = lin_conv(&approx_taps, &upsample(&h, m));
        approx.push(approx_taps.clone());
    }
    Cascade { bands, approx }
}

// Insert m-1 zeros between consecutive taps.
fn upsample(taps: &[f64], m: usize) -> Vec<f64> {
    if m == 1 {
        return taps.to_vec();
    }
    let mut out = vec![0.0; m * (taps.len() - 1) + 1];
    for (k, &t) in taps.iter().enumerate() {
        out[m * k] = t;
    }
    out
}

fn lin_conv(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn embed_1d(taps: &[f64], n: usize) -> Signal {
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for (k, &t) in taps.iter().enumerate() {
        values[k].re = t;
    }
    Signal::new(Shape::OneD(n), values).expect("length checked by caller")
}

fn embed_2d(col: &[f64], row: &[f64], n: usize) -> Signal {
    let mut values = vec![Complex64::new(0.0, 0.0); n * n];
    for (r, &cv) in col.iter().enumerate() {
        for (c, &rv) in row.iter().enumerate() {
            values[r * n + c].re = cv * rv;
        }
    }
    Signal::new(Shape::TwoD(n), values).expect("length checked by caller")
}

/// Builds the shipped wavelet bank: `J` band-pass atoms in 1-D (or `3J`
/// directional atoms in 2-D) plus the scale-`J` low-pass output atom.
pub(super) fn wavelet_bank(
    family: WaveletFamily,
    j_scales: u32,
    n: usize,
    dims: u8,
) -> Result<FilterBank> {
    if j_scales == 0 {
        return Err(Error::InvalidParameter("scale count J must be >= 1".into()));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("signal length must be >= 2".into()));
    }
    let shape = Shape::from_dims(n, dims)
        .map_err(|_| Error::InvalidParameter(format!("dims must be 1 or 2, got {dims}")))?;

    let casc = cascade(family, j_scales);
    let support = casc
        .bands
        .iter()
        .chain(casc.approx.iter())
        .map(|f| f.len())
        .max()
        .unwrap();
    if support > n {
        return Err(Error::FilterSupport { support, n });
    }

    let chi_taps = casc.approx.last().unwrap();
    let (atoms, chi) = match shape {
        Shape::OneD(_) => {
            let atoms = casc
                .bands
                .iter()
                .enumerate()
                .map(|(idx, band)| Atom {
                    label: AtomLabel::Wavelet {
                        scale: idx as u32 + 1,
                        direction: Direction::None,
                    },
                    filter: embed_1d(band, n),
                })
                .collect();
            (atoms, embed_1d(chi_taps, n))
        }
        Shape::TwoD(_) => {
            let mut atoms = Vec::with_capacity(3 * j_scales as usize);
            for j in 1..=j_scales as usize {
                let d = &casc.bands[j - 1];
                let a = &casc.approx[j - 1];
                // High-pass across rows picks out horizontal edges.
                for (direction, col, row) in [
                    (Direction::Horizontal, d, a),
                    (Direction::Vertical, a, d),
                    (Direction::Diagonal, d, d),
                ] {
                    atoms.push(Atom {
                        label: AtomLabel::Wavelet { scale: j as u32, direction },
                        filter: embed_2d(col, row, n),
                    });
                }
            }
            (atoms, embed_2d(chi_taps, chi_taps, n))
        }
    };
    FilterBank::new(atoms, Some(chi))
}
