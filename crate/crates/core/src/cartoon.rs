//! Sampled cartoon functions and warping fields.
//!
//! A cartoon is `c = c1 + 1_{[a,b]} c2` with Lipschitz pieces; sampling at
//! `n/N` (with the interval endpoints kept off the sampling grid) gives the
//! class whose deformation error obeys `|f - F_tau f|_2 <= 4 K N^{1/2}
//! |tau|_inf^{1/2}`. Pieces are kept symbolic, drawn from a closed primitive
//! family with analytically known Lipschitz constants and sup norms, so the
//! variation certificate is exact rather than estimated.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{Shape, Signal};

/// One closed-form term: constant, affine, or sinusoid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Primitive {
    Constant { value: Complex64 },
    Affine { slope: Complex64, intercept: Complex64 },
    Sinusoid { amplitude: Complex64, frequency: f64, phase: f64 },
}

impl Primitive {
    fn eval(&self, x: f64) -> Complex64 {
        match self {
            Primitive::Constant { value } => *value,
            Primitive::Affine { slope, intercept } => slope * x + intercept,
            Primitive::Sinusoid { amplitude, frequency, phase } => {
                amplitude * (frequency * x + phase).sin()
            }
        }
    }

    fn lipschitz(&self) -> f64 {
        match self {
            Primitive::Constant { .. } => 0.0,
            Primitive::Affine { slope, .. } => slope.norm(),
            Primitive::Sinusoid { amplitude, frequency, .. } => {
                amplitude.norm() * frequency.abs()
            }
        }
    }

    /// Exact supremum of `|term|` over `[lo, hi]`.
    fn sup_on(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Primitive::Constant { value } => value.norm(),
            // |slope x + intercept| is convex in x.
            Primitive::Affine { slope, intercept } => {
                (slope * lo + intercept).norm().max((slope * hi + intercept).norm())
            }
            Primitive::Sinusoid { amplitude, frequency, phase } => {
                let a = amplitude.norm();
                if *frequency == 0.0 {
                    return a * phase.sin().abs();
                }
                let (u, v) = {
                    let p = frequency * lo + phase;
                    let q = frequency * hi + phase;
                    (p.min(q), p.max(q))
                };
                // A peak of |sin| sits at pi/2 + k pi.
                let half_pi = std::f64::consts::FRAC_PI_2;
                let pi = std::f64::consts::PI;
                let k = ((u - half_pi) / pi).ceil();
                if half_pi + k * pi <= v {
                    a
                } else {
                    a * u.sin().abs().max(v.sin().abs())
                }
            }
        }
    }
}

/// Sum of primitives with summed (hence certified) Lipschitz and sup bounds.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ContinuousFn {
    pub terms: Vec<Primitive>,
}

impl ContinuousFn {
    pub fn zero() -> Self {
        ContinuousFn { terms: Vec::new() }
    }

    pub fn constant(value: Complex64) -> Self {
        ContinuousFn { terms: vec![Primitive::Constant { value }] }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn lipschitz(&self) -> f64 {
        self.terms.iter().map(Primitive::lipschitz).sum()
    }

    pub fn sup_on(&self, lo: f64, hi: f64) -> f64 {
        self.terms.iter().map(|t| t.sup_on(lo, hi)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `c = c1 + sum_l 1_{[a_l, b_l]} c2` with variation certificate `K`:
/// both pieces are `K`-Lipschitz and `|c2|` stays below `K` on `[-2, 2]`,
/// which covers every warped sample point since `|tau|_inf <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartoonSpec {
    c1: ContinuousFn,
    c2: ContinuousFn,
    intervals: Vec<(f64, f64)>,
    variation: f64,
}

impl CartoonSpec {
    pub fn new(
        c1: ContinuousFn,
        c2: ContinuousFn,
        intervals: Vec<(f64, f64)>,
        variation: f64,
    ) -> Result<Self> {
        if variation <= 0.0 {
            return Err(Error::InvalidParameter("variation K must be positive".into()));
        }
        if c1.lipschitz() > variation || c2.lipschitz() > variation {
            return Err(Error::InvalidParameter(format!(
                "piece Lipschitz constants ({}, {}) exceed K = {variation}",
                c1.lipschitz(),
                c2.lipschitz()
            )));
        }
        if c2.sup_on(-2.0, 2.0) > variation {
            return Err(Error::InvalidParameter(format!(
                "sup |c2| = {} exceeds K = {variation}",
                c2.sup_on(-2.0, 2.0)
            )));
        }
        let mut sorted = intervals.clone();
        sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
        for (a, b) in &sorted {
            if *a >= *b || *a < 0.0 || *b > 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "interval [{a}, {b}] is not a proper subinterval of [0, 1]"
                )));
            }
        }
        for w in sorted.windows(2) {
            if w[1].0 <= w[0].1 {
                return Err(Error::InvalidParameter("intervals must be disjoint".into()));
            }
        }
        Ok(CartoonSpec { c1, c2, intervals: sorted, variation })
    }

    pub fn variation(&self) -> f64 {
        self.variation
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn pieces(&self) -> (&ContinuousFn, &ContinuousFn) {
        (&self.c1, &self.c2)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let inside = self.intervals.iter().any(|&(a, b)| a <= x && x <= b);
        if inside {
            self.c1.eval(x) + self.c2.eval(x)
        } else {
            self.c1.eval(x)
        }
    }
}

/// A sampled cartoon `f[n] = c(n/N)` whose interval endpoints avoid the
/// sampling grid `{0, 1/N, ..., (N-1)/N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCartoon {
    spec: CartoonSpec,
    n: usize,
    signal: Signal,
}

impl SampledCartoon {
    pub fn spec(&self) -> &CartoonSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn signal(&self) -> &Signal {
        &self.signal
    }
}

fn on_grid(x: f64, n: usize) -> bool {
    if !(0.0..1.0).contains(&x) {
        return false;
    }
    let scaled = x * n as f64;
    (scaled - scaled.round()).abs() < 1e-9
}

/// Evaluates the cartoon at every grid point. Fails if an interval endpoint
/// sits on the grid; the class excludes those because a grid-aligned edge
/// makes the deformation error non-decaying (see `boundary_counterexample`).
pub fn sample_cartoon(spec: &CartoonSpec, n: usize) -> Result<SampledCartoon> {
    if n < 2 {
        return Err(Error::InvalidParameter("sample count must be >= 2".into()));
    }
    for &(a, b) in &spec.intervals {
        for endpoint in [a, b] {
            if on_grid(endpoint, n) {
                return Err(Error::EndpointOnGrid(endpoint));
            }
        }
    }
    let values = (0..n).map(|k| spec.eval(k as f64 / n as f64)).collect();
    Ok(SampledCartoon {
        spec: spec.clone(),
        n,
        signal: Signal::new(Shape::OneD(n), values)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TauKind {
    Constant { value: f64 },
    ClampedAffine { slope: f64, intercept: f64 },
    Sinusoid { amplitude: f64, frequency: f64, phase: f64 },
}

/// Warping field `tau: R -> [-1, 1]` with its exact supremum norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformationField {
    kind: TauKind,
    sup_norm: f64,
}

impl DeformationField {
    pub fn new(kind: TauKind) -> Result<Self> {
        let sup_norm = match &kind {
            TauKind::Constant { value } => value.abs(),
            TauKind::ClampedAffine { slope, intercept } => {
                if *slope == 0.0 {
                    intercept.abs().min(1.0)
                } else {
                    // A non-flat clamped affine saturates somewhere on R.
                    1.0
                }
            }
            TauKind::Sinusoid { amplitude, frequency, phase } => {
                if *frequency == 0.0 {
                    (amplitude * phase.sin()).abs()
                } else {
                    amplitude.abs()
                }
            }
        };
        if sup_norm > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "deformation field must map into [-1, 1]; sup is {sup_norm}"
            )));
        }
        Ok(DeformationField { kind, sup_norm })
    }

    pub fn constant(t: f64) -> Result<Self> {
        DeformationField::new(TauKind::Constant { value: t })
    }

    pub fn zero() -> Self {
        DeformationField { kind: TauKind::Constant { value: 0.0 }, sup_norm: 0.0 }
    }

    pub fn kind(&self) -> &TauKind {
        &self.kind
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            TauKind::Constant { value } => *value,
            TauKind::ClampedAffine { slope, intercept } => {
                (slope * x + intercept).clamp(-1.0, 1.0)
            }
            TauKind::Sinusoid { amplitude, frequency, phase } => {
                amplitude * (frequency * x + phase).sin()
            }
        }
    }
}

/// `(F_tau f)[n] = c(n/N - tau(n/N))`: re-evaluates the continuous cartoon
/// at the warped points.
pub fn deform(sc: &SampledCartoon, tau: &DeformationField) -> Signal {
    let n = sc.n;
    let values = (0..n)
        .map(|k| {
            let x = k as f64 / n as f64;
            sc.spec.eval(x - tau.eval(x))
        })
        .collect();
    Signal::new(Shape::OneD(n), values).expect("same length as the sampled cartoon")
}

/// The proven deformation-error bound `4 K N^{1/2} |tau|_inf^{1/2}` (the
/// indicator term scales with the edge count for multi-interval cartoons).
pub fn deformation_bound(sc: &SampledCartoon, tau: &DeformationField) -> f64 {
    let edges = sc.spec.intervals.len().max(1) as f64;
    let factor = 2.0 + 2.0 * edges;
    factor * sc.spec.variation * (sc.n as f64).sqrt() * tau.sup_norm.sqrt()
}

/// The sharper bound `C N^{1/2} |tau|_inf` available when there is no edge
/// (`c = c1` with Lipschitz constant `C`).
pub fn lipschitz_lemma_bound(sc: &SampledCartoon, tau: &DeformationField) -> Result<f64> {
    if !(sc.spec.intervals.is_empty() || sc.spec.c2.is_zero()) {
        return Err(Error::InvalidParameter(
            "the Lipschitz-part bound needs a cartoon without edges".into(),
        ));
    }
    Ok(sc.spec.c1.lipschitz() * (sc.n as f64).sqrt() * tau.sup_norm)
}

/// The pure-indicator bound `2 N^{1/2} |tau|_inf^{1/2}` for `c = 1_{[a,b]}`.
pub fn indicator_lemma_bound(sc: &SampledCartoon, tau: &DeformationField) -> Result<f64> {
    let unit = matches!(
        sc.spec.c2.terms.as_slice(),
        [Primitive::Constant { value }] if (value - Complex64::new(1.0, 0.0)).norm() == 0.0
    );
    if !(sc.spec.c1.is_zero() && unit && sc.spec.intervals.len() == 1) {
        return Err(Error::InvalidParameter(
            "the indicator bound needs c1 = 0, c2 = 1, one interval".into(),
        ));
    }
    Ok(2.0 * (sc.n as f64).sqrt() * tau.sup_norm.sqrt())
}

/// The on-grid edge that the class excludes: `c = 1_{[0, 2/N]}` warped by
/// `tau = 1/N`. Returns the sampled signal and its warped version; their
/// distance is `sqrt(2)` for every `N >= 4`, which does not decay with
/// `|tau|_inf = 1/N`.
pub fn boundary_counterexample(n: usize) -> (Signal, Signal) {
    assert!(n >= 4, "the construction needs at least 4 samples");
    // Membership of m/N in [0, 2/N] and of m/N - 1/N in it reduce to
    // integer window tests, so the sampling is exact for every N.
    let f: Vec<Complex64> = (0..n)
        .map(|m| Complex64::new(if m <= 2 { 1.0 } else { 0.0 }, 0.0))
        .collect();
    let warped: Vec<Complex64> = (0..n)
        .map(|m| Complex64::new(if (1..=3).contains(&m) { 1.0 } else { 0.0 }, 0.0))
        .collect();
    (
        Signal::new(Shape::OneD(n), f).unwrap(),
        Signal::new(Shape::OneD(n), warped).unwrap(),
    )
}

// Deterministic irrational-multiple nudge away from the sampling grid.
fn avoid_grid(mut x: f64, n: usize) -> f64 {
    let offset = (std::f64::consts::SQRT_2 - 1.0) / (2.0 * n as f64);
    let mut tries = 0;
    while on_grid(x, n) && tries < 4 {
        x += offset;
        tries += 1;
    }
    x
}

/// Random cartoon of variation `K` whose interval endpoints avoid the
/// `N`-point sampling grid.
pub fn random_spec<R: Rng + ?Sized>(k: f64, n: usize, rng: &mut R) -> CartoonSpec {
    let scale = |rng: &mut R| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));

    let mut c1 = ContinuousFn {
        terms: vec![
            Primitive::Affine { slope: scale(rng), intercept: scale(rng) },
            Primitive::Sinusoid {
                amplitude: scale(rng),
                frequency: rng.random_range(0.5..12.0),
                phase: rng.random_range(0.0..std::f64::consts::TAU),
            },
        ],
    };
    let lip1 = c1.lipschitz();
    if lip1 > 0.0 {
        let s = k * rng.random_range(0.2..1.0) / lip1;
        rescale(&mut c1, s);
    }

    let mut c2 = ContinuousFn {
        terms: vec![
            Primitive::Constant { value: scale(rng) },
            Primitive::Sinusoid {
                amplitude: scale(rng),
                frequency: rng.random_range(0.5..12.0),
                phase: rng.random_range(0.0..std::f64::consts::TAU),
            },
        ],
    };
    let cert2 = c2.lipschitz().max(c2.sup_on(-2.0, 2.0));
    if cert2 > 0.0 {
        let s = k * rng.random_range(0.2..1.0) / cert2;
        rescale(&mut c2, s);
    }

    let a = avoid_grid(rng.random_range(0.05..0.55), n);
    let b = avoid_grid(rng.random_range((a + 0.1)..0.95), n);
    CartoonSpec::new(c1, c2, vec![(a, b)], k).expect("generator keeps the certificates below K")
}

fn rescale(f: &mut ContinuousFn, s: f64) {
    for t in &mut f.terms {
        match t {
            Primitive::Constant { value } => *value *= s,
            Primitive::Affine { slope, intercept } => {
                *slope *= s;
                *intercept *= s;
            }
            Primitive::Sinusoid { amplitude, .. } => *amplitude *= s,
        }
    }
}

/// Random warping field with `|tau|_inf <= max_sup`.
pub fn random_field<R: Rng + ?Sized>(max_sup: f64, rng: &mut R) -> DeformationField {
    let amp = rng.random_range(0.0..max_sup.min(1.0));
    let kind = match rng.random_range(0..3u8) {
        0 => TauKind::Constant { value: if rng.random_bool(0.5) { amp } else { -amp } },
        1 => TauKind::Sinusoid {
            amplitude: amp,
            frequency: rng.random_range(0.5..20.0),
            phase: rng.random_range(0.0..std::f64::consts::TAU),
        },
        _ => TauKind::Sinusoid {
            amplitude: amp,
            frequency: rng.random_range(0.1..2.0),
            phase: rng.random_range(0.0..std::f64::consts::TAU),
        },
    };
    DeformationField::new(kind).expect("amplitude capped at 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::seeded_rng;

    fn unit_indicator(a: f64, b: f64) -> CartoonSpec {
        CartoonSpec::new(
            ContinuousFn::zero(),
            ContinuousFn::constant(Complex64::new(1.0, 0.0)),
            vec![(a, b)],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn indicator_sampling_counts_interior_points() {
        let eps = 0.003 + (2.0f64.sqrt() - 1.0) * 1e-4;
        let spec = unit_indicator(0.24 + eps, 0.74 + eps);
        let sc = sample_cartoon(&spec, 100).unwrap();
        let ones = sc
            .signal()
            .values()
            .iter()
            .filter(|v| v.re == 1.0)
            .count();
        assert_eq!(ones, 50);
    }

    #[test]
    fn affine_piece_evaluates_on_the_grid() {
        let spec = CartoonSpec::new(
            ContinuousFn {
                terms: vec![Primitive::Affine {
                    slope: Complex64::new(1.0, 0.0),
                    intercept: Complex64::new(0.0, 0.0),
                }],
            },
            ContinuousFn::zero(),
            vec![],
            1.0,
        )
        .unwrap();
        let sc = sample_cartoon(&spec, 4).unwrap();
        let expect = Signal::from_real_1d(&[0.0, 0.25, 0.5, 0.75]);
        assert!(sc.signal().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn grid_endpoint_is_rejected() {
        let spec = unit_indicator(0.25, 0.8 + 1e-3);
        assert!(matches!(sample_cartoon(&spec, 4), Err(Error::EndpointOnGrid(_))));
    }

    #[test]
    fn zero_warp_is_identity() {
        let mut rng = seeded_rng(31, 0);
        let spec = random_spec(1.0, 64, &mut rng);
        let sc = sample_cartoon(&spec, 64).unwrap();
        let warped = deform(&sc, &DeformationField::zero());
        assert_eq!(&warped, sc.signal());
    }

    #[test]
    fn constant_warp_of_affine_shifts_values() {
        let spec = CartoonSpec::new(
            ContinuousFn {
                terms: vec![Primitive::Affine {
                    slope: Complex64::new(1.0, 0.0),
                    intercept: Complex64::new(0.0, 0.0),
                }],
            },
            ContinuousFn::zero(),
            vec![],
            1.0,
        )
        .unwrap();
        let sc = sample_cartoon(&spec, 8).unwrap();
        let t = 0.3;
        let warped = deform(&sc, &DeformationField::constant(t).unwrap());
        for (w, f) in warped.values().iter().zip(sc.signal().values()) {
            assert!((w.re - (f.re - t)).abs() < 1e-15);
        }
    }

    #[test]
    fn bound_formula_arithmetic() {
        let mut rng = seeded_rng(32, 0);
        let spec = random_spec(1.0, 100, &mut rng);
        let sc = sample_cartoon(&spec, 100).unwrap();
        let tau = DeformationField::constant(0.01).unwrap();
        assert!((deformation_bound(&sc, &tau) - 4.0).abs() < 1e-12);
        assert_eq!(deformation_bound(&sc, &DeformationField::zero()), 0.0);
    }

    #[test]
    fn counterexample_distance_is_sqrt_two() {
        for n in [8, 16, 64, 100] {
            let (f, warped) = boundary_counterexample(n);
            let dist = f.sub(&warped).unwrap().l2();
            assert!((dist - 2.0f64.sqrt()).abs() < 1e-12, "N = {n}");
        }
    }

    #[test]
    fn field_sup_is_validated() {
        assert!(DeformationField::constant(1.5).is_err());
        assert!(DeformationField::new(TauKind::Sinusoid {
            amplitude: 1.2,
            frequency: 1.0,
            phase: 0.0
        })
        .is_err());
        let clamped = DeformationField::new(TauKind::ClampedAffine { slope: 4.0, intercept: 0.0 })
            .unwrap();
        assert_eq!(clamped.sup_norm(), 1.0);
        assert_eq!(clamped.eval(10.0), 1.0);
    }

    #[test]
    fn variation_certificates_are_enforced() {
        let steep = ContinuousFn {
            terms: vec![Primitive::Affine {
                slope: Complex64::new(3.0, 0.0),
                intercept: Complex64::new(0.0, 0.0),
            }],
        };
        assert!(CartoonSpec::new(steep, ContinuousFn::zero(), vec![], 1.0).is_err());

        let tall = ContinuousFn::constant(Complex64::new(0.0, 5.0));
        assert!(CartoonSpec::new(ContinuousFn::zero(), tall, vec![(0.1, 0.4)], 1.0).is_err());
    }

    #[test]
    fn intervals_must_be_disjoint_and_ordered() {
        let one = ContinuousFn::constant(Complex64::new(1.0, 0.0));
        assert!(CartoonSpec::new(ContinuousFn::zero(), one.clone(), vec![(0.4, 0.2)], 1.0).is_err());
        assert!(CartoonSpec::new(
            ContinuousFn::zero(),
            one,
            vec![(0.1, 0.5), (0.4, 0.8)],
            1.0
        )
        .is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let mut rng = seeded_rng(33, 0);
        let spec = random_spec(2.0, 64, &mut rng);
        let json = serde_json::to_string(&spec).unwrap();
        let back: CartoonSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);

        let tau = random_field(1.0, &mut rng);
        let json = serde_json::to_string(&tau).unwrap();
        let back: DeformationField = serde_json::from_str(&json).unwrap();
        assert_eq!(tau, back);
    }
}
