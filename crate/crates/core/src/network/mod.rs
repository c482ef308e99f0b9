//! Module sequences and the feature extractor.
//!
//! A depth-`D` sequence chains modules `(Psi_d, rho_d, P_d)` mapping
//! `H_{N_d} -> H_{N_{d+1}}` with `N_{d+1} = N_d / S_d`, plus one optional
//! output-generating atom per layer. Layer `d` contributes the signals
//! `(U[q]f) * chi_d` over all admitted paths `q` of length `d`; the feature
//! vector is the union over layers `0..D-1`.
//!
//! Frame-bound accounting follows the convention that `chi_d` is formally an
//! atom of the next layer's convolutional set: every per-layer Bessel bound
//! used by the admissibility condition and the local Lipschitz constants is
//! the augmented one.

mod config;
mod feature_io;
mod paths;

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filterbank::{AtomLabel, FilterBank};
use crate::ops::{NonLinearity, PoolingOp};
use crate::signal::{Shape, Signal};

pub use config::{LayerConfig, OutputAtomChoice, PoolingConfig, SequenceConfig};
pub use feature_io::{read_features, write_features, FeatureSidecar, FEATURE_MAGIC};
pub use paths::{frequency_decreasing_paths, Path, PathPruning};

/// One network layer: filter bank, non-linearity, pooling.
#[derive(Debug, Clone)]
pub struct ModuleDescriptor {
    pub bank: FilterBank,
    pub rho: NonLinearity,
    pub pooling: PoolingOp,
}

/// Per-layer admissibility values `max{B_d, B_d R_d^2 L_d^2}` and the
/// verdict of the condition `max_d ... <= 1`.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub per_layer: Vec<f64>,
    pub admissible: bool,
}

/// An ordered stack of modules with one optional output atom per layer.
/// `output_atoms[d]` lives at layer `d`'s input length and generates that
/// layer's contribution to the feature vector.
#[derive(Debug, Clone)]
pub struct ModuleSequence {
    modules: Vec<ModuleDescriptor>,
    output_atoms: Vec<Option<Signal>>,
    // Cached spectra of the output atoms, aligned with `output_atoms`.
    chi_spectra: Vec<Option<Signal>>,
    // Input shape of each module; one extra entry for the final output shape.
    shapes: Vec<Shape>,
}

impl ModuleSequence {
    pub fn new(
        modules: Vec<ModuleDescriptor>,
        output_atoms: Vec<Option<Signal>>,
    ) -> Result<Self> {
        if modules.is_empty() {
            return Err(Error::InvalidParameter("a sequence needs at least one module".into()));
        }
        if output_atoms.len() != modules.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} modules but {} output-atom slots",
                modules.len(),
                output_atoms.len()
            )));
        }
        // Output atoms live on the sequence; strip any bank-level ones so
        // the augmented accounting cannot double-count.
        let modules: Vec<ModuleDescriptor> = modules
            .into_iter()
            .map(|m| {
                Ok(ModuleDescriptor {
                    bank: if m.bank.output_atom().is_some() {
                        m.bank.with_output_atom(None)?
                    } else {
                        m.bank
                    },
                    rho: m.rho,
                    pooling: m.pooling,
                })
            })
            .collect::<Result<_>>()?;

        let mut shapes = Vec::with_capacity(modules.len() + 1);
        let mut shape = modules[0].bank.shape();
        for (d, m) in modules.iter().enumerate() {
            if m.bank.shape() != shape {
                return Err(Error::ShapeMismatch(format!(
                    "module {d} bank has shape {:?}, the pooling chain requires {:?}",
                    m.bank.shape(),
                    shape
                )));
            }
            shapes.push(shape);
            let pooled = m.pooling.output_len(shape.len())?;
            shape = match shape {
                Shape::OneD(_) => Shape::OneD(pooled),
                Shape::TwoD(_) => Shape::TwoD(pooled),
            };
        }
        shapes.push(shape);

        for (d, chi) in output_atoms.iter().enumerate() {
            if let Some(chi) = chi {
                if chi.shape() != shapes[d] {
                    return Err(Error::ShapeMismatch(format!(
                        "output atom {d} has shape {:?}, layer input is {:?}",
                        chi.shape(),
                        shapes[d]
                    )));
                }
            }
        }
        let chi_spectra = output_atoms.iter().map(|c| c.as_ref().map(Signal::dft)).collect();
        Ok(ModuleSequence { modules, output_atoms, chi_spectra, shapes })
    }

    pub fn depth(&self) -> usize {
        self.modules.len()
    }

    pub fn modules(&self) -> &[ModuleDescriptor] {
        &self.modules
    }

    pub fn output_atoms(&self) -> &[Option<Signal>] {
        &self.output_atoms
    }

    pub fn input_shape(&self) -> Shape {
        self.shapes[0]
    }

    /// Input shape of layer `d`, which is also the shape of `chi_d` and of
    /// layer `d`'s feature maps. `d == depth()` gives the final pooled shape.
    pub fn layer_shape(&self, d: usize) -> Shape {
        self.shapes[d]
    }

    pub fn contributes(&self, d: usize) -> bool {
        self.output_atoms.get(d).map(Option::is_some).unwrap_or(false)
    }

    // Per-bin spectrum sum of layer `d`'s atoms plus chi_d.
    fn augmented_spectrum(&self, d: usize) -> Vec<f64> {
        let mut spectrum = self.modules[d].bank.frame_spectrum();
        if let Some(chi_hat) = &self.chi_spectra[d] {
            for (s, v) in spectrum.iter_mut().zip(chi_hat.values()) {
                *s += v.norm_sqr();
            }
        }
        spectrum
    }

    /// Bessel bound of layer `d`'s convolutional set augmented with
    /// `chi_d`.
    pub fn augmented_bessel(&self, d: usize) -> f64 {
        self.augmented_spectrum(d).iter().copied().fold(0.0, f64::max)
    }

    /// Frame bounds `(A, B)` of the augmented layer-`d` set. The output
    /// atom participates: a band-pass-only bank regains `A > 0` once its
    /// low-pass joins the accounting.
    pub fn augmented_frame_bounds(&self, d: usize) -> (f64, f64) {
        let spectrum = self.augmented_spectrum(d);
        (
            spectrum.iter().copied().fold(f64::INFINITY, f64::min),
            spectrum.iter().copied().fold(0.0, f64::max),
        )
    }

    /// Evaluates `max{B_d, B_d R_d^2 L_d^2}` per layer against the
    /// admissibility threshold (slack 1e-12 to admit exact boundary cases).
    pub fn check_admissibility(&self) -> AdmissibilityReport {
        let dims = self.input_shape().dims();
        let per_layer: Vec<f64> = (0..self.depth())
            .map(|d| {
                let b = self.augmented_bessel(d);
                let r = self.modules[d].pooling.lipschitz(dims);
                let l = self.modules[d].rho.lipschitz();
                b.max(b * r * r * l * l)
            })
            .collect();
        let admissible = per_layer.iter().all(|&v| v <= 1.0 + 1e-12);
        AdmissibilityReport { per_layer, admissible }
    }

    /// Rescales every layer (atoms and output atom together) by
    /// `C_d^{-1/2}` with `C_d = B_d max{1, R_d^2 L_d^2}` computed from the
    /// augmented bound, which makes the sequence admissible.
    pub fn normalized(&self) -> Result<ModuleSequence> {
        let dims = self.input_shape().dims();
        let mut modules = Vec::with_capacity(self.depth());
        let mut atoms = Vec::with_capacity(self.depth());
        for d in 0..self.depth() {
            let b = self.augmented_bessel(d);
            if b <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "layer {d} has zero Bessel bound; nothing to normalize"
                )));
            }
            let m = &self.modules[d];
            let r = m.pooling.lipschitz(dims);
            let l = m.rho.lipschitz();
            let c = b * (r * r * l * l).max(1.0);
            let scale = num_complex::Complex64::new(c.sqrt().recip(), 0.0);
            let bank = FilterBank::new(
                m.bank
                    .atoms()
                    .iter()
                    .map(|a| crate::filterbank::Atom {
                        label: a.label.clone(),
                        filter: a.filter.scale(scale),
                    })
                    .collect(),
                None,
            )?;
            modules.push(ModuleDescriptor { bank, rho: m.rho, pooling: m.pooling.clone() });
            atoms.push(self.output_atoms[d].as_ref().map(|chi| chi.scale(scale)));
        }
        ModuleSequence::new(modules, atoms)
    }

    /// One step `U_d[lambda] f = P_d(rho_d(f * g_lambda))` of layer `d`.
    pub fn propagate_one(&self, d: usize, label: &AtomLabel, f: &Signal) -> Result<Signal> {
        let m = self
            .modules
            .get(d)
            .ok_or_else(|| Error::InvalidParameter(format!("no module at layer {d}")))?;
        if f.shape() != self.shapes[d] {
            return Err(Error::ShapeMismatch(format!(
                "layer {d} expects {:?}, got {:?}",
                self.shapes[d],
                f.shape()
            )));
        }
        let idx = m.bank.atom_by_label(label)?;
        let convolved = f.conv_with_spectrum(m.bank.spectrum_of(idx));
        m.pooling.apply(&m.rho.apply(&convolved))
    }

    /// Left fold of `propagate_one` along the path; the empty path returns
    /// `f` unchanged.
    pub fn propagate_path(&self, q: &Path, f: &Signal) -> Result<Signal> {
        if q.len() > self.depth() {
            return Err(Error::InvalidParameter(format!(
                "path of length {} into a depth-{} sequence",
                q.len(),
                self.depth()
            )));
        }
        let mut cur = f.clone();
        for (d, label) in q.0.iter().enumerate() {
            cur = self.propagate_one(d, label, &cur)?;
        }
        Ok(cur)
    }

    /// Runs the extractor: for every contributing layer `d` and every
    /// admitted path of length `d`, stores `(U[q]f) * chi_d`. Path order is
    /// lexicographic and the result is independent of scheduling.
    pub fn extract(&self, f: &Signal, pruning: PathPruning) -> Result<FeatureVector> {
        if f.shape() != self.input_shape() {
            return Err(Error::ShapeMismatch(format!(
                "input {:?} against sequence expecting {:?}",
                f.shape(),
                self.input_shape()
            )));
        }
        let depth = self.depth();
        let mut layers: Vec<BTreeMap<Path, Signal>> = Vec::with_capacity(depth);
        // Frontier of propagated feature maps, keyed by path, with the
        // running maximum wavelet scale used for pruning decisions.
        let mut frontier: Vec<(Path, u32, Signal)> = vec![(Path::empty(), 0, f.clone())];

        for d in 0..depth {
            if let Some(chi_hat) = &self.chi_spectra[d] {
                let outputs: Vec<(Path, Signal)> = frontier
                    .par_iter()
                    .map(|(q, _, sig)| (q.clone(), sig.conv_with_spectrum(chi_hat)))
                    .collect();
                layers.push(outputs.into_iter().collect());
            } else {
                layers.push(BTreeMap::new());
            }

            // Length-depth feature maps generate no output, so the last
            // module never propagates inside the extractor.
            if d + 1 < depth {
                let module = &self.modules[d];
                frontier = frontier
                    .par_iter()
                    .map(|(q, running_max, sig)| {
                        let mut children = Vec::new();
                        for (idx, atom) in module.bank.atoms().iter().enumerate() {
                            if !pruning.allows(*running_max, &atom.label) {
                                continue;
                            }
                            let convolved = sig.conv_with_spectrum(module.bank.spectrum_of(idx));
                            let pooled = module.pooling.apply(&module.rho.apply(&convolved))?;
                            let mut path = q.clone();
                            path.0.push(atom.label.clone());
                            children.push((path, pruning.advance(*running_max, &atom.label), pooled));
                        }
                        Ok(children)
                    })
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .flatten()
                    .collect();
            }
        }
        Ok(FeatureVector { layers })
    }

    /// Admitted path count per output layer under the given pruning mode.
    pub fn path_counts(&self, pruning: PathPruning) -> Vec<usize> {
        let depth = self.depth();
        let mut counts = Vec::with_capacity(depth);
        // Multiplicity of each running-max value in the current frontier.
        let mut frontier: BTreeMap<u32, usize> = BTreeMap::from([(0u32, 1usize)]);
        for d in 0..depth {
            counts.push(frontier.values().sum());
            if d + 1 < depth {
                let mut next: BTreeMap<u32, usize> = BTreeMap::new();
                for (&running_max, &mult) in &frontier {
                    for atom in self.modules[d].bank.atoms() {
                        if pruning.allows(running_max, &atom.label) {
                            *next.entry(pruning.advance(running_max, &atom.label)).or_insert(0) +=
                                mult;
                        }
                    }
                }
                frontier = next;
            }
        }
        counts
    }

    /// Scalar count of the feature vector: contributing layers contribute
    /// (elements of `H_{N_{d+1}}`) x (admitted paths of length `d`), one
    /// slot per complex output.
    pub fn feature_dimension(&self, pruning: PathPruning) -> usize {
        self.path_counts(pruning)
            .iter()
            .enumerate()
            .filter(|&(d, _)| self.contributes(d))
            .map(|(d, &count)| self.shapes[d].elems() * count)
            .sum()
    }

    /// Local Lipschitz constant of layer `d`'s features:
    /// `|chi_d|_1 (prod_{k<=d} B_k L_k^2 R_k^2)^{1/2}`, with `|chi_0|_1`
    /// alone at the root. Bessel bounds are the augmented ones.
    pub fn local_lipschitz(&self, d: usize) -> Result<f64> {
        let chi = self.output_atoms[d]
            .as_ref()
            .ok_or(Error::NonContributingLayer(d))?;
        Ok(chi.norms().l1 * self.bessel_chain(d).sqrt())
    }

    /// Variant of the local constant that replaces `|chi_d|_1` by the root
    /// of the augmented Bessel bound of the set `chi_d` formally belongs to.
    pub fn local_lipschitz_bessel_variant(&self, d: usize) -> Result<f64> {
        if !self.contributes(d) {
            return Err(Error::NonContributingLayer(d));
        }
        Ok((self.augmented_bessel(d) * self.bessel_chain(d)).sqrt())
    }

    // prod_{k < d} B_k L_k^2 R_k^2 over the modules a depth-d path crosses.
    fn bessel_chain(&self, d: usize) -> f64 {
        let dims = self.input_shape().dims();
        (0..d)
            .map(|k| {
                let b = self.augmented_bessel(k);
                let l = self.modules[k].rho.lipschitz();
                let r = self.modules[k].pooling.lipschitz(dims);
                b * l * l * r * r
            })
            .product()
    }
}

/// Per-layer collections `{(U[q]f) * chi_d}` keyed by path.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    layers: Vec<BTreeMap<Path, Signal>>,
}

impl FeatureVector {
    pub fn new(layers: Vec<BTreeMap<Path, Signal>>) -> Self {
        FeatureVector { layers }
    }

    pub fn layers(&self) -> &[BTreeMap<Path, Signal>] {
        &self.layers
    }

    pub fn layer(&self, d: usize) -> &BTreeMap<Path, Signal> {
        &self.layers[d]
    }

    /// Total scalar slot count, one per stored complex sample.
    pub fn dimension(&self) -> usize {
        self.layers
            .iter()
            .flat_map(|layer| layer.values())
            .map(|sig| sig.shape().elems())
            .sum()
    }

    /// Feature-space norm: root of the summed squared l2 norms of every
    /// stored output, accumulated in canonical (layer, path) order.
    pub fn norm(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|layer| layer.values())
            .map(Signal::energy)
            .sum::<f64>()
            .sqrt()
    }

    /// Same restricted to one layer.
    pub fn layer_norm(&self, d: usize) -> f64 {
        self.layers[d].values().map(Signal::energy).sum::<f64>().sqrt()
    }

    /// Distance in the feature-space norm; requires identical path sets.
    pub fn distance(&self, other: &FeatureVector) -> Result<f64> {
        Ok(self.layer_distances(other)?.iter().map(|d| d * d).sum::<f64>().sqrt())
    }

    /// Per-layer feature-space distances.
    pub fn layer_distances(&self, other: &FeatureVector) -> Result<Vec<f64>> {
        if self.layers.len() != other.layers.len() {
            return Err(Error::ShapeMismatch("feature vectors differ in depth".into()));
        }
        self.layers
            .iter()
            .zip(&other.layers)
            .map(|(a, b)| {
                if a.len() != b.len() || a.keys().zip(b.keys()).any(|(x, y)| x != y) {
                    return Err(Error::ShapeMismatch(
                        "feature vectors hold different path sets".into(),
                    ));
                }
                let mut acc = 0.0;
                for (pa, pb) in a.values().zip(b.values()) {
                    acc += pa.sub(pb)?.energy();
                }
                Ok(acc.sqrt())
            })
            .collect()
    }

    /// Element-wise cyclic translation of every stored output.
    pub fn translate(&self, m: i64) -> FeatureVector {
        FeatureVector {
            layers: self
                .layers
                .iter()
                .map(|layer| {
                    layer
                        .iter()
                        .map(|(q, sig)| (q.clone(), sig.translate(m)))
                        .collect()
                })
                .collect(),
        }
    }

    /// Largest componentwise deviation from `other`, across all outputs.
    pub fn max_abs_diff(&self, other: &FeatureVector) -> f64 {
        self.layers
            .iter()
            .zip(&other.layers)
            .flat_map(|(a, b)| a.values().zip(b.values()))
            .map(|(x, y)| x.max_abs_diff(y))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::{Atom, WaveletFamily};
    use crate::verify::seeded_rng;
    use num_complex::Complex64;

    fn delta_module(n: usize, rho: NonLinearity, pooling: PoolingOp) -> ModuleDescriptor {
        ModuleDescriptor {
            bank: FilterBank::new(
                vec![Atom {
                    label: AtomLabel::Tag("id".into()),
                    filter: Signal::delta(Shape::OneD(n)),
                }],
                None,
            )
            .unwrap(),
            rho,
            pooling,
        }
    }

    fn delta_label() -> AtomLabel {
        AtomLabel::Tag("id".into())
    }

    #[test]
    fn propagate_one_identity_module() {
        let seq = ModuleSequence::new(
            vec![delta_module(4, NonLinearity::Modulus, PoolingOp::identity())],
            vec![Some(Signal::delta(Shape::OneD(4)))],
        )
        .unwrap();
        let f = Signal::new_1d(vec![
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(-3.0, 0.0),
            Complex64::new(4.0, 0.0),
        ])
        .unwrap();
        let out = seq.propagate_one(0, &delta_label(), &f).unwrap();
        assert!(out.max_abs_diff(&Signal::from_real_1d(&[1.0, 2.0, 3.0, 4.0])) < 1e-12);
    }

    #[test]
    fn propagate_one_with_subsampling() {
        let seq = ModuleSequence::new(
            vec![delta_module(4, NonLinearity::Modulus, PoolingOp::subsample(2).unwrap())],
            vec![None],
        )
        .unwrap();
        let f = Signal::new_1d(vec![
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(-3.0, 0.0),
            Complex64::new(4.0, 0.0),
        ])
        .unwrap();
        let out = seq.propagate_one(0, &delta_label(), &f).unwrap();
        assert!(out.max_abs_diff(&Signal::from_real_1d(&[1.0, 3.0])) < 1e-12);
    }

    #[test]
    fn propagate_zero_stays_zero() {
        let seq = ModuleSequence::new(
            vec![delta_module(8, NonLinearity::Relu, PoolingOp::max(2).unwrap())],
            vec![None],
        )
        .unwrap();
        let out = seq.propagate_one(0, &delta_label(), &Signal::zeros(Shape::OneD(8))).unwrap();
        assert_eq!(out.l2(), 0.0);
    }

    #[test]
    fn unknown_label_is_reported() {
        let seq = ModuleSequence::new(
            vec![delta_module(4, NonLinearity::Modulus, PoolingOp::identity())],
            vec![None],
        )
        .unwrap();
        let f = Signal::zeros(Shape::OneD(4));
        assert!(matches!(
            seq.propagate_one(0, &AtomLabel::Tag("missing".into()), &f),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn empty_path_is_identity() {
        let seq = ModuleSequence::new(
            vec![delta_module(4, NonLinearity::Modulus, PoolingOp::identity())],
            vec![None],
        )
        .unwrap();
        let mut rng = seeded_rng(41, 0);
        let f = Signal::random_normal(Shape::OneD(4), &mut rng);
        assert_eq!(seq.propagate_path(&Path::empty(), &f).unwrap(), f);
    }

    #[test]
    fn depth_two_modulus_is_idempotent_on_nonnegatives() {
        let seq = ModuleSequence::new(
            vec![
                delta_module(4, NonLinearity::Modulus, PoolingOp::identity()),
                delta_module(4, NonLinearity::Modulus, PoolingOp::identity()),
            ],
            vec![None, None],
        )
        .unwrap();
        let f = Signal::from_real_1d(&[1.0, 0.5, 2.0, 0.0]);
        let q = Path(vec![delta_label(), delta_label()]);
        let out = seq.propagate_path(&q, &f).unwrap();
        assert!(out.max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn extract_of_zero_is_zero() {
        let bank = FilterBank::wavelet(WaveletFamily::Haar, 2, 16, 1).unwrap();
        let chi = bank.output_atom().unwrap().clone();
        let module = ModuleDescriptor {
            bank,
            rho: NonLinearity::Modulus,
            pooling: PoolingOp::subsample(2).unwrap(),
        };
        let bank2 = FilterBank::wavelet(WaveletFamily::Haar, 2, 8, 1).unwrap();
        let chi2 = bank2.output_atom().unwrap().clone();
        let module2 = ModuleDescriptor {
            bank: bank2,
            rho: NonLinearity::Modulus,
            pooling: PoolingOp::identity(),
        };
        let seq = ModuleSequence::new(vec![module, module2], vec![Some(chi), Some(chi2)]).unwrap();
        let phi = seq.extract(&Signal::zeros(Shape::OneD(16)), PathPruning::Full).unwrap();
        assert_eq!(phi.norm(), 0.0);
        assert_eq!(phi.dimension(), seq.feature_dimension(PathPruning::Full));
    }

    #[test]
    fn single_layer_delta_output_returns_the_input() {
        let seq = ModuleSequence::new(
            vec![delta_module(8, NonLinearity::Modulus, PoolingOp::identity())],
            vec![Some(Signal::delta(Shape::OneD(8)))],
        )
        .unwrap();
        let mut rng = seeded_rng(42, 0);
        let f = Signal::random_normal(Shape::OneD(8), &mut rng);
        let phi = seq.extract(&f, PathPruning::Full).unwrap();
        assert_eq!(phi.layer(0).len(), 1);
        let out = phi.layer(0).get(&Path::empty()).unwrap();
        assert!(out.max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn feature_norm_examples() {
        let zero = FeatureVector::new(vec![BTreeMap::new()]);
        assert_eq!(zero.norm(), 0.0);

        let mut layer0 = BTreeMap::new();
        layer0.insert(Path::empty(), Signal::from_real_1d(&[3.0, 4.0]));
        let single = FeatureVector::new(vec![layer0.clone()]);
        assert!((single.norm() - 5.0).abs() < 1e-15);

        let mut layer1 = BTreeMap::new();
        layer1.insert(
            Path(vec![delta_label()]),
            Signal::from_real_1d(&[4.0, 0.0]),
        );
        let mut l0 = BTreeMap::new();
        l0.insert(Path::empty(), Signal::from_real_1d(&[3.0, 0.0]));
        let two = FeatureVector::new(vec![l0, layer1]);
        assert!((two.norm() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn admissibility_examples() {
        // B = 1, L = 1, R = 1.
        let seq = ModuleSequence::new(
            vec![delta_module(4, NonLinearity::Modulus, PoolingOp::identity())],
            vec![None],
        )
        .unwrap();
        let rep = seq.check_admissibility();
        assert!((rep.per_layer[0] - 1.0).abs() < 1e-12);
        assert!(rep.admissible);

        // B = 1, ReLU L = 2, subsample R = 1 gives 4: normalization needed.
        let seq = ModuleSequence::new(
            vec![delta_module(4, NonLinearity::Relu, PoolingOp::subsample(1).unwrap())],
            vec![None],
        )
        .unwrap();
        let rep = seq.check_admissibility();
        assert!((rep.per_layer[0] - 4.0).abs() < 1e-12);
        assert!(!rep.admissible);

        let fixed = seq.normalized().unwrap();
        assert!(fixed.check_admissibility().admissible);
    }

    #[test]
    fn local_lipschitz_basic_values() {
        let seq = ModuleSequence::new(
            vec![delta_module(4, NonLinearity::Modulus, PoolingOp::identity())],
            vec![Some(Signal::delta(Shape::OneD(4)))],
        )
        .unwrap();
        assert!((seq.local_lipschitz(0).unwrap() - 1.0).abs() < 1e-15);

        let seq = ModuleSequence::new(
            vec![
                delta_module(4, NonLinearity::Modulus, PoolingOp::identity()),
                delta_module(4, NonLinearity::Modulus, PoolingOp::identity()),
            ],
            vec![None, Some(Signal::delta(Shape::OneD(4)))],
        )
        .unwrap();
        assert!((seq.local_lipschitz(1).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            seq.local_lipschitz(0),
            Err(Error::NonContributingLayer(0))
        ));
    }

    #[test]
    fn local_lipschitz_with_average_pooling() {
        // Uniform average with S = 4 contributes R^2 = 1/4 per crossed layer,
        // so a depth-2 path with B = L = 1 gives (1/4 * 1/4)^{1/2} = 1/4.
        let mk = |n| delta_module(n, NonLinearity::Modulus, PoolingOp::average_uniform(4).unwrap());
        let seq = ModuleSequence::new(
            vec![mk(64), mk(16), mk(4)],
            vec![None, None, Some(Signal::delta(Shape::OneD(4)))],
        )
        .unwrap();
        assert!((seq.local_lipschitz(2).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn dims_formula_single_layer() {
        let seq = ModuleSequence::new(
            vec![delta_module(100, NonLinearity::Modulus, PoolingOp::identity())],
            vec![Some(Signal::delta(Shape::OneD(100)))],
        )
        .unwrap();
        assert_eq!(seq.feature_dimension(PathPruning::Full), 100);
        assert_eq!(seq.feature_dimension(PathPruning::FrequencyDecreasing), 100);
    }
}
