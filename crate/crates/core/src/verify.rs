//! Seeded verification suites that drive random inputs through a module
//! sequence and check the operator inequalities end to end.
//!
//! Every suite is reproducible: all randomness flows from one seed, trials
//! run on independent RNG streams so they can execute concurrently, and
//! reports aggregate in trial order. Proven inequalities are asserted with
//! absolute slack 1e-12 plus relative slack 1e-9 to absorb floating-point
//! accumulation across layers; exact identities use the absolute part only.
//! Each suite additionally mutates its sequence into an inadmissible one and
//! checks that the admissibility guard rejects it, so a broken guard cannot
//! produce vacuous passes.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cartoon::{self, DeformationField};
use crate::error::{Error, Result};
use crate::network::{ModuleSequence, PathPruning};
use crate::signal::Signal;

pub const SLACK_ABSOLUTE: f64 = 1e-12;
pub const SLACK_RELATIVE: f64 = 1e-9;

/// One ChaCha stream per (seed, trial) pair.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub input_digest: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub violations: Vec<Violation>,
    /// Largest lhs/rhs seen over checks with rhs > 0; shows how loose the
    /// proven constants are without asserting anything about them.
    pub tightest_ratio: f64,
    pub slack_absolute: f64,
    pub slack_relative: f64,
    /// Whether the deliberately inadmissible control sequence was rejected.
    pub control_rejected: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

// One asserted inequality: lhs <= rhs within the slack policy. `exact`
// checks drop the relative slack.
struct Check {
    digest: String,
    lhs: f64,
    rhs: f64,
    exact: bool,
}

fn aggregate(
    suite: &str,
    seed: u64,
    trials: usize,
    checks: Vec<Check>,
    control_rejected: bool,
) -> VerificationReport {
    let mut violations = Vec::new();
    let mut tightest: f64 = 0.0;
    for c in checks {
        let slack = if c.exact {
            SLACK_ABSOLUTE
        } else {
            SLACK_ABSOLUTE + SLACK_RELATIVE * c.rhs
        };
        if c.lhs > c.rhs + slack {
            violations.push(Violation { input_digest: c.digest, lhs: c.lhs, rhs: c.rhs, slack });
        }
        if c.rhs > 0.0 {
            tightest = tightest.max(c.lhs / c.rhs);
        }
    }
    if !control_rejected {
        violations.push(Violation {
            input_digest: "negative-control".into(),
            lhs: f64::INFINITY,
            rhs: 1.0,
            slack: 0.0,
        });
    }
    VerificationReport {
        suite: suite.to_string(),
        seed,
        trials,
        violations,
        tightest_ratio: tightest,
        slack_absolute: SLACK_ABSOLUTE,
        slack_relative: SLACK_RELATIVE,
        control_rejected,
    }
}

fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn digest(trial: usize, label: &str, parts: &[&Signal]) -> String {
    let bytes = parts.iter().flat_map(|s| {
        s.values()
            .iter()
            .flat_map(|v| v.re.to_le_bytes().into_iter().chain(v.im.to_le_bytes()))
    });
    format!("t{trial:04}-{label}-{:016x}", fnv1a(bytes))
}

// Scales the first module's atoms so the augmented Bessel bound lands at
// 2.25; the admissibility guard must flag the result.
fn inadmissible_mutation(omega: &ModuleSequence) -> Option<ModuleSequence> {
    let bank = &omega.modules()[0].bank;
    let b = bank.bessel_bound();
    if b <= 0.0 {
        return None;
    }
    let factor = num_complex::Complex64::new(1.5 / b.sqrt(), 0.0);
    let atoms = bank
        .atoms()
        .iter()
        .map(|a| crate::filterbank::Atom {
            label: a.label.clone(),
            filter: a.filter.scale(factor),
        })
        .collect();
    let mut modules: Vec<_> = omega.modules().to_vec();
    modules[0] = crate::network::ModuleDescriptor {
        bank: crate::filterbank::FilterBank::new(atoms, None).ok()?,
        rho: modules[0].rho,
        pooling: modules[0].pooling.clone(),
    };
    ModuleSequence::new(modules, omega.output_atoms().to_vec()).ok()
}

fn negative_control(omega: &ModuleSequence) -> bool {
    match inadmissible_mutation(omega) {
        Some(mutated) => !mutated.check_admissibility().admissible,
        None => false,
    }
}

fn require_admissible(omega: &ModuleSequence) -> Result<()> {
    let rep = omega.check_admissibility();
    if !rep.admissible {
        let worst = rep.per_layer.iter().copied().fold(0.0, f64::max);
        return Err(Error::Inadmissible(format!(
            "max per-layer bound is {worst}; normalize the sequence first"
        )));
    }
    Ok(())
}

// rho_d(0) = 0 and P_d(0) = 0 for every module a length-(depth-1) path
// crosses; the hypothesis of the energy bounds.
fn zero_preserving_through(omega: &ModuleSequence, modules: usize) -> bool {
    omega.modules()[..modules]
        .iter()
        .all(|m| m.rho.maps_zero_to_zero() && m.pooling.maps_zero_to_zero())
}

/// Global Lipschitz and energy bounds: `|||Phi(f) - Phi(h)||| <= |f - h|_2`
/// for admissible sequences, and `|||Phi(f)||| <= |f|_2` when the crossed
/// non-linearities and pooling operators fix zero.
pub fn check_global(
    omega: &ModuleSequence,
    pruning: PathPruning,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    require_admissible(omega)?;
    let shape = omega.input_shape();
    let energy_applies = zero_preserving_through(omega, omega.depth().saturating_sub(1));
    let checks = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded_rng(seed, t as u64);
            let f = Signal::random_normal(shape, &mut rng);
            let h = Signal::random_normal(shape, &mut rng);
            let phi_f = omega.extract(&f, pruning)?;
            let phi_h = omega.extract(&h, pruning)?;
            let mut out = vec![Check {
                digest: digest(t, "lip", &[&f, &h]),
                lhs: phi_f.distance(&phi_h)?,
                rhs: f.sub(&h)?.l2(),
                exact: false,
            }];
            if energy_applies {
                out.push(Check {
                    digest: digest(t, "energy", &[&f]),
                    lhs: phi_f.norm(),
                    rhs: f.l2(),
                    exact: false,
                });
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(aggregate("global", seed, trials, checks, negative_control(omega)))
}

/// Deformation sensitivity on sampled cartoon functions:
/// `|f - F_tau f|_2` and `|||Phi(F_tau f) - Phi(f)|||` both bounded by
/// `4 K N^{1/2} |tau|_inf^{1/2}`. Every third trial forces a constant
/// field, the translation-sensitivity form.
pub fn check_deformation(
    omega: &ModuleSequence,
    pruning: PathPruning,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    require_admissible(omega)?;
    let shape = omega.input_shape();
    if shape.dims() != 1 {
        return Err(Error::ShapeMismatch(
            "the deformation suite runs on 1-D sequences".into(),
        ));
    }
    let n = shape.len();
    let variations = [0.5, 1.0, 2.0];
    let checks = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded_rng(seed, t as u64);
            let k = variations[t % variations.len()];
            let spec = cartoon::random_spec(k, n, &mut rng);
            let sc = cartoon::sample_cartoon(&spec, n)?;
            let tau = if t % 3 == 0 {
                DeformationField::constant(rng.random_range(-1.0..1.0)).expect("|t| < 1")
            } else {
                cartoon::random_field(1.0, &mut rng)
            };
            let warped = cartoon::deform(&sc, &tau);
            let bound = cartoon::deformation_bound(&sc, &tau);
            let f = sc.signal();
            let phi_f = omega.extract(f, pruning)?;
            let phi_w = omega.extract(&warped, pruning)?;
            Ok(vec![
                Check {
                    digest: digest(t, "signal", &[f, &warped]),
                    lhs: f.sub(&warped)?.l2(),
                    rhs: bound,
                    exact: false,
                },
                Check {
                    digest: digest(t, "feature", &[f, &warped]),
                    lhs: phi_f.distance(&phi_w)?,
                    rhs: bound,
                    exact: false,
                },
            ])
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(aggregate("deformation", seed, trials, checks, negative_control(omega)))
}

/// Per-layer bounds with the local constant `L^d`: Lipschitz continuity,
/// energy, and cartoon deformation sensitivity of layer `d`'s features,
/// plus the arithmetic vertical-sensitivity comparison against layer
/// `d - 1`.
pub fn check_local(
    omega: &ModuleSequence,
    d: usize,
    pruning: PathPruning,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let l_d = omega.local_lipschitz(d)?;
    let shape = omega.input_shape();
    let n = shape.len();
    let energy_applies = zero_preserving_through(omega, d);
    let one_d = shape.dims() == 1;

    let mut checks: Vec<Check> = Vec::new();
    // Vertical sensitivity: when the recursion factor drops below one, the
    // local constants must decrease.
    if d >= 1 && omega.contributes(d - 1) {
        let chi_d = omega.output_atoms()[d].as_ref().unwrap().norms().l1;
        let chi_prev = omega.output_atoms()[d - 1].as_ref().unwrap().norms().l1;
        let m = &omega.modules()[d - 1];
        let factor = chi_d
            * omega.augmented_bessel(d - 1).sqrt()
            * m.rho.lipschitz()
            * m.pooling.lipschitz(shape.dims());
        if factor < chi_prev {
            checks.push(Check {
                digest: format!("layer{d}-vertical-sensitivity"),
                lhs: l_d,
                rhs: omega.local_lipschitz(d - 1)?,
                exact: true,
            });
        }
    }

    let variations = [0.5, 1.0, 2.0];
    let trial_checks = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded_rng(seed, t as u64);
            let f = Signal::random_normal(shape, &mut rng);
            let h = Signal::random_normal(shape, &mut rng);
            let phi_f = omega.extract(&f, pruning)?;
            let phi_h = omega.extract(&h, pruning)?;
            let mut out = vec![Check {
                digest: digest(t, &format!("lip{d}"), &[&f, &h]),
                lhs: phi_f.layer_distances(&phi_h)?[d],
                rhs: l_d * f.sub(&h)?.l2(),
                exact: false,
            }];
            if energy_applies {
                out.push(Check {
                    digest: digest(t, &format!("energy{d}"), &[&f]),
                    lhs: phi_f.layer_norm(d),
                    rhs: l_d * f.l2(),
                    exact: false,
                });
            }
            if one_d {
                let k = variations[t % variations.len()];
                let spec = cartoon::random_spec(k, n, &mut rng);
                let sc = cartoon::sample_cartoon(&spec, n)?;
                let tau = cartoon::random_field(1.0, &mut rng);
                let warped = cartoon::deform(&sc, &tau);
                let phi_c = omega.extract(sc.signal(), pruning)?;
                let phi_w = omega.extract(&warped, pruning)?;
                out.push(Check {
                    digest: digest(t, &format!("deform{d}"), &[sc.signal(), &warped]),
                    lhs: phi_c.layer_distances(&phi_w)?[d],
                    rhs: l_d * cartoon::deformation_bound(&sc, &tau),
                    exact: false,
                });
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    checks.extend(trial_checks.into_iter().flatten());
    Ok(aggregate(
        &format!("local-{d}"),
        seed,
        trials,
        checks,
        negative_control(omega),
    ))
}

/// Translation covariance: `Phi^d(T_m f) = T_{m / (S_1 ... S_d)} Phi^d(f)`
/// elementwise (tolerance 1e-12) for every `m` the pooling grid admits.
pub fn check_translation_covariance(
    omega: &ModuleSequence,
    pruning: PathPruning,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let shape = omega.input_shape();
    let n = shape.len();
    let depth = omega.depth();
    // Product of pooling factors up to each layer.
    let mut grid = Vec::with_capacity(depth);
    let mut prod = 1usize;
    for d in 0..depth {
        grid.push(prod);
        prod *= omega.modules()[d].pooling.factor();
    }

    let checks = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded_rng(seed, t as u64);
            let f = Signal::random_normal(shape, &mut rng);
            let phi = omega.extract(&f, pruning)?;
            let mut out = Vec::new();
            for m in 0..n {
                let layers: Vec<usize> = (0..depth)
                    .filter(|&d| omega.contributes(d) && m % grid[d] == 0)
                    .collect();
                if layers.is_empty() {
                    continue;
                }
                let phi_shifted = omega.extract(&f.translate(m as i64), pruning)?;
                for d in layers {
                    let coarse = (m / grid[d]) as i64;
                    let mut worst = 0.0f64;
                    for (q, sig) in phi.layer(d) {
                        let expected = sig.translate(coarse);
                        let got = phi_shifted.layer(d).get(q).ok_or_else(|| {
                            Error::ShapeMismatch("path sets diverged under translation".into())
                        })?;
                        worst = worst.max(got.max_abs_diff(&expected));
                    }
                    out.push(Check {
                        digest: digest(t, &format!("cov{d}m{m}"), &[&f]),
                        lhs: worst,
                        rhs: 0.0,
                        exact: true,
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(aggregate("covariance", seed, trials, checks, negative_control(omega)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::{FilterBank, WaveletFamily};
    use crate::network::ModuleDescriptor;
    use crate::ops::{NonLinearity, PoolingOp};

    fn haar_sequence(n: usize, depth: usize, pool: usize, normalize: bool) -> ModuleSequence {
        let mut modules = Vec::new();
        let mut atoms = Vec::new();
        let mut len = n;
        for _ in 0..depth {
            let bank = FilterBank::wavelet(WaveletFamily::Haar, 2, len, 1).unwrap();
            let chi = bank.output_atom().unwrap().clone();
            modules.push(ModuleDescriptor {
                bank,
                rho: NonLinearity::Modulus,
                pooling: if pool == 1 {
                    PoolingOp::identity()
                } else {
                    PoolingOp::subsample(pool).unwrap()
                },
            });
            atoms.push(Some(chi));
            len /= pool;
        }
        let seq = ModuleSequence::new(modules, atoms).unwrap();
        if normalize {
            seq.normalized().unwrap()
        } else {
            seq
        }
    }

    #[test]
    fn zero_trials_pass_with_control() {
        let seq = haar_sequence(32, 2, 2, true);
        let rep = check_global(&seq, PathPruning::Full, 0, 7).unwrap();
        assert!(rep.passed());
        assert!(rep.control_rejected);
        assert_eq!(rep.tightest_ratio, 0.0);
    }

    #[test]
    fn inadmissible_sequence_is_rejected_up_front() {
        let seq = haar_sequence(32, 2, 2, false);
        assert!(!seq.check_admissibility().admissible);
        assert!(matches!(
            check_global(&seq, PathPruning::Full, 1, 7),
            Err(Error::Inadmissible(_))
        ));
    }

    #[test]
    fn global_suite_passes_on_admissible_sequence() {
        let seq = haar_sequence(32, 3, 2, true);
        let rep = check_global(&seq, PathPruning::Full, 25, 42).unwrap();
        assert!(rep.passed(), "violations: {:?}", rep.violations);
        assert!(rep.tightest_ratio <= 1.0 + 1e-9);
    }

    #[test]
    fn reports_are_reproducible_byte_for_byte() {
        let seq = haar_sequence(32, 2, 2, true);
        let a = check_global(&seq, PathPruning::Full, 10, 42).unwrap();
        let b = check_global(&seq, PathPruning::Full, 10, 42).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let c = check_global(&seq, PathPruning::Full, 10, 43).unwrap();
        assert_ne!(a.to_json().unwrap(), c.to_json().unwrap());
    }

    #[test]
    fn deformation_suite_needs_one_dimensional_input() {
        let bank = FilterBank::wavelet(WaveletFamily::Haar, 1, 8, 2).unwrap();
        let chi = bank.output_atom().unwrap().clone();
        let seq = ModuleSequence::new(
            vec![ModuleDescriptor {
                bank,
                rho: NonLinearity::Modulus,
                pooling: PoolingOp::identity(),
            }],
            vec![Some(chi)],
        )
        .unwrap()
        .normalized()
        .unwrap();
        assert!(matches!(
            check_deformation(&seq, PathPruning::Full, 1, 7),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn local_suite_rejects_non_contributing_layer() {
        let mut seq = haar_sequence(16, 2, 2, true);
        // Rebuild without the layer-0 atom.
        let modules = seq.modules().to_vec();
        let mut atoms = seq.output_atoms().to_vec();
        atoms[0] = None;
        seq = ModuleSequence::new(modules, atoms).unwrap();
        assert!(matches!(
            check_local(&seq, 0, PathPruning::Full, 1, 7),
            Err(Error::NonContributingLayer(0))
        ));
    }
}
