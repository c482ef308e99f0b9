//! JSON description of a module sequence.
//!
//! ```json
//! {
//!   "layers": [
//!     {
//!       "bank": {"kind": "wavelet", "family": "haar", "scales": 3,
//!                "length": 28, "dims": 2},
//!       "nonlinearity": "modulus",
//!       "pooling": {"kind": "identity", "S": 1},
//!       "output_atom": "lowpass"
//!     }
//!   ],
//!   "pruning": "frequency_decreasing",
//!   "normalize": true
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{AtomData, BankSpec};
use crate::ops::{NonLinearity, PoolingKind, PoolingOp};
use crate::signal::Signal;

use super::{ModuleDescriptor, ModuleSequence, PathPruning};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceConfig {
    pub layers: Vec<LayerConfig>,
    #[serde(default)]
    pub pruning: PathPruning,
    #[serde(default)]
    pub normalize: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerConfig {
    pub bank: BankSpec,
    pub nonlinearity: NonLinearity,
    pub pooling: PoolingConfig,
    pub output_atom: OutputAtomChoice,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoolingConfig {
    pub kind: PoolingKind,
    #[serde(rename = "S", alias = "s", default = "one")]
    pub factor: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

fn one() -> usize {
    1
}

impl PoolingConfig {
    fn build(&self) -> Result<PoolingOp> {
        PoolingOp::new(self.kind, self.factor, self.weights.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OutputAtomChoice {
    Named(NamedAtom),
    Explicit(AtomData),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedAtom {
    /// Unfiltered features: `chi = delta`.
    Delta,
    /// The bank's low-pass atom (wavelet banks only).
    Lowpass,
    /// Layer does not contribute to the feature vector.
    None,
}

impl SequenceConfig {
    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Builds the sequence, checking that every configured bank length sits
    /// where the pooling chain puts it. `normalize` requests admissibility
    /// normalization on top of the config's own flag.
    pub fn build(&self, normalize: bool) -> Result<ModuleSequence> {
        if self.layers.is_empty() {
            return Err(Error::Config("a sequence needs at least one layer".into()));
        }
        let mut modules = Vec::with_capacity(self.layers.len());
        let mut output_atoms = Vec::with_capacity(self.layers.len());
        let mut expected_len: Option<usize> = None;
        let mut expected_dims: Option<u8> = None;

        for (d, layer) in self.layers.iter().enumerate() {
            let bank = layer.bank.build()?;
            let shape = bank.shape();
            if let Some(n) = expected_len {
                if shape.len() != n {
                    return Err(Error::Config(format!(
                        "layer {d} bank length {} does not match the pooling chain ({n})",
                        shape.len()
                    )));
                }
            }
            if let Some(dims) = expected_dims {
                if shape.dims() != dims {
                    return Err(Error::Config(format!(
                        "layer {d} has dims {}, sequence started with {dims}",
                        shape.dims()
                    )));
                }
            }
            expected_dims = Some(shape.dims());

            let pooling = layer.pooling.build()?;
            expected_len = Some(pooling.output_len(shape.len())?);

            let chi = match &layer.output_atom {
                OutputAtomChoice::Named(NamedAtom::None) => None,
                OutputAtomChoice::Named(NamedAtom::Delta) => Some(Signal::delta(shape)),
                OutputAtomChoice::Named(NamedAtom::Lowpass) => Some(
                    bank.output_atom()
                        .ok_or_else(|| {
                            Error::Config(format!(
                                "layer {d} requests the low-pass output atom, but its bank has none"
                            ))
                        })?
                        .clone(),
                ),
                OutputAtomChoice::Explicit(data) => Some(data.to_signal_checked(shape)?),
            };
            output_atoms.push(chi);
            modules.push(ModuleDescriptor { bank, rho: layer.nonlinearity, pooling });
        }

        let seq = ModuleSequence::new(modules, output_atoms)?;
        if normalize || self.normalize {
            seq.normalized()
        } else {
            Ok(seq)
        }
    }
}

impl AtomData {
    fn to_signal_checked(&self, shape: crate::signal::Shape) -> Result<Signal> {
        if self.re.len() != shape.elems() {
            return Err(Error::Config(format!(
                "explicit output atom holds {} samples, layer needs {}",
                self.re.len(),
                shape.elems()
            )));
        }
        let values = self
            .re
            .iter()
            .enumerate()
            .map(|(k, &re)| {
                num_complex::Complex64::new(re, self.im.get(k).copied().unwrap_or(0.0))
            })
            .collect();
        Signal::new(shape, values)
    }
}
