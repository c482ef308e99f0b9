//! Deep convolutional feature extraction over periodic discrete signals.
//!
//! A network layer is a module `(Ψ, ρ, P)`: a filter bank with computable
//! frame bounds, a pointwise Lipschitz non-linearity, and a Lipschitz pooling
//! operator. Stacking modules gives a module sequence whose feature extractor
//! collects, layer by layer, every propagated path convolved with that
//! layer's output-generating atom.
//!
//! Besides the extraction pipeline itself (tensorized à-trous wavelet banks,
//! path propagation, frequency-decreasing path pruning), the crate ships the
//! analysis side: Bessel/frame bound computation, admissibility
//! normalization, local and global Lipschitz constants, sampled cartoon
//! functions with certified deformation bounds, and seeded verification
//! suites that check every operator inequality end to end.

pub mod cartoon;
mod error;
pub mod filterbank;
pub mod network;
pub mod ops;
pub mod signal;
pub mod verify;

pub use cartoon::{CartoonSpec, ContinuousFn, DeformationField, SampledCartoon};
pub use error::{Error, Result};
pub use filterbank::{Atom, AtomLabel, BesselCheck, Direction, FilterBank, WaveletFamily};
pub use network::{
    FeatureVector, ModuleDescriptor, ModuleSequence, Path, PathPruning, SequenceConfig,
};
pub use ops::{NonLinearity, PoolingKind, PoolingOp};
pub use signal::{Norms, Shape, Signal};
pub use verify::{VerificationReport, Violation};
