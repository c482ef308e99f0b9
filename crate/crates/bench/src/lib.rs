//! Shared builders for the pipeline benchmarks.

use dfex::filterbank::{FilterBank, WaveletFamily};
use dfex::network::{ModuleDescriptor, ModuleSequence};
use dfex::ops::{NonLinearity, PoolingOp};
use dfex::signal::{Shape, Signal};
use dfex::verify::seeded_rng;

pub fn random_signal(shape: Shape, seed: u64) -> Signal {
    let mut rng = seeded_rng(seed, 0);
    Signal::random_normal(shape, &mut rng)
}

/// The pooled 28x28 configuration: Haar J=3, modulus, S = (1, 2, 2),
/// low-pass outputs at every layer.
pub fn mnist_sequence() -> ModuleSequence {
    let layer = |n: usize, s: usize| {
        let bank = FilterBank::wavelet(WaveletFamily::Haar, 3, n, 2).unwrap();
        let chi = bank.output_atom().unwrap().clone();
        (
            ModuleDescriptor {
                bank,
                rho: NonLinearity::Modulus,
                pooling: if s == 1 {
                    PoolingOp::identity()
                } else {
                    PoolingOp::subsample(s).unwrap()
                },
            },
            Some(chi),
        )
    };
    let (m0, c0) = layer(28, 1);
    let (m1, c1) = layer(28, 2);
    let (m2, c2) = layer(14, 2);
    ModuleSequence::new(vec![m0, m1, m2], vec![c0, c1, c2])
        .unwrap()
        .normalized()
        .unwrap()
}

pub fn deep_1d_sequence(n: usize) -> ModuleSequence {
    let mut modules = Vec::new();
    let mut atoms = Vec::new();
    let mut len = n;
    for _ in 0..3 {
        let bank = FilterBank::wavelet(WaveletFamily::Haar, 3, len, 1).unwrap();
        let chi = bank.output_atom().unwrap().clone();
        modules.push(ModuleDescriptor {
            bank,
            rho: NonLinearity::Modulus,
            pooling: PoolingOp::subsample(2).unwrap(),
        });
        atoms.push(Some(chi));
        len /= 2;
    }
    ModuleSequence::new(modules, atoms).unwrap().normalized().unwrap()
}
