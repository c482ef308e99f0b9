//! Property tests for the signal substrate.

use dfex::signal::{Shape, Signal};
use num_complex::Complex64;
use proptest::prelude::*;

fn complex_values(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec(
        (-100.0f64..100.0, -100.0f64..100.0).prop_map(|(re, im)| Complex64::new(re, im)),
        n,
    )
}

fn signal_1d(n: usize) -> impl Strategy<Value = Signal> {
    complex_values(n).prop_map(|v| Signal::new_1d(v).unwrap())
}

proptest! {
    #[test]
    fn parseval_holds(f in signal_1d(48)) {
        // |f_hat|_2^2 = N |f|_2^2 with the unnormalized transform.
        let lhs = f.dft().energy();
        let rhs = 48.0 * f.energy();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
    }

    #[test]
    fn convolution_commutes_with_translation(f in signal_1d(32), g in signal_1d(32), m in -64i64..64) {
        let a = f.translate(m).circ_conv(&g).unwrap();
        let b = f.circ_conv(&g).unwrap().translate(m);
        let scale = a.norms().sup.max(1.0);
        prop_assert!(a.max_abs_diff(&b) <= 1e-12 * scale.max(1e3));
    }

    #[test]
    fn delta_is_the_convolution_identity(f in signal_1d(24)) {
        let d = Signal::delta(Shape::OneD(24));
        let conv = f.circ_conv(&d).unwrap();
        prop_assert!(conv.max_abs_diff(&f) <= 1e-12 * f.norms().sup.max(1.0));
    }

    #[test]
    fn transform_routes_agree(f in signal_1d(20), g in signal_1d(20)) {
        let fast = f.circ_conv(&g).unwrap();
        let direct = f.circ_conv_direct(&g).unwrap();
        prop_assert!(fast.max_abs_diff(&direct) <= 1e-10 * direct.norms().sup.max(1.0));
    }

    #[test]
    fn inverse_transform_inverts(f in signal_1d(36)) {
        let back = f.dft().idft();
        prop_assert!(back.max_abs_diff(&f) <= 1e-12 * f.norms().sup.max(1.0));
    }

    #[test]
    fn norm_ordering(f in signal_1d(30)) {
        let n = f.norms();
        prop_assert!(n.l2 <= n.l1 + 1e-12 * n.l1.max(1.0));
        prop_assert!(n.sup <= n.l2 + 1e-12 * n.l2.max(1.0));
    }

    #[test]
    fn translation_inverts_exactly(f in signal_1d(16), m in -40i64..40) {
        prop_assert_eq!(f.translate(m).translate(-m), f);
    }
}

#[test]
fn parseval_in_two_dimensions() {
    let mut rng = dfex::verify::seeded_rng(61, 0);
    let f = Signal::random_normal(Shape::TwoD(12), &mut rng);
    let lhs = f.dft().energy();
    let rhs = 144.0 * f.energy();
    assert!((lhs - rhs).abs() <= 1e-10 * rhs);
}

#[test]
fn two_d_conv_routes_agree() {
    let mut rng = dfex::verify::seeded_rng(62, 0);
    let f = Signal::random_normal(Shape::TwoD(7), &mut rng);
    let g = Signal::random_normal(Shape::TwoD(7), &mut rng);
    let fast = f.circ_conv(&g).unwrap();
    let direct = f.circ_conv_direct(&g).unwrap();
    assert!(fast.max_abs_diff(&direct) < 1e-10);
}

#[test]
fn dft_handles_awkward_prime_lengths() {
    // 28 = 2^2 * 7 and 13 prime: the fast path must not depend on N's
    // factorization, and the direct route pins it down.
    for n in [13, 28, 100] {
        let mut rng = dfex::verify::seeded_rng(63, n as u64);
        let f = Signal::random_normal(Shape::OneD(n), &mut rng);
        assert!(f.dft().max_abs_diff(&f.dft_direct()) < 1e-9);
    }
}
