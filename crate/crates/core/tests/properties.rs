//! Property tests for the algebraic invariants of the matrix kernel and the
//! state constructors.

use num_complex::Complex;
use proptest::prelude::*;

use qbattery::qmath::Complex64;
use qbattery::*;

fn complex_entry() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex::new(re, im))
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex_entry(), n * n).prop_map(move |entries| {
        let g = ComplexMatrix::from_fn(n, n, |i, j| entries[i * n + j]);
        g.add(&g.adjoint()).scale_re(0.5)
    })
}

fn density(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex_entry(), n * n).prop_map(move |entries| {
        let g = ComplexMatrix::from_fn(n, n, |i, j| entries[i * n + j]);
        let gg = g.matmul(&g.adjoint());
        let tr = gg.trace().re.max(1e-6);
        gg.scale_re(1.0 / tr)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trace_of_kron_factorizes(a in hermitian(3), b in hermitian(4)) {
        let lhs = kron(&a, &b).trace();
        let rhs = a.trace() * b.trace();
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn partial_trace_over_everything_is_the_trace(m in hermitian(8)) {
        let dims = DimList::new(&[2, 2, 2]).unwrap();
        let all = partial_trace(&m, &dims, &[0, 1, 2]).unwrap();
        prop_assert!((all.trace() - m.trace()).norm() < 1e-12);
        // tracing in two stages agrees with one stage
        let step = partial_trace(&m, &dims, &[0, 1]).unwrap();
        let two = DimList::new(&[2, 2]).unwrap();
        let step = partial_trace(&step, &two, &[0]).unwrap();
        let once = partial_trace(&m, &dims, &[0]).unwrap();
        prop_assert!(step.max_abs_diff(&once) < 1e-12);
    }

    #[test]
    fn partial_transpose_is_an_involution(m in hermitian(8), which in 0usize..3) {
        let dims = DimList::new(&[2, 2, 2]).unwrap();
        let once = partial_transpose(&m, &dims, which).unwrap();
        let twice = partial_transpose(&once, &dims, which).unwrap();
        prop_assert!(twice.max_abs_diff(&m) < 1e-14);
    }

    #[test]
    fn permutation_preserves_the_spectrum(m in hermitian(8), k in 0usize..6) {
        let perms: [[usize; 3]; 6] =
            [[0,1,2],[0,2,1],[1,0,2],[1,2,0],[2,0,1],[2,1,0]];
        let dims = DimList::new(&[2, 2, 2]).unwrap();
        let (p, _) = permute_subsystems(&m, &dims, &perms[k]).unwrap();
        let (v1, _) = eig_hermitian(&m).unwrap();
        let (v2, _) = eig_hermitian(&p).unwrap();
        for (a, b) in v1.iter().zip(&v2) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn energy_is_linear_in_the_state(m1 in density(4), m2 in density(4), w in 0.0..1.0f64) {
        let dims = DimList::new(&[2, 2]).unwrap();
        let h = xy_hamiltonian(XYParams::new(0.4, -0.1, 0.8).unwrap());
        let r1 = DensityMatrix::new(m1.clone(), dims.clone()).unwrap();
        let r2 = DensityMatrix::new(m2.clone(), dims.clone()).unwrap();
        let mix = DensityMatrix::new(
            m1.scale_re(w).add(&m2.scale_re(1.0 - w)),
            dims,
        ).unwrap();
        let lhs = energy(&mix, &h).unwrap();
        let rhs = w * energy(&r1, &h).unwrap() + (1.0 - w) * energy(&r2, &h).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn purification_recovers_the_state(m in density(4)) {
        let rho = DensityMatrix::new(m, DimList::new(&[2, 2]).unwrap()).unwrap();
        let psi = purify(&rho, 1e-12).unwrap();
        prop_assert!(psi.is_pure());
        prop_assert!(
            psi.battery_marginal().matrix().max_abs_diff(rho.matrix()) < 1e-9
        );
    }

    #[test]
    fn controlled_x_stays_in_range(
        a in 0.0..std::f64::consts::PI,
        b in 0.0..4.0 * std::f64::consts::PI,
        g in 0.0..2.0 * std::f64::consts::PI,
    ) {
        let (_, x) = controlled_work_analytic(1.3, a, b, g);
        prop_assert!((-8.0 - 1e-12..=1e-12).contains(&x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn eigendecomposition_reconstructs_16x16(m in hermitian(16)) {
        let (vals, vecs) = eig_hermitian(&m).unwrap();
        let n = 16;
        let lambda = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j { Complex::new(vals[i], 0.0) } else { Complex::new(0.0, 0.0) }
        });
        let rec = vecs.matmul(&lambda).matmul(&vecs.adjoint());
        prop_assert!(rec.sub(&m).frobenius_norm() <= 1e-10 * m.frobenius_norm().max(1e-12));
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn local_maps_emit_valid_states(m in density(4), params in prop::collection::vec(0.0..1.5f64, 15)) {
        let rho = DensityMatrix::new(m, DimList::new(&[2, 2]).unwrap()).unwrap();
        let state = purify(&rho, 1e-12).unwrap();
        if state.d_env() * 2 == 4 {
            let u = cartan_unitary(&CartanParams::from_slice(&params).unwrap());
            let out = apply_local_map(&state, &u).unwrap();
            prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
            let rep = psd_check(out.matrix(), 1e-9);
            prop_assert!(rep.is_psd);
        }
    }
}
