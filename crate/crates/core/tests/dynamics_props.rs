use ndarray::Array2;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use oscbath_core::algebra::ModeId;
use oscbath_core::effective::{compute_rates, LindbladChannel, SystemSpec};
use oscbath_core::lindblad::{build_ops, dissipator_apply, step, DensityMatrix, FockBasis, Liouvillian};
use oscbath_core::linalg::{eigenvalues, hermiticity_defect, max_abs, trace};
use oscbath_core::oracle::{
    heisenberg_matrix, normal_modes, symplectic_defect, track_occupations, two_mode_closed_form, MomentState,
    Propagator, QuadraticModel,
};

fn random_density(d: usize, entries: &[(f64, f64)]) -> Array2<C64> {
    let a = Array2::from_shape_fn((d, d), |(i, j)| {
        let (re, im) = entries[(i * d + j) % entries.len()];
        C64::new(re + 0.1 * i as f64, im - 0.07 * j as f64)
    });
    let rho = a.dot(&a.t().mapv(|z| z.conj()));
    let tr = trace(&rho);
    rho / tr
}

fn channel_pair() -> impl Strategy<Value = [LindbladChannel; 2]> {
    (0.0..1.0f64, 0.0..2.0f64, 0.0..1.0f64, 0.0..2.0f64).prop_map(|(gc, nc, gr, nr)| {
        [
            LindbladChannel::new(ModeId::c(), gc, nc),
            LindbladChannel::new(ModeId::r(), gr, nr),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn liouvillian_is_traceless_hermitian_and_matches_dense(
        dims in (2usize..5, 2usize..5),
        chans in channel_pair(),
        entries in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 7),
        detuning in (-0.5..0.5f64, -0.5..0.5f64),
    ) {
        let basis = FockBasis::new(dims.0, dims.1).unwrap();
        let rho = random_density(basis.dim(), &entries);
        let l = Liouvillian::new(basis, &chans).unwrap();
        let fast = l.apply(&rho);
        let ops = build_ops(basis);
        let mut dense = Array2::<C64>::zeros(rho.dim());
        for ch in &chans {
            dense = dense + dissipator_apply(&rho, ch, &ops).unwrap();
        }
        prop_assert!(max_abs(&(&fast - &dense)) < 1e-13);
        let with_h = l.with_detuning(detuning.0, detuning.1).apply(&rho);
        prop_assert!(trace(&with_h).norm() < 1e-13);
        prop_assert!(hermiticity_defect(&with_h) < 1e-13);
    }

    #[test]
    fn rk4_step_keeps_a_valid_state(
        chans in channel_pair(),
        entries in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 5),
    ) {
        let basis = FockBasis::new(4, 4).unwrap();
        let s = DensityMatrix::new(basis, random_density(basis.dim(), &entries)).unwrap();
        let l = Liouvillian::new(basis, &chans).unwrap();
        let mut cur = s;
        for _ in 0..50 {
            let (next, audit) = step(&cur, &l, 0.01).unwrap();
            prop_assert!(audit.trace_drift < 1e-12);
            cur = next;
        }
        prop_assert!((cur.trace() - 1.0).abs() < 1e-12);
        prop_assert!(cur.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn heisenberg_spectrum_is_paired_and_propagator_symplectic(
        wc in 0.5..2.0f64,
        wr in 0.2..1.5f64,
        g in 0.0..0.1f64,
        dt in 0.05..1.0f64,
    ) {
        let model = QuadraticModel::two_mode(wc, wr, g).unwrap();
        let mut ev = eigenvalues(&heisenberg_matrix(&model));
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        for k in 0..ev.len() / 2 {
            prop_assert!((ev[k] + ev[ev.len() - 1 - k]).norm() < 1e-10);
        }
        let p = Propagator::new(&model, dt).unwrap();
        prop_assert!(symplectic_defect(&p.p) < 1e-9);
        let w = normal_modes(&model);
        let (lo, hi) = two_mode_closed_form(wc, wr, g);
        prop_assert!((w[0] - lo).abs() < 1e-9 && (w[1] - hi).abs() < 1e-9);
    }

    #[test]
    fn uncoupled_occupations_are_conserved(
        freqs in prop::collection::vec(0.1..3.0f64, 2..6),
        occ in prop::collection::vec(0.0..2.0f64, 6),
    ) {
        let k = freqs.len();
        let labels = (0..k).map(|i| format!("m{i}")).collect();
        let model = QuadraticModel::new(labels, freqs, Array2::zeros((k, k))).unwrap();
        let prop = Propagator::new(&model, 0.3).unwrap();
        let tr = track_occupations(&occ[..k], &prop, &(0..k).collect::<Vec<_>>(), 30.0, None).unwrap();
        for (m, series) in tr.occupations.iter().enumerate() {
            prop_assert!(series.iter().all(|&n| (n - occ[m]).abs() < 1e-12));
        }
        let s = prop.apply(&MomentState::thermal(&occ[..k]));
        prop_assert!(s.normal_hermiticity_defect() < 1e-12);
    }

    #[test]
    fn effective_rates_scale_quadratically(
        g in 0.001..0.2f64,
        gamma in 0.001..0.2f64,
        wc in 0.5..2.0f64,
    ) {
        let base = compute_rates(&SystemSpec::new(wc, 0.4 * wc, g, gamma)).unwrap();
        let doubled_g = compute_rates(&SystemSpec::new(wc, 0.4 * wc, 2.0 * g, gamma)).unwrap();
        let doubled_gamma = compute_rates(&SystemSpec::new(wc, 0.4 * wc, g, 2.0 * gamma)).unwrap();
        prop_assert!((doubled_g.gamma_r_bar / base.gamma_r_bar - 4.0).abs() < 1e-12);
        prop_assert!((doubled_gamma.gamma_r_bar / base.gamma_r_bar - 4.0).abs() < 1e-12);
        prop_assert!((doubled_gamma.gamma_c_bar / base.gamma_c_bar - 4.0).abs() < 1e-12);
        prop_assert!((doubled_g.gamma_c_bar - base.gamma_c_bar).abs() <= 1e-15 * base.gamma_c_bar);
    }
}
