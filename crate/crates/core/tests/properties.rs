use num_complex::Complex64;
use proptest::prelude::*;

use mhd2d::diagnostics::time_weight;
use mhd2d::harness::{decode_checkpoint, encode_checkpoint, make_initial_data, parse_config, RunConfig};
use mhd2d::integrator::viscous_semigroup;
use mhd2d::linear::{mode_spectrum, wave_symbol};
use mhd2d::physics::{PhysParams, PressureLaw, State};
use mhd2d::spectral::{random_smooth_field, Grid, ScalarField, VectorField};

fn grid_dims() -> impl Strategy<Value = (usize, usize)> {
    (prop::sample::select(vec![8usize, 12, 16, 32]), prop::sample::select(vec![8usize, 16, 24]))
}

fn state_on(g: &Grid, seed: u64, t: f64) -> State {
    let f = |s| random_smooth_field(g, seed.wrapping_mul(7).wrapping_add(s), 0.1, 0.5, true).unwrap();
    State::new(
        f(1),
        VectorField::new(f(2), f(3)).unwrap(),
        VectorField::new(f(4), f(5)).unwrap(),
        t,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_start_at_one_and_are_monotone(k in 0i32..4, sigma in 0.01f64..0.49, t in 0.0f64..100.0, dt in 0.0f64..10.0) {
        prop_assert_eq!(time_weight(k, sigma, 0.0), 1.0);
        let (a, b) = (time_weight(k, sigma, t), time_weight(k, sigma, t + dt));
        if k == 0 {
            prop_assert!(b <= a);
        } else {
            prop_assert!(b >= a);
        }
    }

    #[test]
    fn sobolev_norms_are_ordered((n1, n2) in grid_dims(), seed in any::<u64>(), s in 0.0f64..4.0) {
        let g = Grid::new(n1, n2).unwrap();
        let f = random_smooth_field(&g, seed, 1.0, 0.3, true).unwrap();
        prop_assert!(f.sobolev_norm(s) <= f.sobolev_norm(s + 0.5) * (1.0 + 1e-14));
        // zero mean: the homogeneous norm dominates the L² norm
        prop_assert!(f.l2_norm() <= f.homogeneous_norm(1.0) * (1.0 + 1e-14));
    }

    #[test]
    fn physical_round_trip_is_identity((n1, n2) in grid_dims(), seed in any::<u64>()) {
        let g = Grid::new(n1, n2).unwrap();
        let f = random_smooth_field(&g, seed, 1.0, 0.5, false).unwrap();
        let back = ScalarField::from_physical(&g, &f.to_physical());
        for (a, b) in f.coeffs().iter().zip(back.coeffs()) {
            prop_assert!((a - b).norm() < 1e-14);
        }
        prop_assert!(f.hermitian_defect() < 1e-15);
    }

    #[test]
    fn perp_grad_is_divergence_free((n1, n2) in grid_dims(), seed in any::<u64>()) {
        let g = Grid::new(n1, n2).unwrap();
        let psi = random_smooth_field(&g, seed, 1.0, 0.5, true).unwrap();
        let b = psi.perp_grad();
        prop_assert!(b.divergence().max_abs_coeff() <= 1e-15);
        prop_assert_eq!(b.x1.get(0, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn checkpoint_round_trip((n1, n2) in grid_dims(), seed in any::<u64>(), t in 0.0f64..1e3,
                             mu in 0.1f64..5.0, lambda in 0.0f64..2.0, gamma in 1.01f64..3.0) {
        let g = Grid::new(n1, n2).unwrap();
        let s = state_on(&g, seed, t);
        let p = PhysParams::new(mu, lambda, PressureLaw::gamma(gamma).unwrap()).unwrap();
        let bytes = encode_checkpoint(&s, &p);
        let (s2, p2) = decode_checkpoint(&bytes).unwrap();
        prop_assert_eq!(p2, p);
        prop_assert_eq!(encode_checkpoint(&s2, &p2), bytes);
    }

    #[test]
    fn truncated_checkpoints_are_rejected(seed in any::<u64>(), frac in 0.0f64..1.0) {
        let g = Grid::new(8, 8).unwrap();
        let bytes = encode_checkpoint(&state_on(&g, seed, 1.0), &PhysParams::default());
        let cut = ((bytes.len() as f64) * frac) as usize;
        prop_assert!(decode_checkpoint(&bytes[..cut.min(bytes.len() - 1)]).is_err());
    }

    #[test]
    fn config_text_round_trips(n in prop::sample::select(vec![8usize, 16, 64, 128]), seed in any::<u64>(),
                               eps in 0.0f64..0.1, sigma in 0.01f64..0.49, mu in 0.1f64..3.0,
                               t_end in 0.1f64..100.0, scheme in prop::bool::ANY) {
        let text = format!(
            "[grid]\nn1 = {n}\nn2 = {n}\n[phys]\nmu = {mu}\n[init]\nseed = {seed}\nepsilon = {eps}\n\
             [stepping]\nscheme = {}\n[diag]\nsigma = {sigma}\n[run]\nt_end = {t_end}\n",
            if scheme { "IFRK3" } else { "IFRK4" }
        );
        let c = parse_config(&text).unwrap();
        prop_assert_eq!(c.init.seed, seed);
        prop_assert_eq!(c.diag.sigma, sigma);
        let again: RunConfig = parse_config(&c.to_text()).unwrap();
        prop_assert_eq!(again, c);
    }

    #[test]
    fn initial_data_meets_contract(seed in any::<u64>(), eps in 1e-8f64..1e-1) {
        let mut c = parse_config("[grid]\nn1 = 16\nn2 = 16\n[run]\nt_end = 1\n").unwrap();
        c.init.seed = seed;
        c.init.epsilon = eps;
        let s = make_initial_data(&c).unwrap();
        prop_assert!(s.b.divergence().max_abs_coeff() <= 1e-15);
        prop_assert_eq!(s.mean_b(), (0.0, 0.0));
        prop_assert!((s.hs_norm_sum(c.diag.s) / eps - 1.0).abs() < 1e-12);
    }

    #[test]
    fn viscous_semigroup_contracts(k1 in -20i64..20, k2 in -20i64..20, dt in 0.0f64..1.0,
                                   mu in 0.1f64..3.0, lambda in 0.0f64..2.0) {
        let m = viscous_semigroup((k1, k2), dt, mu, lambda);
        // symmetric with eigenvalues in (0, 1]
        prop_assert!((m[0][1] - m[1][0]).abs() < 1e-15);
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        prop_assert!(tr / 2.0 + disc <= 1.0 + 1e-14);
        prop_assert!(tr / 2.0 - disc >= -1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn linear_modes_never_grow(k1 in -12i64..12, k2 in -12i64..12) {
        prop_assume!((k1, k2) != (0, 0));
        let sp = mode_spectrum((k1, k2)).unwrap();
        if k2 == 0 {
            prop_assert!(sp.spectral_abscissa.abs() < 1e-10);
            prop_assert_eq!(sp.kernel_dim, 1);
        } else {
            prop_assert!(sp.spectral_abscissa < 0.0);
        }
        let ksq = (k1 * k1 + k2 * k2) as f64;
        for l in &sp.eigenvalues {
            // every reduced eigenvalue is a root of the quartic symbol
            let a = l.norm();
            let size = (a * a + ksq * a + ksq).powi(2) + (k1 * k1) as f64 * ksq;
            let w = wave_symbol((k1, k2), *l).norm() / size;
            prop_assert!(w < 1e-10, "k=({},{}) λ={} residual {}", k1, k2, l, w);
        }
    }
}
