use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use weightlab_core::grid::{GridFunction, PolarGrid};
use weightlab_core::rearrange::*;
use weightlab_core::varsolve::{pm_min, RayleighParams, SolverSettings};

fn grid(m: usize, k: usize) -> PolarGrid {
    PolarGrid::new(m, k, 1e-4, 1.05).unwrap()
}

fn random_field(g: &PolarGrid, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    GridFunction::from_values(g, false, values).unwrap()
}

fn sorted_ring(u: &GridFunction, i: usize) -> Vec<f64> {
    let mut r = u.ring(i).to_vec();
    r.sort_by(|a, b| a.total_cmp(b));
    r
}

fn same_ring_multisets(a: &GridFunction, b: &GridFunction) -> bool {
    (0..=a.grid.m()).all(|i| sorted_ring(a, i) == sorted_ring(b, i))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn two_point_preserves_rings_and_is_idempotent(seed in 0u64..10_000, j in 0usize..32) {
        let g = grid(10, 16);
        let u = random_field(&g, seed);
        let h = compatible_halfspaces(&g)[j];
        let uh = two_point(&u, &h).unwrap();
        prop_assert!(same_ring_multisets(&u, &uh));
        prop_assert_eq!(two_point(&uh, &h).unwrap(), uh.clone());
        let (e, eh) = two_point_energy_check(&u, &h, 0.5).unwrap();
        prop_assert!(eh <= e * (1.0 + 1e-12));
    }

    #[test]
    fn foliated_schwarz_preserves_rings_and_passes_test(seed in 0u64..10_000, pole in 0usize..16) {
        let g = grid(8, 16);
        let u = random_field(&g, seed);
        let theta0 = g.theta(pole);
        let s = foliated_schwarz(&u, theta0).unwrap();
        prop_assert!(same_ring_multisets(&u, &s));
        prop_assert_eq!(foliated_schwarz(&s, theta0).unwrap(), s.clone());
        let report = fss_test(&s, 0.0).unwrap();
        prop_assert!(report.symmetric, "violation {}", report.worst_violation);
    }

    #[test]
    fn hardy_littlewood_chain(seed in 0u64..100_000, alpha in -1.5..1.5f64) {
        let g = grid(12, 16);
        let u = random_field(&g, seed);
        let v = random_field(&g, seed + 1_000_003);
        let hl = hardy_littlewood_check(&u, &v, alpha).unwrap();
        prop_assert!(hl.holds(1e-13), "{:?}", hl);
        prop_assert!((hl.sharp_upper - hl.upper).abs() <= 1e-12 * hl.upper);
    }
}

#[test]
fn already_ordered_field_is_fixed_by_two_point() {
    // u = cos(theta) is larger on {x_1 > 0} than at the mirror point
    let g = grid(10, 16);
    let u = GridFunction::from_fn(&g, false, |r, t| r * t.cos());
    let h = HalfSpace2D::new(0.0).unwrap();
    assert_eq!(two_point(&u, &h).unwrap(), u);
    let (e, eh) = two_point_energy_check(&u, &h, 0.0).unwrap();
    assert!((e - eh).abs() <= 1e-12 * e);
    let opposite = HalfSpace2D::new(PI).unwrap();
    let uh = two_point(&u, &opposite).unwrap();
    let expected = GridFunction::from_fn(&g, false, |r, t| -r * t.cos());
    for (a, b) in uh.values.iter().zip(&expected.values) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn energy_is_preserved_when_swap_regions_are_half_planes() {
    let g = grid(40, 64);
    for &(theta0, hj) in &[(0.3, 5usize), (2.0, 17), (4.0, 100)] {
        let u = GridFunction::from_fn(&g, false, |r, t| (1.0 - r * r) * r * (t - theta0).cos() + 0.3 * r * r);
        let h = compatible_halfspaces(&g)[hj];
        let (e, eh) = two_point_energy_check(&u, &h, 0.7).unwrap();
        assert!((e - eh).abs() <= 1e-12 * e, "{e} vs {eh}");
    }
}

#[test]
fn random_fields_lose_energy_under_two_point() {
    // node-wise polarization of a rough field strictly lowers the discrete energy
    let g = grid(20, 64);
    let mut strict = 0;
    for seed in 0..100 {
        let u = random_field(&g, seed);
        let (e, eh) = two_point_energy_check(&u, &HalfSpace2D::new(PI / 64.0 * 3.0).unwrap(), 0.5).unwrap();
        assert!(eh <= e * (1.0 + 1e-12));
        if eh < e * (1.0 - 1e-12) {
            strict += 1;
        }
    }
    assert!(strict > 90);
}

#[test]
fn symmetric_field_has_equal_energies() {
    let g = grid(16, 32);
    let h = compatible_halfspaces(&g)[7];
    let base = random_field(&g, 9);
    let mut u = base.clone();
    let mirrored = reflected(&base, &h).unwrap();
    for (a, b) in u.values.iter_mut().zip(&mirrored.values) {
        *a += b;
    }
    let (e, eh) = two_point_energy_check(&u, &h, -0.5).unwrap();
    assert!((e - eh).abs() <= 1e-12 * e);
}

#[test]
fn radial_and_cosine_fields_are_foliated_schwarz_symmetric() {
    let g = grid(12, 32);
    let radial = GridFunction::from_fn(&g, false, |r, _| 1.0 - r);
    assert_eq!(foliated_schwarz(&radial, 0.0).unwrap(), radial);
    let theta0 = g.theta(5);
    let cosine = GridFunction::from_fn(&g, false, |r, t| r * (t - theta0).cos());
    let s = foliated_schwarz(&cosine, theta0).unwrap();
    for (a, b) in s.values.iter().zip(&cosine.values) {
        assert!((a - b).abs() < 1e-15);
    }
    let report = fss_test(&cosine, 1e-12).unwrap();
    assert!(report.symmetric);
    assert!((report.pole - theta0).abs() < 1e-10);
}

#[test]
fn second_harmonic_is_not_foliated_schwarz_symmetric() {
    let g = grid(12, 32);
    let u = GridFunction::from_fn(&g, false, |r, t| r * (2.0 * t).cos());
    let report = fss_test(&u, 1e-6).unwrap();
    assert!(!report.symmetric);
    assert!(report.worst_violation > 0.1);
}

#[test]
fn mean_zero_minimizers_are_foliated_schwarz_symmetric() {
    let s = SolverSettings::default().with_grid(100, 64);
    for &q in &[2.0, 3.0] {
        for &alpha in &[-1.0, 0.5] {
            let res = pm_min(&RayleighParams::mean_zero(q, alpha).unwrap(), &s).unwrap();
            let report = fss_test(&res.minimizer, 1e-6).unwrap();
            assert!(report.symmetric, "q={q} alpha={alpha}: {report:?}");
        }
    }
}

#[test]
fn profile_of_constant_and_total_measure() {
    let g = grid(30, 16);
    let c = GridFunction::from_fn(&g, false, |_, _| -2.5);
    for &alpha in &[-1.0, 0.0, 1.5] {
        let p = weighted_decreasing_rearrangement(&c, alpha).unwrap();
        assert_eq!(p.values, vec![2.5]);
        let exact = 2.0 * PI / (2.0 + alpha);
        assert!((p.total_measure() - exact).abs() < 1e-12 * exact);
        assert!((p.r_sharp() - 1.0).abs() < 1e-12);
        assert_eq!(p.decreasing(0.3), 2.5);
        assert_eq!(p.increasing(0.3), 2.5);
    }
}

#[test]
fn profile_is_nonincreasing_and_reflects() {
    let g = grid(20, 16);
    let u = random_field(&g, 4);
    let p = weighted_decreasing_rearrangement(&u, 0.5).unwrap();
    assert!(p.values.windows(2).all(|w| w[0] > w[1]));
    assert!(p.breakpoints.windows(2).all(|w| w[0] < w[1]));
    let t = p.total_measure();
    for n in 1..50 {
        let s = t * n as f64 / 50.0 + 1e-9;
        assert_eq!(p.increasing(s), p.decreasing(t - s));
    }
}

#[test]
fn radial_decreasing_field_is_its_own_sharp_rearrangement() {
    let g = grid(60, 32);
    let u = GridFunction::from_fn(&g, false, |r, _| (1.0 - r * r).exp());
    let p = weighted_decreasing_rearrangement(&u, 0.5).unwrap();
    let r = g.radii();
    for i in 1..g.m() {
        let lo = u.at(i + 1, 0).min(u.at(i - 1, 0));
        let hi = u.at(i + 1, 0).max(u.at(i - 1, 0));
        let v = p.sharp(r[i]);
        assert!(v >= lo && v <= hi, "ring {i}: {v} not in [{lo}, {hi}]");
    }
}

#[test]
fn hardy_littlewood_trivial_cases() {
    let g = grid(20, 16);
    let u = random_field(&g, 11);
    let one = GridFunction::from_fn(&g, false, |_, _| 1.0);
    let hl = hardy_littlewood_check(&u, &one, 0.5).unwrap();
    for x in [hl.lower, hl.upper, hl.sharp_upper] {
        assert!((x - hl.middle).abs() <= 1e-13 * hl.middle);
    }
    let sq = hardy_littlewood_check(&u, &u, 0.5).unwrap();
    assert!((sq.upper - sq.middle).abs() <= 1e-13 * sq.middle);
}

#[test]
fn hardy_littlewood_thousand_pairs() {
    let g = grid(64, 64);
    for seed in 0..1000 {
        let u = random_field(&g, 2 * seed);
        let v = random_field(&g, 2 * seed + 1);
        assert!(hardy_littlewood_check(&u, &v, 1.0).unwrap().holds(1e-13), "seed {seed}");
    }
}
