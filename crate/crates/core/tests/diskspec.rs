use weightlab_core::bessel::{bessel_zero, BesselOrder};
use weightlab_core::diskspec::{
    neumann_angular_upsilon1, neumann_radial_tau1, pm_eigenfunction_q2, pm_eigenvalue_q2, DiskSpectrumParams,
    Weinberger,
};

fn params(n: usize, alpha: f64, r: f64) -> DiskSpectrumParams {
    DiskSpectrumParams::new(n, alpha, r).unwrap()
}

#[test]
fn radial_root_is_next_order_zero() {
    for &(n, alpha) in &[(2, 0.5), (2, 1.0), (3, 0.25), (4, 1.5)] {
        let p = params(n, alpha, 1.0);
        let tau = neumann_radial_tau1(&p).unwrap();
        let nu0 = p.beta() / 2.0;
        let j = bessel_zero(BesselOrder::new(nu0 + 1.0).unwrap(), 1).unwrap().value;
        assert!((tau.root.value - j).abs() < 1e-9, "N={n} alpha={alpha}");
    }
    let tau = neumann_radial_tau1(&params(2, 1.0, 1.0)).unwrap();
    let j = bessel_zero(BesselOrder::new(1.5).unwrap(), 1).unwrap().value;
    assert!((tau.eigenvalue - j * j).abs() < 1e-8);
}

#[test]
fn eigenvalues_scale_with_inverse_square_radius() {
    for &r in &[0.5, 2.0, 3.0] {
        let one = params(3, 1.0, 1.0);
        let big = params(3, 1.0, r);
        let t1 = neumann_radial_tau1(&one).unwrap().eigenvalue;
        let tr = neumann_radial_tau1(&big).unwrap().eigenvalue;
        assert!((tr - t1 / (r * r)).abs() < 1e-10 * t1);
        let u1 = neumann_angular_upsilon1(&one).unwrap().eigenvalue;
        let ur = neumann_angular_upsilon1(&big).unwrap().eigenvalue;
        assert!((ur - u1 / (r * r)).abs() < 1e-10 * u1);
    }
}

#[test]
fn angular_value_tends_to_classical_neumann_value() {
    let u = neumann_angular_upsilon1(&params(2, 1e-9, 1.0)).unwrap();
    assert!((u.eigenvalue - 3.3899577167).abs() < 1e-6);
    assert_eq!(u.multiplicity, 2);
}

#[test]
fn angular_below_radial_and_root_chain() {
    for &n in &[2, 3, 4] {
        for &alpha in &[0.25, 0.5, 1.0, 1.5] {
            for &r in &[0.5, 1.0, 2.0] {
                let p = params(n, alpha, r);
                let tau = neumann_radial_tau1(&p).unwrap();
                let ups = neumann_angular_upsilon1(&p).unwrap();
                assert!(ups.eigenvalue < tau.eigenvalue - 1e-6, "N={n} alpha={alpha} R={r}");
                let nu1 = ups.order.nu();
                let j_nu1 = bessel_zero(ups.order, 1).unwrap().value;
                let j_nu0p1 = bessel_zero(BesselOrder::new(p.beta() / 2.0 + 1.0).unwrap(), 1)
                    .unwrap()
                    .value;
                assert!(ups.root.value < j_nu1 && j_nu1 < j_nu0p1, "nu1={nu1}");
            }
        }
    }
}

#[test]
fn closed_form_profile_solves_its_ode() {
    // at alpha = 1.5 the profile behaves like r^{1/2} at the origin and the
    // uniform-grid stencil error at r = 2h is ~4e-4; checked away from 0 below
    for &alpha in &[-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5] {
        let u = pm_eigenfunction_q2(alpha, 1.0, 0.0).unwrap();
        let first = if alpha > 1.0 { 100 } else { 2 };
        let two_lambda = u.spectrum.euler_eigenvalue;
        let phi = &u.profile;
        let n = 10_000;
        let h = 1.0 / n as f64;
        let mut worst = 0.0_f64;
        // stencils stay inside (0, 1], where the profile is evaluated
        for i in first..n {
            let r = i as f64 * h;
            let (a, b, c) = (phi.value(r - h), phi.value(r), phi.value(r + h));
            let d2 = (a - 2.0 * b + c) / (h * h);
            let d1 = (c - a) / (2.0 * h);
            let res = r * r * d2 + (alpha + 1.0) * r * d1 + (two_lambda * r * r - 1.0) * b;
            worst = worst.max(res.abs());
        }
        assert!(worst <= 1e-4, "alpha={alpha}: residual {worst}");
        assert!(
            phi.derivative(1.0).abs() <= 1e-6,
            "alpha={alpha}: phi'(1) = {}",
            phi.derivative(1.0)
        );
        for &(r, v) in phi.samples.iter().skip(1) {
            assert!(v > 0.0, "alpha={alpha}: phi({r}) = {v}");
        }
    }
}

#[test]
fn eigenfunction_vanishes_on_vertical_axis() {
    let u = pm_eigenfunction_q2(0.7, 1.0, 0.0).unwrap();
    for i in 1..20 {
        let r = i as f64 / 20.0;
        assert!(u.eval(r, std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}

#[test]
fn eigenvalue_is_lipschitz_in_alpha() {
    let h = 1e-4;
    // C from the derivative of x^2/2 in alpha, bounded by 2 over |alpha| <= 1.5
    for i in -15..15 {
        let a = i as f64 / 10.0;
        let l0 = pm_eigenvalue_q2(a).unwrap().eigenvalue;
        let l1 = pm_eigenvalue_q2(a + h).unwrap().eigenvalue;
        assert!((l1 - l0).abs() <= 2.0 * h, "alpha={a}: {}", (l1 - l0).abs() / h);
    }
}

#[test]
fn weinberger_g_is_continuous_and_monotone() {
    for &(n, alpha) in &[(2, 0.5), (2, 1.0), (3, 1.0), (3, 2.0)] {
        let w = Weinberger::new(params(n, alpha, 1.3)).unwrap();
        let rs = w.r_sharp();
        assert!((w.g(rs * (1.0 - 1e-12)).unwrap() - w.g(rs * (1.0 + 1e-12)).unwrap()).abs() < 1e-9);
        assert_eq!(w.g_prime(2.0 * rs).unwrap(), 0.0);
        let mut prev = w.g(0.0).unwrap();
        for i in 1..=300 {
            let r = 2.0 * rs * i as f64 / 300.0;
            let g = w.g(r).unwrap();
            assert!(g >= prev - 1e-15);
            prev = g;
        }
        let r = 1.7 * rs;
        let expect = (n as f64 - 1.0) / (r * r);
        assert!((w.n(r).unwrap() - expect).abs() < 1e-14);
    }
}

#[test]
fn weinberger_n_decreases() {
    for &(n, alpha) in &[(2, 0.5), (2, 1.0), (3, 1.0), (3, 2.0)] {
        let w = Weinberger::new(params(n, alpha, 1.0)).unwrap();
        let slopes = w.n_slopes(1e-3, 3.0 * w.r_sharp(), 1000).unwrap();
        for (r, s) in slopes {
            assert!(s < 0.0, "N={n} alpha={alpha}: slope {s} at r={r}");
        }
    }
}

#[test]
fn weinberger_outside_hypothesis_is_exploratory_only() {
    let p = params(2, -0.5, 1.0);
    assert!(Weinberger::new(p).is_err());
    let w = Weinberger::exploratory(p).unwrap();
    let slopes = w.n_slopes(1e-3, 3.0, 200).unwrap();
    assert_eq!(slopes.len(), 200);
}
