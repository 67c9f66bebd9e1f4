use weightlab_core::diskspec::{neumann_angular_upsilon1, DiskSpectrumParams};
use weightlab_core::varsolve::{sw_compare, FeSettings, SymmetricDomain};
use weightlab_core::Error;

fn fe() -> FeSettings {
    FeSettings {
        rings: 32,
        directions: 64,
    }
}

#[test]
fn disk_is_an_equality_case() {
    for &alpha in &[0.5, 1.0] {
        let c = sw_compare(&SymmetricDomain::Disk { radius: 1.0 }, alpha, 2, &fe()).unwrap();
        assert!((c.r_sharp - 1.0).abs() < 1e-12);
        assert!((c.mu_domain - c.mu_ball).abs() <= c.mu_domain_err, "{c:?}");
        assert!((c.mu_ball_fe / c.mu_ball - 1.0).abs() < 5e-3);
        assert!((c.certificate - c.mu_ball).abs() < 1e-8 * c.mu_ball);
        assert!(c.inequality_holds());
    }
}

#[test]
fn square_is_strictly_below_equal_measure_disk() {
    for &alpha in &[0.5, 1.0] {
        let c = sw_compare(&SymmetricDomain::square(1.0), alpha, 2, &fe()).unwrap();
        let ball = DiskSpectrumParams::new(2, alpha, c.r_sharp).unwrap();
        let closed = neumann_angular_upsilon1(&ball).unwrap().eigenvalue;
        assert!((c.mu_ball - closed).abs() < 1e-12 * closed);
        assert!(c.strict(), "{c:?}");
        // Weinberger's test functions bound mu(Omega) from above and mu(ball) from below
        assert!(c.certificate + c.mu_domain_err >= c.mu_domain);
        assert!(c.certificate <= c.mu_ball);
        let rec = c.to_record();
        assert!(rec.flags["inequality_holds"] && rec.flags["strict"]);
    }
}

#[test]
fn scaling_leaves_comparison_invariant() {
    let a = sw_compare(&SymmetricDomain::regular_hexagon(1.0), 1.0, 2, &fe()).unwrap();
    let b = sw_compare(&SymmetricDomain::regular_hexagon(2.0), 1.0, 2, &fe()).unwrap();
    assert!((b.mu_domain * 4.0 / a.mu_domain - 1.0).abs() < 1e-9);
    assert!((b.mu_ball * 4.0 / a.mu_ball - 1.0).abs() < 1e-9);
    assert!(a.inequality_holds() && a.mu_domain < a.mu_ball);
}

#[test]
fn weighted_measure_of_square() {
    // int_{[-1,1]^2} |x| dx = (4/3)(sqrt 2 + asinh 1)
    let exact = 4.0 / 3.0 * (2f64.sqrt() + 1f64.asinh());
    let m = SymmetricDomain::square(2.0).weighted_measure(1.0).unwrap();
    assert!((m - exact).abs() < 1e-12, "{m} vs {exact}");
    let disk = SymmetricDomain::Disk { radius: 1.5 }.weighted_measure(0.0).unwrap();
    assert!((disk - std::f64::consts::PI * 2.25).abs() < 1e-12);
}

#[test]
fn rejects_asymmetric_and_malformed_domains() {
    let tri = SymmetricDomain::Polygon {
        vertices: vec![(1.0, 0.0), (-0.5, 0.8), (-0.5, -0.8)],
    };
    assert!(matches!(sw_compare(&tri, 1.0, 2, &fe()), Err(Error::Symmetry(_))));
    let cw = SymmetricDomain::Polygon {
        vertices: vec![(1.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (-1.0, 1.0)],
    };
    assert!(matches!(sw_compare(&cw, 1.0, 2, &fe()), Err(Error::Mesh(_))));
    let sq = SymmetricDomain::square(1.0);
    assert!(matches!(sw_compare(&sq, 0.0, 2, &fe()), Err(Error::Hypothesis { .. })));
    assert!(matches!(sw_compare(&sq, 2.0, 2, &fe()), Err(Error::Hypothesis { .. })));
    assert!(matches!(sw_compare(&sq, 1.0, 3, &fe()), Err(Error::Hypothesis { .. })));
}
