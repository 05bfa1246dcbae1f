use equires_core::catalog::object;
use equires_core::driver::{is_principal_monomial, principalize, resolve_embedded, DriverConfig};
use equires_core::{IdTriple, Poly, Ring};

fn triple(vars: &[&str], m: usize, gens: &[&str], e: &[&str]) -> IdTriple {
    let r = Ring::new(vars, m);
    let p = |s: &&str| r.parse(s).unwrap();
    let e: Vec<Poly> = e.iter().map(p).collect();
    IdTriple::new(vars, m, gens.iter().map(p).collect(), &e).unwrap()
}

#[test]
fn monomial_ideal_needs_no_step() {
    let r = principalize(&triple(&["x", "y"], 1, &["x*y"], &["x", "y"]), &DriverConfig::default()).unwrap();
    assert_eq!((r.e, r.ell), (0, 0));
    assert!(r.equisolvable());
}

#[test]
fn coordinate_ideal_needs_at_most_one_step() {
    let r = principalize(&triple(&["x"], 1, &["x"], &[]), &DriverConfig::default()).unwrap();
    assert!(r.ell <= 1 && r.equisolvable());
    assert!(is_principal_monomial(&r.run.last));
}

#[test]
fn cusp_ideal_is_equiprincipalizable() {
    // (y^2, x^3) -> x^2 (y^2, x) on the x-chart -> y (y, x) on the next y-chart -> principal.
    let r = principalize(&triple(&["x", "y"], 2, &["y^2", "x^3"], &[]), &DriverConfig::default()).unwrap();
    assert_eq!((r.e, r.ell), (3, 3));
    assert!(r.equisolvable());
    assert!(is_principal_monomial(&r.run.last));
}

#[test]
fn cusp_curve_is_separated_after_three_blowups() {
    for m in [1, 2] {
        let x = object(&["x", "y"], m, &["y^2 - x^3"], 1, &[]);
        let r = resolve_embedded(&x, &DriverConfig::default()).unwrap();
        assert_eq!((r.eta, r.e), (3, 3), "m = {m}");
        assert!(r.eta_lifts && r.failure.is_none());
        assert!(!r.strict.is_empty());
    }
}

#[test]
fn smooth_curve_is_its_own_center() {
    let x = object(&["x", "y"], 2, &["y - x^2 + eps*x"], 1, &[]);
    let r = resolve_embedded(&x, &DriverConfig::default()).unwrap();
    assert_eq!((r.eta, r.e), (0, 0));
    assert!(r.eta_lifts);
}

#[test]
fn nonreduced_curves_are_rejected() {
    let x = object(&["x", "y"], 1, &["y^2"], 1, &[]);
    assert!(resolve_embedded(&x, &DriverConfig::default()).is_err());
}
