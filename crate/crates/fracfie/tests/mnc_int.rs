//! Measure-of-noncompactness diagnostics: modulus estimates against
//! hand-derived values, the Hausdorff estimate on equicontinuous families,
//! axiom proxies on seeded data, and frozen fixtures for the seeded Darbo
//! iteration.


use fracfie::fraccalc::GridFunction;
use fracfie::mnc::{
    check_generalized_darbo, darbo_iteration_diagnostic, family_modulus, gamma0_estimate,
    hausdorff_mnc, modulus_of_continuity, sample_family, verify_mnc_axioms, AlphaFunction,
    FunctionFamily, SigmaFunction,
};
use fracfie::problems::builtin;
use fracfie::solver::apply_h;
use std::sync::Arc;

fn grid(n: usize, f: impl Fn(f64) -> f64) -> GridFunction {
    GridFunction::from_fn((0.0, 1.0), n, f).unwrap()
}

#[test]
fn modulus_of_monotone_function_is_increment_over_window() {
    // For nondecreasing f the modulus at theta is f(b) - f(b - theta)
    // maximized over b; for f = beta^2 on [0,1] that is 1 - (1-theta)^2
    let f = grid(2001, |x| x * x);
    for theta in [0.05f64, 0.1, 0.25] {
        let m = modulus_of_continuity(&f, theta).unwrap();
        let exact = 1.0 - (1.0 - theta) * (1.0 - theta);
        assert!((m - exact).abs() <= 1e-9, "theta={theta}: {m} vs {exact}");
    }
}

#[test]
fn family_modulus_of_union_is_max() {
    let a = FunctionFamily::new(vec![grid(801, |x| x), grid(801, |x| 0.3 * (4.0 * x).sin())])
        .unwrap();
    let b = FunctionFamily::new(vec![grid(801, |x| x * x), grid(801, |x| 1.0 - x)]).unwrap();
    let u = a.union(&b).unwrap();
    for theta in [0.0125f64, 0.05, 0.2] {
        let ga = family_modulus(&a, theta).unwrap();
        let gb = family_modulus(&b, theta).unwrap();
        let gu = family_modulus(&u, theta).unwrap();
        assert_eq!(gu, ga.max(gb), "theta={theta}");
    }
}

#[test]
fn hausdorff_estimate_vanishes_on_equicontinuous_family() {
    // {beta, beta^2} is a finite family of Lipschitz functions, so the
    // extrapolated gamma_0 (and the Hausdorff estimate, half of it) is 0 up
    // to the linear-extrapolation error. Oracle: gamma(theta) ~ 2 theta for
    // small theta (slope of beta^2 near 1 dominates), so extrapolating the
    // two smallest tabulated values to theta = 0 leaves O(theta^2).
    let fam = FunctionFamily::new(vec![grid(4001, |x| x), grid(4001, |x| x * x)]).unwrap();
    let thetas = [0.08, 0.04, 0.02, 0.01];
    let profile = gamma0_estimate(&fam, &thetas).unwrap();
    for (t, v) in thetas.iter().zip(&profile.values) {
        let exact = 1.0 - (1.0 - t) * (1.0 - t); // beta^2 dominates beta
        assert!((v - exact).abs() <= 1e-6, "gamma({t}) = {v} vs {exact}");
    }
    assert!(
        profile.extrapolated_gamma0 <= 1e-3,
        "gamma_0 estimate {} should be near zero",
        profile.extrapolated_gamma0
    );
    let h = hausdorff_mnc(&fam, &thetas).unwrap();
    assert_eq!(h, 0.5 * profile.extrapolated_gamma0);
}

#[test]
fn hausdorff_estimate_detects_oscillation_floor() {
    // A family with ever-faster oscillation of fixed amplitude has
    // gamma(theta) pinned at twice the amplitude for every resolvable theta
    let members: Vec<GridFunction> = (1..=6)
        .map(|k| grid(4001, move |x| 0.5 * (3.0f64.powi(k) * x).sin()))
        .collect();
    let fam = FunctionFamily::new(members).unwrap();
    let profile = gamma0_estimate(&fam, &[0.2, 0.1, 0.05, 0.025]).unwrap();
    assert!(
        (profile.extrapolated_gamma0 - 1.0).abs() <= 0.05,
        "expected gamma_0 near 1.0, got {}",
        profile.extrapolated_gamma0
    );
}

#[test]
fn generalized_darbo_reduces_to_plain_contraction() {
    // With alpha == 1 and sigma == w the inequality collapses to
    // psi(PG) <= w psi(G)
    let alpha = AlphaFunction::one();
    for (psi_pg, psi_g, w, l) in [
        (0.4, 1.0, 0.5, 2.0),
        (0.6, 1.0, 0.5, 2.0),
        (0.0, 0.0, 0.9, 1.5),
        (5.0, 9.0, 0.75, 9.0),
    ] {
        let sigma = SigmaFunction::constant(w).unwrap();
        let got = check_generalized_darbo(psi_pg, psi_g, &alpha, &sigma, l).unwrap();
        assert_eq!(got, psi_pg <= w * psi_g, "case ({psi_pg}, {psi_g}, {w}, {l})");
    }
}

#[test]
fn generalized_darbo_with_nontrivial_alpha() {
    // alpha(x) = 1 + x amplifies the left side, so a pair that passes the
    // plain contraction can fail the generalized inequality
    let alpha = AlphaFunction::new(Arc::new(|x: f64| 1.0 + x)).unwrap();
    let sigma = SigmaFunction::constant(0.5).unwrap();
    assert!(!check_generalized_darbo(0.4, 1.0, &alpha, &sigma, 2.0).unwrap());
    // near-compact image: psi(PG) ~ 0 keeps the exponent at 1
    assert!(check_generalized_darbo(0.0, 1.0, &alpha, &sigma, 2.0).unwrap());
    // l must exceed 1
    assert!(check_generalized_darbo(0.1, 1.0, &alpha, &sigma, 1.0).is_err());
}

#[test]
fn axiom_proxies_hold_on_seeded_families() {
    let superfamily = sample_family((0.0, 1.0), 257, 6, 1.0, 42).unwrap();
    let family = FunctionFamily::new(superfamily.members()[..3].to_vec()).unwrap();
    let report = verify_mnc_axioms(&family, &superfamily, 0.05).unwrap();
    assert!(report.all_passed, "{report:?}");
    for check in &report.checks {
        if check.decidable {
            assert!(check.passed, "{}: {}", check.axiom, check.detail);
        }
    }
}

#[test]
fn darbo_diagnostic_identity_operator_is_flat() {
    let seed = sample_family((0.0, 1.0), 257, 8, 0.4, 7).unwrap();
    let g0 = family_modulus(&seed, 0.05).unwrap();
    let gammas = darbo_iteration_diagnostic(|g| Ok(g.clone()), &seed, 5, 0.05, 0, 7).unwrap();
    assert_eq!(gammas.len(), 5);
    for g in &gammas {
        assert!((g - g0).abs() <= 1e-12, "identity drifted: {gammas:?}");
    }
}

#[test]
fn darbo_diagnostic_constant_family_is_zero() {
    let members = vec![
        GridFunction::constant((0.0, 1.0), 257, 0.1).unwrap(),
        GridFunction::constant((0.0, 1.0), 257, -0.2).unwrap(),
    ];
    let seed = FunctionFamily::new(members).unwrap();
    let gammas = darbo_iteration_diagnostic(|g| Ok(g.clone()), &seed, 4, 0.05, 8, 3).unwrap();
    for g in &gammas {
        assert!(*g <= 1e-12, "constants should have zero modulus: {gammas:?}");
    }
}

#[test]
fn darbo_diagnostic_regression_fixture() {
    // Frozen sequence for the example-1 operator; the sequence is not
    // monotone at finite theta, but every step obeys the one-step bound
    // gamma_{q+1} <= P1 gamma_q + c(theta) checked in the solver suite
    let p = builtin("example1").unwrap();
    let seed = sample_family((0.0, 1.0), 257, 8, p.e0.unwrap(), 12345).unwrap();
    let gammas =
        darbo_iteration_diagnostic(|g| apply_h(&p, g), &seed, 6, 0.05, 16, 12345).unwrap();
    let frozen = [
        0.157793584114168,
        0.04532931624748554,
        0.026655665349884172,
        0.035686857885493084,
        0.04014909251007337,
        0.042105610573945906,
    ];
    assert_eq!(gammas.len(), frozen.len());
    for (g, f) in gammas.iter().zip(&frozen) {
        assert!((g - f).abs() <= 1e-12, "fixture drift: {gammas:?}");
    }
    let p1 = 0.25;
    let c_theta = 0.053351852004227145;
    for w in gammas.windows(2) {
        assert!(
            w[1] <= p1 * w[0] + c_theta + 1e-12,
            "one-step bound violated: {} -> {}",
            w[0],
            w[1]
        );
    }
}

#[test]
fn sampled_families_respect_bound_and_determinism() {
    let a = sample_family((0.0, 1.0), 257, 8, 0.4, 999).unwrap();
    let b = sample_family((0.0, 1.0), 257, 8, 0.4, 999).unwrap();
    assert!(a.bound() <= 0.4 + 1e-12);
    for (x, y) in a.members().iter().zip(b.members()) {
        assert_eq!(x.values(), y.values(), "same seed must reproduce members");
    }
    let c = sample_family((0.0, 1.0), 257, 8, 0.4, 1000).unwrap();
    assert!(
        a.members()[0].values() != c.members()[0].values(),
        "different seeds should differ"
    );
}
