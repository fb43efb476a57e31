//! Quadrature accuracy checks against independent oracles: analytic power
//! rules, an adaptive-quadrature evaluation of the defining singular
//! integral, the nested integer-order form, and the semigroup identity.

mod common;

use fracfie::fraccalc::{
    iterated_weighted_integral, weighted_fractional_derivative, weighted_fractional_integral,
    GridFunction, KernelSpec, WarpFunction, WeightFunction,
};
use fracfie::special::gamma;
use std::sync::Arc;

#[test]
fn gamma_matches_integral_definition_oracle() {
    for x in [1.0 / 3.0, 0.5, 4.0 / 3.0, 1.5, 2.75, 5.0, 9.5] {
        let fast = gamma(x).unwrap();
        let slow = common::gamma_oracle(x);
        assert!(
            (fast - slow).abs() <= 1e-9 * slow.abs(),
            "gamma({x}): {fast} vs oracle {slow}"
        );
    }
    assert!((gamma(4.0 / 3.0).unwrap() - common::GAMMA_4_3).abs() < 1e-12);
    assert!((gamma(1.5).unwrap() - common::GAMMA_3_2).abs() < 1e-12);
}

#[test]
fn power_rule_constant_input_is_exact() {
    // For h == 1 the piecewise-linear interpolant is exact, so the product
    // quadrature reproduces z^delta / Gamma(delta + 1) to rounding error.
    for delta in [1.0 / 3.0, 0.5, 0.75] {
        let spec = KernelSpec::riemann_liouville(delta, (0.0, 1.0)).unwrap();
        let h = GridFunction::constant((0.0, 1.0), 1025, 1.0).unwrap();
        let out = weighted_fractional_integral(&h, &spec).unwrap();
        let gd1 = gamma(delta + 1.0).unwrap();
        for i in 0..h.n() {
            let exact = out.node(i).powf(delta) / gd1;
            assert!(
                (out.values()[i] - exact).abs() <= 1e-12,
                "delta={delta} node {i}: {} vs {exact}",
                out.values()[i]
            );
        }
    }
}

#[test]
fn linear_input_matches_analytic_and_quadrature_oracle() {
    // J^{1/2} of h(z) = z is z^{3/2} Gamma(2) / Gamma(5/2); h is piecewise
    // linear so the scheme is again exact up to rounding.
    let spec = KernelSpec::riemann_liouville(0.5, (0.0, 1.0)).unwrap();
    let h = GridFunction::from_fn((0.0, 1.0), 1025, |z| z).unwrap();
    let out = weighted_fractional_integral(&h, &spec).unwrap();
    let ratio = gamma(2.0).unwrap() / gamma(2.5).unwrap();
    assert!((ratio - 0.7522527780636750).abs() < 1e-12);
    for i in 0..h.n() {
        let exact = out.node(i).powf(1.5) * ratio;
        assert!(
            (out.values()[i] - exact).abs() <= 1e-12,
            "node {i}: {} vs {exact}",
            out.values()[i]
        );
    }
    // cross-check three nodes against the defining integral evaluated by
    // adaptive quadrature after removing the singularity
    for i in [307usize, 717, 1024] {
        let z = out.node(i);
        let oracle = common::rl_integral_oracle(&|x| x, z, 0.5, 1e-12);
        assert!(
            (out.values()[i] - oracle).abs() <= 1e-9,
            "z={z}: {} vs oracle {oracle}",
            out.values()[i]
        );
    }
}

#[test]
fn smooth_input_against_quadrature_oracle() {
    let delta = 1.0 / 3.0;
    let spec = KernelSpec::riemann_liouville(delta, (0.0, 1.0)).unwrap();
    let h = GridFunction::from_fn((0.0, 1.0), 2049, |z| (1.0 + z).ln() * (2.0 * z).cos()).unwrap();
    let out = weighted_fractional_integral(&h, &spec).unwrap();
    for z in [0.25f64, 0.5, 1.0] {
        let i = (z * 2048.0).round() as usize;
        let oracle =
            common::rl_integral_oracle(&|x: f64| (1.0 + x).ln() * (2.0 * x).cos(), z, delta, 1e-12);
        assert!(
            (out.values()[i] - oracle).abs() <= 1e-5,
            "z={z}: {} vs oracle {oracle}",
            out.values()[i]
        );
    }
}

#[test]
fn integer_order_matches_nested_quadrature() {
    // delta = 2 through the singular product quadrature vs the literal
    // two-fold nested integral, with a nontrivial weight
    let weight = WeightFunction::new(Arc::new(|x: f64| 1.0 + x));
    let spec = KernelSpec::new(2.0, WarpFunction::identity(), weight, (0.0, 1.0)).unwrap();
    let h = GridFunction::constant((0.0, 1.0), 2049, 1.0).unwrap();
    let a = weighted_fractional_integral(&h, &spec).unwrap();
    let b = iterated_weighted_integral(&h, &spec, 2).unwrap();
    let diff = a.sup_distance(&b).unwrap();
    assert!(diff <= 5e-4, "integer-order disagreement {diff}");
}

#[test]
fn semigroup_property_first_order() {
    // J^{1/2} J^{1/2} h should approach J^1 h at first order in the spacing
    let mut errs = Vec::new();
    for n in [257usize, 513, 1025] {
        let half = KernelSpec::riemann_liouville(0.5, (0.0, 1.0)).unwrap();
        let one = KernelSpec::riemann_liouville(1.0, (0.0, 1.0)).unwrap();
        let h = GridFunction::from_fn((0.0, 1.0), n, |z| (2.0 * z).cos()).unwrap();
        let jj =
            weighted_fractional_integral(&weighted_fractional_integral(&h, &half).unwrap(), &half)
                .unwrap();
        let j1 = weighted_fractional_integral(&h, &one).unwrap();
        errs.push(jj.sup_distance(&j1).unwrap());
    }
    assert!(errs[0] <= 1e-3, "coarse semigroup error {}", errs[0]);
    assert!(errs[1] / errs[0] < 0.6, "no first-order decay: {errs:?}");
    assert!(errs[2] / errs[1] < 0.6, "no first-order decay: {errs:?}");
}

#[test]
fn derivative_inverts_integral() {
    // D^{1/2} J^{1/2} h recovers h; error shrinks at first order
    let mut errs = Vec::new();
    for n in [257usize, 513, 1025] {
        let spec = KernelSpec::riemann_liouville(0.5, (0.0, 1.0)).unwrap();
        let h = GridFunction::from_fn((0.0, 1.0), n, |z| (1.5 * z).sin()).unwrap();
        let j = weighted_fractional_integral(&h, &spec).unwrap();
        let d = weighted_fractional_derivative(&j, &spec).unwrap();
        errs.push(d.sup_distance(&h).unwrap());
    }
    assert!(errs[2] <= 5e-4, "inversion error {}", errs[2]);
    assert!(errs[1] / errs[0] < 0.6, "no first-order decay: {errs:?}");
    assert!(errs[2] / errs[1] < 0.6, "no first-order decay: {errs:?}");
}

#[test]
fn fractional_derivative_of_sqrt_is_constant() {
    // D^{1/2} z^{1/2} = Gamma(3/2) for all z; accuracy degrades only near
    // the endpoint singularity of sqrt, so assert away from the origin
    let n = 1025;
    let spec = KernelSpec::riemann_liouville(0.5, (0.0, 1.0)).unwrap();
    let h = GridFunction::from_fn((0.0, 1.0), n, |z| z.sqrt()).unwrap();
    let d = weighted_fractional_derivative(&h, &spec).unwrap();
    let g32 = gamma(1.5).unwrap();
    let interior: f64 = (n / 4..n)
        .map(|i| (d.values()[i] - g32).abs())
        .fold(0.0, f64::max);
    assert!(interior <= 5e-5, "interior error {interior}");
}

#[test]
fn quadratic_warp_against_substituted_oracle() {
    // U(eta) = eta^2 turns J^{1/2}_U h at z into the plain Riemann-Liouville
    // integral of h(sqrt(u)) evaluated at U(z)
    let warp = WarpFunction::new(Arc::new(|x: f64| x * x), Arc::new(|x: f64| 2.0 * x));
    let spec = KernelSpec::new(0.5, warp, WeightFunction::one(), (0.0, 1.0)).unwrap();
    let h = GridFunction::from_fn((0.0, 1.0), 2049, |z| 1.0 + z * z).unwrap();
    let out = weighted_fractional_integral(&h, &spec).unwrap();
    for i in [1024usize, 1638, 2048] {
        let z = out.node(i);
        let oracle = common::rl_integral_oracle(&|u: f64| 1.0 + u, z * z, 0.5, 1e-12);
        assert!(
            (out.values()[i] - oracle).abs() <= 1e-4,
            "z={z}: {} vs oracle {oracle}",
            out.values()[i]
        );
    }
}
