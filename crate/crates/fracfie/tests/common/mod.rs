#![allow(dead_code)]
//! Shared test oracles, independent of the library's quadrature path.

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Riemann-Liouville integral of `f` at `z` via the defining singular
/// integral, with the singularity removed by the substitution `u = t^(1/delta)`:
/// `int_0^z u^(delta-1) f(z-u) du = (1/delta) int_0^(z^delta) f(z - t^(1/delta)) dt`.
/// Divides by Gamma(delta) computed from its own integral definition.
pub fn rl_integral_oracle(f: &dyn Fn(f64) -> f64, z: f64, delta: f64, tol: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let inv = 1.0 / delta;
    let inner = adaptive_simpson(&|t: f64| f(z - t.powf(inv)), 0.0, z.powf(delta), tol) / delta;
    inner / gamma_oracle(delta)
}

/// Gamma by numerically integrating its definition. The integrable
/// singularity on [0, eps] is handled by the series
/// `int_0^eps t^(x-1) e^-t dt ~ eps^x/x - eps^(x+1)/(x+1) + eps^(x+2)/(2(x+2))`;
/// the tail beyond t = 80 is below 1e-30.
pub fn gamma_oracle(x: f64) -> f64 {
    let eps: f64 = 1e-3;
    let head = eps.powf(x) / x - eps.powf(x + 1.0) / (x + 1.0)
        + eps.powf(x + 2.0) / (2.0 * (x + 2.0));
    head + adaptive_simpson(&|t: f64| t.powf(x - 1.0) * (-t).exp(), eps, 80.0, 1e-13)
}

pub const GAMMA_4_3: f64 = 0.8929795115692492;
pub const GAMMA_3_2: f64 = 0.8862269254527580;
pub const E0_EXAMPLE1: f64 = 0.4431134627263790;
pub const E0_EXAMPLE2: f64 = 0.6945396201094161;
