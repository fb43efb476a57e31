//! Weighted fractional integrals and derivatives with respect to another
//! function, discretized on a uniform grid.
//!
//! The fractional integral of order `delta` is
//!
//! ```text
//! (J^delta_w h)(z) = w(z)^-1 / Gamma(delta)
//!                    * int_a^z (U(z) - U(eta))^(delta-1) w(eta) h(eta) U'(eta) d eta
//! ```
//!
//! The kernel is weakly singular at `eta -> z`. We substitute `u = U(eta)`,
//! which maps the grid nodes to `u_j = U(xi_j)` without any root-finding,
//! approximate the smooth factor `g(u) = w(eta(u)) h(eta(u))` piecewise
//! linearly on those image nodes, and integrate `(U(z)-u)^(delta-1)` against
//! the linear pieces in closed form (product-trapezoidal quadrature).

use std::sync::Arc;

use serde::Serialize;

use crate::special::gamma;
use crate::{exec, Error, Result};

/// A real function of one variable, shareable across threads.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Strictly increasing differentiable change of variable defining the kernel.
#[derive(Clone)]
pub struct WarpFunction {
    pub u: RealFn,
    pub du: RealFn,
}

impl WarpFunction {
    pub fn new(u: RealFn, du: RealFn) -> Self {
        WarpFunction { u, du }
    }

    /// The identity warp, which reduces the operator to the classical
    /// Riemann-Liouville form.
    pub fn identity() -> Self {
        WarpFunction {
            u: Arc::new(|x| x),
            du: Arc::new(|_| 1.0),
        }
    }
}

/// Nonvanishing multiplicative weight.
#[derive(Clone)]
pub struct WeightFunction {
    pub w: RealFn,
}

impl WeightFunction {
    pub fn new(w: RealFn) -> Self {
        WeightFunction { w }
    }

    pub fn one() -> Self {
        WeightFunction {
            w: Arc::new(|_| 1.0),
        }
    }
}

/// The tuple (order, warp, weight, interval) defining one fractional operator.
#[derive(Clone)]
pub struct KernelSpec {
    pub delta: f64,
    pub warp: WarpFunction,
    pub weight: WeightFunction,
    pub interval: (f64, f64),
}

impl KernelSpec {
    /// Orders in (0, 2] are supported. The kernel exponent `delta - 1 = -1`
    /// at `delta = 0` is non-integrable, so zero is rejected.
    pub fn new(
        delta: f64,
        warp: WarpFunction,
        weight: WeightFunction,
        interval: (f64, f64),
    ) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 || delta > 2.0 {
            return Err(Error::Domain(format!(
                "kernel order must lie in (0, 2], got {delta}"
            )));
        }
        if !(interval.0 < interval.1) {
            return Err(Error::Domain(format!(
                "interval must satisfy a < b, got [{}, {}]",
                interval.0, interval.1
            )));
        }
        Ok(KernelSpec {
            delta,
            warp,
            weight,
            interval,
        })
    }

    /// Identity warp, unit weight.
    pub fn riemann_liouville(delta: f64, interval: (f64, f64)) -> Result<Self> {
        KernelSpec::new(delta, WarpFunction::identity(), WeightFunction::one(), interval)
    }
}

/// A real function sampled at `n` uniform nodes over `[a, b]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridFunction {
    interval: (f64, f64),
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(interval: (f64, f64), values: Vec<f64>) -> Result<Self> {
        if !(interval.0 < interval.1) {
            return Err(Error::Grid(format!(
                "interval must satisfy a < b, got [{}, {}]",
                interval.0, interval.1
            )));
        }
        if values.len() < 2 {
            return Err(Error::Grid(format!(
                "a grid function needs at least 2 nodes, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Grid(format!("non-finite value at node {i}")));
        }
        Ok(GridFunction { interval, values })
    }

    pub fn from_fn(interval: (f64, f64), n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Grid(format!("need at least 2 nodes, got {n}")));
        }
        let (a, b) = interval;
        let values = (0..n)
            .map(|i| f(a + (b - a) * i as f64 / (n - 1) as f64))
            .collect();
        GridFunction::new(interval, values)
    }

    pub fn constant(interval: (f64, f64), n: usize, c: f64) -> Result<Self> {
        GridFunction::from_fn(interval, n, |_| c)
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        (self.interval.1 - self.interval.0) / (self.n() - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.interval.0
            + (self.interval.1 - self.interval.0) * i as f64 / (self.n() - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.node(i)).collect()
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        self.interval == other.interval && self.n() == other.n()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        if !self.same_grid(other) {
            return Err(Error::Grid("sup_distance requires matching grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Pointwise map; the result stays on the same grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridFunction> {
        GridFunction::new(self.interval, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        if !self.same_grid(other) {
            return Err(Error::Grid("zip_with requires matching grids".into()));
        }
        GridFunction::new(
            self.interval,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }
}

/// Exact integral of `(u[i] - t)^(delta-1)` against the piecewise-linear
/// interpolant of `g` on the nodes `u[0..=i]`.
///
/// Per segment `[u_j, u_{j+1}]` with `A = u_i - u_j`, `B = u_i - u_{j+1}` the
/// moments are `M0 = (A^delta - B^delta)/delta` and
/// `M1 = A*M0 - (A^(delta+1) - B^(delta+1))/(delta+1)`, so no singular sample
/// is ever evaluated.
pub fn singular_product_integral(u: &[f64], g: &[f64], i: usize, delta: f64) -> f64 {
    let z = u[i];
    let mut acc = 0.0;
    for j in 0..i {
        let a = z - u[j];
        let b = z - u[j + 1];
        let width = u[j + 1] - u[j];
        let m0 = (a.powf(delta) - b.powf(delta)) / delta;
        let m1 = a * m0 - (a.powf(delta + 1.0) - b.powf(delta + 1.0)) / (delta + 1.0);
        acc += g[j] * m0 + (g[j + 1] - g[j]) / width * m1;
    }
    acc
}

fn warped_nodes(xi: &[f64], spec: &KernelSpec) -> Result<Vec<f64>> {
    let u: Vec<f64> = xi.iter().map(|&x| (spec.warp.u)(x)).collect();
    for j in 0..u.len() - 1 {
        if !(u[j + 1] > u[j]) {
            return Err(Error::Domain(format!(
                "warp is not strictly increasing between nodes {j} and {} (U = {} vs {})",
                j + 1,
                u[j],
                u[j + 1]
            )));
        }
    }
    // du may vanish at isolated nodes (e.g. U = eta^2 at 0); only a negative
    // derivative signals a non-increasing warp
    for (j, &x) in xi.iter().enumerate() {
        let d = (spec.warp.du)(x);
        if !(d >= 0.0) {
            return Err(Error::Domain(format!(
                "warp derivative is negative at node {j} (xi = {x}, U' = {d})"
            )));
        }
    }
    Ok(u)
}

fn weights_on_grid(xi: &[f64], spec: &KernelSpec) -> Result<Vec<f64>> {
    let w: Vec<f64> = xi.iter().map(|&x| (spec.weight.w)(x)).collect();
    for (j, &wj) in w.iter().enumerate() {
        if wj == 0.0 || !wj.is_finite() {
            return Err(Error::Domain(format!(
                "weight must be finite and nonzero on the grid; w(xi_{j}) = {wj}"
            )));
        }
    }
    Ok(w)
}

/// `(J^delta_w h)(z)` at every grid node; the value at `z = a` is exactly 0.
pub fn weighted_fractional_integral(h: &GridFunction, spec: &KernelSpec) -> Result<GridFunction> {
    if !(spec.delta > 0.0) {
        return Err(Error::Domain(format!(
            "fractional integral order must be positive, got {}",
            spec.delta
        )));
    }
    if h.interval() != spec.interval {
        return Err(Error::Grid(
            "grid function and kernel spec live on different intervals".into(),
        ));
    }
    let xi = h.nodes();
    let u = warped_nodes(&xi, spec)?;
    let w = weights_on_grid(&xi, spec)?;
    let gd = gamma(spec.delta)?;
    let g: Vec<f64> = h
        .values()
        .iter()
        .zip(&w)
        .map(|(&hv, &wv)| wv * hv)
        .collect();

    let values = exec::map_nodes(h.n(), |i| {
        if i == 0 {
            0.0
        } else {
            singular_product_integral(&u, &g, i, spec.delta) / (gd * w[i])
        }
    });
    GridFunction::new(h.interval(), values)
}

fn cumtrapz(v: &[f64], spacing: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(v.len());
    let mut acc = 0.0;
    out.push(0.0);
    for j in 0..v.len() - 1 {
        acc += 0.5 * spacing * (v[j] + v[j + 1]);
        out.push(acc);
    }
    out
}

/// The n-fold nested integral form, computed by literally nesting trapezoidal
/// cumulative integrals. Agrees with [`weighted_fractional_integral`] at
/// `delta = n` up to discretization error; the two code paths are mutual
/// oracles.
pub fn iterated_weighted_integral(
    h: &GridFunction,
    spec: &KernelSpec,
    n: usize,
) -> Result<GridFunction> {
    if !(1..=3).contains(&n) {
        return Err(Error::Domain(format!(
            "iterated integral supports n in 1..=3, got {n}"
        )));
    }
    if h.interval() != spec.interval {
        return Err(Error::Grid(
            "grid function and kernel spec live on different intervals".into(),
        ));
    }
    let xi = h.nodes();
    warped_nodes(&xi, spec)?;
    let w = weights_on_grid(&xi, spec)?;
    let du: Vec<f64> = xi.iter().map(|&x| (spec.warp.du)(x)).collect();
    let d = h.spacing();

    // innermost layer integrates w * h * U'; each outer layer integrates U' * (previous)
    let inner: Vec<f64> = (0..h.n())
        .map(|j| w[j] * h.values()[j] * du[j])
        .collect();
    let mut c = cumtrapz(&inner, d);
    for _ in 1..n {
        let layer: Vec<f64> = c.iter().zip(&du).map(|(&cv, &dv)| cv * dv).collect();
        c = cumtrapz(&layer, d);
    }
    let values: Vec<f64> = c.iter().zip(&w).map(|(&cv, &wv)| cv / wv).collect();
    GridFunction::new(h.interval(), values)
}

/// First-order weighted derivative `w^-1 * d/dz (w h) / U'`, by second-order
/// central differences (one-sided at the endpoints).
pub fn weighted_derivative_1(h: &GridFunction, spec: &KernelSpec) -> Result<GridFunction> {
    let n = h.n();
    if n < 3 {
        return Err(Error::Grid(format!(
            "weighted derivative needs at least 3 nodes, got {n}"
        )));
    }
    if h.interval() != spec.interval {
        return Err(Error::Grid(
            "grid function and kernel spec live on different intervals".into(),
        ));
    }
    let xi = h.nodes();
    let w = weights_on_grid(&xi, spec)?;
    let du: Vec<f64> = xi.iter().map(|&x| (spec.warp.du)(x)).collect();
    for (j, &dv) in du.iter().enumerate() {
        if !(dv > 0.0) {
            return Err(Error::Domain(format!(
                "warp derivative is not positive at node {j}"
            )));
        }
    }
    let wh: Vec<f64> = h.values().iter().zip(&w).map(|(&hv, &wv)| wv * hv).collect();
    let d = h.spacing();

    let mut values = Vec::with_capacity(n);
    for j in 0..n {
        let dwh = if j == 0 {
            (-3.0 * wh[0] + 4.0 * wh[1] - wh[2]) / (2.0 * d)
        } else if j == n - 1 {
            (3.0 * wh[n - 1] - 4.0 * wh[n - 2] + wh[n - 3]) / (2.0 * d)
        } else {
            (wh[j + 1] - wh[j - 1]) / (2.0 * d)
        };
        values.push(dwh / (w[j] * du[j]));
    }
    GridFunction::new(h.interval(), values)
}

/// Fractional derivative of order `delta` in (0, 1):
/// `D^delta_w h = D^1_w (J^(1-delta)_w h)`.
pub fn weighted_fractional_derivative(h: &GridFunction, spec: &KernelSpec) -> Result<GridFunction> {
    if !(spec.delta > 0.0 && spec.delta < 1.0) {
        return Err(Error::Domain(format!(
            "fractional derivative supports orders in (0, 1), got {}",
            spec.delta
        )));
    }
    let complement = KernelSpec {
        delta: 1.0 - spec.delta,
        warp: spec.warp.clone(),
        weight: spec.weight.clone(),
        interval: spec.interval,
    };
    let j = weighted_fractional_integral(h, &complement)?;
    weighted_derivative_1(&j, spec)
}
