//! The fixed-point operator of the integral equation
//!
//! ```text
//! y(xi) = P(xi, y(xi)) + w(xi)^-1 / Gamma(delta)
//!         * int_0^xi (U(xi) - U(eta))^(delta-1) U'(eta) w(eta) S(xi, y(eta)) d eta
//! ```
//!
//! on I = [0,1], Picard iteration, and numerical verification of the
//! solvability hypotheses (Lipschitz bound on P, envelope on S, weight
//! bounds, and the self-map inequality on the ball of radius e0).

use std::sync::Arc;

use serde::Serialize;

use crate::fraccalc::{singular_product_integral, GridFunction, KernelSpec, RealFn};
use crate::mnc::{family_modulus, FunctionFamily};
use crate::special::gamma;
use crate::{exec, Error, Result};

/// A real function of (xi, y), shareable across threads.
pub type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// One instance of the integral equation on [0, 1].
#[derive(Clone)]
pub struct FieProblem {
    pub name: String,
    pub p: Fn2,
    pub s: Fn2,
    pub kernel: KernelSpec,
    /// Nondecreasing envelope with |S(xi, y)| <= s1(||y||); user-declared,
    /// never inferred.
    pub s1: Option<RealFn>,
    /// The substituted P-hat value used in the worked examples, as a
    /// function of e0. Only built-in problems carry one.
    pub paper_p_hat: Option<RealFn>,
    /// Default ball radius for diagnostics, when known.
    pub e0: Option<f64>,
    pub default_grid_n: usize,
}

impl FieProblem {
    pub fn new(name: impl Into<String>, p: Fn2, s: Fn2, kernel: KernelSpec) -> Result<Self> {
        if kernel.interval != (0.0, 1.0) {
            return Err(Error::Domain(
                "the integral equation is posed on [0, 1]".into(),
            ));
        }
        if !(kernel.delta > 0.0 && kernel.delta < 1.0) {
            return Err(Error::Domain(format!(
                "the integral equation requires delta in (0, 1), got {}",
                kernel.delta
            )));
        }
        Ok(FieProblem {
            name: name.into(),
            p,
            s,
            kernel,
            s1: None,
            paper_p_hat: None,
            e0: None,
            default_grid_n: 1025,
        })
    }

    pub fn with_s1(mut self, s1: RealFn) -> Self {
        self.s1 = Some(s1);
        self
    }

    pub fn with_paper_p_hat(mut self, p_hat: RealFn) -> Self {
        self.paper_p_hat = Some(p_hat);
        self
    }

    pub fn with_e0(mut self, e0: f64) -> Self {
        self.e0 = Some(e0);
        self
    }

    pub fn with_default_grid_n(mut self, n: usize) -> Self {
        self.default_grid_n = n;
        self
    }

    pub fn zero_iterate(&self, n: usize) -> Result<GridFunction> {
        GridFunction::constant(self.kernel.interval, n, 0.0)
    }
}

/// Which P-hat enters the hypothesis-(V) inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PhatMode {
    /// sup over xi of |P(xi, 0)|.
    #[serde(rename = "definition")]
    Definition,
    /// The per-problem substitution used in the built-in examples' worked
    /// bounds (a declared function of e0 rather than the sup at y = 0).
    #[serde(rename = "paper-as-stated")]
    PaperAsStated,
}

impl std::str::FromStr for PhatMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "definition" => Ok(PhatMode::Definition),
            "paper" | "paper-as-stated" => Ok(PhatMode::PaperAsStated),
            other => Err(Error::Config(format!(
                "unknown mode {other:?}; expected \"definition\" or \"paper\""
            ))),
        }
    }
}

/// One application of the operator H.
///
/// The outer variable of S is frozen per output node, so the integral is
/// recomputed for every node: O(n^2) kernel evaluations, parallel over
/// output nodes.
pub fn apply_h(problem: &FieProblem, y: &GridFunction) -> Result<GridFunction> {
    if y.interval() != problem.kernel.interval {
        return Err(Error::Grid("iterate must live on the problem interval".into()));
    }
    let n = y.n();
    let xi = y.nodes();
    let u: Vec<f64> = xi.iter().map(|&x| (problem.kernel.warp.u)(x)).collect();
    for j in 0..n - 1 {
        if !(u[j + 1] > u[j]) {
            return Err(Error::Domain(format!(
                "warp is not strictly increasing between nodes {j} and {}",
                j + 1
            )));
        }
    }
    let w: Vec<f64> = xi.iter().map(|&x| (problem.kernel.weight.w)(x)).collect();
    for (j, &wj) in w.iter().enumerate() {
        if wj == 0.0 || !wj.is_finite() {
            return Err(Error::Domain(format!(
                "weight must be finite and nonzero on the grid; w(xi_{j}) = {wj}"
            )));
        }
    }
    let gd = gamma(problem.kernel.delta)?;
    let yv = y.values();

    let values = exec::try_map_nodes(n, |i| {
        let p_val = (problem.p)(xi[i], yv[i]);
        if !p_val.is_finite() {
            return Err(Error::NonFinite {
                what: "P",
                node: i,
                xi: xi[i],
            });
        }
        if i == 0 {
            return Ok(p_val);
        }
        let mut g = Vec::with_capacity(i + 1);
        for j in 0..=i {
            let s_val = (problem.s)(xi[i], yv[j]);
            if !s_val.is_finite() {
                return Err(Error::NonFinite {
                    what: "S",
                    node: j,
                    xi: xi[j],
                });
            }
            g.push(w[j] * s_val);
        }
        let integral = singular_product_integral(&u[..=i], &g, i, problem.kernel.delta);
        Ok(p_val + integral / (gd * w[i]))
    })?;
    GridFunction::new(y.interval(), values)
}

/// Sup-norm fixed-point defect `||y - H y||`.
pub fn residual(problem: &FieProblem, y: &GridFunction) -> Result<f64> {
    y.sup_distance(&apply_h(problem, y)?)
}

pub const DEFAULT_BLOW_UP: f64 = 1e6;

#[derive(Clone, Debug, Serialize)]
pub struct SolveResult {
    pub solution: GridFunction,
    /// `||y_k - y_{k-1}||` for k = 1..=iterations.
    pub step_history: Vec<f64>,
    /// `||y_k - H y_k||` for k = 1..=iterations; the last entry is the
    /// final residual computed from one extra application of H.
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
}

pub fn picard_solve(
    problem: &FieProblem,
    y0: &GridFunction,
    tol: f64,
    max_iter: usize,
) -> Result<SolveResult> {
    picard_solve_with(problem, y0, tol, max_iter, DEFAULT_BLOW_UP)
}

/// Successive approximation `y <- H y` until the sup-norm step drops below
/// `tol` or `max_iter` is hit; the returned residual comes from one extra
/// application of H to the final iterate.
pub fn picard_solve_with(
    problem: &FieProblem,
    y0: &GridFunction,
    tol: f64,
    max_iter: usize,
    blow_up: f64,
) -> Result<SolveResult> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    if max_iter < 1 {
        return Err(Error::Domain("max_iter must be at least 1".into()));
    }
    let mut y = y0.clone();
    let mut steps = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter {
        let next = apply_h(problem, &y)?;
        let step = y.sup_distance(&next)?;
        y = next;
        steps.push(step);
        let norm = y.sup_norm();
        if norm > blow_up {
            return Err(Error::Diverged { norm, bound: blow_up });
        }
        if step <= tol {
            converged = true;
            break;
        }
    }
    let final_residual = residual(problem, &y)?;
    // the residual of iterate k equals the step into iterate k+1
    let mut residuals: Vec<f64> = steps[1..].to_vec();
    residuals.push(final_residual);
    Ok(SolveResult {
        iterations: steps.len(),
        solution: y,
        step_history: steps,
        residual_history: residuals,
        final_residual,
        converged,
    })
}

/// k-th element of the van der Corput sequence in the given base.
fn van_der_corput(mut k: usize, base: usize) -> f64 {
    let mut q = 0.0;
    let mut bk = 1.0 / base as f64;
    while k > 0 {
        q += (k % base) as f64 * bk;
        k /= base;
        bk /= base as f64;
    }
    q
}

/// Sampled lower bound on the Lipschitz constant of P in its second
/// argument over I x [-e0, e0]^2.
///
/// xi runs over a uniform grid including both endpoints; the (y, y') pairs
/// come from a deterministic Halton sequence.
pub fn estimate_lipschitz_p(problem: &FieProblem, e0: f64, samples: usize) -> Result<f64> {
    if !(e0 > 0.0) {
        return Err(Error::Domain(format!("e0 must be positive, got {e0}")));
    }
    if samples < 100 {
        return Err(Error::Domain(format!(
            "need at least 100 samples, got {samples}"
        )));
    }
    let n_xi = 33;
    let mut best = 0.0f64;
    for k in 1..=samples {
        let y1 = -e0 + 2.0 * e0 * van_der_corput(k, 2);
        let y2 = -e0 + 2.0 * e0 * van_der_corput(k, 3);
        if (y1 - y2).abs() < 1e-12 {
            continue;
        }
        for i in 0..n_xi {
            let xi = i as f64 / (n_xi - 1) as f64;
            let ratio = ((problem.p)(xi, y1) - (problem.p)(xi, y2)).abs() / (y1 - y2).abs();
            best = best.max(ratio);
        }
    }
    Ok(best)
}

/// P-hat by its definition: sup over the grid of |P(xi, 0)|.
pub fn compute_p_hat(problem: &FieProblem) -> Result<f64> {
    let n = problem.default_grid_n;
    let mut best = 0.0f64;
    for i in 0..n {
        let xi = i as f64 / (n - 1) as f64;
        let v = (problem.p)(xi, 0.0).abs();
        if !v.is_finite() {
            return Err(Error::NonFinite {
                what: "P",
                node: i,
                xi,
            });
        }
        best = best.max(v);
    }
    Ok(best)
}

/// Grid suprema (K1, K2) of |w| and |1/w|.
pub fn bound_weight(problem: &FieProblem) -> Result<(f64, f64)> {
    let n = problem.default_grid_n;
    let mut k1 = 0.0f64;
    let mut k2 = 0.0f64;
    for i in 0..n {
        let xi = i as f64 / (n - 1) as f64;
        let w = (problem.kernel.weight.w)(xi);
        if w == 0.0 || !w.is_finite() {
            return Err(Error::Domain(format!(
                "weight vanishes or is non-finite at grid node {i} (xi = {xi})"
            )));
        }
        k1 = k1.max(w.abs());
        k2 = k2.max(1.0 / w.abs());
    }
    Ok((k1, k2))
}

const HYP_V_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct AssumptionVCheck {
    pub e0: f64,
    pub p1: f64,
    pub p_hat: f64,
    pub k1: f64,
    pub k2: f64,
    pub s1_at_e0: f64,
    pub kernel_term: f64,
    pub lhs: f64,
    pub satisfied: bool,
    pub mode: PhatMode,
}

/// Evaluates the self-map inequality
/// `P1 e0 + P_hat + K1 K2 S1(e0) (U(1)-U(0))^delta / Gamma(delta+1) <= e0`.
pub fn check_assumption_v(problem: &FieProblem, e0: f64, mode: PhatMode) -> Result<AssumptionVCheck> {
    let s1 = problem
        .s1
        .as_ref()
        .ok_or_else(|| Error::MissingEnvelope(problem.name.clone()))?;
    let p1 = estimate_lipschitz_p(problem, e0, 200)?;
    let p_hat = match mode {
        PhatMode::Definition => compute_p_hat(problem)?,
        PhatMode::PaperAsStated => {
            let f = problem
                .paper_p_hat
                .as_ref()
                .ok_or_else(|| Error::MissingPaperPhat(problem.name.clone()))?;
            f(e0)
        }
    };
    let (k1, k2) = bound_weight(problem)?;
    let s1_at_e0 = s1(e0);
    let u_span = (problem.kernel.warp.u)(1.0) - (problem.kernel.warp.u)(0.0);
    let kernel_term =
        k1 * k2 * s1_at_e0 * u_span.powf(problem.kernel.delta) / gamma(problem.kernel.delta + 1.0)?;
    let lhs = p1 * e0 + p_hat + kernel_term;
    Ok(AssumptionVCheck {
        e0,
        p1,
        p_hat,
        k1,
        k2,
        s1_at_e0,
        kernel_term,
        lhs,
        satisfied: lhs <= e0 + HYP_V_SLACK,
        mode,
    })
}

/// Scans [lo, hi] for e0 values satisfying assumption (V) and refines both
/// ends of the feasible range by bisection to 1e-9.
pub fn feasible_e0_interval(
    problem: &FieProblem,
    mode: PhatMode,
    scan: (f64, f64, usize),
) -> Result<Option<(f64, f64)>> {
    let (lo, hi, steps) = scan;
    if !(0.0 < lo && lo < hi) {
        return Err(Error::Domain(format!(
            "scan range must satisfy 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    if steps < 100 {
        return Err(Error::Domain(format!(
            "scan needs at least 100 steps, got {steps}"
        )));
    }
    let feasible = |e0: f64| -> Result<bool> { Ok(check_assumption_v(problem, e0, mode)?.satisfied) };
    let point = |i: usize| lo + (hi - lo) * i as f64 / steps as f64;

    let flags: Vec<bool> = (0..=steps).map(point).map(feasible).collect::<Result<_>>()?;
    let first = match flags.iter().position(|&f| f) {
        Some(i) => i,
        None => return Ok(None),
    };
    let last = flags.iter().rposition(|&f| f).unwrap();

    let bisect = |mut bad: f64, mut good: f64| -> Result<f64> {
        while (bad - good).abs() > 1e-12 {
            let mid = 0.5 * (bad + good);
            if feasible(mid)? {
                good = mid;
            } else {
                bad = mid;
            }
        }
        Ok(good)
    };

    let lower = if first == 0 {
        point(0)
    } else {
        bisect(point(first - 1), point(first))?
    };
    let upper = if last == steps {
        point(steps)
    } else {
        bisect(point(last + 1), point(last))?
    };
    Ok(Some((lower, upper)))
}

/// Measured/derived hypothesis constants, serialized by the CLI.
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub p1: f64,
    pub p_hat: f64,
    pub k1: f64,
    pub k2: f64,
    pub s1_at_e0: Option<f64>,
    pub e0_feasible_interval: Option<(f64, f64)>,
    pub mode: PhatMode,
}

pub fn hypothesis_report(
    problem: &FieProblem,
    mode: PhatMode,
    scan: (f64, f64, usize),
) -> Result<HypothesisReport> {
    let interval = feasible_e0_interval(problem, mode, scan)?;
    let e0_ref = problem.e0.or(interval.map(|(_, hi)| hi)).unwrap_or(scan.1);
    let check = check_assumption_v(problem, e0_ref, mode);
    let (k1, k2) = bound_weight(problem)?;
    Ok(HypothesisReport {
        p1: estimate_lipschitz_p(problem, e0_ref, 200)?,
        p_hat: match &check {
            Ok(c) => c.p_hat,
            Err(_) => match mode {
                PhatMode::Definition => compute_p_hat(problem)?,
                PhatMode::PaperAsStated => f64::NAN,
            },
        },
        k1,
        k2,
        s1_at_e0: check.ok().map(|c| c.s1_at_e0),
        e0_feasible_interval: interval,
        mode,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ContractionEstimate {
    pub gamma_before: f64,
    pub gamma_after: f64,
    pub p1: f64,
    /// Additive term absorbing the xi-oscillation of P and the kernel
    /// increment over argument pairs within theta; reported, not asserted
    /// to vanish.
    pub c_theta: f64,
}

/// Family modulus before and after one application of H to every member,
/// with the supporting bound `gamma_after <= p1 * gamma_before + c_theta`.
pub fn contraction_estimate(
    problem: &FieProblem,
    seed: &FunctionFamily,
    theta: f64,
) -> Result<ContractionEstimate> {
    let gamma_before = family_modulus(seed, theta)?;
    let mapped: Vec<GridFunction> = seed
        .members()
        .iter()
        .map(|m| apply_h(problem, m))
        .collect::<Result<_>>()?;
    let gamma_after = family_modulus(&FunctionFamily::new(mapped)?, theta)?;

    let e0 = problem.e0.unwrap_or_else(|| seed.bound()).max(1e-6);
    let p1 = estimate_lipschitz_p(problem, e0, 200)?;

    // oscillation of P in xi over pairs within theta, sampled in y
    let n = seed.members()[0].n();
    let spacing = seed.spacing();
    let k = ((theta / spacing) * (1.0 + 1e-12)).floor() as usize;
    let mut gamma_p = 0.0f64;
    let y_samples = 41;
    for m in 0..y_samples {
        let yv = -e0 + 2.0 * e0 * m as f64 / (y_samples - 1) as f64;
        for i in 0..n {
            let xi1 = i as f64 * spacing;
            let p1v = (problem.p)(xi1, yv);
            for j in i + 1..=(i + k).min(n - 1) {
                let xi2 = j as f64 * spacing;
                gamma_p = gamma_p.max(((problem.p)(xi2, yv) - p1v).abs());
            }
        }
    }

    // envelope value: declared S1 if present, otherwise the sampled sup of |S|
    let s1_at_e0 = match &problem.s1 {
        Some(s1) => s1(e0),
        None => {
            let mut sup = 0.0f64;
            for m in 0..y_samples {
                let yv = -e0 + 2.0 * e0 * m as f64 / (y_samples - 1) as f64;
                for i in 0..n {
                    sup = sup.max((problem.s)(i as f64 * spacing, yv).abs());
                }
            }
            sup
        }
    };
    let (k1, k2) = bound_weight(problem)?;
    let u0 = (problem.kernel.warp.u)(0.0);
    let mut kernel_inc = 0.0f64;
    for i in 0..n {
        let xi1 = i as f64 * spacing;
        for j in i + 1..=(i + k).min(n - 1) {
            let xi2 = j as f64 * spacing;
            let inc = ((problem.kernel.warp.u)(xi2) - u0).powf(problem.kernel.delta)
                - ((problem.kernel.warp.u)(xi1) - u0).powf(problem.kernel.delta);
            kernel_inc = kernel_inc.max(inc);
        }
    }
    let c_theta =
        gamma_p + k1 * k2 * s1_at_e0 * kernel_inc / gamma(problem.kernel.delta + 1.0)?;

    Ok(ContractionEstimate {
        gamma_before,
        gamma_after,
        p1,
        c_theta,
    })
}
