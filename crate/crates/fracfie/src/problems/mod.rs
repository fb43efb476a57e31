//! Built-in example problems and a JSON problem-file format.

mod expr;

pub use expr::{parse, BinOp, Env, EvalError, Expr, ExprKind, Func, ParseError, Var};

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fraccalc::{KernelSpec, WarpFunction, WeightFunction};
use crate::solver::FieProblem;
use crate::{Error, Result};

pub const BUILTIN_NAMES: &[&str] = &["example1", "example2"];

/// The two worked examples.
///
/// `example1`: delta = 1/2, P = (y+1)/(4+xi^2), S = y^2/(1+xi^2),
/// U = id, w = 1, S1(r) = r^2.
/// `example2`: delta = 1/3, P = (y+1)/(9+xi^4), S = sqrt(y^4/(1+y^4)),
/// U = id, w = 1, S1(r) = r^2.
pub fn builtin(name: &str) -> Result<FieProblem> {
    match name {
        "example1" => {
            let g32 = crate::special::gamma(1.5)?;
            Ok(FieProblem::new(
                "example1",
                Arc::new(|xi: f64, y: f64| (y + 1.0) / (4.0 + xi * xi)),
                Arc::new(|xi: f64, y: f64| y * y / (1.0 + xi * xi)),
                KernelSpec::riemann_liouville(0.5, (0.0, 1.0))?,
            )?
            .with_s1(Arc::new(|r| r * r))
            .with_paper_p_hat(Arc::new(|e0| e0 / 4.0))
            .with_e0(g32 / 2.0))
        }
        "example2" => {
            let g43 = crate::special::gamma(4.0 / 3.0)?;
            Ok(FieProblem::new(
                "example2",
                Arc::new(|xi: f64, y: f64| (y + 1.0) / (9.0 + xi * xi * xi * xi)),
                Arc::new(|_xi: f64, y: f64| {
                    let y4 = y * y * y * y;
                    (y4 / (1.0 + y4)).sqrt()
                }),
                KernelSpec::riemann_liouville(1.0 / 3.0, (0.0, 1.0))?,
            )?
            .with_s1(Arc::new(|r| r * r))
            .with_paper_p_hat(Arc::new(|e0| e0 / 9.0))
            .with_e0(7.0 * g43 / 9.0))
        }
        other => Err(Error::UnknownProblem {
            name: other.to_string(),
            available: BUILTIN_NAMES,
        }),
    }
}

/// JSON schema for user-defined problems. Strings are expressions in the
/// variables `xi`, `y` (for P and S) or `r` (for S1); unknown keys are
/// rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub name: String,
    pub delta: f64,
    #[serde(rename = "P")]
    pub p: String,
    #[serde(rename = "S")]
    pub s: String,
    #[serde(rename = "U")]
    pub u: String,
    #[serde(rename = "dU", default, skip_serializing_if = "Option::is_none")]
    pub du: Option<String>,
    pub w: String,
    #[serde(rename = "S1", default, skip_serializing_if = "Option::is_none")]
    pub s1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e0: Option<f64>,
}

const NUMERIC_DERIVATIVE_STEP: f64 = 1e-6;

fn expr_fn1(expr: Expr, make_env: impl Fn(f64) -> Env + Send + Sync + 'static) -> crate::fraccalc::RealFn {
    // evaluation failures surface as NaN and are caught by the callers'
    // finiteness checks with node context
    Arc::new(move |x| expr.eval(&make_env(x)).unwrap_or(f64::NAN))
}

impl ProblemConfig {
    pub fn into_problem(self) -> Result<FieProblem> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!(
                "field \"delta\": must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if let Some(n) = self.grid_n {
            if n < 33 {
                return Err(Error::Config(format!(
                    "field \"grid_n\": must be at least 33, got {n}"
                )));
            }
        }
        let field = |name: &str, src: &str| -> Result<Expr> {
            parse(src).map_err(|e| Error::Config(format!("field {name:?}: {e}")))
        };
        let p_expr = field("P", &self.p)?;
        let s_expr = field("S", &self.s)?;
        let u_expr = field("U", &self.u)?;
        let w_expr = field("w", &self.w)?;
        for (name, expr, allowed) in [
            ("P", &p_expr, &[Var::Xi, Var::Y][..]),
            ("S", &s_expr, &[Var::Xi, Var::Y][..]),
            ("U", &u_expr, &[Var::Xi][..]),
            ("w", &w_expr, &[Var::Xi][..]),
        ] {
            if let Some(v) = expr.variables().iter().find(|v| !allowed.contains(v)) {
                return Err(Error::Config(format!(
                    "field {name:?}: variable {:?} is not available here",
                    v
                )));
            }
        }

        let p = {
            let e = p_expr;
            Arc::new(move |xi: f64, y: f64| e.eval(&Env::xi_y(xi, y)).unwrap_or(f64::NAN))
        };
        let s = {
            let e = s_expr;
            Arc::new(move |xi: f64, y: f64| e.eval(&Env::xi_y(xi, y)).unwrap_or(f64::NAN))
        };
        let u = expr_fn1(u_expr.clone(), |x| Env {
            xi: Some(x),
            ..Env::default()
        });
        let du: crate::fraccalc::RealFn = match self.du {
            Some(src) => {
                let e = field("dU", &src)?;
                if let Some(v) = e.variables().iter().find(|v| **v != Var::Xi) {
                    return Err(Error::Config(format!(
                        "field \"dU\": variable {v:?} is not available here"
                    )));
                }
                expr_fn1(e, |x| Env {
                    xi: Some(x),
                    ..Env::default()
                })
            }
            None => {
                // central difference of the U expression
                let e = u_expr;
                Arc::new(move |x| {
                    let h = NUMERIC_DERIVATIVE_STEP;
                    let hi = e.eval(&Env {
                        xi: Some(x + h),
                        ..Env::default()
                    });
                    let lo = e.eval(&Env {
                        xi: Some(x - h),
                        ..Env::default()
                    });
                    match (hi, lo) {
                        (Ok(a), Ok(b)) => (a - b) / (2.0 * h),
                        _ => f64::NAN,
                    }
                })
            }
        };
        let w = expr_fn1(w_expr, |x| Env {
            xi: Some(x),
            ..Env::default()
        });

        let kernel = KernelSpec::new(
            self.delta,
            WarpFunction::new(u, du),
            WeightFunction::new(w),
            (0.0, 1.0),
        )?;
        let mut problem = FieProblem::new(self.name, p, s, kernel)?;
        if let Some(src) = self.s1 {
            let e = field("S1", &src)?;
            if let Some(v) = e.variables().iter().find(|v| **v != Var::R) {
                return Err(Error::Config(format!(
                    "field \"S1\": variable {v:?} is not available here"
                )));
            }
            problem = problem.with_s1(Arc::new(move |r| e.eval(&Env::r(r)).unwrap_or(f64::NAN)));
        }
        if let Some(e0) = self.e0 {
            problem = problem.with_e0(e0);
        }
        if let Some(n) = self.grid_n {
            problem = problem.with_default_grid_n(n);
        }
        Ok(problem)
    }
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<FieProblem> {
    let text = std::fs::read_to_string(path)?;
    let config: ProblemConfig = serde_json::from_str(&text)?;
    config.into_problem()
}

/// Resolves a CLI problem source: a built-in name or a path to a JSON file.
pub fn problem_from_source(source: &str) -> Result<FieProblem> {
    if BUILTIN_NAMES.contains(&source) {
        builtin(source)
    } else {
        load_problem(source)
    }
}
