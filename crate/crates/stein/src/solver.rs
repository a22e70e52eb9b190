//! Numerical evaluation of the Stein-equation solution
//! f(w) = −∫₀^∞ [E h(g(e^{−s}w + √(1−e^{−2s})Z)) − E h(g(Z))] ds
//! (with Σ = I), residual verification of the equation, the expectation
//! identities at Z, and the auxiliary solution ψ_m for even g.
//!
//! The s-integral is computed after the substitution u = e^{−s}, which maps
//! the half-line to (0, 1] with a bounded integrand/u near u = 0; the slow
//! √(1−u) behaviour at u = 1 is handled by an adaptive split. Derivatives
//! of f come from Richardson-extrapolated central differences of the
//! quadrature value, keeping a single code path.

use crate::error::{Result, SteinError};
use crate::gfunctions::GFunction;
use crate::quad::{adaptive_gk, GaussHermite};
use crate::testfn::TestFunction;

/// Split point separating the smooth bulk from the √(1−u) tail.
const SPLIT: f64 = 1.0 - 1e-3;
/// Stencil step for ψ finite differences (ψ carries quadrature noise, so
/// its stencils are wider than the f stencils).
const PSI_FD_STEP: f64 = 0.05;
/// Stencil step for the f-derivatives feeding the ψ integrand.
const PSI_INNER_FD_STEP: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Gauss-Hermite nodes per dimension for the inner expectations (≥ 32).
    pub gh_nodes: usize,
    /// Absolute tolerance for the adaptive u-integral.
    pub outer_tol: f64,
    /// Central-difference step, within [1e-5, 1e-2].
    pub fd_step: f64,
    /// Maximum bisection depth of the adaptive integrator.
    pub max_depth: u32,
    /// Largest certified quadrature error before an accuracy error.
    pub certify_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gh_nodes: 64,
            outer_tol: 1e-11,
            fd_step: 1e-2,
            max_depth: 40,
            certify_tol: 1e-6,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if self.gh_nodes < 32 {
            return Err(SteinError::Range(format!(
                "solver needs ≥ 32 Gauss-Hermite nodes per dimension, got {}",
                self.gh_nodes
            )));
        }
        if !(1e-5..=1e-2).contains(&self.fd_step) {
            return Err(SteinError::Range(format!(
                "finite-difference step {} outside [1e-5, 1e-2]",
                self.fd_step
            )));
        }
        Ok(())
    }
}

/// Solver for one (g, h) pair; the limit expectation E h(g(Z)) is computed
/// once at construction. Evaluations are pure; grids may run in parallel.
pub struct SteinSolver<'a> {
    g: &'a GFunction,
    h: &'a TestFunction,
    cfg: SolverConfig,
    gh: GaussHermite,
    eh_gz: f64,
}

impl<'a> SteinSolver<'a> {
    pub fn new(g: &'a GFunction, h: &'a TestFunction, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if g.dim() > 2 {
            return Err(SteinError::Range(format!(
                "the solver supports d ≤ 2, got d = {}",
                g.dim()
            )));
        }
        let gh = GaussHermite::new(cfg.gh_nodes)?;
        let eh_gz = gh.expect_d(g.dim(), |z| h.eval(g.eval(z)))?;
        Ok(Self { g, h, cfg, gh, eh_gz })
    }

    /// E h(g(Z)), the constant subtracted on the right-hand side.
    pub fn limit_expectation(&self) -> f64 {
        self.eh_gz
    }

    /// E h(g(u·w + √(1−u²)·Z)) by the tensor Gauss-Hermite rule.
    fn smoothed_expectation(&self, u: f64, w: &[f64]) -> f64 {
        let s = (1.0 - u * u).max(0.0).sqrt();
        match w.len() {
            1 => self.gh.expect(|z| self.h.eval(self.g.eval(&[u * w[0] + s * z]))),
            2 => self
                .gh
                .expect_d(2, |z| {
                    self.h
                        .eval(self.g.eval(&[u * w[0] + s * z[0], u * w[1] + s * z[1]]))
                })
                .expect("dimension validated at construction"),
            _ => unreachable!(),
        }
    }

    /// f(w) with a certified absolute quadrature error.
    pub fn solve_f(&self, w: &[f64]) -> Result<f64> {
        if w.len() != self.g.dim() {
            return Err(SteinError::Range(format!(
                "point dimension {} does not match g dimension {}",
                w.len(),
                self.g.dim()
            )));
        }
        let integrand = |u: f64| (self.smoothed_expectation(u, w) - self.eh_gz) / u;
        let (bulk, e1) = adaptive_gk(
            &integrand,
            0.0,
            SPLIT,
            0.5 * self.cfg.outer_tol,
            self.cfg.max_depth,
        );
        let (tail, e2) = adaptive_gk(
            &integrand,
            SPLIT,
            1.0,
            0.5 * self.cfg.outer_tol,
            self.cfg.max_depth,
        );
        let err = e1 + e2;
        if err > self.cfg.certify_tol {
            return Err(SteinError::Accuracy(format!(
                "solve_f quadrature achieved error estimate {err:e}, \
                 above the certified tolerance {:e}",
                self.cfg.certify_tol
            )));
        }
        Ok(-(bulk + tail))
    }

    /// Richardson-extrapolated central difference of f along axis `axis`.
    fn fd_f(&self, w: &[f64], axis: usize, k: usize, step: f64) -> Result<f64> {
        let eval = |t: f64| -> Result<f64> {
            let mut v = w.to_vec();
            v[axis] += t;
            self.solve_f(&v)
        };
        let stencil = |h: f64| -> Result<f64> {
            Ok(match k {
                1 => (eval(h)? - eval(-h)?) / (2.0 * h),
                2 => (eval(h)? - 2.0 * eval(0.0)? + eval(-h)?) / (h * h),
                3 => {
                    (eval(2.0 * h)? - 2.0 * eval(h)? + 2.0 * eval(-h)? - eval(-2.0 * h)?)
                        / (2.0 * h * h * h)
                }
                4 => {
                    (eval(2.0 * h)? - 4.0 * eval(h)? + 6.0 * eval(0.0)? - 4.0 * eval(-h)?
                        + eval(-2.0 * h)?)
                        / (h * h * h * h)
                }
                _ => {
                    return Err(SteinError::Range(format!(
                        "finite differences support derivative order ≤ 4, got {k}"
                    )))
                }
            })
        };
        Ok((4.0 * stencil(0.5 * step)? - stencil(step)?) / 3.0)
    }

    /// k-th derivative of f at a univariate point (k ≤ 4).
    pub fn f_derivative(&self, w: f64, k: usize) -> Result<f64> {
        if self.g.dim() != 1 {
            return Err(SteinError::Range(
                "f_derivative is a univariate operation (d = 1)".into(),
            ));
        }
        self.fd_f(&[w], 0, k, self.cfg.fd_step)
    }

    /// |Σ_k(∂²_kk f − w_k ∂_k f)(w) − (h(g(w)) − E h(g(Z)))|.
    pub fn stein_residual(&self, w: &[f64]) -> Result<f64> {
        let mut lhs = 0.0;
        for axis in 0..self.g.dim() {
            let d2 = self.fd_f(w, axis, 2, self.cfg.fd_step)?;
            let d1 = self.fd_f(w, axis, 1, self.cfg.fd_step)?;
            lhs += d2 - w[axis] * d1;
        }
        let rhs = self.h.eval(self.g.eval(w)) - self.eh_gz;
        Ok((lhs - rhs).abs())
    }

    /// −(1/k)·E[(h∘g)^(k)(Z)], which by the expectation identity equals
    /// E f^(k)(Z). Univariate, k ≤ 4.
    pub fn expected_derivative_at_z(&self, k: usize) -> Result<f64> {
        if self.g.dim() != 1 {
            return Err(SteinError::Range(
                "expected_derivative_at_z is a univariate operation (d = 1)".into(),
            ));
        }
        if k == 0 || k > 4 {
            return Err(SteinError::Range(format!(
                "expected_derivative_at_z supports 1 ≤ k ≤ 4, got {k}"
            )));
        }
        let phi = |x: f64| self.h.eval(self.g.eval(&[x]));
        let step = 0.05;
        let stencil = |z: f64, h: f64| match k {
            1 => (phi(z + h) - phi(z - h)) / (2.0 * h),
            2 => (phi(z + h) - 2.0 * phi(z) + phi(z - h)) / (h * h),
            3 => {
                (phi(z + 2.0 * h) - 2.0 * phi(z + h) + 2.0 * phi(z - h) - phi(z - 2.0 * h))
                    / (2.0 * h * h * h)
            }
            _ => {
                (phi(z + 2.0 * h) - 4.0 * phi(z + h) + 6.0 * phi(z) - 4.0 * phi(z - h)
                    + phi(z - 2.0 * h))
                    / (h * h * h * h)
            }
        };
        let value = self
            .gh
            .expect(|z| (4.0 * stencil(z, 0.5 * step) - stencil(z, step)) / 3.0);
        Ok(-value / k as f64)
    }

    /// ψ_m(w) = −∫₀^∞ E f^(m)(e^{−t}w + √(1−e^{−2t})Z) dt, defined for
    /// even g and odd m so that the right-hand side is centred.
    pub fn solve_psi(&self, m: usize, w: f64) -> Result<f64> {
        self.check_psi_hypotheses(m)?;
        let gh_inner = GaussHermite::new(24.max(self.cfg.gh_nodes / 2).min(32))?;
        let integrand = |u: f64| -> f64 {
            let s = (1.0 - u * u).max(0.0).sqrt();
            gh_inner.expect(|z| {
                self.fd_f(&[u * w + s * z], 0, m, PSI_INNER_FD_STEP)
                    .expect("f derivative inside ψ integrand")
            }) / u
        };
        let tol = self.cfg.outer_tol.max(1e-9);
        let (bulk, e1) = adaptive_gk(&integrand, 0.0, SPLIT, 200.0 * tol, 16);
        let (tail, e2) = adaptive_gk(&integrand, SPLIT, 1.0, 200.0 * tol, 16);
        let err = e1 + e2;
        if err > 1e-4 {
            return Err(SteinError::Accuracy(format!(
                "solve_psi quadrature achieved error estimate {err:e}"
            )));
        }
        Ok(-(bulk + tail))
    }

    /// |ψ_m''(w) − w·ψ_m'(w) − f^(m)(w)|, the defining-equation residual.
    pub fn psi_residual(&self, m: usize, w: f64) -> Result<f64> {
        self.check_psi_hypotheses(m)?;
        let psi = |x: f64| self.solve_psi(m, x);
        let (h, h2) = (PSI_FD_STEP, 0.5 * PSI_FD_STEP);
        let (pm2, pm1, p0, pp1, pp2) =
            (psi(w - h)?, psi(w - h2)?, psi(w)?, psi(w + h2)?, psi(w + h)?);
        let d2_h = (pp2 - 2.0 * p0 + pm2) / (h * h);
        let d2_h2 = (pp1 - 2.0 * p0 + pm1) / (h2 * h2);
        let d2 = (4.0 * d2_h2 - d2_h) / 3.0;
        let d1_h = (pp2 - pm2) / (2.0 * h);
        let d1_h2 = (pp1 - pm1) / (2.0 * h2);
        let d1 = (4.0 * d1_h2 - d1_h) / 3.0;
        let rhs = self.fd_f(&[w], 0, m, self.cfg.fd_step)?;
        Ok((d2 - w * d1 - rhs).abs())
    }

    fn check_psi_hypotheses(&self, m: usize) -> Result<()> {
        if self.g.dim() != 1 {
            return Err(SteinError::Range("solve_psi is a univariate operation (d = 1)".into()));
        }
        if m % 2 == 0 {
            return Err(SteinError::Hypothesis(format!(
                "ψ_m needs odd m so the right-hand side is centred, got m = {m}"
            )));
        }
        if m > 4 {
            return Err(SteinError::Range(format!(
                "f derivatives are available up to order 4, got m = {m}"
            )));
        }
        if !self.g.is_even() {
            return Err(SteinError::Hypothesis(format!(
                "ψ_m needs an even g so that E f^({m})(Z) = 0; {} is not even",
                self.g.name()
            )));
        }
        Ok(())
    }
}
