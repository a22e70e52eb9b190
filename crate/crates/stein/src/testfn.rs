//! Test functions `h` defining the smooth probability metrics, together
//! with the derivative sup-norms `‖h^(k)‖` the bounds consume.

use std::sync::Arc;

use crate::combinatorics::DerivNormProfile;
use crate::error::{Result, SteinError};

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A test function with evaluation and a profile of derivative sup-norms.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    eval: EvalFn,
    norms: DerivNormProfile,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("norms", &self.norms)
            .finish()
    }
}

/// Number of derivative orders carried by the preset profiles.
const PROFILE_LEN: usize = 8;

impl TestFunction {
    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn norms(&self) -> &DerivNormProfile {
        &self.norms
    }

    /// Replaces the norm profile (scenario override).
    pub fn with_norms(mut self, norms: DerivNormProfile) -> Self {
        self.norms = norms;
        self
    }

    /// h(x) = sin x; every derivative has sup-norm exactly 1.
    pub fn sin() -> Self {
        Self {
            name: "sin".into(),
            eval: Arc::new(f64::sin),
            norms: DerivNormProfile::constant(1.0, PROFILE_LEN).unwrap(),
        }
    }

    /// h(x) = e^{−x²/2}, a smooth bump. Derivative sup-norms come from the
    /// Hermite-polynomial closed form h^(k)(x) = ±He_k(x)e^{−x²/2}, scanned
    /// on a dense grid and inflated by 1e-6 to stay on the safe side.
    pub fn bump() -> Self {
        let mut norms = Vec::with_capacity(PROFILE_LEN);
        for k in 1..=PROFILE_LEN {
            let mut sup: f64 = 0.0;
            let mut x = 0.0;
            while x <= 8.0 {
                sup = sup.max((hermite_prob(k, x) * (-0.5 * x * x).exp()).abs());
                x += 1e-3;
            }
            norms.push(sup * (1.0 + 1e-6));
        }
        Self {
            name: "bump".into(),
            eval: Arc::new(|x| (-0.5 * x * x).exp()),
            norms: DerivNormProfile::new(norms).unwrap(),
        }
    }

    /// h(x) = 4σ(x) − 2 with σ the logistic function: bounded in (−2, 2)
    /// with ‖h'‖ = 1. Derivatives of σ are polynomials in σ, so the sup
    /// reduces to a polynomial scan over (0, 1).
    pub fn logistic_scaled() -> Self {
        let mut norms = Vec::with_capacity(PROFILE_LEN);
        // p_1(s) = s − s²; p_{k+1}(s) = p_k'(s)·(s − s²).
        let mut poly = vec![0.0, 1.0, -1.0];
        for _ in 1..=PROFILE_LEN {
            let mut sup: f64 = 0.0;
            let mut s = 0.0;
            while s <= 1.0 {
                sup = sup.max(eval_poly(&poly, s).abs());
                s += 1e-5;
            }
            norms.push(4.0 * sup * (1.0 + 1e-6));
            poly = compose_logistic_derivative(&poly);
        }
        Self {
            name: "logistic_scaled".into(),
            eval: Arc::new(|x| 4.0 / (1.0 + (-x).exp()) - 2.0),
            norms: DerivNormProfile::new(norms).unwrap(),
        }
    }

    /// h(x) = x: the Wasserstein-type test function with ‖h'‖ = 1 and all
    /// higher derivatives zero. Unbounded, so not usable with the solver.
    pub fn linear_w1() -> Self {
        let mut norms = vec![0.0; PROFILE_LEN];
        norms[0] = 1.0;
        Self {
            name: "linear_w1".into(),
            eval: Arc::new(|x| x),
            norms: DerivNormProfile::new(norms).unwrap(),
        }
    }

    /// Constant test function; all derivative norms are zero.
    pub fn constant(c: f64) -> Self {
        Self {
            name: format!("constant({c})"),
            eval: Arc::new(move |_| c),
            norms: DerivNormProfile::new(vec![0.0; PROFILE_LEN]).unwrap(),
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "sin" => Ok(Self::sin()),
            "bump" => Ok(Self::bump()),
            "logistic_scaled" => Ok(Self::logistic_scaled()),
            "linear_w1" => Ok(Self::linear_w1()),
            other => Err(SteinError::Invalid(format!(
                "unknown test function `{other}`; known: sin, bump, logistic_scaled, linear_w1"
            ))),
        }
    }
}

/// Probabilists' Hermite polynomial He_k(x) by the three-term recurrence.
fn hermite_prob(k: usize, x: f64) -> f64 {
    let mut h0 = 1.0;
    let mut h1 = x;
    if k == 0 {
        return h0;
    }
    for j in 1..k {
        let h2 = x * h1 - j as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Maps p(s) to p'(s)·(s − s²), the next logistic derivative polynomial.
fn compose_logistic_derivative(p: &[f64]) -> Vec<f64> {
    let mut deriv = vec![0.0; p.len().saturating_sub(1).max(1)];
    for (j, &c) in p.iter().enumerate().skip(1) {
        deriv[j - 1] = c * j as f64;
    }
    // multiply by (s − s²)
    let mut out = vec![0.0; deriv.len() + 2];
    for (j, &c) in deriv.iter().enumerate() {
        out[j + 1] += c;
        out[j + 2] -= c;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Richardson-extrapolated central difference of order k.
    fn fd(f: &TestFunction, x: f64, k: usize, h: f64) -> f64 {
        let d = |h: f64| match k {
            1 => (f.eval(x + h) - f.eval(x - h)) / (2.0 * h),
            2 => (f.eval(x + h) - 2.0 * f.eval(x) + f.eval(x - h)) / (h * h),
            3 => {
                (f.eval(x + 2.0 * h) - 2.0 * f.eval(x + h) + 2.0 * f.eval(x - h)
                    - f.eval(x - 2.0 * h))
                    / (2.0 * h * h * h)
            }
            _ => unreachable!(),
        };
        (4.0 * d(0.5 * h) - d(h)) / 3.0
    }

    #[test]
    fn norm_profiles_dominate_fd_derivatives() {
        for h in [
            TestFunction::sin(),
            TestFunction::bump(),
            TestFunction::logistic_scaled(),
            TestFunction::linear_w1(),
        ] {
            for k in 1..=3usize {
                let bound = h.norms().norm(k).unwrap();
                let mut x = -6.0;
                while x <= 6.0 {
                    let d = fd(&h, x, k, 1e-2).abs();
                    assert!(
                        d <= bound * (1.0 + 1e-4) + 1e-6,
                        "{}: |h^({k})({x})| = {d} exceeds ‖·‖ = {bound}",
                        h.name()
                    );
                    x += 0.05;
                }
            }
        }
    }

    #[test]
    fn known_norm_values() {
        let s = TestFunction::sin();
        for k in 1..=8 {
            assert_eq!(s.norms().norm(k).unwrap(), 1.0);
        }
        let l = TestFunction::logistic_scaled();
        // ‖h'‖ = 4·sup σ(1−σ) = 4/4 = 1.
        assert!((l.norms().norm(1).unwrap() - 1.0).abs() < 1e-5);
        let b = TestFunction::bump();
        // ‖h'‖ = sup |x|e^{−x²/2} = e^{−1/2}; ‖h''‖ = 1 attained at 0.
        assert!((b.norms().norm(1).unwrap() - (-0.5f64).exp()).abs() < 1e-5);
        assert!((b.norms().norm(2).unwrap() - 1.0).abs() < 1e-5);
        assert_eq!(TestFunction::linear_w1().norms().norm(1).unwrap(), 1.0);
        assert_eq!(TestFunction::linear_w1().norms().norm(5).unwrap(), 0.0);
    }

    #[test]
    fn from_name_resolution() {
        assert!(TestFunction::from_name("sin").is_ok());
        assert!(TestFunction::from_name("nope").is_err());
    }
}
