//! Moments of the normalized sum W = n^{−1/2} Σ_{i=1}^n X_i: exact raw
//! moments via the cumulant expansion, valid upper bounds for absolute
//! moments via Lyapunov's inequality, and a Monte Carlo estimator for
//! diagnostics.

use crate::distributions::{DistributionSpec, StreamRng};
use crate::error::{Result, SteinError};
use crate::montecarlo::{mc_estimate, MCEstimate};

/// Highest order supported by the exact expansion.
pub const MAX_W_ORDER: usize = 8;

fn binom(n: usize, k: usize) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Cumulants κ_1..κ_k of X from its raw moments, by the standard recursive
/// inversion κ_j = m_j − Σ_{i<j} C(j−1, i−1) κ_i m_{j−i}.
fn cumulants(dist: &DistributionSpec, k: usize) -> Result<Vec<f64>> {
    let mut m = vec![1.0];
    for j in 1..=k {
        m.push(dist.moment(j)?);
    }
    let mut kappa = vec![0.0; k + 1];
    for j in 1..=k {
        let mut acc = m[j];
        for i in 1..j {
            acc -= binom(j - 1, i - 1) * kappa[i] * m[j - i];
        }
        kappa[j] = acc;
    }
    Ok(kappa)
}

/// Exact E W^k for k ≤ 8, as a polynomial in the moments of X and 1/n.
///
/// Cumulants add over independent summands (κ_j(ΣX) = n·κ_j(X)), and raw
/// moments recover from cumulants by m_j = Σ C(j−1, i−1) κ_i m_{j−i}; the
/// result is exact and O(1) in n.
pub fn exact_moment_w(dist: &DistributionSpec, n: usize, k: usize) -> Result<f64> {
    if k > MAX_W_ORDER {
        return Err(SteinError::Range(format!(
            "exact_moment_w supports k ≤ {MAX_W_ORDER}, got {k}"
        )));
    }
    if n == 0 {
        return Err(SteinError::Range("block size n must be ≥ 1".into()));
    }
    let kappa_x = cumulants(dist, k.max(1))?;
    let nf = n as f64;
    // Moments of the sum from its cumulants n·κ_j(X).
    let mut m_sum = vec![0.0; k + 1];
    m_sum[0] = 1.0;
    for j in 1..=k {
        let mut acc = 0.0;
        for i in 1..=j {
            acc += binom(j - 1, i - 1) * nf * kappa_x[i] * m_sum[j - i];
        }
        m_sum[j] = acc;
    }
    Ok(m_sum[k] / nf.powf(k as f64 / 2.0))
}

/// Which route produced an E|W|^r value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WAbsRoute {
    /// r is an even integer; the raw moment is the absolute moment.
    ExactEven,
    /// Lyapunov upper bound (E W^s)^{r/s} with s the smallest even
    /// integer ≥ r; keeps every evaluated bound a valid bound.
    Lyapunov,
}

impl WAbsRoute {
    pub fn describe(self, r: f64) -> String {
        match self {
            WAbsRoute::ExactEven => format!("E|W|^{r} exact (even order)"),
            WAbsRoute::Lyapunov => {
                let s = smallest_even_at_least(r);
                format!("E|W|^{r} ≤ (E W^{s})^{{{r}/{s}}} (Lyapunov)")
            }
        }
    }
}

fn smallest_even_at_least(r: f64) -> usize {
    let mut s = r.ceil() as usize;
    if s % 2 == 1 {
        s += 1;
    }
    s.max(2)
}

/// A valid upper bound for E|W|^r, exact when r is an even integer.
pub fn abs_moment_w_upper(dist: &DistributionSpec, n: usize, r: f64) -> Result<f64> {
    Ok(abs_moment_w_upper_traced(dist, n, r)?.0)
}

/// Like [`abs_moment_w_upper`] but also reports which route was taken.
pub fn abs_moment_w_upper_traced(
    dist: &DistributionSpec,
    n: usize,
    r: f64,
) -> Result<(f64, WAbsRoute)> {
    if !(r >= 0.0) {
        return Err(SteinError::Domain(format!("order r = {r} must be ≥ 0")));
    }
    if r > MAX_W_ORDER as f64 {
        return Err(SteinError::Range(format!(
            "abs_moment_w_upper supports r ≤ {MAX_W_ORDER}, got {r}"
        )));
    }
    if r == 0.0 {
        return Ok((1.0, WAbsRoute::ExactEven));
    }
    let is_even_integer = r.fract() == 0.0 && (r as usize) % 2 == 0;
    if is_even_integer {
        Ok((exact_moment_w(dist, n, r as usize)?, WAbsRoute::ExactEven))
    } else {
        let s = smallest_even_at_least(r);
        let ms = exact_moment_w(dist, n, s)?;
        Ok((ms.powf(r / s as f64), WAbsRoute::Lyapunov))
    }
}

/// Monte Carlo estimate of E|W|^r, for diagnostics only; the bound
/// evaluators use the Lyapunov surrogate.
pub fn mc_abs_moment_w(
    dist: &DistributionSpec,
    n: usize,
    r: f64,
    n_samples: u64,
    seed: u64,
    stream_id: u64,
) -> Result<MCEstimate> {
    if n_samples < 1_000 {
        return Err(SteinError::Range(format!(
            "mc_abs_moment_w needs ≥ 1000 samples, got {n_samples}"
        )));
    }
    if n == 0 {
        return Err(SteinError::Range("block size n must be ≥ 1".into()));
    }
    let dist = *dist;
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    Ok(mc_estimate(n_samples, seed, stream_id, move |rng: &mut StreamRng| {
        let mut buf = [0.0f64; 64];
        let mut sum = 0.0;
        let mut left = n;
        while left > 0 {
            let take = left.min(buf.len());
            dist.sample_into(rng, &mut buf[..take]);
            sum += buf[..take].iter().sum::<f64>();
            left -= take;
        }
        (sum * inv_sqrt_n).abs().powf(r)
    }))
}

/// Tabulated moments of W for one (dist, n): exact raw moments for k ≤ 8
/// and absolute-moment upper bounds on a requested grid of orders.
#[derive(Debug, Clone)]
pub struct SumMomentTable {
    pub dist: DistributionSpec,
    pub n: usize,
    pub exact_moments: Vec<(usize, f64)>,
    pub abs_upper: Vec<(f64, f64)>,
}

impl SumMomentTable {
    pub fn build(dist: &DistributionSpec, n: usize, abs_orders: &[f64]) -> Result<Self> {
        let exact_moments = (1..=MAX_W_ORDER)
            .map(|k| Ok((k, exact_moment_w(dist, n, k)?)))
            .collect::<Result<Vec<_>>>()?;
        let abs_upper = abs_orders
            .iter()
            .map(|&r| Ok((r, abs_moment_w_upper(dist, n, r)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dist: *dist, n, exact_moments, abs_upper })
    }
}
