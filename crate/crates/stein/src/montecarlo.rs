//! Seeded, parallel-reproducible Monte Carlo estimation of
//! Δ(n) = E h(g(W)) − E h(g(Z)), convergence-rate fitting, and empirical
//! bound-validity checking.
//!
//! Replicates are partitioned into fixed-size batches; batch `b` of a
//! logical stream draws from an independent ChaCha substream derived from
//! `(seed, stream_id, b)`, and batch statistics are merged in batch order.
//! The result is therefore bit-identical for any worker count.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::BoundReport;
use crate::distributions::{DistributionSpec, StreamRng, RNG_ID};
use crate::error::{Result, SteinError};
use crate::gfunctions::GFunction;
use crate::quad::GaussHermite;
use crate::testfn::TestFunction;

/// Replicates per batch (and per RNG substream).
const BATCH: u64 = 1 << 16;
/// Substreams reserved per logical stream id.
const STREAM_SPAN: u64 = 1 << 24;

/// A Monte Carlo mean with standard error and full stream provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    /// Sample standard deviation divided by √n_samples (0 when exact).
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub stream_id: u64,
    pub rng: &'static str,
}

#[derive(Debug, Clone, Copy, Default)]
struct RunningStat {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStat {
    #[inline]
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Pairwise-stable merge of two partial statistics.
    fn merge(a: Self, b: Self) -> Self {
        if a.n == 0 {
            return b;
        }
        if b.n == 0 {
            return a;
        }
        let n = a.n + b.n;
        let delta = b.mean - a.mean;
        RunningStat {
            n,
            mean: a.mean + delta * (b.n as f64 / n as f64),
            m2: a.m2 + b.m2 + delta * delta * (a.n as f64 * b.n as f64 / n as f64),
        }
    }

    fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / ((self.n - 1) as f64 * self.n as f64)).sqrt()
    }
}

/// Batched, worker-count-independent mean of `per_replicate` values.
pub fn mc_estimate<F>(n_samples: u64, seed: u64, stream_id: u64, per_replicate: F) -> MCEstimate
where
    F: Fn(&mut StreamRng) -> f64 + Sync,
{
    let n_batches = n_samples.div_ceil(BATCH);
    assert!(
        n_batches < STREAM_SPAN,
        "sample count {n_samples} exceeds the substream budget"
    );
    let stats: Vec<RunningStat> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let lo = b * BATCH;
            let hi = n_samples.min(lo + BATCH);
            let mut rng = StreamRng::new(seed, stream_id.wrapping_mul(STREAM_SPAN) + b);
            let mut st = RunningStat::default();
            for _ in lo..hi {
                st.push(per_replicate(&mut rng));
            }
            st
        })
        .collect();
    let total = stats.into_iter().fold(RunningStat::default(), RunningStat::merge);
    MCEstimate {
        mean: total.mean,
        stderr: total.stderr(),
        n_samples,
        seed,
        stream_id,
        rng: RNG_ID,
    }
}

/// Resolves the per-block law: a single spec broadcasts to every block.
fn block_dists<'a>(dists: &'a [DistributionSpec], d: usize) -> Result<Vec<&'a DistributionSpec>> {
    match dists.len() {
        1 => Ok(vec![&dists[0]; d]),
        len if len == d => Ok(dists.iter().collect()),
        len => Err(SteinError::Invalid(format!(
            "expected 1 or {d} distributions for {d} coordinate blocks, got {len}"
        ))),
    }
}

/// Sample mean of h(g(W)) over `n_samples` realizations of W, where each of
/// the g.dim() coordinates is an independent standardized sum of `n` draws.
pub fn estimate_ehgw(
    g: &GFunction,
    h: &TestFunction,
    dists: &[DistributionSpec],
    n: usize,
    n_samples: u64,
    seed: u64,
    stream_id: u64,
) -> Result<MCEstimate> {
    let d = g.dim();
    if d > 8 {
        return Err(SteinError::Range(format!(
            "estimate_ehgw supports dimension ≤ 8, got {d}"
        )));
    }
    if n == 0 {
        return Err(SteinError::Range("block size n must be ≥ 1".into()));
    }
    let blocks: Vec<DistributionSpec> = block_dists(dists, d)?.into_iter().copied().collect();
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    Ok(mc_estimate(n_samples, seed, stream_id, move |rng| {
        let mut w = [0.0f64; 8];
        let mut buf = [0.0f64; 64];
        for (j, dist) in blocks.iter().enumerate() {
            let mut sum = 0.0;
            let mut left = n;
            while left > 0 {
                let take = left.min(buf.len());
                dist.sample_into(rng, &mut buf[..take]);
                sum += buf[..take].iter().sum::<f64>();
                left -= take;
            }
            w[j] = sum * inv_sqrt_n;
        }
        h.eval(g.eval(&w[..d]))
    }))
}

/// How to compute the limiting reference E h(g(Z)).
#[derive(Debug, Clone, Copy)]
pub enum Reference {
    /// Tensor Gauss-Hermite; exact to ~1e-8 and treated as error-free.
    /// Only available for g.dim() ≤ 2.
    Quadrature { nodes: usize },
    /// Fixed-seed Monte Carlo fallback for higher dimensions.
    MonteCarlo { n_samples: u64, seed: u64, stream_id: u64 },
}

impl Default for Reference {
    fn default() -> Self {
        Reference::Quadrature { nodes: 64 }
    }
}

/// E h(g(Z)) by the requested method.
pub fn reference_ehgz(g: &GFunction, h: &TestFunction, method: Reference) -> Result<MCEstimate> {
    match method {
        Reference::Quadrature { nodes } => {
            if g.dim() > 2 {
                return Err(SteinError::Range(format!(
                    "quadrature reference supports g.dim ≤ 2, got {} (use the \
                     Monte Carlo reference instead)",
                    g.dim()
                )));
            }
            let rule = GaussHermite::new(nodes.max(64))?;
            let mean = rule.expect_d(g.dim(), |z| h.eval(g.eval(z)))?;
            Ok(MCEstimate {
                mean,
                stderr: 0.0,
                n_samples: 0,
                seed: 0,
                stream_id: 0,
                rng: "gauss-hermite",
            })
        }
        Reference::MonteCarlo { n_samples, seed, stream_id } => {
            let d = g.dim();
            if d > 8 {
                return Err(SteinError::Range(format!(
                    "Monte Carlo reference supports dimension ≤ 8, got {d}"
                )));
            }
            let normal = DistributionSpec::standard_normal();
            Ok(mc_estimate(n_samples, seed, stream_id, move |rng| {
                let mut z = [0.0f64; 8];
                normal.sample_into(rng, &mut z[..d]);
                h.eval(g.eval(&z[..d]))
            }))
        }
    }
}

/// A (g, h) pair with its reference expectation computed once and reused
/// across every n in a grid.
pub struct DistanceStudy {
    g: GFunction,
    h: TestFunction,
    reference: MCEstimate,
}

impl DistanceStudy {
    pub fn new(g: GFunction, h: TestFunction, method: Reference) -> Result<Self> {
        let reference = reference_ehgz(&g, &h, method)?;
        Ok(Self { g, h, reference })
    }

    pub fn g(&self) -> &GFunction {
        &self.g
    }

    pub fn h(&self) -> &TestFunction {
        &self.h
    }

    pub fn reference(&self) -> &MCEstimate {
        &self.reference
    }

    /// Δ̂(n) = (sample mean of h(g(W))) − E h(g(Z)), with standard errors
    /// combined in quadrature.
    pub fn distance(
        &self,
        dists: &[DistributionSpec],
        n: usize,
        n_samples: u64,
        seed: u64,
        stream_id: u64,
    ) -> Result<MCEstimate> {
        let est = estimate_ehgw(&self.g, &self.h, dists, n, n_samples, seed, stream_id)?;
        Ok(MCEstimate {
            mean: est.mean - self.reference.mean,
            stderr: est.stderr.hypot(self.reference.stderr),
            ..est
        })
    }
}

/// One-shot distance estimate. Grid loops should build a [`DistanceStudy`]
/// so the reference is computed once.
pub fn distance(
    g: &GFunction,
    h: &TestFunction,
    dists: &[DistributionSpec],
    n: usize,
    n_samples: u64,
    seed: u64,
    stream_id: u64,
) -> Result<MCEstimate> {
    DistanceStudy::new(g.clone(), h.clone(), Reference::default())?
        .distance(dists, n, n_samples, seed, stream_id)
}

/// One grid point of a rate study.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatePoint {
    pub n: usize,
    pub delta: f64,
    pub stderr: f64,
    /// Participates in the fit iff |delta| > 3·stderr.
    pub included: bool,
}

/// A fitted log–log slope with diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub points: Vec<RatePoint>,
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub seed: u64,
    pub n_samples: u64,
}

impl RateFit {
    pub fn excluded(&self) -> Vec<RatePoint> {
        self.points.iter().copied().filter(|p| !p.included).collect()
    }
}

/// Least-squares slope of log|Δ̂| on log n over the significant points.
pub fn rate_fit(
    g: &GFunction,
    h: &TestFunction,
    dists: &[DistributionSpec],
    n_grid: &[usize],
    n_samples: u64,
    seed: u64,
    stream_id: u64,
    reference: Reference,
) -> Result<RateFit> {
    if n_grid.len() < 4 {
        return Err(SteinError::Invalid(format!(
            "rate fit needs a grid of ≥ 4 sizes, got {}",
            n_grid.len()
        )));
    }
    let study = DistanceStudy::new(g.clone(), h.clone(), reference)?;
    let mut points = Vec::with_capacity(n_grid.len());
    for (i, &n) in n_grid.iter().enumerate() {
        let d = study.distance(dists, n, n_samples, seed, stream_id + i as u64)?;
        points.push(RatePoint {
            n,
            delta: d.mean,
            stderr: d.stderr,
            included: d.mean.abs() > 3.0 * d.stderr,
        });
    }
    let sig: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.included)
        .map(|p| ((p.n as f64).ln(), p.delta.abs().ln()))
        .collect();
    if sig.len() < 3 {
        return Err(SteinError::InsufficientSignal {
            kept: sig.len(),
            total: points.len(),
            points: points.iter().map(|p| (p.n, p.delta.abs(), p.stderr)).collect(),
        });
    }
    let m = sig.len() as f64;
    let mean_x = sig.iter().map(|(x, _)| x).sum::<f64>() / m;
    let mean_y = sig.iter().map(|(_, y)| y).sum::<f64>() / m;
    let sxx: f64 = sig.iter().map(|(x, _)| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = sig.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr: f64 = sig
        .iter()
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let slope_stderr = if sig.len() > 2 {
        (ssr / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(RateFit { points, slope, intercept, slope_stderr, seed, n_samples })
}

/// One row of an empirical bound-validity table.
#[derive(Debug, Clone, Serialize)]
pub struct ValidityRow {
    pub n: usize,
    pub delta: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub bound_id: String,
    pub bound_total: f64,
    /// bound_total − (|Δ̂| − 3·stderr); non-negative when the bound holds.
    pub margin: f64,
    pub ok: bool,
}

/// Checks |Δ̂(n)| − 3·stderr ≤ bound(n) for each n. A violation is
/// reported as a finding (`ok = false`), not an error.
pub fn bound_validity<B>(
    study: &DistanceStudy,
    dists: &[DistributionSpec],
    n_grid: &[usize],
    n_samples: u64,
    seed: u64,
    stream_id: u64,
    bound_fn: B,
) -> Result<Vec<ValidityRow>>
where
    B: Fn(usize) -> Result<BoundReport>,
{
    let mut rows = Vec::with_capacity(n_grid.len());
    for (i, &n) in n_grid.iter().enumerate() {
        let d = study.distance(dists, n, n_samples, seed, stream_id + i as u64)?;
        let report = bound_fn(n)?;
        let margin = report.total - (d.mean.abs() - 3.0 * d.stderr);
        rows.push(ValidityRow {
            n,
            delta: d.mean,
            stderr: d.stderr,
            n_samples,
            seed,
            bound_id: report.bound_id.clone(),
            bound_total: report.total,
            margin,
            ok: margin >= 0.0,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfunctions::{make_pair_product, make_square_sum};

    #[test]
    fn constant_h_gives_exact_mean_and_zero_stderr() {
        let g = make_square_sum(1).unwrap();
        let h = TestFunction::constant(2.5);
        let d = [DistributionSpec::rademacher()];
        let est = estimate_ehgw(&g, &h, &d, 8, 10_000, 1, 0).unwrap();
        assert_eq!(est.mean, 2.5);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn mean_of_w_squared_is_one() {
        // h(x) = x, g = w²: E h(g(W)) = E W² = 1 exactly.
        let g = make_square_sum(1).unwrap();
        let h = TestFunction::linear_w1();
        let d = [DistributionSpec::rademacher()];
        let est = estimate_ehgw(&g, &h, &d, 16, 200_000, 7, 1).unwrap();
        assert!(
            (est.mean - 1.0).abs() < 4.0 * est.stderr,
            "mean {} se {}",
            est.mean,
            est.stderr
        );
    }

    #[test]
    fn reproducible_across_worker_counts() {
        let g = make_pair_product(1).unwrap();
        let h = TestFunction::sin();
        let d = [DistributionSpec::standardized_exponential()];
        let run = || {
            estimate_ehgw(&g, &h, &d, 32, 300_000, 99, 5).unwrap()
        };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(7)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(single, multi, "estimate depends on worker count");
        let again = run();
        assert_eq!(single, again, "estimate not reproducible");
    }

    #[test]
    fn quadrature_reference_known_values() {
        let h_id = TestFunction::linear_w1();
        // E Z² = 1 and E(Z₁²+Z₂²) = 2.
        let r1 = reference_ehgz(&make_square_sum(1).unwrap(), &h_id, Reference::default()).unwrap();
        assert!((r1.mean - 1.0).abs() < 1e-10);
        let r2 = reference_ehgz(&make_square_sum(2).unwrap(), &h_id, Reference::default()).unwrap();
        assert!((r2.mean - 2.0).abs() < 1e-10);

        // E sin(Z²) = Im (1−2i)^{−1/2} = 5^{−1/4} sin(arctan(2)/2).
        let want = 5f64.powf(-0.25) * (2f64.atan() / 2.0).sin();
        let r3 =
            reference_ehgz(&make_square_sum(1).unwrap(), &TestFunction::sin(), Reference::default())
                .unwrap();
        assert!((r3.mean - want).abs() < 1e-10, "{} vs {}", r3.mean, want);
    }

    #[test]
    fn quadrature_and_mc_references_agree() {
        let g = make_pair_product(1).unwrap();
        let h = TestFunction::sin();
        let q = reference_ehgz(&g, &h, Reference::default()).unwrap();
        let mc = reference_ehgz(
            &g,
            &h,
            Reference::MonteCarlo { n_samples: 1_000_000, seed: 5, stream_id: 9 },
        )
        .unwrap();
        assert!(
            (q.mean - mc.mean).abs() < 4.0 * mc.stderr,
            "quadrature {} vs mc {} ± {}",
            q.mean,
            mc.mean,
            mc.stderr
        );
    }

    #[test]
    fn quadrature_reference_rejects_high_dimension() {
        let g = crate::gfunctions::make_product(3).unwrap();
        let h = TestFunction::sin();
        assert!(reference_ehgz(&g, &h, Reference::default()).is_err());
    }

    #[test]
    fn exact_null_for_standard_normal() {
        let study = DistanceStudy::new(
            make_square_sum(1).unwrap(),
            TestFunction::sin(),
            Reference::default(),
        )
        .unwrap();
        let d = [DistributionSpec::standard_normal()];
        for (i, n) in [4usize, 32].into_iter().enumerate() {
            let est = study.distance(&d, n, 400_000, 17, 40 + i as u64).unwrap();
            assert!(
                est.mean.abs() < 4.0 * est.stderr,
                "n={n}: Δ̂ = {} se {}",
                est.mean,
                est.stderr
            );
        }
    }

    #[test]
    fn stderr_scales_like_inverse_sqrt_n() {
        let g = make_square_sum(1).unwrap();
        let h = TestFunction::sin();
        let d = [DistributionSpec::standardized_exponential()];
        let a = estimate_ehgw(&g, &h, &d, 16, 100_000, 3, 21).unwrap();
        let b = estimate_ehgw(&g, &h, &d, 16, 400_000, 3, 22).unwrap();
        let ratio = b.stderr / a.stderr;
        assert!((0.4..=0.6).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rate_fit_insufficient_signal_on_exact_null() {
        let err = rate_fit(
            &make_square_sum(1).unwrap(),
            &TestFunction::sin(),
            &[DistributionSpec::standard_normal()],
            &[8, 16, 32, 64],
            100_000,
            23,
            60,
            Reference::default(),
        )
        .unwrap_err();
        assert!(matches!(err, SteinError::InsufficientSignal { .. }), "{err}");
    }

    #[test]
    fn distance_shrinks_with_n_when_signal_present() {
        let study = DistanceStudy::new(
            make_square_sum(1).unwrap(),
            TestFunction::sin(),
            Reference::default(),
        )
        .unwrap();
        let d = [DistributionSpec::standardized_exponential()];
        let d16 = study.distance(&d, 16, 2_000_000, 31, 70).unwrap();
        let d64 = study.distance(&d, 64, 2_000_000, 31, 71).unwrap();
        assert!(d16.mean.abs() > 3.0 * d16.stderr, "no signal at n=16");
        assert!(d64.mean.abs() > 3.0 * d64.stderr, "no signal at n=64");
        assert!(d64.mean.abs() < d16.mean.abs(), "{} !< {}", d64.mean.abs(), d16.mean.abs());
    }
}
