//! Built-in invariant battery: quick, deterministic checks across every
//! module, printed one per line. Any failure makes the command exit
//! non-zero.

use stein::bounds::{cor41_chisq_wasserstein, cor44_chi, theorem32_bound, BoundInputs};
use stein::combinatorics::{h_n, stirling2, DerivNormProfile};
use stein::distributions::{std_normal_abs_moment, DistributionSpec};
use stein::gfunctions::make_square_sum;
use stein::montecarlo::{estimate_ehgw, DistanceStudy, Reference};
use stein::quad::GaussHermite;
use stein::solver::{SolverConfig, SteinSolver};
use stein::special::gamma;
use stein::sum_moments::exact_moment_w;
use stein::testfn::TestFunction;
use stein::{Result, SteinError};

struct Battery {
    failures: usize,
}

impl Battery {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        if ok {
            println!("selftest {name}: ok ({detail})");
        } else {
            self.failures += 1;
            println!("selftest {name}: FAIL ({detail})");
        }
    }
}

pub fn run() -> Result<()> {
    let mut b = Battery { failures: 0 };

    let s42 = stirling2(4, 2)?;
    let h3 = h_n(3, &DerivNormProfile::constant(1.0, 3)?)?;
    b.check("combinatorics", s42 == 7 && h3 == 5.0, format!("{{4 2}} = {s42}, h₃ = {h3}"));

    let g_half = gamma(0.5);
    let g6 = gamma(6.0);
    b.check(
        "gamma",
        (g_half * g_half - std::f64::consts::PI).abs() < 1e-12 && (g6 - 120.0).abs() < 1e-10,
        format!("Γ(1/2)² = {:.12}, Γ(6) = {g6}", g_half * g_half),
    );

    let ez3 = std_normal_abs_moment(3.0)?;
    let want = 2.0 * (2.0 / std::f64::consts::PI).sqrt();
    b.check("normal-abs-moment", (ez3 - want).abs() < 1e-12, format!("E|Z|³ = {ez3:.12}"));

    let gh = GaussHermite::new(64)?;
    let ez4 = gh.expect(|z| z.powi(4));
    b.check("gauss-hermite", (ez4 - 3.0).abs() < 1e-10, format!("E Z⁴ = {ez4:.12}"));

    let dist = DistributionSpec::standardized_exponential();
    let w4 = exact_moment_w(&dist, 7, 4)?;
    let want = 3.0 + (dist.moment(4)? - 3.0) / 7.0;
    b.check("sum-moments", (w4 - want).abs() < 1e-12, format!("E W⁴ = {w4:.12}"));

    let rade = DistributionSpec::rademacher();
    let cor41 = cor41_chisq_wasserstein(1, 100, &rade, 1.0)?.total;
    let want = 4.8 * (1.0 + (2.0 / std::f64::consts::PI).sqrt() + 0.1);
    b.check(
        "cor41-value",
        (cor41 - want).abs() < 1e-6 * want,
        format!("total = {cor41:.6} vs {want:.6}"),
    );

    let cor44 = cor44_chi(2, 400, &rade, 1.0)?.total;
    b.check("cor44-value", (cor44 - 0.3).abs() < 1e-14, format!("total = {cor44}"));

    // Two algebraic routes to the same chi-square bound.
    let g = make_square_sum(1)?;
    let norms = DerivNormProfile::constant(1.0, 8)?;
    let general = theorem32_bound(&BoundInputs::iid(rade, 100, 2, &g, &norms)?)?.total;
    b.check(
        "theorem-vs-corollary",
        (general - cor41).abs() < 1e-12 * cor41,
        format!("theorem route {general:.9} vs corollary route {cor41:.9}"),
    );

    let h = TestFunction::sin();
    let a = estimate_ehgw(&g, &h, &[dist], 16, 100_000, 11, 0)?;
    let c = estimate_ehgw(&g, &h, &[dist], 16, 100_000, 11, 0)?;
    b.check(
        "mc-determinism",
        a == c,
        format!("mean {} reproduced bit-exactly", a.mean),
    );

    let study = DistanceStudy::new(g.clone(), h.clone(), Reference::default())?;
    let null = study.distance(&[DistributionSpec::standard_normal()], 16, 100_000, 12, 2)?;
    b.check(
        "exact-null",
        null.mean.abs() < 4.0 * null.stderr,
        format!("|Δ̂| = {:.2e} vs 4·stderr = {:.2e}", null.mean.abs(), 4.0 * null.stderr),
    );

    let solver = SteinSolver::new(&g, &h, SolverConfig::default())?;
    let resid = solver.stein_residual(&[1.0])?;
    b.check("stein-residual", resid < 1e-4, format!("residual {resid:.2e} at w = 1"));

    if b.failures > 0 {
        Err(SteinError::Invalid(format!("{} selftest check(s) failed", b.failures)))
    } else {
        println!("selftest: all checks passed");
        Ok(())
    }
}
