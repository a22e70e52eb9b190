//! JSON scenario configuration: schema, resolution against the preset
//! registries, and load-time validation of every referenced bound's
//! hypotheses.

use serde::Deserialize;

use stein::bounds::{
    cor41_chisq_wasserstein, cor42_chisq_smooth, cor43_vg, cor44_chi, theorem31_bound,
    theorem32_bound, theorem33_bound, theorem34_bound, BlockSpec, BoundInputs, BoundReport,
};
use stein::combinatorics::DerivNormProfile;
use stein::distributions::DistributionSpec;
use stein::gfunctions::{self, GFunction};
use stein::testfn::TestFunction;
use stein::{Result, SteinError};

pub const SCHEMA_VERSION: u32 = 1;

pub const KNOWN_BOUNDS: [&str; 8] = [
    "theorem31", "theorem32", "theorem33", "theorem34", "cor41", "cor42", "cor43", "cor44",
];

#[derive(Debug, Deserialize)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub scenarios: Vec<ScenarioSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum DistField {
    One(String),
    PerBlock(Vec<String>),
}

#[derive(Debug, Deserialize)]
pub struct GSpec {
    pub preset: String,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub m: Option<u32>,
    #[serde(default)]
    pub coeffs: Option<Vec<f64>>,
    #[serde(default)]
    pub scale_n: Option<usize>,
}

#[derive(Debug, Deserialize)]
pub struct HSpec {
    pub preset: String,
    #[serde(default)]
    pub norms: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub struct SolveSpec {
    pub w_min: f64,
    pub w_max: f64,
    pub points: usize,
}

fn default_p() -> usize {
    2
}

fn default_grid() -> Vec<usize> {
    vec![16, 32, 64, 128, 256]
}

fn default_samples() -> u64 {
    10_000_000
}

#[derive(Debug, Deserialize)]
pub struct ScenarioSpec {
    pub id: String,
    pub dist: DistField,
    pub g: GSpec,
    pub h: HSpec,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default = "default_p")]
    pub p: usize,
    #[serde(default = "default_grid")]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub bounds: Vec<String>,
    /// First block size for the two-sample variance-gamma bound; defaults
    /// to the grid value n.
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub solve: Option<SolveSpec>,
}

/// A fully resolved scenario, ready to run.
pub struct Scenario {
    pub id: String,
    pub dists: Vec<DistributionSpec>,
    pub g: GFunction,
    pub h: TestFunction,
    pub p: usize,
    pub n_grid: Vec<usize>,
    pub samples: u64,
    pub seed: u64,
    pub bounds: Vec<String>,
    pub m_override: Option<usize>,
    pub solve: Option<SolveSpec>,
}

impl Scenario {
    /// The per-block laws, broadcasting a single law over g.dim() blocks.
    pub fn block_dists(&self) -> Vec<DistributionSpec> {
        if self.dists.len() == 1 {
            vec![self.dists[0]; self.g.dim()]
        } else {
            self.dists.clone()
        }
    }

    /// Evaluates one named bound at block size n.
    pub fn evaluate_bound(&self, bound_id: &str, n: usize) -> Result<BoundReport> {
        let blocks: Vec<BlockSpec> = self
            .block_dists()
            .into_iter()
            .map(|dist| BlockSpec { dist, n })
            .collect();
        let norms = self.h.norms();
        match bound_id {
            "theorem31" => theorem31_bound(&BoundInputs::new(blocks, self.p, &self.g, norms)?),
            "theorem32" => theorem32_bound(&BoundInputs::new(blocks, self.p, &self.g, norms)?),
            "theorem33" => theorem33_bound(&BoundInputs::new(blocks, self.p, &self.g, norms)?),
            "theorem34" => theorem34_bound(&BoundInputs::new(blocks, self.p, &self.g, norms)?),
            "cor41" => {
                cor41_chisq_wasserstein(self.g.dim(), n, &blocks[0].dist, norms.norm(1)?)
            }
            "cor42" => cor42_chisq_smooth(self.g.dim(), n, &blocks[0].dist, norms),
            "cor43" => {
                if self.g.dim() % 2 != 0 {
                    return Err(SteinError::Hypothesis(format!(
                        "cor43 needs the paired-product statistic (even dimension), \
                         got {} with dimension {}",
                        self.g.name(),
                        self.g.dim()
                    )));
                }
                let d_pairs = self.g.dim() / 2;
                let m = self.m_override.unwrap_or(n);
                let dist_x = blocks[0].dist;
                let dist_y = blocks[blocks.len() - 1].dist;
                cor43_vg(d_pairs, m, n, &dist_x, &dist_y, norms)
            }
            "cor44" => cor44_chi(self.g.dim(), n, &blocks[0].dist, norms.norm(1)?),
            other => Err(SteinError::Invalid(format!(
                "unknown bound id `{other}`; known: {}",
                KNOWN_BOUNDS.join(", ")
            ))),
        }
    }
}

fn resolve_scenario(spec: ScenarioSpec) -> Result<Scenario> {
    let g = gfunctions::from_preset(
        &spec.g.preset,
        spec.g.d,
        spec.g.m,
        spec.g.coeffs.as_deref(),
        spec.g.scale_n,
    )?;
    if let Some(d) = spec.d {
        if d != g.dim() {
            return Err(SteinError::Invalid(format!(
                "scenario `{}`: field d = {d} but {} has dimension {}",
                spec.id,
                g.name(),
                g.dim()
            )));
        }
    }
    let mut h = TestFunction::from_name(&spec.h.preset)?;
    if let Some(norms) = spec.h.norms {
        h = h.with_norms(DerivNormProfile::new(norms)?);
    }
    let dists = match spec.dist {
        DistField::One(name) => vec![DistributionSpec::from_name(&name)?],
        DistField::PerBlock(names) => {
            if names.len() != g.dim() {
                return Err(SteinError::Invalid(format!(
                    "scenario `{}`: {} per-block distributions for dimension {}",
                    spec.id,
                    names.len(),
                    g.dim()
                )));
            }
            names
                .iter()
                .map(|n| DistributionSpec::from_name(n))
                .collect::<Result<Vec<_>>>()?
        }
    };
    if spec.n_grid.is_empty() || spec.n_grid.iter().any(|&n| n == 0) {
        return Err(SteinError::Invalid(format!(
            "scenario `{}`: n_grid must be non-empty with positive entries",
            spec.id
        )));
    }
    for b in &spec.bounds {
        if !KNOWN_BOUNDS.contains(&b.as_str()) {
            return Err(SteinError::Invalid(format!(
                "scenario `{}`: unknown bound `{b}`; known: {}",
                spec.id,
                KNOWN_BOUNDS.join(", ")
            )));
        }
    }
    if let Some(s) = &spec.solve {
        if s.points < 2 || !(s.w_min < s.w_max) {
            return Err(SteinError::Invalid(format!(
                "scenario `{}`: solve grid needs points ≥ 2 and w_min < w_max",
                spec.id
            )));
        }
    }
    let scenario = Scenario {
        id: spec.id,
        dists,
        g,
        h,
        p: spec.p,
        n_grid: spec.n_grid,
        samples: spec.samples,
        seed: spec.seed,
        bounds: spec.bounds,
        m_override: spec.m,
        solve: spec.solve,
    };
    // Referenced bounds must satisfy their hypotheses at load time; a dry
    // run at the first grid size surfaces the named failure immediately.
    for b in scenario.bounds.clone() {
        scenario.evaluate_bound(&b, scenario.n_grid[0]).map_err(|e| {
            SteinError::Invalid(format!(
                "scenario `{}`: bound `{b}` is not applicable: {e}",
                scenario.id
            ))
        })?;
    }
    Ok(scenario)
}

/// Parses and validates a configuration document.
pub fn load_config(text: &str) -> Result<Vec<Scenario>> {
    let file: ConfigFile = serde_json::from_str(text)
        .map_err(|e| SteinError::Invalid(format!("config parse error: {e}")))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(SteinError::Invalid(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    if file.scenarios.is_empty() {
        return Err(SteinError::Invalid("config has no scenarios".into()));
    }
    file.scenarios.into_iter().map(resolve_scenario).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{
        "schema_version": 1,
        "scenarios": [{
            "id": "demo",
            "dist": "rademacher",
            "g": {"preset": "square_sum", "d": 1},
            "h": {"preset": "sin"},
            "p": 2,
            "n_grid": [25, 100],
            "samples": 1000,
            "seed": 7,
            "bounds": ["cor41", "cor42", "theorem34"]
        }]
    }"#;

    #[test]
    fn good_config_loads() {
        let scenarios = load_config(GOOD).unwrap();
        assert_eq!(scenarios.len(), 1);
        assert_eq!(scenarios[0].g.dim(), 1);
        let rep = scenarios[0].evaluate_bound("cor41", 100).unwrap();
        assert!(rep.total > 0.0);
    }

    #[test]
    fn bad_schema_version_rejected() {
        let text = GOOD.replace("\"schema_version\": 1", "\"schema_version\": 3");
        assert!(load_config(&text).is_err());
    }

    #[test]
    fn inapplicable_bound_rejected_at_load() {
        // theorem33 needs an even g; monomial(3) is odd.
        let text = GOOD
            .replace("\"square_sum\", \"d\": 1", "\"monomial\", \"m\": 3")
            .replace("[\"cor41\", \"cor42\", \"theorem34\"]", "[\"theorem33\"]");
        let err = load_config(&text).unwrap_err();
        assert!(err.to_string().contains("theorem33"), "{err}");
    }

    #[test]
    fn unknown_references_rejected() {
        let text = GOOD.replace("rademacher", "cauchy");
        assert!(load_config(&text).is_err());
        let text = GOOD.replace("cor41", "cor99");
        assert!(load_config(&text).is_err());
    }

    #[test]
    fn moment_matching_failure_is_reported_at_load() {
        // Exponential summands have E X³ ≠ 0, so theorem bounds at p = 3
        // must be rejected when referenced.
        let text = GOOD
            .replace("rademacher", "standardized_exponential")
            .replace("\"p\": 2", "\"p\": 3")
            .replace("[\"cor41\", \"cor42\", \"theorem34\"]", "[\"theorem31\"]");
        let err = load_config(&text).unwrap_err();
        assert!(err.to_string().contains("moment matching"), "{err}");
    }
}
