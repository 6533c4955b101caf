//! Seeded property campaigns: metric axioms and the robustness inequality.

use serde::{Deserialize, Serialize};

use crate::config::NumericConfig;
use crate::factor::{controller_symbols, graph_symbols, GraphSymbols};
use crate::gen::{perturb_plant, random_plant_from, random_stabilizing_controller, stream_rng, GenConfig};
use crate::numetric::nu_metric_symbols;
use crate::robust::robustness_check_symbols;
use crate::tfm::TransferMatrix;
use crate::Result;

pub const IDENTITY_TOL: f64 = 1e-7;
pub const SYMMETRY_TOL: f64 = 1e-7;
pub const TRIANGLE_TOL: f64 = 1e-6;
pub const SLACK_TOL: f64 = 1e-6;
pub const EPS_LEVELS: [f64; 3] = [1e-3, 1e-2, 1e-1];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    /// Largest violation seen (positive means a breach of the bound before
    /// the tolerance is applied).
    pub worst: f64,
    pub tolerance: f64,
    pub errors: Vec<String>,
    pub pass: bool,
}

impl SuiteResult {
    fn new(name: &str, tolerance: f64) -> Self {
        Self { name: name.into(), cases: 0, worst: f64::NEG_INFINITY, tolerance, errors: Vec::new(), pass: false }
    }

    fn record(&mut self, violation: f64) {
        self.cases += 1;
        self.worst = self.worst.max(violation);
    }

    fn fail(&mut self, what: String) {
        self.cases += 1;
        self.errors.push(what);
    }

    fn finish(mut self) -> Self {
        self.pass = self.errors.is_empty() && self.worst <= self.tolerance;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub pass: bool,
}

/// Stream offsets so that the different pools never share a stream.
const SISO_STREAM: u64 = 0;
const MIMO_STREAM: u64 = 1 << 20;
const TRIPLE_STREAM: u64 = 2 << 20;
const ROBUST_STREAM: u64 = 3 << 20;

struct Sample {
    plant: TransferMatrix,
    symbols: GraphSymbols,
}

fn pool(seed: u64, base: u64, count: usize, g: &GenConfig, cfg: &NumericConfig, errors: &mut Vec<String>) -> Vec<Sample> {
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mut rng = stream_rng(seed, base + k as u64);
        let made = random_plant_from(&mut rng, g, cfg).and_then(|plant| {
            let symbols = graph_symbols(&plant, cfg)?;
            Ok(Sample { plant, symbols })
        });
        match made {
            Ok(s) => out.push(s),
            Err(e) => errors.push(format!("plant {k} of stream {base}: {e}")),
        }
    }
    out
}

fn distance(a: &GraphSymbols, b: &GraphSymbols, cfg: &NumericConfig) -> Result<f64> {
    Ok(nu_metric_symbols(a, b, cfg)?.value)
}

/// Identity, symmetry and triangle-inequality suites over `n_siso` scalar
/// and `n_mimo` 2x2 plants plus `triples` triples.
pub fn metric_axioms(seed: u64, n_siso: usize, n_mimo: usize, triples: usize, cfg: &NumericConfig) -> Vec<SuiteResult> {
    let mut identity = SuiteResult::new("metric identity", IDENTITY_TOL);
    let mut symmetry = SuiteResult::new("metric symmetry", SYMMETRY_TOL);
    let mut triangle = SuiteResult::new("triangle inequality", TRIANGLE_TOL);

    let mut pool_errors = Vec::new();
    let siso = pool(seed, SISO_STREAM, n_siso, &GenConfig { seed, ..GenConfig::default() }, cfg, &mut pool_errors);
    let mimo =
        pool(seed, MIMO_STREAM, n_mimo, &GenConfig { seed, p: 2, m: 2, max_degree: 2, ..GenConfig::default() }, cfg, &mut pool_errors);
    for e in pool_errors {
        identity.fail(e);
    }

    for family in [&siso, &mimo] {
        for (k, s) in family.iter().enumerate() {
            match distance(&s.symbols, &s.symbols, cfg) {
                Ok(d) => identity.record(d),
                Err(e) => identity.fail(format!("identity {k}: {e}")),
            }
            let other = &family[(k + 1) % family.len()];
            match (distance(&s.symbols, &other.symbols, cfg), distance(&other.symbols, &s.symbols, cfg)) {
                (Ok(a), Ok(b)) => symmetry.record((a - b).abs()),
                (Err(e), _) | (_, Err(e)) => symmetry.fail(format!("symmetry {k}: {e}")),
            }
        }
    }

    for t in 0..triples {
        let mut rng = stream_rng(seed, TRIPLE_STREAM + t as u64);
        let family = if t % 4 == 3 && !mimo.is_empty() { &mimo } else { &siso };
        if family.is_empty() {
            continue;
        }
        let pick = |r: &mut rand_chacha::ChaCha8Rng| {
            use rand::Rng;
            r.random_range(0..family.len())
        };
        let outcome = if t % 2 == 0 {
            // three independent draws
            let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            triangle_violation(&family[a].symbols, &family[b].symbols, &family[c].symbols, cfg)
        } else {
            // a plant and two nearby perturbations
            let base = &family[pick(&mut rng)];
            let eps = [1e-2, 1e-1][t / 2 % 2];
            (|| {
                let p2 = perturb_plant(&base.plant, eps, seed ^ (t as u64) << 1, cfg)?;
                let p3 = perturb_plant(&base.plant, eps, seed ^ ((t as u64) << 1 | 1), cfg)?;
                let (g2, g3) = (graph_symbols(&p2, cfg)?, graph_symbols(&p3, cfg)?);
                triangle_violation(&base.symbols, &g2, &g3, cfg)
            })()
        };
        match outcome {
            Ok(v) => triangle.record(v),
            Err(e) => triangle.fail(format!("triple {t}: {e}")),
        }
    }
    vec![identity.finish(), symmetry.finish(), triangle.finish()]
}

/// Worst breach of the triangle inequality over the three orderings.
fn triangle_violation(a: &GraphSymbols, b: &GraphSymbols, c: &GraphSymbols, cfg: &NumericConfig) -> Result<f64> {
    let ab = distance(a, b, cfg)?;
    let bc = distance(b, c, cfg)?;
    let ac = distance(a, c, cfg)?;
    Ok((ac - ab - bc).max(ab - ac - bc).max(bc - ab - ac))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessCase {
    pub eps: f64,
    pub slack: f64,
    pub distance: f64,
    pub margin_nominal: f64,
    pub margin_perturbed: f64,
}

/// Robustness inequality over `triples` triples `(P0, C, perturb(P0, eps))`
/// with `C` stabilizing `P0`; every fourth nominal plant is a stable 2x2.
pub fn robustness(seed: u64, triples: usize, cfg: &NumericConfig) -> (SuiteResult, Vec<RobustnessCase>) {
    let mut suite = SuiteResult::new("robustness inequality", SLACK_TOL);
    let mut cases = Vec::with_capacity(triples);
    for t in 0..triples {
        let eps = EPS_LEVELS[t % EPS_LEVELS.len()];
        let mut rng = stream_rng(seed, ROBUST_STREAM + t as u64);
        let g = if t % 4 == 3 {
            GenConfig { seed, p: 2, m: 2, max_degree: 2, stable_fraction: 1.0, ..GenConfig::default() }
        } else {
            GenConfig { seed, ..GenConfig::default() }
        };
        let run = (|| {
            let p0 = random_plant_from(&mut rng, &g, cfg)?;
            let c = random_stabilizing_controller(&p0, &mut rng, cfg)?;
            let p = perturb_plant(&p0, eps, seed.wrapping_add(t as u64), cfg)?;
            let rep = robustness_check_symbols(&graph_symbols(&p0, cfg)?, &graph_symbols(&p, cfg)?, &controller_symbols(&c, cfg)?, cfg)?;
            Ok::<_, crate::Error>(RobustnessCase {
                eps,
                slack: rep.slack,
                distance: rep.distance,
                margin_nominal: rep.margin_nominal,
                margin_perturbed: rep.lhs,
            })
        })();
        match run {
            Ok(case) => {
                suite.record(-case.slack);
                cases.push(case);
            }
            Err(e) => suite.fail(format!("triple {t}: {e}")),
        }
    }
    (suite.finish(), cases)
}

/// The full campaign behind the `report` command.
pub fn run_report(seed: u64, triples: usize, cfg: &NumericConfig) -> CampaignReport {
    let mut suites = metric_axioms(seed, 100, 30, triples, cfg);
    suites.push(robustness(seed, triples, cfg).0);
    let pass = suites.iter().all(|s| s.pass);
    CampaignReport { seed, suites, pass }
}
