//! Invariant suite behind the `check` subcommand.

use flc_sldo_core::controllers::Variant;
use flc_sldo_core::scenario::ScenarioConfig;
use flc_sldo_core::t2nfs::{forward, T2nfsParams, SIGMA_FLOOR};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform};

use crate::error::Result;
use crate::experiments::run_controllers;
use crate::trace::{read_csv, run_scenario, trace_hash, write_csv, RunTrace};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {:<26} {}", self.name, self.detail)
    }
}

fn normalization(params: &[&T2nfsParams]) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let dist = Uniform::new(-6.0, 6.0).expect("valid range");
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for p in params {
        for _ in 0..5000 {
            let (a, b) = (dist.sample(&mut rng), dist.sample(&mut rng));
            match forward(p, a, b) {
                Ok(fs) => {
                    let sl: f64 = fs.w_norm_lower.iter().sum();
                    let su: f64 = fs.w_norm_upper.iter().sum();
                    worst = worst.max((sl - 1.0).abs()).max((su - 1.0).abs());
                }
                Err(_) => failures += 1,
            }
        }
    }
    CheckResult {
        name: "firing normalization",
        passed: worst <= 1e-12 && failures == 0,
        detail: format!("max |Σw − 1| = {worst:.1e}, degenerate = {failures}"),
    }
}

fn spread_positivity(runs: &[(Variant, RunTrace)]) -> CheckResult {
    let min = runs.iter().map(|(_, t)| t.diagnostics.min_sigma).fold(f64::INFINITY, f64::min);
    CheckResult {
        name: "spread positivity",
        passed: min >= SIGMA_FLOOR,
        detail: format!("min σ over all runs = {min:.3e} (floor {SIGMA_FLOOR:e})"),
    }
}

fn composition(runs: &[(Variant, RunTrace)]) -> CheckResult {
    let mut bad = 0usize;
    let mut total = 0usize;
    for (_, t) in runs {
        for (r, xi) in t.records.iter().zip(&t.inputs) {
            total += 1;
            if r.tau != r.tau_c - r.tau_n || r.s != r.tau_c + xi[1] / t.l1 {
                bad += 1;
            }
        }
    }
    CheckResult {
        name: "tau/s composition",
        passed: bad == 0,
        detail: format!("{bad} of {total} samples violate τ = τ_c − τ_n or s = τ_c + ξ₂/l₁"),
    }
}

fn record_grid(runs: &[(Variant, RunTrace)]) -> CheckResult {
    let ok = runs.iter().all(|(_, t)| {
        let n = t.config.steps();
        t.records.len() == n + 1
            && t.records.iter().enumerate().all(|(k, r)| r.t == k as f64 * t.config.dt)
    });
    CheckResult {
        name: "record count and spacing",
        passed: ok,
        detail: "horizon/dt + 1 records on a uniform grid".into(),
    }
}

fn determinism(config: &ScenarioConfig, first: &RunTrace) -> Result<CheckResult> {
    let again = run_scenario(config)?;
    let (a, b) = (trace_hash(&first.records), trace_hash(&again.records));
    let mut buf = Vec::new();
    write_csv(&first.records, 1, &mut buf).expect("in-memory write");
    let reread = read_csv(buf.as_slice()).map(|r| r == first.records).unwrap_or(false);
    Ok(CheckResult {
        name: "trace determinism",
        passed: a == b && reread,
        detail: format!("sha256 {}… twice, csv round trip {}", &a[..16], if reread { "exact" } else { "differs" }),
    })
}

/// Runs every controller on `base` and checks the suite. Returns one result
/// per invariant.
pub fn run_checks(base: &ScenarioConfig) -> Result<Vec<CheckResult>> {
    let runs = run_controllers(base, &Variant::ALL)?;
    let initial = T2nfsParams::from_init(&base.t2nfs).map_err(|e| crate::error::SimError::Config(e.to_string()))?;
    let mut params = vec![&initial];
    params.extend(runs.iter().map(|(_, t)| &t.final_params));
    let sldo = &runs.iter().find(|(v, _)| *v == base.controller).unwrap_or(&runs[0]).1;
    Ok(vec![
        normalization(&params),
        spread_positivity(&runs),
        composition(&runs),
        record_grid(&runs),
        determinism(&sldo.config, sldo)?,
    ])
}
