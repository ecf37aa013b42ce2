//! The full invariant suite and its JSON report.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chron::{draw_rng, shuffle_homomorphism_error, ControlSpec, TimeGrid};
use crate::error::Result;
use crate::hall::{z_series, ZSeries};
use crate::ncseries::NcSeries;
use crate::words::{Letter, Word};

use super::sl2::{flow_errors, FlowConvention};
use super::{
    exp_identity_error, riccati_from_path, riccati_rk4_on, verify_riccati_derivative, wei_norman_path_from,
    xi_b_two_route_error, xi_c_two_route_error,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub degree: usize,
    pub steps: usize,
    pub y0: Vec<f64>,
    /// Seed for the word pairs of the homomorphism check.
    pub seed: u64,
    pub homomorphism_pairs: usize,
    pub homomorphism_tolerance: f64,
    pub riccati_tolerance: f64,
    pub route_tolerance: f64,
    pub flow_tolerance: f64,
    pub derivative_tolerance: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            degree: 8,
            steps: 10_000,
            y0: vec![0.0, 0.5, -0.5],
            seed: 0,
            homomorphism_pairs: 100,
            homomorphism_tolerance: 1e-9,
            riccati_tolerance: 1e-5,
            route_tolerance: 1e-6,
            flow_tolerance: 1e-6,
            derivative_tolerance: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn new(name: &str, max_error: f64, tolerance: f64) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            max_error,
            tolerance,
            passed: max_error <= tolerance,
            detail: None,
        }
    }

    fn failed(name: &str, tolerance: f64, detail: String) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            max_error: f64::INFINITY,
            tolerance,
            passed: false,
            detail: Some(detail),
        }
    }

    fn with_detail(mut self, detail: String) -> CheckResult {
        self.detail = Some(detail);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub degree: usize,
    pub steps: usize,
    /// Largest grid spacing over all draws.
    pub max_step: f64,
    pub draws: usize,
    /// The flow convention that matched, when it was unique and stable.
    pub convention: Option<FlowConvention>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        // non-finite errors are written as null
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<VerifyReport> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn exact_residual(s: &NcSeries) -> f64 {
    s.max_abs_coefficient().to_f64()
}

/// `S - (b - a·exp⧢(2S)·c)`, `Z_b - (b - a·Z_c)`, `Z_b - (b - Z_a·c)` and
/// the `σφ` symmetries, as the largest coefficient left over.
pub fn exact_checks(z: &ZSeries) -> Vec<CheckResult> {
    let d = z.degree;
    let a = NcSeries::letter(Letter::A, d);
    let b = NcSeries::letter(Letter::B, d);
    let c = NcSeries::letter(Letter::C, d);
    let fixed_point = z.s.sub(&b.sub(&a.concat_mul(&z.exp2s).concat_mul(&c)));
    let left = z.s.sub(&b.sub(&a.concat_mul(&z.zc)));
    let right = z.s.sub(&b.sub(&z.za.concat_mul(&c)));
    let sym = |x: &NcSeries| x.antipode().flip();
    let symmetry = [
        exact_residual(&sym(&z.za).sub(&z.zc)),
        exact_residual(&sym(&z.s).sub(&z.s)),
        exact_residual(&sym(&z.zc).sub(&z.za)),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    vec![
        CheckResult::new("fixed_point_residual", exact_residual(&fixed_point), 0.0),
        CheckResult::new("sigma_phi_symmetry", symmetry, 0.0),
        CheckResult::new(
            "triple_identity",
            exact_residual(&left).max(exact_residual(&right)),
            0.0,
        ),
    ]
}

/// Random nonempty words of length at most `max_len`.
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, max_len: usize) -> Word {
    let n = rng.gen_range(1..=max_len);
    Word::from_letters((0..n).map(|_| Letter::ALL[rng.gen_range(0..3)]))
}

struct DrawOutcome {
    max_step: f64,
    flow: super::FlowReport,
    xi_b: f64,
    xi_c: f64,
    exp: f64,
    derivative: std::result::Result<f64, String>,
    riccati: Vec<std::result::Result<f64, String>>,
    /// Earliest grid time where the Riccati error exceeds its tolerance.
    riccati_exceeded_at: Option<f64>,
}

fn run_draw(controls: &ControlSpec, z: &ZSeries, config: &VerifyConfig) -> Result<DrawOutcome> {
    let grid = TimeGrid::new(controls, config.steps)?;
    let max_step = grid.times().windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let path = wei_norman_path_from(z, controls, &grid);
    let mut riccati_exceeded_at: Option<f64> = None;
    let riccati = config
        .y0
        .iter()
        .map(|&y0| {
            let series = riccati_from_path(&path, controls, y0).map_err(|e| format!("y0 = {y0}: {e}"))?;
            let oracle = riccati_rk4_on(controls, y0, &grid).map_err(|e| format!("y0 = {y0} oracle: {e}"))?;
            let first = (0..series.y.len()).find(|&i| (series.y[i] - oracle.y[i]).abs() > config.riccati_tolerance);
            if let Some(i) = first {
                let t = series.times[i];
                riccati_exceeded_at = Some(riccati_exceeded_at.map_or(t, |prev| prev.min(t)));
            }
            Ok(series.max_abs_difference(&oracle))
        })
        .collect();
    Ok(DrawOutcome {
        max_step,
        flow: flow_errors(&path, controls, config.flow_tolerance),
        xi_b: xi_b_two_route_error(&path, controls),
        xi_c: xi_c_two_route_error(&path, controls),
        exp: exp_identity_error(&path),
        derivative: verify_riccati_derivative(&path, controls)
            .map(|r| r.max())
            .map_err(|e| e.to_string()),
        riccati,
        riccati_exceeded_at,
    })
}

fn worst<'a>(
    name: &str,
    tolerance: f64,
    values: impl Iterator<Item = &'a std::result::Result<f64, String>>,
) -> CheckResult {
    let mut max = 0.0f64;
    for v in values {
        match v {
            Ok(x) => max = max.max(*x),
            Err(msg) => return CheckResult::failed(name, tolerance, msg.clone()),
        }
    }
    CheckResult::new(name, max, tolerance)
}

/// Runs every check on every control draw. Draws are processed in
/// parallel; the report does not depend on scheduling.
pub fn verify_suite(controls: &[ControlSpec], config: &VerifyConfig) -> Result<VerifyReport> {
    crate::hall::check_degree(config.degree, true)?;
    let z = z_series(config.degree);
    let mut checks = exact_checks(&z);

    if !controls.is_empty() && config.homomorphism_pairs > 0 {
        let errors: Vec<Result<f64>> = (0..config.homomorphism_pairs)
            .into_par_iter()
            .map(|i| {
                let mut rng = draw_rng(config.seed, i as u64);
                let (x, y) = (random_word(&mut rng, 4), random_word(&mut rng, 4));
                let spec = &controls[i % controls.len()];
                Ok(shuffle_homomorphism_error(spec, x, y, config.steps)?.relative())
            })
            .collect();
        let mut max = 0.0f64;
        for e in errors {
            max = max.max(e?);
        }
        checks.push(CheckResult::new(
            "shuffle_homomorphism",
            max,
            config.homomorphism_tolerance,
        ));
    }

    let outcomes: Vec<DrawOutcome> = controls
        .par_iter()
        .map(|c| run_draw(c, &z, config))
        .collect::<Result<_>>()?;
    let max_of = |f: &dyn Fn(&DrawOutcome) -> f64| outcomes.iter().map(f).fold(0.0, f64::max);
    let max_step = max_of(&|o| o.max_step);

    let mut convention = None;
    if !outcomes.is_empty() {
        checks.push(CheckResult::new(
            "xi_b_two_route",
            max_of(&|o| o.xi_b),
            config.route_tolerance,
        ));
        checks.push(CheckResult::new(
            "xi_c_two_route",
            max_of(&|o| o.xi_c),
            config.route_tolerance,
        ));
        checks.push(CheckResult::new(
            "exp_identity",
            max_of(&|o| o.exp),
            config.route_tolerance,
        ));

        // the convention must match on every draw and be the only match
        let mut flow = CheckResult::new("flow_factorization", 0.0, config.flow_tolerance);
        let mut chosen: Option<FlowConvention> = None;
        let mut stable = true;
        for o in &outcomes {
            let best = o.flow.best();
            flow.max_error = flow.max_error.max(best.max_error);
            match o.flow.matching.as_slice() {
                [] => stable = false,
                [c] => {
                    if chosen.is_some_and(|prev| prev != *c) {
                        stable = false;
                    }
                    chosen = Some(*c);
                }
                _ => {}
            }
        }
        let ambiguous_everywhere = chosen.is_none();
        flow.passed = stable && flow.max_error <= config.flow_tolerance;
        if ambiguous_everywhere && flow.passed {
            flow = flow.with_detail("every draw is matched by several conventions".into());
        } else if let Some(c) = chosen.filter(|_| stable) {
            convention = Some(c);
            flow = flow.with_detail(format!("convention {}", c.name()));
        } else {
            flow.passed = false;
            flow = flow.with_detail("no convention matches every draw uniquely".into());
        }
        checks.push(flow);

        let mut riccati = worst(
            "riccati_oracle",
            config.riccati_tolerance,
            outcomes.iter().flat_map(|o| o.riccati.iter()),
        );
        let exceeded = outcomes.iter().filter_map(|o| o.riccati_exceeded_at).reduce(f64::min);
        if let (Some(t), None) = (exceeded, &riccati.detail) {
            riccati = riccati.with_detail(format!("tolerance first exceeded at t = {t}"));
        }
        checks.push(riccati);
        checks.push(worst(
            "riccati_derivative",
            config.derivative_tolerance,
            outcomes.iter().map(|o| &o.derivative),
        ));
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        degree: config.degree,
        steps: config.steps,
        max_step,
        draws: controls.len(),
        convention,
        checks,
        passed,
    })
}
