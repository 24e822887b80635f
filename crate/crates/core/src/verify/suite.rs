//! Fixed battery of oracle checks over shipped fixtures.

use serde::Serialize;

use crate::error::Result;
use crate::first_stage::{best_response, closed_form_g1, exante_payoff, solve_first_stage, FirstStageSolution};
use crate::game::{Candidate, GameParams, Median, PlatformPair};
use crate::par::Backend;
use crate::subgame::solve_subgame;
use crate::verify::grid::{grid_best_response_with, grid_subgame_check, max_deviation_gain};

/// Tolerance on subgame deviation gains.
pub const DEVIATION_TOL: f64 = 1e-9;
/// Tolerance on analytic agreement.
pub const EXACT_TOL: f64 = 1e-12;
/// Grid used by the subgame deviation checks.
pub const SUBGAME_GRID: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub grid_size: usize,
    /// Add a fixture whose second-stage mixture is deliberately off equilibrium.
    pub inject_perturbed: bool,
    pub backend: Backend,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { grid_size: 10_000, inject_perturbed: false, backend: Backend::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteCheck {
    pub kind: &'static str,
    pub configuration: String,
    /// Discrepancy or gain measured by the check.
    pub observed: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl SuiteCheck {
    fn new(kind: &'static str, configuration: String, observed: f64, tolerance: f64) -> Self {
        SuiteCheck { kind, configuration, observed, tolerance, passed: observed <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub grid_size: usize,
    pub checks: Vec<SuiteCheck>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SuiteCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn describe(params: &GameParams) -> String {
    format!("a1={} a2={} phi={}", params.a(Candidate::One), params.a(Candidate::Two), params.phi())
}

fn fixtures() -> Result<Vec<GameParams>> {
    Ok(vec![
        GameParams::symmetric(1.0 / 3.0, 0.3)?,
        GameParams::symmetric(1.0, 0.3)?,
        GameParams::symmetric(3.0, 0.3)?,
        GameParams::new(0.125, 1.0 / 3.0, 0.45)?,
        GameParams::new(1.0 / 3.0, 0.125, 0.45)?,
    ])
}

/// Run every check. Failing checks are reported, not returned as errors.
pub fn run_suite(options: &SuiteOptions) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let cell = 1.0 / (options.grid_size.max(2) - 1) as f64;

    for params in fixtures()? {
        let FirstStageSolution::Spne(spne) = solve_first_stage(&params)? else {
            continue;
        };
        let pair = spne.pair();
        for c in Candidate::BOTH {
            let opp = pair.x(c.other());
            let closed = best_response(opp, c, &params)?;
            let config = format!("{} responder={c} opponent={opp}", describe(&params));
            checks.push(SuiteCheck::new("fixed_point", config.clone(), (closed - pair.x(c)).abs(), EXACT_TOL));
            let grid = grid_best_response_with(opp, c, &params, options.grid_size, options.backend)?;
            checks.push(SuiteCheck::new("grid_best_response", config, (grid - closed).abs(), cell));
        }

        let integrated = exante_payoff(&pair, &params);
        let diff = (integrated[0] - spne.payoffs[0]).abs().max((integrated[1] - spne.payoffs[1]).abs());
        checks.push(SuiteCheck::new("equilibrium_payoff", describe(&params), diff, EXACT_TOL));

        if params.is_symmetric() {
            for (x1, x2) in [(pair.x(Candidate::One), pair.x(Candidate::Two)), (0.1, 0.9), (0.3, 0.4), (0.05, 0.2)] {
                let p = PlatformPair::new(x1, x2)?;
                let diff = (closed_form_g1(&p, &params)? - exante_payoff(&p, &params)[0]).abs();
                checks.push(SuiteCheck::new(
                    "closed_form_integration",
                    format!("{} x=({x1}, {x2})", describe(&params)),
                    diff,
                    EXACT_TOL,
                ));
            }
        }

        for m in [0.05, 0.2, 0.47, 0.52, 0.62, 0.72, 0.95] {
            let med = Median::new(m)?;
            let gain = grid_subgame_check(&pair, med, &params, SUBGAME_GRID)?;
            checks.push(SuiteCheck::new(
                "subgame_deviation",
                format!("{} x=({}, {}) m={m}", describe(&params), pair.x(Candidate::One), pair.x(Candidate::Two)),
                gain,
                DEVIATION_TOL,
            ));
        }
    }

    let params = GameParams::symmetric(0.5, 0.3)?;
    let identical = PlatformPair::new(0.5, 0.5)?;
    for m in [0.1, 0.8] {
        let gain = grid_subgame_check(&identical, Median::new(m)?, &params, SUBGAME_GRID)?;
        checks.push(SuiteCheck::new(
            "subgame_deviation",
            format!("{} x=(0.5, 0.5) m={m}", describe(&params)),
            gain,
            DEVIATION_TOL,
        ));
    }

    if options.inject_perturbed {
        let params = GameParams::symmetric(1.0 / 3.0, 0.3)?;
        let pair = PlatformPair::new(1.0 / 3.0, 2.0 / 3.0)?;
        let m = Median::new(0.47)?;
        let mut profile = solve_subgame(&pair, m, &params)?;
        profile.actions[0].adjust_probability = 1.0 - params.phi() + 0.1;
        let gain = max_deviation_gain(&pair, m, &params, &profile, SUBGAME_GRID)?;
        checks.push(SuiteCheck::new(
            "perturbed_mixture",
            format!("{} x=(1/3, 2/3) m=0.47 favorite adjusts w.p. 0.8", describe(&params)),
            gain,
            DEVIATION_TOL,
        ));
    }

    Ok(SuiteReport { grid_size: options.grid_size, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let r = run_suite(&SuiteOptions { grid_size: 2_000, ..Default::default() }).unwrap();
        let failures: Vec<_> = r.failures().collect();
        assert!(failures.is_empty(), "{failures:?}");
        assert!(r.checks.len() > 40);
    }

    #[test]
    fn perturbed_fixture_fails() {
        let r = run_suite(&SuiteOptions { grid_size: 500, inject_perturbed: true, ..Default::default() }).unwrap();
        let failures: Vec<_> = r.failures().collect();
        assert_eq!(failures.len(), 1);
        assert_eq!(failures[0].kind, "perturbed_mixture");
    }
}
