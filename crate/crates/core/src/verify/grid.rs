//! Brute-force oracles on uniform grids.

use crate::error::{Error, Result};
use crate::first_stage::{critical_medians, exante_payoff};
use crate::game::{classify, voter_utility, Candidate, GameParams, Median, PlatformPair, SubgameStatus};
use crate::par::Backend;
use crate::subgame::{solve_subgame, SubgameEquilibrium};

/// Voter utilities closer than this count as a tie in deviation checks: a
/// grid point equal to an optimal adjustment in exact arithmetic must not win
/// through rounding.
pub const ORACLE_TIE_TOL: f64 = 1e-12;
/// Medians this close to a critical median are treated as knife edges by
/// [`grid_subgame_check`].
pub const CRITICAL_MARGIN: f64 = 1e-9;

/// `k / (n - 1)` for `k = 0..n`.
pub fn unit_grid(n: usize) -> impl Iterator<Item = f64> + Clone {
    let step = 1.0 / (n - 1) as f64;
    (0..n).map(move |k| if k + 1 == n { 1.0 } else { k as f64 * step })
}

fn check_grid(grid_size: usize) -> Result<()> {
    if grid_size < 2 {
        return Err(Error::invalid(format!("grid needs at least 2 points, got {grid_size}")));
    }
    Ok(())
}

/// Grid argmax of the responder's ex-ante payoff over its own platform.
/// Exact payoff ties go to the point closest to the opponent.
pub fn grid_best_response(
    opponent_platform: f64,
    responder: Candidate,
    params: &GameParams,
    grid_size: usize,
) -> Result<f64> {
    grid_best_response_with(opponent_platform, responder, params, grid_size, Backend::default())
}

pub fn grid_best_response_with(
    opponent_platform: f64,
    responder: Candidate,
    params: &GameParams,
    grid_size: usize,
    backend: Backend,
) -> Result<f64> {
    check_grid(grid_size)?;
    if !(0.0..=1.0).contains(&opponent_platform) {
        return Err(Error::invalid(format!("opponent platform must lie in [0, 1], got {opponent_platform}")));
    }
    let step = 1.0 / (grid_size - 1) as f64;
    let point = |k: usize| if k + 1 == grid_size { 1.0 } else { k as f64 * step };
    let payoffs = backend.map(grid_size, |k| {
        let own = point(k);
        let pair = match responder {
            Candidate::One => PlatformPair::new(own, opponent_platform),
            Candidate::Two => PlatformPair::new(opponent_platform, own),
        }
        .expect("grid points lie in [0, 1]");
        exante_payoff(&pair, params)[responder.index()]
    });

    let mut best = 0;
    for k in 1..grid_size {
        let better = payoffs[k] > payoffs[best]
            || (payoffs[k] == payoffs[best]
                && (point(k) - opponent_platform).abs() < (point(best) - opponent_platform).abs());
        if better {
            best = k;
        }
    }
    Ok(point(best))
}

/// Expected payoff of `c` playing the pure ex-post platform `y` against the
/// opponent's mixture in `profile`.
fn deviation_payoff(
    c: Candidate,
    y: f64,
    profile: &SubgameEquilibrium,
    pair: &PlatformPair,
    m: f64,
    params: &GameParams,
) -> f64 {
    let opp = profile.action(c.other());
    let q = opp.adjust_probability;
    let cost = if y != pair.x(c) { params.phi() } else { 0.0 };
    let vs_stay = tolerant_win(c, y, opp.stay_platform, pair, m, params);
    let vs_adjust = tolerant_win(c, y, opp.adjust_target, pair, m, params);
    (1.0 - q) * vs_stay + q * vs_adjust - cost
}

fn tolerant_win(c: Candidate, y_own: f64, y_opp: f64, pair: &PlatformPair, m: f64, params: &GameParams) -> f64 {
    let o = c.other();
    let diff = voter_utility(m, pair.x(c), y_own, params.a(c)) - voter_utility(m, pair.x(o), y_opp, params.a(o));
    if diff > ORACLE_TIE_TOL {
        1.0
    } else if diff < -ORACLE_TIE_TOL {
        0.0
    } else {
        0.5
    }
}

/// Largest gain any candidate obtains by a unilateral deviation to a pure
/// ex-post platform on the grid (or to its stay/adjust platforms) against
/// the opponent's mixture in `profile`.
pub fn max_deviation_gain(
    pair: &PlatformPair,
    m: Median,
    params: &GameParams,
    profile: &SubgameEquilibrium,
    grid_size: usize,
) -> Result<f64> {
    check_grid(grid_size)?;
    let m = m.value();
    let mut worst = f64::NEG_INFINITY;
    for c in Candidate::BOTH {
        let own = profile.action(c);
        let p = own.adjust_probability;
        let baseline = (1.0 - p) * deviation_payoff(c, own.stay_platform, profile, pair, m, params)
            + p * deviation_payoff(c, own.adjust_target, profile, pair, m, params);
        let best = unit_grid(grid_size)
            .chain([own.stay_platform, own.adjust_target])
            .map(|y| deviation_payoff(c, y, profile, pair, m, params))
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(best - baseline);
    }
    Ok(worst)
}

/// [`max_deviation_gain`] at the engine's own subgame equilibrium. Medians
/// within [`CRITICAL_MARGIN`] of a critical median are rejected as ties.
pub fn grid_subgame_check(pair: &PlatformPair, m: Median, params: &GameParams, grid_size: usize) -> Result<f64> {
    check_grid(grid_size)?;
    let near_critical = !pair.is_identical()
        && critical_medians(pair, params)?.iter().any(|&c| (c - m.value()).abs() <= CRITICAL_MARGIN);
    if near_critical || classify(pair, m, params) == SubgameStatus::KnifeEdge {
        return Err(Error::UnresolvedTie { m: m.value() });
    }
    let eq = solve_subgame(pair, m, params)?;
    max_deviation_gain(pair, m, params, &eq, grid_size)
}
