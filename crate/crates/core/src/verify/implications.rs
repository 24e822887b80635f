//! On-path behaviour at the subgame-perfect equilibrium, checked against
//! simulated play.

use serde::Serialize;

use crate::error::Result;
use crate::first_stage::{solve_first_stage, FirstStageSolution, Spne};
use crate::game::{classify, optimal_adjustment, Candidate, GameParams, Median, PlatformPair, SubgameStatus};
use crate::verify::grid::unit_grid;
use crate::verify::sim::{proportion_std_error, SimulationStats};

/// Width of the acceptance band, in standard errors.
pub const SE_BAND: f64 = 3.0;
/// Platforms within this distance of the equilibrium count as equilibrium play.
pub const SPNE_MATCH_TOL: f64 = 1e-9;
/// Points of the deterministic magnitude check.
pub const MAGNITUDE_GRID: usize = 10_001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClauseVerdict {
    Pass,
    Fail,
    NotApplicable,
}

impl ClauseVerdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            ClauseVerdict::Pass
        } else {
            ClauseVerdict::Fail
        }
    }

    /// Combine sub-checks: any failure fails, all not-applicable stays so.
    fn all(verdicts: impl IntoIterator<Item = ClauseVerdict>) -> Self {
        let mut out = ClauseVerdict::NotApplicable;
        for v in verdicts {
            match v {
                ClauseVerdict::Fail => return ClauseVerdict::Fail,
                ClauseVerdict::Pass => out = ClauseVerdict::Pass,
                ClauseVerdict::NotApplicable => {}
            }
        }
        out
    }
}

/// One observed quantity against its expectation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: Option<f64>,
    pub expected: String,
    pub verdict: ClauseVerdict,
}

impl Check {
    fn new(name: &str, observed: Option<f64>, expected: impl Into<String>, verdict: ClauseVerdict) -> Self {
        Check { name: name.into(), observed, expected: expected.into(), verdict }
    }

    fn skipped(name: &str, why: &str) -> Self {
        Check::new(name, None, why, ClauseVerdict::NotApplicable)
    }

    /// `observed` within `SE_BAND` standard errors of `target`.
    fn near(name: &str, observed: Option<f64>, target: f64, n: u64) -> Self {
        let se = proportion_std_error(target, n);
        let verdict = match observed {
            Some(v) => ClauseVerdict::from_bool((v - target).abs() <= SE_BAND * se),
            None => ClauseVerdict::NotApplicable,
        };
        Check::new(name, observed, format!("{target} +/- {}", SE_BAND * se), verdict)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clause {
    pub id: &'static str,
    pub statement: &'static str,
    pub verdict: ClauseVerdict,
    pub checks: Vec<Check>,
}

impl Clause {
    fn new(id: &'static str, statement: &'static str, checks: Vec<Check>) -> Self {
        let verdict = ClauseVerdict::all(checks.iter().map(|c| c.verdict));
        Clause { id, statement, verdict, checks }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImplicationReport {
    pub applicable: bool,
    pub reason: Option<String>,
    pub clauses: Vec<Clause>,
}

impl ImplicationReport {
    /// No applicable clause failed.
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.verdict != ClauseVerdict::Fail)
    }

    pub fn clause(&self, id: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.id == id)
    }

    fn not_applicable(reason: String) -> Self {
        let clauses = STATEMENTS
            .iter()
            .map(|&(id, statement)| Clause { id, statement, verdict: ClauseVerdict::NotApplicable, checks: vec![] })
            .collect();
        ImplicationReport { applicable: false, reason: Some(reason), clauses }
    }
}

const STATEMENTS: [(&str, &str); 4] = [
    ("i", "flips move only towards the center and never cross the opponent"),
    ("ii", "the favorite flips more often than the challenger"),
    ("iii", "a favorite's adjustment is smaller than a challenger's"),
    ("iv", "a favorite's flip always wins; a challenger's flip wins less than half the time"),
];

fn equilibrium_of(params: &GameParams) -> Result<Option<Spne>> {
    match solve_first_stage(params) {
        Ok(FirstStageSolution::Spne(s)) => Ok(Some(s)),
        Ok(_) => Ok(None),
        Err(crate::Error::BoundaryUnspecified(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn same_pair(a: [f64; 2], b: &PlatformPair) -> bool {
    Candidate::BOTH.iter().all(|&c| (a[c.index()] - b.x(c)).abs() <= SPNE_MATCH_TOL)
}

/// Whether, for every open `m` on a fine grid, the favorite's optimal
/// adjustment is shorter than the challenger's.
fn magnitude_ordering_holds(pair: &PlatformPair, params: &GameParams) -> (bool, usize) {
    let mut seen = 0;
    for m in unit_grid(MAGNITUDE_GRID) {
        let Ok(med) = Median::new(m) else { continue };
        let SubgameStatus::Open { favorite: fav } = classify(pair, med, params) else { continue };
        seen += 1;
        let step = |c: Candidate| (optimal_adjustment(m, pair.x(c), params.a(c)) - pair.x(c)).abs();
        if step(fav) >= step(fav.other()) {
            return (false, seen);
        }
    }
    (true, seen)
}

/// Evaluate each clause on statistics simulated at the equilibrium of
/// `params`. Statistics from any other profile give a non-applicable report.
pub fn check_implications(stats: &SimulationStats, params: &GameParams) -> Result<ImplicationReport> {
    let Some(spne) = equilibrium_of(params)? else {
        return Ok(ImplicationReport::not_applicable("no subgame-perfect equilibrium at these parameters".into()));
    };
    let eq_pair = spne.pair();
    if !same_pair(stats.pair, &eq_pair) && !same_pair(stats.pair, &eq_pair.mirrored()) {
        return Ok(ImplicationReport::not_applicable(format!(
            "platforms {:?} are not the equilibrium {:?}",
            stats.pair, spne.positions
        )));
    }
    let pair = PlatformPair::new(stats.pair[0], stats.pair[1])?;
    let symmetric = params.is_symmetric();
    let phi = params.phi();
    let c = &stats.counts;
    let asym = "asymmetric costs: no general ordering";

    let dir = stats.flip_direction_counts;
    let clause_i = Clause::new(
        "i",
        STATEMENTS[0].1,
        vec![
            Check::new(
                "away_from_center",
                Some(dir.away_from_center as f64),
                "0",
                ClauseVerdict::from_bool(dir.away_from_center == 0),
            ),
            Check::new(
                "order_crossing",
                Some(dir.order_crossing as f64),
                "0",
                ClauseVerdict::from_bool(dir.order_crossing == 0),
            ),
        ],
    );

    let clause_ii = if symmetric {
        let fav = stats.flip_frequency_given_open.favorite;
        let ch = stats.flip_frequency_given_open.challenger;
        let n = c.effective as f64;
        let uncond_fav = c.role_flips.favorite as f64 / n;
        let uncond_ch = c.role_flips.challenger as f64 / n;
        let ordered = match (fav, ch) {
            (Some(f), Some(h)) => ClauseVerdict::from_bool(f > h),
            _ => ClauseVerdict::NotApplicable,
        };
        Clause::new(
            "ii",
            STATEMENTS[1].1,
            vec![
                Check::near("favorite_given_open", fav, 1.0 - phi, c.open),
                Check::near("challenger_given_open", ch, phi, c.open),
                Check::new("favorite_minus_challenger_given_open", fav.zip(ch).map(|(f, h)| f - h), "> 0", ordered),
                Check::new(
                    "favorite_minus_challenger_unconditional",
                    Some(uncond_fav - uncond_ch),
                    "> 0",
                    ClauseVerdict::from_bool(uncond_fav > uncond_ch),
                ),
            ],
        )
    } else {
        Clause::new("ii", STATEMENTS[1].1, vec![Check::skipped("favorite_given_open", asym)])
    };

    let clause_iii = if symmetric {
        let fav = stats.flip_magnitude_mean.favorite;
        let ch = stats.flip_magnitude_mean.challenger;
        let mean_verdict = match (fav, ch) {
            (Some(f), Some(h)) => ClauseVerdict::from_bool(f < h),
            _ => ClauseVerdict::NotApplicable,
        };
        let (holds, points) = magnitude_ordering_holds(&pair, params);
        Clause::new(
            "iii",
            STATEMENTS[2].1,
            vec![
                Check::new(
                    "mean_magnitude_favorite_minus_challenger",
                    fav.zip(ch).map(|(f, h)| f - h),
                    "< 0",
                    mean_verdict,
                ),
                Check::new(
                    "per_median_ordering_points",
                    Some(points as f64),
                    "favorite step < challenger step at every open grid point",
                    if points == 0 { ClauseVerdict::NotApplicable } else { ClauseVerdict::from_bool(holds) },
                ),
            ],
        )
    } else {
        Clause::new("iii", STATEMENTS[2].1, vec![Check::skipped("mean_magnitude", asym)])
    };

    let fav_success = stats.flip_success_rate.favorite;
    let mut iv_checks = vec![Check::new(
        "favorite_success",
        fav_success,
        "1 exactly",
        fav_success.map_or(ClauseVerdict::NotApplicable, |s| ClauseVerdict::from_bool(s == 1.0)),
    )];
    if symmetric {
        let ch_success = stats.flip_success_rate.challenger;
        iv_checks.push(Check::near("challenger_success", ch_success, phi, c.role_flips.challenger));
        iv_checks.push(Check::new(
            "challenger_success_below_half",
            ch_success,
            "< 0.5",
            ch_success.map_or(ClauseVerdict::NotApplicable, |s| ClauseVerdict::from_bool(s < 0.5)),
        ));
    } else {
        iv_checks.push(Check::skipped("challenger_success", "a strong challenger always wins"));
    }
    let clause_iv = Clause::new("iv", STATEMENTS[3].1, iv_checks);

    Ok(ImplicationReport { applicable: true, reason: None, clauses: vec![clause_i, clause_ii, clause_iii, clause_iv] })
}
