//! Comparative statics over the electoral cost.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::first_stage::{psi, solve_first_stage, FirstStageSolution, Spne};
use crate::game::{Candidate, GameParams};
use crate::verify::sim::{simulate, SimulationConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterRegion {
    /// `phi` above the threshold: divergent equilibrium.
    Divergent,
    /// `phi` below the threshold: only a centrist epsilon-equilibrium.
    Centrist,
    /// `phi` equal to the threshold.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulatedColumns {
    pub payoff_mean: f64,
    pub payoff_std_error: f64,
    pub open_frequency: f64,
    pub flip_frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub a: f64,
    pub phi: f64,
    pub psi: f64,
    pub region: ParameterRegion,
    pub admissible: bool,
    pub x1: Option<f64>,
    pub x2: Option<f64>,
    /// Distance between the equilibrium platforms.
    pub polarization: Option<f64>,
    pub open_probability: Option<f64>,
    pub payoff: Option<f64>,
    pub simulated: Option<SimulatedColumns>,
}

/// `Some(true)` when the column is strictly monotone in the stated direction
/// over admissible rows, `None` with fewer than two admissible rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Monotonicity {
    pub polarization_decreasing: Option<bool>,
    pub open_probability_decreasing: Option<bool>,
    pub payoff_increasing: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub monotonicity: Monotonicity,
}

fn strictly(values: &[f64], increasing: bool) -> Option<bool> {
    if values.len() < 2 {
        return None;
    }
    Some(values.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] }))
}

fn sweep_row(a: f64, phi: f64, sim: Option<&SimulationConfig>) -> Result<SweepRow> {
    let params = GameParams::symmetric(a, phi)?;
    let psi = psi(a)?;
    let region = if phi > psi {
        ParameterRegion::Divergent
    } else if phi < psi {
        ParameterRegion::Centrist
    } else {
        ParameterRegion::Boundary
    };
    let mut row = SweepRow {
        a,
        phi,
        psi,
        region,
        admissible: false,
        x1: None,
        x2: None,
        polarization: None,
        open_probability: None,
        payoff: None,
        simulated: None,
    };
    if region != ParameterRegion::Divergent {
        return Ok(row);
    }
    let FirstStageSolution::Spne(Spne { positions, payoffs, .. }) = solve_first_stage(&params)? else {
        return Ok(row);
    };
    let al = params.alpha(Candidate::One);
    let ratio = (al - 1.0) / (al + 1.0);
    row.admissible = true;
    row.x1 = Some(positions[0]);
    row.x2 = Some(positions[1]);
    row.polarization = Some(positions[1] - positions[0]);
    row.open_probability = Some(ratio * ratio);
    row.payoff = Some(payoffs[0]);
    if let Some(cfg) = sim {
        let pair = crate::game::PlatformPair::new(positions[0], positions[1])?;
        let s = simulate(&pair, &params, cfg)?;
        row.simulated = Some(SimulatedColumns {
            payoff_mean: s.payoff_mean[0],
            payoff_std_error: s.payoff_std_error[0],
            open_frequency: s.open_election_frequency,
            flip_frequency: s.flip_frequency[0],
        });
    }
    Ok(row)
}

/// Equilibrium columns for each `a` at a fixed `phi`, with optional
/// simulated columns. Rows keep the input order; monotonicity is judged
/// over admissible rows sorted by `a`.
pub fn comparative_sweep(a_values: &[f64], phi: f64, sim: Option<&SimulationConfig>) -> Result<SweepReport> {
    if a_values.is_empty() {
        return Err(Error::invalid("sweep needs at least one value of a"));
    }
    let rows = a_values.iter().map(|&a| sweep_row(a, phi, sim)).collect::<Result<Vec<_>>>()?;

    let mut admissible: Vec<&SweepRow> = rows.iter().filter(|r| r.admissible).collect();
    admissible.sort_by(|x, y| x.a.total_cmp(&y.a));
    admissible.dedup_by(|x, y| x.a == y.a);
    let col = |f: fn(&SweepRow) -> Option<f64>| admissible.iter().filter_map(|r| f(r)).collect::<Vec<_>>();
    let monotonicity = Monotonicity {
        polarization_decreasing: strictly(&col(|r| r.polarization), false),
        open_probability_decreasing: strictly(&col(|r| r.open_probability), false),
        payoff_increasing: strictly(&col(|r| r.payoff), true),
    };
    Ok(SweepReport { rows, monotonicity })
}

/// Equilibrium of an asymmetric game as candidate 1's cost varies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymmetricRow {
    pub a1: f64,
    pub a2: f64,
    pub phi: f64,
    pub admissible: bool,
    pub positions: Option<[f64; 2]>,
    pub payoffs: Option<[f64; 2]>,
}

pub fn asymmetric_sweep(a1_values: &[f64], a2: f64, phi: f64) -> Result<Vec<AsymmetricRow>> {
    a1_values
        .iter()
        .map(|&a1| {
            let params = GameParams::new(a1, a2, phi)?;
            let solved = match solve_first_stage(&params) {
                Ok(FirstStageSolution::Spne(s)) => Some(s),
                Ok(_) | Err(Error::BoundaryUnspecified(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(AsymmetricRow {
                a1,
                a2,
                phi,
                admissible: solved.is_some(),
                positions: solved.map(|s| s.positions),
                payoffs: solved.map(|s| s.payoffs),
            })
        })
        .collect()
}
