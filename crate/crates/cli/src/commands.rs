//! One function per subcommand, each returning the result document.

use serde_json::{json, Map, Value};

use flipflop::verify::{check_implications, comparative_sweep, run_suite, simulate, SimulationConfig, SuiteOptions};
use flipflop::{
    classify, closed_form_g1, epsilon_profile, equilibrium_threshold, exante_payoff, existence_threshold,
    outer_weak_favorite_threshold, psi, region_partition, response_supremum, secured_interval, solve_first_stage,
    solve_subgame_with, weak_favorite_threshold, Backend, Candidate, Error, FirstStageSolution, GameParams,
    KnifeEdgePolicy, Median, PlatformPair, Spne, SubgameStatus,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::render::{rational, Output};

fn equilibrium(params: &GameParams) -> Result<Spne, CliError> {
    match solve_first_stage(params)? {
        FirstStageSolution::Spne(s) => Ok(s),
        FirstStageSolution::EpsilonEquilibrium { .. } => Err(CliError::NoEquilibrium(format!(
            "phi = {} is below the threshold {}; only a centrist epsilon-equilibrium exists",
            params.phi(),
            equilibrium_threshold(params)
        ))),
        FirstStageSolution::NoEquilibrium { reason } => Err(CliError::NoEquilibrium(reason)),
    }
}

/// Platforms from `--x1/--x2`, `--epsilon`, or the equilibrium. The
/// equilibrium is used without `--at-equilibrium` only when `fallback` is set.
fn platforms(cfg: &RunConfig, params: &GameParams, fallback: bool) -> Result<(PlatformPair, &'static str), CliError> {
    if let (Some(x1), Some(x2)) = (cfg.x1, cfg.x2) {
        return Ok((PlatformPair::new(x1, x2)?, "given"));
    }
    if let Some(e) = cfg.epsilon {
        return Ok((epsilon_profile(e)?, "epsilon_profile"));
    }
    if cfg.at_equilibrium || fallback {
        return Ok((equilibrium(params)?.pair(), "equilibrium"));
    }
    Err(CliError::Invalid(format!("{} needs --x1 and --x2, --epsilon, or --at-equilibrium", cfg.command)))
}

fn xs(pair: &PlatformPair) -> [f64; 2] {
    [pair.x(Candidate::One), pair.x(Candidate::Two)]
}

/// `(kind, favorite, strong challenger)` of a status.
fn status_fields(status: SubgameStatus) -> (&'static str, Option<u8>, Option<u8>) {
    match status {
        SubgameStatus::Identical => ("identical", None, None),
        SubgameStatus::Secured { favorite } => ("secured", Some(favorite.id()), None),
        SubgameStatus::Open { favorite } => ("open", Some(favorite.id()), None),
        SubgameStatus::WeakFavorite { weak_favorite, strong_challenger } => {
            ("weak_favorite", Some(weak_favorite.id()), Some(strong_challenger.id()))
        }
        SubgameStatus::KnifeEdge => ("knife_edge", None, None),
    }
}

fn thresholds(cfg: &RunConfig, params: &GameParams) -> Result<Value, CliError> {
    Ok(json!({
        "psi_a1": psi(cfg.a1)?,
        "psi_a2": psi(cfg.a2)?,
        "existence_threshold": [
            existence_threshold(Candidate::One, params),
            existence_threshold(Candidate::Two, params),
        ],
        "equilibrium_threshold": equilibrium_threshold(params),
    }))
}

/// Tie thresholds, secured intervals and region boundaries of distinct platforms.
fn structure(pair: &PlatformPair, params: &GameParams) -> Result<Value, CliError> {
    let partition = region_partition(pair, params)?;
    let boundaries = partition.boundaries();
    let secured: Vec<Value> = Candidate::BOTH
        .iter()
        .map(|&c| secured_interval(c, pair, params).map(|s| json!({"candidate": c.id(), "lo": s.lo, "hi": s.hi})))
        .collect::<Result<_, _>>()?;
    Ok(json!({
        "weak_favorite_threshold": weak_favorite_threshold(pair, params)?,
        "outer_weak_favorite_threshold": outer_weak_favorite_threshold(pair, params)?,
        "secured_intervals": secured,
        "boundaries": boundaries,
        "boundaries_exact": boundaries.iter().map(|&b| rational(b)).collect::<Vec<_>>(),
        "open_probability": partition.open_probability(),
    }))
}

pub fn solve(cfg: &RunConfig) -> Result<Output, CliError> {
    let params = cfg.params()?;
    let mut result = Map::new();
    let mut failure = None;
    match solve_first_stage(&params) {
        Ok(FirstStageSolution::Spne(s)) => {
            let pair = s.pair();
            result.insert("solution".into(), json!("spne"));
            result.insert("positions".into(), json!(s.positions));
            result.insert("payoffs".into(), json!(s.payoffs));
            result.insert("left".into(), json!(s.left.id()));
            let checks: Vec<Value> = Candidate::BOTH
                .iter()
                .map(|&c| {
                    response_supremum(pair.x(c.other()), c, &params).map(|sup| {
                        json!({
                            "responder": c.id(),
                            "best_platform": sup.platform,
                            "best_payoff": sup.payoff,
                            "limit_next_to_opponent": sup.limit(),
                        })
                    })
                })
                .collect::<Result<_, _>>()?;
            result.insert("best_responses".into(), Value::Array(checks));
            result.insert("structure".into(), structure(&pair, &params)?);
        }
        Ok(FirstStageSolution::EpsilonEquilibrium { center, loss_coefficient }) => {
            result.insert("solution".into(), json!("epsilon_equilibrium"));
            result.insert("center".into(), json!(center));
            result.insert("loss_coefficient".into(), json!(loss_coefficient));
            if let Some(e) = cfg.epsilon {
                let pair = epsilon_profile(e)?;
                result.insert(
                    "profile".into(),
                    json!({
                        "epsilon": e,
                        "positions": xs(&pair),
                        "payoffs": exante_payoff(&pair, &params),
                        "loss_bound": loss_coefficient * e,
                    }),
                );
            }
        }
        Ok(FirstStageSolution::NoEquilibrium { reason }) => {
            result.insert("solution".into(), json!("no_equilibrium"));
            result.insert("reason".into(), json!(reason));
            failure = Some(CliError::NoEquilibrium(reason));
        }
        Err(Error::BoundaryUnspecified(reason)) => {
            result.insert("solution".into(), json!("boundary_unspecified"));
            result.insert("reason".into(), json!(reason));
            failure = Some(CliError::NoEquilibrium(reason));
        }
        Err(e) => return Err(e.into()),
    }
    result.insert("thresholds".into(), thresholds(cfg, &params)?);
    let mut out = Output::new(Value::Object(result));
    out.failure = failure;
    Ok(out)
}

pub fn regions(cfg: &RunConfig) -> Result<Output, CliError> {
    let params = cfg.params()?;
    let (pair, source) = platforms(cfg, &params, false)?;
    let row = |lo: f64, hi: f64, status: SubgameStatus, payoffs: [f64; 2]| {
        let (kind, favorite, challenger) = status_fields(status);
        json!({
            "lo": lo,
            "hi": hi,
            "lo_exact": rational(lo),
            "hi_exact": rational(hi),
            "status": kind,
            "favorite": favorite,
            "strong_challenger": challenger,
            "payoff1": payoffs[0],
            "payoff2": payoffs[1],
        })
    };
    if pair.is_identical() {
        let v = 0.5 - params.phi();
        let result = json!({
            "platforms": xs(&pair),
            "source": source,
            "rows": [row(0.0, 1.0, SubgameStatus::Identical, [v, v])],
            "error": "identical platforms have no region partition",
        });
        let mut out = Output::new(result).with_table("rows");
        out.failure = Some(CliError::Invalid("identical platforms have no region partition".into()));
        return Ok(out);
    }
    let partition = region_partition(&pair, &params)?;
    let rows: Vec<Value> = partition.regions.iter().map(|r| row(r.lo, r.hi, r.status, r.payoffs)).collect();
    let result = json!({
        "platforms": xs(&pair),
        "source": source,
        "rows": rows,
        "boundaries": partition.boundaries(),
        "expected_payoffs": partition.expected_payoffs(),
        "open_probability": partition.open_probability(),
    });
    Ok(Output::new(result).with_table("rows"))
}

pub fn payoff(cfg: &RunConfig) -> Result<Output, CliError> {
    let params = cfg.params()?;
    let (pair, source) = platforms(cfg, &params, false)?;
    let [x1, x2] = xs(&pair);
    let closed_form = if params.is_symmetric() && x1 < x2 { Some(closed_form_g1(&pair, &params)?) } else { None };
    let mut result = json!({
        "platforms": [x1, x2],
        "source": source,
        "payoffs": exante_payoff(&pair, &params),
        "closed_form_g1": closed_form,
    });
    if let Some(m) = cfg.m {
        let med = Median::new(m)?;
        let status = classify(&pair, med, &params);
        let eq = solve_subgame_with(&pair, med, &params, KnifeEdgePolicy::FairCoin)?;
        let (kind, favorite, challenger) = status_fields(status);
        let actions: Vec<Value> = Candidate::BOTH
            .iter()
            .map(|&c| {
                let a = eq.action(c);
                json!({
                    "candidate": c.id(),
                    "stay_platform": a.stay_platform,
                    "adjust_target": a.adjust_target,
                    "adjust_probability": a.adjust_probability,
                })
            })
            .collect();
        result["subgame"] = json!({
            "m": m,
            "status": kind,
            "favorite": favorite,
            "strong_challenger": challenger,
            "actions": actions,
            "payoffs": eq.payoffs,
        });
    }
    Ok(Output::new(result))
}

pub fn simulate_cmd(cfg: &RunConfig) -> Result<Output, CliError> {
    let params = cfg.params()?;
    let (pair, source) = platforms(cfg, &params, true)?;
    let draws = cfg.draws.expect("simulate always resolves a draw count");
    let sim = SimulationConfig::new(draws, cfg.seed)?.with_workers(cfg.workers);
    let stats = simulate(&pair, &params, &sim)?;
    let report = check_implications(&stats, &params)?;
    let failure = (report.applicable && !report.passed()).then(|| {
        let failed: Vec<&str> = report
            .clauses
            .iter()
            .filter(|c| c.verdict == flipflop::verify::ClauseVerdict::Fail)
            .map(|c| c.id)
            .collect();
        CliError::Verification(format!("behavioural clauses failed: {}", failed.join(", ")))
    });
    let result = json!({
        "platforms": xs(&pair),
        "source": source,
        "analytic_payoffs": exante_payoff(&pair, &params),
        "stats": stats,
        "implications": report,
    });
    let mut out = Output::new(result);
    if let Some(reason) = &report.reason {
        out.warnings.push(format!("behavioural checks not applicable: {reason}"));
    }
    if stats.knife_edge_draws > 0 {
        out.warnings.push(format!("{} knife-edge draws settled by a fair coin", stats.knife_edge_draws));
    }
    out.failure = failure;
    Ok(out)
}

pub fn sweep(cfg: &RunConfig) -> Result<Output, CliError> {
    let a_values = if cfg.a_list.is_empty() {
        if cfg.a1 != cfg.a2 {
            return Err(CliError::Invalid("sweep needs --a-list or equal costs".into()));
        }
        vec![cfg.a1]
    } else {
        cfg.a_list.clone()
    };
    let phis = if cfg.phi_list.is_empty() { vec![cfg.require_phi()?] } else { cfg.phi_list.clone() };
    let sim = cfg.draws.map(|d| SimulationConfig::new(d, cfg.seed).map(|s| s.with_workers(cfg.workers))).transpose()?;

    let mut rows = Vec::new();
    let mut monotonicity = Vec::new();
    for &phi in &phis {
        let report = comparative_sweep(&a_values, phi, sim.as_ref())?;
        for r in &report.rows {
            let code = match r.region {
                flipflop::verify::ParameterRegion::Divergent => "R0",
                flipflop::verify::ParameterRegion::Centrist => "R1",
                flipflop::verify::ParameterRegion::Boundary => "boundary",
            };
            rows.push(json!({
                "a": r.a,
                "phi": r.phi,
                "psi": r.psi,
                "region": r.region,
                "region_code": code,
                "admissible": r.admissible,
                "x1": r.x1,
                "x2": r.x2,
                "polarization": r.polarization,
                "open_probability": r.open_probability,
                "payoff": r.payoff,
                "sim_payoff_mean": r.simulated.map(|s| s.payoff_mean),
                "sim_payoff_std_error": r.simulated.map(|s| s.payoff_std_error),
                "sim_open_frequency": r.simulated.map(|s| s.open_frequency),
                "sim_flip_frequency": r.simulated.map(|s| s.flip_frequency),
            }));
        }
        let m = report.monotonicity;
        monotonicity.push(json!({
            "phi": phi,
            "polarization_decreasing": m.polarization_decreasing,
            "open_probability_decreasing": m.open_probability_decreasing,
            "payoff_increasing": m.payoff_increasing,
        }));
    }
    let inadmissible = rows.iter().filter(|r| r["admissible"] == false).count();
    let mut out = Output::new(json!({ "rows": rows, "monotonicity": monotonicity })).with_table("rows");
    if inadmissible > 0 {
        out.warnings.push(format!("{inadmissible} of {} rows have no divergent equilibrium", rows.len()));
    }
    Ok(out)
}

pub fn verify(cfg: &RunConfig) -> Result<Output, CliError> {
    let options = SuiteOptions {
        grid_size: cfg.grid,
        inject_perturbed: cfg.inject_perturbed,
        backend: Backend::from_workers(cfg.workers),
    };
    let report = run_suite(&options)?;
    let failures: Vec<String> = report.failures().map(|c| format!("{} [{}]", c.kind, c.configuration)).collect();
    let result = json!({
        "grid_size": report.grid_size,
        "passed": report.passed(),
        "check_count": report.checks.len(),
        "failure_count": failures.len(),
        "checks": report.checks,
    });
    let mut out = Output::new(result).with_table("checks");
    if !failures.is_empty() {
        out.failure = Some(CliError::Verification(failures.join("; ")));
    }
    Ok(out)
}
