//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use flipflop::subgame::{normal_form, Action};
use flipflop::verify::{
    check_implications, comparative_sweep, grid_best_response, grid_subgame_check, simulate, unit_grid,
    SimulationConfig, SimulationStats,
};
use flipflop::{
    best_response, classify, closed_form_g1, exante_payoff, region_partition, secured_interval, solve_first_stage,
    solve_subgame, weak_favorite_threshold, Candidate, Error, FirstStageSolution, GameParams, Median, PlatformPair,
    Spne, SubgameStatus,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Agreement with exact closed forms.
const EXACT_TOL: f64 = 1e-12;
/// Largest tolerated gain from a unilateral second-stage deviation.
const DEVIATION_TOL: f64 = 1e-9;
/// Monte Carlo acceptance band, in standard errors.
const SE_BAND: f64 = 3.0;
const MC_DRAWS: u64 = 1_000_000;
const MC_SEED: u64 = 20_240_601;
const BR_GRID: usize = 10_000;
const BR_PARAMETERIZATIONS: usize = 50;
const SOLVE_BUDGET: Duration = Duration::from_millis(1);
const ORACLE_BUDGET: Duration = Duration::from_secs(30);
const MC_BUDGET: Duration = Duration::from_secs(60);
/// Loss coefficient required of the centrist epsilon-equilibrium at a = 1/3, phi = 0.1.
const TARGET_LOSS_COEFFICIENT: f64 = 0.183333;
const EPSILON_GRID: usize = 100_001;
/// Relative spread of gain / epsilon tolerated as linear scaling.
const LINEARITY_TOL: f64 = 0.05;

const C1: Candidate = Candidate::One;
const C2: Candidate = Candidate::Two;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn spne(params: &GameParams) -> Spne {
    match solve_first_stage(params) {
        Ok(FirstStageSolution::Spne(s)) => s,
        other => panic!("expected an equilibrium, got {other:?}"),
    }
}

fn within_se(observed: f64, target: f64, se: f64) -> bool {
    (observed - target).abs() <= SE_BAND * se
}

fn proportion_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn criterion_1() -> Outcome {
    let p = GameParams::symmetric(1.0 / 3.0, 0.3).unwrap();
    let runs = 200;
    let start = Instant::now();
    for _ in 0..runs {
        std::hint::black_box(solve_first_stage(std::hint::black_box(&p)).unwrap());
    }
    let per_call = start.elapsed() / runs;
    let s = spne(&p);
    // alpha = 2: platforms 1/(alpha+1), alpha/(alpha+1); payoff 1/2 - (phi/2)(1/3)^2
    let eq6 = 0.5 - 0.3 / 2.0 / 9.0;
    let hand = 29.0 / 60.0;
    let closed = closed_form_g1(&s.pair(), &p).unwrap();
    let integrated = exante_payoff(&s.pair(), &p);
    let pass = close(s.positions[0], 1.0 / 3.0, EXACT_TOL)
        && close(s.positions[1], 2.0 / 3.0, EXACT_TOL)
        && s.payoffs.iter().all(|&g| close(g, hand, EXACT_TOL) && close(g, eq6, EXACT_TOL))
        && close(closed, hand, EXACT_TOL)
        && integrated.iter().all(|&g| close(g, hand, EXACT_TOL))
        && per_call < SOLVE_BUDGET;
    Outcome {
        pass,
        detail: format!(
            "x* = ({:.15}, {:.15}), g = ({:.15}, {:.15}) vs 29/60, solve {:?}/call (budget {:?})",
            s.positions[0], s.positions[1], s.payoffs[0], s.payoffs[1], per_call, SOLVE_BUDGET
        ),
    }
}

fn criterion_2() -> Outcome {
    let p = GameParams::symmetric(1.0 / 3.0, 0.3).unwrap();
    let b = region_partition(&spne(&p).pair(), &p).unwrap().boundaries();
    let expected = [0.0, 4.0 / 9.0, 0.5, 5.0 / 9.0, 1.0];
    let pass = b.len() == expected.len() && b.iter().zip(&expected).all(|(x, y)| close(*x, *y, EXACT_TOL));
    Outcome { pass, detail: format!("boundaries {b:?} vs {{0, 4/9, 1/2, 5/9, 1}}") }
}

fn criterion_3() -> Outcome {
    let fixtures: Vec<(GameParams, PlatformPair, Vec<f64>)> = vec![
        (
            GameParams::symmetric(1.0 / 3.0, 0.3).unwrap(),
            PlatformPair::new(1.0 / 3.0, 2.0 / 3.0).unwrap(),
            vec![0.45, 0.47, 0.49, 0.51, 0.53, 0.55],
        ),
        (GameParams::symmetric(1.0, 0.2).unwrap(), PlatformPair::new(0.3, 0.6).unwrap(), vec![0.43, 0.47]),
        (
            GameParams::new(0.125, 1.0 / 3.0, 0.45).unwrap(),
            PlatformPair::new(0.4, 0.8).unwrap(),
            vec![0.55, 0.59, 0.66, 0.69],
        ),
    ];
    let mut worst = 0.0f64;
    let mut open = 0;
    for (p, pair, ms) in &fixtures {
        for &m in ms {
            let med = Median::new(m).unwrap();
            let status = classify(pair, med, p);
            if !matches!(status, SubgameStatus::Open { .. }) {
                return Outcome { pass: false, detail: format!("fixture m = {m} is {status}, not open") };
            }
            open += 1;
            let eq = solve_subgame(pair, med, p).unwrap();
            let nf = normal_form(pair, med, p);
            for c in Candidate::BOTH {
                let q = eq.action(c.other()).adjust_probability;
                let gap = (nf.action_payoff(c, Action::Stay, q) - nf.action_payoff(c, Action::Adjust, q)).abs();
                worst = worst.max(gap);
            }
        }
    }
    Outcome {
        pass: worst <= EXACT_TOL,
        detail: format!("{open} open fixtures, max |stay - adjust| = {worst:e} (tol {EXACT_TOL:e})"),
    }
}

/// Seeded parameterizations admitting a divergent equilibrium, half of them with equal costs.
fn admissible_parameterizations(n: usize) -> Vec<GameParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a1: f64 = rng.random_range(0.05..5.0);
        let a2 = if out.len() % 2 == 0 { a1 } else { rng.random_range(0.05..5.0) };
        let phi: f64 = rng.random_range(0.01..0.5);
        let Ok(p) = GameParams::new(a1, a2, phi) else { continue };
        if matches!(solve_first_stage(&p), Ok(FirstStageSolution::Spne(_))) {
            out.push(p);
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let cell = 1.0 / (BR_GRID - 1) as f64;
    let mut worst_br = 0.0f64;
    for p in admissible_parameterizations(BR_PARAMETERIZATIONS) {
        let s = spne(&p);
        for c in Candidate::BOTH {
            let opp = s.positions[c.other().index()];
            let closed = best_response(opp, c, &p).unwrap();
            let grid = grid_best_response(opp, c, &p, BR_GRID).unwrap();
            worst_br = worst_br.max((grid - closed).abs());
        }
    }
    let mut worst_gain = f64::NEG_INFINITY;
    let fixtures = [
        (GameParams::symmetric(1.0 / 3.0, 0.3).unwrap(), PlatformPair::new(1.0 / 3.0, 2.0 / 3.0).unwrap()),
        (GameParams::new(0.125, 1.0 / 3.0, 0.45).unwrap(), PlatformPair::new(0.4, 0.8).unwrap()),
        (GameParams::symmetric(0.5, 0.3).unwrap(), PlatformPair::new(0.5, 0.5).unwrap()),
    ];
    let mut checked = 0;
    for (p, pair) in &fixtures {
        for m in unit_grid(101) {
            match grid_subgame_check(pair, Median::new(m).unwrap(), p, 1001) {
                Ok(gain) => {
                    worst_gain = worst_gain.max(gain);
                    checked += 1;
                }
                Err(Error::UnresolvedTie { .. }) => {}
                Err(e) => panic!("subgame check at m = {m}: {e}"),
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst_br <= cell && worst_gain <= DEVIATION_TOL && elapsed < ORACLE_BUDGET,
        detail: format!(
            "{BR_PARAMETERIZATIONS} parameterizations: max |grid BR - BR| = {worst_br:e} (cell {cell:e}); \
             max deviation gain over {checked} subgames {worst_gain:e}; {elapsed:.2?} (budget {ORACLE_BUDGET:?})"
        ),
    }
}

fn mc(pair: &PlatformPair, p: &GameParams) -> SimulationStats {
    simulate(pair, p, &SimulationConfig::new(MC_DRAWS, MC_SEED).unwrap()).unwrap()
}

fn criterion_5() -> Outcome {
    let p = GameParams::symmetric(1.0 / 3.0, 0.3).unwrap();
    let pair = spne(&p).pair();
    let start = Instant::now();
    let s = mc(&pair, &p);
    let elapsed = start.elapsed();
    let c = &s.counts;
    let open_target = 1.0 / 9.0;
    let fav = s.flip_frequency_given_open.favorite.unwrap_or(f64::NAN);
    let ch = s.flip_frequency_given_open.challenger.unwrap_or(f64::NAN);
    let checks = [
        within_se(s.payoff_mean[0], 29.0 / 60.0, s.payoff_std_error[0]),
        within_se(s.payoff_mean[1], 29.0 / 60.0, s.payoff_std_error[1]),
        within_se(s.open_election_frequency, open_target, proportion_se(open_target, c.effective)),
        within_se(fav, 0.7, proportion_se(0.7, c.open)),
        within_se(ch, 0.3, proportion_se(0.3, c.open)),
        s.flip_success_rate.favorite == Some(1.0),
        s.flip_direction_counts.away_from_center == 0,
        s.flip_direction_counts.order_crossing == 0,
        check_implications(&s, &p).unwrap().passed(),
        elapsed < MC_BUDGET,
    ];
    Outcome {
        pass: checks.iter().all(|&b| b),
        detail: format!(
            "g = ({:.6}, {:.6}) +/- ({:.1e}, {:.1e}); open {:.6} (1/9); flips|open fav {fav:.5} ch {ch:.5}; \
             fav success {:?}; away {} crossing {}; {elapsed:.2?} (budget {MC_BUDGET:?})",
            s.payoff_mean[0],
            s.payoff_mean[1],
            s.payoff_std_error[0],
            s.payoff_std_error[1],
            s.open_election_frequency,
            s.flip_success_rate.favorite,
            s.flip_direction_counts.away_from_center,
            s.flip_direction_counts.order_crossing,
        ),
    }
}

fn criterion_6() -> Outcome {
    let a_values = [1.0 / 3.0, 1.0, 3.0];
    let phi = 0.3;
    let r = comparative_sweep(&a_values, phi, None).unwrap();
    let exact = r.rows.iter().all(|row| {
        let al = ((1.0 + row.a) / row.a).sqrt();
        let k = (al - 1.0) / (al + 1.0);
        row.admissible
            && close(row.polarization.unwrap(), k, EXACT_TOL)
            && close(row.open_probability.unwrap(), k * k, EXACT_TOL)
            && close(row.payoff.unwrap(), 0.5 - phi / 2.0 * k * k, EXACT_TOL)
    });
    let m = r.monotonicity;
    let monotone = m.polarization_decreasing == Some(true)
        && m.open_probability_decreasing == Some(true)
        && m.payoff_increasing == Some(true);
    let col = |f: fn(&flipflop::verify::SweepRow) -> Option<f64>| -> Vec<f64> { r.rows.iter().filter_map(f).collect() };
    Outcome {
        pass: exact && monotone,
        detail: format!(
            "polarization {:?}, open {:?}, payoff {:?}",
            col(|r| r.polarization),
            col(|r| r.open_probability),
            col(|r| r.payoff)
        ),
    }
}

/// Closed-form payoffs of the asymmetric equilibrium, `a1` the lower cost.
fn closed_form_asymmetric_payoffs(al1: f64, al2: f64, phi: f64) -> [f64; 2] {
    let d = al1 * al2 - 1.0;
    let upper_secured = 2.0 * al2 * (al1 - 1.0) / (d * (al2 + 1.0));
    let tilde = (al1 - 1.0) * (al1 * al2 + al2) / (d * (al1 + al2));
    let lower_secured = (al1 * al2 + 1.0) * (al1 - 1.0) / (d * (al1 + 1.0));
    let tilde_alt = al2 * (al1 * al1 - 1.0) / (d * (al1 + al2));
    [
        upper_secured + (1.0 - phi) * (tilde - upper_secured),
        (1.0 - lower_secured) + (1.0 - phi) * (lower_secured - tilde_alt),
    ]
}

fn criterion_7() -> Outcome {
    let p = GameParams::new(0.125, 1.0 / 3.0, 0.45).unwrap();
    let s = spne(&p);
    let pair = s.pair();
    let tilde = weak_favorite_threshold(&pair, &p).unwrap();
    let upper = secured_interval(C1, &pair, &p).unwrap().hi;
    let lower = secured_interval(C2, &pair, &p).unwrap().lo;
    let analytic = close(s.positions[0], 0.4, EXACT_TOL)
        && close(s.positions[1], 0.8, EXACT_TOL)
        && close(tilde, 16.0 / 25.0, EXACT_TOL)
        && close(upper, 8.0 / 15.0, EXACT_TOL)
        && close(lower, 7.0 / 10.0, EXACT_TOL);
    let sim = mc(&pair, &p);
    let mc_ok = (0..2).all(|i| within_se(sim.payoff_mean[i], s.payoffs[i], sim.payoff_std_error[i]));
    let closed = closed_form_asymmetric_payoffs(p.alpha(C1), p.alpha(C2), p.phi());
    let closed_ok = (0..2).all(|i| close(closed[i], s.payoffs[i], EXACT_TOL));
    Outcome {
        pass: analytic && mc_ok && closed_ok,
        detail: format!(
            "x* = ({:.15}, {:.15}); m~ {tilde:.15}, upper secured end {upper:.15}, lower secured start {lower:.15}; \
             g = ({:.6}, {:.6}) vs simulated ({:.6}, {:.6}) +/- ({:.1e}, {:.1e}) vs closed form ({:.6}, {:.6})",
            s.positions[0],
            s.positions[1],
            s.payoffs[0],
            s.payoffs[1],
            sim.payoff_mean[0],
            sim.payoff_mean[1],
            sim.payoff_std_error[0],
            sim.payoff_std_error[1],
            closed[0],
            closed[1],
        ),
    }
}

fn criterion_8() -> Outcome {
    let p = GameParams::symmetric(1.0 / 3.0, 0.1).unwrap();
    let slack = 1.0 / (EPSILON_GRID - 1) as f64;
    let mut ratios = Vec::new();
    let mut bounded = true;
    let mut parts = Vec::new();
    for eps in [1e-2, 1e-3, 1e-4] {
        let x2 = 0.5 + eps;
        let base = exante_payoff(&PlatformPair::new(0.5 - eps, x2).unwrap(), &p)[0];
        let best = unit_grid(EPSILON_GRID)
            .map(|x1| exante_payoff(&PlatformPair::new(x1, x2).unwrap(), &p)[0])
            .fold(f64::NEG_INFINITY, f64::max);
        let gain = best - base;
        let bound = TARGET_LOSS_COEFFICIENT * eps + slack;
        bounded &= gain <= bound;
        ratios.push(gain / eps);
        parts.push(format!("eps {eps:e}: gain {gain:.3e} vs bound {bound:.3e}"));
    }
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let linear = (hi - lo) / hi <= LINEARITY_TOL;
    Outcome {
        pass: bounded && linear,
        detail: format!(
            "{}; gain/eps in [{lo:.4}, {hi:.4}] (linear: {linear}); bounded by {TARGET_LOSS_COEFFICIENT} eps: {bounded}",
            parts.join("; ")
        ),
    }
}

fn criterion_9() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (a, phi) in [(1.0 / 3.0, 0.1), (1.0 / 3.0, 0.3), (1.0, 0.45)] {
        let p = GameParams::symmetric(a, phi).unwrap();
        for x2 in [0.5, 0.6, 2.0 / 3.0, 0.9] {
            let limit = x2 * (1.0 - phi);
            let errs: Vec<f64> = [1e-2, 1e-4, 1e-6, 1e-8]
                .iter()
                .map(|&d| (exante_payoff(&PlatformPair::new(x2 - d, x2).unwrap(), &p)[0] - limit).abs())
                .collect();
            let converging = errs.windows(2).all(|w| w[1] <= w[0]) && errs[3] <= 1e-6;
            let at_tie = exante_payoff(&PlatformPair::new(x2, x2).unwrap(), &p)[0];
            let jump = at_tie == 0.5 - phi && limit > at_tie;
            pass &= converging && jump;
            if x2 == 0.5 {
                parts.push(format!(
                    "a {a:.3} phi {phi}: |g1 - x2(1-phi)| {:.1e} -> {:.1e}, g1(x2,x2) {at_tie}",
                    errs[0], errs[3]
                ));
            }
        }
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("symmetric equilibrium", criterion_1),
        ("region boundaries", criterion_2),
        ("second-stage indifference", criterion_3),
        ("grid oracle equivalence", criterion_4),
        ("Monte Carlo consistency", criterion_5),
        ("comparative statics", criterion_6),
        ("asymmetric equilibrium", criterion_7),
        ("epsilon-equilibrium bound", criterion_8),
        ("discontinuity at identical platforms", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{tag}] {name}: {}", i + 1, out.detail);
        failed += usize::from(!out.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
