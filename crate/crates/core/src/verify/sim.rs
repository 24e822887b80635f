//! Seeded Monte Carlo play of the second stage.
//!
//! Draws are split into fixed blocks of [`BLOCK_DRAWS`]; block `b` reads
//! ChaCha8 stream `b` of the configured seed, and block tallies are merged
//! in block order. The statistics therefore depend on `(seed, draws)` only,
//! never on the number of workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{classify, Candidate, GameParams, Median, PlatformPair, SubgameStatus};
use crate::par::Backend;
use crate::subgame::{solve_subgame, win_probability, KnifeEdgePolicy};

pub const BLOCK_DRAWS: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimulationConfig {
    pub draws: u64,
    pub seed: u64,
    /// `1` runs sequentially, `0` uses every core.
    pub worker_count: usize,
    pub knife_edge_policy: KnifeEdgePolicy,
}

impl SimulationConfig {
    pub fn new(draws: u64, seed: u64) -> Result<Self> {
        if draws == 0 {
            return Err(Error::invalid("simulation needs at least one draw"));
        }
        Ok(SimulationConfig { draws, seed, worker_count: 0, knife_edge_policy: KnifeEdgePolicy::FairCoin })
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.worker_count = workers;
        self
    }

    pub fn with_knife_edge_policy(mut self, policy: KnifeEdgePolicy) -> Self {
        self.knife_edge_policy = policy;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ByRole<T> {
    pub favorite: T,
    pub challenger: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct DirectionCounts {
    /// Moves towards the opponent's ex-ante platform.
    pub toward_center: u64,
    pub away_from_center: u64,
    /// Moves ending beyond the opponent, in either ex-ante or ex-post order.
    pub order_crossing: u64,
    /// Moves from identical platforms, which have no inward direction.
    pub undirected: u64,
}

/// Raw counters behind [`SimulationStats`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SimulationCounts {
    pub knife_edge: u64,
    /// Draws entering the statistics (knife edges are dropped under `Reject`).
    pub effective: u64,
    pub open: u64,
    pub weak_favorite: u64,
    pub secured: [u64; 2],
    pub flips: [u64; 2],
    pub open_flips: ByRole<u64>,
    pub role_flips: ByRole<u64>,
    pub role_flip_wins: ByRole<u64>,
    pub role_flip_magnitude: ByRole<f64>,
    pub payoff_sum: [f64; 2],
    pub payoff_sq_sum: [f64; 2],
    pub directions: DirectionCounts,
}

impl SimulationCounts {
    fn merge(&mut self, o: &SimulationCounts) {
        self.knife_edge += o.knife_edge;
        self.effective += o.effective;
        self.open += o.open;
        self.weak_favorite += o.weak_favorite;
        for i in 0..2 {
            self.secured[i] += o.secured[i];
            self.flips[i] += o.flips[i];
            self.payoff_sum[i] += o.payoff_sum[i];
            self.payoff_sq_sum[i] += o.payoff_sq_sum[i];
        }
        self.open_flips.favorite += o.open_flips.favorite;
        self.open_flips.challenger += o.open_flips.challenger;
        self.role_flips.favorite += o.role_flips.favorite;
        self.role_flips.challenger += o.role_flips.challenger;
        self.role_flip_wins.favorite += o.role_flip_wins.favorite;
        self.role_flip_wins.challenger += o.role_flip_wins.challenger;
        self.role_flip_magnitude.favorite += o.role_flip_magnitude.favorite;
        self.role_flip_magnitude.challenger += o.role_flip_magnitude.challenger;
        self.directions.toward_center += o.directions.toward_center;
        self.directions.away_from_center += o.directions.away_from_center;
        self.directions.order_crossing += o.directions.order_crossing;
        self.directions.undirected += o.directions.undirected;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationStats {
    pub pair: [f64; 2],
    pub draws: u64,
    pub seed: u64,
    pub payoff_mean: [f64; 2],
    pub payoff_std_error: [f64; 2],
    pub flip_frequency: [f64; 2],
    pub flip_frequency_given_open: ByRole<Option<f64>>,
    pub flip_direction_counts: DirectionCounts,
    pub flip_magnitude_mean: ByRole<Option<f64>>,
    pub flip_success_rate: ByRole<Option<f64>>,
    pub open_election_frequency: f64,
    pub weak_favorite_frequency: f64,
    pub secured_frequency: [f64; 2],
    pub knife_edge_draws: u64,
    pub counts: SimulationCounts,
}

/// Normal-approximation standard error of a proportion.
pub fn proportion_std_error(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl SimulationStats {
    fn from_counts(pair: &PlatformPair, config: &SimulationConfig, c: SimulationCounts) -> Self {
        let n = c.effective as f64;
        let mut mean = [0.0; 2];
        let mut se = [0.0; 2];
        for i in 0..2 {
            mean[i] = c.payoff_sum[i] / n;
            let var =
                if c.effective > 1 { ((c.payoff_sq_sum[i] - n * mean[i] * mean[i]) / (n - 1.0)).max(0.0) } else { 0.0 };
            se[i] = (var / n).sqrt();
        }
        let freq = |k: u64| if c.effective > 0 { k as f64 / n } else { 0.0 };
        SimulationStats {
            pair: [pair.x(Candidate::One), pair.x(Candidate::Two)],
            draws: config.draws,
            seed: config.seed,
            payoff_mean: mean,
            payoff_std_error: se,
            flip_frequency: [freq(c.flips[0]), freq(c.flips[1])],
            flip_frequency_given_open: ByRole {
                favorite: ratio(c.open_flips.favorite, c.open),
                challenger: ratio(c.open_flips.challenger, c.open),
            },
            flip_direction_counts: c.directions,
            flip_magnitude_mean: ByRole {
                favorite: (c.role_flips.favorite > 0)
                    .then(|| c.role_flip_magnitude.favorite / c.role_flips.favorite as f64),
                challenger: (c.role_flips.challenger > 0)
                    .then(|| c.role_flip_magnitude.challenger / c.role_flips.challenger as f64),
            },
            flip_success_rate: ByRole {
                favorite: ratio(c.role_flip_wins.favorite, c.role_flips.favorite),
                challenger: ratio(c.role_flip_wins.challenger, c.role_flips.challenger),
            },
            open_election_frequency: freq(c.open + c.weak_favorite),
            weak_favorite_frequency: freq(c.weak_favorite),
            secured_frequency: [freq(c.secured[0]), freq(c.secured[1])],
            knife_edge_draws: c.knife_edge,
            counts: c,
        }
    }
}

fn record_flip(c: Candidate, y: [f64; 2], pair: &PlatformPair, dir: &mut DirectionCounts) {
    let own = pair.x(c);
    let opp = pair.x(c.other());
    let side = opp - own;
    if side == 0.0 {
        dir.undirected += 1;
        return;
    }
    let step = y[c.index()] - own;
    if step * side > 0.0 {
        dir.toward_center += 1;
    } else if step * side < 0.0 {
        dir.away_from_center += 1;
    }
    let past_opponent = (y[c.index()] - opp) * side > 0.0;
    let reversed = (y[c.index()] - y[c.other().index()]) * side > 0.0;
    if past_opponent || reversed {
        dir.order_crossing += 1;
    }
}

fn simulate_block(block: u64, pair: &PlatformPair, params: &GameParams, config: &SimulationConfig) -> SimulationCounts {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(block);
    let start = block * BLOCK_DRAWS;
    let len = BLOCK_DRAWS.min(config.draws - start);
    let phi = params.phi();
    let mut t = SimulationCounts::default();

    for _ in 0..len {
        let m_raw: f64 = rng.random();
        let u_adjust: [f64; 2] = [rng.random(), rng.random()];
        let coin: bool = rng.random();
        let m = Median::new(m_raw).expect("uniform draw lies in [0, 1)");
        let status = classify(pair, m, params);

        let (adjusted, y) = if status == SubgameStatus::KnifeEdge {
            t.knife_edge += 1;
            if config.knife_edge_policy == KnifeEdgePolicy::Reject {
                continue;
            }
            ([false, false], [pair.x(Candidate::One), pair.x(Candidate::Two)])
        } else {
            let eq = solve_subgame(pair, m, params).expect("non-knife-edge status always solves");
            let adjusted = Candidate::BOTH.map(|c| u_adjust[c.index()] < eq.action(c).adjust_probability);
            let y = Candidate::BOTH.map(|c| {
                let a = eq.action(c);
                if adjusted[c.index()] {
                    a.adjust_target
                } else {
                    a.stay_platform
                }
            });
            (adjusted, y)
        };

        let w1 = win_probability(Candidate::One, y[0], y[1], pair, m_raw, params);
        let one_wins = if w1 == 0.5 { coin } else { w1 == 1.0 };
        let winner = if one_wins { Candidate::One } else { Candidate::Two };

        t.effective += 1;
        for c in Candidate::BOTH {
            let i = c.index();
            let charged = adjusted[i] && y[i] != pair.x(c);
            let payoff = f64::from(u8::from(winner == c)) - if charged { phi } else { 0.0 };
            t.payoff_sum[i] += payoff;
            t.payoff_sq_sum[i] += payoff * payoff;
            if adjusted[i] {
                t.flips[i] += 1;
                record_flip(c, y, pair, &mut t.directions);
            }
        }

        if status == SubgameStatus::KnifeEdge {
            continue;
        }
        match status {
            SubgameStatus::Open { .. } => t.open += 1,
            SubgameStatus::WeakFavorite { .. } => t.weak_favorite += 1,
            SubgameStatus::Secured { favorite } => t.secured[favorite.index()] += 1,
            _ => {}
        }
        let Some(fav) = status.favorite() else { continue };
        for (c, is_fav) in [(fav, true), (fav.other(), false)] {
            let i = c.index();
            if !adjusted[i] {
                continue;
            }
            let won = u64::from(winner == c);
            let magnitude = (y[i] - pair.x(c)).abs();
            if is_fav {
                t.role_flips.favorite += 1;
                t.role_flip_wins.favorite += won;
                t.role_flip_magnitude.favorite += magnitude;
            } else {
                t.role_flips.challenger += 1;
                t.role_flip_wins.challenger += won;
                t.role_flip_magnitude.challenger += magnitude;
            }
            if matches!(status, SubgameStatus::Open { .. }) {
                if is_fav {
                    t.open_flips.favorite += 1;
                } else {
                    t.open_flips.challenger += 1;
                }
            }
        }
    }
    t
}

/// Draw `m` uniformly, play the subgame equilibrium by sampling its
/// mixtures, and decide the election at `m` (exact ties by a fair coin).
pub fn simulate(pair: &PlatformPair, params: &GameParams, config: &SimulationConfig) -> Result<SimulationStats> {
    simulate_with(pair, params, config, Backend::from_workers(config.worker_count))
}

/// [`simulate`] on an explicit backend, ignoring `config.worker_count`.
pub fn simulate_with(
    pair: &PlatformPair,
    params: &GameParams,
    config: &SimulationConfig,
    backend: Backend,
) -> Result<SimulationStats> {
    if config.draws == 0 {
        return Err(Error::invalid("simulation needs at least one draw"));
    }
    let blocks = config.draws.div_ceil(BLOCK_DRAWS);
    let blocks_usize =
        usize::try_from(blocks).map_err(|_| Error::invalid(format!("{} draws exceed this platform", config.draws)))?;
    let tallies = backend.map(blocks_usize, |b| simulate_block(b as u64, pair, params, config));
    let mut total = SimulationCounts::default();
    for t in &tallies {
        total.merge(t);
    }
    if total.effective == 0 {
        return Err(Error::invalid("every draw was a rejected knife edge"));
    }
    Ok(SimulationStats::from_counts(pair, config, total))
}
