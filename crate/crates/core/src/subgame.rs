//! Second stage: the continuation game once `m` is revealed.
//!
//! Each candidate either stays at its ex-ante platform or moves to its
//! optimal adjustment; every other platform is dominated or redundant, so
//! the subgame reduces to a 2x2 normal form whose unique equilibrium is
//! known in closed form for each [`SubgameStatus`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{
    classify, optimal_adjustment, voter_utility, Candidate, GameParams, Median, PlatformPair, SubgameStatus,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Adjust,
    Stay,
}

impl Action {
    pub const BOTH: [Action; 2] = [Action::Adjust, Action::Stay];

    fn index(self) -> usize {
        match self {
            Action::Adjust => 0,
            Action::Stay => 1,
        }
    }
}

/// How to treat a knife-edge realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnifeEdgePolicy {
    /// Refuse to pick a winner.
    #[default]
    Reject,
    /// Both candidates stay; an exact utility tie is settled by a fair coin.
    FairCoin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedAction {
    pub stay_platform: f64,
    pub adjust_target: f64,
    pub adjust_probability: f64,
}

impl MixedAction {
    fn new(x: f64, m: f64, a: f64, adjust_probability: f64) -> Self {
        MixedAction { stay_platform: x, adjust_target: optimal_adjustment(m, x, a), adjust_probability }
    }

    pub fn probability(&self, action: Action) -> f64 {
        match action {
            Action::Adjust => self.adjust_probability,
            Action::Stay => 1.0 - self.adjust_probability,
        }
    }

    pub fn platform(&self, action: Action) -> f64 {
        match action {
            Action::Adjust => self.adjust_target,
            Action::Stay => self.stay_platform,
        }
    }
}

/// Reduced 2x2 game. Rows are candidate 1's actions, columns candidate 2's,
/// both ordered (adjust, stay).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalForm {
    pub cells: [[[f64; 2]; 2]; 2],
}

impl NormalForm {
    pub fn payoff(&self, a1: Action, a2: Action) -> [f64; 2] {
        self.cells[a1.index()][a2.index()]
    }

    /// Expected payoff of `player` taking `action` against the opponent's
    /// probability of adjusting.
    pub fn action_payoff(&self, player: Candidate, action: Action, opponent_adjust: f64) -> f64 {
        Action::BOTH
            .iter()
            .map(|&other| {
                let p = if other == Action::Adjust { opponent_adjust } else { 1.0 - opponent_adjust };
                let cell = match player {
                    Candidate::One => self.payoff(action, other),
                    Candidate::Two => self.payoff(other, action),
                };
                p * cell[player.index()]
            })
            .sum()
    }

    pub fn expected_payoffs(&self, adjust1: f64, adjust2: f64) -> [f64; 2] {
        let mut out = [0.0; 2];
        for r in Action::BOTH {
            for c in Action::BOTH {
                let pr = if r == Action::Adjust { adjust1 } else { 1.0 - adjust1 };
                let pc = if c == Action::Adjust { adjust2 } else { 1.0 - adjust2 };
                let cell = self.payoff(r, c);
                out[0] += pr * pc * cell[0];
                out[1] += pr * pc * cell[1];
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubgameEquilibrium {
    pub actions: [MixedAction; 2],
    pub payoffs: [f64; 2],
    pub status: SubgameStatus,
}

impl SubgameEquilibrium {
    pub fn action(&self, c: Candidate) -> &MixedAction {
        &self.actions[c.index()]
    }

    pub fn payoff(&self, c: Candidate) -> f64 {
        self.payoffs[c.index()]
    }

    pub fn swapped(&self) -> Self {
        SubgameEquilibrium {
            actions: [self.actions[1], self.actions[0]],
            payoffs: [self.payoffs[1], self.payoffs[0]],
            status: self.status.swapped(),
        }
    }
}

/// Probability that `c`, at ex-post platform `y_own`, beats the opponent at
/// `y_opp`. Exact utility ties count one half.
pub fn win_probability(c: Candidate, y_own: f64, y_opp: f64, pair: &PlatformPair, m: f64, params: &GameParams) -> f64 {
    let o = c.other();
    let own = voter_utility(m, pair.x(c), y_own, params.a(c));
    let opp = voter_utility(m, pair.x(o), y_opp, params.a(o));
    if own > opp {
        1.0
    } else if own < opp {
        0.0
    } else {
        0.5
    }
}

pub fn normal_form(pair: &PlatformPair, m: Median, params: &GameParams) -> NormalForm {
    let m = m.value();
    let phi = params.phi();
    let platform = |c: Candidate, act: Action| match act {
        Action::Adjust => optimal_adjustment(m, pair.x(c), params.a(c)),
        Action::Stay => pair.x(c),
    };
    let cost = |act: Action| if act == Action::Adjust { phi } else { 0.0 };

    let mut cells = [[[0.0; 2]; 2]; 2];
    for r in Action::BOTH {
        for c in Action::BOTH {
            let y1 = platform(Candidate::One, r);
            let y2 = platform(Candidate::Two, c);
            let w1 = win_probability(Candidate::One, y1, y2, pair, m, params);
            cells[r.index()][c.index()] = [w1 - cost(r), (1.0 - w1) - cost(c)];
        }
    }
    NormalForm { cells }
}

/// Solve the subgame, rejecting knife-edge realizations.
pub fn solve_subgame(pair: &PlatformPair, m: Median, params: &GameParams) -> Result<SubgameEquilibrium> {
    solve_subgame_with(pair, m, params, KnifeEdgePolicy::Reject)
}

pub fn solve_subgame_with(
    pair: &PlatformPair,
    m: Median,
    params: &GameParams,
    policy: KnifeEdgePolicy,
) -> Result<SubgameEquilibrium> {
    let status = classify(pair, m, params);
    let phi = params.phi();
    let mut adjust = [0.0; 2];
    let mut payoffs = [0.0; 2];

    match status {
        SubgameStatus::Identical => {
            adjust = [1.0, 1.0];
            payoffs = [0.5 - phi, 0.5 - phi];
        }
        SubgameStatus::Secured { favorite } => {
            payoffs[favorite.index()] = 1.0;
        }
        SubgameStatus::Open { favorite } => {
            adjust[favorite.index()] = 1.0 - phi;
            adjust[favorite.other().index()] = phi;
            payoffs[favorite.index()] = 1.0 - phi;
        }
        SubgameStatus::WeakFavorite { strong_challenger, .. } => {
            adjust[strong_challenger.index()] = 1.0;
            payoffs[strong_challenger.index()] = 1.0 - phi;
        }
        SubgameStatus::KnifeEdge => match policy {
            KnifeEdgePolicy::Reject => return Err(Error::UnresolvedTie { m: m.value() }),
            KnifeEdgePolicy::FairCoin => {
                let w1 = win_probability(
                    Candidate::One,
                    pair.x(Candidate::One),
                    pair.x(Candidate::Two),
                    pair,
                    m.value(),
                    params,
                );
                payoffs = [w1, 1.0 - w1];
            }
        },
    }

    let actions = Candidate::BOTH.map(|c| MixedAction::new(pair.x(c), m.value(), params.a(c), adjust[c.index()]));
    Ok(SubgameEquilibrium { actions, payoffs, status })
}

/// Payoff pair of the unique subgame equilibrium for a non-knife-edge status.
pub fn status_payoffs(status: SubgameStatus, phi: f64) -> Option<[f64; 2]> {
    let mut out = [0.0; 2];
    match status {
        SubgameStatus::Identical => return Some([0.5 - phi, 0.5 - phi]),
        SubgameStatus::Secured { favorite } => out[favorite.index()] = 1.0,
        SubgameStatus::Open { favorite } => out[favorite.index()] = 1.0 - phi,
        SubgameStatus::WeakFavorite { strong_challenger, .. } => out[strong_challenger.index()] = 1.0 - phi,
        SubgameStatus::KnifeEdge => return None,
    }
    Some(out)
}
