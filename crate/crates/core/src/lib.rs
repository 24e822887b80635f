//! Equilibrium engine for two-candidate spatial competition in which
//! candidates may revise their platform after the median voter is revealed,
//! at an organizational cost and an electoral penalty.
//!
//! Layers, bottom to top:
//!
//! - [`game`]: parameters, voter utilities, optimal adjustments and the
//!   classification of each second-stage configuration;
//! - [`subgame`]: the reduced 2x2 continuation game and its equilibrium;
//! - [`first_stage`]: ex-ante payoffs by region integration, best responses,
//!   subgame-perfect and epsilon equilibria;
//! - [`verify`]: grid and Monte Carlo oracles, behavioural checks and
//!   comparative-statics sweeps.
//!
//! With the default `parallel` feature, grid sweeps and simulations run on
//! rayon; without it every entry point runs sequentially with identical
//! results.

pub mod error;
pub mod first_stage;
pub mod game;
pub mod par;
pub mod subgame;
pub mod verify;

pub use error::{Error, Result};
pub use first_stage::{
    best_response, closed_form_g1, critical_medians, epsilon_loss_coefficient, epsilon_profile, equilibrium_threshold,
    exante_payoff, existence_threshold, psi, region_partition, response_supremum, solve_first_stage,
    FirstStageSolution, Region, RegionPartition, ResponseSupremum, Spne,
};
pub use game::{
    alpha, classify, favorite, optimal_adjustment, outer_weak_favorite_threshold, secured_interval,
    unclamped_secured_ends, voter_utility, weak_favorite_threshold, Candidate, GameParams, Median, PlatformPair,
    SecuredInterval, SubgameStatus,
};
pub use par::Backend;
pub use subgame::{
    normal_form, solve_subgame, solve_subgame_with, Action, KnifeEdgePolicy, MixedAction, NormalForm,
    SubgameEquilibrium,
};
