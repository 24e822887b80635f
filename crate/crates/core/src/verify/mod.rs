//! Independent oracles and behavioural checks for the engine.

pub mod grid;
pub mod implications;
pub mod sim;
pub mod suite;
pub mod sweep;

pub use grid::{
    grid_best_response, grid_best_response_with, grid_subgame_check, max_deviation_gain, unit_grid, CRITICAL_MARGIN,
    ORACLE_TIE_TOL,
};
pub use implications::{check_implications, Check, Clause, ClauseVerdict, ImplicationReport};
pub use sim::{
    proportion_std_error, simulate, simulate_with, ByRole, DirectionCounts, SimulationConfig, SimulationCounts,
    SimulationStats,
};
pub use suite::{run_suite, SuiteCheck, SuiteOptions, SuiteReport};
pub use sweep::{
    asymmetric_sweep, comparative_sweep, AsymmetricRow, Monotonicity, ParameterRegion, SimulatedColumns, SweepReport,
    SweepRow,
};
