//! The CHSH nonlocal game and its Bayesian players.

pub mod agent;
pub mod example;
pub mod game;

pub use agent::{
    best_expected_round_win, choose_action, choose_strategy, entanglement_expectation, expected_round_win,
    expected_utilities, make_prior, update, update_in_place, ChshPrior, IterationObs, PriorKind, PriorSnapshot,
};
pub use game::{
    build_win_table, joint_win_prob, max_joint_win, sample_iteration, win_prob, Action, ActionGrid, IterationOutcome,
    OutcomeTable, Strategy, WinTable, N_ACTIONS, PHI_STEPS, THETA_STEPS,
};
