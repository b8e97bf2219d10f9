//! A fixed opening round from uniform priors at maximal entanglement.
//!
//! Alice measures O(7π/8, 7π/4) on bit 0 and O(π/4, 5π/4) on bit 1; Bob
//! measures O(π/8, 15π/8) on bit 0 and O(π/4, π/4) on bit 1. The referee
//! issues (0,0), (0,1), (1,1) and the players lose all three iterations.

use std::f64::consts::FRAC_PI_2;

use super::agent::{best_expected_round_win, entanglement_expectation, make_prior, update, ChshPrior, IterationObs, PriorKind};
use super::game::{win_prob, Action, Strategy, WinTable};
use crate::error::Result;

pub const BITS: [(u8, u8); 3] = [(0, 0), (0, 1), (1, 1)];

pub fn alice_strategy() -> Strategy {
    Strategy::new(Action::new(7, 14).unwrap(), Action::new(2, 10).unwrap())
}

pub fn bob_strategy() -> Strategy {
    Strategy::new(Action::new(1, 15).unwrap(), Action::new(2, 2).unwrap())
}

/// Each player's posterior-mode partner actions (bit 0, bit 1) and the
/// largest marginal weight on any single partner action.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorMode {
    pub bit0: Action,
    pub bit1: Action,
    pub max_weight: f64,
}

#[derive(Debug, Clone)]
pub struct WorkedRound {
    pub iteration_win: [f64; 3],
    pub joint_win: f64,
    pub alice_posterior: ChshPrior,
    pub bob_posterior: ChshPrior,
    pub alice_mode: PosteriorMode,
    pub bob_mode: PosteriorMode,
    /// Expected round win of each player's best strategy entering round two.
    pub alice_next: f64,
    pub bob_next: f64,
    pub alice_ent: f64,
    pub bob_ent: f64,
}

fn mode(prior: &ChshPrior) -> PosteriorMode {
    let argmax = |m: &[f64]| -> (Action, f64) {
        let (i, w) = m
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &w)| if w > best.1 { (i, w) } else { best });
        (Action::from_index(i).unwrap(), w)
    };
    let (bit0, w0) = argmax(&prior.action_marginal(0));
    let (bit1, w1) = argmax(&prior.action_marginal(1));
    PosteriorMode {
        bit0,
        bit1,
        max_weight: w0.max(w1),
    }
}

/// Plays the round against `table` (which must be built at ε = 0.1 for the
/// quoted numbers) and updates both uniform priors on three losses.
pub fn worked_round(table: &WinTable) -> Result<WorkedRound> {
    let eps = table.eps();
    let (alice, bob) = (alice_strategy(), bob_strategy());
    let mut iteration_win = [0.0; 3];
    for (p, &(x, y)) in iteration_win.iter_mut().zip(&BITS) {
        *p = win_prob(x, y, alice.action(x), bob.action(y), FRAC_PI_2, eps)?;
    }
    let joint_win = super::game::joint_win_prob(&alice, &bob, FRAC_PI_2, eps)?;

    let alice_obs: Vec<IterationObs> = BITS
        .iter()
        .map(|&(x, y)| IterationObs {
            own_bit: x,
            opp_bit: y,
            own_action: alice.action(x),
            won: false,
        })
        .collect();
    let bob_obs: Vec<IterationObs> = BITS
        .iter()
        .map(|&(x, y)| IterationObs {
            own_bit: y,
            opp_bit: x,
            own_action: bob.action(y),
            won: false,
        })
        .collect();
    let uniform = make_prior(PriorKind::Uniform);
    let alice_posterior = update(&uniform, &alice_obs, table)?;
    let bob_posterior = update(&uniform, &bob_obs, table)?;

    Ok(WorkedRound {
        iteration_win,
        joint_win,
        alice_mode: mode(&alice_posterior),
        bob_mode: mode(&bob_posterior),
        alice_next: best_expected_round_win(&alice_posterior, table)?,
        bob_next: best_expected_round_win(&bob_posterior, table)?,
        alice_ent: entanglement_expectation(&alice_posterior, table.ents()),
        bob_ent: entanglement_expectation(&bob_posterior, table.ents()),
        alice_posterior,
        bob_posterior,
    })
}
