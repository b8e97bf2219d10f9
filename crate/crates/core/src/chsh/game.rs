//! CHSH referee: action grid, winning probabilities, outcome sampling and the
//! precomputed win table agents reason with.

use std::f64::consts::PI;

use crate::error::{check_bit, check_range, Error, Result};
use crate::qcore::{born_joint, chsh_state, observable_effects, Effect, EntGrid, TwoQubitState};
use crate::rng::StreamRng;

pub const THETA_STEPS: usize = 9;
pub const PHI_STEPS: usize = 16;
pub const N_ACTIONS: usize = 2 + (THETA_STEPS - 2) * PHI_STEPS;

const STEP: f64 = PI / 8.0;

/// A measurement O(θ, φ) on the π/8 grid. At the poles φ is pinned to 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    theta_idx: u8,
    phi_idx: u8,
}

impl Action {
    pub fn new(theta_idx: usize, phi_idx: usize) -> Result<Self> {
        let pole = theta_idx == 0 || theta_idx == THETA_STEPS - 1;
        if theta_idx >= THETA_STEPS || phi_idx >= PHI_STEPS || (pole && phi_idx != 0) {
            return Err(Error::InvalidAction {
                theta_idx,
                phi_idx,
            });
        }
        Ok(Self {
            theta_idx: theta_idx as u8,
            phi_idx: phi_idx as u8,
        })
    }

    pub fn from_index(idx: usize) -> Result<Self> {
        match idx {
            0 => Action::new(0, 0),
            i if i == N_ACTIONS - 1 => Action::new(THETA_STEPS - 1, 0),
            i if i < N_ACTIONS => Action::new(1 + (i - 1) / PHI_STEPS, (i - 1) % PHI_STEPS),
            _ => Err(Error::InvalidAction {
                theta_idx: idx,
                phi_idx: 0,
            }),
        }
    }

    /// Position in [`ActionGrid`] order: +Z, then θ = π/8..7π/8 by φ, then −Z.
    pub fn index(self) -> usize {
        match self.theta_idx as usize {
            0 => 0,
            t if t == THETA_STEPS - 1 => N_ACTIONS - 1,
            t => 1 + (t - 1) * PHI_STEPS + self.phi_idx as usize,
        }
    }

    pub fn theta_idx(self) -> usize {
        self.theta_idx as usize
    }

    pub fn phi_idx(self) -> usize {
        self.phi_idx as usize
    }

    pub fn theta(self) -> f64 {
        self.theta_idx as f64 * STEP
    }

    pub fn phi(self) -> f64 {
        self.phi_idx as f64 * STEP
    }

    pub fn effects(self, eps: f64) -> Result<(Effect, Effect)> {
        observable_effects(self.theta(), self.phi(), eps)
    }
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "O({}π/8, {}π/8)", self.theta_idx, self.phi_idx)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionGrid {
    actions: Vec<Action>,
}

impl ActionGrid {
    pub fn standard() -> Self {
        let actions = (0..N_ACTIONS)
            .map(|i| Action::from_index(i).expect("index in range"))
            .collect();
        Self { actions }
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

impl Default for ActionGrid {
    fn default() -> Self {
        Self::standard()
    }
}

/// One measurement per bit value the player may receive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Strategy {
    pub action_for_bit0: Action,
    pub action_for_bit1: Action,
}

impl Strategy {
    pub fn new(action_for_bit0: Action, action_for_bit1: Action) -> Self {
        Self {
            action_for_bit0,
            action_for_bit1,
        }
    }

    pub fn action(&self, bit: u8) -> Action {
        if bit == 0 {
            self.action_for_bit0
        } else {
            self.action_for_bit1
        }
    }
}

fn parity_target(x: u8, y: u8) -> u8 {
    x & y
}

/// Joint outcome distribution P(a, b), index 2a + b.
fn joint_outcomes(state: &TwoQubitState, ea: &(Effect, Effect), eb: &(Effect, Effect)) -> Result<[f64; 4]> {
    Ok([
        born_joint(state, &ea.0, &eb.0)?,
        born_joint(state, &ea.0, &eb.1)?,
        born_joint(state, &ea.1, &eb.0)?,
        born_joint(state, &ea.1, &eb.1)?,
    ])
}

fn win_from_outcomes(probs: &[f64; 4], x: u8, y: u8) -> f64 {
    if parity_target(x, y) == 0 {
        probs[0] + probs[3]
    } else {
        probs[1] + probs[2]
    }
}

/// Referee's probability that the pair wins on bits (x, y).
pub fn win_prob(x: u8, y: u8, a_alice: Action, a_bob: Action, gamma: f64, eps: f64) -> Result<f64> {
    check_bit(x)?;
    check_bit(y)?;
    let state = chsh_state(gamma)?;
    let probs = joint_outcomes(&state, &a_alice.effects(eps)?, &a_bob.effects(eps)?)?;
    Ok(win_from_outcomes(&probs, x, y))
}

/// Winning probability averaged over the four uniformly random bit pairs.
pub fn joint_win_prob(alice: &Strategy, bob: &Strategy, gamma: f64, eps: f64) -> Result<f64> {
    let mut total = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            total += win_prob(x, y, alice.action(x), bob.action(y), gamma, eps)?;
        }
    }
    Ok(total / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationOutcome {
    pub a: u8,
    pub b: u8,
    pub won: bool,
}

/// Draws the referee's measurement outcomes (a, b) from the joint Born
/// distribution of the floored effects.
pub fn sample_iteration(
    rng: &mut StreamRng,
    x: u8,
    y: u8,
    a_alice: Action,
    a_bob: Action,
    gamma: f64,
    eps: f64,
) -> Result<IterationOutcome> {
    check_bit(x)?;
    check_bit(y)?;
    let state = chsh_state(gamma)?;
    let probs = joint_outcomes(&state, &a_alice.effects(eps)?, &a_bob.effects(eps)?)?;
    Ok(sample_from_outcomes(rng, &probs, x, y))
}

pub(crate) fn sample_from_outcomes(rng: &mut StreamRng, probs: &[f64; 4], x: u8, y: u8) -> IterationOutcome {
    let k = rng.categorical(probs) as u8;
    let (a, b) = (k >> 1, k & 1);
    IterationOutcome {
        a,
        b,
        won: a ^ b == parity_target(x, y),
    }
}

/// Joint outcome distributions for every action pair at a single state;
/// used by the referee when the game state is fixed for a whole simulation.
#[derive(Debug, Clone)]
pub struct OutcomeTable {
    gamma: f64,
    eps: f64,
    probs: Vec<[f64; 4]>,
}

impl OutcomeTable {
    pub fn new(gamma: f64, eps: f64) -> Result<Self> {
        let state = chsh_state(gamma)?;
        let effects = effect_cache(eps)?;
        let mut probs = Vec::with_capacity(N_ACTIONS * N_ACTIONS);
        for ea in &effects {
            for eb in &effects {
                probs.push(joint_outcomes(&state, ea, eb)?);
            }
        }
        Ok(Self { gamma, eps, probs })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn outcomes(&self, a_alice: Action, a_bob: Action) -> &[f64; 4] {
        &self.probs[a_alice.index() * N_ACTIONS + a_bob.index()]
    }

    pub fn win_prob(&self, x: u8, y: u8, a_alice: Action, a_bob: Action) -> f64 {
        win_from_outcomes(self.outcomes(a_alice, a_bob), x, y)
    }

    pub fn joint_win_prob(&self, alice: &Strategy, bob: &Strategy) -> f64 {
        let mut total = 0.0;
        for x in 0..2 {
            for y in 0..2 {
                total += self.win_prob(x, y, alice.action(x), bob.action(y));
            }
        }
        total / 4.0
    }

    pub fn sample(&self, rng: &mut StreamRng, x: u8, y: u8, a_alice: Action, a_bob: Action) -> IterationOutcome {
        sample_from_outcomes(rng, self.outcomes(a_alice, a_bob), x, y)
    }
}

fn effect_cache(eps: f64) -> Result<Vec<(Effect, Effect)>> {
    ActionGrid::standard()
        .actions()
        .iter()
        .map(|a| a.effects(eps))
        .collect()
}

/// Winning probabilities for every (x, y, own action, partner action,
/// entanglement level), laid out so that `row(x, y, a)` is a contiguous
/// partner-action × level slice.
#[derive(Debug, Clone)]
pub struct WinTable {
    eps: f64,
    ents: EntGrid,
    data: Vec<f64>,
}

impl WinTable {
    #[inline]
    fn offset(&self, x: u8, y: u8, a: usize, b: usize, g: usize) -> usize {
        let n_g = self.ents.len();
        ((((x as usize * 2 + y as usize) * N_ACTIONS + a) * N_ACTIONS + b) * n_g) + g
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn ents(&self) -> &EntGrid {
        &self.ents
    }

    #[inline]
    pub fn get(&self, x: u8, y: u8, a: Action, b: Action, g: usize) -> f64 {
        self.data[self.offset(x, y, a.index(), b.index(), g)]
    }

    /// Partner-action × level slice for fixed bits and own action.
    #[inline]
    pub fn row(&self, x: u8, y: u8, a: usize) -> &[f64] {
        let start = self.offset(x, y, a, 0, 0);
        &self.data[start..start + N_ACTIONS * self.ents.len()]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Table-based joint winning probability at grid level `g`.
    pub fn joint_win_prob(&self, alice: &Strategy, bob: &Strategy, g: usize) -> f64 {
        let mut total = 0.0;
        for x in 0..2 {
            for y in 0..2 {
                total += self.get(x, y, alice.action(x), bob.action(y), g);
            }
        }
        total / 4.0
    }

    /// Entry-wise `scale * p + shift`; used to check that decisions depend on
    /// the utility scale only through its ordering.
    pub fn affine(&self, scale: f64, shift: f64) -> Self {
        Self {
            eps: self.eps,
            ents: self.ents.clone(),
            data: self.data.iter().map(|p| scale * p + shift).collect(),
        }
    }
}

pub fn build_win_table(grid: &ActionGrid, ents: &EntGrid, eps: f64) -> Result<WinTable> {
    check_range("eps", eps, 0.0, 1.0)?;
    let effects: Vec<(Effect, Effect)> = grid
        .actions()
        .iter()
        .map(|a| a.effects(eps))
        .collect::<Result<_>>()?;
    let states: Vec<TwoQubitState> = ents
        .levels()
        .iter()
        .map(|l| chsh_state(l.gamma))
        .collect::<Result<_>>()?;
    let n_g = ents.len();
    let mut table = WinTable {
        eps,
        ents: ents.clone(),
        data: vec![0.0; 4 * N_ACTIONS * N_ACTIONS * n_g],
    };
    for (ia, ea) in effects.iter().enumerate() {
        for (ib, eb) in effects.iter().enumerate() {
            for (g, state) in states.iter().enumerate() {
                let probs = joint_outcomes(state, ea, eb)?;
                for x in 0..2 {
                    for y in 0..2 {
                        let off = table.offset(x, y, ia, ib, g);
                        table.data[off] = win_from_outcomes(&probs, x, y);
                    }
                }
            }
        }
    }
    Ok(table)
}

/// Best joint winning probability over all grid strategy profiles at level
/// `g`. For a fixed Alice strategy the objective separates over Bob's two
/// bit values, so Bob's best response is found per bit.
pub fn max_joint_win(table: &WinTable, g: usize) -> (f64, Strategy, Strategy) {
    let actions = ActionGrid::standard();
    let mut best = (f64::NEG_INFINITY, 0, 0, 0, 0);
    for a0 in 0..N_ACTIONS {
        for a1 in 0..N_ACTIONS {
            let mut total = 0.0;
            let mut responses = [0usize; 2];
            for y in 0..2u8 {
                let r0 = table.row(0, y, a0);
                let r1 = table.row(1, y, a1);
                let n_g = table.ents.len();
                let (bi, bv) = (0..N_ACTIONS)
                    .map(|b| (b, r0[b * n_g + g] + r1[b * n_g + g]))
                    .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
                responses[y as usize] = bi;
                total += bv;
            }
            if total > best.0 {
                best = (total, a0, a1, responses[0], responses[1]);
            }
        }
    }
    let act = |i: usize| actions.actions()[i];
    (
        best.0 / 4.0,
        Strategy::new(act(best.1), act(best.2)),
        Strategy::new(act(best.3), act(best.4)),
    )
}
