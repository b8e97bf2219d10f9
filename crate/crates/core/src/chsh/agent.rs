//! Rational CHSH player.
//!
//! The prior is a joint weight tensor over (partner action if their bit is 0,
//! partner action if their bit is 1, entanglement level). It is initialized as
//! a product but stored in full, because Bayes updates couple the three
//! coordinates through the shared entanglement level.
//!
//! The agent is seat-agnostic: the win table is symmetric under exchanging
//! the players, so `table.get(own_bit, opp_bit, own_action, opp_action, g)`
//! is the winning probability from either player's point of view.

use serde::{Deserialize, Serialize};

use super::game::{Action, ActionGrid, Strategy, WinTable, N_ACTIONS, THETA_STEPS};
use crate::error::{check_bit, Error, Result};
use crate::qcore::{EntGrid, N_ENT_LEVELS};
use crate::rng::StreamRng;

const NORM_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorKind {
    Uniform,
    SkewClassical,
    SkewQuantum,
}

impl PriorKind {
    pub const ALL: [PriorKind; 3] = [PriorKind::Uniform, PriorKind::SkewClassical, PriorKind::SkewQuantum];

    pub fn name(self) -> &'static str {
        match self {
            PriorKind::Uniform => "uniform",
            PriorKind::SkewClassical => "skew-classical",
            PriorKind::SkewQuantum => "skew-quantum",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(PriorKind::Uniform),
            "skew-classical" | "skewC" | "skew-c" => Ok(PriorKind::SkewClassical),
            "skew-quantum" | "skewQ" | "skew-q" => Ok(PriorKind::SkewQuantum),
            _ => Err(Error::UnknownName {
                kind: "CHSH prior",
                name: s.to_string(),
                expected: "uniform, skew-classical, skew-quantum".to_string(),
            }),
        }
    }

    fn theta_marginal(self) -> [f64; THETA_STEPS] {
        let e = std::f64::consts::E;
        let powers: [i32; THETA_STEPS] = match self {
            PriorKind::Uniform => [0; THETA_STEPS],
            PriorKind::SkewClassical => [5, 4, 3, 2, 1, 2, 3, 4, 5],
            PriorKind::SkewQuantum => [1, 2, 3, 4, 5, 4, 3, 2, 1],
        };
        powers.map(|k| e.powi(k))
    }

    /// Marginal weight of each grid action (same for both partner bits).
    pub fn action_marginal(self) -> Vec<f64> {
        if self == PriorKind::Uniform {
            return vec![1.0 / N_ACTIONS as f64; N_ACTIONS];
        }
        let theta = self.theta_marginal();
        let grid = ActionGrid::standard();
        let raw: Vec<f64> = grid
            .actions()
            .iter()
            .map(|a| {
                let t = a.theta_idx();
                let spread = if t == 0 || t == THETA_STEPS - 1 { 1.0 } else { 16.0 };
                theta[t] / spread
            })
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }

    /// Marginal weight of each entanglement level.
    pub fn ent_marginal(self) -> [f64; N_ENT_LEVELS] {
        std::array::from_fn(|n| match self {
            PriorKind::Uniform => 1.0 / N_ENT_LEVELS as f64,
            PriorKind::SkewClassical => (11 - n) as f64 / 66.0,
            PriorKind::SkewQuantum => (n + 1) as f64 / 66.0,
        })
    }
}

/// One game iteration as seen by the agent after the round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationObs {
    pub own_bit: u8,
    pub opp_bit: u8,
    pub own_action: Action,
    pub won: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChshPrior {
    w: Vec<f64>,
}

#[inline]
fn cell(a0: usize, a1: usize, g: usize) -> usize {
    (a0 * N_ACTIONS + a1) * N_ENT_LEVELS + g
}

pub fn make_prior(kind: PriorKind) -> ChshPrior {
    let act = kind.action_marginal();
    let ent = kind.ent_marginal();
    let mut w = vec![0.0; N_ACTIONS * N_ACTIONS * N_ENT_LEVELS];
    for a0 in 0..N_ACTIONS {
        for a1 in 0..N_ACTIONS {
            for (g, e) in ent.iter().enumerate() {
                w[cell(a0, a1, g)] = act[a0] * act[a1] * e;
            }
        }
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    ChshPrior { w }
}

/// Flat, index-ordered dump of a prior for debugging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSnapshot {
    pub shape: Vec<usize>,
    pub weights: Vec<f64>,
}

impl ChshPrior {
    /// Weights indexed `(a0 * 114 + a1) * 11 + g`.
    pub fn from_weights(w: Vec<f64>) -> Result<Self> {
        if w.len() != N_ACTIONS * N_ACTIONS * N_ENT_LEVELS {
            return Err(Error::InvalidConfig(format!(
                "CHSH prior needs {} weights, got {}",
                N_ACTIONS * N_ACTIONS * N_ENT_LEVELS,
                w.len()
            )));
        }
        if let Some(i) = w.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidWeight(i));
        }
        let prior = Self { w };
        prior.check_normalized()?;
        Ok(prior)
    }

    /// All mass on a single hypothesis.
    pub fn point_mass(opp_bit0: Action, opp_bit1: Action, g: usize) -> Self {
        let mut w = vec![0.0; N_ACTIONS * N_ACTIONS * N_ENT_LEVELS];
        w[cell(opp_bit0.index(), opp_bit1.index(), g)] = 1.0;
        Self { w }
    }

    pub fn weight(&self, opp_bit0: Action, opp_bit1: Action, g: usize) -> f64 {
        self.w[cell(opp_bit0.index(), opp_bit1.index(), g)]
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn total(&self) -> f64 {
        self.w.iter().sum()
    }

    fn check_normalized(&self) -> Result<()> {
        let total = self.total();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized(total));
        }
        Ok(())
    }

    /// Marginal over the partner's action for partner bit `bit` (length 114).
    pub fn action_marginal(&self, bit: u8) -> Vec<f64> {
        let mut m = vec![0.0; N_ACTIONS];
        for a0 in 0..N_ACTIONS {
            for a1 in 0..N_ACTIONS {
                let s: f64 = self.w[cell(a0, a1, 0)..cell(a0, a1, 0) + N_ENT_LEVELS].iter().sum();
                m[if bit == 0 { a0 } else { a1 }] += s;
            }
        }
        m
    }

    pub fn ent_marginal(&self) -> [f64; N_ENT_LEVELS] {
        let mut m = [0.0; N_ENT_LEVELS];
        for chunk in self.w.chunks_exact(N_ENT_LEVELS) {
            for (acc, v) in m.iter_mut().zip(chunk) {
                *acc += v;
            }
        }
        m
    }

    /// Joint (partner action, level) marginals for partner bits 0 and 1,
    /// each laid out `b * 11 + g` to match [`WinTable::row`].
    fn bit_marginals(&self) -> [Vec<f64>; 2] {
        let mut m0 = vec![0.0; N_ACTIONS * N_ENT_LEVELS];
        let mut m1 = vec![0.0; N_ACTIONS * N_ENT_LEVELS];
        for a0 in 0..N_ACTIONS {
            for a1 in 0..N_ACTIONS {
                let base = cell(a0, a1, 0);
                for g in 0..N_ENT_LEVELS {
                    let v = self.w[base + g];
                    m0[a0 * N_ENT_LEVELS + g] += v;
                    m1[a1 * N_ENT_LEVELS + g] += v;
                }
            }
        }
        [m0, m1]
    }

    pub fn snapshot(&self) -> PriorSnapshot {
        PriorSnapshot {
            shape: vec![N_ACTIONS, N_ACTIONS, N_ENT_LEVELS],
            weights: self.w.clone(),
        }
    }
}

/// Expected winning probability of every own action for both own bit values,
/// under the agent's prior. `eu[own_bit][action_index]`.
pub fn expected_utilities(prior: &ChshPrior, table: &WinTable) -> Result<[Vec<f64>; 2]> {
    prior.check_normalized()?;
    let marg = prior.bit_marginals();
    let eu = [0u8, 1].map(|own_bit| {
        (0..N_ACTIONS)
            .map(|a| {
                let mut total = 0.0;
                for (opp_bit, m) in marg.iter().enumerate() {
                    let row = table.row(own_bit, opp_bit as u8, a);
                    total += row.iter().zip(m).map(|(p, w)| p * w).sum::<f64>();
                }
                0.5 * total
            })
            .collect::<Vec<f64>>()
    });
    Ok(eu)
}

/// Indices whose utility is within the tie tolerance of the maximum.
pub fn maximizers(utilities: &[f64]) -> Vec<usize> {
    let best = utilities.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_TOL * best.abs().max(f64::MIN_POSITIVE);
    utilities
        .iter()
        .enumerate()
        .filter(|(_, &u)| u >= best - tol)
        .map(|(i, _)| i)
        .collect()
}

fn pick(utilities: &[f64], rng: &mut StreamRng) -> Action {
    let best = maximizers(utilities);
    let idx = best[rng.below(best.len())];
    Action::from_index(idx).expect("utility vector is indexed by the grid")
}

pub fn choose_action(prior: &ChshPrior, own_bit: u8, table: &WinTable, rng: &mut StreamRng) -> Result<Action> {
    check_bit(own_bit)?;
    let eu = expected_utilities(prior, table)?;
    Ok(pick(&eu[own_bit as usize], rng))
}

/// Resolves one action per own bit value (bit 0 first), breaking ties
/// uniformly at random.
pub fn choose_strategy(prior: &ChshPrior, table: &WinTable, rng: &mut StreamRng) -> Result<Strategy> {
    let eu = expected_utilities(prior, table)?;
    let a0 = pick(&eu[0], rng);
    let a1 = pick(&eu[1], rng);
    Ok(Strategy::new(a0, a1))
}

/// The agent's own expectation of winning a round iteration with `strategy`.
pub fn expected_round_win(prior: &ChshPrior, strategy: &Strategy, table: &WinTable) -> Result<f64> {
    let eu = expected_utilities(prior, table)?;
    Ok(0.5 * (eu[0][strategy.action_for_bit0.index()] + eu[1][strategy.action_for_bit1.index()]))
}

/// Expected round win of the agent's own best strategy (ties do not matter).
pub fn best_expected_round_win(prior: &ChshPrior, table: &WinTable) -> Result<f64> {
    let eu = expected_utilities(prior, table)?;
    let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(0.5 * (max(&eu[0]) + max(&eu[1])))
}

/// Bayes update on one round's iterations.
pub fn update(prior: &ChshPrior, obs: &[IterationObs], table: &WinTable) -> Result<ChshPrior> {
    let mut post = prior.clone();
    update_in_place(&mut post, obs, table)?;
    Ok(post)
}

pub fn update_in_place(prior: &mut ChshPrior, obs: &[IterationObs], table: &WinTable) -> Result<()> {
    prior.check_normalized()?;
    // Likelihood factors over (partner action, level), one per partner bit.
    let mut factor = [vec![1.0; N_ACTIONS * N_ENT_LEVELS], vec![1.0; N_ACTIONS * N_ENT_LEVELS]];
    for o in obs {
        check_bit(o.own_bit)?;
        check_bit(o.opp_bit)?;
        let row = table.row(o.own_bit, o.opp_bit, o.own_action.index());
        for (f, &p) in factor[o.opp_bit as usize].iter_mut().zip(row) {
            *f *= if o.won { p } else { 1.0 - p };
        }
    }
    let mut total = 0.0;
    for a0 in 0..N_ACTIONS {
        let f0 = &factor[0][a0 * N_ENT_LEVELS..(a0 + 1) * N_ENT_LEVELS];
        for a1 in 0..N_ACTIONS {
            let f1 = &factor[1][a1 * N_ENT_LEVELS..(a1 + 1) * N_ENT_LEVELS];
            let base = cell(a0, a1, 0);
            for g in 0..N_ENT_LEVELS {
                let v = prior.w[base + g] * f0[g] * f1[g];
                prior.w[base + g] = v;
                total += v;
            }
        }
    }
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::ZeroPosterior);
    }
    let inv = 1.0 / total;
    prior.w.iter_mut().for_each(|v| *v *= inv);
    Ok(())
}

/// Expected entanglement (in ebits) under the prior's level marginal.
pub fn entanglement_expectation(prior: &ChshPrior, ents: &EntGrid) -> f64 {
    prior
        .ent_marginal()
        .iter()
        .zip(ents.levels())
        .map(|(w, l)| w * l.ebits)
        .sum()
}
