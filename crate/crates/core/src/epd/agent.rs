//! 1-fold rational prisoner.
//!
//! The agent holds joint weights over (own belief about the game-state
//! entanglement g, the opponent's certain entanglement j, the opponent's
//! bias k), where a bias is the hypothesized opponent's probability that the
//! agent plays D. Each (j, k) cell carries a continuous bias value that
//! starts at k/10 and is moved by Bayes rule as the hypothesized opponent
//! would move it. By default outcomes reweight only the own-entanglement
//! beliefs ([`EpdUpdate::Separate`]); [`EpdUpdate::Joint`] reweights whole
//! cells instead.
//!
//! Outcomes are always given in the agent's own frame (own bit, opponent
//! bit); the game is symmetric under exchanging the players so the same
//! tables serve both seats.

use serde::{Deserialize, Serialize};

use super::game::{EpdAction, PayoffMatrix};
use crate::error::{check_bit, Error, Result};
use crate::qcore::{check_eps, epd_outcome_probs, EntGrid, EntLevel, N_ENT_LEVELS};
use crate::rng::StreamRng;

const NORM_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-12;
const N_BIAS: usize = 11;
const N_CELLS: usize = N_ENT_LEVELS * N_ENT_LEVELS * N_BIAS;

/// Precomputed outcome distributions and expected payoffs on the
/// entanglement grid for a given floor.
#[derive(Debug, Clone)]
pub struct EpdModel {
    eps: f64,
    ents: EntGrid,
    payoffs: PayoffMatrix,
    /// probs[g][me][opp][2 * my_bit + opp_bit]
    probs: Vec<[[[f64; 4]; 2]; 2]>,
    /// pay[g][me][opp], my expected payoff.
    pay: Vec<[[f64; 2]; 2]>,
}

impl EpdModel {
    pub fn new(eps: f64) -> Result<Self> {
        Self::with_payoffs(eps, PayoffMatrix::standard())
    }

    pub fn with_payoffs(eps: f64, payoffs: PayoffMatrix) -> Result<Self> {
        check_eps(eps)?;
        let ents = EntGrid::standard();
        let mut probs = Vec::with_capacity(ents.len());
        let mut pay = Vec::with_capacity(ents.len());
        for level in ents.levels() {
            let mut p = [[[0.0; 4]; 2]; 2];
            let mut u = [[0.0; 2]; 2];
            for me in EpdAction::ALL {
                for opp in EpdAction::ALL {
                    let dist = epd_outcome_probs(level.gamma, &me.unitary(), &opp.unitary(), eps)?;
                    p[me.index()][opp.index()] = dist;
                    u[me.index()][opp.index()] = payoffs.expected(&dist).0;
                }
            }
            probs.push(p);
            pay.push(u);
        }
        Ok(Self {
            eps,
            ents,
            payoffs,
            probs,
            pay,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn ents(&self) -> &EntGrid {
        &self.ents
    }

    pub fn payoffs(&self) -> &PayoffMatrix {
        &self.payoffs
    }

    /// Outcome distribution in the frame of the player choosing `me`.
    pub fn outcome_probs(&self, g: usize, me: EpdAction, opp: EpdAction) -> &[f64; 4] {
        &self.probs[g][me.index()][opp.index()]
    }

    pub fn expected_pay(&self, g: usize, me: EpdAction, opp: EpdAction) -> f64 {
        self.pay[g][me.index()][opp.index()]
    }

    /// Rational choice of an opponent certain of level `j` who believes I
    /// play D with probability `bias`.
    pub fn opponent_choice(&self, j: usize, bias: f64) -> OppChoice {
        // The opponent's payoff for (its action, mine) is my table read from its side.
        let eu = |a: EpdAction| {
            bias * self.expected_pay(j, a, EpdAction::D) + (1.0 - bias) * self.expected_pay(j, a, EpdAction::Q)
        };
        OppChoice::from_gap(eu(EpdAction::D) - eu(EpdAction::Q))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OppChoice {
    D,
    Q,
    Tie,
}

impl OppChoice {
    fn from_gap(d_minus_q: f64) -> Self {
        if d_minus_q.abs() < TIE_TOL {
            OppChoice::Tie
        } else if d_minus_q > 0.0 {
            OppChoice::D
        } else {
            OppChoice::Q
        }
    }

    /// Probability the hypothesized opponent plays D.
    pub fn prob_d(self) -> f64 {
        match self {
            OppChoice::D => 1.0,
            OppChoice::Q => 0.0,
            OppChoice::Tie => 0.5,
        }
    }

    fn mixture(self) -> [(EpdAction, f64); 2] {
        let d = self.prob_d();
        [(EpdAction::Q, 1.0 - d), (EpdAction::D, d)]
    }
}

/// Rational choice of an opponent certain of `level`, for arbitrary payoffs.
pub fn opponent_action_with(payoffs: &PayoffMatrix, level: EntLevel, bias: f64, eps: f64) -> Result<OppChoice> {
    crate::error::check_range("bias", bias, 0.0, 1.0)?;
    let pay = |opp: EpdAction, me: EpdAction| -> Result<f64> {
        Ok(payoffs.expected(&epd_outcome_probs(level.gamma, &opp.unitary(), &me.unitary(), eps)?).0)
    };
    let eu = |a: EpdAction| -> Result<f64> {
        Ok(bias * pay(a, EpdAction::D)? + (1.0 - bias) * pay(a, EpdAction::Q)?)
    };
    Ok(OppChoice::from_gap(eu(EpdAction::D)? - eu(EpdAction::Q)?))
}

pub fn opponent_action(level: EntLevel, bias: f64, eps: f64) -> Result<OppChoice> {
    opponent_action_with(&PayoffMatrix::standard(), level, bias, eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpdPriorKind {
    LowLow,
    HighHigh,
    LowHigh,
}

impl EpdPriorKind {
    pub const ALL: [EpdPriorKind; 3] = [EpdPriorKind::LowLow, EpdPriorKind::HighHigh, EpdPriorKind::LowHigh];

    pub fn name(self) -> &'static str {
        match self {
            EpdPriorKind::LowLow => "low-low",
            EpdPriorKind::HighHigh => "high-high",
            EpdPriorKind::LowHigh => "low-high",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "low-low" | "lowlow" => Ok(EpdPriorKind::LowLow),
            "high-high" | "highhigh" => Ok(EpdPriorKind::HighHigh),
            "low-high" | "lowhigh" => Ok(EpdPriorKind::LowHigh),
            _ => Err(Error::UnknownName {
                kind: "prisoner prior",
                name: s.to_string(),
                expected: "low-low, high-high, low-high".to_string(),
            }),
        }
    }

    /// Success probabilities of the (own, opponent) entanglement binomials.
    fn success_probs(self) -> (f64, f64) {
        match self {
            EpdPriorKind::LowLow => (0.2, 0.2),
            EpdPriorKind::HighHigh => (0.8, 0.8),
            EpdPriorKind::LowHigh => (0.2, 0.8),
        }
    }
}

/// Binomial(10, p) mass on each ebit grid level.
pub fn binomial_marginal(p: f64) -> [f64; N_ENT_LEVELS] {
    let n = (N_ENT_LEVELS - 1) as i32;
    let mut choose = 1.0;
    std::array::from_fn(|k| {
        if k > 0 {
            choose = choose * (n - k as i32 + 1) as f64 / k as f64;
        }
        choose * p.powi(k as i32) * (1.0 - p).powi(n - k as i32)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpdPrior {
    w: Vec<f64>,
    bias: [[f64; N_BIAS]; N_ENT_LEVELS],
}

#[inline]
fn cell(g: usize, j: usize, k: usize) -> usize {
    (g * N_ENT_LEVELS + j) * N_BIAS + k
}

fn grid_biases() -> [[f64; N_BIAS]; N_ENT_LEVELS] {
    [std::array::from_fn(|k| k as f64 / (N_BIAS - 1) as f64); N_ENT_LEVELS]
}

pub fn make_epd_prior(kind: EpdPriorKind) -> EpdPrior {
    let (p_own, p_opp) = kind.success_probs();
    let own = binomial_marginal(p_own);
    let opp = binomial_marginal(p_opp);
    let mut w = vec![0.0; N_CELLS];
    for g in 0..N_ENT_LEVELS {
        for j in 0..N_ENT_LEVELS {
            for k in 0..N_BIAS {
                w[cell(g, j, k)] = own[g] * opp[j] / N_BIAS as f64;
            }
        }
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    EpdPrior { w, bias: grid_biases() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpdPriorSnapshot {
    pub shape: Vec<usize>,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl EpdPrior {
    /// Weights indexed `(g * 11 + j) * 11 + k`; biases indexed `j * 11 + k`.
    pub fn from_parts(w: Vec<f64>, biases: &[f64]) -> Result<Self> {
        if w.len() != N_CELLS || biases.len() != N_ENT_LEVELS * N_BIAS {
            return Err(Error::InvalidConfig(format!(
                "prisoner prior needs {N_CELLS} weights and {} biases",
                N_ENT_LEVELS * N_BIAS
            )));
        }
        if let Some(i) = w.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidWeight(i));
        }
        let mut bias = [[0.0; N_BIAS]; N_ENT_LEVELS];
        for (i, &b) in biases.iter().enumerate() {
            crate::error::check_range("bias", b, 0.0, 1.0)?;
            bias[i / N_BIAS][i % N_BIAS] = b;
        }
        let prior = Self { w, bias };
        prior.check_normalized()?;
        Ok(prior)
    }

    /// All mass on one (g, j, k) cell with the given bias value there.
    pub fn point_mass(g: usize, j: usize, bias: f64) -> Result<Self> {
        crate::error::check_range("bias", bias, 0.0, 1.0)?;
        let mut w = vec![0.0; N_CELLS];
        w[cell(g, j, 0)] = 1.0;
        let mut biases = grid_biases();
        biases[j][0] = bias;
        Ok(Self { w, bias: biases })
    }

    pub fn weight(&self, g: usize, j: usize, k: usize) -> f64 {
        self.w[cell(g, j, k)]
    }

    pub fn bias(&self, j: usize, k: usize) -> f64 {
        self.bias[j][k]
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

    pub fn own_ent_marginal(&self) -> [f64; N_ENT_LEVELS] {
        std::array::from_fn(|g| self.w[cell(g, 0, 0)..cell(g + 1, 0, 0)].iter().sum())
    }

    pub fn opp_ent_marginal(&self) -> [f64; N_ENT_LEVELS] {
        let m = self.opp_marginal();
        std::array::from_fn(|j| m[j].iter().sum())
    }

    /// Weight of each opponent hypothesis (j, k), summed over own levels.
    pub fn opp_marginal(&self) -> [[f64; N_BIAS]; N_ENT_LEVELS] {
        let mut m = [[0.0; N_BIAS]; N_ENT_LEVELS];
        for g in 0..N_ENT_LEVELS {
            for (j, row) in m.iter_mut().enumerate() {
                for (k, v) in row.iter_mut().enumerate() {
                    *v += self.w[cell(g, j, k)];
                }
            }
        }
        m
    }

    pub fn snapshot(&self) -> EpdPriorSnapshot {
        EpdPriorSnapshot {
            shape: vec![N_ENT_LEVELS, N_ENT_LEVELS, N_BIAS],
            weights: self.w.clone(),
            biases: self.bias.iter().flatten().copied().collect(),
        }
    }
}

/// Probability that the opponent plays D, with tied hypotheses counting ½.
pub fn predict_opponent(prior: &EpdPrior, model: &EpdModel) -> Result<f64> {
    prior.check_normalized()?;
    let m = prior.opp_marginal();
    let mut p = 0.0;
    for (j, row) in m.iter().enumerate() {
        for (k, w) in row.iter().enumerate() {
            p += w * model.opponent_choice(j, prior.bias[j][k]).prob_d();
        }
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Expected payoff of each own action, indexed by [`EpdAction::index`].
pub fn epd_expected_utilities(prior: &EpdPrior, model: &EpdModel) -> Result<[f64; 2]> {
    prior.check_normalized()?;
    let mut eu = [0.0; 2];
    for j in 0..N_ENT_LEVELS {
        for k in 0..N_BIAS {
            let mix = model.opponent_choice(j, prior.bias[j][k]).mixture();
            for g in 0..N_ENT_LEVELS {
                let w = prior.w[cell(g, j, k)];
                if w == 0.0 {
                    continue;
                }
                for me in EpdAction::ALL {
                    let v: f64 = mix.iter().map(|&(opp, p)| p * model.expected_pay(g, me, opp)).sum();
                    eu[me.index()] += w * v;
                }
            }
        }
    }
    Ok(eu)
}

pub fn choose_epd_action(prior: &EpdPrior, model: &EpdModel, rng: &mut StreamRng) -> Result<EpdAction> {
    let [q, d] = epd_expected_utilities(prior, model)?;
    let scale = q.abs().max(d.abs()).max(f64::MIN_POSITIVE);
    Ok(if (d - q).abs() <= TIE_TOL * scale {
        EpdAction::ALL[rng.below(2)]
    } else if d > q {
        EpdAction::D
    } else {
        EpdAction::Q
    })
}

/// Bias the hypothesized opponent would hold after seeing `outcome`
/// (index in my frame) having played `opp` at level `j`.
fn transport_bias(model: &EpdModel, j: usize, opp: EpdAction, bias: f64, outcome: usize) -> f64 {
    let if_d = bias * model.outcome_probs(j, EpdAction::D, opp)[outcome];
    let if_q = (1.0 - bias) * model.outcome_probs(j, EpdAction::Q, opp)[outcome];
    let denom = if_d + if_q;
    if denom > 0.0 {
        (if_d / denom).clamp(0.0, 1.0)
    } else {
        bias
    }
}

/// How a prisoner's weights respond to an outcome. In both modes each
/// opponent hypothesis' bias is transported as that opponent's own Bayes
/// update would move it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EpdUpdate {
    /// Only the own-entanglement beliefs are reweighted, using the outcome
    /// likelihood averaged over the opponent hypotheses held at each level.
    /// Opponent hypotheses keep their conditional weights.
    #[default]
    Separate,
    /// Every (g, j, k) cell is reweighted by the likelihood under the
    /// opponent action that hypothesis predicts.
    Joint,
}

impl EpdUpdate {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "separate" => Ok(EpdUpdate::Separate),
            "joint" => Ok(EpdUpdate::Joint),
            _ => Err(Error::UnknownName {
                kind: "prisoner update",
                name: s.to_string(),
                expected: "separate, joint".to_string(),
            }),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EpdUpdate::Separate => "separate",
            EpdUpdate::Joint => "joint",
        }
    }
}

pub fn update_epd(prior: &EpdPrior, model: &EpdModel, own_action: EpdAction, my_bit: u8, opp_bit: u8) -> Result<EpdPrior> {
    let mut post = prior.clone();
    update_epd_in_place(&mut post, model, own_action, my_bit, opp_bit)?;
    Ok(post)
}

/// [`update_epd_with`] in the default mode, in place.
pub fn update_epd_in_place(
    prior: &mut EpdPrior,
    model: &EpdModel,
    own_action: EpdAction,
    my_bit: u8,
    opp_bit: u8,
) -> Result<()> {
    update_epd_in_place_with(prior, model, EpdUpdate::default(), own_action, my_bit, opp_bit)
}

pub fn update_epd_with(
    prior: &EpdPrior,
    model: &EpdModel,
    mode: EpdUpdate,
    own_action: EpdAction,
    my_bit: u8,
    opp_bit: u8,
) -> Result<EpdPrior> {
    let mut post = prior.clone();
    update_epd_in_place_with(&mut post, model, mode, own_action, my_bit, opp_bit)?;
    Ok(post)
}

pub fn update_epd_in_place_with(
    prior: &mut EpdPrior,
    model: &EpdModel,
    mode: EpdUpdate,
    own_action: EpdAction,
    my_bit: u8,
    opp_bit: u8,
) -> Result<()> {
    prior.check_normalized()?;
    check_bit(my_bit)?;
    check_bit(opp_bit)?;
    let outcome = 2 * my_bit as usize + opp_bit as usize;
    // like[cell] = P(outcome | g, opponent hypothesis (j, k)); w_like = w * like.
    let mut w_like = vec![0.0; N_CELLS];
    let mut new_bias = prior.bias;
    for j in 0..N_ENT_LEVELS {
        for k in 0..N_BIAS {
            let bias = prior.bias[j][k];
            let choice = model.opponent_choice(j, bias);
            let mix = choice.mixture();
            for g in 0..N_ENT_LEVELS {
                let like: f64 = mix
                    .iter()
                    .map(|&(opp, p)| p * model.outcome_probs(g, own_action, opp)[outcome])
                    .sum();
                let i = cell(g, j, k);
                w_like[i] = prior.w[i] * like;
            }
            new_bias[j][k] = match choice {
                OppChoice::D => transport_bias(model, j, EpdAction::D, bias, outcome),
                OppChoice::Q => transport_bias(model, j, EpdAction::Q, bias, outcome),
                OppChoice::Tie => {
                    0.5 * (transport_bias(model, j, EpdAction::D, bias, outcome)
                        + transport_bias(model, j, EpdAction::Q, bias, outcome))
                }
            };
        }
    }
    match mode {
        EpdUpdate::Joint => prior.w = w_like,
        EpdUpdate::Separate => {
            // Scale each own level g by sum_jk w*like / sum_jk w, which leaves
            // the (j, k) conditional at that level untouched.
            for g in 0..N_ENT_LEVELS {
                let range = cell(g, 0, 0)..cell(g + 1, 0, 0);
                let mass: f64 = prior.w[range.clone()].iter().sum();
                if mass == 0.0 {
                    continue;
                }
                let like = w_like[range.clone()].iter().sum::<f64>() / mass;
                prior.w[range].iter_mut().for_each(|v| *v *= like);
            }
        }
    }
    let total: f64 = prior.w.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::ZeroPosterior);
    }
    let inv = 1.0 / total;
    prior.w.iter_mut().for_each(|v| *v *= inv);
    prior.bias = new_bias;
    Ok(())
}

pub fn epd_entanglement_expectation(prior: &EpdPrior, ents: &EntGrid) -> f64 {
    prior
        .own_ent_marginal()
        .iter()
        .zip(ents.levels())
        .map(|(w, l)| w * l.ebits)
        .sum()
}
