//! Eisert prisoners' dilemma: payoffs, the restricted {Q, D} game,
//! dominance regions and a numerical check of the reduction to {Q, D}.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_bit, Error, Result};
use crate::qcore::{check_eps, ebits_of_gamma, eisert_unitary, epd_outcome_probs, Unitary2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EpdAction {
    Q,
    D,
}

impl EpdAction {
    pub const ALL: [EpdAction; 2] = [EpdAction::Q, EpdAction::D];

    pub fn index(self) -> usize {
        match self {
            EpdAction::Q => 0,
            EpdAction::D => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(EpdAction::Q),
            1 => Some(EpdAction::D),
            _ => None,
        }
    }

    /// Eisert parameters (θ, φ): Q = U(0, π/2) = iZ, D = U(π, π/2) = iY.
    pub fn params(self) -> (f64, f64) {
        match self {
            EpdAction::Q => (0.0, FRAC_PI_2),
            EpdAction::D => (PI, FRAC_PI_2),
        }
    }

    pub fn unitary(self) -> Unitary2 {
        let (theta, phi) = self.params();
        eisert_unitary(theta, phi).expect("Q and D parameters are in range")
    }

    pub fn symbol(self) -> &'static str {
        match self {
            EpdAction::Q => "Q",
            EpdAction::D => "D",
        }
    }
}

impl fmt::Display for EpdAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Symmetric two-player payoff matrix indexed by outcome bits
/// (0 = cooperate, 1 = defect). Player B's payoff is the transpose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    pay_a: [[f64; 2]; 2],
}

impl PayoffMatrix {
    pub fn standard() -> Self {
        Self {
            pay_a: [[3.0, 0.0], [5.0, 1.0]],
        }
    }

    /// `pay_a[a][b]` is the row player's payoff.
    pub fn symmetric(pay_a: [[f64; 2]; 2]) -> Self {
        Self { pay_a }
    }

    pub fn pay_a(&self, a: u8, b: u8) -> f64 {
        self.pay_a[a as usize][b as usize]
    }

    pub fn pay_b(&self, a: u8, b: u8) -> f64 {
        self.pay_a[b as usize][a as usize]
    }

    /// Row player's payoff for an outcome index `2a + b`.
    pub fn pay_a_at(&self, outcome: usize) -> f64 {
        self.pay_a[outcome >> 1][outcome & 1]
    }

    pub fn pay_b_at(&self, outcome: usize) -> f64 {
        self.pay_a[outcome & 1][outcome >> 1]
    }

    /// Sum of one player's entries across the four outcomes.
    pub fn total(&self) -> f64 {
        self.pay_a.iter().flatten().sum()
    }

    pub fn affine(&self, scale: f64, shift: f64) -> Self {
        Self {
            pay_a: self.pay_a.map(|row| row.map(|v| scale * v + shift)),
        }
    }

    /// Expected (payA, payB) under an outcome distribution indexed `2a + b`.
    pub fn expected(&self, probs: &[f64; 4]) -> (f64, f64) {
        probs.iter().enumerate().fold((0.0, 0.0), |(pa, pb), (o, p)| {
            (pa + p * self.pay_a_at(o), pb + p * self.pay_b_at(o))
        })
    }
}

impl Default for PayoffMatrix {
    fn default() -> Self {
        Self::standard()
    }
}

pub fn action_outcome_probs(gamma: f64, a: EpdAction, b: EpdAction, eps: f64) -> Result<[f64; 4]> {
    epd_outcome_probs(gamma, &a.unitary(), &b.unitary(), eps)
}

pub fn expected_payoffs(gamma: f64, a: EpdAction, b: EpdAction, eps: f64) -> Result<(f64, f64)> {
    Ok(PayoffMatrix::standard().expected(&action_outcome_probs(gamma, a, b, eps)?))
}

pub fn full_expected_payoffs(
    gamma: f64,
    theta_a: f64,
    phi_a: f64,
    theta_b: f64,
    phi_b: f64,
    eps: f64,
) -> Result<(f64, f64)> {
    let ua = eisert_unitary(theta_a, phi_a)?;
    let ub = eisert_unitary(theta_b, phi_b)?;
    Ok(PayoffMatrix::standard().expected(&epd_outcome_probs(gamma, &ua, &ub, eps)?))
}

/// Outcome index for a pair of measured bits.
pub fn outcome_index(a_bit: u8, b_bit: u8) -> Result<usize> {
    check_bit(a_bit)?;
    check_bit(b_bit)?;
    Ok(2 * a_bit as usize + b_bit as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DominanceRegion {
    DDominant,
    Neither,
    QDominant,
}

/// Row player's gains from switching Q → D against an opponent playing D
/// and Q respectively, without floor.
pub fn payoff_gaps(gamma: f64) -> Result<(f64, f64)> {
    let pay = |a, b| expected_payoffs(gamma, a, b, 0.0).map(|p| p.0);
    let vs_d = pay(EpdAction::D, EpdAction::D)? - pay(EpdAction::Q, EpdAction::D)?;
    let vs_q = pay(EpdAction::D, EpdAction::Q)? - pay(EpdAction::Q, EpdAction::Q)?;
    Ok((vs_d, vs_q))
}

pub fn dominance(gamma: f64) -> Result<DominanceRegion> {
    let (vs_d, vs_q) = payoff_gaps(gamma)?;
    Ok(if vs_d > 0.0 && vs_q > 0.0 {
        DominanceRegion::DDominant
    } else if vs_d < 0.0 && vs_q < 0.0 {
        DominanceRegion::QDominant
    } else {
        DominanceRegion::Neither
    })
}

fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Game-state angles where D stops being dominant and Q becomes dominant.
pub fn threshold_gammas() -> (f64, f64) {
    let low = bisect_root(|g| payoff_gaps(g).unwrap().0, 0.0, FRAC_PI_2);
    let high = bisect_root(|g| payoff_gaps(g).unwrap().1, 0.0, FRAC_PI_2);
    (low, high)
}

/// The same thresholds in ebits.
pub fn thresholds() -> (f64, f64) {
    let (low, high) = threshold_gammas();
    (ebits_of_gamma(low).unwrap(), ebits_of_gamma(high).unwrap())
}

/// Summary of a reduction sweep. The two gap fields are the largest amount
/// by which the best unrestricted choice beat the restricted one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub theta_steps: usize,
    pub phi_steps: usize,
    pub gamma_steps: usize,
    pub eps: f64,
    pub points_checked: usize,
    pub phi_max_gap: f64,
    pub boundary_max_gap: f64,
    pub passed: bool,
}

impl fmt::Display for ReductionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "reduction sweep {}x{}x{} (theta x phi x gamma), eps = {}",
            self.theta_steps, self.phi_steps, self.gamma_steps, self.eps
        )?;
        writeln!(f, "  points checked:                    {}", self.points_checked)?;
        writeln!(f, "  phi = pi/2 optimal, max gap:       {:.3e}", self.phi_max_gap)?;
        writeln!(f, "  theta in {{0, pi}} extremal, max gap: {:.3e}", self.boundary_max_gap)?;
        write!(f, "  result: {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

const REDUCTION_TOL: f64 = 1e-9;

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Sweeps θ ∈ [0, π], φ ∈ [0, π/2] and γ ∈ [0, π/2] on uniform grids and checks,
/// for both seats:
///
/// 1. against every opponent (θ, φ), the player's best payoff over the full
///    (θ, φ) grid is reached with φ = π/2;
/// 2. with both players at φ = π/2, the max and min over θ are reached at
///    θ ∈ {0, π}.
///
/// The grids include the endpoints, so both claims are exact grid
/// comparisons. Isolated ties count as passing.
pub fn verify_reduction(theta_steps: usize, phi_steps: usize, gamma_steps: usize, eps: f64) -> Result<ReductionReport> {
    for (name, n) in [("theta_steps", theta_steps), ("phi_steps", phi_steps), ("gamma_steps", gamma_steps)] {
        if n < 9 {
            return Err(Error::InvalidConfig(format!("{name} must be at least 9, got {n}")));
        }
    }
    check_eps(eps)?;
    let thetas = linspace(0.0, PI, theta_steps);
    let phis = linspace(0.0, FRAC_PI_2, phi_steps);
    let gammas = linspace(0.0, FRAC_PI_2, gamma_steps);
    let unitaries: Vec<Vec<Unitary2>> = thetas
        .iter()
        .map(|&t| phis.iter().map(|&p| eisert_unitary(t, p)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let last_phi = phi_steps - 1;
    let last_theta = theta_steps - 1;
    let payoffs = PayoffMatrix::standard();
    // Payoff to the seat under test: seat 0 plays `own` as A, seat 1 as B.
    let pay = |g: f64, seat: usize, own: &Unitary2, opp: &Unitary2| -> Result<f64> {
        Ok(if seat == 0 {
            payoffs.expected(&epd_outcome_probs(g, own, opp, eps)?).0
        } else {
            payoffs.expected(&epd_outcome_probs(g, opp, own, eps)?).1
        })
    };

    let mut phi_max_gap: f64 = 0.0;
    let mut boundary_max_gap: f64 = 0.0;
    let mut points = 0usize;
    for seat in 0..2 {
        for &g in &gammas {
            for (to, opp_row) in unitaries.iter().enumerate() {
                for (po, opp) in opp_row.iter().enumerate() {
                    let mut best_any = f64::NEG_INFINITY;
                    let mut best_half_pi = f64::NEG_INFINITY;
                    for own_row in &unitaries {
                        for (ps, own) in own_row.iter().enumerate() {
                            let v = pay(g, seat, own, opp)?;
                            best_any = best_any.max(v);
                            if ps == last_phi {
                                best_half_pi = best_half_pi.max(v);
                            }
                            points += 1;
                        }
                    }
                    let gap = best_any - best_half_pi;
                    phi_max_gap = phi_max_gap.max(gap);
                    if gap > REDUCTION_TOL {
                        return Err(Error::ReductionCounterexample {
                            check: "phi = pi/2 optimality",
                            coords: format!(
                                "seat {seat}, gamma {g:.6}, opponent theta {:.6}, phi {:.6}",
                                thetas[to], phis[po]
                            ),
                            violation: gap,
                        });
                    }
                }

                let opp = &opp_row[last_phi];
                let vals: Vec<f64> = unitaries
                    .iter()
                    .map(|own_row| pay(g, seat, &own_row[last_phi], opp))
                    .collect::<Result<_>>()?;
                let ends = [vals[0], vals[last_theta]];
                let max_all = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let min_all = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                let gap = (max_all - ends[0].max(ends[1])).max(ends[0].min(ends[1]) - min_all);
                boundary_max_gap = boundary_max_gap.max(gap);
                if gap > REDUCTION_TOL {
                    return Err(Error::ReductionCounterexample {
                        check: "theta boundary extremality",
                        coords: format!("seat {seat}, gamma {g:.6}, opponent theta {:.6}", thetas[to]),
                        violation: gap,
                    });
                }
            }
        }
    }
    Ok(ReductionReport {
        theta_steps,
        phi_steps,
        gamma_steps,
        eps,
        points_checked: points,
        phi_max_gap,
        boundary_max_gap,
        passed: true,
    })
}
