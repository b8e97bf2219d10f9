//! Analytic anchor values, each computed both from the simulation kernel
//! and from its closed form.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, SQRT_2};
use std::fmt;

use serde::Serialize;

use crate::chsh::example::worked_round;
use crate::chsh::game::{build_win_table, joint_win_prob, max_joint_win, Action, ActionGrid, Strategy};
use crate::epd::game::thresholds;
use crate::error::Result;
use crate::qcore::{ebits_of_gamma, EntGrid};

pub const EPS: f64 = 0.1;

pub fn classical_floored_formula(eps: f64) -> f64 {
    0.5 + (1.0 - eps).powi(2) / 4.0
}

pub fn tsirelson_floored_formula(eps: f64) -> f64 {
    0.5 + SQRT_2 * (1.0 - eps).powi(2) / 4.0
}

pub fn pi3_example_formula() -> f64 {
    0.5 + (3f64.sqrt() + 6f64.sqrt()) / 16.0
}

/// Z, X for Alice against (X+Z)/√2, (Z−X)/√2 for Bob.
pub fn tsirelson_strategies() -> (Strategy, Strategy) {
    let act = |t, p| Action::new(t, p).unwrap();
    (Strategy::new(act(0, 0), act(4, 0)), Strategy::new(act(2, 0), act(2, 8)))
}

/// Alice X, Y; Bob X, (X+Y)/√2.
pub fn pi3_strategies() -> (Strategy, Strategy) {
    let act = |t, p| Action::new(t, p).unwrap();
    (Strategy::new(act(4, 0), act(4, 4)), Strategy::new(act(4, 0), act(4, 2)))
}

#[derive(Debug, Clone, Serialize)]
pub struct Anchors {
    pub eps: f64,
    pub classical_optimum: f64,
    pub classical_optimum_floored: f64,
    pub classical_floored_formula: f64,
    pub quantum_optimum: f64,
    pub quantum_optimum_floored: f64,
    pub quantum_floored_formula: f64,
    pub quantum_grid_optimum_floored: f64,
    pub pi3_example: f64,
    pub pi3_formula: f64,
    pub threshold_low_ebits: f64,
    pub threshold_high_ebits: f64,
    pub threshold_low_arcsin_ebits: f64,
    pub threshold_high_arcsin_ebits: f64,
    pub example_iteration_win: [f64; 3],
    pub example_joint_win: f64,
    pub example_alice_max_posterior: f64,
    pub example_bob_max_posterior: f64,
    pub example_alice_next: f64,
    pub example_bob_next: f64,
}

impl Anchors {
    pub fn compute() -> Result<Self> {
        let grid = ActionGrid::standard();
        let ents = EntGrid::standard();
        let exact = build_win_table(&grid, &ents, 0.0)?;
        let floored = build_win_table(&grid, &ents, EPS)?;
        let (alice, bob) = tsirelson_strategies();
        let (a3, b3) = pi3_strategies();
        let (low, high) = thresholds();
        let example = worked_round(&floored)?;
        Ok(Self {
            eps: EPS,
            classical_optimum: max_joint_win(&exact, 0).0,
            classical_optimum_floored: max_joint_win(&floored, 0).0,
            classical_floored_formula: classical_floored_formula(EPS),
            quantum_optimum: joint_win_prob(&alice, &bob, FRAC_PI_2, 0.0)?,
            quantum_optimum_floored: joint_win_prob(&alice, &bob, FRAC_PI_2, EPS)?,
            quantum_floored_formula: tsirelson_floored_formula(EPS),
            quantum_grid_optimum_floored: max_joint_win(&floored, ents.len() - 1).0,
            pi3_example: joint_win_prob(&a3, &b3, FRAC_PI_3, 0.0)?,
            pi3_formula: pi3_example_formula(),
            threshold_low_ebits: low,
            threshold_high_ebits: high,
            threshold_low_arcsin_ebits: ebits_of_gamma(0.2f64.sqrt().asin())?,
            threshold_high_arcsin_ebits: ebits_of_gamma(0.4f64.sqrt().asin())?,
            example_iteration_win: example.iteration_win,
            example_joint_win: example.joint_win,
            example_alice_max_posterior: example.alice_mode.max_weight,
            example_bob_max_posterior: example.bob_mode.max_weight,
            example_alice_next: example.alice_next,
            example_bob_next: example.bob_next,
        })
    }
}

impl fmt::Display for Anchors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CHSH optima (eps = {})", self.eps)?;
        writeln!(f, "  classical, no floor          {:.6}", self.classical_optimum)?;
        writeln!(f, "  classical, floored           {:.6}", self.classical_optimum_floored)?;
        writeln!(f, "  quantum, no floor            {:.6}", self.quantum_optimum)?;
        writeln!(f, "  quantum, floored             {:.6}", self.quantum_optimum_floored)?;
        writeln!(f, "  quantum grid best, floored   {:.6}", self.quantum_grid_optimum_floored)?;
        writeln!(f, "  pi/3 state example           {:.6}", self.pi3_example)?;
        writeln!(f, "Prisoners' dilemma dominance thresholds")?;
        writeln!(f, "  D dominant below             {:.6} ebits", self.threshold_low_ebits)?;
        writeln!(f, "  Q dominant above             {:.6} ebits", self.threshold_high_ebits)?;
        writeln!(f, "Opening round from uniform priors")?;
        let [p1, p2, p3] = self.example_iteration_win;
        writeln!(f, "  iteration win probabilities  {p1:.4} {p2:.4} {p3:.4}")?;
        writeln!(f, "  joint win probability        {:.4}", self.example_joint_win)?;
        writeln!(
            f,
            "  max posterior action weight  {:.4} (Alice) {:.4} (Bob)",
            self.example_alice_max_posterior, self.example_bob_max_posterior
        )?;
        write!(
            f,
            "  round-two expectation        {:.4} (Alice) {:.4} (Bob)",
            self.example_alice_next, self.example_bob_next
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn anchors_agree_with_closed_forms() {
        let a = Anchors::compute().unwrap();
        assert_abs_diff_eq!(a.classical_optimum, 0.75, epsilon = 1e-9);
        assert_abs_diff_eq!(a.classical_optimum_floored, 0.7025, epsilon = 1e-9);
        assert_abs_diff_eq!(a.classical_optimum_floored, a.classical_floored_formula, epsilon = 1e-9);
        assert_abs_diff_eq!(a.quantum_optimum, 0.5 + SQRT_2 / 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(a.quantum_optimum_floored, a.quantum_floored_formula, epsilon = 1e-9);
        assert_abs_diff_eq!(a.quantum_optimum_floored, 0.786378, epsilon = 1e-6);
        assert_abs_diff_eq!(a.quantum_grid_optimum_floored, a.quantum_floored_formula, epsilon = 1e-9);
        assert_abs_diff_eq!(a.pi3_example, a.pi3_formula, epsilon = 1e-9);
        assert_abs_diff_eq!(a.pi3_example, 0.761, epsilon = 5e-4);
        assert_abs_diff_eq!(a.threshold_low_ebits, a.threshold_low_arcsin_ebits, epsilon = 1e-9);
        assert_abs_diff_eq!(a.threshold_high_ebits, a.threshold_high_arcsin_ebits, epsilon = 1e-9);
        let text = a.to_string();
        assert!(text.contains("0.702500") && text.contains("0.786378"));
    }
}
