//! Per-simulation summaries of scenario records.

use std::fmt;

use super::records::{ChshRecord, EpdRecord, Records};
use crate::epd::game::EpdAction;

/// Rounds included in "final window" statistics.
pub const FINAL_WINDOW: usize = 100;

fn by_sim<R>(records: &[R], sim_of: impl Fn(&R) -> usize) -> Vec<&[R]> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=records.len() {
        if i == records.len() || sim_of(&records[i]) != sim_of(&records[start]) {
            out.push(&records[start..i]);
            start = i;
        }
    }
    out
}

fn tail<R>(rows: &[R], n: usize) -> &[R] {
    &rows[rows.len().saturating_sub(n)..]
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChshSimSummary {
    pub sim: usize,
    pub rounds: usize,
    pub final_winp: f64,
    pub final_exp_a: f64,
    pub final_exp_b: f64,
    pub final_ent_a: f64,
    pub final_ent_b: f64,
    pub max_winp: f64,
}

pub fn summarize_chsh(records: &[ChshRecord]) -> Vec<ChshSimSummary> {
    by_sim(records, |r| r.sim)
        .into_iter()
        .map(|rows| {
            let t = tail(rows, FINAL_WINDOW);
            ChshSimSummary {
                sim: rows[0].sim,
                rounds: rows.len(),
                final_winp: mean(t.iter().map(|r| r.winp)),
                final_exp_a: mean(t.iter().map(|r| r.exp_a)),
                final_exp_b: mean(t.iter().map(|r| r.exp_b)),
                final_ent_a: mean(t.iter().map(|r| r.ent_a)),
                final_ent_b: mean(t.iter().map(|r| r.ent_b)),
                max_winp: rows.iter().map(|r| r.winp).fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}

/// Coarse end state of a prisoners' dilemma simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpdEnding {
    /// Both play Q in every final-window round.
    MutualQ,
    /// Both play D in every final-window round.
    MutualD,
    /// One player always Q, the other always D.
    Split,
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpdSimSummary {
    pub sim: usize,
    pub rounds: usize,
    pub ending: EpdEnding,
    /// Fraction of all rounds played (Q, Q).
    pub mutual_q_fraction: f64,
    /// Fraction of final-window rounds with outcome (0, 0).
    pub final_mutual_cooperation: f64,
    pub final_cum_a: f64,
    pub final_cum_b: f64,
    pub final_ent_a: f64,
    pub final_ent_b: f64,
    /// First round from which each player plays Q in every later round
    /// (None if the player ends on D or mixed play).
    pub settle_q_a: Option<usize>,
    pub settle_q_b: Option<usize>,
    /// First round from which both play Q for the rest of the run.
    pub switch_round: Option<usize>,
}

fn settled_from(rows: &[EpdRecord], act: impl Fn(&EpdRecord) -> bool) -> Option<usize> {
    let trailing = rows.iter().rev().take_while(|r| act(r)).count();
    (trailing > 0).then(|| rows[rows.len() - trailing].round)
}

pub fn summarize_epd(records: &[EpdRecord]) -> Vec<EpdSimSummary> {
    by_sim(records, |r| r.sim)
        .into_iter()
        .map(|rows| {
            let t = tail(rows, FINAL_WINDOW);
            let all = |f: &dyn Fn(&EpdRecord) -> bool| t.iter().all(f);
            let ending = if all(&|r| r.act_a == EpdAction::Q && r.act_b == EpdAction::Q) {
                EpdEnding::MutualQ
            } else if all(&|r| r.act_a == EpdAction::D && r.act_b == EpdAction::D) {
                EpdEnding::MutualD
            } else if all(&|r| r.act_a != r.act_b)
                && (all(&|r| r.act_a == EpdAction::Q) || all(&|r| r.act_a == EpdAction::D))
            {
                EpdEnding::Split
            } else {
                EpdEnding::Mixed
            };
            let last = rows.last().expect("nonempty group");
            EpdSimSummary {
                sim: rows[0].sim,
                rounds: rows.len(),
                ending,
                mutual_q_fraction: mean(
                    rows.iter().map(|r| (r.act_a == EpdAction::Q && r.act_b == EpdAction::Q) as u8 as f64),
                ),
                final_mutual_cooperation: mean(t.iter().map(|r| (r.out_a == 0 && r.out_b == 0) as u8 as f64)),
                final_cum_a: last.cum_a,
                final_cum_b: last.cum_b,
                final_ent_a: last.ent_a,
                final_ent_b: last.ent_b,
                settle_q_a: settled_from(rows, |r| r.act_a == EpdAction::Q),
                settle_q_b: settled_from(rows, |r| r.act_b == EpdAction::Q),
                switch_round: settled_from(rows, |r| r.act_a == EpdAction::Q && r.act_b == EpdAction::Q),
            }
        })
        .collect()
}

/// Printable per-simulation summary table.
pub struct Summary<'a>(pub &'a Records);

impl fmt::Display for Summary<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Records::Chsh(recs) => {
                writeln!(f, "sim  rounds  winp(last {FINAL_WINDOW})  expA    expB    entA    entB")?;
                for s in summarize_chsh(recs) {
                    writeln!(
                        f,
                        "{:>3}  {:>6}  {:>15.4}  {:.4}  {:.4}  {:.4}  {:.4}",
                        s.sim, s.rounds, s.final_winp, s.final_exp_a, s.final_exp_b, s.final_ent_a, s.final_ent_b
                    )?;
                }
            }
            Records::Epd(recs) => {
                writeln!(f, "sim  rounds  ending   QQ-frac  cumA    cumB    entA    entB    switch")?;
                for s in summarize_epd(recs) {
                    let switch = s.switch_round.map_or("-".to_string(), |r| r.to_string());
                    writeln!(
                        f,
                        "{:>3}  {:>6}  {:<7}  {:>7.3}  {:.4}  {:.4}  {:.4}  {:.4}  {}",
                        s.sim,
                        s.rounds,
                        format!("{:?}", s.ending),
                        s.mutual_q_fraction,
                        s.final_cum_a,
                        s.final_cum_b,
                        s.final_ent_a,
                        s.final_ent_b,
                        switch
                    )?;
                }
            }
        }
        Ok(())
    }
}
