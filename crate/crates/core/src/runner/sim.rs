//! Seeded execution of scenario simulations.
//!
//! Simulation `i` draws from `StreamRng::new(seed).split(i)`, which is further
//! split into referee (0), Alice (1) and Bob (2) streams. Results therefore
//! depend only on (seed, config, sim id), not on scheduling.

use rayon::prelude::*;

use super::config::{Priors, ScenarioConfig};
use super::records::{ChshRecord, EpdRecord, Records};
use crate::chsh::agent::{
    choose_strategy, entanglement_expectation, expected_round_win, make_prior, update_in_place, IterationObs,
    PriorKind,
};
use crate::chsh::game::{build_win_table, ActionGrid, OutcomeTable, WinTable};
use crate::epd::agent::{
    choose_epd_action, epd_entanglement_expectation, make_epd_prior, predict_opponent, update_epd_in_place_with,
    EpdModel, EpdPriorKind, EpdUpdate,
};
use crate::epd::game::{action_outcome_probs, EpdAction, PayoffMatrix};
use crate::error::Result;
use crate::qcore::{gamma_of_ebits, EntGrid};
use crate::rng::StreamRng;

const REFEREE: u64 = 0;
const ALICE: u64 = 1;
const BOB: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Serial,
}

fn streams(seed: u64, sim: usize) -> (StreamRng, StreamRng, StreamRng) {
    let root = StreamRng::new(seed).split(sim as u64);
    (root.split(REFEREE), root.split(ALICE), root.split(BOB))
}

fn for_each_sim<R: Send>(
    sims: usize,
    mode: Execution,
    run: impl Fn(usize) -> Result<Vec<R>> + Sync + Send,
) -> Result<Vec<R>> {
    let per_sim: Vec<Vec<R>> = match mode {
        Execution::Parallel => (0..sims).into_par_iter().map(&run).collect::<Result<_>>()?,
        Execution::Serial => (0..sims).map(&run).collect::<Result<_>>()?,
    };
    Ok(per_sim.into_iter().flatten().collect())
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Records> {
    run_scenario_with(cfg, Execution::Parallel)
}

pub fn run_scenario_with(cfg: &ScenarioConfig, mode: Execution) -> Result<Records> {
    let gamma = gamma_of_ebits(cfg.gamma_ebits)?;
    match cfg.priors {
        Priors::Chsh(pa, pb) => {
            let table = build_win_table(&ActionGrid::standard(), &EntGrid::standard(), cfg.eps)?;
            let referee = OutcomeTable::new(gamma, cfg.eps)?;
            let recs = for_each_sim(cfg.sims, mode, |sim| {
                run_chsh_sim(cfg.seed, sim, cfg.rounds, (pa, pb), &table, &referee)
            })?;
            Ok(Records::Chsh(recs))
        }
        Priors::Epd(pa, pb) => {
            let model = EpdModel::new(cfg.eps)?;
            let recs = for_each_sim(cfg.sims, mode, |sim| {
                run_epd_sim(cfg.seed, sim, cfg.rounds, (pa, pb), gamma, &model, cfg.epd_update)
            })?;
            Ok(Records::Epd(recs))
        }
    }
}

/// One CHSH simulation of `rounds` three-iteration rounds.
pub fn run_chsh_sim(
    seed: u64,
    sim: usize,
    rounds: usize,
    priors: (PriorKind, PriorKind),
    table: &WinTable,
    referee: &OutcomeTable,
) -> Result<Vec<ChshRecord>> {
    let (mut ref_rng, mut a_rng, mut b_rng) = streams(seed, sim);
    let mut alice = make_prior(priors.0);
    let mut bob = make_prior(priors.1);
    let mut out = Vec::with_capacity(rounds);
    for round in 1..=rounds {
        let sa = choose_strategy(&alice, table, &mut a_rng)?;
        let sb = choose_strategy(&bob, table, &mut b_rng)?;
        let exp_a = expected_round_win(&alice, &sa, table)?;
        let exp_b = expected_round_win(&bob, &sb, table)?;
        let ent_a = entanglement_expectation(&alice, table.ents());
        let ent_b = entanglement_expectation(&bob, table.ents());

        let mut x = [0u8; 3];
        let mut y = [0u8; 3];
        let mut won = [0u8; 3];
        let mut obs_a = Vec::with_capacity(3);
        let mut obs_b = Vec::with_capacity(3);
        for i in 0..3 {
            x[i] = ref_rng.next_bit();
            y[i] = ref_rng.next_bit();
            let outcome = referee.sample(&mut ref_rng, x[i], y[i], sa.action(x[i]), sb.action(y[i]));
            won[i] = outcome.won as u8;
            obs_a.push(IterationObs {
                own_bit: x[i],
                opp_bit: y[i],
                own_action: sa.action(x[i]),
                won: outcome.won,
            });
            obs_b.push(IterationObs {
                own_bit: y[i],
                opp_bit: x[i],
                own_action: sb.action(y[i]),
                won: outcome.won,
            });
        }
        update_in_place(&mut alice, &obs_a, table)?;
        update_in_place(&mut bob, &obs_b, table)?;

        out.push(ChshRecord {
            sim,
            round,
            winp: referee.joint_win_prob(&sa, &sb),
            exp_a,
            exp_b,
            ent_a,
            ent_b,
            x,
            y,
            won,
            actions_a: [sa.action_for_bit0.index(), sa.action_for_bit1.index()],
            actions_b: [sb.action_for_bit0.index(), sb.action_for_bit1.index()],
        });
    }
    Ok(out)
}

/// One prisoners' dilemma simulation; the warden's state has angle `gamma`.
pub fn run_epd_sim(
    seed: u64,
    sim: usize,
    rounds: usize,
    priors: (EpdPriorKind, EpdPriorKind),
    gamma: f64,
    model: &EpdModel,
    update: EpdUpdate,
) -> Result<Vec<EpdRecord>> {
    let (mut ref_rng, mut a_rng, mut b_rng) = streams(seed, sim);
    let mut alice = make_epd_prior(priors.0);
    let mut bob = make_epd_prior(priors.1);
    let payoffs = PayoffMatrix::standard();
    let mut dists = [[[0.0; 4]; 2]; 2];
    for a in EpdAction::ALL {
        for b in EpdAction::ALL {
            dists[a.index()][b.index()] = action_outcome_probs(gamma, a, b, model.eps())?;
        }
    }
    let (mut sum_a, mut sum_b) = (0.0, 0.0);
    let mut out = Vec::with_capacity(rounds);
    for round in 1..=rounds {
        let ent_a = epd_entanglement_expectation(&alice, model.ents());
        let ent_b = epd_entanglement_expectation(&bob, model.ents());
        let pred_a = predict_opponent(&alice, model)?;
        let pred_b = predict_opponent(&bob, model)?;
        let act_a = choose_epd_action(&alice, model, &mut a_rng)?;
        let act_b = choose_epd_action(&bob, model, &mut b_rng)?;

        let outcome = ref_rng.categorical(&dists[act_a.index()][act_b.index()]);
        let (out_a, out_b) = ((outcome >> 1) as u8, (outcome & 1) as u8);
        let pay_a = payoffs.pay_a_at(outcome);
        let pay_b = payoffs.pay_b_at(outcome);
        sum_a += pay_a;
        sum_b += pay_b;

        update_epd_in_place_with(&mut alice, model, update, act_a, out_a, out_b)?;
        update_epd_in_place_with(&mut bob, model, update, act_b, out_b, out_a)?;

        out.push(EpdRecord {
            sim,
            round,
            act_a,
            act_b,
            out_a,
            out_b,
            pay_a,
            pay_b,
            cum_a: sum_a / round as f64,
            cum_b: sum_b / round as f64,
            ent_a,
            ent_b,
            pred_a,
            pred_b,
        });
    }
    Ok(out)
}
