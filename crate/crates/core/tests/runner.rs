use std::f64::consts::FRAC_PI_2;

use qbgame::chsh::game::{Action, OutcomeTable, Strategy};
use qbgame::epd::game::{EpdAction, PayoffMatrix};
use qbgame::qcore::gamma_of_ebits;
use qbgame::runner::records::round9;
use qbgame::runner::{
    read_csv, read_json_lines, run_scenario, write_records, Game, OutputFormat, RawConfig, Records, ScenarioConfig,
    CHSH_HEADER, EPD_HEADER,
};

fn cfg(game: Game, scenario: &str, sims: usize, rounds: usize, seed: u64) -> ScenarioConfig {
    RawConfig {
        game: Some(game.name().into()),
        scenario: Some(scenario.into()),
        sims: Some(sims),
        rounds: Some(rounds),
        seed: Some(seed),
        ..Default::default()
    }
    .resolve()
    .unwrap()
}

fn write(records: &Records, dir: &std::path::Path, name: &str, format: OutputFormat) -> std::path::PathBuf {
    let path = dir.join(name);
    write_records(records, &path, format).unwrap();
    path
}

fn close9(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(1.0)
}

#[test]
fn same_seed_gives_byte_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    for (game, name) in [(Game::Chsh, "overcoming-bias"), (Game::Epd, "double-down")] {
        let c = cfg(game, name, 2, 20, 99);
        let a = write(&run_scenario(&c).unwrap(), dir.path(), "a.csv", OutputFormat::Csv);
        let b = write(&run_scenario(&c).unwrap(), dir.path(), "b.csv", OutputFormat::Csv);
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        let other = write(
            &run_scenario(&cfg(game, name, 2, 20, 100)).unwrap(),
            dir.path(),
            "c.csv",
            OutputFormat::Csv,
        );
        assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&other).unwrap());
    }
}

#[test]
fn csv_headers_are_fixed() {
    let dir = tempfile::tempdir().unwrap();
    let chsh = write(&run_scenario(&cfg(Game::Chsh, "good-enough", 1, 2, 1)).unwrap(), dir.path(), "c.csv", OutputFormat::Csv);
    let epd = write(&run_scenario(&cfg(Game::Epd, "faith-alone", 1, 2, 1)).unwrap(), dir.path(), "e.csv", OutputFormat::Csv);
    let first = |p| std::fs::read_to_string(p).unwrap().lines().next().unwrap().to_string();
    assert_eq!(first(&chsh), "sim,round,winp,expA,expB,entA,entB,xa1,xa2,xa3,yb1,yb2,yb3,w1,w2,w3,aA0,aA1,aB0,aB1");
    assert_eq!(first(&epd), "sim,round,actA,actB,o1,o2,payA,payB,cumA,cumB,entA,entB,predA,predB");
    assert_eq!(first(&chsh), CHSH_HEADER.join(","));
    assert_eq!(first(&epd), EPD_HEADER.join(","));
}

#[test]
fn csv_and_json_lines_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (game, name) in [(Game::Chsh, "making-do"), (Game::Epd, "fools-gold")] {
        let recs = run_scenario(&cfg(game, name, 2, 15, 5)).unwrap();
        let csv = read_csv(&write(&recs, dir.path(), "r.csv", OutputFormat::Csv)).unwrap();
        let jsonl = read_json_lines(&write(&recs, dir.path(), "r.jsonl", OutputFormat::JsonLines)).unwrap();
        assert_eq!(csv, jsonl);
        assert_eq!(csv.len(), recs.len());
        match (&recs, &csv) {
            (Records::Chsh(a), Records::Chsh(b)) => {
                for (x, y) in a.iter().zip(b) {
                    assert!(close9(x.winp, y.winp) && close9(x.exp_a, y.exp_a) && close9(x.ent_b, y.ent_b));
                    assert_eq!((x.x, x.y, x.won, x.actions_a, x.actions_b), (y.x, y.y, y.won, y.actions_a, y.actions_b));
                }
            }
            (Records::Epd(a), Records::Epd(b)) => {
                for (x, y) in a.iter().zip(b) {
                    assert!(close9(x.cum_a, y.cum_a) && close9(x.pred_b, y.pred_b) && close9(x.ent_a, y.ent_a));
                    assert_eq!((x.act_a, x.act_b, x.out_a, x.out_b), (y.act_a, y.act_b, y.out_a, y.out_b));
                }
            }
            _ => panic!("game changed in round trip"),
        }
    }
}

#[test]
fn logged_chsh_rows_reproduce_win_probability() {
    let c = cfg(Game::Chsh, "finding-advantage", 2, 50, 3);
    let dir = tempfile::tempdir().unwrap();
    let Records::Chsh(rows) = read_csv(&write(&run_scenario(&c).unwrap(), dir.path(), "f.csv", OutputFormat::Csv)).unwrap()
    else {
        panic!()
    };
    let referee = OutcomeTable::new(gamma_of_ebits(c.gamma_ebits).unwrap(), c.eps).unwrap();
    assert!((referee.gamma() - FRAC_PI_2).abs() < 1e-12);
    let strat = |a: [usize; 2]| Strategy::new(Action::from_index(a[0]).unwrap(), Action::from_index(a[1]).unwrap());
    for r in rows.iter().take(100) {
        let p = referee.joint_win_prob(&strat(r.actions_a), &strat(r.actions_b));
        assert!((p - r.winp).abs() < 1e-8, "round {}: {p} vs {}", r.round, r.winp);
        assert!(r.x.iter().chain(&r.y).chain(&r.won).all(|b| *b <= 1));
    }
}

#[test]
fn logged_epd_rows_reproduce_payoffs_and_running_means() {
    let c = cfg(Game::Epd, "bohrs-horseshoe", 3, 200, 8);
    let dir = tempfile::tempdir().unwrap();
    let Records::Epd(rows) = read_csv(&write(&run_scenario(&c).unwrap(), dir.path(), "b.csv", OutputFormat::Csv)).unwrap()
    else {
        panic!()
    };
    let pay = PayoffMatrix::standard();
    let mut sums = [0.0; 2];
    for r in &rows {
        if r.round == 1 {
            sums = [0.0; 2];
        }
        let outcome = 2 * r.out_a as usize + r.out_b as usize;
        assert_eq!(r.pay_a, pay.pay_a_at(outcome));
        assert_eq!(r.pay_b, pay.pay_b_at(outcome));
        sums[0] += r.pay_a;
        sums[1] += r.pay_b;
        assert!((r.cum_a - round9(sums[0] / r.round as f64)).abs() < 1e-9);
        assert!((r.cum_b - round9(sums[1] / r.round as f64)).abs() < 1e-9);
        assert!((0.0..=1.0).contains(&r.pred_a) && (0.0..=1.0).contains(&r.ent_b));
        assert!(matches!(r.act_a, EpdAction::Q | EpdAction::D));
    }
}

#[test]
fn output_dir_env_names_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = ScenarioConfig::named(Game::Epd, "fools-gold").unwrap();
    c.seed = 42;
    std::env::set_var(qbgame::runner::OUTPUT_DIR_ENV, dir.path());
    let path = c.output_path();
    std::env::remove_var(qbgame::runner::OUTPUT_DIR_ENV);
    assert_eq!(path, dir.path().join("epd-fools-gold-seed42.csv"));
}
