mod common;

use std::path::Path;
use std::process::{Command, Output};

use chess_style::learn::StyleProfile;
use common::random_game;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chess-style")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Ten 74-ply games between Alpha and Beta, alternating colors.
fn write_corpus(path: &Path) {
    let text: String = (0..10)
        .map(|i| if i % 2 == 0 { random_game("Alpha", "Beta", 74, i) } else { random_game("Beta", "Alpha", 74, i) })
        .map(|g| g.to_pgn())
        .collect();
    std::fs::write(path, text).unwrap();
}

fn train(dir: &Path, pgn: &Path, player: &str) -> Output {
    cli(&["train", "--pgn", pgn.to_str().unwrap(), "--player", player, "--depth", "1", "--seed", "3", "--out", dir.to_str().unwrap()])
}

#[test]
fn perft_command() {
    let o = cli(&["perft", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "8902");
    assert_eq!(stdout(&cli(&["perft", "0"])).trim(), "1");
    let kiwipete = common::TACTICAL_FENS[0];
    assert_eq!(stdout(&cli(&["perft", "2", "--fen", kiwipete])).trim(), "2039");
    let bad = cli(&["perft", "2", "--fen", "not a fen"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("bad FEN"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cli(&["perft"]).status.code(), Some(2));
}

#[test]
fn train_writes_a_profile_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let pgn = dir.path().join("games.pgn");
    write_corpus(&pgn);
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    assert!(train(&first, &pgn, "Alpha").status.success());
    assert!(train(&second, &pgn, "Alpha").status.success());

    let profile = StyleProfile::load(first.join("Alpha.profile")).unwrap();
    assert_eq!(profile.weights.as_slice().len(), 140);
    assert_eq!(profile.weights[0], 1.0);
    assert_eq!(profile.training.games, 10);
    for name in ["Alpha.profile", "Alpha_mae.csv"] {
        assert_eq!(std::fs::read(first.join(name)).unwrap(), std::fs::read(second.join(name)).unwrap(), "{name}");
    }
    let csv = std::fs::read_to_string(first.join("Alpha_mae.csv")).unwrap();
    assert!(csv.starts_with("# seed=3 "));
    assert_eq!(csv.lines().count(), 2 + 10);
}

#[test]
fn failed_runs_leave_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let missing = dir.path().join("missing.pgn");
    let o = train(&out, &missing, "Alpha");
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists() || std::fs::read_dir(&out).unwrap().next().is_none());

    let pgn = dir.path().join("games.pgn");
    write_corpus(&pgn);
    assert_eq!(train(&out, &pgn, "Nobody").status.code(), Some(1));
    assert!(!out.join("Nobody.profile").exists());
}

#[test]
fn classify_and_diff_commands() {
    let dir = tempfile::tempdir().unwrap();
    let pgn = dir.path().join("games.pgn");
    write_corpus(&pgn);
    let out = dir.path().to_str().unwrap();
    let alpha = StyleProfile::new("Alpha", chess_style::eval::FeatureVector::uniform());
    let beta = StyleProfile { player_name: "Beta".into(), ..alpha.clone() };
    std::fs::write(dir.path().join("a.profile"), alpha.to_toml()).unwrap();
    std::fs::write(dir.path().join("b.profile"), beta.to_toml()).unwrap();
    let a = dir.path().join("a.profile");
    let b = dir.path().join("b.profile");

    let o = cli(&[
        "classify", "--pgn", pgn.to_str().unwrap(), "--subject", a.to_str().unwrap(), "--opponent", b.to_str().unwrap(),
        "--depth", "1", "--out", out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sweep = std::fs::read_to_string(dir.path().join("sweep_Alpha_vs_Beta.csv")).unwrap();
    let rows: Vec<&str> = sweep.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r.split(',').nth(2) == Some("0") && r.split(',').nth(3) == Some("0")), "{sweep}");
    assert!(dir.path().join("matchup_Alpha_vs_Beta.csv").exists());
    assert!(dir.path().join("summary_Alpha_vs_Beta.txt").exists());

    let mut w = [1.0; 140];
    w[17] = 1.5;
    let shifted = StyleProfile::new("Beta", chess_style::eval::FeatureVector::new(w).unwrap());
    std::fs::write(&b, shifted.to_toml()).unwrap();
    let o = cli(&["diff-profiles", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 140);
    assert!(rows[0].starts_with("17,") && rows[0].ends_with(",-0.5"), "{}", rows[0]);
    assert!(rows[1..].iter().all(|r| r.ends_with(",0")));

    let foreign = StyleProfile { catalogue_hash: "f".repeat(64), ..shifted };
    std::fs::write(&b, foreign.to_toml()).unwrap();
    assert_eq!(cli(&["diff-profiles", a.to_str().unwrap(), b.to_str().unwrap()]).status.code(), Some(1));
    let o = cli(&["classify", "--pgn", pgn.to_str().unwrap(), "--subject", a.to_str().unwrap(), "--opponent", b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let pgn = dir.path().join("games.pgn");
    write_corpus(&pgn);
    let out = dir.path().join("out");
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        format!("seed = 3\nplayer = \"Beta\"\npgn = [{:?}]\nout = {:?}\n\n[learner.search]\ndepth = 1\n", pgn, out),
    )
    .unwrap();
    let o = cli(&["train", "--config", config.to_str().unwrap(), "--games", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(StyleProfile::load(out.join("Beta.profile")).unwrap().training.games, 4);

    std::fs::write(&config, "unknown_key = 1\n").unwrap();
    assert_eq!(cli(&["train", "--config", config.to_str().unwrap()]).status.code(), Some(1));
}
