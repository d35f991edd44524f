//! The `chess-style` command line: `train`, `classify`, `diff-profiles`,
//! `perft` and `synth`.
//!
//! Settings come from an optional TOML file (`--config`) with flags layered
//! on top. Every file written carries the seed, a hash of the effective
//! configuration and the feature-catalogue hash.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::board::{perft, Position};
use crate::classify::{hit_ratio, MatchupConfig};
use crate::eval::FeatureCatalogue;
use crate::learn::{config_hash, moving_average, train_corpus, LearnerConfig, StyleProfile, MAE_WINDOW};
use crate::pgn::{read_pgn_file, GameRecord};
use crate::synth::{matchup, stock_players, GameSpec, SyntheticPlayer};

/// File-level configuration; every key is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub pgn: Vec<PathBuf>,
    pub player: Option<String>,
    pub subject: Option<PathBuf>,
    pub opponent: Option<PathBuf>,
    pub learner: LearnerConfig,
    pub matchup: MatchupConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            out: PathBuf::from("."),
            pgn: Vec::new(),
            player: None,
            subject: None,
            opponent: None,
            learner: LearnerConfig::default(),
            matchup: MatchupConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

#[derive(Debug, Parser)]
#[command(name = "chess-style", version, about = "Learn and compare chess players' evaluation styles from game records")]
pub struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a style profile from one player's games.
    Train(TrainArgs),
    /// Score two profiles on games between their players.
    Classify(ClassifyArgs),
    /// Per-feature weight differences between two profiles.
    DiffProfiles(DiffArgs),
    /// Count leaf nodes of the legal move tree.
    Perft(PerftArgs),
    /// Write PGN corpora played by two synthetic players.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Search depth in ply.
    #[arg(long)]
    depth: Option<u32>,
    /// First fullmove of the position window.
    #[arg(long)]
    start_move: Option<u32>,
    /// Last fullmove of the position window.
    #[arg(long)]
    end_move: Option<u32>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    /// PGN corpus (repeatable).
    #[arg(long)]
    pgn: Vec<PathBuf>,
    /// Player to learn, as written in the White/Black tags.
    #[arg(long)]
    player: Option<String>,
    /// Maximum number of games to train on.
    #[arg(long)]
    games: Option<usize>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    common: Common,
    /// Validation PGN of games between the two players (repeatable).
    #[arg(long)]
    pgn: Vec<PathBuf>,
    /// Profile of the subject player S.
    #[arg(long)]
    subject: Option<PathBuf>,
    /// Profile of the opponent M.
    #[arg(long)]
    opponent: Option<PathBuf>,
    /// Hit threshold.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Debug, Args)]
struct DiffArgs {
    profile_a: PathBuf,
    profile_b: PathBuf,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PerftArgs {
    depth: u32,
    /// Position to count from; defaults to the starting position.
    #[arg(long)]
    fen: Option<String>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Training games per synthetic player.
    #[arg(long, default_value_t = 200)]
    games: usize,
    /// Head-to-head validation games.
    #[arg(long, default_value_t = 100)]
    validation_games: usize,
    #[arg(long, default_value_t = 1)]
    depth: u32,
}

fn effective(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    cfg.learner.rng_seed = cfg.seed;
    if let Some(d) = common.depth {
        cfg.learner.search.depth = d;
        cfg.matchup.search.depth = d;
    }
    if let Some(s) = common.start_move {
        cfg.learner.start_move = s;
        cfg.matchup.start_move = s;
        cfg.matchup.sweep_from = cfg.matchup.sweep_from.min(s);
    }
    if let Some(e) = common.end_move {
        cfg.learner.end_move = e;
        cfg.matchup.end_move = e;
    }
    Ok(cfg)
}

fn load_corpus(paths: &[PathBuf]) -> Result<Vec<GameRecord>> {
    if paths.is_empty() {
        bail!("no PGN corpus given (use --pgn or `pgn` in the config)");
    }
    let mut games = Vec::new();
    for path in paths {
        let parsed = read_pgn_file(path).with_context(|| format!("reading {}", path.display()))?;
        for d in &parsed.diagnostics {
            log::warn!("{}: {d}", path.display());
        }
        log::info!("{}: {} games, {} skipped", path.display(), parsed.games.len(), parsed.diagnostics.len());
        games.extend(parsed.games);
    }
    Ok(games)
}

/// File-name-safe form of a player name.
pub fn slug(name: &str) -> String {
    let s: String = name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    if s.is_empty() {
        "player".into()
    } else {
        s
    }
}

/// Writes all files or none: each goes to a temporary name first and is
/// renamed once every write has succeeded.
fn write_all(files: &[(PathBuf, String)]) -> Result<()> {
    let mut staged = Vec::new();
    for (path, text) in files {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        let tmp = path.with_extension("partial");
        if let Err(e) = fs::write(&tmp, text) {
            for t in &staged {
                let _ = fs::remove_file(t);
            }
            return Err(e).with_context(|| format!("writing {}", path.display()));
        }
        staged.push(tmp);
    }
    for ((path, _), tmp) in files.iter().zip(&staged) {
        fs::rename(tmp, path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn provenance(seed: u64, config: &str) -> String {
    format!("seed={seed} config_hash={config} catalogue_hash={}", FeatureCatalogue::standard_hash())
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let mut cfg = effective(&args.common)?;
    if !args.pgn.is_empty() {
        cfg.pgn = args.pgn;
    }
    if let Some(p) = args.player {
        cfg.player = Some(p);
    }
    if let Some(n) = args.games {
        cfg.learner.games_per_player = n;
    }
    cfg.learner.validate()?;
    let player = cfg.player.clone().context("no player given (use --player or `player` in the config)")?;
    let games = load_corpus(&cfg.pgn)?;
    let count = games.iter().filter(|g| g.color_of(&player).is_some()).count();
    if count == 0 {
        bail!("no game in the corpus features {player:?}");
    }

    let run = train_corpus(&games, &player, &cfg.learner)?;
    let meta = provenance(cfg.seed, &run.profile.config_hash());
    let mut csv = format!("# {meta}\ngame_index,mae,moving_avg\n");
    let ma = moving_average(&run.state.mae_history, MAE_WINDOW);
    for (i, (mae, avg)) in run.state.mae_history.iter().zip(ma).enumerate() {
        writeln!(csv, "{},{mae},{avg}", i + 1).unwrap();
    }
    let base = cfg.out.join(slug(&player));
    let profile_path = base.with_extension("profile");
    let csv_path = cfg.out.join(format!("{}_mae.csv", slug(&player)));
    write_all(&[(profile_path.clone(), run.profile.to_toml()), (csv_path.clone(), csv)])?;
    println!(
        "trained {player:?} on {} games ({} samples); wrote {} and {}",
        run.profile.training.games,
        run.profile.training.samples,
        profile_path.display(),
        csv_path.display()
    );
    Ok(())
}

fn cmd_classify(args: ClassifyArgs) -> Result<()> {
    let mut cfg = effective(&args.common)?;
    if !args.pgn.is_empty() {
        cfg.pgn = args.pgn;
    }
    if let Some(s) = args.subject {
        cfg.subject = Some(s);
    }
    if let Some(o) = args.opponent {
        cfg.opponent = Some(o);
    }
    if let Some(e) = args.epsilon {
        cfg.matchup.epsilon = e;
    }
    cfg.matchup.validate()?;
    let load = |p: &Option<PathBuf>, what: &str| -> Result<StyleProfile> {
        let p = p.as_ref().with_context(|| format!("no {what} profile given (use --{what})"))?;
        StyleProfile::load(p).with_context(|| format!("loading {}", p.display()))
    };
    let s = load(&cfg.subject, "subject")?;
    let m = load(&cfg.opponent, "opponent")?;
    crate::classify::check_catalogues(&s, &m)?;
    let games = load_corpus(&cfg.pgn)?;
    let report = hit_ratio(&games, &s, &m, &cfg.matchup)?;

    let meta = provenance(cfg.seed, &config_hash(&cfg.matchup));
    let stem = format!("{}_vs_{}", slug(&s.player_name), slug(&m.player_name));
    let summary = report.summary(&meta);
    write_all(&[
        (cfg.out.join(format!("matchup_{stem}.csv")), report.games_csv(&meta)),
        (cfg.out.join(format!("sweep_{stem}.csv")), report.sweep_csv(&meta)),
        (cfg.out.join(format!("summary_{stem}.txt")), summary.clone()),
    ])?;
    print!("{summary}");
    Ok(())
}

/// CSV of `a − b` per feature, largest magnitude first.
pub fn diff_csv(a: &StyleProfile, b: &StyleProfile) -> Result<String> {
    if a.catalogue_hash != b.catalogue_hash {
        bail!("profiles use different feature catalogues ({} vs {})", a.catalogue_hash, b.catalogue_hash);
    }
    let cat = FeatureCatalogue::standard();
    let mut rows: Vec<(usize, f64)> = (0..cat.len()).map(|i| (i, a.weights[i] - b.weights[i])).collect();
    rows.sort_by(|x, y| y.1.abs().total_cmp(&x.1.abs()).then(x.0.cmp(&y.0)));
    let mut out = format!(
        "# a={:?} seed={} config_hash={} b={:?} seed={} config_hash={} catalogue_hash={}\n",
        a.player_name,
        a.config.rng_seed,
        a.config_hash(),
        b.player_name,
        b.config.rng_seed,
        b.config_hash(),
        a.catalogue_hash
    );
    out.push_str("index,feature,weight_a,weight_b,difference\n");
    for (i, d) in rows {
        writeln!(out, "{i},{},{},{},{d}", cat.features[i].id, a.weights[i], b.weights[i]).unwrap();
    }
    Ok(out)
}

fn cmd_diff(args: DiffArgs) -> Result<()> {
    let a = StyleProfile::load(&args.profile_a).with_context(|| format!("loading {}", args.profile_a.display()))?;
    let b = StyleProfile::load(&args.profile_b).with_context(|| format!("loading {}", args.profile_b.display()))?;
    let csv = diff_csv(&a, &b)?;
    match args.out {
        Some(path) => write_all(&[(path, csv)])?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_perft(args: PerftArgs) -> Result<()> {
    let p = match &args.fen {
        Some(f) => Position::from_fen(f).with_context(|| format!("bad FEN {f:?}"))?,
        None => Position::startpos(),
    };
    println!("{}", perft(&p, args.depth));
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let (a, b) = stock_players(args.depth, crate::synth::STOCK_MARGIN);
    let sparring = SyntheticPlayer::new("Sparring", crate::eval::FeatureVector::uniform(), args.depth, crate::synth::STOCK_MARGIN);
    let spec = GameSpec::default();
    let pgn = |games: Vec<GameRecord>| games.iter().map(GameRecord::to_pgn).collect::<String>();
    let header = format!("; synthetic corpus, seed={} depth={}\n\n", args.seed, args.depth);
    let train_a = pgn(matchup(&a, &sparring, args.games, spec, args.seed));
    let train_b = pgn(matchup(&b, &sparring, args.games, spec, args.seed.wrapping_add(1)));
    let validation = pgn(matchup(&a, &b, args.validation_games, spec, args.seed.wrapping_add(2)));
    let files = [
        (args.out.join("synthetic_a.pgn"), format!("{header}{train_a}")),
        (args.out.join("synthetic_b.pgn"), format!("{header}{train_b}")),
        (args.out.join("synthetic_validation.pgn"), format!("{header}{validation}")),
    ];
    write_all(&files)?;
    for (p, _) in &files {
        println!("wrote {}", p.display());
    }
    Ok(())
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Classify(a) => cmd_classify(a),
        Command::DiffProfiles(a) => cmd_diff(a),
        Command::Perft(a) => cmd_perft(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
