//! Fairness auditing CLI.
//!
//! Exit codes, stable across all subcommands so CI pipelines can branch on
//! them without parsing output:
//!
//! * 0 — success (for the audit subcommands: criterion satisfied);
//! * 1 — error (bad input, degenerate data, invalid flags);
//! * 2 — the audited criterion is violated.

use std::fs::File;
use std::hash::{BuildHasher, Hasher};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sepaudit_core::io as dataio;
use sepaudit_core::pairwise::{build_pairs, enumerate_pairs, estimate_comparative_rates};
use sepaudit_core::pointwise::{eod_aod, estimate_group_rates};
use sepaudit_core::power::{comparative_power, matched_pair_budget, separation_power};
use sepaudit_core::sim::{run_detection_study, Criterion, SimConfig};
use sepaudit_core::stats::{test_comparative_separation, test_separation};
use sepaudit_core::weights::{compute_weights, WeightScheme};
use sepaudit_core::{Mode, PairSet, PointSet};

mod report;
use report::*;

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_VIOLATED: u8 = 2;

#[derive(Parser)]
#[command(
    name = "sepaudit",
    version,
    about = "Statistical fairness auditing on pointwise and comparative-judgment test data"
)]
struct Cli {
    /// Two-tailed significance level for every hypothesis test.
    #[arg(long, global = true, default_value_t = 0.05)]
    alpha: f64,

    /// Output format: human-readable text or versioned JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Binary,
    Continuous,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Binary => Mode::Binary,
            ModeArg::Continuous => Mode::Continuous,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CriterionArg {
    Separation,
    Comparative,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    None,
    Reweighing,
    Fairbalance,
}

impl From<SchemeArg> for WeightScheme {
    fn from(s: SchemeArg) -> WeightScheme {
        match s {
            SchemeArg::None => WeightScheme::None,
            SchemeArg::Reweighing => WeightScheme::Reweighing,
            SchemeArg::Fairbalance => WeightScheme::FairBalance,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Test the separation criterion on a pointwise CSV (header `y,c,a`).
    Evaluate {
        /// Point CSV with binary labels and predictions.
        points: PathBuf,
    },
    /// Test the comparative-separation criterion on a pair CSV, or on pairs
    /// built from a pointwise CSV.
    EvaluatePairs {
        /// Pair CSV (`a_i,a_j,y_ij,c_ij` or `a_i,a_j,y_ij,s_i,s_j`), or a
        /// point CSV when a pairing flag is given.
        input: PathBuf,
        /// Build this many sampled pairs from a point CSV.
        #[arg(long, value_name = "N_P")]
        make_pairs: Option<u64>,
        /// Build every unordered pair of a (small) point CSV.
        #[arg(long)]
        all_pairs: bool,
        /// Seed for --make-pairs; generated and echoed when omitted.
        #[arg(long)]
        seed: Option<u64>,
        /// Label mode of the point CSV used with a pairing flag.
        #[arg(long, value_enum, default_value_t = ModeArg::Binary)]
        mode: ModeArg,
    },
    /// Analytic power of either test under a ground-truth distribution.
    Power {
        /// Distribution file (`p(c=_,y=_,a=_) = value` lines).
        distribution: PathBuf,
        /// Report separation power at this pointwise sample size.
        #[arg(long)]
        n: Option<u64>,
        /// Report comparative power at this pair sample size.
        #[arg(long)]
        np: Option<u64>,
        /// Find the smallest pair budget matching separation power at this n.
        #[arg(long, value_name = "N")]
        match_n: Option<u64>,
    },
    /// Monte Carlo detection study under a ground-truth distribution.
    Simulate {
        /// Distribution file (`p(c=_,y=_,a=_) = value` lines).
        distribution: PathBuf,
        #[arg(long, value_enum)]
        criterion: CriterionArg,
        /// Pointwise sample size per replicate (separation).
        #[arg(long)]
        n: Option<u64>,
        /// Pair sample size per replicate (comparative).
        #[arg(long)]
        np: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        replicates: u64,
        /// Seed; generated and echoed when omitted.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Emit per-point training sample weights for a preprocessing scheme.
    Weights {
        /// Point CSV with binary labels (predictions are ignored).
        points: PathBuf,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Where to write the input CSV with an added `w` column; stdout
        /// when omitted (human format only).
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run() -> Result<u8> {
    let cli = Cli::parse();
    if !(cli.alpha > 0.0 && cli.alpha < 1.0) {
        bail!(
            "--alpha must lie strictly between 0 and 1, got {}",
            cli.alpha
        );
    }
    match cli.command {
        Command::Evaluate { points } => cmd_evaluate(&points, cli.alpha, cli.format),
        Command::EvaluatePairs {
            input,
            make_pairs,
            all_pairs,
            seed,
            mode,
        } => cmd_evaluate_pairs(
            &input, make_pairs, all_pairs, seed, mode, cli.alpha, cli.format,
        ),
        Command::Power {
            distribution,
            n,
            np,
            match_n,
        } => cmd_power(&distribution, n, np, match_n, cli.alpha, cli.format),
        Command::Simulate {
            distribution,
            criterion,
            n,
            np,
            replicates,
            seed,
        } => cmd_simulate(
            &distribution,
            criterion,
            n,
            np,
            replicates,
            seed,
            cli.alpha,
            cli.format,
        ),
        Command::Weights {
            points,
            scheme,
            output,
        } => cmd_weights(&points, scheme, output.as_deref(), cli.format),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("cannot open {}", path.display()))
}

fn load_points(path: &Path, mode: Mode) -> Result<PointSet> {
    dataio::load_point_set(open(path)?, mode).with_context(|| format!("loading {}", path.display()))
}

fn fresh_seed() -> u64 {
    std::collections::hash_map::RandomState::new()
        .build_hasher()
        .finish()
}

/// Writes to stdout, dying quietly when the reader hung up (e.g. `| head`).
fn print_out(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let done = out.write_all(text.as_bytes()).and_then(|()| out.flush());
    match done {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        other => other.context("writing to stdout"),
    }
}

fn emit<T: Serialize>(format: Format, json: &T, human: String) -> Result<()> {
    match format {
        Format::Human => print_out(&human),
        Format::Json => print_out(&format!("{}\n", serde_json::to_string_pretty(json)?)),
    }
}

fn cmd_evaluate(points: &Path, alpha: f64, format: Format) -> Result<u8> {
    let set = load_points(points, Mode::Binary)?;
    let rates = estimate_group_rates(&set).context("estimating group rates")?;
    let (eod, aod) = eod_aod(&rates);
    let verdict = test_separation(&set, alpha)?;
    let rep = EvaluateReport {
        schema_version: SCHEMA_VERSION,
        command: "evaluate",
        input: points.display().to_string(),
        alpha,
        points: set.len(),
        mode: set.mode().to_string(),
        rates: rates_section(&rates),
        eod,
        aod,
        hypotheses: hypothesis_sections(&verdict),
        warnings: warning_sections(&verdict),
        violated: verdict.violated,
        verdict: verdict_word(verdict.violated),
    };
    let human = rep.human();
    emit(format, &rep, human)?;
    Ok(if verdict.violated {
        EXIT_VIOLATED
    } else {
        EXIT_OK
    })
}

fn cmd_evaluate_pairs(
    input: &Path,
    make_pairs: Option<u64>,
    all_pairs: bool,
    seed: Option<u64>,
    mode: ModeArg,
    alpha: f64,
    format: Format,
) -> Result<u8> {
    if make_pairs.is_some() && all_pairs {
        bail!("--make-pairs and --all-pairs are mutually exclusive");
    }
    if seed.is_some() && make_pairs.is_none() {
        bail!("--seed is only meaningful together with --make-pairs");
    }
    let (pair_set, pairing): (PairSet, Option<PairingSection>) = if let Some(n_p) = make_pairs {
        let set = load_points(input, mode.into())?;
        let seed = seed.unwrap_or_else(fresh_seed);
        let sp = build_pairs(&set, n_p, seed)?;
        let section = PairingSection {
            method: "sampled",
            n_p: Some(n_p),
            seed: Some(seed),
            mode: set.mode().to_string(),
        };
        (sp, Some(section))
    } else if all_pairs {
        let set = load_points(input, mode.into())?;
        let sp = enumerate_pairs(&set)?;
        let section = PairingSection {
            method: "exhaustive",
            n_p: None,
            seed: None,
            mode: set.mode().to_string(),
        };
        (sp, Some(section))
    } else {
        let sp = dataio::load_pair_set(open(input)?)
            .with_context(|| format!("loading {}", input.display()))?;
        (sp, None)
    };

    let rates = estimate_comparative_rates(&pair_set);
    let verdict = test_comparative_separation(&pair_set, alpha)?;
    let rep = EvaluatePairsReport {
        schema_version: SCHEMA_VERSION,
        command: "evaluate-pairs",
        input: input.display().to_string(),
        alpha,
        pairs: pair_set.len(),
        discarded_ties: pair_set.discarded_ties(),
        pairing,
        buckets: bucket_sections(&rates),
        hypotheses: hypothesis_sections(&verdict),
        warnings: warning_sections(&verdict),
        violated: verdict.violated,
        verdict: verdict_word(verdict.violated),
    };
    let human = rep.human();
    emit(format, &rep, human)?;
    Ok(if verdict.violated {
        EXIT_VIOLATED
    } else {
        EXIT_OK
    })
}

fn power_section(r: &sepaudit_core::power::PowerReport, size: u64) -> PowerSection {
    PowerSection {
        size,
        betas: r
            .betas
            .iter()
            .map(|(h, b)| BetaSection {
                name: h.name(),
                beta: *b,
            })
            .collect(),
        beta_composed: r.beta_composed,
        power: r.power,
        effective_counts: r
            .effective_counts
            .iter()
            .map(|(s, n)| CountSection {
                stratum: s.clone(),
                n: *n,
            })
            .collect(),
    }
}

fn cmd_power(
    distribution: &Path,
    n: Option<u64>,
    np: Option<u64>,
    match_n: Option<u64>,
    alpha: f64,
    format: Format,
) -> Result<u8> {
    if n.is_none() && np.is_none() && match_n.is_none() {
        bail!("give at least one of --n, --np, --match-n");
    }
    let d = dataio::load_distribution(open(distribution)?)
        .with_context(|| format!("loading {}", distribution.display()))?;

    let separation = n
        .map(|n| separation_power(&d, n, alpha).map(|r| power_section(&r, n)))
        .transpose()?;
    let comparative = np
        .map(|np| comparative_power(&d, np, alpha).map(|r| power_section(&r, np)))
        .transpose()?;
    let matched = match_n
        .map(|n| {
            matched_pair_budget(&d, n, alpha).map(|b| MatchSection {
                n,
                separation_power: b.separation_power,
                n_p: b.n_p,
                ratio: b.ratio,
                comparative_power: b.comparative_power,
                no_detectable_effect: b.no_detectable_effect,
            })
        })
        .transpose()?;

    let rep = PowerReport {
        schema_version: SCHEMA_VERSION,
        command: "power",
        input: distribution.display().to_string(),
        alpha,
        separation,
        comparative,
        matched,
    };
    let human = rep.human();
    emit(format, &rep, human)?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    distribution: &Path,
    criterion: CriterionArg,
    n: Option<u64>,
    np: Option<u64>,
    replicates: u64,
    seed: Option<u64>,
    alpha: f64,
    format: Format,
) -> Result<u8> {
    let d = dataio::load_distribution(open(distribution)?)
        .with_context(|| format!("loading {}", distribution.display()))?;
    let seed = seed.unwrap_or_else(fresh_seed);

    let (crit, crit_name, expected_power) = match criterion {
        CriterionArg::Separation => {
            let n = n.context("--criterion separation needs --n")?;
            (
                Criterion::Separation,
                "separation",
                separation_power(&d, n, alpha)?.power,
            )
        }
        CriterionArg::Comparative => {
            let np = np.context("--criterion comparative needs --np")?;
            (
                Criterion::Comparative,
                "comparative",
                comparative_power(&d, np, alpha)?.power,
            )
        }
    };
    let cfg = SimConfig {
        distribution: d,
        n: n.unwrap_or(0),
        n_p: np.unwrap_or(0),
        replicates,
        alpha,
        seed,
    };
    let result = run_detection_study(&cfg, crit)?;

    let rep = SimulateReport {
        schema_version: SCHEMA_VERSION,
        command: "simulate",
        input: distribution.display().to_string(),
        alpha,
        criterion: crit_name,
        n: if crit == Criterion::Separation {
            n
        } else {
            None
        },
        n_p: if crit == Criterion::Comparative {
            np
        } else {
            None
        },
        replicates,
        seed,
        expected_power,
        detection_frequency: result.detection_frequency.unwrap_or(f64::NAN),
        errored_replicates: result.errored_replicates,
    };
    let human = rep.human();
    emit(format, &rep, human)?;
    Ok(EXIT_OK)
}

fn cmd_weights(
    points: &Path,
    scheme: SchemeArg,
    output: Option<&Path>,
    format: Format,
) -> Result<u8> {
    let set = load_points(points, Mode::Binary)?;
    let table = compute_weights(&set, scheme.into())?;
    let per_point = table.per_point(&set)?;

    let mut counts = std::collections::BTreeMap::new();
    for p in set.points() {
        *counts.entry((p.a.bit(), p.y as u8)).or_insert(0u64) += 1;
    }
    let cells = table
        .entries()
        .map(|((a, y), w)| WeightCell {
            a,
            y,
            count: counts.get(&(a, y)).copied().unwrap_or(0),
            w,
        })
        .collect();

    let weighted_csv = {
        let mut buf = String::from("y,c,a,w\n");
        for (p, w) in set.points().iter().zip(&per_point) {
            buf.push_str(&format!("{},{},{},{}\n", p.y, p.c, p.a, w));
        }
        buf
    };
    let output_str = output.map(|p| p.display().to_string());
    if let Some(path) = output {
        let mut f =
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        f.write_all(weighted_csv.as_bytes())?;
    }

    let rep = WeightsReport {
        schema_version: SCHEMA_VERSION,
        command: "weights",
        input: points.display().to_string(),
        scheme: table.scheme.to_string(),
        rows: set.len(),
        weights: cells,
        output: output_str,
    };
    match (format, output) {
        // Without --output the weighted CSV itself is the stdout payload.
        (Format::Human, None) => print_out(&weighted_csv)?,
        (Format::Human, Some(_)) => print_out(&rep.human())?,
        (Format::Json, _) => emit(Format::Json, &rep, String::new())?,
    }
    Ok(EXIT_OK)
}
