//! `rrx`: one subcommand per experiment family.
//!
//! Argument parsing produces an [`ExperimentConfig`], which is echoed to
//! stderr, can be saved and replayed, and fully determines the output bytes.
//! All numerics live in the `rearrangement` crate.

pub mod descriptor;
pub mod output;
pub mod resolve;
mod run;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub use descriptor::Descriptor;
pub use output::{emit_trajectory, trajectory_csv, Format};
pub use run::{run, Summary};

use rearrangement::Tolerances;

pub const OUT_DIR_ENV: &str = "RRX_OUT_DIR";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

const GRAMMAR: &str = "\
DESCRIPTORS
  Series, permutations, sets and sampling schedules are written kind:key=val,...
  Lists inside a value use ';'. Keys print sorted in the canonical form.

  series:   alt-harmonic | harmonic | zero | alt-power:alpha=A | power:alpha=A
            signed-blocks:set=odd|even|list[,blocks=1;3] | signed-blocks:real=R,depth=D
            file:path=P[,tail=none|zero|alt-harmonic|harmonic]
  perm:     identity | table:values=2;0;1
            flip:width=W | flip:cuts=0;2;5,tail=T | flip:seed=S,max=W | flip:stride=S[,mul=2,add=2]
            riemann:target=T[,prefix=..][,series=..]
            riemann-infinity[:sign=plus|minus][,prefix=..] | riemann-oscillate:lo=L,hi=H
            shuffle:beta=B[,c=1][,b=evens] | shuffle:a=evens|odds[,b=evens|odds]
  set:      evens | odds | progression:offset=O,step=S | excess:beta=B,c=C | orbit[:mul=2,add=2]
  blocks:   odd | even | empty | list:blocks=1;3 | adset:real=R,depth=D
  sampling: geometric[:dense=100,per-decade=40] | every:k=K | explicit:at=1;10;100

OUTPUT
  Written to --out, else $RRX_OUT_DIR/<subcommand>.<csv|json>, else ./<subcommand>.<csv|json>.
  One summary line on stdout: verdict=<..> final=<..> horizon=<..> [key=value ...].
  Exit status: 0 success (an undetermined verdict is a success), 1 runtime error, 2 usage error.";

#[derive(Parser, Debug)]
#[command(name = "rrx", version, about = "Rearrangement experiments on conditionally convergent series", after_help = GRAMMAR)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Sampling schedule descriptor [default: geometric:dense=100,per-decade=40].
    #[arg(long, global = true)]
    pub sampling: Option<Descriptor>,
    /// Seed for every random choice [default: 0].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Relative settling tolerance for classification [default: 1e-3].
    #[arg(long, global = true)]
    pub tol_settle: Option<f64>,
    /// Trailing samples examined by classification [default: 20].
    #[arg(long, global = true)]
    pub tol_window: Option<usize>,
    /// Divergence threshold for classification [default: 10].
    #[arg(long, global = true)]
    pub tol_blowup: Option<f64>,
    /// Minimal limsup − liminf gap for oscillation [default: 0.1].
    #[arg(long, global = true)]
    pub tol_gap: Option<f64>,
    /// Run a saved configuration instead of a subcommand.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Save the canonical configuration before running.
    #[arg(long, global = true)]
    pub save_config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SignArg {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ConfineMethod {
    /// Brute force when the batch is small enough, greedy otherwise.
    Auto,
    Bruteforce,
    Greedy,
}

fn desc(s: &str) -> Descriptor {
    s.parse().expect("valid built-in descriptor")
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Greedy rearrangement toward a finite target.
    Rearrange {
        #[arg(long, default_value = "alt-harmonic")]
        series: Descriptor,
        #[arg(long, allow_hyphen_values = true)]
        target: f64,
        /// Indices emitted first, comma-separated.
        #[arg(long, value_delimiter = ',')]
        prefix: Vec<usize>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        horizon: u64,
    },
    /// Greedy rearrangement swinging between two levels.
    Oscillate {
        #[arg(long, default_value = "alt-harmonic")]
        series: Descriptor,
        #[arg(long, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        horizon: u64,
    },
    /// Rearrangement diverging to +∞ or −∞.
    ToInfinity {
        #[arg(long, default_value = "alt-harmonic")]
        series: Descriptor,
        #[arg(long, value_enum, default_value_t = SignArg::Plus)]
        sign: SignArg,
        #[arg(long, value_delimiter = ',')]
        prefix: Vec<usize>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        horizon: u64,
    },
    /// One shuffle applied to Σ(−1)^n/(n+1)^α and Σ(−1)^n/(n+1)^β.
    ShuffleExp {
        #[arg(long, default_value_t = 0.4)]
        alpha: f64,
        #[arg(long, default_value_t = 0.8)]
        beta: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        c: f64,
        /// Number of negative terms placed.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        negatives: u64,
    },
    /// Reorder a zero-sum vector batch (one vector per line) to keep prefix sums small.
    Confine {
        #[arg(long)]
        batch: PathBuf,
        #[arg(long, value_enum, default_value_t = ConfineMethod::Auto)]
        method: ConfineMethod,
    },
    /// Steer a vector series (one --series per coordinate) toward a target sum.
    Steer {
        #[arg(long, default_values = ["alt-harmonic", "alt-power:alpha=0.6"])]
        series: Vec<Descriptor>,
        /// Target, one comma-separated value per coordinate.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        target: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        prefix: Vec<usize>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        horizon: u64,
        /// Initial frontier width.
        #[arg(long, default_value_t = 64)]
        window: usize,
        /// Skip the pcc and kernel prechecks.
        #[arg(long)]
        no_precheck: bool,
    },
    /// Pad a series with zeros against a family of permutations.
    Pad {
        #[arg(long, default_value = "alt-harmonic")]
        series: Descriptor,
        /// Family member; repeat for more.
        #[arg(long)]
        perm: Vec<Descriptor>,
        /// Append N seeded flips; member s is flip:seed=s,max=2+5s.
        #[arg(long)]
        random_flips: Option<u64>,
        /// Place nonzero terms on the orbit of g instead, e.g. affine:mul=2,add=2.
        #[arg(long, conflicts_with_all = ["perm", "random_flips"])]
        iterate: Option<Descriptor>,
        /// Number of nonzero positions l(0..count) examined.
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(2..))]
        count: u64,
    },
    /// Count order reversals a permutation makes on a set.
    Jumble {
        #[arg(long)]
        perm: Descriptor,
        #[arg(long)]
        set: Descriptor,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        horizon: u64,
    },
    /// Sum a series along the mixed permutation built from --perm.
    Mix {
        #[arg(long)]
        perm: Descriptor,
        #[arg(long, default_value = "alt-harmonic")]
        series: Descriptor,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        horizon: u64,
    },
    /// Monte Carlo over random signs (−1)^s(n) c_n.
    SignsMc {
        /// Magnitudes c_n.
        #[arg(long, default_value = "harmonic")]
        magnitudes: Descriptor,
        #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        horizon: u64,
        /// Tail window for the oscillation measure.
        #[arg(long, default_value_t = 1000)]
        window: usize,
        #[arg(long, default_value_t = 0.01)]
        osc_tol: f64,
        #[arg(long, default_value_t = 1.5)]
        blowup: f64,
    },
    /// Random-sign harmonic series rearranged by --perm.
    Bp {
        #[arg(long)]
        perm: Descriptor,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        horizon: u64,
    },
    /// Almost-disjoint family of rational approximant sets.
    Adfam {
        /// Reals, comma-separated; decimals or sqrtN.
        #[arg(long, value_delimiter = ',', required = true)]
        reals: Vec<String>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        depth: u64,
        /// Largest pairwise intersection counted as almost disjoint.
        #[arg(long, default_value_t = 3)]
        max_shared: usize,
    },
    /// Prefix sums of a^X + a^Y for two block sets.
    PairDiv {
        #[arg(long)]
        x: Descriptor,
        #[arg(long)]
        y: Descriptor,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        horizon: u64,
        #[arg(long, default_value_t = 5.0)]
        bound: f64,
        #[arg(long, default_value_t = 3)]
        max_shared: usize,
    },
    /// The first k codes of a permutation.
    EncodePerm {
        #[arg(long)]
        perm: Descriptor,
        /// Series for the riemann kinds.
        #[arg(long, default_value = "alt-harmonic")]
        series: Descriptor,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Rearrange { .. } => "rearrange",
            Command::Oscillate { .. } => "oscillate",
            Command::ToInfinity { .. } => "to-infinity",
            Command::ShuffleExp { .. } => "shuffle-exp",
            Command::Confine { .. } => "confine",
            Command::Steer { .. } => "steer",
            Command::Pad { .. } => "pad",
            Command::Jumble { .. } => "jumble",
            Command::Mix { .. } => "mix",
            Command::SignsMc { .. } => "signs-mc",
            Command::Bp { .. } => "bp",
            Command::Adfam { .. } => "adfam",
            Command::PairDiv { .. } => "pair-div",
            Command::EncodePerm { .. } => "encode-perm",
        }
    }

    /// Counts that must be positive, for configs that bypass argument parsing.
    fn positives(&self) -> Vec<(&'static str, u64)> {
        match self {
            Command::Rearrange { horizon, .. }
            | Command::Oscillate { horizon, .. }
            | Command::ToInfinity { horizon, .. }
            | Command::Steer { horizon, .. }
            | Command::Jumble { horizon, .. }
            | Command::Mix { horizon, .. }
            | Command::Bp { horizon, .. }
            | Command::PairDiv { horizon, .. } => vec![("horizon", *horizon)],
            Command::SignsMc { horizon, trials, .. } => vec![("horizon", *horizon), ("trials", *trials)],
            Command::ShuffleExp { negatives, .. } => vec![("negatives", *negatives)],
            Command::Pad { count, .. } => vec![("count", count.saturating_sub(1))],
            Command::Adfam { depth, .. } => vec![("depth", *depth)],
            Command::EncodePerm { k, .. } => vec![("k", *k)],
            Command::Confine { .. } => vec![],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub sampling: Descriptor,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub output: PathBuf,
    pub format: Format,
}

impl ExperimentConfig {
    /// One-line JSON; equal configs give equal strings.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks everything that can be checked without running: counts,
    /// tolerances and that every descriptor resolves.
    pub fn validate(&self) -> Result<(), CliError> {
        for (what, v) in self.command.positives() {
            if v == 0 {
                return Err(CliError::Usage(format!("--{what} must be positive")));
            }
        }
        let t = &self.tolerances;
        if !(t.settle > 0.0 && t.blowup > 0.0 && t.gap >= 0.0 && t.window > 0) {
            return Err(CliError::Usage("tolerances must be positive".into()));
        }
        resolve::sampling(&self.sampling)?;
        run::plan_check(&self.command)
    }
}

/// Default output location for a subcommand.
pub fn default_output(command: &Command, format: Format) -> PathBuf {
    let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
    dir.join(format!("{}.{}", command.name(), format.extension()))
}

/// Arguments to a validated config. Clap usage errors come back as
/// `Err(Ok(clap::Error))` so `--help` and `--version` print normally.
pub fn parse_and_validate<I, T>(argv: I) -> Result<(ExperimentConfig, Option<PathBuf>), Result<clap::Error, CliError>>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(Ok)?;
    from_cli(cli).map_err(Err)
}

fn from_cli(cli: Cli) -> Result<(ExperimentConfig, Option<PathBuf>), CliError> {
    let config = match (cli.command, &cli.config) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either a subcommand or --config, not both".into())),
        (None, None) => return Err(CliError::Usage("a subcommand is required (see --help)".into())),
        (None, Some(path)) => {
            let overridden = cli.format.is_some()
                || cli.out.is_some()
                || cli.sampling.is_some()
                || cli.seed.is_some()
                || cli.tol_settle.is_some()
                || cli.tol_window.is_some()
                || cli.tol_blowup.is_some()
                || cli.tol_gap.is_some();
            if overridden {
                return Err(CliError::Usage("--config cannot be combined with other options".into()));
            }
            ExperimentConfig::load(path)?
        }
        (Some(mut command), None) => {
            if let Command::Pad { perm, random_flips: Some(n), .. } = &mut command {
                perm.extend((0..*n).map(|s| Descriptor::new("flip").with("max", 2 + 5 * s).with("seed", s)));
            }
            if let Command::Pad { random_flips, .. } = &mut command {
                *random_flips = None;
            }
            let d = Tolerances::default();
            let tolerances = Tolerances {
                settle: cli.tol_settle.unwrap_or(d.settle),
                window: cli.tol_window.unwrap_or(d.window),
                blowup: cli.tol_blowup.unwrap_or(d.blowup),
                gap: cli.tol_gap.unwrap_or(d.gap),
            };
            let format = cli.format.unwrap_or(Format::Csv);
            let output = cli.out.unwrap_or_else(|| default_output(&command, format));
            ExperimentConfig {
                sampling: cli.sampling.unwrap_or_else(|| desc("geometric:dense=100,per-decade=40")),
                seed: cli.seed.unwrap_or(0),
                tolerances,
                output,
                format,
                command,
            }
        }
    };
    config.validate()?;
    Ok((config, cli.save_config))
}

/// Whole program: parse, echo, save, run. Returns the exit status.
pub fn main_entry<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (config, save) = match parse_and_validate(argv) {
        Ok(c) => c,
        Err(Ok(e)) => {
            let _ = e.print();
            return e.exit_code();
        }
        Err(Err(e)) => {
            eprintln!("rrx: {e}");
            return e.exit_code();
        }
    };
    eprintln!("config={}", config.canonical());
    if let Some(path) = save {
        let text = serde_json::to_string_pretty(&config).expect("config serializes") + "\n";
        if let Err(e) = output::write_atomic(&path, text.as_bytes()) {
            eprintln!("rrx: {e}");
            return e.exit_code();
        }
    }
    match run(&config) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("rrx: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<ExperimentConfig, i32> {
        let argv = std::iter::once("rrx").chain(args.iter().copied());
        match parse_and_validate(argv) {
            Ok((c, _)) => Ok(c),
            Err(Ok(e)) => Err(e.exit_code()),
            Err(Err(e)) => Err(e.exit_code()),
        }
    }

    #[test]
    fn rearrange_plan_echoes_inputs() {
        let c = parse(&["rearrange", "--series", "alt-harmonic", "--target", "0.25", "--horizon", "100000", "--out", "x.csv"]).unwrap();
        assert_eq!(
            c.command,
            Command::Rearrange { series: desc("alt-harmonic"), target: 0.25, prefix: vec![], horizon: 100_000 }
        );
        assert_eq!(c.seed, 0);
        assert_eq!(c.tolerances, Tolerances::default());
    }

    #[test]
    fn mix_plan() {
        let c = parse(&["mix", "--perm", "riemann:target=0", "--series", "alt-harmonic", "--horizon", "10"]).unwrap();
        assert!(matches!(c.command, Command::Mix { .. }));
        assert_eq!(c.command.name(), "mix");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(parse(&["rearrange", "--target", "0.25", "--horizon", "0"]), Err(2));
        assert_eq!(parse(&["rearrange", "--target", "0.25", "--horizon", "10", "--bogus"]), Err(2));
        assert_eq!(parse(&["rearrange", "--series", "cauchy", "--target", "0", "--horizon", "10"]), Err(2));
        assert_eq!(parse(&["jumble", "--perm", "flip", "--set", "evens", "--horizon", "10"]), Err(2));
        assert_eq!(parse(&[]), Err(2));
    }

    #[test]
    fn negative_targets_parse() {
        let c = parse(&["rearrange", "--target", "-0.5", "--horizon", "10"]).unwrap();
        assert!(matches!(c.command, Command::Rearrange { target, .. } if target == -0.5));
    }

    #[test]
    fn random_flips_expand_into_descriptors() {
        let c = parse(&["pad", "--random-flips", "2", "--perm", "flip:width=2"]).unwrap();
        match c.command {
            Command::Pad { perm, random_flips, .. } => {
                let names: Vec<String> = perm.iter().map(|d| d.to_string()).collect();
                assert_eq!(names, ["flip:width=2", "flip:max=2,seed=0", "flip:max=7,seed=1"]);
                assert_eq!(random_flips, None);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn config_round_trips() {
        let c = parse(&["steer", "--target", "0.1,-0.2", "--horizon", "1000", "--seed", "7", "--sampling", "every:k=10"]).unwrap();
        let back = ExperimentConfig::from_json(&c.canonical()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.canonical(), c.canonical());
        let pretty = serde_json::to_string_pretty(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&pretty).unwrap(), c);
    }

    #[test]
    fn zero_horizon_in_config_file_is_refused() {
        let mut c = parse(&["bp", "--perm", "identity", "--horizon", "5"]).unwrap();
        c.command = Command::Bp { perm: desc("identity"), horizon: 0 };
        assert!(matches!(ExperimentConfig::from_json(&c.canonical()).unwrap().validate(), Err(CliError::Usage(_))));
    }
}
