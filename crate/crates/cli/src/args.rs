//! Command-line arguments. Every subcommand builds a [`Scenario`], so the
//! flags and the scenario document drive the same code.

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use qtcss_core::classical::AttackMethod;

use crate::report::Format;
use crate::scenario::{parse_complex, Scenario, ScenarioKind, SplitStep, Stage};

#[derive(Debug, Parser)]
#[command(
    name = "qtcss",
    version,
    about = "Threshold-changeable secret sharing scenarios"
)]
pub struct Cli {
    /// Seed for the ChaCha20 generator; overrides the seed in a scenario file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,

    /// Run a TOML scenario document instead of a subcommand.
    #[arg(long, value_name = "PATH")]
    pub scenario: Option<PathBuf>,

    /// Print the scenario as TOML instead of running it.
    #[arg(long, global = true)]
    pub emit_scenario: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bivariate-polynomial sharing over GF(p).
    #[command(subcommand)]
    Classical(ClassicalCommand),
    /// GHZ-state sharing.
    #[command(subcommand)]
    Quantum(QuantumCommand),
    /// Encode a bit on the equator and check that proper subsets learn nothing.
    HidingTest(HidingArgs),
}

#[derive(Debug, Subcommand)]
pub enum ClassicalCommand {
    /// Deal and reconstruct at all three thresholds.
    Demo(DealingArgs),
    /// Recover the secret from retained untruncated shares.
    Attack(AttackArgs),
}

#[derive(Debug, Subcommand)]
pub enum QuantumCommand {
    /// Deal a secret qubit and compare the closed form with the CNOT replay.
    Deal(QubitArgs),
    /// Deal and run a split schedule.
    Split(SplitArgs),
    /// Deal, split and reconstruct.
    Reconstruct(SplitArgs),
    /// Purity and fidelity for every subset size.
    Sweep(QubitArgs),
}

#[derive(Debug, Args)]
pub struct DealingArgs {
    #[arg(long)]
    pub modulus: Option<u64>,
    #[arg(long)]
    pub parties: Option<usize>,
    #[arg(long)]
    pub x_degree: Option<usize>,
    #[arg(long)]
    pub y_degree: Option<usize>,
    #[arg(long)]
    pub secret: Option<u64>,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[command(flatten)]
    pub dealing: DealingArgs,
    /// Party ids holding old shares, e.g. `1,2`.
    #[arg(long, value_delimiter = ',')]
    pub colluders: Option<Vec<u32>>,
    #[arg(long)]
    pub declared_threshold: Option<usize>,
    /// `column-poly-at-zero` or `re-truncation`; both when omitted.
    #[arg(long, value_parser = parse_method)]
    pub method: Option<AttackMethod>,
    /// Number of random dealings to attack.
    #[arg(long)]
    pub deals: Option<usize>,
}

#[derive(Debug, Args)]
pub struct QubitArgs {
    #[arg(long)]
    pub parties: Option<usize>,
    /// Amplitude of |0…0⟩ as `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub amplitude_a: Option<[f64; 2]>,
    /// Amplitude of |1…1⟩ as `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub amplitude_b: Option<[f64; 2]>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub qubit: QubitArgs,
    /// Comma-separated `index:arity` steps; the index points into the live
    /// handle list and new handles are appended. Defaults to splitting every
    /// original handle into 3.
    #[arg(long, value_delimiter = ',')]
    pub split: Option<Vec<SplitStep>>,
}

#[derive(Debug, Args)]
pub struct HidingArgs {
    #[arg(long)]
    pub parties: Option<usize>,
    /// Equator angle in radians.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Polar angle of the encoding basis; anything but π/2 leaks.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
}

impl Cli {
    /// Parses arguments; exactly one of `--scenario` and a subcommand is
    /// required.
    pub fn try_parse_args<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Self::try_parse_from(args)?;
        match (&cli.scenario, &cli.command) {
            (Some(_), Some(_)) => Err(Self::command().error(
                ErrorKind::ArgumentConflict,
                "--scenario cannot be combined with a subcommand",
            )),
            (None, None) => Err(Self::command().error(
                ErrorKind::MissingRequiredArgument,
                "either --scenario <PATH> or a subcommand is required",
            )),
            _ => Ok(cli),
        }
    }
}

fn parse_method(s: &str) -> Result<AttackMethod, String> {
    [AttackMethod::ColumnPolyAtZero, AttackMethod::ReTruncation]
        .into_iter()
        .find(|m| m.label() == s)
        .ok_or_else(|| format!("unknown method {s:?}; use column-poly-at-zero or re-truncation"))
}

impl DealingArgs {
    fn apply(&self, s: &mut Scenario) {
        let p = &mut s.parameters;
        p.modulus = self.modulus;
        p.parties = self.parties;
        p.x_degree = self.x_degree;
        p.y_degree = self.y_degree;
        p.secret = self.secret;
    }
}

impl QubitArgs {
    fn apply(&self, s: &mut Scenario) {
        let p = &mut s.parameters;
        p.parties = self.parties;
        p.amplitude_a = self.amplitude_a;
        p.amplitude_b = self.amplitude_b;
    }
}

impl Command {
    pub fn to_scenario(&self, seed: u64) -> Scenario {
        let kind = match self {
            Command::Classical(ClassicalCommand::Demo(_)) => ScenarioKind::ClassicalDemo,
            Command::Classical(ClassicalCommand::Attack(_)) => ScenarioKind::ClassicalAttack,
            Command::Quantum(QuantumCommand::Sweep(_)) => ScenarioKind::LeakageSweep,
            Command::Quantum(_) => ScenarioKind::QuantumLifecycle,
            Command::HidingTest(_) => ScenarioKind::HidingTest,
        };
        let mut s = Scenario::new(kind, seed);
        match self {
            Command::Classical(ClassicalCommand::Demo(d)) => d.apply(&mut s),
            Command::Classical(ClassicalCommand::Attack(a)) => {
                a.dealing.apply(&mut s);
                s.parameters.colluders = a.colluders.clone();
                s.parameters.declared_threshold = a.declared_threshold;
                s.parameters.method = a.method;
                s.parameters.deals = a.deals;
            }
            Command::Quantum(QuantumCommand::Deal(q)) => {
                q.apply(&mut s);
                s.parameters.stage = Some(Stage::Deal);
            }
            Command::Quantum(QuantumCommand::Split(sp)) => {
                sp.qubit.apply(&mut s);
                s.parameters.splits = sp.split.clone();
                s.parameters.stage = Some(Stage::Split);
            }
            Command::Quantum(QuantumCommand::Reconstruct(sp)) => {
                sp.qubit.apply(&mut s);
                s.parameters.splits = sp.split.clone();
                s.parameters.stage = Some(Stage::Reconstruct);
            }
            Command::Quantum(QuantumCommand::Sweep(q)) => q.apply(&mut s),
            Command::HidingTest(h) => {
                let p = &mut s.parameters;
                p.parties = h.parties;
                p.omega = h.omega;
                p.theta = h.theta;
                p.trials = h.trials;
            }
        }
        s
    }
}
