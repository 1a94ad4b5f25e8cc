use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sidon_core::Rational;

#[derive(Parser, Debug)]
#[command(name = "sidon", version, about = "Sidon sets, additive bases and random-sequence experiments")]
pub struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Master seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Build a Sidon set.
    #[command(subcommand)]
    Construct(Construct),
    /// Check Sidon, B2[g] or basis properties of a set.
    #[command(subcommand)]
    Verify(Verify),
    /// Curve point counts, the quadric and its torus coverage.
    #[command(subcommand)]
    Curve(Curve),
    /// Certified decompositions into Sidon-set elements.
    #[command(subcommand)]
    Decompose(Decompose),
    /// Draw a random sequence from the model.
    Sample(SampleArgs),
    /// Delete elements that witness forbidden sums.
    #[command(subcommand)]
    Lift(Lift),
    /// Representation families of a sequence.
    #[command(subcommand)]
    Family(Family),
    /// Sunflowers in vector families.
    #[command(subcommand)]
    Sunflower(Sunflower),
    /// Power sums, exact moments and Monte Carlo means.
    #[command(subcommand)]
    Analyze(Analyze),
    /// Compare family sizes before and after lifting.
    #[command(subcommand)]
    Audit(Audit),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construct {
    ErdosTuran {
        #[arg(short)]
        p: u64,
    },
    Ruzsa {
        #[arg(short)]
        p: u64,
        /// Primitive root; the least one when omitted.
        #[arg(short)]
        g: Option<u64>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Cyclic,
    Integer,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistinctArg {
    None,
    Pairwise,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verify {
    Sidon {
        /// Set as JSON or `mod N` text.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Cyclic)]
        mode: ModeArg,
    },
    B2g {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Cyclic)]
        mode: ModeArg,
    },
    Basis {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(short = 'H', long = "order")]
        h: usize,
        #[arg(long, value_enum, default_value_t = DistinctArg::None)]
        distinct: DistinctArg,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Curve {
    /// Points of V^2 = U^3 + λ^2 (U - b)^2 with V != 0.
    Count {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        b: u64,
        #[arg(long)]
        lambda: u64,
    },
    /// Compare triple representation counts with curve point counts.
    Identity {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        g: Option<u64>,
        /// Single target; the whole group when omitted.
        #[arg(short, requires = "b")]
        a: Option<u64>,
        #[arg(short)]
        b: Option<u64>,
    },
    Quadric {
        #[arg(short)]
        p: u64,
        #[arg(long)]
        r1: u64,
        #[arg(long)]
        r2: u64,
    },
    Coverage {
        #[arg(short)]
        p: u64,
        #[arg(long)]
        r1: u64,
        #[arg(long)]
        r2: u64,
        #[arg(short, long = "level", default_value_t = 1)]
        k: u32,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchArg {
    Box,
    Exhaustive,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decompose {
    Ruzsa3 {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        g: Option<u64>,
        #[arg(short)]
        a: u64,
        #[arg(short)]
        b: u64,
        /// Require pairwise distinct parts.
        #[arg(long)]
        distinct: bool,
    },
    Ruzsa4 {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        g: Option<u64>,
        #[arg(short)]
        a: u64,
        #[arg(short)]
        b: u64,
    },
    Zn {
        #[arg(short = 'N')]
        modulus: u64,
        #[arg(short)]
        n: u64,
        #[arg(long, value_enum, default_value_t = SearchArg::Exhaustive)]
        search: SearchArg,
    },
}

/// Parameters of the random-sequence model.
#[derive(Args, Debug, Clone, Serialize)]
pub struct ModelArgs {
    #[arg(long, default_value = "7/11")]
    pub gamma: Rational,
    #[arg(short, default_value_t = 100)]
    pub m: u64,
    #[arg(long, default_value_t = 100_000)]
    pub horizon: u64,
    /// Allowed residues as a set file.
    #[arg(long, conflicts_with_all = ["ruzsa", "full"])]
    pub residues: Option<PathBuf>,
    /// Allowed residues: the Ruzsa set for this prime.
    #[arg(long, conflicts_with = "full")]
    pub ruzsa: Option<u64>,
    /// Allowed residues: all of `Z_N`.
    #[arg(long)]
    pub full: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
}

/// A sequence read from a file, or sampled from the model.
#[derive(Args, Debug, Serialize)]
pub struct SeqArgs {
    /// One integer per line.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lift {
    Sidon {
        #[command(flatten)]
        seq: SeqArgs,
        /// Repeat until nothing more is removed.
        #[arg(long)]
        fixpoint: bool,
    },
    B22 {
        #[command(flatten)]
        seq: SeqArgs,
        #[arg(long)]
        fixpoint: bool,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Enumerate {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        target: u64,
        /// Residue-condition modulus; defaults to the model's.
        #[arg(long = "modulus")]
        modulus: Option<u64>,
        #[arg(long)]
        epsilon: Option<Rational>,
        #[command(flatten)]
        seq: SeqArgs,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sunflower {
    Find {
        /// JSON array of tuples, or JSON lines with a `tuple` field.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(short, default_value_t = 2)]
        k: usize,
    },
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        /// Common coordinates, 1-based, comma separated.
        #[arg(long = "type", value_delimiter = ',')]
        type_set: Vec<usize>,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analyze {
    /// Exact double power sum over pairs summing to n.
    Sigma {
        #[arg(long)]
        alpha: Rational,
        #[arg(long)]
        beta: Rational,
        #[arg(short)]
        n: u64,
        #[arg(short, default_value_t = 0)]
        m: u64,
    },
    /// Tail power sum over differences equal to n, with an error bound.
    Tau {
        #[arg(long)]
        alpha: Rational,
        #[arg(long)]
        beta: Rational,
        #[arg(short)]
        n: u64,
        #[arg(short, default_value_t = 0)]
        m: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Normalized sigma and tau over a log-spaced grid.
    LemmaAb {
        #[arg(long)]
        alpha: Rational,
        #[arg(long)]
        beta: Rational,
        #[arg(long, default_value_t = 100_000)]
        n_max: u64,
        #[arg(long, default_value_t = 6)]
        per_decade: u32,
        #[arg(long, value_delimiter = ',', default_values_t = [0u64, 10, 100])]
        ms: Vec<u64>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Normalized four-term series over pairs of values.
    LemmaAbab {
        #[arg(long)]
        gamma: Rational,
        /// Values for `a` and `b`; every pair is evaluated.
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 10, 100])]
        values: Vec<u64>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Exact `E|Q_n|` (and variance) per target.
    Expectation {
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<u64>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Exact `Δ(Q_n)` per target.
    Delta {
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<u64>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Monte Carlo mean family sizes per target.
    Montecarlo {
        #[arg(long)]
        kind: String,
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<u64>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long)]
        epsilon: Option<Rational>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Lower-tail frequency of `|Q_n|` against the Janson bound.
    Janson {
        #[arg(short)]
        n: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Measure every regression constant.
    Pins,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditArg {
    B22,
    Sidon,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Audit {
    Destruction {
        #[arg(long, value_enum, default_value_t = AuditArg::B22)]
        mode: AuditArg,
        #[arg(long)]
        epsilon: Option<Rational>,
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<u64>,
        #[command(flatten)]
        seq: SeqArgs,
    },
}
