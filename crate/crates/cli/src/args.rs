use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Largest cylinder depth accepted on the command line.
pub const MAX_DEPTH: u32 = 14;

pub const DEFAULT_SEED: u64 = nadyn::selftest::DEFAULT_SEED;

/// Exact non-Archimedean measures, integrals, dynamics and entropy on the
/// one-sided full shift.
///
/// JSON inputs (`--spec`, `--fn`, `--iso`, `--W`) are file paths, or inline
/// JSON when the value starts with `{`.
#[derive(Debug, Parser)]
#[command(name = "nadyn", version)]
pub struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measures of sets and points.
    #[command(subcommand)]
    Measure(MeasureCommand),
    /// Integral of a step function.
    Integrate(StepArgs),
    /// Norm of a step function.
    Stepnorm(StepArgs),
    /// Check a finite-depth linear operator for the spectral conditions
    /// and extract the induced set map.
    SpectralCheck(SpectralArgs),
    /// Transformations, isomorphisms and conjugacies.
    #[command(subcommand)]
    Dynamics(DynamicsCommand),
    /// Measure and topological entropy sequences.
    #[command(subcommand)]
    Entropy(EntropyCommand),
    /// The interval set function on [0, 1].
    #[command(subcommand)]
    Pathology(PathologyCommand),
    /// Run the numbered acceptance criteria.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct SpecArg {
    /// Measure description (bernoulli, haar or counting).
    #[arg(long)]
    pub spec: String,
}

#[derive(Debug, Subcommand)]
pub enum MeasureCommand {
    /// μ(A).
    Eval(SetArgs),
    /// ‖A‖.
    Norm(SetArgs),
    /// N(x) for a point `PRE:PER` (shift measures) or a label (counting).
    Nmu(PointArgs),
    /// Check the measure axioms on all cylinders and random sets to a depth.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SetArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    /// Set expression such as `U:01 + ~U:1`, or comma-separated labels for
    /// counting measures.
    #[arg(long)]
    pub set: String,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[arg(long, default_value_t = 6, value_parser = depth_parser())]
    pub depth: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct StepArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    /// Step function `{"terms":[{"coeff":"2","set":"U:0"}]}`.
    #[arg(long = "fn")]
    pub function: String,
}

#[derive(Debug, Args)]
pub struct SpectralArgs {
    /// Operator `{"source_p":2,"target_p":2,"depth":N,"images":{…}}`.
    #[arg(long = "W")]
    pub operator: String,
    /// Measure on the source side.
    #[arg(long)]
    pub spec: String,
    /// Measure on the target side; defaults to `--spec`.
    #[arg(long)]
    pub target_spec: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum DynamicsCommand {
    /// μ(T⁻¹A) = μ(A) on cylinders and random sets.
    CheckPreserving(PreservingArgs),
    /// Φ ∘ T⁻¹ = S⁻¹ ∘ Φ for a measure algebra isomorphism Φ.
    CheckConjugacy(ConjugacyArgs),
    /// Reconstruct a prefix of φ(x) from Φ.
    PointMap(PointMapArgs),
    /// Isomorphy of two systems through an invertible point map.
    CheckIso(IsoArgs),
    /// Emit the isomorphism induced by a symbol permutation, as JSON.
    IsoFromPerm(PermIsoArgs),
    /// Emit the composition operator f ↦ f∘φ on step functions, as JSON.
    CompositionOperator(CompositionArgs),
}

#[derive(Debug, Args)]
pub struct PermIsoArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=36))]
    pub p: u32,
    /// Images of the symbols, e.g. `1,0`.
    #[arg(long, value_delimiter = ',')]
    pub pi: Vec<u8>,
    #[arg(long, value_parser = depth_parser())]
    pub depth: u32,
}

#[derive(Debug, Args)]
pub struct CompositionArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=36))]
    pub p: u32,
    /// The point map φ.
    #[arg(long)]
    pub phi: String,
    #[arg(long, value_parser = depth_parser())]
    pub depth: u32,
}

#[derive(Debug, Args)]
pub struct PreservingArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    /// `shift`, `odometer`, `identity`, `swap`, `perm:2,0,1` or JSON.
    #[arg(long)]
    pub transform: String,
    #[arg(long, default_value_t = 6, value_parser = depth_parser())]
    pub depth: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ConjugacyArgs {
    #[arg(long)]
    pub iso: String,
    #[arg(long)]
    pub transform: String,
    /// Transformation on the target side; defaults to `--transform`.
    #[arg(long)]
    pub target_transform: Option<String>,
    #[arg(long, value_parser = depth_parser())]
    pub depth: u32,
}

#[derive(Debug, Args)]
pub struct PointMapArgs {
    #[arg(long)]
    pub iso: String,
    /// Measure on the source side, used to discard negligible candidates.
    #[arg(long)]
    pub spec: String,
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    /// Length of the reconstructed prefix.
    #[arg(long, value_parser = depth_parser())]
    pub depth: u32,
}

#[derive(Debug, Args)]
pub struct IsoArgs {
    /// The point map φ.
    #[arg(long)]
    pub phi: String,
    #[arg(long)]
    pub transform: String,
    #[arg(long)]
    pub target_transform: Option<String>,
    #[arg(long)]
    pub spec: String,
    #[arg(long)]
    pub target_spec: Option<String>,
    #[arg(long, default_value_t = 4, value_parser = depth_parser())]
    pub depth: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum EntropyCommand {
    /// a_n = H(α ∨ T⁻¹α ∨ … ∨ T^{-(n-1)}α).
    Measure(MeasureEntropyArgs),
    /// b_n = log2 N(𝒰 ∨ T⁻¹𝒰 ∨ … ∨ T^{-(n-1)}𝒰).
    Top(TopEntropyArgs),
    /// Both sequences on one partition, with a_n ≤ b_n checked termwise.
    Compare(MeasureEntropyArgs),
}

#[derive(Debug, Args)]
pub struct MeasureEntropyArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    /// Cells separated by `|`, e.g. `U:0|U:1+U:2`.
    #[arg(long)]
    pub partition: String,
    #[arg(long)]
    pub transform: String,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=64))]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TopEntropyArgs {
    /// Alphabet size.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=36))]
    pub p: u32,
    /// Members separated by `|`.
    #[arg(long)]
    pub cover: String,
    #[arg(long)]
    pub transform: String,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=64))]
    pub n: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum PathologyCommand {
    /// |υ(J_n(x))|_p along the intervals shrinking to x.
    Upsilon(UpsilonArgs),
}

#[derive(Debug, Args)]
pub struct UpsilonArgs {
    #[arg(long)]
    pub p: u64,
    /// Base-p digits of x: `0101`, `period=01` or `1,period=01`.
    #[arg(long, allow_hyphen_values = true)]
    pub digits: String,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=nadyn::pathology::MAX_DECAY_TERMS as u64))]
    pub n: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Run only this criterion.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=nadyn::selftest::CRITERION_COUNT as i64))]
    pub criterion: Option<u8>,
}

fn depth_parser() -> clap::builder::RangedI64ValueParser<u32> {
    clap::value_parser!(u32).range(0..=MAX_DEPTH as i64)
}
