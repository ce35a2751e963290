//! `mixedsimplex` — command-line front end for the mixed-simplex library.
//!
//! Conventions:
//! - results go to stdout; JSON documents everywhere except `fig` (CSV) and
//!   `sample` (JSON lines);
//! - exit 0 on success, 1 on a domain error (the error name leads the
//!   stderr line), 2 on a usage error;
//! - all randomized subcommands take `--seed` (default 0) and never touch
//!   the wall clock, so identical invocations produce identical bytes.

use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mixed_simplex::automata::{
    accepts, complement, complete, concatenation, determinize, epsilon_removal, equivalent,
    intersection, projection_automaton, skeleton_automaton, string_weight, union, weight_push,
    Fsa, MixedString, Mfsa,
};
use mixed_simplex::figures;
use mixed_simplex::info::{
    coding_entropy, direct_sum_entropy, kl_divergence, laguerre_maxent_value,
    maxent_over_faces, mutual_information,
};
use mixed_simplex::mixed::{estimate_face_probs, MixedDistribution};
use mixed_simplex::samplers::{RngState, SamplerSpec};
use mixed_simplex::transforms;
use mixed_simplex::{Error, Result};

const LN_2: f64 = std::f64::consts::LN_2;

#[derive(Parser)]
#[command(
    name = "mixedsimplex",
    version,
    about = "Transforms, samplers, entropies, and automata for distributions \
             that mix continuous mass with boundary atoms on the probability simplex"
)]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map a JSON logit vector (stdin) to a point on the simplex.
    Transform(TransformArgs),
    /// Draw samples from a sampler spec, one JSON point per line.
    Sample(SampleArgs),
    /// Estimate face probabilities of a sampler by Monte Carlo.
    Faces(FacesArgs),
    /// Entropy report (discrete + continuous parts) of a mixed distribution.
    Entropy(EntropyArgs),
    /// Coding entropy of a mixed distribution at N-bit symbol precision.
    CodingEntropy(CodingEntropyArgs),
    /// Maximum-entropy distribution over faces at N-bit precision.
    Maxent(MaxentArgs),
    /// Divergence between two mixed distributions.
    Kl(KlArgs),
    /// Mutual information between a discrete variable and a mixed output.
    Mi(MiArgs),
    /// Automata over mixed strings.
    Fsa(FsaArgs),
    /// Plot-ready CSV data for the library's signature curves.
    Fig(FigArgs),
}

#[derive(Args)]
struct TransformArgs {
    /// Which transform to apply.
    #[arg(long, value_enum)]
    kind: TransformKind,
    /// Entmax exponent (alpha >= 1).
    #[arg(long, default_value_t = 1.5)]
    alpha: f64,
    /// Inverse temperature for softmax-family transforms.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Support size for the top-k transform.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformKind {
    Softmax,
    Sparsemax,
    Entmax,
    Topk,
    Argmax,
}

#[derive(Args)]
struct SampleArgs {
    /// Path to a sampler spec JSON file.
    #[arg(long)]
    spec: PathBuf,
    /// Number of samples.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent substream index for parallel runs.
    #[arg(long, default_value_t = 0)]
    stream: u64,
}

#[derive(Args)]
struct FacesArgs {
    /// Path to a sampler spec JSON file.
    #[arg(long)]
    spec: PathBuf,
    /// Number of samples.
    #[arg(long)]
    n: u64,
    /// Coordinates at or below this tolerance count as zero when binning.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
}

#[derive(Args)]
struct EntropyArgs {
    /// Mixed-distribution JSON file (stdin when omitted).
    #[arg(long)]
    dist: Option<PathBuf>,
    /// Report in bits instead of nats.
    #[arg(long)]
    bits: bool,
}

#[derive(Args)]
struct CodingEntropyArgs {
    /// Symbol precision in bits.
    #[arg(long = "N")]
    n: u32,
    /// Mixed-distribution JSON file (stdin when omitted).
    #[arg(long)]
    dist: Option<PathBuf>,
    /// Report in bits instead of nats.
    #[arg(long)]
    bits: bool,
}

#[derive(Args)]
struct MaxentArgs {
    /// Alphabet size.
    #[arg(long = "K")]
    k: u32,
    /// Symbol precision in bits.
    #[arg(long = "N")]
    n: u32,
    /// Report in bits instead of nats.
    #[arg(long)]
    bits: bool,
    /// Emit the value-versus-K CSV (K = 2..=K, N = 0..=N) instead of JSON.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct KlArgs {
    /// First distribution (JSON file).
    #[arg(long)]
    p: PathBuf,
    /// Second distribution (JSON file).
    #[arg(long)]
    q: PathBuf,
    /// Report in bits instead of nats.
    #[arg(long)]
    bits: bool,
}

#[derive(Args)]
struct MiArgs {
    /// Joint JSON file: [{"weight": w, "dist": {...}}, ...] (stdin when omitted).
    #[arg(long)]
    joint: Option<PathBuf>,
    /// Report in bits instead of nats.
    #[arg(long)]
    bits: bool,
}

#[derive(Args)]
struct FsaArgs {
    #[command(subcommand)]
    verb: FsaVerb,
}

#[derive(Subcommand)]
enum FsaVerb {
    /// Does the automaton accept the mixed string?
    Accept {
        #[arg(long = "in")]
        input: PathBuf,
        /// Mixed-string JSON file.
        #[arg(long)]
        string: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Total weight of all accepting paths for the string.
    Weight {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        string: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Subset construction (Boolean mode only).
    Determinize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eliminate epsilon transitions.
    Rmepsilon {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add an explicit sink so every face has a transition everywhere.
    Complete {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Automaton for the complement language.
    Complement {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Union of two languages.
    Union {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "in2")]
        input2: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Intersection of two languages.
    Intersect {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "in2")]
        input2: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Concatenation of two languages.
    Concat {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "in2")]
        input2: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact language equivalence of two Boolean-mode automata.
    Equal {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "in2")]
        input2: PathBuf,
    },
    /// Classical automaton over face labels (the skeleton language).
    Skeleton {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classical automaton over pure-symbol labels (the projection language).
    Project {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rescale weights into locally normalized (stochastic) form.
    Push {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FigArgs {
    #[arg(long, value_enum)]
    name: FigName,
    /// Output format (CSV is the only plot format).
    #[arg(long, value_enum, default_value_t = FigFormat::Csv)]
    out: FigFormat,
    /// Entmax exponent for the entmax-curve figure.
    #[arg(long, default_value_t = 1.5)]
    alpha: f64,
    #[arg(long, default_value_t = -3.0)]
    t_min: f64,
    #[arg(long, default_value_t = 3.0)]
    t_max: f64,
    /// Grid resolution.
    #[arg(long, default_value_t = 121)]
    points: usize,
    /// Largest alphabet size for the maxent-vs-K figure.
    #[arg(long, default_value_t = 10)]
    k_max: u32,
    /// Largest symbol precision for the maxent-vs-K figure.
    #[arg(long, default_value_t = 8)]
    n_max: u32,
    /// Location parameter for the rectify-density figure.
    #[arg(long, default_value_t = 0.5)]
    z: f64,
    /// Scale parameter for the rectify-density figure.
    #[arg(long, default_value_t = 0.3)]
    sigma: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigName {
    #[value(name = "entmax-curve")]
    EntmaxCurve,
    #[value(name = "maxent-vs-K", alias = "maxent-vs-k")]
    MaxentVsK,
    #[value(name = "rectify-density")]
    RectifyDensity,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigFormat {
    Csv,
}

fn main() -> ExitCode {
    let cli = match CliArgs::try_parse() {
        Ok(cli) => cli,
        // Usage problems exit 2; --help and --version print and exit 0.
        Err(e) => e.exit(),
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}

fn read_stdin() -> Result<String> {
    let mut buf = String::new();
    std::io::stdin()
        .read_to_string(&mut buf)
        .map_err(|e| Error::InvalidArgument(format!("could not read stdin: {e}")))?;
    Ok(buf)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("could not read {}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| Error::InvalidArgument(format!("could not parse {what}: {e}")))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    parse_json(&read_text(path)?, &format!("{what} ({})", path.display()))
}

fn load_or_stdin<T: serde::de::DeserializeOwned>(path: Option<&Path>, what: &str) -> Result<T> {
    match path {
        Some(p) => load_json(p, what),
        None => parse_json(&read_stdin()?, what),
    }
}

/// Print to stdout or write to `--out`.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)
            .map_err(|e| Error::InvalidArgument(format!("could not write {}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("output types serialize infallibly")
}

fn scale(nats: f64, bits: bool) -> f64 {
    if bits {
        nats / LN_2
    } else {
        nats
    }
}

fn units(bits: bool) -> &'static str {
    if bits {
        "bits"
    } else {
        "nats"
    }
}

/// JSON has no infinity literal; divergences print the string "Infinity".
fn finite_or_infinity(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v > 0.0 {
        json!("Infinity")
    } else {
        json!("-Infinity")
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Transform(args) => {
            let logits: Vec<f64> = parse_json(&read_stdin()?, "logit vector")?;
            let point = match args.kind {
                TransformKind::Softmax => transforms::softmax(&logits, args.beta)?,
                TransformKind::Sparsemax => transforms::sparsemax(&logits)?,
                TransformKind::Entmax => transforms::entmax(&logits, args.alpha)?,
                TransformKind::Topk => {
                    let k = args.k.ok_or_else(|| {
                        Error::InvalidArgument("top-k transform needs --k".into())
                    })?;
                    transforms::topk_softmax(&logits, k, args.beta)?
                }
                TransformKind::Argmax => transforms::argmax_indicator(&logits)?,
            };
            println!("{}", to_json(&point));
            Ok(())
        }
        Command::Sample(args) => {
            let spec: SamplerSpec = load_json(&args.spec, "sampler spec")?;
            let rng = RngState {
                seed: args.seed,
                stream: args.stream,
            };
            for p in spec.sample(&rng, args.n)? {
                println!("{}", to_json(&p));
            }
            Ok(())
        }
        Command::Faces(args) => {
            let spec: SamplerSpec = load_json(&args.spec, "sampler spec")?;
            let rng = RngState {
                seed: args.seed,
                stream: args.stream,
            };
            let hist = estimate_face_probs(&spec, args.n, args.tol, &rng)?;
            println!("{}", to_json(&hist));
            Ok(())
        }
        Command::Entropy(args) => {
            let d: MixedDistribution = load_or_stdin(args.dist.as_deref(), "mixed distribution")?;
            let report = direct_sum_entropy(&d)?;
            let b = args.bits;
            let per_face: Vec<Value> = report
                .per_face
                .iter()
                .map(|f| {
                    json!({
                        "face": f.face,
                        "mass": f.mass,
                        "differential": finite_or_infinity(scale(f.differential, b)),
                    })
                })
                .collect();
            let doc = json!({
                "discrete_part": scale(report.discrete_part, b),
                "continuous_part": scale(report.continuous_part, b),
                "total": scale(report.total, b),
                "per_face": per_face,
                "units": units(b),
            });
            println!("{doc}");
            Ok(())
        }
        Command::CodingEntropy(args) => {
            let d: MixedDistribution = load_or_stdin(args.dist.as_deref(), "mixed distribution")?;
            let value = coding_entropy(&d, args.n)?;
            let doc = json!({
                "value": scale(value, args.bits),
                "N": args.n,
                "units": units(args.bits),
            });
            println!("{doc}");
            Ok(())
        }
        Command::Maxent(args) => {
            if args.csv {
                print!("{}", figures::maxent_vs_k_csv(args.k, args.n)?);
                return Ok(());
            }
            let sol = maxent_over_faces(args.k, args.n)?;
            let doc = json!({
                "g": sol.g,
                "N": sol.n_bits,
                "value": scale(sol.value, args.bits),
                "laguerre_value": scale(laguerre_maxent_value(args.k, args.n)?, args.bits),
                "units": units(args.bits),
            });
            println!("{doc}");
            Ok(())
        }
        Command::Kl(args) => {
            let p: MixedDistribution = load_json(&args.p, "first distribution")?;
            let q: MixedDistribution = load_json(&args.q, "second distribution")?;
            let v = kl_divergence(&p, &q)?;
            let doc = json!({
                "kl": finite_or_infinity(scale(v, args.bits)),
                "units": units(args.bits),
            });
            println!("{doc}");
            Ok(())
        }
        Command::Mi(args) => {
            #[derive(serde::Deserialize)]
            struct JointEntry {
                weight: f64,
                dist: MixedDistribution,
            }
            let entries: Vec<JointEntry> = load_or_stdin(args.joint.as_deref(), "joint")?;
            let joint: Vec<(f64, MixedDistribution)> =
                entries.into_iter().map(|e| (e.weight, e.dist)).collect();
            let v = mutual_information(&joint)?;
            let doc = json!({
                "mi": scale(v, args.bits),
                "units": units(args.bits),
            });
            println!("{doc}");
            Ok(())
        }
        Command::Fsa(args) => run_fsa(args.verb),
        Command::Fig(args) => {
            let FigFormat::Csv = args.out;
            let csv = match args.name {
                FigName::EntmaxCurve => {
                    figures::entmax_curve_csv(args.alpha, args.t_min, args.t_max, args.points)?
                }
                FigName::MaxentVsK => figures::maxent_vs_k_csv(args.k_max, args.n_max)?,
                FigName::RectifyDensity => {
                    figures::rectify_density_csv(args.z, args.sigma, args.points)?
                }
            };
            print!("{csv}");
            Ok(())
        }
    }
}

fn fsa_to_json(f: &Fsa) -> Value {
    json!({
        "states": f.num_states(),
        "initial": f.initial().collect::<Vec<_>>(),
        "final": f.finals().collect::<Vec<_>>(),
        "edges": f
            .edges()
            .map(|(src, label, dst)| json!({"src": src, "label": label, "dst": dst}))
            .collect::<Vec<_>>(),
    })
}

fn run_fsa(verb: FsaVerb) -> Result<()> {
    let load = |p: &Path| -> Result<Mfsa> { load_json(p, "automaton") };
    match verb {
        FsaVerb::Accept { input, string, tol } => {
            let a = load(&input)?;
            let x: MixedString = load_json(&string, "mixed string")?;
            let doc = json!({"accepts": accepts(&a, &x, tol)?});
            println!("{doc}");
            Ok(())
        }
        FsaVerb::Weight { input, string, tol } => {
            let a = load(&input)?;
            let x: MixedString = load_json(&string, "mixed string")?;
            let doc = json!({"weight": string_weight(&a, &x, tol)?});
            println!("{doc}");
            Ok(())
        }
        FsaVerb::Determinize { input, out } => {
            emit(out.as_deref(), &to_json(&determinize(&load(&input)?)?))
        }
        FsaVerb::Rmepsilon { input, out } => {
            emit(out.as_deref(), &to_json(&epsilon_removal(&load(&input)?)?))
        }
        FsaVerb::Complete { input, out } => {
            emit(out.as_deref(), &to_json(&complete(&load(&input)?)?))
        }
        FsaVerb::Complement { input, out } => {
            emit(out.as_deref(), &to_json(&complement(&load(&input)?)?))
        }
        FsaVerb::Union { input, input2, out } => emit(
            out.as_deref(),
            &to_json(&union(&load(&input)?, &load(&input2)?)?),
        ),
        FsaVerb::Intersect { input, input2, out } => emit(
            out.as_deref(),
            &to_json(&intersection(&load(&input)?, &load(&input2)?)?),
        ),
        FsaVerb::Concat { input, input2, out } => emit(
            out.as_deref(),
            &to_json(&concatenation(&load(&input)?, &load(&input2)?)?),
        ),
        FsaVerb::Equal { input, input2 } => {
            let doc = json!({"equivalent": equivalent(&load(&input)?, &load(&input2)?)?});
            println!("{doc}");
            Ok(())
        }
        FsaVerb::Skeleton { input, out } => emit(
            out.as_deref(),
            &fsa_to_json(&skeleton_automaton(&load(&input)?)?).to_string(),
        ),
        FsaVerb::Project { input, out } => emit(
            out.as_deref(),
            &fsa_to_json(&projection_automaton(&load(&input)?)?).to_string(),
        ),
        FsaVerb::Push { input, out } => {
            emit(out.as_deref(), &to_json(&weight_push(&load(&input)?)?))
        }
    }
}
