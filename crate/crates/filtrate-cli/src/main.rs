mod commands;
mod load;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Output;

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Parser)]
#[command(name = "filtrate", version, about = "Filtered simplicial sets over finite posets")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,

    /// Upper bound on enumerated maps or cells before giving up.
    #[arg(long, global = true, env = "FILTRATE_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: usize,

    /// Poset in text form (`a < b` per line). Defaults to `p0 < p1`.
    #[arg(long, global = true)]
    poset: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct HornArgs {
    /// Filtration of the simplex, e.g. `p0,p0,p1`.
    #[arg(long)]
    pub chain: String,
    /// Index of the missing face.
    #[arg(long)]
    pub k: usize,
    /// Neighbour used by the construction; defaults to k+1 when it
    /// matches, else k-1.
    #[arg(long)]
    pub kp: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Counts, filtration profile and validation verdict.
    Info {
        object: String,
        /// Print the object itself in text form (JSON with --json).
        #[arg(long)]
        emit: bool,
    },
    /// Checks simplicial identities and filtration compatibility.
    Validate { object: String },
    /// Filtered subdivision sd_P(X).
    Subdivide {
        object: String,
        /// Print the subdivided object itself.
        #[arg(long)]
        emit: bool,
    },
    /// The last-vertex map sd_P(X) → X.
    Lastvertex { object: String },
    /// Classifies the simplices of sd_P(Δ^φ) against the subdivided horn.
    ClassifyHorn {
        #[command(flatten)]
        horn: HornArgs,
        /// List every simplex with its label and partner.
        #[arg(long)]
        list: bool,
    },
    /// Certificate presenting sd_P(Λ) ⊂ sd_P(Δ) as a sequence of horn fillings.
    PresentAnodyne {
        #[command(flatten)]
        horn: HornArgs,
    },
    /// Replays a certificate and compares the result with the target.
    VerifyPresentation {
        certificate: String,
        #[arg(long)]
        chain: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        kp: Option<usize>,
        /// Source object, for certificates of arbitrary inclusions.
        #[arg(long, requires_all = ["target", "inclusion"], conflicts_with = "chain")]
        source: Option<String>,
        #[arg(long)]
        target: Option<String>,
        /// Inclusion as a JSON map from source keys to target simplices.
        #[arg(long)]
        inclusion: Option<String>,
    },
    /// Iterated Ex_P, truncated at a dimension cap.
    Ex {
        object: String,
        #[arg(long, default_value_t = 1)]
        ex_stage: usize,
        #[arg(long, default_value_t = 2)]
        dim_cap: usize,
        /// Print the last stage itself.
        #[arg(long)]
        emit: bool,
    },
    /// Filtered maps A → X.
    EnumMaps {
        source: String,
        target: String,
        #[arg(long)]
        list: bool,
    },
    /// The simplicial mapping space Map(A, X) up to a dimension cap.
    MapSpace {
        source: String,
        target: String,
        #[arg(long, default_value_t = 2)]
        dim_cap: usize,
    },
    /// Filtered π0: classes at every strictly increasing chain and the
    /// restriction maps between them.
    Spi0 { object: String },
    /// Edge-path group of Map(Δ^φ, Ex^k X) at a base vertex.
    Spi1 {
        object: String,
        #[arg(long)]
        chain: String,
        /// Index of the base vertex among the vertices of the mapping space.
        #[arg(long, default_value_t = 0)]
        base: usize,
        #[arg(long, default_value_t = 0)]
        ex_stage: usize,
        #[arg(long, default_value_t = 3)]
        dim_cap: usize,
    },
    /// Homotopy link Map(Δ^{[p,q]}, X) and its restriction to the p-stratum.
    Holink {
        object: String,
        #[arg(long, default_value = "p0")]
        p: String,
        #[arg(long, default_value = "p1")]
        q: String,
        #[arg(long, default_value_t = 0)]
        ex_stage: usize,
        #[arg(long, default_value_t = 3)]
        dim_cap: usize,
    },
    /// Refines the filtration by the components of the strata.
    Refine {
        object: String,
        #[arg(long)]
        emit: bool,
    },
    /// Intersection homology of a filtered complex.
    Ih {
        complex: String,
        /// Perversity file: JSON `{stratum: value}` or `stratum value` lines.
        #[arg(long, conflicts_with = "uniform")]
        perversity: Option<String>,
        /// The same value on every singular stratum.
        #[arg(long, allow_hyphen_values = true)]
        uniform: Option<i64>,
        /// Also compute ordinary homology.
        #[arg(long)]
        ordinary: bool,
        /// Mayer–Vietoris check for the cover by the star of this vertex
        /// and the maximal simplices avoiding it.
        #[arg(long)]
        cover_vertex: Option<String>,
        /// Print the complex itself in text form (JSON with --json).
        #[arg(long)]
        emit: bool,
    },
    /// Lists the built-in models.
    Examples,
}

pub struct Settings {
    pub json: bool,
    pub budget: usize,
    pub poset: Option<String>,
}

fn run(cli: Cli) -> anyhow::Result<Output> {
    let s = Settings { json: cli.json, budget: cli.budget, poset: cli.poset };
    match cli.command {
        Command::Info { object, emit } => commands::info(&s, &object, emit),
        Command::Validate { object } => commands::validate(&s, &object),
        Command::Subdivide { object, emit } => commands::subdivide(&s, &object, emit),
        Command::Lastvertex { object } => commands::lastvertex(&s, &object),
        Command::ClassifyHorn { horn, list } => commands::classify_horn(&s, &horn, list),
        Command::PresentAnodyne { horn } => commands::present_anodyne(&s, &horn),
        Command::VerifyPresentation { certificate, chain, k, kp, source, target, inclusion } => {
            let horn = match (chain, k) {
                (Some(chain), Some(k)) => Some(HornArgs { chain, k, kp }),
                (None, None) => None,
                _ => anyhow::bail!(filtrate::Error::Parse("--chain and --k go together".into())),
            };
            let general = match (source, target, inclusion) {
                (Some(a), Some(b), Some(c)) => Some((a, b, c)),
                _ => None,
            };
            commands::verify_presentation(&s, &certificate, horn, general)
        }
        Command::Ex { object, ex_stage, dim_cap, emit } => commands::ex(&s, &object, ex_stage, dim_cap, emit),
        Command::EnumMaps { source, target, list } => commands::enum_maps(&s, &source, &target, list),
        Command::MapSpace { source, target, dim_cap } => commands::map_space(&s, &source, &target, dim_cap),
        Command::Spi0 { object } => commands::spi0(&s, &object),
        Command::Spi1 { object, chain, base, ex_stage, dim_cap } => commands::spi1(&s, &object, &chain, base, ex_stage, dim_cap),
        Command::Holink { object, p, q, ex_stage, dim_cap } => commands::holink(&s, &object, &p, &q, ex_stage, dim_cap),
        Command::Refine { object, emit } => commands::refine(&s, &object, emit),
        Command::Ih { complex, perversity, uniform, ordinary, cover_vertex, emit } => {
            if emit {
                return commands::emit_complex(&s, &complex);
            }
            commands::ih(&s, &complex, perversity.as_deref(), uniform, ordinary, cover_vertex.as_deref())
        }
        Command::Examples => commands::examples(&s),
    }
}

/// Exit status for a failed command: 2 for bad input, 3 for an exhausted
/// budget, 4 for a violated internal invariant.
fn status_of(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<filtrate::Error>() {
            return match err {
                filtrate::Error::Budget { .. } => 3,
                filtrate::Error::Invariant(_) | filtrate::Error::Overflow => 4,
                _ => 2,
            };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
            ExitCode::from(out.status)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(status_of(&e))
        }
    }
}
