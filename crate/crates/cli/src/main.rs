use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use monocat::qchar::Route;
use monocat_cli::commands::{self, CliError, FpolyRoute, Output, VerifyCheck};
use monocat_cli::server::{self, AppState};

#[derive(Parser)]
#[command(name = "monocat", version, about = "Cluster algebras and truncated q-characters of C_1")]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Enumeration limits, e.g. `seeds=100000,terms=1000000`. Defaults come
    /// from MONOCAT_LIMITS.
    #[arg(long, global = true)]
    limits: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct TypeArgs {
    /// Dynkin type such as A3, D4, E6.
    #[arg(long = "type")]
    type_name: String,
    /// 1-based vertices of I0 (default: the side containing vertex 1).
    #[arg(long)]
    i0: Option<String>,
}

impl TypeArgs {
    fn dynkin(&self) -> Result<monocat::roots::DynkinData, CliError> {
        commands::dynkin(&self.type_name, self.i0.as_deref())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Apply a sequence of mutations and print the seed and relations.
    Mutate {
        /// Dynkin type; required unless --seed is given.
        #[arg(long = "type", required_unless_present = "seed")]
        type_name: Option<String>,
        #[arg(long)]
        i0: Option<String>,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        /// Start from a JSON seed file instead of a named type.
        #[arg(long)]
        seed: Option<PathBuf>,
        /// Comma-separated 1-based directions.
        #[arg(long, default_value = "")]
        seq: String,
    },
    /// Enumerate every seed reachable from the initial one.
    Enumerate {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        /// Also evaluate dimensions of the attached modules.
        #[arg(long)]
        dims: bool,
    },
    /// F-polynomial of a positive root.
    Fpoly {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        root: String,
        /// principal, combinatorial, geometric, both or all.
        #[arg(long, default_value = "both")]
        route: String,
    },
    /// q-character computations.
    Qchar {
        #[command(subcommand)]
        op: QcharOp,
    },
    /// Quiver Grassmannians.
    Grass {
        #[command(subcommand)]
        op: GrassOp,
    },
    /// Seeds of higher level and their checks.
    Levels {
        #[command(subcommand)]
        op: LevelsOp,
    },
    /// End-to-end checks; exit code 0 iff every check passes.
    Verify {
        /// all, conjecture, periodic, triples or two-restricted.
        check: String,
        #[command(flatten)]
        ty: TypeArgs,
        /// Dimension vector for two-restricted.
        #[arg(long)]
        gamma: Option<String>,
    },
    /// Serve the JSON API.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Append-only journal replayed at startup.
        #[arg(long)]
        journal: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum QcharOp {
    /// Frenkel-Mukhin algorithm on a dominant monomial.
    Fm {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        mono: String,
        /// Keep only terms with every A-parameter at most this value.
        #[arg(long)]
        truncate: Option<u32>,
        #[arg(long)]
        max_monomials: Option<usize>,
    },
    /// Kirillov-Reshetikhin module W^(vertex)_{k,r}.
    Kr {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        vertex: usize,
        #[arg(long)]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        r: i32,
    },
    /// Truncated character of a simple object of C_1 given by its highest monomial.
    C1 {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        mono: String,
        /// fpoly or phiJ.
        #[arg(long, default_value = "fpoly")]
        route: String,
    },
    /// Truncated character of the cluster simple S(root).
    Simple {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long, allow_hyphen_values = true)]
        root: String,
        #[arg(long, default_value = "fpoly")]
        route: String,
    },
    /// Simple constituents of a product of cluster simples; roots separated by `;`.
    Decompose {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long, allow_hyphen_values = true)]
        roots: String,
    },
}

#[derive(Subcommand)]
enum GrassOp {
    /// Euler characteristics of all Grassmannians of M[root].
    Euler {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        root: String,
        /// Use the generic representation of a dimension vector.
        #[arg(long)]
        generic: bool,
    },
}

#[derive(Subcommand)]
enum LevelsOp {
    /// The initial seed on Γ_ℓ with its KR labels.
    Seed {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        ell: usize,
    },
    /// Check the initial exchange relations against the T-system.
    Tsystem {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        ell: usize,
    },
    /// Evaluate the Gr(3,6) identifications on the fixture matrix.
    Grass36,
}

fn parse_route(s: &str) -> Result<Route, CliError> {
    s.parse().map_err(|e: monocat::qchar::QcharError| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let limits = commands::resolve_limits(cli.limits.as_deref())?;
    match cli.command {
        Command::Mutate {
            type_name,
            i0,
            ell,
            seed,
            seq,
        } => {
            let start = match (seed, type_name) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e)))?;
                    let v: serde_json::Value =
                        serde_json::from_str(&text).map_err(|e| CliError::Usage(e.to_string()))?;
                    monocat::cluster::Seed::from_json(&v)?
                }
                (None, Some(t)) => commands::initial_seed(&commands::dynkin(&t, i0.as_deref())?, ell)?,
                (None, None) => return Err(CliError::Usage("give --type or --seed".into())),
            };
            commands::mutate(start, &commands::parse_list(&seq)?)
        }
        Command::Enumerate { ty, ell, dims } => commands::enumerate(&ty.dynkin()?, ell, limits, dims),
        Command::Fpoly { ty, root, route } => {
            let d = ty.dynkin()?;
            let r: FpolyRoute = route.parse()?;
            commands::fpoly_cmd(&d, &commands::root(&d, &root)?, r)
        }
        Command::Qchar { op } => match op {
            QcharOp::Fm {
                ty,
                mono,
                truncate,
                max_monomials,
            } => commands::qchar_fm(&ty.dynkin()?, &mono, truncate, max_monomials),
            QcharOp::Kr { ty, vertex, k, r } => commands::qchar_kr(&ty.dynkin()?, vertex, k, r),
            QcharOp::C1 { ty, mono, route } => commands::qchar_c1(&ty.dynkin()?, &mono, parse_route(&route)?),
            QcharOp::Simple { ty, root, route } => {
                let d = ty.dynkin()?;
                commands::qchar_simple(&d, &commands::root(&d, &root)?, parse_route(&route)?)
            }
            QcharOp::Decompose { ty, roots } => {
                let d = ty.dynkin()?;
                let rs = roots
                    .split(';')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| commands::root(&d, p))
                    .collect::<Result<Vec<_>, _>>()?;
                commands::qchar_decompose(&d, &rs)
            }
        },
        Command::Grass {
            op: GrassOp::Euler { ty, root, generic },
        } => {
            let d = ty.dynkin()?;
            commands::grass_euler(&d, &commands::root(&d, &root)?, generic)
        }
        Command::Levels { op } => match op {
            LevelsOp::Seed { ty, ell } => commands::levels_seed(&ty.dynkin()?, ell),
            LevelsOp::Tsystem { ty, ell } => commands::levels_tsystem(&ty.dynkin()?, ell),
            LevelsOp::Grass36 => commands::levels_grass36(),
        },
        Command::Verify { check, ty, gamma } => {
            let d = ty.dynkin()?;
            let c: VerifyCheck = check.parse()?;
            let g = gamma.map(|g| commands::root(&d, &g)).transpose()?;
            commands::verify_cmd(&d, c, g.as_ref())
        }
        Command::Serve { host, port, journal } => {
            let addr: std::net::SocketAddr = format!("{}:{}", host, port)
                .parse()
                .map_err(|e| CliError::Usage(format!("bad address: {}", e)))?;
            let state = match journal {
                Some(p) => AppState::with_journal(limits, &p).map_err(|e| CliError::Failed(e.to_string()))?,
                None => AppState::new(limits),
            };
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Failed(e.to_string()))?;
            rt.block_on(server::serve(addr, Arc::new(state)))
                .map_err(|e| CliError::Failed(e.to_string()))?;
            Ok(Output {
                json: serde_json::Value::Null,
                text: String::new(),
                success: true,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(out) => {
            let body = if json {
                serde_json::to_string_pretty(&out.json).expect("serializable") + "\n"
            } else {
                out.text
            };
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = std::io::stdout().write_all(body.as_bytes());
            if out.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if json {
                let body = serde_json::json!({ "error": e.to_string(), "exit_code": e.exit_code().to_string() });
                println!("{}", body);
            }
            eprintln!("monocat: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
