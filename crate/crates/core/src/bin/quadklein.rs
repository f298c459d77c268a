use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quadklein::cli::{self, CommandRequest};
use quadklein::Error;

#[derive(Parser)]
#[command(name = "quadklein", about = "Twisted μ_n ⊂ SL₂ over rings of quadratic integers")]
struct Cli {
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MatrixArg {
    /// Matrix as JSON, e.g. '[[3,"4+s"],["4-s",3]]'.
    #[arg(long, conflicts_with = "file")]
    matrix: Option<String>,
    /// Read the matrix JSON from a file.
    #[arg(long)]
    file: Option<PathBuf>,
}

impl MatrixArg {
    fn load(&self) -> Result<Option<String>, Error> {
        match (&self.matrix, &self.file) {
            (Some(m), _) => Ok(Some(m.clone())),
            (None, Some(f)) => std::fs::read_to_string(f)
                .map(Some)
                .map_err(|e| Error::InvalidArgument(format!("{}: {e}", f.display()))),
            (None, None) => Ok(None),
        }
    }

    fn require(&self) -> Result<String, Error> {
        self.load()?
            .ok_or_else(|| Error::InvalidArgument("--matrix or --file is required".into()))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Discriminant, signature, class numbers and fundamental unit.
    Field {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
    },
    /// Class group (or narrow class group) as cyclic factors with generators.
    Classgroup {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        narrow: bool,
        /// Lift the default discriminant limit.
        #[arg(long)]
        allow_large: bool,
    },
    /// Classification report for twisted forms of μ_n.
    Klein {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        n: usize,
    },
    /// Integrality of ρ_A and conjugacy to the standard embedding.
    EmbedCheck {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        m: MatrixArg,
    },
    /// Divide lines of A by principal primes until det A is a unit.
    EmbedReduce {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[command(flatten)]
        m: MatrixArg,
    },
    /// Search for an integral embedding that is not conjugate to the standard one.
    EmbedSearch {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        height: i64,
    },
    /// Zariski patches on which ρ_A becomes standard.
    EmbedCover {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        m: MatrixArg,
    },
    /// Generators of the invariant ring (standard action without --matrix).
    Invariants {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        m: MatrixArg,
        #[arg(long)]
        degree_bound: Option<u32>,
        /// Work over O_K[1/s].
        #[arg(long, allow_hyphen_values = true)]
        invert: Option<String>,
        /// Relation to check, in the generator names G1, G2, ...; repeatable.
        #[arg(long = "relation", allow_hyphen_values = true)]
        relations: Vec<String>,
    },
    /// Fiber types of a twist (--delta) or an explicit embedding (--matrix).
    Fibers {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<String>,
        #[command(flatten)]
        m: MatrixArg,
        /// Rational primes whose prime ideals are typed.
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
    },
    /// Splitting census of primes of K in K(√δ).
    Density {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
        #[arg(long)]
        bound: u64,
        /// Exponent s > 1 for the truncated Dirichlet quotient.
        #[arg(long)]
        dirichlet: Option<String>,
        #[arg(long)]
        shards: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn request(cmd: &Command) -> Result<CommandRequest, Error> {
    Ok(match cmd {
        Command::Field { d } => CommandRequest::Field { d: *d },
        Command::Classgroup { d, narrow, allow_large } => CommandRequest::Classgroup {
            d: *d,
            narrow: *narrow,
            allow_large: *allow_large,
        },
        Command::Klein { d, n } => CommandRequest::Klein { d: *d, n: *n },
        Command::EmbedCheck { d, n, m } => CommandRequest::EmbedCheck {
            d: *d,
            n: *n,
            matrix: m.require()?,
        },
        Command::EmbedReduce { d, m } => CommandRequest::EmbedReduce { d: *d, matrix: m.require()? },
        Command::EmbedSearch { d, n, height } => CommandRequest::EmbedSearch {
            d: *d,
            n: *n,
            height: *height,
        },
        Command::EmbedCover { d, n, m } => CommandRequest::EmbedCover {
            d: *d,
            n: *n,
            matrix: m.require()?,
        },
        Command::Invariants {
            d,
            n,
            m,
            degree_bound,
            invert,
            relations,
        } => CommandRequest::Invariants {
            d: *d,
            n: *n,
            matrix: m.load()?,
            degree_bound: *degree_bound,
            invert: invert.clone(),
            relations: relations.clone(),
        },
        Command::Fibers { d, n, delta, m, primes } => CommandRequest::Fibers {
            d: *d,
            n: *n,
            delta: delta.clone(),
            matrix: m.load()?,
            primes: primes.clone(),
        },
        Command::Density {
            d,
            delta,
            bound,
            dirichlet,
            shards,
            ..
        } => CommandRequest::Density {
            d: *d,
            delta: delta.clone(),
            bound: *bound,
            dirichlet: dirichlet.clone(),
            shards: *shards,
        },
    })
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let outcome = match request(&args.command) {
        Ok(req) => cli::run(&req),
        Err(e) => cli::error_outcome(&e),
    };
    let csv = matches!(args.command, Command::Density { format: Format::Csv, .. }) && outcome.exit_code == 0;
    let text = if csv {
        cli::density_csv(&outcome.output)
    } else {
        serde_json::to_string_pretty(&outcome.output).expect("serializable") + "\n"
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(outcome.exit_code as u8)
}
