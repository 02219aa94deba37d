use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fakeplane::dimension::dimension;
use fakeplane::lfunctions::{covolume, dirichlet_l_value, DirichletCharacter};
use fakeplane::report::{chain_string, run_all, Config};
use fakeplane::scalars::fmt_rat;
use fakeplane::singularities::{euler_height, hj_expand, signature_height, CyclicSingularity, OrbifoldSurface};
use fakeplane::surface::{is_fake_projective_plane, kodaira_classify, SurfaceInvariants};
use fakeplane::Error;

#[derive(Parser)]
#[command(name = "fakeplane", version, about = "Exact verification of a fake projective plane and its elliptic quotients")]
struct Cli {
    /// JSON config; the built-in defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    Gamma,
    GammaTilde,
}

#[derive(Subcommand)]
enum Command {
    /// Covolume of the lattice.
    Volume,
    /// Closed form of L(3, chi_7).
    Lvalue {
        /// Also print a decimal approximation with this many digits.
        #[arg(long)]
        digits: Option<usize>,
    },
    /// Hirzebruch-Jung chain of the (n,q) singularity.
    Resolve { n: u32, q: u32 },
    /// Euler and signature heights of an orbifold surface given as JSON.
    Heights { file: PathBuf },
    /// Dimension of weight-k automorphic forms.
    Dims {
        #[arg(long, value_enum)]
        group: Group,
        #[arg(long)]
        weight: u32,
    },
    /// Kodaira dimension of surface invariants given as JSON.
    Classify { file: PathBuf },
    /// Full verification report.
    Report {
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Write to this file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn timestamp() -> String {
    std::env::var("SOURCE_DATE_EPOCH").unwrap_or_else(|_| {
        std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs().to_string()).unwrap_or_default()
    })
}

fn run(cli: Cli) -> Result<u8, Error> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Volume => println!("{}", fmt_rat(&covolume(&config.volume_input())?)),
        Command::Lvalue { digits } => {
            let l = dirichlet_l_value(3, &DirichletCharacter::from_discriminant(-7)?)?;
            println!("{l}");
            if let Some(d) = digits {
                println!("{}", l.to_approximation((d as f64 * 3.33) as u32 + 64).to_decimal(d));
            }
        }
        Command::Resolve { n, q } => println!("{}", chain_string(&hj_expand(&CyclicSingularity::new(n, q)?))),
        Command::Heights { file } => {
            let x: OrbifoldSurface = read_json(&file)?;
            println!("euler_height = {}", fmt_rat(&euler_height(&x)));
            println!("signature_height = {}", fmt_rat(&signature_height(&x)));
        }
        Command::Dims { group, weight } => {
            let name = match group {
                Group::Gamma => "gamma",
                Group::GammaTilde => "gamma-tilde",
            };
            println!("{}", dimension(&config.dataset(name)?, weight)?);
        }
        Command::Classify { file } => {
            let s: SurfaceInvariants = read_json(&file)?;
            s.check()?;
            let c = kodaira_classify(&s)?;
            println!("kodaira = {}", c.kodaira);
            for r in &c.trace {
                let ex: Vec<String> = r.excluded.iter().map(ToString::to_string).collect();
                println!("  {}: excludes {} ({})", r.rule, ex.join(", "), r.reason);
            }
            println!("minimal = {}", c.minimal);
            println!("fake_projective_plane = {}", is_fake_projective_plane(&s, c.kodaira));
        }
        Command::Report { format, output } => {
            let report = run_all(&config, Some(timestamp()))?;
            let text = match format {
                Format::Json => report.to_json(),
                Format::Md => report.to_markdown(),
            };
            match output {
                Some(p) => std::fs::write(&p, text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
                None => print!("{text}"),
            }
            return Ok(report.exit_code() as u8);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
