use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use multisec_core::card::builtin_cards;
use multisec_core::hilbert::hilbert;
use multisec_core::{analyze, verify, AnalysisCard, DegreeWindow, Error, Marker, USet};

#[derive(Parser)]
#[command(
    name = "multisec",
    version,
    about = "Class groups and canonical modules of multi-section rings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a JSON card.
    Analyze {
        card: PathBuf,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print a Hilbert function table as CSV.
    Hilbert {
        card: PathBuf,
        /// T, R, omegaT or omegaR.
        #[arg(long)]
        ring: Marker,
        /// Box per coordinate, e.g. `0:4,-2:6`.
        #[arg(long = "box")]
        bounds: Option<String>,
    },
    /// Run the builtin verification suite.
    Verify {
        /// veronese, fano-product, gorenstein-grid, blowup or all.
        name: String,
    },
    /// Builtin cards.
    Cards {
        #[command(subcommand)]
        action: CardsAction,
    },
}

#[derive(Subcommand)]
enum CardsAction {
    /// Write every builtin card to `<dir>/<name>.json`.
    Dump { dir: PathBuf },
}

enum Failure {
    Io(String),
    Core(Error),
    VerificationFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) | Failure::VerificationFailed => 1,
            Failure::Core(Error::Validation { .. } | Error::DimensionMismatch { .. }) => 2,
            Failure::Core(Error::HypothesisFailed(_)) => 3,
            Failure::Core(Error::NoOracle(_)) => 4,
            Failure::Core(_) => 1,
        }
    }
}

fn read_card(path: &Path) -> Result<AnalysisCard, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(AnalysisCard::from_json(&text)?)
}

fn parse_box(spec: &str) -> Result<(Vec<i64>, Vec<i64>), Error> {
    let bad = |part: &str| Error::Validation {
        field: "box".into(),
        message: format!("expected lo:hi, found `{part}`"),
    };
    spec.split(',')
        .map(|part| {
            let (lo, hi) = part.split_once(':').ok_or_else(|| bad(part))?;
            let lo = lo.trim().parse().map_err(|_| bad(part))?;
            let hi = hi.trim().parse().map_err(|_| bad(part))?;
            Ok((lo, hi))
        })
        .collect::<Result<Vec<(i64, i64)>, Error>>()
        .map(|v| v.into_iter().unzip())
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let mut out = std::io::stdout().lock();
    let io = |e: std::io::Error| Failure::Io(e.to_string());
    match cli.command {
        Command::Analyze { card, json } => {
            let card = read_card(&card)?;
            let report = analyze(&card)?;
            if json {
                write!(out, "{}", report.to_json()).map_err(io)?;
            } else {
                write!(out, "{report}").map_err(io)?;
            }
            if !report.hypotheses_hold() {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Hilbert { card, ring, bounds } => {
            let setup = read_card(&card)?.validate()?;
            if !setup.variety.has_oracle() {
                return Err(Error::NoOracle(setup.variety.name.clone()).into());
            }
            let u = match ring {
                Marker::OmegaT => setup.compute_u()?,
                _ => USet::default(),
            };
            let window = match bounds {
                Some(spec) => {
                    let (lo, hi) = parse_box(&spec)?;
                    if lo.len() != setup.s() {
                        return Err(Error::Validation {
                            field: "box".into(),
                            message: format!("expected {} ranges, found {}", setup.s(), lo.len()),
                        }
                        .into());
                    }
                    DegreeWindow::new(u, lo, hi)?
                }
                None => DegreeWindow::default_for(ring, setup.s(), u),
            };
            let table = hilbert(&setup, ring, &window)?;
            write!(out, "{}", table.to_csv(setup.s())).map_err(io)?;
        }
        Command::Verify { name } => {
            let rows = verify::run(&name)?;
            let mut failed = 0;
            for a in &rows {
                let tag = if a.passed() { "PASS" } else { "FAIL" };
                failed += usize::from(!a.passed());
                writeln!(
                    out,
                    "{tag} {}: {}: expected {}, computed {}",
                    a.example, a.label, a.expected, a.computed
                )
                .map_err(io)?;
            }
            writeln!(out, "{} assertions, {failed} failed", rows.len()).map_err(io)?;
            if failed > 0 {
                return Err(Failure::VerificationFailed);
            }
        }
        Command::Cards {
            action: CardsAction::Dump { dir },
        } => {
            fs::create_dir_all(&dir).map_err(io)?;
            for b in builtin_cards() {
                let path = dir.join(format!("{}.json", b.key));
                fs::write(&path, b.card.to_json()).map_err(io)?;
                writeln!(out, "{}", path.display()).map_err(io)?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(f) => {
            match &f {
                Failure::Io(msg) => eprintln!("error: {msg}"),
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::VerificationFailed => eprintln!("error: verification failed"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
