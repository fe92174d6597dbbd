//! Command-line front end: file formats, reports and command dispatch.

pub mod analysis;
pub mod format;
pub mod report;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use mtc_coset_core::coset::{solve_branching, CosetSystem};
use mtc_coset_core::generators::{minimal_model, pointed_cyclic, su2_level};
use mtc_coset_core::{fixtures, ModularData};

use crate::format::{emit, read_coset, read_modular, to_json, write_coset, write_modular, CosetFile};
use crate::report::Report;

/// Exit code for a clean run.
pub const EXIT_CLEAN: u8 = 0;
/// Exit code when an invariant or assumption fails.
pub const EXIT_VIOLATION: u8 = 1;
/// Exit code for unreadable or malformed input.
pub const EXIT_MALFORMED: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "mtc-coset", version, about = "Modular data and coset system verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write modular data produced by a generator.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
        /// Output file; stdout when omitted.
        #[arg(long, short, global = true)]
        out: Option<PathBuf>,
    },
    /// Check every invariant of a modular-data file.
    Validate {
        path: PathBuf,
        #[command(flatten)]
        sinks: ReportSinks,
    },
    /// Deligne product of two modular-data files.
    Product {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Coset system commands.
    Coset {
        #[command(subcommand)]
        command: CosetCommand,
    },
    /// Spectral commands.
    Spectral {
        #[command(subcommand)]
        command: SpectralCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenerateKind {
    /// Affine su(2) at level k.
    Su2 {
        #[arg(long)]
        level: i64,
    },
    /// Unitary Virasoro minimal model M(p,q).
    Minimal {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        q: i64,
    },
    /// Pointed category on Z_n with twist exp(πi t j²/n).
    Pointed {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        t: i64,
    },
    /// Deligne product of two modular-data files.
    Product { left: PathBuf, right: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum CosetCommand {
    /// Full diagnostic report for a coset system file.
    Analyze {
        path: PathBuf,
        #[command(flatten)]
        sinks: ReportSinks,
    },
    /// Enumerate branching matrices for three modular-data files.
    SolveBranching {
        c1: PathBuf,
        c2: PathBuf,
        ambient: PathBuf,
        /// Upper bound on every branching entry.
        #[arg(long, default_value_t = 2)]
        bound: u32,
        /// Output file for the solutions; stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Write a reference coset system.
    Fixture {
        name: FixtureName,
        /// Modular data used by the parametrized fixtures; Ising when omitted.
        #[arg(long)]
        base: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SpectralCommand {
    /// Joint diagonalization and spectral identities for a coset system file.
    Verify {
        path: PathBuf,
        #[command(flatten)]
        sinks: ReportSinks,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FixtureName {
    /// su2_1 ⊠ su2_1 ⊃ su2_2 ⊠ M(3,4).
    Ising,
    /// su2_2 ⊠ su2_1 ⊃ su2_3 ⊠ M(4,5).
    K2,
    /// X ⊃ 1 ⊠ X.
    Trivial,
    /// Vec ⊃ X ⊠ mirror(X).
    Double,
    /// X ⊃ X ⊠ 1.
    Spectator,
}

/// Report destinations; markdown goes to stdout when neither is given.
#[derive(Debug, Clone, clap::Args)]
pub struct ReportSinks {
    /// Markdown report file.
    #[arg(long)]
    pub markdown: Option<PathBuf>,
    /// JSON report file.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

impl ReportSinks {
    fn write(&self, report: &Report) -> Result<()> {
        if let Some(p) = &self.json {
            emit(Some(p), &to_json(report)?)?;
        }
        if self.markdown.is_some() || self.json.is_none() {
            emit(self.markdown.as_deref(), &report.to_markdown())?;
        }
        Ok(())
    }
}

/// Exit code for an error: core-library failures are violations, everything else is malformed input.
pub fn error_exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<mtc_coset_core::Error>().is_some() {
        EXIT_VIOLATION
    } else {
        EXIT_MALFORMED
    }
}

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Generate { kind, out } => {
            let md = generate(&kind)?;
            write_modular(out.as_deref(), &md)?;
            Ok(EXIT_CLEAN)
        }
        Command::Validate { path, sinks } => {
            let md = read_modular(&path)?;
            let report = analysis::validate_report(&md);
            sinks.write(&report)?;
            Ok(report.exit_code())
        }
        Command::Product { left, right, out } => {
            let md = read_modular(&left)?.deligne_product(&read_modular(&right)?);
            write_modular(out.as_deref(), &md)?;
            Ok(EXIT_CLEAN)
        }
        Command::Coset { command } => run_coset(command),
        Command::Spectral {
            command: SpectralCommand::Verify { path, sinks },
        } => {
            let cs = read_coset(&path)?;
            let mut report = Report::new(format!("Spectral verification of {}", path.display()));
            report.push(analysis::spectral_section(&cs));
            sinks.write(&report)?;
            Ok(report.exit_code())
        }
    }
}

fn run_coset(command: CosetCommand) -> Result<u8> {
    match command {
        CosetCommand::Analyze { path, sinks } => {
            let report = analyze_file(&path)?;
            sinks.write(&report)?;
            Ok(report.exit_code())
        }
        CosetCommand::SolveBranching {
            c1,
            c2,
            ambient,
            bound,
            out,
        } => {
            let (md1, md2, mdc) = (read_modular(&c1)?, read_modular(&c2)?, read_modular(&ambient)?);
            let sols = solve_branching(&md1, &md2, &mdc, bound)?;
            let files: Vec<CosetFile> = sols.iter().map(CosetFile::from_system).collect();
            match &out {
                Some(p) => {
                    emit(Some(p), &to_json(&files)?)?;
                    println!("solutions: {}", files.len());
                }
                None => {
                    emit(None, &to_json(&files)?)?;
                    eprintln!("solutions: {}", files.len());
                }
            }
            Ok(EXIT_CLEAN)
        }
        CosetCommand::Fixture { name, base, out } => {
            let x = match &base {
                Some(p) => read_modular(p)?,
                None => minimal_model(3, 4)?,
            };
            let cs = fixture(name, &x)?;
            write_coset(out.as_deref(), &cs)?;
            Ok(EXIT_CLEAN)
        }
    }
}

/// Modular data for a `generate` subcommand.
pub fn generate(kind: &GenerateKind) -> Result<ModularData> {
    Ok(match kind {
        GenerateKind::Su2 { level } => su2_level(*level)?,
        GenerateKind::Minimal { p, q } => minimal_model(*p, *q)?,
        GenerateKind::Pointed { n, t } => pointed_cyclic(*n, *t)?,
        GenerateKind::Product { left, right } => read_modular(left)?.deligne_product(&read_modular(right)?),
    })
}

pub fn fixture(name: FixtureName, x: &ModularData) -> Result<CosetSystem> {
    Ok(match name {
        FixtureName::Ising => fixtures::ising()?,
        FixtureName::K2 => fixtures::k2_diagonal()?,
        FixtureName::Trivial => fixtures::trivial(x)?,
        FixtureName::Double => fixtures::double(x)?,
        FixtureName::Spectator => fixtures::spectator(x)?,
    })
}

/// Full report for a coset file. Malformed files are errors; invalid systems are report failures.
pub fn analyze_file(path: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: CosetFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut report = Report::new(format!("Coset analysis of {}", path.display()));
    let (md1, md2, mdc) = file.resolve(&base)?;
    let z = file.branching_matrix(&md1, &md2, &mdc)?;
    let built = analysis::analyze_inputs(&mut report, &md1, &md2, &mdc, || {
        CosetSystem::new(md1.clone(), md2.clone(), mdc.clone(), z)
    });
    if let Some(cs) = built {
        analysis::coset_sections(&mut report, &cs);
    }
    Ok(report)
}
