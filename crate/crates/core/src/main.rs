use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rtaylor::exact::Rat;
use rtaylor::fields::{dictionary, dictionary_notes, FieldName, FieldSpec, NPHI};
use rtaylor::pipeline::{
    export_trajectory, repro_intro, run_proof, single_run, verify_bounds, write_run_csv, PipelineConfig, Report, Target,
};
use rtaylor::topology::Verdict;

#[derive(Parser)]
#[command(name = "rtaylor", version, about = "Round Taylor integration and periodic-orbit proof checker")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reproduce a worked example.
    Repro {
        #[command(subcommand)]
        what: Repro,
    },
    /// Check part of the proof.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// A single Round Taylor run of W, G or U.
    Run {
        #[arg(long)]
        field: String,
        #[arg(long)]
        a: Rat,
        #[arg(long)]
        b: Rat,
        #[arg(long)]
        t: Rat,
        #[arg(long)]
        steps: u32,
        #[arg(long, default_value_t = 14)]
        grid_exp: u32,
        #[arg(long, default_value_t = 2)]
        order: u32,
        /// Write z_0..z_k here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Non-certified exports for plotting.
    Export {
        #[command(subcommand)]
        what: Export,
    },
    /// Print built-in tables.
    Dump {
        #[command(subcommand)]
        what: Dump,
    },
}

#[derive(Subcommand)]
enum Repro {
    /// The ten-step scalar table.
    Intro {
        #[arg(long, default_value_t = 6)]
        grid_exp: u32,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct ProofOpts {
    /// key=value file overriding the published constants.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run everything on one thread.
    #[arg(long)]
    serial: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Verify {
    /// Dictionary bounds and hypothesis constants.
    Bounds {
        /// Only this dictionary entry (and those it references); repeatable.
        #[arg(long)]
        phi: Vec<usize>,
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        opts: ProofOpts,
    },
    /// Corner runs and sign checks at b0.
    Lemma1 {
        #[command(flatten)]
        opts: ProofOpts,
    },
    /// Corner runs, sign checks and angle at the lower b.
    Lemma2 {
        #[command(flatten)]
        opts: ProofOpts,
    },
    /// Corner runs, sign checks and angle at the upper b.
    Lemma3 {
        #[command(flatten)]
        opts: ProofOpts,
    },
    /// Implicit function region around the center run.
    Lemma4 {
        #[command(flatten)]
        opts: ProofOpts,
    },
    /// Angle comparisons against 7π/18.
    Theta {
        #[command(flatten)]
        opts: ProofOpts,
    },
    /// Every stage plus the periodicity certificate.
    Full {
        #[command(flatten)]
        opts: ProofOpts,
    },
}

#[derive(Subcommand)]
enum Export {
    /// Body positions along a W trajectory as CSV.
    Trajectory {
        /// Defaults to a0.
        #[arg(long)]
        a: Option<Rat>,
        /// Defaults to b0.
        #[arg(long)]
        b: Option<Rat>,
        /// Defaults to one full period, 36 t0.
        #[arg(long)]
        t_end: Option<Rat>,
        #[arg(long, default_value_t = 100)]
        steps: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum Dump {
    /// Every φ_i with its definition and printed bound pair.
    Phi,
}

fn load_config(opts: &ProofOpts) -> Result<PipelineConfig, String> {
    let mut cfg = match &opts.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            PipelineConfig::parse(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => PipelineConfig::default(),
    };
    if opts.serial {
        cfg.parallel = false;
    }
    Ok(cfg)
}

fn emit(report: &Report, path: Option<&PathBuf>, timing: bool) -> Result<(), String> {
    let json = report.to_json(timing);
    match path {
        Some(p) => std::fs::write(p, json + "\n").map_err(|e| format!("{}: {e}", p.display()))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn summary(report: &Report) {
    for s in &report.stages {
        eprintln!("{:<20} {:?}", s.name, s.verdict);
    }
    for d in &report.discrepancies {
        eprintln!("discrepancy: {d}");
    }
    eprintln!("verdict: {:?}", report.verdict);
}

fn dump_phi(out: &mut dyn Write) -> io::Result<()> {
    let d = dictionary();
    for i in 1..=NPHI {
        let b = d.table(i);
        writeln!(out, "phi{i} = {}", d.def(i))?;
        writeln!(out, "  B(phi{i}) = [{}, {}]", b.lo(), b.hi())?;
        if let Some(n) = dictionary_notes(i) {
            writeln!(out, "  note: {n}")?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Verdict, String> {
    match cli.cmd {
        Cmd::Repro { what: Repro::Intro { grid_exp, report } } => {
            let r = repro_intro(grid_exp);
            for row in &r.intro {
                eprintln!("{:>40} {:>16} {}", row.y.to_string(), row.z.to_string(), if row.matches { "ok" } else { "MISMATCH" });
            }
            emit(&r, report.as_ref(), false)?;
            summary(&r);
            Ok(r.verdict)
        }
        Cmd::Verify { what } => {
            let (r, opts) = match what {
                Verify::Bounds { phi, budget, opts } => {
                    let mut cfg = load_config(&opts)?;
                    if let Some(b) = budget {
                        cfg.budget = b;
                    }
                    let only = if phi.is_empty() { None } else { Some(phi.as_slice()) };
                    (verify_bounds(&cfg, only), opts)
                }
                Verify::Lemma1 { opts } => (run_proof(&load_config(&opts)?, Target::Lemma1), opts),
                Verify::Lemma2 { opts } => (run_proof(&load_config(&opts)?, Target::Lemma2), opts),
                Verify::Lemma3 { opts } => (run_proof(&load_config(&opts)?, Target::Lemma3), opts),
                Verify::Lemma4 { opts } => (run_proof(&load_config(&opts)?, Target::Lemma4), opts),
                Verify::Theta { opts } => (run_proof(&load_config(&opts)?, Target::Theta), opts),
                Verify::Full { opts } => (run_proof(&load_config(&opts)?, Target::Full), opts),
            };
            emit(&r, opts.report.as_ref(), opts.timing)?;
            summary(&r);
            Ok(r.verdict)
        }
        Cmd::Run { field, a, b, t, steps, grid_exp, order, csv, report } => {
            let f = match FieldName::parse(&field) {
                Some(f @ (FieldName::W | FieldName::G | FieldName::U)) => f,
                _ => return Err(format!("--field must be W, G or U, got {field:?}")),
            };
            let (r, rec) = single_run(f, &t, &a, &b, steps, grid_exp, order, csv.is_some());
            if let Some(p) = csv {
                let spec = FieldSpec::get(f);
                let labels: Vec<&str> = spec.coords.iter().map(|c| c.label).collect();
                let mut w = BufWriter::new(File::create(&p).map_err(|e| format!("{}: {e}", p.display()))?);
                write_run_csv(&rec, &labels, &mut w).map_err(|e| e.to_string())?;
            }
            emit(&r, report.as_ref(), false)?;
            summary(&r);
            Ok(r.verdict)
        }
        Cmd::Export { what: Export::Trajectory { a, b, t_end, steps, out } } => {
            let k = PipelineConfig::default().constants;
            let a = a.unwrap_or(k.a0);
            let b = b.unwrap_or(k.b0);
            let t_end = t_end.unwrap_or_else(|| Rat::int(36) * &k.t0);
            let mut w = BufWriter::new(File::create(&out).map_err(|e| format!("{}: {e}", out.display()))?);
            let s = export_trajectory(&a, &b, &t_end, steps, &mut w).map_err(|e| e.to_string())?;
            w.flush().map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string_pretty(&s).map_err(|e| e.to_string())?);
            Ok(Verdict::Pass)
        }
        Cmd::Dump { what: Dump::Phi } => {
            let stdout = io::stdout();
            match dump_phi(&mut stdout.lock()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => return Err(e.to_string()),
                _ => {}
            }
            Ok(Verdict::Pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(v) => ExitCode::from(v.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
