//! The `macs` command line: solve, evaluate, brute-force, sweep, synthesize,
//! export and validate mirror conference schedules.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use macs::io::{self, ScheduleFile};
use macs::metrics::per_timezone_report;
use macs::{
    enumerate_optimal, evaluate, materialize, pareto_front, run_sweep, solve, validate, Instance, MacsError,
    MetricsReport, OracleConfig, Schedule, SolveResult, SolverConfig, SweepGrid,
};

/// Exit code for infeasible results and rule violations.
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_ERROR: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "macs", version, about = "Mirror-program conference scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Search for a schedule maximizing attendance under the speaker threshold.
    Solve {
        #[command(flatten)]
        input: InstanceArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Schedule file to write; printed to standard output when absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Directory for the per-attendee and per-time-zone reports.
        #[arg(long)]
        reports: Option<PathBuf>,
    },
    /// Score an existing schedule.
    Evaluate {
        #[command(flatten)]
        input: InstanceArgs,
        #[arg(short, long)]
        schedule: PathBuf,
        /// Directory for the per-attendee and per-time-zone reports.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive search, for small instances.
    Oracle {
        #[command(flatten)]
        input: InstanceArgs,
        /// Maximum number of evaluations.
        #[arg(long, default_value_t = OracleConfig::default().cap)]
        cap: u64,
        #[arg(long, default_value_t = OracleConfig::default().anchor_stride_min)]
        anchor_stride: i32,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Re-solve over a grid of criteria and write the tradeoff reports.
    Sweep {
        #[command(flatten)]
        input: InstanceArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Report directory.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Draw a synthetic conference instance from a time-zone histogram.
    Synth {
        /// Number of registrants.
        #[arg(short = 'n', long, default_value_t = 355)]
        count: usize,
        /// `utc_offset_min,count` CSV; the bundled synthetic histogram by default.
        #[arg(long)]
        histogram: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write registrant CSV instead of a full instance.
        #[arg(long)]
        registrants: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Write one iCalendar file per mirror.
    ExportIcal {
        #[command(flatten)]
        input: InstanceArgs,
        #[arg(short, long)]
        schedule: PathBuf,
        /// Calendar date of UTC minute 0.
        #[arg(long, default_value = "2020-06-23", value_parser = parse_date)]
        epoch: NaiveDate,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Check an instance, and optionally a schedule against it.
    Validate {
        #[arg(short, long)]
        instance: PathBuf,
        #[arg(short, long)]
        schedule: Option<PathBuf>,
    },
}

/// Instance file plus the per-run overrides of its parameters.
#[derive(Debug, Args)]
struct InstanceArgs {
    #[arg(short, long)]
    instance: PathBuf,
    #[arg(long)]
    mirrors: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    /// Minutes per talk.
    #[arg(long)]
    talk_slot: Option<u32>,
}

impl InstanceArgs {
    fn load(&self) -> Result<Instance, MacsError> {
        let mut inst = io::load_instance(&self.instance)?;
        if let Some(m) = self.mirrors {
            inst.mirrors = m;
        }
        if let Some(d) = self.delta {
            inst.delta = d;
        }
        if let Some(o) = self.omega {
            inst.omega = o;
        }
        if let Some(t) = self.talk_slot {
            inst.talk_slot_min = t;
        }
        inst.validate()?;
        Ok(inst)
    }
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, default_value_t = SolverConfig::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = SolverConfig::default().restarts)]
    restarts: usize,
    /// Moves per restart.
    #[arg(long, default_value_t = SolverConfig::default().moves_per_restart)]
    moves: usize,
    #[arg(long, default_value_t = SolverConfig::default().anchor_stride_min)]
    anchor_stride: i32,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            seed: self.seed,
            restarts: self.restarts,
            moves_per_restart: self.moves,
            anchor_stride_min: self.anchor_stride,
            ..SolverConfig::default()
        }
    }
}

/// Sweep axes as comma-separated lists. Missing axes stay at the instance value.
#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long, value_delimiter = ',')]
    deltas: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    omegas: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    talk_slots: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    mirror_counts: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    comfort_widths: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    presentation_widths: Vec<u32>,
}

fn or<T: Clone>(given: &[T], default: Vec<T>) -> Vec<T> {
    if given.is_empty() {
        default
    } else {
        given.to_vec()
    }
}

fn parse_date(s: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| format!("expected YYYY-MM-DD: {e}"))
}

impl GridArgs {
    fn grid(&self, inst: &Instance) -> SweepGrid {
        let base = SweepGrid::at_defaults(inst);
        SweepGrid {
            deltas: or(&self.deltas, base.deltas),
            omegas: or(&self.omegas, base.omegas),
            talk_slots_min: or(&self.talk_slots, base.talk_slots_min),
            mirror_counts: or(&self.mirror_counts, base.mirror_counts),
            comfort_widths_min: (!self.comfort_widths.is_empty()).then(|| self.comfort_widths.clone()),
            presentation_widths_min: (!self.presentation_widths.is_empty()).then(|| self.presentation_widths.clone()),
            window_start_min: base.window_start_min,
        }
    }
}

fn clock(min: u32) -> String {
    format!("{:02}:{:02}", min / 60, min % 60)
}

fn summary(schedule: &Schedule, m: &MetricsReport, feasible: bool) -> String {
    let anchors: Vec<String> = schedule.anchors.iter().map(|a| a.to_string()).collect();
    format!(
        "anchors: {}\nday start: {}\norder: [{}]\nattendance: {:.4} ({}/{})\nspeakers: {:.4} ({}/{})\n\
         non-overlap violations: {}\nfeasible: {feasible}\n",
        anchors.join(", "),
        clock(schedule.day_start_min),
        schedule.order.join(", "),
        m.attendance_ratio,
        m.satisfied_attendees,
        m.attendees.len(),
        m.speaker_presence_ratio,
        m.satisfied_speakers,
        m.speakers.len(),
        m.non_overlap_violations.len(),
    )
}

fn schedule_file(inst: &Instance, r: &SolveResult) -> Result<ScheduleFile, MacsError> {
    let mut file = ScheduleFile::new(r.schedule.clone(), materialize(&r.schedule, inst)?);
    file.feasible = Some(r.feasible);
    file.objective = Some(r.objective);
    file.metrics = Some(r.metrics.clone());
    Ok(file)
}

/// Writes the schedule to `out`, or to standard output when absent, and the
/// summary to standard output (standard error when the schedule went there).
fn emit(file: &ScheduleFile, out: Option<&Path>, summary: &str) -> Result<(), MacsError> {
    match out {
        Some(path) => {
            io::save_schedule(path, file)?;
            print!("{summary}");
        }
        None => {
            print!("{}", io::schedule_to_string(file));
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn reports(inst: &Instance, schedule: &Schedule, metrics: &MetricsReport, dir: &Path) -> Result<(), MacsError> {
    let ms = materialize(schedule, inst)?;
    let per_tz = per_timezone_report(inst, &ms)?;
    for path in io::write_reports(Some(metrics), &per_tz, &[], dir)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn status(feasible: bool) -> i32 {
    if feasible {
        0
    } else {
        EXIT_INFEASIBLE
    }
}

fn execute(command: Command) -> Result<i32, MacsError> {
    match command {
        Command::Solve {
            input,
            solver,
            out,
            reports: report_dir,
        } => {
            let inst = input.load()?;
            let r = solve(&inst, &solver.config())?;
            emit(&schedule_file(&inst, &r)?, out.as_deref(), &summary(&r.schedule, &r.metrics, r.feasible))?;
            if let Some(dir) = report_dir {
                reports(&inst, &r.schedule, &r.metrics, &dir)?;
            }
            Ok(status(r.feasible))
        }
        Command::Evaluate { input, schedule, out } => {
            let inst = input.load()?;
            let file = io::load_schedule(&schedule)?;
            let violations = validate(&file.schedule, &inst);
            if !violations.is_empty() {
                for v in &violations {
                    eprintln!("violation: {v}");
                }
                return Ok(EXIT_INFEASIBLE);
            }
            let m = evaluate(&inst, &file.schedule, inst.delta)?;
            let feasible = macs::solver::is_feasible(&m, inst.omega);
            print!("{}", summary(&file.schedule, &m, feasible));
            if let Some(dir) = out {
                reports(&inst, &file.schedule, &m, &dir)?;
            }
            Ok(status(feasible))
        }
        Command::Oracle {
            input,
            cap,
            anchor_stride,
            out,
        } => {
            let inst = input.load()?;
            let cfg = OracleConfig {
                cap,
                anchor_stride_min: anchor_stride,
                ..OracleConfig::default()
            };
            let r = enumerate_optimal(&inst, &cfg, inst.delta, inst.omega)?;
            emit(&schedule_file(&inst, &r)?, out.as_deref(), &summary(&r.schedule, &r.metrics, r.feasible))?;
            Ok(status(r.feasible))
        }
        Command::Sweep {
            input,
            solver,
            grid,
            out,
        } => {
            let inst = input.load()?;
            let records = run_sweep(&inst, &grid.grid(&inst), &solver.config())?;
            for path in io::write_reports(None, &Default::default(), &records, &out)? {
                eprintln!("wrote {}", path.display());
            }
            let ok: Vec<_> = records.iter().filter(|r| r.error.is_none()).cloned().collect();
            let mut stdout = std::io::stdout().lock();
            if !ok.is_empty() {
                let front = pareto_front(&ok)?;
                let _ = writeln!(stdout, "pareto front ({} of {} points):", front.len(), records.len());
                let _ = write!(stdout, "{}", io::format_sweep_csv(&front));
            }
            for r in records.iter().filter(|r| r.error.is_some()) {
                eprintln!("grid point failed: {}", r.error.as_deref().unwrap_or_default());
            }
            Ok(0)
        }
        Command::Synth {
            count,
            histogram,
            seed,
            registrants,
            out,
        } => {
            let hist = match histogram {
                Some(p) => io::load_histogram(p)?,
                None => io::sample_histogram(),
            };
            let text = if registrants {
                io::write_registrants_csv(&io::synth_registrants(&hist, count, seed)?)
            } else {
                io::instance_to_string(&io::synthetic_conference(&hist, count, seed)?)
            };
            match out {
                Some(path) => fs::write(&path, text).map_err(|e| MacsError::Io { path, source: e })?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::ExportIcal {
            input,
            schedule,
            epoch,
            out,
        } => {
            let inst = input.load()?;
            let file = io::load_schedule(&schedule)?;
            let violations = validate(&file.schedule, &inst);
            if !violations.is_empty() {
                for v in &violations {
                    eprintln!("violation: {v}");
                }
                return Ok(EXIT_INFEASIBLE);
            }
            let ms = materialize(&file.schedule, &inst)?;
            for path in io::export_ical(&ms, epoch, &out)? {
                println!("{}", path.display());
            }
            Ok(0)
        }
        Command::Validate { instance, schedule } => {
            let inst = io::load_instance(&instance)?;
            let Some(path) = schedule else {
                println!("instance ok");
                return Ok(0);
            };
            let file = io::load_schedule(&path)?;
            let violations = validate(&file.schedule, &inst);
            for v in &violations {
                println!("violation: {v}");
            }
            println!("{} violation(s)", violations.len());
            Ok(if violations.is_empty() { 0 } else { EXIT_INFEASIBLE })
        }
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
