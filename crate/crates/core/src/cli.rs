//! Command-line front end.
//!
//! Exit codes: 0 success, 1 failed verification or runtime/I-O error,
//! 2 usage or configuration error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::analysis::{
    figure_data, sweep, sweep_table, Axis, Figure, FigureOptions, Param, SweepRow,
};
use crate::cgf::{affinity, default_gc_grid, gc_residual, linspace, PAPER_SCALE};
use crate::config::{load_config, ParamOverrides};
use crate::cumulants::{cumulant_rates, cumulants, MAX_ORDER};
use crate::model::{make_rates, ModelParams};
use crate::table::{Cell, Table};
use crate::trajectory::{ensemble_cumulants, ft_histogram};
use crate::{Error, Result};

/// Environment variable giving the default worker-thread count.
pub const THREADS_ENV: &str = "SQUEEZED_FCS_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_GC_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_CLOSED_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_FT_TOLERANCE: f64 = 0.05;

#[derive(Debug, Parser)]
#[command(
    name = "squeezed-fcs",
    version,
    about = "Counting statistics of boson exchange between a two-level system and two squeezed reservoirs",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Parameter file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    gamma_l: Option<f64>,
    #[arg(long)]
    gamma_r: Option<f64>,
    #[arg(long)]
    temp_l: Option<f64>,
    #[arg(long)]
    temp_r: Option<f64>,
    #[arg(long)]
    occ_l: Option<f64>,
    #[arg(long)]
    occ_r: Option<f64>,
    #[arg(long)]
    x_l: Option<f64>,
    #[arg(long)]
    x_r: Option<f64>,
    /// Highest cumulant order.
    #[arg(long, default_value_t = 4)]
    order: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scale CGF values and empirical cumulants by the factor 2 of the
    /// printed closed forms.
    #[arg(long)]
    paper_convention: bool,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Cumulants, scaled ratios, Fano factor and affinity as one CSV row.
    Cumulants {
        #[command(flatten)]
        common: Common,
    },
    /// Sweep one or two parameters, e.g. `--axis x_l=0:2:21`.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        axis: String,
        #[arg(long)]
        axis2: Option<String>,
    },
    /// Data for one figure: 1b, 1cd, 2, 3, 4 or 5.
    Figures {
        #[command(flatten)]
        common: Common,
        figure: String,
        /// Points per axis.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Check S(λ) = S(−λ−A) on a λ grid.
    VerifyGc {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_GC_TOLERANCE)]
        tolerance: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Check P(q)/P(−q) = e^{qA} on simulated windows.
    VerifyFt {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5.0)]
        window: f64,
        #[arg(long, default_value_t = 1_000_000)]
        windows: usize,
        /// Allowed relative deviation of the fitted slope from A.
        #[arg(long, default_value_t = DEFAULT_FT_TOLERANCE)]
        tolerance: f64,
    },
    /// Empirical cumulant rates from an ensemble of trajectories.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 400)]
        trajectories: usize,
        #[arg(long, default_value_t = 1e4)]
        t_max: f64,
    },
    /// Fano factor times affinity, at a point or over a sweep.
    Tur {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        axis: Option<String>,
        #[arg(long)]
        axis2: Option<String>,
    },
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: ModelParams,
    /// Merged file and flag values.
    pub overrides: ParamOverrides,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub order: usize,
    pub paper_convention: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Cumulants,
    Sweep {
        axis: Axis,
        axis2: Option<Axis>,
    },
    Figures {
        figure: Figure,
        points: Option<usize>,
    },
    VerifyGc {
        tolerance: f64,
        points: usize,
    },
    VerifyFt {
        window: f64,
        windows: usize,
        tolerance: f64,
    },
    Simulate {
        trajectories: usize,
        t_max: f64,
    },
    Tur {
        axis: Option<Axis>,
        axis2: Option<Axis>,
    },
}

/// Parses `argv` (program name first). Help and version requests come back
/// as errors whose exit code is 0.
pub fn parse_args<I, T>(argv: I) -> std::result::Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let invalid = |e: Error| Cli::command().error(ErrorKind::ValueValidation, e.to_string());
    let axis = |s: &str| s.parse::<Axis>().map_err(invalid);
    let (common, command) = match cli.command {
        CommandArgs::Cumulants { common } => (common, Command::Cumulants),
        CommandArgs::Sweep {
            common,
            axis: a,
            axis2,
        } => {
            let axis2 = axis2.as_deref().map(axis).transpose()?;
            (
                common,
                Command::Sweep {
                    axis: axis(&a)?,
                    axis2,
                },
            )
        }
        CommandArgs::Figures {
            common,
            figure,
            points,
        } => {
            let figure = figure.parse().map_err(invalid)?;
            (common, Command::Figures { figure, points })
        }
        CommandArgs::VerifyGc {
            common,
            tolerance,
            points,
        } => (common, Command::VerifyGc { tolerance, points }),
        CommandArgs::VerifyFt {
            common,
            window,
            windows,
            tolerance,
        } => (
            common,
            Command::VerifyFt {
                window,
                windows,
                tolerance,
            },
        ),
        CommandArgs::Simulate {
            common,
            trajectories,
            t_max,
        } => (
            common,
            Command::Simulate {
                trajectories,
                t_max,
            },
        ),
        CommandArgs::Tur {
            common,
            axis: a,
            axis2,
        } => {
            let a = a.as_deref().map(axis).transpose()?;
            let axis2 = axis2.as_deref().map(axis).transpose()?;
            if a.is_none() && axis2.is_some() {
                return Err(invalid(Error::Domain("--axis2 needs --axis".into())));
            }
            (common, Command::Tur { axis: a, axis2 })
        }
    };
    check_command(&command).map_err(invalid)?;
    if !(1..=MAX_ORDER).contains(&common.order) {
        return Err(invalid(Error::Domain(format!(
            "--order must be in 1..={MAX_ORDER}, got {}",
            common.order
        ))));
    }
    let file = match &common.config {
        Some(path) => load_config(path).map_err(invalid)?,
        None => ParamOverrides::default(),
    };
    let overrides = flag_overrides(&common).over(&file);
    let params = overrides.resolve().map_err(invalid)?;
    Ok(RunConfig {
        command,
        params,
        overrides,
        out: common.out,
        seed: common.seed,
        order: common.order,
        paper_convention: common.paper_convention,
    })
}

fn flag_overrides(c: &Common) -> ParamOverrides {
    let mut o = ParamOverrides::default();
    let flags = [
        (Param::Omega0, c.omega0),
        (Param::GammaL, c.gamma_l),
        (Param::GammaR, c.gamma_r),
        (Param::TempL, c.temp_l),
        (Param::TempR, c.temp_r),
        (Param::OccL, c.occ_l),
        (Param::OccR, c.occ_r),
        (Param::XL, c.x_l),
        (Param::XR, c.x_r),
    ];
    for (p, v) in flags {
        if let Some(v) = v {
            o.set(p, v);
        }
    }
    o
}

fn check_command(command: &Command) -> Result<()> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{name} must be finite and positive, got {v}"
            )))
        }
    };
    match *command {
        Command::Figures {
            points: Some(0), ..
        }
        | Command::VerifyGc { points: 0, .. } => {
            Err(Error::Domain("--points must be positive".into()))
        }
        Command::VerifyGc { tolerance, .. } => positive("--tolerance", tolerance),
        Command::VerifyFt {
            window,
            windows,
            tolerance,
        } => {
            positive("--window", window)?;
            positive("--tolerance", tolerance)?;
            if windows == 0 {
                return Err(Error::Domain("--windows must be positive".into()));
            }
            Ok(())
        }
        Command::Simulate {
            trajectories,
            t_max,
        } => {
            positive("--t-max", t_max)?;
            if trajectories < 2 {
                return Err(Error::Domain("--trajectories must be at least 2".into()));
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Runs a parsed invocation and returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    configure_threads();
    match execute(config) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

/// Parses and runs; used by the binary.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(argv) {
        Ok(config) => run(&config),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
    }
}

fn configure_threads() {
    let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    else {
        return;
    };
    // a second call finds the pool already built, which is fine
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
}

// Ok(false) signals a failed check.
fn execute(config: &RunConfig) -> Result<bool> {
    let params = &config.params;
    let scale = if config.paper_convention {
        PAPER_SCALE
    } else {
        1.0
    };
    match &config.command {
        Command::Cumulants => {
            emit(config, &cumulants_table(params, config.order)?)?;
            Ok(true)
        }
        Command::Sweep { axis, axis2 } => {
            emit(config, &sweep_table(&sweep(params, axis, axis2.as_ref())?))?;
            Ok(true)
        }
        Command::Figures { figure, points } => {
            let options = FigureOptions {
                points: *points,
                paper_convention: config.paper_convention,
            };
            emit(
                config,
                &figure_data(*figure, &config.overrides.assignments(), options)?,
            )?;
            Ok(true)
        }
        Command::VerifyGc { tolerance, points } => {
            let a = affinity(params)?.value();
            let grid = match *points {
                101 => default_gc_grid(a),
                n => {
                    let ends = default_gc_grid(a);
                    linspace(ends[0], ends[ends.len() - 1], n)
                }
            };
            let residual = scale * gc_residual(params, &grid)?;
            let pass = residual <= *tolerance;
            let mut t = Table::new([
                "A",
                "lambda_min",
                "lambda_max",
                "points",
                "residual",
                "tolerance",
                "pass",
            ]);
            t.push(vec![
                a.into(),
                grid[0].into(),
                grid[grid.len() - 1].into(),
                grid.len().into(),
                residual.into(),
                (*tolerance).into(),
                pass.into(),
            ]);
            emit(config, &t)?;
            Ok(pass)
        }
        Command::VerifyFt {
            window,
            windows,
            tolerance,
        } => {
            let h = ft_histogram(params, *window, *windows, config.seed)?;
            emit(config, &h.table())?;
            let pass = if h.affinity == 0.0 {
                h.slope.abs() <= 2.0 * h.slope_std_error
            } else {
                ((h.slope - h.affinity) / h.affinity).abs() <= *tolerance
            };
            eprintln!(
                "slope {} ± {} against A = {} ({} of {} windows used): {}",
                crate::table::format_sig(h.slope, 6),
                crate::table::format_sig(h.slope_std_error, 2),
                crate::table::format_sig(h.affinity, 6),
                h.windows_used,
                h.windows_total,
                if pass { "PASS" } else { "FAIL" }
            );
            Ok(pass)
        }
        Command::Simulate {
            trajectories,
            t_max,
        } => {
            let e = ensemble_cumulants(params, *trajectories, *t_max, config.seed)?;
            let jet = cumulant_rates(&make_rates(params)?, config.order)?;
            let mut t = Table::new(["order", "estimate", "std_error", "jet", "z"]);
            for n in 1..=config.order.min(e.estimates.len()) {
                let (k, se) = e.get(n).expect("order within estimates");
                let j = jet[n - 1];
                let z = if se > 0.0 { Some((k - j) / se) } else { None };
                t.push(vec![
                    n.into(),
                    (scale * k).into(),
                    (scale * se).into(),
                    (scale * j).into(),
                    z.into(),
                ]);
            }
            emit(config, &t)?;
            Ok(true)
        }
        Command::Tur { axis, axis2 } => {
            let rows = match axis {
                Some(a) => sweep(params, a, axis2.as_ref())?,
                None => vec![SweepRow::evaluate(params)?],
            };
            emit(config, &sweep_table(&rows))?;
            Ok(rows.iter().all(|r| r.tur_ok))
        }
    }
}

fn cumulants_table(params: &ModelParams, order: usize) -> Result<Table> {
    let r = cumulants(params, order)?;
    let mut header = vec!["order".to_owned()];
    let mut row: Vec<Cell> = vec![order.into()];
    for (prefix, values) in [("j_canonical", &r.canonical), ("j_paper", &r.paper)] {
        for (n, v) in values.iter().enumerate() {
            header.push(format!("{prefix}{}", n + 1));
            row.push((*v).into());
        }
    }
    for (n, c) in r.scaled.iter().enumerate() {
        header.push(format!("C{}", n + 1));
        row.push((*c).into());
    }
    header.extend(["F".to_owned(), "A".to_owned()]);
    row.extend([r.fano.into(), r.affinity.into()]);
    let mut t = Table::new(header);
    t.push(row);
    Ok(t)
}

fn emit(config: &RunConfig, table: &Table) -> Result<()> {
    match &config.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write_csv(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            table.write_csv(stdout.lock())?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<RunConfig, clap::Error> {
        parse_args(std::iter::once("squeezed-fcs").chain(args.iter().copied()))
    }

    #[test]
    fn subcommands_parse() {
        let c = parse(&[
            "cumulants",
            "--occ-l",
            "1",
            "--occ-r",
            "0.1",
            "--order",
            "4",
        ])
        .unwrap();
        assert_eq!(c.command, Command::Cumulants);
        assert_eq!(c.order, 4);
        let c = parse(&[
            "verify-gc",
            "--temp-l",
            "0.7",
            "--temp-r",
            "0.4",
            "--omega0",
            "0.5",
        ])
        .unwrap();
        assert_eq!(
            c.command,
            Command::VerifyGc {
                tolerance: DEFAULT_GC_TOLERANCE,
                points: 101
            }
        );
        let c = parse(&["figures", "1cd", "--points", "11"]).unwrap();
        assert_eq!(
            c.command,
            Command::Figures {
                figure: Figure::Fig1cd,
                points: Some(11)
            }
        );
        let c = parse(&["sweep", "--axis", "x_l=0:1:3"]).unwrap();
        assert!(matches!(c.command, Command::Sweep { axis2: None, .. }));
    }

    #[test]
    fn usage_errors() {
        let kind = |args: &[&str]| parse(args).unwrap_err().kind();
        assert_eq!(
            kind(&[]),
            ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
        );
        assert_eq!(kind(&["bogus"]), ErrorKind::InvalidSubcommand);
        assert_eq!(kind(&["cumulants", "--nope"]), ErrorKind::UnknownArgument);
        assert_eq!(
            kind(&["cumulants", "--order", "13"]),
            ErrorKind::ValueValidation
        );
        assert_eq!(
            kind(&["cumulants", "--gamma-l", "0"]),
            ErrorKind::ValueValidation
        );
        assert_eq!(kind(&["figures", "7"]), ErrorKind::ValueValidation);
        assert_eq!(
            kind(&["sweep", "--axis", "beta=1"]),
            ErrorKind::ValueValidation
        );
        assert_eq!(
            kind(&["simulate", "--trajectories", "1"]),
            ErrorKind::ValueValidation
        );
        for args in [&[][..], &["bogus"], &["cumulants", "--order", "0"]] {
            assert_eq!(
                main_with_args(std::iter::once("squeezed-fcs").chain(args.iter().copied())),
                EXIT_USAGE
            );
        }
    }

    #[test]
    fn cumulant_row() {
        let t = cumulants_table(&crate::config::default_params(), 2).unwrap();
        assert_eq!(
            t.header,
            [
                "order",
                "j_canonical1",
                "j_canonical2",
                "j_paper1",
                "j_paper2",
                "C1",
                "C2",
                "F",
                "A"
            ]
        );
        let csv = t.to_csv_string().unwrap();
        assert!(
            csv.lines().nth(1).unwrap().contains(",0.428571428571429,"),
            "{csv}"
        );
    }
}
