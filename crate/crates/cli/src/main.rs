use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vlcsec::presets::{self, Preset};
use vlcsec::scenario::Scenario;
use vlcsec::sweep::{self, Axis, Fixed, Mode, Range, SweepConfig};
use vlcsec::{fmt::g12, pdf, tables, verify};
use vlcsec_core::specfun::{PerturbedEi, StandardEi};
use vlcsec_core::{Error, NoiseParams};

const OK: u8 = 0;
const VERIFY_FAILED: u8 = 1;
const INPUT_ERROR: u8 = 2;
const NON_CONVERGENCE: u8 = 3;

const AFTER_HELP: &str = "\
Intensities on dB axes are 10*log10(value / 1 W).
Presets: fig2 fig3 fig4 fig5 fig6 fig7 fig7a fig7b fig8 fig9.
Exit codes: 0 success, 1 verification failure, 2 input or parse error,
3 numerical non-convergence.";

#[derive(Parser)]
#[command(name = "vlcsec", version, about = "Secrecy-capacity bounds for VLC wiretap channels with signal-dependent noise")]
#[command(after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Machine-readable CSV output for `gain` and `tables`.
    #[arg(long, global = true)]
    csv: bool,
    /// Write output here instead of stdout; a directory for multi-curve presets.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Seed for the Monte Carlo checks in `verify`.
    #[arg(long, global = true, default_value_t = 20_240_601)]
    seed: u64,
    /// Reproduce a figure (fig2 .. fig9).
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Line-of-sight gains and derived channel constants from a scenario file.
    Gain { scenario: PathBuf },
    /// Sweep one parameter and emit bounds as CSV.
    Sweep(SweepArgs),
    /// Sample the maxentropic input density.
    Pdf {
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Peak intensity A in W.
        #[arg(long, default_value_t = 1e6)]
        a: f64,
        #[arg(long, default_value_t = 101)]
        n_points: usize,
    },
    /// Recompute the two reference gap tables.
    Tables,
    /// Cross-check closed forms against the quadrature and Monte Carlo oracle.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: verify::Level,
        /// Negative control: perturb the Ei kernel used by the closed forms.
        #[arg(long, hide = true)]
        perturb_ei: bool,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Scenario file supplying gains and noise; flags below override it.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, value_enum)]
    axis: Option<Axis>,
    #[arg(long, allow_negative_numbers = true)]
    start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    stop: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum, default_value = "avg")]
    mode: Mode,
    #[arg(long, default_value_t = 0.3)]
    xi: f64,
    /// Fixed P in dB for average modes.
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    p_db: f64,
    /// Fixed A in dB for peak modes.
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    a_db: f64,
    /// Peak-to-average ratio A/P; selects the peak regime for `asymptotic`.
    #[arg(long)]
    a_over_p: Option<f64>,
    /// H_B/H_E; sets H_E = H_B/ratio.
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    h_b: Option<f64>,
    #[arg(long)]
    sigma2_b: Option<f64>,
    #[arg(long)]
    varsigma2_b: Option<f64>,
    #[arg(long)]
    sigma2_e: Option<f64>,
    #[arg(long)]
    varsigma2_e: Option<f64>,
}

/// Failure carrying its exit code.
struct Fail(u8, String);

impl Fail {
    fn input(msg: impl std::fmt::Display) -> Self {
        Fail(INPUT_ERROR, msg.to_string())
    }
}

fn core_fail(e: Error) -> Fail {
    let code = if matches!(e, Error::NonConvergence { .. }) { NON_CONVERGENCE } else { INPUT_ERROR };
    Fail(code, e.to_string())
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Fail> {
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Fail::input(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout().write_all(bytes).map_err(|e| Fail::input(e)),
    }
}

/// Named CSV blocks: one file each under `out`, or `# name label` sections on stdout.
fn emit_blocks(out: Option<&Path>, preset: &str, blocks: Vec<(String, Vec<u8>)>) -> Result<(), Fail> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Fail::input(format!("cannot create {}: {e}", dir.display())))?;
            for (label, bytes) in blocks {
                emit(Some(&dir.join(format!("{preset}_{label}.csv"))), &bytes)?;
            }
            Ok(())
        }
        None => {
            let mut all = Vec::new();
            for (i, (label, bytes)) in blocks.into_iter().enumerate() {
                if i > 0 {
                    all.push(b'\n');
                }
                all.extend_from_slice(format!("# {preset} {label}\n").as_bytes());
                all.extend_from_slice(&bytes);
            }
            emit(None, &all)
        }
    }
}

fn run_preset(name: &str, out: Option<&Path>) -> Result<u8, Fail> {
    let preset = presets::preset(name)
        .ok_or_else(|| Fail::input(format!("unknown preset `{name}`; expected one of {}", presets::NAMES.join(", "))))?;
    let mut code = OK;
    let blocks = match preset {
        Preset::Sweep(curves) => curves
            .into_iter()
            .map(|c| {
                let rows = c.config.run();
                if sweep::any_nonconvergence(&rows) {
                    code = NON_CONVERGENCE;
                }
                let mut buf = Vec::new();
                sweep::write_csv(&rows, &mut buf).expect("in-memory write");
                (c.label, buf)
            })
            .collect(),
        Preset::Pdf(curves) => curves
            .into_iter()
            .map(|c| {
                let rows = pdf::samples(c.alpha, c.a, c.n_points).map_err(core_fail)?;
                let mut buf = Vec::new();
                pdf::write_csv(&rows, &mut buf).expect("in-memory write");
                Ok((c.label, buf))
            })
            .collect::<Result<_, Fail>>()?,
    };
    emit_blocks(out, name, blocks)?;
    Ok(code)
}

fn cmd_gain(path: &Path, csv: bool, out: Option<&Path>) -> Result<u8, Fail> {
    let r = Scenario::load(path).and_then(|s| s.gain_report()).map_err(Fail::input)?;
    let text = if csv {
        format!(
            "h_b,h_e,ratio,m,n,degenerate_eve\n{},{},{},{},{},{}\n",
            g12(r.h_b),
            g12(r.h_e),
            g12(r.ratio),
            g12(r.m),
            g12(r.n),
            r.degenerate_eve
        )
    } else {
        let mut s = format!(
            "H_B      = {}\nH_E      = {}\nH_B/H_E  = {}\nM        = {}\nN        = {}\n",
            g12(r.h_b),
            g12(r.h_e),
            g12(r.ratio),
            g12(r.m),
            g12(r.n)
        );
        if r.degenerate_eve {
            s.push_str("warning: degenerate eavesdropper (H_E = 0); signal-dependent secrecy modes are undefined\n");
        }
        s
    };
    emit(out, text.as_bytes())?;
    Ok(OK)
}

fn sweep_config(a: &SweepArgs) -> Result<SweepConfig, Fail> {
    let missing = |f: &str| Fail::input(format!("sweep requires --{f} (or --preset)"));
    let axis = a.axis.ok_or_else(|| missing("axis"))?;
    let range = Range {
        start: a.start.ok_or_else(|| missing("start"))?,
        stop: a.stop.ok_or_else(|| missing("stop"))?,
        steps: a.steps.ok_or_else(|| missing("steps"))?,
    };
    let base = match &a.scenario {
        Some(p) => Some(Scenario::load(p).map_err(Fail::input)?),
        None => None,
    };
    let default_noise = (1.0, 1.5);
    let (bn, en) = match &base {
        Some(s) => ((s.bob.noise.sigma2, s.bob.noise.varsigma2), (s.eve.noise.sigma2, s.eve.noise.varsigma2)),
        None => (default_noise, default_noise),
    };
    let noise = |s: Option<f64>, v: Option<f64>, d: (f64, f64), who: &str| {
        NoiseParams::new(s.unwrap_or(d.0), v.unwrap_or(d.1)).map_err(|e| Fail::input(format!("{who} noise: {e}")))
    };
    let noise_b = noise(a.sigma2_b, a.varsigma2_b, bn, "Bob")?;
    let noise_e = noise(a.sigma2_e, a.varsigma2_e, en, "Eve")?;
    let h_b = a.h_b.or(base.map(|s| s.bob.gain)).unwrap_or(1.0);
    let h_e = match (a.ratio, &base) {
        (Some(r), _) => h_b / r,
        (None, Some(s)) if a.h_b.is_none() => s.eve.gain,
        (None, Some(s)) => h_b * s.eve.gain / s.bob.gain,
        (None, None) => h_b / 10.0,
    };
    let peak = matches!(a.mode, Mode::Peak | Mode::PeakSi) || (a.mode == Mode::Asymptotic && a.a_over_p.is_some());
    let fixed = Fixed {
        xi: a.xi,
        intensity_db: if peak { a.a_db } else { a.p_db },
        a_over_p: a.a_over_p,
        h_b,
        h_e,
        noise_b,
        noise_e,
    };
    SweepConfig::new(axis, range, fixed, a.mode).map_err(Fail::input)
}

fn cmd_sweep(a: &SweepArgs, out: Option<&Path>) -> Result<u8, Fail> {
    let cfg = sweep_config(a)?;
    let rows = cfg.run();
    let mut buf = Vec::new();
    sweep::write_csv(&rows, &mut buf).expect("in-memory write");
    emit(out, &buf)?;
    Ok(if sweep::any_nonconvergence(&rows) { NON_CONVERGENCE } else { OK })
}

fn cmd_pdf(alpha: f64, a: f64, n: usize, out: Option<&Path>) -> Result<u8, Fail> {
    let rows = pdf::samples(alpha, a, n).map_err(core_fail)?;
    let mut buf = Vec::new();
    pdf::write_csv(&rows, &mut buf).expect("in-memory write");
    emit(out, &buf)?;
    Ok(OK)
}

fn cmd_tables(csv: bool, out: Option<&Path>) -> Result<u8, Fail> {
    let cells = tables::compute().map_err(core_fail)?;
    let text = if csv { tables::render_csv(&cells) } else { tables::render_text(&cells) };
    emit(out, text.as_bytes())?;
    Ok(if cells.iter().all(|c| c.passed()) { OK } else { VERIFY_FAILED })
}

fn cmd_verify(level: verify::Level, seed: u64, perturb: bool, out: Option<&Path>) -> Result<u8, Fail> {
    let report = if perturb {
        verify::run(level, seed, &PerturbedEi { rel_error: 1e-3 })
    } else {
        verify::run(level, seed, &StandardEi)
    };
    emit(out, report.render().as_bytes())?;
    Ok(if report.passed() { OK } else { VERIFY_FAILED })
}

fn dispatch(cli: &Cli) -> Result<u8, Fail> {
    let out = cli.out.as_deref();
    if let Some(name) = &cli.preset {
        return match &cli.command {
            None | Some(Command::Sweep(_)) | Some(Command::Pdf { .. }) => run_preset(name, out),
            Some(_) => Err(Fail::input("--preset applies to `sweep` and `pdf` only")),
        };
    }
    match &cli.command {
        None => Err(Fail::input("no command given; see --help")),
        Some(Command::Gain { scenario }) => cmd_gain(scenario, cli.csv, out),
        Some(Command::Sweep(a)) => cmd_sweep(a, out),
        Some(Command::Pdf { alpha, a, n_points }) => cmd_pdf(*alpha, *a, *n_points, out),
        Some(Command::Tables) => cmd_tables(cli.csv, out),
        Some(Command::Verify { level, perturb_ei }) => cmd_verify(*level, cli.seed, *perturb_ei, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

