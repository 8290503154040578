use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rtc_core::io::{apply_config, apply_setting, emit, format_number};
use rtc_core::selftest::{self, Hooks, Level};
use rtc_core::special_integrals::{GasParameters, QuadratureConfig};
use rtc_core::sweep::{run_sweep, SweepSpec};
use rtc_core::thermo::{build_theta_table, make_state, MomentEvaluator, TableOptions, ThetaSource, Validation, RECURRENCE_TOL};
use rtc_core::transport::Method;
use rtc_core::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Transport coefficients of a relativistic polyatomic gas: Maxwellian
/// iteration with two or three moments, and Chapman-Enskog.
#[derive(Debug, Parser)]
#[command(name = "rtc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate ν, χ, μ over a grid of γ and a.
    ///
    /// Settings come from flags, then from the key=value file named by
    /// RTC_CONFIG, then from the defaults.
    Sweep(SweepArgs),
    /// Run the built-in consistency checks.
    Selftest(SelftestArgs),
    /// Print θ_{k,j} and θ*_{k,n} by recurrence and by quadrature.
    Theta(ThetaArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Smallest γ = mc²/(kT) [default: 1]
    #[arg(long)]
    gamma_min: Option<String>,
    /// Largest γ [default: 1000]
    #[arg(long)]
    gamma_max: Option<String>,
    /// Number of γ values, at least 2 [default: 4]
    #[arg(long)]
    points: Option<String>,
    /// log or linear [default: log]
    #[arg(long)]
    spacing: Option<String>,
    /// Comma-separated internal-degree exponents, each > -1 [default: 0]
    #[arg(long)]
    a_values: Option<String>,
    /// Comma-separated subset of mi2, mi3, cem [default: mi2,mi3,cem]
    #[arg(long)]
    methods: Option<String>,
    /// Relaxation time, >= 0 [default: 1]
    #[arg(long)]
    tau: Option<String>,
    /// Particle number density, > 0 [default: 1]
    #[arg(long)]
    n_density: Option<String>,
    /// as-printed or pattern-consistent [default: as-printed]
    #[arg(long)]
    entry_variant: Option<String>,
    /// csv or json [default: csv]
    #[arg(long)]
    output_format: Option<String>,
    /// Relative quadrature tolerance [default: 1e-10]
    #[arg(long)]
    rel_tol: Option<String>,
}

impl SweepArgs {
    fn settings(&self) -> [(&'static str, &Option<String>); 11] {
        [
            ("gamma_min", &self.gamma_min),
            ("gamma_max", &self.gamma_max),
            ("points", &self.points),
            ("spacing", &self.spacing),
            ("a_values", &self.a_values),
            ("methods", &self.methods),
            ("tau", &self.tau),
            ("n_density", &self.n_density),
            ("entry_variant", &self.entry_variant),
            ("output_format", &self.output_format),
            ("rel_tol", &self.rel_tol),
        ]
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(value_enum, default_value = "quick")]
    level: LevelArg,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    /// Perturb a stored star moment so the shift check must fail.
    #[arg(long, hide = true)]
    corrupt_table: bool,
}

#[derive(Debug, Args)]
struct ThetaArgs {
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value_t = 4)]
    j_max: usize,
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Parse(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("rtc: {e}");
    ExitCode::from(exit_code(e))
}

fn write_stdout(text: &str) -> ExitCode {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rtc: writing output: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn resolve_spec(args: &SweepArgs) -> Result<SweepSpec, Error> {
    let mut spec = SweepSpec::default();
    if let Some(path) = std::env::var_os("RTC_CONFIG") {
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Parse(format!("RTC_CONFIG {}: {e}", path.to_string_lossy())))?;
        apply_config(&mut spec, &text).map_err(|e| Error::Parse(format!("RTC_CONFIG {}: {e}", path.to_string_lossy())))?;
    }
    for (key, value) in args.settings() {
        if let Some(v) = value {
            apply_setting(&mut spec, key, v)?;
        }
    }
    spec.validate()?;
    Ok(spec)
}

fn cmd_sweep(args: &SweepArgs) -> ExitCode {
    let spec = match resolve_spec(args) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let output = match run_sweep(&spec) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    for (i, msg) in &output.failures {
        let r = &output.rows[*i];
        eprintln!("rtc: gamma={} a={} {}: {} ({msg})", r.gamma, r.a, r.method, r.status.as_str());
    }
    // No sign is known for the Chapman-Enskog bulk viscosity, so report any nonpositive value.
    for r in output.rows.iter().filter(|r| r.method == Method::Cem) {
        if let Some(nu_hat) = r.nu_hat.filter(|v| *v <= 0.0) {
            eprintln!(
                "rtc: note: cem bulk viscosity nonpositive at gamma={} a={} (nu_hat {nu_hat:e})",
                r.gamma, r.a
            );
        }
    }
    let code = write_stdout(&emit(&output.rows, spec.output_format));
    if code != ExitCode::SUCCESS {
        return code;
    }
    if output.all_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}

fn cmd_selftest(args: &SelftestArgs) -> ExitCode {
    let level = match args.level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let checks = selftest::run(
        level,
        Hooks {
            corrupt_table: args.corrupt_table,
        },
    );
    let text = match args.format {
        ReportFormat::Text => checks
            .iter()
            .map(|c| format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
            .collect(),
        ReportFormat::Json => match serde_json::to_string_pretty(&checks) {
            Ok(s) => s + "\n",
            Err(e) => {
                eprintln!("rtc: {e}");
                return ExitCode::from(EXIT_FAILURE);
            }
        },
    };
    let code = write_stdout(&text);
    if code != ExitCode::SUCCESS {
        return code;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        eprintln!("rtc: {failed} of {} checks failed", checks.len());
        ExitCode::from(EXIT_FAILURE)
    }
}

fn theta_dump(args: &ThetaArgs) -> Result<(String, f64), Error> {
    let cfg = QuadratureConfig::with_rel_tol(args.rel_tol);
    cfg.validate()?;
    let gas = GasParameters::new(args.a, 1.0)?;
    let state = make_state(args.gamma, 1.0, &gas, &cfg)?;
    let opts = TableOptions {
        source: ThetaSource::Recurrence,
        validation: Validation::None,
    };
    let table = build_theta_table(&state, &gas, &cfg, args.j_max, opts)?;
    let eval = MomentEvaluator::new(args.gamma, &gas, &cfg)?;
    let mut out = String::from("moment,k,j,recurrence,quadrature,gap\n");
    let mut worst: f64 = 0.0;
    let mut line = |name: &str, (k, j): (usize, usize), rec: f64, quad: f64| {
        let gap = if rec == quad { 0.0 } else { ((rec - quad) / quad).abs() };
        worst = worst.max(gap);
        out.push_str(&format!(
            "{name},{k},{j},{},{},{}\n",
            format_number(rec),
            format_number(quad),
            format_number(gap)
        ));
    };
    for (idx, rec) in table.theta_entries() {
        line("theta", idx, rec, eval.theta(idx.0, idx.1)?);
    }
    for (idx, rec) in table.theta_star_entries() {
        line("theta_star", idx, rec, eval.theta_star(idx.0, idx.1)?);
    }
    Ok((out, worst))
}

fn cmd_theta(args: &ThetaArgs) -> ExitCode {
    match theta_dump(args) {
        Ok((text, worst)) => {
            let code = write_stdout(&text);
            if code == ExitCode::SUCCESS && worst >= RECURRENCE_TOL {
                eprintln!("rtc: largest relative gap {worst:e} exceeds {RECURRENCE_TOL:e}");
                return ExitCode::from(EXIT_FAILURE);
            }
            code
        }
        Err(e) => fail(&e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Selftest(args) => cmd_selftest(args),
        Command::Theta(args) => cmd_theta(args),
    }
}
