use clap::{Args, Parser, Subcommand};
use scalediff::harness::{
    parse_grid, run_convergence, run_invariants, sample_ensemble, ExperimentConfig, EXIT_CRITERION, EXIT_PASS,
};
use scalediff::kernel::build_kernel_table;
use scalediff::processes::ProcessKind;
use scalediff::transform::{cf_gap_table, write_cf_csv};
use scalediff::{Error, NuParam, Result};
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "scalediff", version, about = "Scale-invariant singular diffusions: kernels, samplers, convergence checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Experiment config file (key = value lines with [section] headers).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    nu: Option<f64>,
    /// Scale, or a comma-separated list of scales for `converge`.
    #[arg(long = "N")]
    n: Option<String>,
    /// Time, or a comma-separated list.
    #[arg(long)]
    t: Option<String>,
    /// start:stop:count or a comma-separated list.
    #[arg(long = "q-grid", allow_hyphen_values = true)]
    q_grid: Option<String>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (kernel, sample, gcf; stdout if absent) or directory (converge, check).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    workers: Option<usize>,
    /// limit, sde or ctrw.
    #[arg(long)]
    process: Option<String>,
    /// Starting point in rescaled units.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulated transition density and CDF of φ_t(x0, ·).
    Kernel {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 512)]
        resolution: usize,
    },
    /// Sample paths of the rescaled process on {0} ∪ t.
    Sample {
        #[command(flatten)]
        common: Common,
    },
    /// Estimated and limit characteristic functions at the first t.
    Gcf {
        #[command(flatten)]
        common: Common,
    },
    /// Convergence study over the scales of N_list.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Also run the limit sampler as an N = ∞ control.
        #[arg(long)]
        control: bool,
    },
    /// Kernel invariant suite over the configured ν grid.
    Check {
        #[command(flatten)]
        common: Common,
        /// Multiplier applied to every invariant tolerance.
        #[arg(long)]
        invariant_scale: Option<f64>,
    },
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    parse_grid(key, v)
}

fn load(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(nu) = c.nu {
        cfg.nu = nu;
    }
    if let Some(n) = &c.n {
        cfg.n_list = list("N", n)?;
    }
    if let Some(t) = &c.t {
        cfg.t_list = list("t", t)?;
    }
    if let Some(q) = &c.q_grid {
        cfg.q_grid = parse_grid("q-grid", q)?;
    }
    if let Some(p) = c.paths {
        cfg.n_paths = p;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(kind) = &c.process {
        cfg.kind = kind.parse()?;
    }
    if let Some(x0) = c.x0 {
        cfg.x0 = x0;
    }
    if let Some(o) = &c.out {
        cfg.out_dir = o.clone();
    }
    cfg.validate()?;
    if let Some(w) = c.workers {
        if w == 0 {
            return Err(Error::Config("--workers must be >= 1".into()));
        }
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    Ok(cfg)
}

fn sink(c: &Common) -> Result<Box<dyn Write>> {
    Ok(match &c.out {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn single_n(cfg: &ExperimentConfig) -> Result<f64> {
    match cfg.n_list.as_slice() {
        [n] => Ok(*n),
        _ => Err(Error::Config("this subcommand takes a single --N".into())),
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Command::Kernel { common, resolution } => {
            let cfg = load(&common)?;
            let p = NuParam::new(cfg.nu)?;
            let tbl = build_kernel_table(&p, cfg.t_list[0], cfg.x0, resolution)?;
            let mut w = sink(&common)?;
            writeln!(w, "x_prime,phi,cdf")?;
            for ((y, f), c) in tbl.grid.iter().zip(&tbl.pdf).zip(&tbl.cdf) {
                writeln!(w, "{y},{f},{c}")?;
            }
            w.flush()?;
            Ok(EXIT_PASS)
        }
        Command::Sample { common } => {
            let cfg = load(&common)?;
            let p = NuParam::new(cfg.nu)?;
            let n = if cfg.kind == ProcessKind::Limit { f64::INFINITY } else { single_n(&cfg)? };
            let ens = sample_ensemble(cfg.kind, &p, n, cfg.x0, &cfg.t_list, cfg.n_paths, cfg.seed, cfg.sde)?;
            let mut w = sink(&common)?;
            ens.write_csv(&mut w)?;
            w.flush()?;
            Ok(EXIT_PASS)
        }
        Command::Gcf { common } => {
            let cfg = load(&common)?;
            let p = NuParam::new(cfg.nu)?;
            let n = if cfg.kind == ProcessKind::Limit { f64::INFINITY } else { single_n(&cfg)? };
            let t = cfg.t_list[0];
            let ens = sample_ensemble(cfg.kind, &p, n, cfg.x0, &[t], cfg.n_paths, cfg.seed, cfg.sde)?;
            let rows = cf_gap_table(&p, &ens.column(1), &cfg.q_grid, t, cfg.x0)?;
            write_cf_csv(&rows, sink(&common)?)?;
            Ok(EXIT_PASS)
        }
        Command::Converge { common, control } => {
            let cfg = load(&common)?;
            let r = run_convergence(&cfg, control)?;
            for row in r.rows.iter().chain(&r.control) {
                println!(
                    "N={:<8} t={:<5} max_gap={:.5} se={:.5} ks={:.5}",
                    row.n, row.t, row.max_gap, row.se, row.ks
                );
            }
            for v in &r.violations {
                eprintln!("criterion violated: {v}");
            }
            println!("{} ({})", if r.passed() { "PASS" } else { "FAIL" }, cfg.out_dir.display());
            Ok(r.exit_code())
        }
        Command::Check { common, invariant_scale } => {
            let mut cfg = load(&common)?;
            if let Some(nu) = common.nu {
                cfg.nu_grid = vec![nu];
            }
            if let Some(s) = invariant_scale {
                cfg.tolerances.invariant_scale = s;
                cfg.validate()?;
            }
            let r = run_invariants(&cfg)?;
            for f in r.failures() {
                eprintln!("invariant failed: {} nu={} value={:e} tolerance={:e}", f.name, f.nu, f.value, f.tolerance);
            }
            let failed = r.failures().count();
            println!("{}/{} invariants passed ({})", r.rows.len() - failed, r.rows.len(), cfg.out_dir.display());
            Ok(if failed == 0 { EXIT_PASS } else { EXIT_CRITERION })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("scalediff: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
