//! Run configuration: command-line flags layered over an optional TOML file.

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use twistor_core::potential::ModuliConfig;
use twistor_core::Complex64;

/// Parses `"re,im"` (or a bare real number).
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |x: &str| x.parse::<f64>().map_err(|e| format!("bad number {x:?} in {s:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected \"re,im\", got {s:?}")),
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config file,
/// then to built-in defaults.
#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// Puncture parameter p as "re,im"
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    pub p: Option<Complex64>,
    /// Coordinate u as "re,im"
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    pub u: Option<Complex64>,
    /// Coordinate v as "re,im"
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    pub v: Option<Complex64>,
    /// Perturbation order N
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Word depth of the integral tables
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Comma-separated weights t
    #[arg(long, global = true, value_delimiter = ',')]
    pub t_list: Option<Vec<f64>>,
    /// Number of lambda points on the unit circle
    #[arg(long, global = true)]
    pub lambda_grid: Option<usize>,
    /// Finite-difference step in (u, v)
    #[arg(long, global = true)]
    pub fd_step: Option<f64>,
    /// Residual tolerance deciding the exit status
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed of the sampler
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of sampled points
    #[arg(long, global = true)]
    pub count: Option<usize>,
    /// Output file; a .csv extension selects the table format
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file with any of the above keys (flags win)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Contents of a TOML config file.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    p: Option<String>,
    u: Option<String>,
    v: Option<String>,
    order: Option<usize>,
    depth: Option<usize>,
    t_list: Option<Vec<f64>>,
    lambda_grid: Option<usize>,
    fd_step: Option<f64>,
    tol: Option<f64>,
    seed: Option<u64>,
    count: Option<usize>,
    out: Option<PathBuf>,
}

#[derive(Serialize, Debug, Clone)]
pub struct RunConfig {
    pub p: Complex64,
    pub u: Complex64,
    pub v: Complex64,
    pub order: usize,
    pub depth: Option<usize>,
    pub t_list: Vec<f64>,
    pub lambda_grid: usize,
    pub fd_step: f64,
    pub tol: Option<f64>,
    pub seed: u64,
    pub count: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn read_file(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
}

impl RunConfig {
    pub fn resolve(flags: &Flags) -> Result<Self, String> {
        let file = match &flags.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let cplx = |flag: Option<Complex64>, file: &Option<String>, default: Complex64| -> Result<Complex64, String> {
            match (flag, file) {
                (Some(z), _) => Ok(z),
                (None, Some(s)) => parse_complex(s),
                (None, None) => Ok(default),
            }
        };
        let cfg = Self {
            p: cplx(flags.p, &file.p, Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2))?,
            u: cplx(flags.u, &file.u, Complex64::new(1.0, 0.0))?,
            v: cplx(flags.v, &file.v, Complex64::new(0.3, 0.2))?,
            order: flags.order.or(file.order).unwrap_or(3),
            depth: flags.depth.or(file.depth),
            t_list: flags.t_list.clone().or(file.t_list).unwrap_or_else(|| vec![0.0, 0.02, 0.04, 0.08]),
            lambda_grid: flags.lambda_grid.or(file.lambda_grid).unwrap_or(8),
            fd_step: flags.fd_step.or(file.fd_step).unwrap_or(twistor_core::geometry::FD_STEP),
            tol: flags.tol.or(file.tol),
            seed: flags.seed.or(file.seed).unwrap_or(1),
            count: flags.count.or(file.count).unwrap_or(10),
            out: flags.out.clone().or(file.out),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        if self.lambda_grid == 0 {
            return Err("--lambda-grid must be positive".into());
        }
        if self.fd_step.is_nan() || self.fd_step <= 0.0 {
            return Err("--fd-step must be positive".into());
        }
        if let Some(t) = self.tol {
            if t.is_nan() || t <= 0.0 {
                return Err("--tol must be positive".into());
            }
        }
        if self.t_list.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err("--t-list entries must be finite and nonnegative".into());
        }
        self.moduli().map(|_| ())
    }

    pub fn moduli(&self) -> Result<ModuliConfig, String> {
        ModuliConfig::new(self.p, self.u, self.v).map_err(|e| e.to_string())
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}
