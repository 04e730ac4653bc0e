use std::path::PathBuf;

use clap::Args;
use sigma_nabla_core::padic::max_precision;
use sigma_nabla_core::series::DEFAULT_MAX_WIDTH;
use sigma_nabla_core::Error;

pub const WINDOW_ENV: &str = "SIGMA_NABLA_MAX_WINDOW";

/// Options shared by every command.
#[derive(Clone, Debug, Args)]
pub struct JobConfig {
    /// Expected prime; documents over another prime are rejected.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Residue degree: module inputs must have q = p^f.
    #[arg(long, global = true)]
    pub f: Option<u32>,
    /// Relative precision for scalars written as integers or fractions.
    #[arg(long, global = true)]
    pub prec: Option<u32>,
    /// Maximum series window width.
    #[arg(long, global = true, env = WINDOW_ENV, default_value_t = DEFAULT_MAX_WIDTH)]
    pub window: usize,
    /// Degree bound for horizontal sections.
    #[arg(long, global = true, default_value_t = 32)]
    pub kmax: usize,
    /// Step bound for the nilpotence probe.
    #[arg(long, global = true, default_value_t = 20)]
    pub nmax: usize,
    /// Relative tolerance for complex magnitudes.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,
    /// Where to write result documents.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig { p: None, f: None, prec: None, window: DEFAULT_MAX_WIDTH, kmax: 32, nmax: 20, tol: 1e-6, out: None }
    }
}

impl JobConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if let Some(p) = self.p {
            if !sigma_nabla_core::padic::is_prime(p) {
                return Err(Error::InvalidInput(format!("--p {p} is not prime")));
            }
        }
        if self.prec == Some(0) {
            return Err(Error::InvalidInput("--prec must be at least 1".into()));
        }
        if self.f == Some(0) {
            return Err(Error::InvalidInput("--f must be at least 1".into()));
        }
        if self.window < 8 {
            return Err(Error::InvalidInput(format!("window width {} is below 8", self.window)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidInput("--tol must be positive".into()));
        }
        Ok(())
    }

    /// Relative precision used when reading scalars over `p`.
    pub fn prec_for(&self, p: u64) -> Result<u32, Error> {
        let cap = max_precision(p);
        match self.prec {
            Some(n) if n > cap => Err(Error::InvalidInput(format!("--prec {n} exceeds the maximum {cap} for p = {p}"))),
            Some(n) => Ok(n),
            None => Ok(cap.min(20)),
        }
    }

    pub fn check_prime(&self, p: u64) -> Result<(), Error> {
        match self.p {
            Some(expected) if expected != p => Err(Error::PrimeMismatch(expected, p)),
            _ => Ok(()),
        }
    }

    pub fn check_q(&self, p: u64, q: u64) -> Result<(), Error> {
        if let Some(f) = self.f {
            if p.checked_pow(f) != Some(q) {
                return Err(Error::InvalidInput(format!("q = {q} is not {p}^{f}")));
            }
        }
        Ok(())
    }
}
