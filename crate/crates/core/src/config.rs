//! Run-wide settings shared by the library entry points and the command line.

use serde::Serialize;

use crate::error::{RelicError, Result};

/// Default cap on evaluations for exhaustive searches.
pub const DEFAULT_BUDGET: u64 = 100_000_000;
/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "RELIC_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Text,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub budget: u64,
    pub seed: u64,
    /// `None` uses every available core.
    pub workers: Option<usize>,
    pub output: OutputFormat,
    pub self_check: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            budget: DEFAULT_BUDGET,
            seed: 0,
            workers: None,
            output: OutputFormat::Text,
            self_check: false,
        }
    }
}

impl RunConfig {
    /// Defaults with the budget taken from the environment when set.
    pub fn from_env() -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            cfg.budget = v
                .trim()
                .parse()
                .map_err(|_| RelicError::Invalid(format!("{BUDGET_ENV} must be a positive integer, got `{v}`")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(RelicError::Invalid("budget must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(RelicError::Invalid("workers must be positive".into()));
        }
        Ok(())
    }

    /// Run `f` on a pool sized by `workers`. Results do not depend on the pool size.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.workers {
            None => Ok(f()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| RelicError::Invalid(format!("cannot start worker pool: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}
