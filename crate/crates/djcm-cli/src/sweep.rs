//! Parameter sweeps: one run per value in a worker pool, plus an index.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::{ConfigError, Mode, RunConfig};
use crate::runner::{execute, NumericError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParameter {
    Zeta,
    Xi,
    G,
    Beta,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::Zeta => "zeta",
            SweepParameter::Xi => "xi",
            SweepParameter::G => "g",
            SweepParameter::Beta => "beta",
        }
    }

    /// Apply one sweep value to a copy of the base config. `beta` sweeps the
    /// magnitude, preserving the phase of the base amplitude.
    fn apply(&self, base: &RunConfig, value: f64) -> RunConfig {
        let mut cfg = base.clone();
        match self {
            SweepParameter::Zeta => cfg.zeta = value,
            SweepParameter::Xi => cfg.xi = value,
            SweepParameter::G => cfg.g = value,
            SweepParameter::Beta => {
                let old = Complex64::new(base.beta_re, base.beta_im);
                let new = if old.norm() == 0.0 {
                    Complex64::new(value, 0.0)
                } else {
                    old / Complex64::new(old.norm(), 0.0) * Complex64::new(value, 0.0)
                };
                cfg.beta_re = new.re;
                cfg.beta_im = new.im;
            }
        }
        cfg
    }
}

#[derive(Debug, Serialize)]
struct SweepRunRecord {
    value: f64,
    dir: String,
    status: &'static str,
    exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
}

#[derive(Debug, Serialize)]
struct SweepIndex {
    parameter: &'static str,
    values: Vec<f64>,
    runs: Vec<SweepRunRecord>,
}

/// Run the sweep; failures are recorded in the index and do not stop the
/// remaining values. Returns the number of failed runs.
pub fn run_sweep(
    base: &RunConfig,
    param: SweepParameter,
    values: &[f64],
    out_dir: &Path,
    jobs: usize,
) -> anyhow::Result<usize> {
    if values.is_empty() {
        return Err(ConfigError("sweep values must be non-empty".into()).into());
    }
    if (param == SweepParameter::Zeta || param == SweepParameter::Xi)
        && base.mode == Mode::Standard
    {
        return Err(ConfigError(format!("cannot sweep {} in standard mode", param.name())).into());
    }
    std::fs::create_dir_all(out_dir)?;

    // deduplicate directory names for repeated values
    let mut dirs: Vec<String> = Vec::with_capacity(values.len());
    for &v in values {
        let mut name = format!("{}_{}", param.name(), v);
        let mut k = 1;
        while dirs.contains(&name) {
            name = format!("{}_{}_{k}", param.name(), v);
            k += 1;
        }
        dirs.push(name);
    }

    let next = AtomicUsize::new(0);
    let records: Mutex<Vec<Option<SweepRunRecord>>> =
        Mutex::new((0..values.len()).map(|_| None).collect());
    let workers = jobs.clamp(1, values.len());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= values.len() {
                    break;
                }
                let value = values[k];
                let cfg = param.apply(base, value);
                let dir = out_dir.join(&dirs[k]);
                let outcome = cfg
                    .validate()
                    .map_err(anyhow::Error::from)
                    .and_then(|_| execute(&cfg, &dir));
                let record = match outcome {
                    Ok(()) => SweepRunRecord {
                        value,
                        dir: dirs[k].clone(),
                        status: "ok",
                        exit_code: 0,
                        message: None,
                    },
                    Err(err) => SweepRunRecord {
                        value,
                        dir: dirs[k].clone(),
                        status: "error",
                        exit_code: classify(&err),
                        message: Some(format!("{err}")),
                    },
                };
                records.lock().unwrap()[k] = Some(record);
            });
        }
    });

    let runs: Vec<SweepRunRecord> = records
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every sweep slot visited"))
        .collect();
    let failed = runs.iter().filter(|r| r.status != "ok").count();
    let index = SweepIndex {
        parameter: param.name(),
        values: values.to_vec(),
        runs,
    };
    std::fs::write(
        out_dir.join("index.json"),
        serde_json::to_string_pretty(&index)? + "\n",
    )?;
    Ok(failed)
}

/// Exit-code classification shared with `main`.
pub fn classify(err: &anyhow::Error) -> i32 {
    if err.is::<ConfigError>() {
        2
    } else if err.is::<NumericError>() {
        3
    } else {
        1
    }
}
