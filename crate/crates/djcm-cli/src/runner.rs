//! Run execution: evolve, sample observables, emit CSV + manifest.

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use anyhow::Context;

use djcm::analytic::AnalyticEngine;
use djcm::dispersive::cat_state;
use djcm::hilbert::StateVector;
use djcm::model::{invariant_expectation, InitialCondition};
use djcm::observables::{atomic_entropy, inversion, mandel_q, mean_photon};
use djcm::oracle::{evolve_rk4, FrameExactEngine, IntegratorConfig, Method};

use crate::config::{
    DerivedQuantities, Engine, Mode, Observable, RunConfig, RunManifest, CSV_SCHEMA,
};

/// Numeric failure during a run; mapped to exit code 3.
#[derive(Debug)]
pub struct NumericError(pub String);

impl std::fmt::Display for NumericError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericError {}

fn numeric(e: djcm::Error) -> anyhow::Error {
    NumericError(e.to_string()).into()
}

/// Execute a validated config, writing one CSV per observable plus the
/// manifest into `out_dir`. Data files are a pure function of the config;
/// the wall clock lives only in the manifest.
pub fn execute(cfg: &RunConfig, out_dir: &Path) -> anyhow::Result<()> {
    let started = Instant::now();
    let p = cfg.params()?;
    let space = cfg.fock_space(&p)?;
    let times = cfg.time_grid();
    let init = match cfg.mode {
        Mode::Driven | Mode::Standard => InitialCondition::excited(cfg.beta()),
        Mode::Dispersive => InitialCondition::superposition(cfg.beta(), cfg.phi),
    };

    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(times.len()); cfg.observables.len()];
    let mut sample = |t: f64, state: &StateVector| -> djcm::Result<()> {
        for (slot, obs) in cfg.observables.iter().enumerate() {
            let value = match obs {
                Observable::Inversion => inversion(state)?,
                Observable::Nphoton => mean_photon(state)?,
                Observable::Mandelq => mandel_q(state)?,
                Observable::Entropy => atomic_entropy(state)?,
                Observable::Invariant => invariant_expectation(state, t, &p)?,
            };
            columns[slot].push(value);
        }
        Ok(())
    };

    match cfg.engine {
        Engine::Analytic => match cfg.mode {
            Mode::Dispersive => {
                for &t in &times {
                    let st = cat_state(t, &p, cfg.beta(), cfg.phi, space).map_err(numeric)?;
                    sample(t, &st).map_err(numeric)?;
                }
            }
            _ => {
                let engine = AnalyticEngine::new(&p, &init, space).map_err(numeric)?;
                for &t in &times {
                    let st = engine.state_at(t).map_err(numeric)?;
                    sample(t, &st).map_err(numeric)?;
                }
            }
        },
        Engine::Frame => {
            let engine = FrameExactEngine::new(&p, space).map_err(numeric)?;
            let psi0 = init.state(space).map_err(numeric)?;
            let mut inner: djcm::Result<()> = Ok(());
            engine
                .for_each_state(&psi0, &times, |_, t, st| {
                    if inner.is_ok() {
                        inner = sample(t, st);
                    }
                })
                .map_err(numeric)?;
            inner.map_err(numeric)?;
        }
        Engine::Rk4 => {
            let psi0 = init.state(space).map_err(numeric)?;
            let traj = evolve_rk4(
                &psi0,
                &times,
                &p,
                space,
                &IntegratorConfig {
                    dt: 1e-3,
                    method: Method::Rk4,
                },
            )
            .map_err(numeric)?;
            for (k, st) in traj.states().map_err(numeric)?.iter().enumerate() {
                sample(times[k], st).map_err(numeric)?;
            }
        }
    }

    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    for (slot, obs) in cfg.observables.iter().enumerate() {
        write_csv(
            &out_dir.join(format!("{}.csv", obs.file_stem())),
            &times,
            &columns[slot],
        )?;
    }

    let manifest = RunManifest {
        tool: "djcm",
        version: env!("CARGO_PKG_VERSION").to_string(),
        csv_schema: CSV_SCHEMA,
        config: cfg.clone(),
        derived: DerivedQuantities::new(cfg, &p, space.dim()),
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    let manifest_json = serde_json::to_string_pretty(&manifest)?;
    fs::write(out_dir.join("manifest.json"), manifest_json + "\n")?;
    Ok(())
}

/// `t,value` rows at 17 significant digits, LF line endings, schema header.
fn write_csv(path: &Path, times: &[f64], values: &[f64]) -> anyhow::Result<()> {
    let mut buf = String::with_capacity(times.len() * 48 + 32);
    buf.push_str("# ");
    buf.push_str(CSV_SCHEMA);
    buf.push('\n');
    buf.push_str("t,value\n");
    for (t, v) in times.iter().zip(values.iter()) {
        buf.push_str(&format!("{t:.16e},{v:.16e}\n"));
    }
    let mut file =
        fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    file.write_all(buf.as_bytes())?;
    Ok(())
}
