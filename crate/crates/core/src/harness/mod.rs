//! Experiment driver: configuration, initial data, checkpoints, the
//! observation loop and the scenario presets with their pass/fail criteria.

mod checkpoint;
mod config;
pub mod criteria;
mod scenarios;

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use checkpoint::{decode_checkpoint, encode_checkpoint, load_checkpoint, load_checkpoint_on, save_checkpoint};
pub use config::{parse_config, InitSpec, RunConfig, DEFAULT_CEILING};
pub use scenarios::{run_scenario, ScenarioOptions, ScenarioReport, SCENARIOS};

use crate::diagnostics::EnergyLedger;
use crate::error::Result;
use crate::integrator::advance;
use crate::physics::{PhysParams, State};
use crate::spectral::{random_field_with, Grid, ScalarField, SpectrumShape, VectorField};

/// Average of `s` and its mirror image under `x₁ → -x₁`.
pub fn symmetrize(s: &State) -> State {
    let r = s.reflect_x1();
    let avg = |a: &ScalarField, b: &ScalarField| {
        let mut c = a.scale(0.5);
        c.axpy(0.5, b);
        c
    };
    State {
        rho: avg(&s.rho, &r.rho),
        u: VectorField {
            x1: avg(&s.u.x1, &r.u.x1),
            x2: avg(&s.u.x2, &r.u.x2),
        },
        b: VectorField {
            x1: avg(&s.b.x1, &r.b.x1),
            x2: avg(&s.b.x2, &r.b.x2),
        },
        time: s.time,
    }
}

/// Random small data: zero-mean `ρ₀`, `u₀`, and `b₀ = ∇⊥ψ` for a zero-mean `ψ`,
/// rescaled so that `‖ρ₀‖_{H^s} + ‖u₀‖_{H^s} + ‖b₀‖_{H^s} = ε`.
pub fn make_initial_data(config: &RunConfig) -> Result<State> {
    let grid = Grid::new(config.n1, config.n2)?;
    let spec = &config.init;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let shape = SpectrumShape::new(1.0, spec.decay_rate, true);
    // Every field is drawn regardless of the enable flags so that toggling one
    // does not change the others.
    let mut draw = || random_field_with(&grid, &mut rng, shape);
    let (rho, u1, u2, psi) = (draw()?, draw()?, draw()?, draw()?);
    let zero = || ScalarField::zeros(&grid);
    let mut s = State::zeros(&grid);
    if spec.enable_rho {
        s.rho = rho;
    }
    if spec.enable_u {
        s.u = VectorField { x1: u1, x2: u2 };
    }
    if spec.enable_b {
        s.b = psi.perp_grad();
    } else {
        s.b = VectorField { x1: zero(), x2: zero() };
    }
    if spec.symmetric {
        s = symmetrize(&s);
    }
    let total = s.hs_norm_sum(config.diag.s);
    if spec.epsilon == 0.0 || total == 0.0 {
        return Ok(State::zeros(&grid));
    }
    Ok(s.scaled(spec.epsilon / total))
}

/// Counters from [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimStats {
    pub steps: usize,
    pub samples: usize,
    pub checkpoints: usize,
}

/// Step from `initial.time` to `config.t_end`, calling `on_sample` at the start
/// and at every multiple of the sample interval. Observation times lie on the
/// fixed lattice `k·Δ`, so a run resumed from a checkpoint at a lattice time
/// takes exactly the same steps as an uninterrupted one.
pub fn simulate(
    config: &RunConfig,
    initial: State,
    checkpoint_dir: Option<&Path>,
    mut on_sample: impl FnMut(&State) -> Result<()>,
) -> Result<(State, SimStats)> {
    config.validate()?;
    let params = config.phys;
    let dt_obs = config.diag.sample_interval;
    let mut stats = SimStats::default();
    let mut state = initial;
    on_sample(&state)?;
    stats.samples += 1;
    let mut k = (state.time / dt_obs + 1e-9).floor() as u64;
    while state.time < config.t_end {
        let target = ((k + 1) as f64 * dt_obs).min(config.t_end);
        k += 1;
        if target <= state.time {
            continue;
        }
        let prev = state.time;
        let (next, st) = advance(&state, &params, &config.stepping, target, None, |_| Ok(()))?;
        state = next;
        stats.steps += st.steps;
        on_sample(&state)?;
        stats.samples += 1;
        if let (Some(every), Some(dir)) = (config.checkpoint_every, checkpoint_dir) {
            let slot = |t: f64| (t / every + 1e-9).floor();
            if slot(state.time) > slot(prev) {
                save_checkpoint(&state, &params, &checkpoint_path(dir, state.time))?;
                stats.checkpoints += 1;
            }
        }
    }
    Ok((state, stats))
}

pub fn checkpoint_path(dir: &Path, t: f64) -> PathBuf {
    dir.join(format!("ckpt_t{t:011.4}.mhd2"))
}

/// [`simulate`] with an energy ledger recording every sample.
pub fn run_with_ledger(
    config: &RunConfig,
    initial: State,
    checkpoint_dir: Option<&Path>,
) -> Result<(State, EnergyLedger, SimStats)> {
    let mut ledger = EnergyLedger::new(config.diag)?;
    let params: PhysParams = config.phys;
    let (state, stats) = simulate(config, initial, checkpoint_dir, |s| ledger.observe(s, &params))?;
    Ok((state, ledger, stats))
}
