//! Right-hand side of the damped anisotropic system and its time stepper.
//!
//! The semi-discrete system is the Galerkin truncation
//!
//! ```text
//! ∂_t û = ν Δ_h û + Π P[-(u·∇)u - damping(u)]^
//! ```
//!
//! where `P` is the Leray projector and `Π` keeps the retained modes (the
//! two-thirds mask when dealiasing, intersected with `|ξ| < R` when a
//! Friedrichs cutoff is set). The state lives in the retained set, so every
//! pairing with `û` in the energy balance is exact on the lattice.
//!
//! Time stepping is second-order Runge-Kutta in integrating-factor form:
//! with `E = exp(-ν|ξ_h|² dt)` per mode and `N` the projected nonlinear part,
//!
//! ```text
//! û* = E (ûⁿ + dt N(ûⁿ))
//! ûⁿ⁺¹ = E ûⁿ + dt/2 (E N(ûⁿ) + N(û*))
//! ```
//!
//! which reproduces horizontal heat decay exactly when `N = 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::checkpoint::Checkpoint;
use crate::config::{Dealias, InitialCondition, SolverConfig};
use crate::damping::DampingSpec;
use crate::diagnostics::ledger::{ledger_append, EnergyLedger, LedgerRow};
use crate::error::{Error, Result};
use crate::field::{
    forward_many, inverse_many, inverse_unchecked, mode_index, SpectralVectorField,
};
use crate::grid::Grid;
use crate::norms::h01_norm;
use crate::operators::{dealias, horizontal_wavenumber_sq, leray_project};
use crate::random::{random_field_with_slope, substream, Band};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationState {
    pub t: f64,
    pub step: u64,
    #[serde(skip)]
    pub u_hat: SpectralVectorField,
}

/// Builds a real, divergence-free initial field.
pub fn make_initial_condition(
    ic: &InitialCondition,
    grid: &Grid,
    seed: u64,
) -> Result<SpectralVectorField> {
    let field = match ic {
        InitialCondition::TaylorGreen {
            amplitude,
            perturbation,
        } => {
            let tg = taylor_green(grid, *amplitude)?;
            if *perturbation > 0.0 {
                let mut rng = substream(seed, "ic");
                let noise = leray_project(&random_field_with_slope(
                    grid,
                    Band::TwoThirds,
                    0.0,
                    &mut rng,
                ))
                .symmetrized();
                let scale = perturbation * tg.l2_norm() / noise.l2_norm();
                tg.axpy(scale, &noise)
            } else {
                tg
            }
        }
        InitialCondition::RandomDivFree {
            energy_target,
            spectrum_slope,
            seed: own_seed,
        } => {
            let mut rng = match own_seed {
                Some(s) => substream(*s, "ic"),
                None => substream(seed, "ic"),
            };
            let u = leray_project(&random_field_with_slope(
                grid,
                Band::TwoThirds,
                *spectrum_slope,
                &mut rng,
            ))
            .symmetrized();
            let norm = h01_norm(&u);
            if norm == 0.0 {
                return Err(Error::InvalidParameter("random field has zero norm".into()));
            }
            u.scaled(energy_target / norm)
        }
        InitialCondition::SingleMode {
            wavevector,
            amplitude,
        } => leray_project(&SpectralVectorField::cosine_mode(
            grid,
            *wavevector,
            *amplitude,
        )?),
        InitialCondition::FromFile { path } => {
            let ck = Checkpoint::read(path)?;
            if ck.field.grid() != grid {
                return Err(Error::Format {
                    path: path.clone(),
                    reason: format!(
                        "grid {:?} does not match configured {:?}",
                        ck.field.grid().modes(),
                        grid.modes()
                    ),
                });
            }
            leray_project(&ck.field).symmetrized()
        }
    };
    Ok(field)
}

/// `A (sin ax cos by cos cz, -(a/b) cos ax sin by cos cz, 0)` with
/// `(a, b, c) = 2π / L`, assembled from its eight exact Fourier coefficients
/// so that no rounding noise reaches other modes.
fn taylor_green(grid: &Grid, amplitude: f64) -> Result<SpectralVectorField> {
    let l = grid.lengths();
    let ratio = l[1] / l[0];
    let c = amplitude * grid.volume().sqrt() / 8.0;
    let mut f = SpectralVectorField::zeros(grid);
    for s1 in [-1i64, 1] {
        for s2 in [-1i64, 1] {
            for s3 in [-1i64, 1] {
                let idx = mode_index(grid, [s1, s2, s3])?;
                f.component_mut(0)[idx] = Complex64::new(0.0, -c * s1 as f64);
                f.component_mut(1)[idx] = Complex64::new(0.0, c * ratio * s2 as f64);
            }
        }
    }
    Ok(f)
}

/// Per-run multiplier tables.
#[derive(Debug, Clone)]
struct ModeTables {
    /// `exp(-ν |ξ_h|² dt)`
    decay: Vec<f64>,
    /// Retained modes (dealias mask ∩ Friedrichs ball).
    keep: Vec<bool>,
}

impl ModeTables {
    fn new(cfg: &SolverConfig) -> Self {
        let g = &cfg.grid;
        let decay = (0..g.len())
            .map(|idx| (-cfg.viscosity * horizontal_wavenumber_sq(g, idx) * cfg.dt).exp())
            .collect();
        let keep = (0..g.len())
            .map(|idx| {
                let in_mask = cfg.dealias == Dealias::None || g.dealias_keeps(g.position(idx));
                let in_ball = match cfg.cutoff_r {
                    None => true,
                    Some(r) => {
                        let xi = g.wavevector(idx);
                        xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2] < r * r
                    }
                };
                in_mask && in_ball
            })
            .collect();
        Self { decay, keep }
    }

    fn retain(&self, f: &mut SpectralVectorField) {
        for c in 0..3 {
            for (v, &k) in f.component_mut(c).iter_mut().zip(&self.keep) {
                if !k {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
        }
    }
}

/// Spectral `∂_i u_j` (index `[j][i]`) with odd-order wavenumbers.
fn gradient_coefficients(u: &SpectralVectorField) -> [[Vec<Complex64>; 3]; 3] {
    let g = u.grid();
    let [n1, n2, n3] = g.modes();
    let k: [Vec<f64>; 3] =
        std::array::from_fn(|a| (0..g.modes()[a]).map(|p| g.odd_wavenumber(a, p)).collect());
    std::array::from_fn(|j| {
        let c = u.component(j);
        std::array::from_fn(|i| {
            let mut d = Vec::with_capacity(c.len());
            for p1 in 0..n1 {
                for p2 in 0..n2 {
                    for p3 in 0..n3 {
                        let xi = [k[0][p1], k[1][p2], k[2][p3]][i];
                        let v = c[(p1 * n2 + p2) * n3 + p3];
                        d.push(Complex64::new(-v.im * xi, v.re * xi));
                    }
                }
            }
            d
        })
    })
}

/// Physical velocity and gradient, two real fields per FFT.
fn physical_velocity_and_gradient(u: &SpectralVectorField) -> ([Vec<f64>; 3], [[Vec<f64>; 3]; 3]) {
    let grad = gradient_coefficients(u);
    let mut sets: Vec<&[Complex64]> = (0..3).map(|j| u.component(j)).collect();
    sets.extend(grad.iter().flat_map(|row| row.iter().map(|v| v.as_slice())));
    let mut it = inverse_many(u.grid(), &sets).into_iter();
    let up = std::array::from_fn(|_| it.next().expect("velocity"));
    let gp = std::array::from_fn(|_| std::array::from_fn(|_| it.next().expect("gradient")));
    (up, gp)
}

fn forward_three(g: &Grid, phys: &[Vec<f64>; 3]) -> [Vec<Complex64>; 3] {
    let mut it = forward_many(g, &[&phys[0], &phys[1], &phys[2]]).into_iter();
    std::array::from_fn(|_| it.next().expect("three components"))
}

/// Pseudo-spectral `(u·∇)u`, dealiased when requested; not projected.
pub fn nonlinear_term(u: &SpectralVectorField, rule: Dealias) -> SpectralVectorField {
    let g = u.grid().clone();
    let (up, grad) = physical_velocity_and_gradient(u);
    let n = g.len();
    let phys = std::array::from_fn(|j| {
        (0..n)
            .map(|x| up[0][x] * grad[j][0][x] + up[1][x] * grad[j][1][x] + up[2][x] * grad[j][2][x])
            .collect()
    });
    let out = SpectralVectorField::new(g.clone(), forward_three(&g, &phys)).expect("grid length");
    match rule {
        Dealias::TwoThirds => dealias(&out),
        Dealias::None => out,
    }
}

/// `P[-(u·∇)u - damping]` restricted to the retained modes.
fn forcing(
    u: &SpectralVectorField,
    damping: &DampingSpec,
    tables: &ModeTables,
) -> SpectralVectorField {
    let g = u.grid().clone();
    let (up, grad) = physical_velocity_and_gradient(u);
    let n = g.len();
    let mut phys = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for x in 0..n {
        let v = [up[0][x], up[1][x], up[2][x]];
        let a = damping.factor(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        for j in 0..3 {
            let adv = v[0] * grad[j][0][x] + v[1] * grad[j][1][x] + v[2] * grad[j][2][x];
            phys[j][x] = -(adv + a * v[j]);
        }
    }
    let mut f = SpectralVectorField::new(g.clone(), forward_three(&g, &phys)).expect("grid length");
    tables.retain(&mut f);
    leray_project(&f)
}

/// Full right-hand side `P[-(u·∇)u - damping] + νΔ_h u` on the retained modes.
pub fn rhs(state: &SimulationState, cfg: &SolverConfig) -> SpectralVectorField {
    let tables = ModeTables::new(cfg);
    let mut u = state.u_hat.clone();
    tables.retain(&mut u);
    let f = forcing(&u, &cfg.damping, &tables);
    let g = &cfg.grid;
    let nu = cfg.viscosity;
    let diff = u.multiply(|idx| Complex64::new(-nu * horizontal_wavenumber_sq(g, idx), 0.0));
    f.add(&diff)
}

fn apply_decay(f: &SpectralVectorField, decay: &[f64]) -> SpectralVectorField {
    f.multiply(|idx| Complex64::new(decay[idx], 0.0))
}

fn integrating_factor_rk2(
    u: &SpectralVectorField,
    damping: &DampingSpec,
    tables: &ModeTables,
    dt: f64,
) -> SpectralVectorField {
    let n0 = forcing(u, damping, tables);
    let stage = apply_decay(&u.axpy(dt, &n0), &tables.decay);
    let n1 = forcing(&stage, damping, tables);
    let e_u = apply_decay(u, &tables.decay);
    let e_n0 = apply_decay(&n0, &tables.decay);
    e_u.axpy(0.5 * dt, &e_n0.add(&n1))
}

/// Single step from a standalone state; see [`Simulation`] for runs.
pub fn step(state: &SimulationState, cfg: &SolverConfig) -> Result<SimulationState> {
    let tables = ModeTables::new(cfg);
    advance(state, cfg, &tables)
}

fn advance(
    state: &SimulationState,
    cfg: &SolverConfig,
    tables: &ModeTables,
) -> Result<SimulationState> {
    let next = integrating_factor_rk2(&state.u_hat, &cfg.damping, tables, cfg.dt);
    let next = leray_project(&next.symmetrized());
    let step = state.step + 1;
    let t = step as f64 * cfg.dt;
    if let Some((component, mode)) = next.first_non_finite() {
        return Err(Error::BlowUp {
            step,
            t,
            component,
            mode,
        });
    }
    Ok(SimulationState {
        t,
        step,
        u_hat: next,
    })
}

/// Receives ledger rows and per-step callbacks during [`Simulation::run`].
pub trait Observer {
    fn on_row(&mut self, _row: &LedgerRow) -> Result<()> {
        Ok(())
    }

    fn on_step(&mut self, _sim: &Simulation) -> Result<()> {
        Ok(())
    }

    /// Called once when the run ends, including on abort.
    fn finish(&mut self) -> Result<()> {
        Ok(())
    }
}

/// Observer that ignores everything.
pub struct NullObserver;

impl Observer for NullObserver {}

/// One trajectory: configuration, current state and its ledger.
#[derive(Debug, Clone)]
pub struct Simulation {
    cfg: SolverConfig,
    tables: ModeTables,
    state: SimulationState,
    ledger: EnergyLedger,
    speed_ref: f64,
    warned: bool,
}

impl Simulation {
    /// Builds the initial condition and checks the time step against the
    /// advective limit `dt <= 0.5 / (max|ξ| · max|u⁰|)`.
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let u0 = make_initial_condition(&cfg.ic, &cfg.grid, cfg.seed)?;
        Self::from_state(cfg, u0)
    }

    /// Starts at `t = 0` from `u0`, restricted to the retained modes.
    pub fn from_state(cfg: SolverConfig, mut u0: SpectralVectorField) -> Result<Self> {
        cfg.validate()?;
        if u0.grid() != &cfg.grid {
            return Err(Error::GridMismatch(
                "initial field and configuration differ".into(),
            ));
        }
        let tables = ModeTables::new(&cfg);
        tables.retain(&mut u0);
        let state = SimulationState {
            t: 0.0,
            step: 0,
            u_hat: u0,
        };
        let ledger = EnergyLedger::start(0.0, 0, &state.u_hat, cfg.damping, cfg.viscosity, cfg.dt);
        Self::assemble(cfg, tables, state, ledger)
    }

    /// Continues from a checkpoint written by a run with the same trajectory
    /// hash.
    pub fn from_checkpoint(cfg: SolverConfig, ck: Checkpoint) -> Result<Self> {
        cfg.validate()?;
        if ck.config_hash != cfg.trajectory_hash() {
            return Err(Error::Incompatible(format!(
                "checkpoint hash {:016x} != config hash {:016x}",
                ck.config_hash,
                cfg.trajectory_hash()
            )));
        }
        if ck.field.grid() != &cfg.grid {
            return Err(Error::Incompatible("grid differs".into()));
        }
        let tables = ModeTables::new(&cfg);
        let ledger = ck.ledger(&cfg)?;
        let state = SimulationState {
            t: ck.t,
            step: ck.step,
            u_hat: ck.field,
        };
        Self::assemble(cfg, tables, state, ledger)
    }

    fn assemble(
        cfg: SolverConfig,
        tables: ModeTables,
        state: SimulationState,
        ledger: EnergyLedger,
    ) -> Result<Self> {
        let speed_ref = inverse_unchecked(&state.u_hat).max_speed();
        let kmax = cfg.grid.max_wavenumber();
        if speed_ref > 0.0 && cfg.dt > 0.5 / (kmax * speed_ref) {
            return Err(Error::Config(format!(
                "dt = {} exceeds the advective limit 0.5 / (max|ξ| max|u|) = {:.4e}",
                cfg.dt,
                0.5 / (kmax * speed_ref)
            )));
        }
        Ok(Self {
            cfg,
            tables,
            state,
            ledger,
            speed_ref,
            warned: false,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn state(&self) -> &SimulationState {
        &self.state
    }

    pub fn ledger(&self) -> &EnergyLedger {
        &self.ledger
    }

    pub fn into_parts(self) -> (SimulationState, EnergyLedger) {
        (self.state, self.ledger)
    }

    /// Advances one step without touching the ledger.
    pub fn step(&mut self) -> Result<()> {
        self.state = advance(&self.state, &self.cfg, &self.tables)?;
        Ok(())
    }

    fn record(&mut self) -> Result<()> {
        ledger_append(
            &mut self.ledger,
            &self.state.u_hat,
            self.state.t,
            self.state.step,
            &self.cfg,
        )?;
        if !self.warned && self.speed_ref > 0.0 {
            let speed = inverse_unchecked(&self.state.u_hat).max_speed();
            if speed > 2.0 * self.speed_ref {
                log::warn!(
                    "max speed {speed:.3e} at t = {} is more than twice the initial {:.3e}; dt may be too large",
                    self.state.t,
                    self.speed_ref
                );
                self.warned = true;
            }
        }
        Ok(())
    }

    /// Advances one step and records a ledger row when the step is a multiple
    /// of `output_every` or the configured final step. Returns whether a row
    /// was recorded.
    pub fn advance_step(&mut self) -> Result<bool> {
        self.step()?;
        let s = self.state.step;
        if s.is_multiple_of(self.cfg.output_every) || s == self.cfg.total_steps() {
            self.record()?;
            return Ok(true);
        }
        Ok(false)
    }

    /// Steps until the configured final step, handing every new ledger row
    /// to `observer`.
    pub fn run(&mut self, observer: &mut dyn Observer) -> Result<()> {
        let result = self.run_inner(observer);
        let finished = observer.finish();
        result.and(finished)
    }

    fn run_inner(&mut self, observer: &mut dyn Observer) -> Result<()> {
        if self.state.step == 0 && self.ledger.rows().len() == 1 {
            observer.on_row(self.ledger.last())?;
        }
        while self.state.step < self.cfg.total_steps() {
            if self.advance_step()? {
                observer.on_row(self.ledger.last())?;
            }
            observer.on_step(self)?;
        }
        Ok(())
    }

    /// Snapshot for persistence.
    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            t: self.state.t,
            step: self.state.step,
            config_hash: self.cfg.trajectory_hash(),
            field: self.state.u_hat.clone(),
            initial_kinetic: self.ledger.meta().initial_kinetic,
            initial_dz_kinetic: self.ledger.meta().initial_dz_kinetic,
            rows: self.ledger.rows().to_vec(),
        }
    }
}

/// Runs `cfg` from its initial condition to `t_end`.
pub fn run(
    cfg: &SolverConfig,
    observer: &mut dyn Observer,
) -> Result<(SimulationState, EnergyLedger)> {
    let mut sim = Simulation::new(cfg.clone())?;
    sim.run(observer)?;
    Ok(sim.into_parts())
}
