//! Fixed-step RK4 integration of `dψ/dt = -i H(t) ψ` with
//! `H(t) = H0 + B(t)·Hz + h(t)·Σ S^x`.
//!
//! Time is tracked as an integer step index; `t = step · dt`. Intervals are
//! a whole number of steps so every trace lands on one uniform grid.

use crate::error::{Error, Result};
use crate::hamiltonian::OperatorTermList;
use crate::schedule::DriveSchedule;
use crate::state::StateVector;
use crate::C64;

/// Steps between renormalizations inside an interval.
pub const RENORMALIZE_EVERY: u64 = 10_000;

/// `dt · (spectral bound)` above this draws a stability warning.
pub const STABILITY_WARNING: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct EvolutionContext {
    pub bare: OperatorTermList,
    pub zeeman: OperatorTermList,
    pub rf: OperatorTermList,
    pub schedule: DriveSchedule,
    pub dt: f64,
}

impl EvolutionContext {
    pub fn new(
        bare: OperatorTermList,
        zeeman: OperatorTermList,
        rf: OperatorTermList,
        schedule: DriveSchedule,
        dt: f64,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        let n = bare.n_spins();
        for op in [&zeeman, &rf] {
            if op.n_spins() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: op.n_spins(),
                });
            }
        }
        let ctx = Self {
            bare,
            zeeman,
            rf,
            schedule,
            dt,
        };
        let stiffness = ctx.dt * ctx.max_frequency();
        if stiffness > STABILITY_WARNING {
            log::warn!(
                "dt·max frequency = {stiffness:.3} exceeds {STABILITY_WARNING}; RK4 accuracy may suffer"
            );
        }
        Ok(ctx)
    }

    pub fn n_spins(&self) -> usize {
        self.bare.n_spins()
    }

    /// Upper bound on the largest frequency of `H(t)` over the schedule.
    pub fn max_frequency(&self) -> f64 {
        self.bare.norm_bound()
            + self.schedule.b0.abs() * self.zeeman.norm_bound()
            + self.schedule.h0.abs() * self.rf.norm_bound()
    }

    fn check_psi(&self, psi: &StateVector) -> Result<()> {
        if psi.n_spins() != self.n_spins() {
            return Err(Error::DimensionMismatch {
                expected: self.n_spins(),
                actual: psi.n_spins(),
            });
        }
        Ok(())
    }

    pub fn time_at(&self, step: u64) -> f64 {
        step as f64 * self.dt
    }

    /// Number of whole steps closest to `duration`.
    pub fn steps_for(&self, duration: f64) -> u64 {
        (duration / self.dt).round().max(0.0) as u64
    }

    /// `⟨ψ|H0|ψ⟩`.
    pub fn bare_energy(&self, psi: &StateVector) -> Result<f64> {
        self.bare.expectation(psi)
    }

    /// One RK4 step from time `t`; the result is not renormalized.
    pub fn rk4_step(&self, psi: &StateVector, t: f64, gate: bool) -> Result<StateVector> {
        self.check_psi(psi)?;
        let mut out = psi.clone();
        let mut stepper = Stepper::new(psi.dim());
        stepper.step(self, out.amplitudes_mut(), t, gate);
        if !out.is_finite() {
            return Err(Error::Diverged { time: t + self.dt });
        }
        Ok(out)
    }

    /// Advances `psi` by `steps` steps starting at global step `start_step`.
    ///
    /// `sample` is called with the global step index after every step whose
    /// index is a multiple of `sample_every` (0 disables it). The state is
    /// renormalized every [`RENORMALIZE_EVERY`] steps and at the end.
    pub fn evolve_steps<F>(
        &self,
        psi: &mut StateVector,
        start_step: u64,
        steps: u64,
        gate: bool,
        sample_every: u64,
        mut sample: F,
    ) -> Result<()>
    where
        F: FnMut(u64, &StateVector) -> Result<()>,
    {
        self.check_psi(psi)?;
        if steps == 0 {
            return Ok(());
        }
        let mut stepper = Stepper::new(psi.dim());
        for local in 1..=steps {
            let step = start_step + local;
            let t = self.time_at(step - 1);
            stepper.step(self, psi.amplitudes_mut(), t, gate);
            if local % RENORMALIZE_EVERY == 0 || local == steps {
                if !psi.is_finite() {
                    return Err(Error::Diverged {
                        time: self.time_at(step),
                    });
                }
                psi.normalize();
            }
            if sample_every > 0 && step % sample_every == 0 {
                sample(step, psi)?;
            }
        }
        Ok(())
    }

    /// Convenience wrapper over [`evolve_steps`](Self::evolve_steps) in
    /// seconds; `duration` is rounded to whole steps.
    pub fn evolve_interval(
        &self,
        psi: &StateVector,
        t0: f64,
        duration: f64,
        gate: bool,
    ) -> Result<StateVector> {
        if duration < 0.0 {
            return Err(Error::Config(format!(
                "duration must be non-negative, got {duration}"
            )));
        }
        let mut out = psi.clone();
        self.evolve_steps(
            &mut out,
            self.steps_for(t0),
            self.steps_for(duration),
            gate,
            0,
            |_, _| Ok(()),
        )?;
        Ok(out)
    }
}

/// Scratch buffers for one trajectory.
struct Stepper {
    k: Vec<C64>,
    acc: Vec<C64>,
    tmp: Vec<C64>,
}

impl Stepper {
    fn new(dim: usize) -> Self {
        let zero = C64::new(0.0, 0.0);
        Self {
            k: vec![zero; dim],
            acc: vec![zero; dim],
            tmp: vec![zero; dim],
        }
    }

    /// `out = -i H(t) psi`
    fn derivative(ctx: &EvolutionContext, t: f64, gate: bool, psi: &[C64], out: &mut [C64]) {
        out.fill(C64::new(0.0, 0.0));
        ctx.bare.apply_accumulate(psi, 1.0, out);
        ctx.zeeman.apply_accumulate(psi, ctx.schedule.field(t), out);
        ctx.rf.apply_accumulate(psi, ctx.schedule.rf(t, gate), out);
        for o in out.iter_mut() {
            *o = C64::new(o.im, -o.re);
        }
    }

    fn step(&mut self, ctx: &EvolutionContext, psi: &mut [C64], t: f64, gate: bool) {
        let dt = ctx.dt;
        let half = 0.5 * dt;

        Self::derivative(ctx, t, gate, psi, &mut self.k);
        for ((a, tm), (&k, &p)) in self
            .acc
            .iter_mut()
            .zip(self.tmp.iter_mut())
            .zip(self.k.iter().zip(psi.iter()))
        {
            *a = k;
            *tm = p + k * half;
        }

        Self::derivative(ctx, t + half, gate, &self.tmp, &mut self.k);
        for ((a, tm), (&k, &p)) in self
            .acc
            .iter_mut()
            .zip(self.tmp.iter_mut())
            .zip(self.k.iter().zip(psi.iter()))
        {
            *a += k * 2.0;
            *tm = p + k * half;
        }

        Self::derivative(ctx, t + half, gate, &self.tmp, &mut self.k);
        for ((a, tm), (&k, &p)) in self
            .acc
            .iter_mut()
            .zip(self.tmp.iter_mut())
            .zip(self.k.iter().zip(psi.iter()))
        {
            *a += k * 2.0;
            *tm = p + k * dt;
        }

        Self::derivative(ctx, t + dt, gate, &self.tmp, &mut self.k);
        let sixth = dt / 6.0;
        for ((p, &a), &k) in psi.iter_mut().zip(&self.acc).zip(&self.k) {
            *p += (a + k) * sixth;
        }
    }
}
