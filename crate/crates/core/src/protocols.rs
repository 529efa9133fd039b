//! Measurement-feedback polarization (random-target and single-probe) and
//! the adiabatic field ramp, plus the two-phase pipeline.
//!
//! Both polarization schemes share one loop: evolve one period with the RF
//! gate in its current state, measure the target spin along z, and gate the
//! RF on while the target keeps reading up. They differ in how the next
//! target is picked after a down outcome and in when they stop.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::evolution::EvolutionContext;
use crate::rng::{RngStream, Stream};
use crate::spectrum::{self, EigenResult};
use crate::state::{Direction, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    MeasureUp,
    MeasureDown,
    RfOn,
    RfOff,
    RampStart,
    Done,
}

impl Event {
    pub fn name(self) -> &'static str {
        match self {
            Event::MeasureUp => "measure-up",
            Event::MeasureDown => "measure-down",
            Event::RfOn => "rf-on",
            Event::RfOff => "rf-off",
            Event::RampStart => "ramp-start",
            Event::Done => "done",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "measure-up" => Event::MeasureUp,
            "measure-down" => Event::MeasureDown,
            "rf-on" => Event::RfOn,
            "rf-off" => Event::RfOff,
            "ramp-start" => Event::RampStart,
            "done" => Event::Done,
            _ => return None,
        })
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One row of a trace. `rf` is the gate state from this instant on, so a
/// measurement row that switches the RF on reads `true`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub mz: f64,
    /// `⟨H0⟩`.
    pub e0: f64,
    /// Overlap with the reference ground state; NaN when none was given.
    pub fidelity: f64,
    pub b: f64,
    pub rf: bool,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProtocolTrace {
    pub samples: Vec<TraceSample>,
}

impl ProtocolTrace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&TraceSample> {
        self.samples.last()
    }

    pub fn count_event(&self, event: Event) -> usize {
        self.samples
            .iter()
            .map(|s| s.events.iter().filter(|&&e| e == event).count())
            .sum()
    }

    /// Outcome sequence of all measurements in the trace.
    pub fn measurements(&self) -> impl Iterator<Item = (f64, Direction)> + '_ {
        self.samples.iter().flat_map(|s| {
            s.events.iter().filter_map(move |e| match e {
                Event::MeasureUp => Some((s.t, Direction::Up)),
                Event::MeasureDown => Some((s.t, Direction::Down)),
                _ => None,
            })
        })
    }

    pub fn min_mz(&self) -> f64 {
        self.samples.iter().map(|s| s.mz).fold(f64::INFINITY, f64::min)
    }
}

/// Builds a trace on the global step grid; a second record at the same
/// step overwrites the observables and appends its events.
pub struct Recorder<'a> {
    ctx: &'a EvolutionContext,
    reference: Option<&'a StateVector>,
    sample_every: u64,
    last_step: Option<u64>,
    trace: ProtocolTrace,
}

impl<'a> Recorder<'a> {
    pub fn new(
        ctx: &'a EvolutionContext,
        reference: Option<&'a StateVector>,
        sample_every: u64,
    ) -> Self {
        Self {
            ctx,
            reference,
            sample_every,
            last_step: None,
            trace: ProtocolTrace::default(),
        }
    }

    pub fn sample_every(&self) -> u64 {
        self.sample_every
    }

    pub fn record(
        &mut self,
        step: u64,
        psi: &StateVector,
        gate: bool,
        events: &[Event],
    ) -> Result<()> {
        let t = self.ctx.time_at(step);
        // Observables of ψ/‖ψ‖; samples may fall between renormalizations.
        let weight = psi.norm_sqr();
        let fidelity = match self.reference {
            Some(r) => r.fidelity(psi)? / weight,
            None => f64::NAN,
        };
        let sample = TraceSample {
            t,
            mz: psi.magnetization_z() / weight,
            e0: self.ctx.bare_energy(psi)? / weight,
            fidelity,
            b: self.ctx.schedule.field(t),
            rf: gate,
            events: events.to_vec(),
        };
        match self.last_step {
            Some(last) if last == step => {
                let prev = self.trace.samples.last_mut().expect("non-empty");
                let mut merged = std::mem::take(&mut prev.events);
                merged.extend_from_slice(events);
                *prev = TraceSample {
                    events: merged,
                    ..sample
                };
            }
            Some(last) if step < last => {
                return Err(Error::Config(format!(
                    "trace time went backwards: step {step} after {last}"
                )));
            }
            _ => {
                self.trace.samples.push(sample);
                self.last_step = Some(step);
            }
        }
        Ok(())
    }

    pub fn mark(&mut self, event: Event) {
        if let Some(last) = self.trace.samples.last_mut() {
            last.events.push(event);
        }
    }

    pub fn into_trace(self) -> ProtocolTrace {
        self.trace
    }
}

/// True iff the last `k_term` outcomes are all down.
pub fn check_termination(history: &[Direction], k_term: usize) -> bool {
    history.len() >= k_term && history[history.len() - k_term..].iter().all(|d| !d.is_up())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeIConfig {
    /// Time between measurements, seconds.
    pub period: f64,
    /// Consecutive down outcomes that end the phase.
    pub k_term: usize,
    pub max_rounds: u64,
    pub seed: u64,
}

impl SchemeIConfig {
    pub fn for_chain(ctx: &EvolutionContext, seed: u64) -> Self {
        Self {
            period: ctx.schedule.half_period(),
            k_term: 10 * ctx.n_spins(),
            max_rounds: 200_000,
            seed,
        }
    }

    fn validate(&self, n_spins: usize) -> Result<()> {
        if !(self.period > 0.0) {
            return Err(Error::Config(format!("T must be positive, got {}", self.period)));
        }
        if self.k_term < n_spins {
            return Err(Error::Config(format!(
                "k_term ({}) must be at least n_spins ({n_spins})",
                self.k_term
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeIIConfig {
    pub probe: usize,
    pub period: f64,
    /// Total number of probe measurements.
    pub target_rounds: u64,
    pub seed: u64,
}

impl SchemeIIConfig {
    pub fn for_chain(ctx: &EvolutionContext, seed: u64) -> Self {
        let period = ctx.schedule.half_period();
        Self {
            probe: 0,
            period,
            target_rounds: (1e4 / period).round() as u64,
            seed,
        }
    }

    fn validate(&self, n_spins: usize) -> Result<()> {
        if self.probe >= n_spins {
            return Err(Error::Config(format!(
                "probe {} out of range for {n_spins} spins",
                self.probe
            )));
        }
        if !(self.period > 0.0) {
            return Err(Error::Config(format!("T must be positive, got {}", self.period)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticConfig {
    /// Ramp time constant, seconds.
    pub t0: f64,
    /// The ramp ends once `B(t) <= b_stop`.
    pub b_stop: f64,
    pub ramp_start: f64,
}

impl AdiabaticConfig {
    pub fn new(t0: f64, b0: f64) -> Self {
        Self {
            t0,
            b_stop: b0 * 1e-3,
            ramp_start: 0.0,
        }
    }

    fn validate(&self, b0: f64) -> Result<()> {
        if !(self.t0 > 0.0) {
            return Err(Error::Config(format!("T0 must be positive, got {}", self.t0)));
        }
        if !(self.b_stop > 0.0 && self.b_stop < b0) {
            return Err(Error::Config(format!(
                "b_stop must lie in (0, b0 = {b0}), got {}",
                self.b_stop
            )));
        }
        if !(self.ramp_start >= 0.0) {
            return Err(Error::Config(format!(
                "ramp_start must be non-negative, got {}",
                self.ramp_start
            )));
        }
        Ok(())
    }
}

/// Where a phase starts on the shared time axis and what it samples against.
#[derive(Debug, Clone, Copy)]
pub struct TraceOptions<'a> {
    pub start_step: u64,
    pub sample_every: u64,
    pub reference: Option<&'a StateVector>,
}

impl Default for TraceOptions<'_> {
    fn default() -> Self {
        Self {
            start_step: 0,
            sample_every: 100,
            reference: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PhaseOutput {
    pub state: StateVector,
    pub trace: ProtocolTrace,
    pub end_step: u64,
    /// Scheme I: terminated by the consecutive-down rule. Scheme II: the RF
    /// gate is off at the end (last probe read down). Ramp: always true.
    pub completed: bool,
    pub rounds: u64,
}

#[derive(Debug, Clone, Copy)]
enum Targeting {
    /// A fresh uniformly random site after every down outcome.
    Random,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy)]
enum Stopping {
    ConsecutiveDown { k_term: usize, max_rounds: u64 },
    Budget(u64),
}

struct FeedbackLoop {
    period: f64,
    targeting: Targeting,
    stopping: Stopping,
    seed: u64,
}

struct LoopResult {
    end_step: u64,
    completed: bool,
    rounds: u64,
}

impl FeedbackLoop {
    fn run(
        &self,
        ctx: &EvolutionContext,
        psi: &mut StateVector,
        start_step: u64,
        recorder: &mut Recorder<'_>,
    ) -> Result<LoopResult> {
        let n = ctx.n_spins();
        let steps_per = ctx.steps_for(self.period).max(1);
        let mut rng = RngStream::substream(self.seed, Stream::Measurement);
        let sample_every = recorder.sample_every();
        let mut step = start_step;
        let mut gate = false;
        let mut target = match self.targeting {
            Targeting::Random => rng.index(n),
            Targeting::Fixed(p) => p,
        };
        let (k_term, max_rounds) = match self.stopping {
            Stopping::ConsecutiveDown { k_term, max_rounds } => (k_term, max_rounds),
            Stopping::Budget(rounds) => (usize::MAX, rounds),
        };
        let mut history: VecDeque<Direction> = VecDeque::new();
        let mut completed = false;
        let mut rounds = 0;

        recorder.record(step, psi, gate, &[])?;
        while rounds < max_rounds {
            ctx.evolve_steps(psi, step, steps_per, gate, sample_every, |s, p| {
                recorder.record(s, p, gate, &[])
            })?;
            step += steps_per;
            rounds += 1;

            let outcome = psi.measure_spin_z(target, &mut rng, ctx.time_at(step))?;
            let mut events = Vec::with_capacity(2);
            match outcome.direction {
                Direction::Up => {
                    events.push(Event::MeasureUp);
                    if !gate {
                        events.push(Event::RfOn);
                    }
                    gate = true;
                }
                Direction::Down => {
                    events.push(Event::MeasureDown);
                    if gate {
                        events.push(Event::RfOff);
                    }
                    gate = false;
                    if let Targeting::Random = self.targeting {
                        target = rng.index(n);
                    }
                }
            }
            recorder.record(step, psi, gate, &events)?;

            if let Stopping::ConsecutiveDown { .. } = self.stopping {
                history.push_back(outcome.direction);
                if history.len() > k_term {
                    history.pop_front();
                }
                if check_termination(history.make_contiguous(), k_term) {
                    completed = true;
                    break;
                }
            }
        }
        if let Stopping::Budget(_) = self.stopping {
            completed = !gate;
        }
        Ok(LoopResult {
            end_step: step,
            completed,
            rounds,
        })
    }
}

fn finish(
    recorder: Recorder<'_>,
    state: StateVector,
    result: LoopResult,
) -> PhaseOutput {
    let mut recorder = recorder;
    recorder.mark(Event::Done);
    PhaseOutput {
        state,
        trace: recorder.into_trace(),
        end_step: result.end_step,
        completed: result.completed,
        rounds: result.rounds,
    }
}

fn scheme1_loop(cfg: &SchemeIConfig) -> FeedbackLoop {
    FeedbackLoop {
        period: cfg.period,
        targeting: Targeting::Random,
        stopping: Stopping::ConsecutiveDown {
            k_term: cfg.k_term,
            max_rounds: cfg.max_rounds,
        },
        seed: cfg.seed,
    }
}

fn scheme2_loop(cfg: &SchemeIIConfig) -> FeedbackLoop {
    FeedbackLoop {
        period: cfg.period,
        targeting: Targeting::Fixed(cfg.probe),
        stopping: Stopping::Budget(cfg.target_rounds),
        seed: cfg.seed,
    }
}

/// Random-target feedback: measure a random spin every period; while it
/// reads up keep the RF on and keep measuring it. Stops after `k_term`
/// consecutive down outcomes or `max_rounds` measurements (then
/// `completed` is false).
pub fn run_scheme1(
    ctx: &EvolutionContext,
    cfg: &SchemeIConfig,
    psi0: &StateVector,
    opts: TraceOptions<'_>,
) -> Result<PhaseOutput> {
    cfg.validate(ctx.n_spins())?;
    let mut psi = psi0.clone();
    let mut recorder = Recorder::new(ctx, opts.reference, opts.sample_every);
    let result = scheme1_loop(cfg).run(ctx, &mut psi, opts.start_step, &mut recorder)?;
    Ok(finish(recorder, psi, result))
}

/// Single-probe feedback: measure the same probe spin every period for
/// `target_rounds` measurements, gating the RF on while it reads up.
pub fn run_scheme2(
    ctx: &EvolutionContext,
    cfg: &SchemeIIConfig,
    psi0: &StateVector,
    opts: TraceOptions<'_>,
) -> Result<PhaseOutput> {
    cfg.validate(ctx.n_spins())?;
    let mut psi = psi0.clone();
    let mut recorder = Recorder::new(ctx, opts.reference, opts.sample_every);
    let result = scheme2_loop(cfg).run(ctx, &mut psi, opts.start_step, &mut recorder)?;
    Ok(finish(recorder, psi, result))
}

fn ramp_context(ctx: &EvolutionContext, cfg: &AdiabaticConfig) -> EvolutionContext {
    let mut ramp = ctx.clone();
    ramp.schedule.t0 = cfg.t0;
    ramp.schedule.ramp_start = cfg.ramp_start;
    ramp
}

fn ramp_loop(
    ramp: &EvolutionContext,
    cfg: &AdiabaticConfig,
    psi: &mut StateVector,
    start_step: u64,
    recorder: &mut Recorder<'_>,
) -> Result<u64> {
    let ramp_step = ramp.steps_for(cfg.ramp_start).max(start_step);
    let end_time = ramp.schedule.time_field_reaches(cfg.b_stop);
    let mut end_step = (end_time / ramp.dt).ceil() as u64;
    while ramp.schedule.field(ramp.time_at(end_step)) > cfg.b_stop {
        end_step += 1;
    }
    let end_step = end_step.max(ramp_step);
    let every = recorder.sample_every();

    recorder.record(start_step, psi, false, &[])?;
    ramp.evolve_steps(psi, start_step, ramp_step - start_step, false, every, |s, p| {
        recorder.record(s, p, false, &[])
    })?;
    recorder.record(ramp_step, psi, false, &[Event::RampStart])?;
    ramp.evolve_steps(psi, ramp_step, end_step - ramp_step, false, every, |s, p| {
        recorder.record(s, p, false, &[])
    })?;
    recorder.record(end_step, psi, false, &[])?;
    Ok(end_step)
}

/// Ramps the field down as `b0·exp(-(t - ramp_start)/T0)` with the RF off,
/// from `opts.start_step` until the field reaches `b_stop`. `psi_ground`
/// is the reference for the fidelity column.
pub fn run_adiabatic(
    ctx: &EvolutionContext,
    cfg: &AdiabaticConfig,
    psi0: &StateVector,
    psi_ground: &StateVector,
    opts: TraceOptions<'_>,
) -> Result<PhaseOutput> {
    cfg.validate(ctx.schedule.b0)?;
    psi_ground.check_same_size(psi0)?;
    let ramp = ramp_context(ctx, cfg);
    let mut psi = psi0.clone();
    let mut recorder = Recorder::new(&ramp, Some(psi_ground), opts.sample_every);
    let end_step = ramp_loop(&ramp, cfg, &mut psi, opts.start_step, &mut recorder)?;
    recorder.mark(Event::Done);
    Ok(PhaseOutput {
        state: psi,
        trace: recorder.into_trace(),
        end_step,
        completed: true,
        rounds: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    RandomTarget,
    Probe,
}

impl Scheme {
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Scheme::RandomTarget),
            2 => Some(Scheme::Probe),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FullConfig {
    pub scheme: Scheme,
    pub scheme1: SchemeIConfig,
    pub scheme2: SchemeIIConfig,
    pub adiabatic: AdiabaticConfig,
    pub seed: u64,
    pub sample_every: u64,
}

#[derive(Debug, Clone)]
pub struct Summary {
    pub final_bare_energy: f64,
    pub final_fidelity: f64,
    pub final_mz: f64,
    /// Ground-state energy of `H0`.
    pub reference_energy: f64,
    /// Polarization reached at the end of the first phase, `|Mz|/(N/2)`.
    pub polarization_fraction: f64,
    pub polarization_completed: bool,
    pub polarization_rounds: u64,
    pub polarization_end_time: f64,
    pub elapsed: f64,
}

#[derive(Debug, Clone)]
pub struct FullOutput {
    pub state: StateVector,
    pub trace: ProtocolTrace,
    pub summary: Summary,
}

/// Random initial state, polarization by the chosen scheme, then the field
/// ramp, on one continuous time axis. The ramp begins at the later of the
/// configured `ramp_start` and the end of polarization.
pub fn run_full(
    ctx: &EvolutionContext,
    cfg: &FullConfig,
    ground: Option<&EigenResult>,
) -> Result<FullOutput> {
    let n = ctx.n_spins();
    let computed;
    let ground = match ground {
        Some(g) => g,
        None => {
            let mut rng = RngStream::substream(cfg.seed, Stream::Eigensolver);
            computed = spectrum::ground_state(
                &ctx.bare,
                spectrum::DEFAULT_TOLERANCE,
                spectrum::DEFAULT_MAX_ITER,
                &mut rng,
            )?;
            &computed
        }
    };
    if ground.state.n_spins() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: ground.state.n_spins(),
        });
    }
    cfg.adiabatic.validate(ctx.schedule.b0)?;

    let mut rng = RngStream::substream(cfg.seed, Stream::InitialState);
    let mut psi = StateVector::random_infinite_temperature(n, &mut rng)?;

    let mut recorder = Recorder::new(ctx, Some(&ground.state), cfg.sample_every);
    let polarization = match cfg.scheme {
        Scheme::RandomTarget => {
            cfg.scheme1.validate(n)?;
            scheme1_loop(&cfg.scheme1).run(ctx, &mut psi, 0, &mut recorder)?
        }
        Scheme::Probe => {
            cfg.scheme2.validate(n)?;
            scheme2_loop(&cfg.scheme2).run(ctx, &mut psi, 0, &mut recorder)?
        }
    };
    let polarization_fraction = psi.magnetization_z().abs() / (n as f64 / 2.0);
    let polarization_end_time = ctx.time_at(polarization.end_step);
    log::info!(
        "polarization {} after {} rounds at t = {polarization_end_time:.3}: |Mz|/(N/2) = {polarization_fraction:.4}",
        if polarization.completed { "completed" } else { "incomplete" },
        polarization.rounds,
    );

    let mut ramp_cfg = cfg.adiabatic.clone();
    ramp_cfg.ramp_start = ramp_cfg.ramp_start.max(polarization_end_time);
    let ramp = ramp_context(ctx, &ramp_cfg);
    let mut trace = recorder.into_trace();
    let mut ramp_recorder = Recorder::new(&ramp, Some(&ground.state), cfg.sample_every);
    let end_step = ramp_loop(
        &ramp,
        &ramp_cfg,
        &mut psi,
        polarization.end_step,
        &mut ramp_recorder,
    )?;
    log::info!("ramp finished at t = {:.3}", ramp.time_at(end_step));
    ramp_recorder.mark(Event::Done);
    let mut ramp_trace = ramp_recorder.into_trace().samples.into_iter();
    // Both phases record the hand-over instant; keep one row.
    if let (Some(last), Some(first)) = (trace.samples.last_mut(), ramp_trace.next()) {
        let mut events = std::mem::take(&mut last.events);
        events.extend(first.events.iter().copied());
        *last = TraceSample { events, ..first };
    }
    trace.samples.extend(ramp_trace);

    let summary = Summary {
        final_bare_energy: ctx.bare_energy(&psi)?,
        final_fidelity: ground.state.fidelity(&psi)?,
        final_mz: psi.magnetization_z(),
        reference_energy: ground.energy,
        polarization_fraction,
        polarization_completed: polarization.completed,
        polarization_rounds: polarization.rounds,
        polarization_end_time,
        elapsed: ctx.time_at(end_step),
    };
    Ok(FullOutput {
        state: psi,
        trace,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{self, OperatorTermList};
    use crate::schedule::DriveSchedule;
    use Direction::{Down, Up};

    fn zero_bare_ctx(n: usize) -> EvolutionContext {
        EvolutionContext::new(
            OperatorTermList::new(n, vec![]).unwrap(),
            hamiltonian::zeeman(n).unwrap(),
            hamiltonian::rf(n).unwrap(),
            DriveSchedule::constant_field(10.0, 1.0, 5.0),
            1e-3,
        )
        .unwrap()
    }

    #[test]
    fn termination_rule() {
        assert!(check_termination(&[Down, Down, Down], 3));
        assert!(!check_termination(&[Down, Up, Down], 3));
        assert!(!check_termination(&[Down, Down], 3));
        assert!(check_termination(&[Up, Down, Down, Down], 3));
    }

    #[test]
    fn event_names_round_trip() {
        for e in [
            Event::MeasureUp,
            Event::MeasureDown,
            Event::RfOn,
            Event::RfOff,
            Event::RampStart,
            Event::Done,
        ] {
            assert_eq!(Event::parse(e.name()), Some(e));
        }
        assert_eq!(Event::parse("bogus"), None);
    }

    #[test]
    fn scheme1_polarized_start_is_absorbing() {
        let ctx = zero_bare_ctx(4);
        let cfg = SchemeIConfig::for_chain(&ctx, 3);
        let psi0 = StateVector::all_down(4).unwrap();
        let out = run_scheme1(&ctx, &cfg, &psi0, TraceOptions::default()).unwrap();
        assert!(out.completed);
        assert_eq!(out.rounds, cfg.k_term as u64);
        assert_eq!(out.trace.count_event(Event::RfOn), 0);
        assert!(out.state.fidelity(&psi0).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn scheme1_round_cap_flags_incomplete() {
        let ctx = zero_bare_ctx(2);
        let mut cfg = SchemeIConfig::for_chain(&ctx, 5);
        cfg.max_rounds = 3;
        let psi0 = StateVector::all_up(2).unwrap();
        let out = run_scheme1(&ctx, &cfg, &psi0, TraceOptions::default()).unwrap();
        assert!(!out.completed);
        assert_eq!(out.rounds, 3);
    }

    #[test]
    fn scheme1_rejects_small_k_term() {
        let ctx = zero_bare_ctx(4);
        let mut cfg = SchemeIConfig::for_chain(&ctx, 5);
        cfg.k_term = 3;
        let psi0 = StateVector::all_down(4).unwrap();
        assert!(run_scheme1(&ctx, &cfg, &psi0, TraceOptions::default())
            .unwrap_err()
            .is_config());
    }

    #[test]
    fn recorder_merges_same_step() {
        let ctx = zero_bare_ctx(2);
        let psi = StateVector::all_down(2).unwrap();
        let mut rec = Recorder::new(&ctx, None, 10);
        rec.record(0, &psi, false, &[]).unwrap();
        rec.record(10, &psi, false, &[]).unwrap();
        rec.record(10, &psi, true, &[Event::MeasureUp, Event::RfOn]).unwrap();
        assert!(rec.record(5, &psi, true, &[]).is_err());
        let trace = rec.into_trace();
        assert_eq!(trace.len(), 2);
        assert!(trace.samples[1].rf);
        assert_eq!(trace.samples[1].events, vec![Event::MeasureUp, Event::RfOn]);
        assert!(trace.samples[0].fidelity.is_nan());
    }

    #[test]
    fn adiabatic_rejects_bad_config() {
        let ctx = zero_bare_ctx(2);
        let psi = StateVector::all_down(2).unwrap();
        let mut cfg = AdiabaticConfig::new(10.0, 10.0);
        cfg.b_stop = 20.0;
        assert!(run_adiabatic(&ctx, &cfg, &psi, &psi, TraceOptions::default()).is_err());
        cfg = AdiabaticConfig::new(-1.0, 10.0);
        assert!(run_adiabatic(&ctx, &cfg, &psi, &psi, TraceOptions::default()).is_err());
    }
}
