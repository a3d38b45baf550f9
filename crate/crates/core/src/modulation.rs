//! Interaction events as retarded changes of clock periods.
//!
//! An event at `(t0, x)` shifts the energy of each participating clock by
//! `ΔE`; a clock at distance `d` switches to period `h / (E + ΔE)` at exactly
//! `t0 + d / c`, keeping its phase continuous.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::constants::{find_particle, Constants, ParticleSpec};
use crate::cycles::{clock_from_particle, ClockEnsemble, CycleClock, Helicity};
use crate::error::{Error, Result};
use crate::kinematics::{norm, Boost, Vec3};
use crate::numerics::{cycles_fraction, neumaier_sum, wrap_unit};
use crate::relational_time::{classify, EnsembleKind, DEFAULT_RATIONALIZATION_TOLERANCE};

/// Relative slack allowed on `Σ ΔE = 0`, in units of `Σ |ΔE|`.
pub const BALANCE_TOLERANCE: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionEvent {
    /// Emission time, s.
    pub time: f64,
    /// Emission point, m.
    pub position: Vec3,
    /// Energy change per clock label, eV. Sums to zero.
    pub energy_exchange: BTreeMap<String, f64>,
}

impl InteractionEvent {
    pub fn new(time: f64, position: Vec3, energy_exchange: BTreeMap<String, f64>) -> Result<Self> {
        let ev = InteractionEvent {
            time,
            position,
            energy_exchange,
        };
        ev.validate()?;
        Ok(ev)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.time.is_finite() || self.position.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation(
                "event time and position must be finite".into(),
            ));
        }
        if self.energy_exchange.values().any(|v| !v.is_finite()) {
            return Err(Error::Validation("energy exchange must be finite".into()));
        }
        let total = neumaier_sum(self.energy_exchange.values().copied());
        let scale = neumaier_sum(self.energy_exchange.values().map(|v| v.abs()));
        if total.abs() > BALANCE_TOLERANCE * scale {
            return Err(Error::Validation(format!(
                "energy exchange at t = {} does not balance (sum {total} eV)",
                self.time
            )));
        }
        Ok(())
    }

    /// True if some participant actually changes energy.
    pub fn exchanges_energy(&self) -> bool {
        self.energy_exchange.values().any(|&v| v != 0.0)
    }
}

/// A clock at a fixed position, with the energy that sets its period.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionedClock {
    clock: CycleClock,
    position: Vec3,
    energy: f64,
}

impl PositionedClock {
    pub fn from_energy(
        label: &str,
        energy: f64,
        position: Vec3,
        phase0: f64,
        helicity: Helicity,
        k: &Constants,
    ) -> Result<Self> {
        if !(energy > 0.0 && energy.is_finite()) {
            return Err(Error::Validation(format!(
                "clock `{label}`: energy must be > 0"
            )));
        }
        check_position(label, &position)?;
        let clock = CycleClock::new(label, k.h / k.joules(energy), phase0, helicity)?;
        Ok(PositionedClock {
            clock,
            position,
            energy,
        })
    }

    pub fn from_period(
        label: &str,
        period: f64,
        position: Vec3,
        phase0: f64,
        helicity: Helicity,
        k: &Constants,
    ) -> Result<Self> {
        check_position(label, &position)?;
        let clock = CycleClock::new(label, period, phase0, helicity)?;
        let energy = k.h / period / k.electronvolt;
        Ok(PositionedClock {
            clock,
            position,
            energy,
        })
    }

    pub fn from_particle(
        label: &str,
        particle: &ParticleSpec,
        boost: &Boost,
        position: Vec3,
        phase0: f64,
        helicity: Helicity,
        k: &Constants,
    ) -> Result<Self> {
        check_position(label, &position)?;
        let clock = clock_from_particle(particle, boost, k, phase0, helicity)?.with_label(label);
        let energy = boost.gamma() * particle.rest_mass_energy;
        Ok(PositionedClock {
            clock,
            position,
            energy,
        })
    }

    pub fn clock(&self) -> &CycleClock {
        &self.clock
    }

    pub fn label(&self) -> &str {
        self.clock.label()
    }

    pub fn position(&self) -> Vec3 {
        self.position
    }

    /// Energy backing the current period, eV.
    pub fn energy(&self) -> f64 {
        self.energy
    }
}

fn check_position(label: &str, position: &Vec3) -> Result<()> {
    if position.iter().any(|x| !x.is_finite()) {
        return Err(Error::Validation(format!(
            "clock `{label}`: position must be finite"
        )));
    }
    Ok(())
}

fn distance(a: &Vec3, b: &Vec3) -> f64 {
    norm(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

/// Arrival time of a light-speed signal from `event` at `position`.
pub fn arrival_time(event: &InteractionEvent, position: &Vec3, k: &Constants) -> f64 {
    event.time + distance(&event.position, position) / k.c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub start_time: f64,
    pub period: f64,
    /// Phase in `[0, 1)` at `start_time`.
    pub phase_at_start: f64,
    /// Energy backing `period`, eV.
    pub energy: f64,
}

impl Segment {
    fn phase_at(&self, t: f64, helicity: Helicity) -> f64 {
        wrap_unit(
            self.phase_at_start
                + helicity.sign() * cycles_fraction(t - self.start_time, self.period),
        )
    }
}

/// Piecewise-constant period history of one clock. The first segment starts
/// at the origin `t = 0` and also describes earlier times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulationTimeline {
    pub label: String,
    pub helicity: Helicity,
    pub segments: Vec<Segment>,
}

impl ModulationTimeline {
    fn segment_index(&self, t: f64) -> usize {
        self.segments
            .partition_point(|s| s.start_time <= t)
            .saturating_sub(1)
    }

    pub fn segment_at(&self, t: f64) -> &Segment {
        &self.segments[self.segment_index(t)]
    }

    pub fn phase_at(&self, t: f64) -> f64 {
        self.segment_at(t).phase_at(t, self.helicity)
    }

    pub fn period_at(&self, t: f64) -> f64 {
        self.segment_at(t).period
    }

    /// Times at which the period changes.
    pub fn switch_times(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.start_time).collect()
    }

    /// Uniformly sampled phase history `start + j·step`, `j < n`.
    pub fn sample(&self, start: f64, step: f64, n: usize) -> PhaseHistory {
        PhaseHistory {
            start_time: start,
            phases: (0..n)
                .map(|j| self.phase_at(start + j as f64 * step))
                .collect(),
        }
    }
}

/// Applies every event to every clock it names. Each clock sees its own
/// changes in arrival order; two changes arriving at the same instant on one
/// clock are rejected rather than combined.
pub fn apply_events(
    system: &[PositionedClock],
    events: &[InteractionEvent],
    k: &Constants,
) -> Result<BTreeMap<String, ModulationTimeline>> {
    for (i, c) in system.iter().enumerate() {
        if system[..i].iter().any(|d| d.label() == c.label()) {
            return Err(Error::Conflict(format!(
                "duplicate clock label `{}`",
                c.label()
            )));
        }
    }
    for (i, ev) in events.iter().enumerate() {
        ev.validate()?;
        if i > 0 && ev.time < events[i - 1].time {
            return Err(Error::Usage(format!(
                "events are not time-sorted at index {i}"
            )));
        }
        if let Some(label) = ev
            .energy_exchange
            .keys()
            .find(|l| !system.iter().any(|c| c.label() == l.as_str()))
        {
            return Err(Error::Usage(format!(
                "event {i} names unknown clock `{label}`"
            )));
        }
    }

    let mut out = BTreeMap::new();
    for pc in system {
        let mut arrivals: Vec<(f64, f64, usize)> = events
            .iter()
            .enumerate()
            .filter_map(|(i, ev)| {
                let de = ev.energy_exchange.get(pc.label()).copied().unwrap_or(0.0);
                (de != 0.0).then(|| (arrival_time(ev, &pc.position, k), de, i))
            })
            .collect();
        arrivals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));

        let helicity = pc.clock.helicity();
        let mut segments = vec![Segment {
            start_time: 0.0,
            period: pc.clock.period(),
            phase_at_start: pc.clock.initial_phase(),
            energy: pc.energy,
        }];
        for (n, &(t, de, event)) in arrivals.iter().enumerate() {
            if n > 0 && arrivals[n - 1].0 == t {
                return Err(Error::Conflict(format!(
                    "events {} and {event} reach clock `{}` simultaneously at t = {t} s",
                    arrivals[n - 1].2,
                    pc.label()
                )));
            }
            if t < 0.0 {
                return Err(Error::Domain(format!(
                    "event {event} reaches clock `{}` at t = {t} s, before the origin",
                    pc.label()
                )));
            }
            let last = *segments.last().expect("non-empty");
            let energy = last.energy + de;
            if energy <= 0.0 {
                return Err(Error::PhysicalValidity {
                    event,
                    clock: pc.label().to_string(),
                    message: format!("energy would drop to {energy} eV"),
                });
            }
            let next = Segment {
                start_time: t,
                period: k.h / k.joules(energy),
                phase_at_start: last.phase_at(t, helicity),
                energy,
            };
            if t == last.start_time {
                // only possible for the origin segment
                *segments.last_mut().expect("non-empty") = next;
            } else {
                segments.push(next);
            }
        }
        out.insert(
            pc.label().to_string(),
            ModulationTimeline {
                label: pc.label().to_string(),
                helicity,
                segments,
            },
        );
    }
    Ok(out)
}

/// Uniformly sampled phases of one clock.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseHistory {
    pub start_time: f64,
    pub phases: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeChange {
    pub time: f64,
    pub old_period: f64,
    pub new_period: f64,
}

/// Largest per-sample phase advance accepted (cycles): the history must be
/// sampled at least eight times per period.
pub const MAX_PHASE_STEP: f64 = 0.125;

/// Relative spread of the instantaneous frequency inside one regime.
const FREQUENCY_REL_TOL: f64 = 1e-6;

fn signed_increment(a: f64, b: f64) -> f64 {
    let d = wrap_unit(b - a);
    if d >= 0.5 {
        d - 1.0
    } else {
        d
    }
}

/// Recovers period switches from a sampled phase history.
///
/// The instantaneous frequency (wrapped phase increment per sample) is split
/// into runs of constant value. Between two runs the switch instant is solved
/// from the total phase advanced across the gap, assuming the old frequency
/// before the switch and the new one after it.
pub fn detect_regime_changes(
    history: &PhaseHistory,
    sample_step: f64,
) -> Result<Vec<RegimeChange>> {
    if !(sample_step > 0.0 && sample_step.is_finite()) {
        return Err(Error::Usage(format!(
            "sample step must be positive, got {sample_step}"
        )));
    }
    let phases = &history.phases;
    if phases.len() < 2 {
        return Ok(Vec::new());
    }
    let increments: Vec<f64> = phases
        .windows(2)
        .map(|w| signed_increment(w[0], w[1]))
        .collect();
    if let Some((j, d)) = increments
        .iter()
        .enumerate()
        .find(|(_, d)| d.abs() > MAX_PHASE_STEP * (1.0 + 1e-9))
    {
        return Err(Error::Resolution(format!(
            "phase advances {:.4} cycles between samples {j} and {}; sample at least 8 times per period",
            d.abs(),
            j + 1
        )));
    }
    let freqs: Vec<f64> = increments.iter().map(|d| d / sample_step).collect();

    // runs of constant frequency: (first interval, last interval, mean frequency)
    let mut runs: Vec<(usize, usize, f64)> = Vec::new();
    let mut start = 0;
    for j in 1..=freqs.len() {
        let same = j < freqs.len() && {
            let f0 = freqs[start];
            (freqs[j] - f0).abs() <= FREQUENCY_REL_TOL * f0.abs() + 1e-12 / sample_step
        };
        if !same {
            let mean = neumaier_sum(freqs[start..j].iter().copied()) / (j - start) as f64;
            runs.push((start, j - 1, mean));
            start = j;
        }
    }
    let stable: Vec<&(usize, usize, f64)> = runs.iter().filter(|r| r.1 > r.0).collect();

    let time_of = |sample: usize| history.start_time + sample as f64 * sample_step;
    let mut out = Vec::new();
    for pair in stable.windows(2) {
        let (_, a_end, f_old) = *pair[0];
        let (b_start, _, f_new) = *pair[1];
        // gap spans samples a_end + 1 ..= b_start
        let t_a = time_of(a_end + 1);
        let t_b = time_of(b_start);
        let advanced = neumaier_sum(increments[a_end + 1..b_start].iter().copied());
        let t_switch = if f_old == f_new {
            0.5 * (t_a + t_b)
        } else {
            (t_a + (advanced - f_new * (t_b - t_a)) / (f_old - f_new)).clamp(t_a, t_b)
        };
        out.push(RegimeChange {
            time: t_switch,
            old_period: 1.0 / f_old.abs(),
            new_period: 1.0 / f_new.abs(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arrival {
    pub event: usize,
    pub time: f64,
}

/// Events in the order one observer receives them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObserverSchedule {
    pub observer: String,
    pub arrivals: Vec<Arrival>,
    /// Groups of events (by index) that arrive at exactly the same instant.
    pub ties: Vec<Vec<usize>>,
}

/// Per observer, events sorted by arrival time `t0 + d/c`.
pub fn causal_order(
    events: &[InteractionEvent],
    observers: &[PositionedClock],
    k: &Constants,
) -> Vec<ObserverSchedule> {
    observers
        .iter()
        .map(|obs| {
            let mut arrivals: Vec<Arrival> = events
                .iter()
                .enumerate()
                .map(|(i, ev)| Arrival {
                    event: i,
                    time: arrival_time(ev, &obs.position, k),
                })
                .collect();
            arrivals.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.event.cmp(&b.event)));
            let mut ties: Vec<Vec<usize>> = Vec::new();
            for group in arrivals.chunk_by(|a, b| a.time == b.time) {
                if group.len() > 1 {
                    ties.push(group.iter().map(|a| a.event).collect());
                }
            }
            ObserverSchedule {
                observer: obs.label().to_string(),
                arrivals,
                ties,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "regime")]
pub enum Regime {
    /// No interaction and a single period (or commensurate periods).
    Cyclic { system_period: Option<f64> },
    /// Free clocks with incommensurate periods.
    Ergodic,
    /// At least one event exchanges energy.
    Chaotic,
}

pub fn regime_classify(system: &[PositionedClock], events: &[InteractionEvent]) -> Regime {
    if events.iter().any(InteractionEvent::exchanges_energy) {
        return Regime::Chaotic;
    }
    match system {
        [] => Regime::Cyclic {
            system_period: None,
        },
        [one] => Regime::Cyclic {
            system_period: Some(one.clock.period()),
        },
        many => {
            let clocks = many.iter().map(|pc| pc.clock.clone()).collect();
            let Ok(ensemble) = ClockEnsemble::new(clocks) else {
                return Regime::Ergodic;
            };
            let tol = if ensemble.all_exact() {
                0.0
            } else {
                DEFAULT_RATIONALIZATION_TOLERANCE
            };
            match classify(&ensemble, tol) {
                Ok(c) if c.kind == EnsembleKind::Periodic => Regime::Cyclic {
                    system_period: c.system_period,
                },
                _ => Regime::Ergodic,
            }
        }
    }
}

/// Clock entry of a scenario file. Exactly one of `period_s` and `particle`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioClock {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particle: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec3>,
    #[serde(default)]
    pub position_m: Vec3,
    #[serde(default)]
    pub phase0: f64,
    #[serde(default = "positive")]
    pub helicity: Helicity,
}

fn positive() -> Helicity {
    Helicity::Positive
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioEvent {
    pub t0_s: f64,
    #[serde(default)]
    pub position_m: Vec3,
    pub exchange: BTreeMap<String, f64>,
}

/// Clocks and interaction events, as read from a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub clocks: Vec<ScenarioClock>,
    #[serde(default)]
    pub events: Vec<ScenarioEvent>,
}

impl Scenario {
    pub fn build(
        &self,
        particles: &[ParticleSpec],
        k: &Constants,
    ) -> Result<(Vec<PositionedClock>, Vec<InteractionEvent>)> {
        let clocks = self
            .clocks
            .iter()
            .map(|c| match (&c.period_s, &c.particle) {
                (Some(p), None) => {
                    if c.beta.is_some() {
                        return Err(Error::Usage(format!(
                            "clock `{}`: beta only applies to particle clocks",
                            c.label
                        )));
                    }
                    PositionedClock::from_period(
                        &c.label,
                        *p,
                        c.position_m,
                        c.phase0,
                        c.helicity,
                        k,
                    )
                }
                (None, Some(name)) => {
                    let particle = find_particle(particles, name)?;
                    let boost = Boost::new(c.beta.unwrap_or([0.0; 3]))?;
                    PositionedClock::from_particle(
                        &c.label,
                        particle,
                        &boost,
                        c.position_m,
                        c.phase0,
                        c.helicity,
                        k,
                    )
                }
                _ => Err(Error::Usage(format!(
                    "clock `{}` needs exactly one of period_s and particle",
                    c.label
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        let events = self
            .events
            .iter()
            .map(|e| InteractionEvent::new(e.t0_s, e.position_m, e.exchange.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok((clocks, events))
    }
}
