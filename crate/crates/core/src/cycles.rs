//! Internal clocks: phase evolution, tick counting and helicity.
//!
//! Phases are measured in cycles in `[0, 1)`. A clock may additionally carry
//! its period and initial phase as exact rationals; the relational-time
//! decoder then runs on exact arithmetic.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::constants::{Constants, ParticleSpec};
use crate::error::{Error, Result};
use crate::kinematics::{four_momentum, periodicity_of, Boost};
use crate::numerics::{cycles_fraction, rational_from_f64, rational_to_f64, wrap_unit};

/// Rotation sense of a clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Helicity {
    Positive,
    Negative,
}

impl Helicity {
    pub fn sign(self) -> f64 {
        match self {
            Helicity::Positive => 1.0,
            Helicity::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Helicity::Positive => Helicity::Negative,
            Helicity::Negative => Helicity::Positive,
        }
    }
}

impl TryFrom<i8> for Helicity {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Helicity::Positive),
            -1 => Ok(Helicity::Negative),
            other => Err(format!("helicity must be +1 or -1, got {other}")),
        }
    }
}

impl From<Helicity> for i8 {
    fn from(h: Helicity) -> i8 {
        match h {
            Helicity::Positive => 1,
            Helicity::Negative => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct ExactParts {
    period: BigRational,
    initial_phase: BigRational,
}

/// A finite-period phase oscillator.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleClock {
    label: String,
    period: f64,
    initial_phase: f64,
    helicity: Helicity,
    exact: Option<ExactParts>,
}

impl CycleClock {
    pub fn new(label: &str, period: f64, initial_phase: f64, helicity: Helicity) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::Validation(format!(
                "clock `{label}`: period must be finite and > 0, got {period}"
            )));
        }
        if !(0.0..1.0).contains(&initial_phase) {
            return Err(Error::Validation(format!(
                "clock `{label}`: initial phase must lie in [0, 1), got {initial_phase}"
            )));
        }
        Ok(CycleClock {
            label: label.to_string(),
            period,
            initial_phase,
            helicity,
            exact: None,
        })
    }

    /// A clock whose period and initial phase are exact rationals.
    pub fn exact(
        label: &str,
        period: BigRational,
        initial_phase: BigRational,
        helicity: Helicity,
    ) -> Result<Self> {
        if !period.is_positive() {
            return Err(Error::Validation(format!(
                "clock `{label}`: period must be > 0"
            )));
        }
        if initial_phase.is_negative() || initial_phase >= BigRational::from_integer(1.into()) {
            return Err(Error::Validation(format!(
                "clock `{label}`: initial phase must lie in [0, 1)"
            )));
        }
        let mut clock = CycleClock::new(
            label,
            rational_to_f64(&period),
            wrap_unit(rational_to_f64(&initial_phase)),
            helicity,
        )?;
        clock.exact = Some(ExactParts {
            period,
            initial_phase,
        });
        Ok(clock)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn initial_phase(&self) -> f64 {
        self.initial_phase
    }

    pub fn helicity(&self) -> Helicity {
        self.helicity
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_period(&self) -> Option<&BigRational> {
        self.exact.as_ref().map(|e| &e.period)
    }

    pub fn exact_initial_phase(&self) -> Option<&BigRational> {
        self.exact.as_ref().map(|e| &e.initial_phase)
    }

    /// Period as an exact rational: the stored one, or the binary value of the `f64`.
    pub(crate) fn period_rational(&self) -> BigRational {
        match &self.exact {
            Some(e) => e.period.clone(),
            None => rational_from_f64(self.period).expect("finite period"),
        }
    }

    pub(crate) fn initial_phase_rational(&self) -> BigRational {
        match &self.exact {
            Some(e) => e.initial_phase.clone(),
            None => rational_from_f64(self.initial_phase).expect("finite phase"),
        }
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    /// Phase in `[0, 1)` at external time `t`.
    pub fn phase_at(&self, t: f64) -> f64 {
        phase_at(self, t)
    }
}

/// `frac(initial_phase + helicity · t / period)`.
pub fn phase_at(c: &CycleClock, t: f64) -> f64 {
    wrap_unit(c.initial_phase + c.helicity.sign() * cycles_fraction(t, c.period))
}

/// Cycle boundaries crossed while the clock runs from `t0` to `t1`:
/// `floor(φ0 + t1/T) - floor(φ0 + t0/T)`, evaluated exactly on the input
/// values. Counts over adjacent intervals add up exactly; helicity does not
/// enter.
pub fn tick_count(c: &CycleClock, t0: f64, t1: f64) -> Result<u128> {
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(Error::Domain("interval bounds must be finite".into()));
    }
    if t1 < t0 {
        return Err(Error::Domain(format!(
            "interval end {t1} precedes start {t0}"
        )));
    }
    if t0 == t1 {
        return Ok(0);
    }
    let period = c.period_rational();
    let phase0 = c.initial_phase_rational();
    let cycles = |t: f64| {
        let t = rational_from_f64(t).expect("finite");
        (&phase0 + t / &period).floor().to_integer()
    };
    let n = cycles(t1) - cycles(t0);
    debug_assert!(!n.is_negative() || n.is_zero());
    n.to_u128()
        .ok_or_else(|| Error::Domain("tick count exceeds 128 bits".into()))
}

/// The wave-period clock of a particle in the given state of motion:
/// `period = h / E`, so a moving clock runs at `T_τ / γ`.
pub fn clock_from_particle(
    p: &ParticleSpec,
    b: &Boost,
    k: &Constants,
    phase0: f64,
    helicity: Helicity,
) -> Result<CycleClock> {
    if p.is_massless() {
        return Err(Error::Unsupported(format!(
            "`{}` has a frozen rest clock; use ExternalAxis for massless carriers",
            p.name
        )));
    }
    let m = four_momentum(p, b, k)?;
    let t = periodicity_of(&m, k)?;
    CycleClock::new(&p.name, t.temporal_period, phase0, helicity)
}

/// Same clock, opposite rotation sense (particle ↔ antiparticle).
pub fn invert_helicity(c: &CycleClock) -> CycleClock {
    CycleClock {
        helicity: c.helicity.flipped(),
        ..c.clone()
    }
}

/// Non-cyclic reference axis: the infinite-period limit of a clock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExternalAxis {
    pub origin: f64,
}

impl ExternalAxis {
    pub fn new(origin: f64) -> Result<Self> {
        if !origin.is_finite() {
            return Err(Error::Validation("axis origin must be finite".into()));
        }
        Ok(ExternalAxis { origin })
    }

    /// Axis coordinate of external time `t`.
    pub fn coordinate(&self, t: f64) -> f64 {
        t - self.origin
    }
}

/// Ordered set of clocks with unique labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockEnsemble {
    clocks: Vec<CycleClock>,
}

impl ClockEnsemble {
    pub fn new(clocks: Vec<CycleClock>) -> Result<Self> {
        for (i, c) in clocks.iter().enumerate() {
            if clocks[..i].iter().any(|d| d.label == c.label) {
                return Err(Error::Conflict(format!(
                    "duplicate clock label `{}`",
                    c.label
                )));
            }
        }
        Ok(ClockEnsemble { clocks })
    }

    /// Clocks labelled `c0, c1, ...` with the given periods, zero phase, positive helicity.
    pub fn from_periods(periods: &[f64]) -> Result<Self> {
        let clocks = periods
            .iter()
            .enumerate()
            .map(|(i, &p)| CycleClock::new(&format!("c{i}"), p, 0.0, Helicity::Positive))
            .collect::<Result<Vec<_>>>()?;
        ClockEnsemble::new(clocks)
    }

    /// Exact-rational counterpart of [`ClockEnsemble::from_periods`].
    pub fn from_exact_periods(periods: &[BigRational]) -> Result<Self> {
        let clocks = periods
            .iter()
            .enumerate()
            .map(|(i, p)| {
                CycleClock::exact(
                    &format!("c{i}"),
                    p.clone(),
                    BigRational::zero(),
                    Helicity::Positive,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        ClockEnsemble::new(clocks)
    }

    pub fn clocks(&self) -> &[CycleClock] {
        &self.clocks
    }

    pub fn len(&self) -> usize {
        self.clocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clocks.is_empty()
    }

    pub fn all_exact(&self) -> bool {
        self.clocks.iter().all(CycleClock::is_exact)
    }

    pub fn any_exact(&self) -> bool {
        self.clocks.iter().any(CycleClock::is_exact)
    }

    pub fn min_period(&self) -> f64 {
        self.clocks
            .iter()
            .map(|c| c.period)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_period(&self) -> f64 {
        self.clocks.iter().map(|c| c.period).fold(0.0, f64::max)
    }

    /// Every clock with its helicity inverted.
    pub fn inverted(&self) -> Self {
        ClockEnsemble {
            clocks: self.clocks.iter().map(invert_helicity).collect(),
        }
    }

    /// Inverts the helicity of the clock at `index` only.
    pub fn with_inverted(&self, index: usize) -> Self {
        let mut out = self.clone();
        if let Some(c) = out.clocks.get_mut(index) {
            *c = invert_helicity(c);
        }
        out
    }
}
