//! Four-momentum and four-periodicity of a free particle, Lorentz boosts, and
//! the worldline form of de Broglie phase harmony.
//!
//! Energies are in eV and momenta in eV/c throughout; [`Constants`] converts
//! to seconds and metres only when periods and wavelengths are produced.

use serde::{Deserialize, Serialize};

use crate::constants::{Constants, ParticleSpec};
use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// Largest admissible speed, in units of c.
pub const MAX_SPEED: f64 = 1.0 - 1e-12;

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Energy (eV) and momentum (eV/c) of a particle in some inertial frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourMomentum {
    pub energy: f64,
    pub momentum: Vec3,
}

impl FourMomentum {
    pub fn at_rest(rest_mass_energy: f64) -> Self {
        FourMomentum {
            energy: rest_mass_energy,
            momentum: [0.0; 3],
        }
    }

    /// `E² - |pc|²` in eV², factored to limit cancellation.
    pub fn invariant_mass_squared(&self) -> f64 {
        let p = norm(&self.momentum);
        (self.energy - p) * (self.energy + p)
    }

    /// Invariant mass energy in eV; zero for null or spacelike vectors.
    pub fn invariant_mass(&self) -> f64 {
        self.invariant_mass_squared().max(0.0).sqrt()
    }

    /// `|E² - |pc|² - (Mc²)²|`.
    pub fn mass_shell_residual(&self, rest_mass_energy: f64) -> f64 {
        (self.invariant_mass_squared() - rest_mass_energy * rest_mass_energy).abs()
    }
}

/// Temporal period and spatial wavelengths dual to a [`FourMomentum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourPeriodicity {
    /// `h / E`, seconds.
    pub temporal_period: f64,
    /// `h / p_i` per component, metres. `+inf` where `p_i = 0`; signed otherwise.
    pub spatial_wavelengths: Vec3,
    /// Rest-frame period from the invariant mass; `+inf` when massless.
    pub proper_period: f64,
}

/// A pure boost with velocity `β` (units of c).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boost {
    velocity: Vec3,
}

impl Boost {
    pub fn new(velocity: Vec3) -> Result<Self> {
        if velocity.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite velocity {velocity:?}")));
        }
        let speed = norm(&velocity);
        if speed > MAX_SPEED {
            return Err(Error::Domain(format!(
                "|beta| = {speed} must be below {MAX_SPEED}"
            )));
        }
        Ok(Boost { velocity })
    }

    pub fn identity() -> Self {
        Boost { velocity: [0.0; 3] }
    }

    /// Boost along `direction` with Lorentz factor `gamma >= 1`.
    pub fn from_gamma(direction: Vec3, gamma: f64) -> Result<Self> {
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!("gamma must be >= 1, got {gamma}")));
        }
        let n = norm(&direction);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Domain("boost direction must be non-zero".into()));
        }
        let speed = (1.0 - 1.0 / (gamma * gamma)).sqrt();
        Boost::new(direction.map(|d| d / n * speed))
    }

    pub fn velocity(&self) -> Vec3 {
        self.velocity
    }

    pub fn speed(&self) -> f64 {
        norm(&self.velocity)
    }

    pub fn gamma(&self) -> f64 {
        let b = self.speed();
        1.0 / ((1.0 - b) * (1.0 + b)).sqrt()
    }

    pub fn inverse(&self) -> Self {
        Boost {
            velocity: self.velocity.map(|v| -v),
        }
    }
}

/// Rest-frame (Compton) period `h / Mc²`; `+inf` for a massless particle.
pub fn compton_period(p: &ParticleSpec, k: &Constants) -> f64 {
    if p.is_massless() {
        return f64::INFINITY;
    }
    k.h / k.joules(p.rest_mass_energy)
}

/// Four-momentum of a massive particle moving with the boost velocity.
pub fn four_momentum(p: &ParticleSpec, b: &Boost, _k: &Constants) -> Result<FourMomentum> {
    if p.is_massless() {
        return Err(Error::Unsupported(format!(
            "`{}` is massless; build photon states with photon_momentum",
            p.name
        )));
    }
    let gamma = b.gamma();
    let m = p.rest_mass_energy;
    Ok(FourMomentum {
        energy: gamma * m,
        momentum: b.velocity.map(|v| gamma * v * m),
    })
}

/// Null four-momentum of energy `energy` (eV) travelling along `direction`.
pub fn photon_momentum(energy: f64, direction: Vec3) -> Result<FourMomentum> {
    if !(energy.is_finite() && energy >= 0.0) {
        return Err(Error::Domain(format!(
            "photon energy must be >= 0, got {energy}"
        )));
    }
    let n = norm(&direction);
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Domain("photon direction must be non-zero".into()));
    }
    Ok(FourMomentum {
        energy,
        momentum: direction.map(|d| energy * d / n),
    })
}

/// Componentwise reciprocal periods: `T_t = h/E`, `λ_i = h/p_i`.
pub fn periodicity_of(m: &FourMomentum, k: &Constants) -> Result<FourPeriodicity> {
    if !(m.energy > 0.0 && m.energy.is_finite()) {
        return Err(Error::Domain(format!(
            "temporal period needs energy > 0, got {}",
            m.energy
        )));
    }
    let temporal_period = k.h / k.joules(m.energy);
    let spatial_wavelengths = m.momentum.map(|p| {
        if p == 0.0 {
            f64::INFINITY
        } else {
            // p [eV/c] -> p * eV / c [kg m/s]
            k.h * k.c / k.joules(p)
        }
    });
    let mass = m.invariant_mass();
    let proper_period = if mass > 0.0 {
        k.h / k.joules(mass)
    } else {
        f64::INFINITY
    };
    Ok(FourPeriodicity {
        temporal_period,
        spatial_wavelengths,
        proper_period,
    })
}

/// Active Lorentz boost: a state at rest ends up moving with velocity `β`.
pub fn boost_momentum(m: &FourMomentum, b: &Boost) -> FourMomentum {
    let speed = b.speed();
    if speed == 0.0 {
        return *m;
    }
    let gamma = b.gamma();
    let n = b.velocity.map(|v| v / speed);
    let p_par = dot(&n, &m.momentum);
    let energy = gamma * (m.energy + speed * p_par);
    let p_par_new = gamma * (p_par + speed * m.energy);
    let shift = p_par_new - p_par;
    FourMomentum {
        energy,
        momentum: [
            m.momentum[0] + shift * n[0],
            m.momentum[1] + shift * n[1],
            m.momentum[2] + shift * n[2],
        ],
    }
}

/// Difference, in cycles, between the de Broglie wave phase carried along the
/// particle worldline `x = βct` and the proper-time phase of its internal
/// clock, `τ / T_τ` with `τ = t / γ`. Zero up to rounding for every massive
/// state.
pub fn phase_harmony_residual(p: &ParticleSpec, b: &Boost, t: f64, k: &Constants) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t must be finite and >= 0, got {t}")));
    }
    let m = four_momentum(p, b, k)?;
    // (E t - p·x) / h with x = βct, and p in eV/c, so p·x = (p·β) t in eV·s.
    let wave_rate = (m.energy - dot(&m.momentum, &b.velocity)) * k.electronvolt / k.h;
    let clock_rate = p.rest_mass_energy * k.electronvolt / k.h;
    let wave_phase = t * wave_rate;
    let clock_phase = (t / b.gamma()) * clock_rate;
    Ok(wave_phase - clock_phase)
}
