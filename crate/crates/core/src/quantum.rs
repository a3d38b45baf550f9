//! Periodicity as a quantization condition, the winding-sum/mode-sum identity
//! for the free kernel on a circle, and the phase density of a fast clock.
//!
//! The propagators work in natural units (ħ = 1) and imaginary time, where
//! both sums converge absolutely.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constants::{Constants, ParticleSpec};
use crate::cycles::CycleClock;
use crate::error::{Error, Result};
use crate::kinematics::{four_momentum, periodicity_of, Boost};
use crate::numerics::{distance_to_integer, pairwise_sum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumLine {
    pub n: u32,
    /// E_n = n·h/T_t, eV.
    pub energy: f64,
}

/// Harmonics `n = 1..=n_max` of the particle's temporal period.
pub fn harmonic_spectrum(
    p: &ParticleSpec,
    b: &Boost,
    k: &Constants,
    n_max: u32,
) -> Result<Vec<SpectrumLine>> {
    if p.is_massless() {
        return Err(Error::Unsupported(format!(
            "`{}` is massless; no rest clock to quantize",
            p.name
        )));
    }
    if n_max == 0 {
        return Err(Error::Usage("n_max must be at least 1".into()));
    }
    let period = periodicity_of(&four_momentum(p, b, k)?, k)?.temporal_period;
    let fundamental = k.h / period / k.electronvolt;
    Ok((1..=n_max)
        .map(|n| SpectrumLine {
            n,
            energy: n as f64 * fundamental,
        })
        .collect())
}

/// Smallest truncation tolerance accepted.
pub const MIN_TRUNCATION_TOLERANCE: f64 = 100.0 * f64::EPSILON;
pub const DEFAULT_TRUNCATION_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompactPropagatorConfig {
    /// L
    pub circumference: f64,
    pub mass: f64,
    /// β
    pub imaginary_time: f64,
    pub truncation_tolerance: f64,
}

impl Default for CompactPropagatorConfig {
    fn default() -> Self {
        CompactPropagatorConfig {
            circumference: 1.0,
            mass: 1.0,
            imaginary_time: 0.1,
            truncation_tolerance: DEFAULT_TRUNCATION_TOLERANCE,
        }
    }
}

impl CompactPropagatorConfig {
    pub fn new(
        circumference: f64,
        mass: f64,
        imaginary_time: f64,
        truncation_tolerance: f64,
    ) -> Result<Self> {
        let cfg = CompactPropagatorConfig {
            circumference,
            mass,
            imaginary_time,
            truncation_tolerance,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("circumference", self.circumference),
            ("mass", self.mass),
            ("imaginary_time", self.imaginary_time),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if !(self.truncation_tolerance >= MIN_TRUNCATION_TOLERANCE
            && self.truncation_tolerance < 1.0)
        {
            return Err(Error::Validation(format!(
                "truncation tolerance must lie in [{MIN_TRUNCATION_TOLERANCE:e}, 1), got {}",
                self.truncation_tolerance
            )));
        }
        Ok(())
    }

    pub fn with_imaginary_time(self, beta: f64) -> Self {
        CompactPropagatorConfig {
            imaginary_time: beta,
            ..self
        }
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if !(x >= 0.0 && x < self.circumference) {
            return Err(Error::Domain(format!(
                "point {x} outside [0, {})",
                self.circumference
            )));
        }
        Ok(())
    }
}

/// A propagator value with the number of series terms it took.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: f64,
    pub terms: usize,
}

fn free_kernel(xi: f64, beta: f64, m: f64) -> f64 {
    (m / (2.0 * PI * beta)).sqrt() * (-m * xi * xi / (2.0 * beta)).exp()
}

/// Image sum `Σ_w G_free(x − x0 + wL)`, walking outward from the nearest
/// image until both tails drop below `tol · sum`.
pub fn winding_sum_detailed(cfg: &CompactPropagatorConfig, x: f64, x0: f64) -> Result<KernelValue> {
    cfg.validate()?;
    cfg.check_point(x)?;
    cfg.check_point(x0)?;
    let (l, beta, m, tol) = (
        cfg.circumference,
        cfg.imaginary_time,
        cfg.mass,
        cfg.truncation_tolerance,
    );
    let d = x - x0;
    let centre = -(d / l).round() as i64;
    let term = |w: i64| free_kernel(d + w as f64 * l, beta, m);

    let mut terms = vec![term(centre)];
    let mut running = terms[0];
    let (mut up, mut down) = (centre, centre);
    let (mut up_done, mut down_done) = (false, false);
    while !(up_done && down_done) {
        if !up_done {
            up += 1;
            let t = term(up);
            terms.push(t);
            running += t;
            up_done = t < tol * running;
        }
        if !down_done {
            down -= 1;
            let t = term(down);
            terms.push(t);
            running += t;
            down_done = t < tol * running;
        }
    }
    // smallest first for the pairwise reduction
    terms.sort_by(f64::total_cmp);
    Ok(KernelValue {
        value: pairwise_sum(&terms),
        terms: terms.len(),
    })
}

/// Mode sum `(1/L) Σ_k exp(−β E_k) cos(2πk(x − x0)/L)`, `E_k = (2πk/L)²/(2m)`.
/// Stops when the envelope `2·exp(−β E_k)` drops below `tol · sum`.
pub fn mode_sum_detailed(cfg: &CompactPropagatorConfig, x: f64, x0: f64) -> Result<KernelValue> {
    cfg.validate()?;
    cfg.check_point(x)?;
    cfg.check_point(x0)?;
    let (l, beta, m, tol) = (
        cfg.circumference,
        cfg.imaginary_time,
        cfg.mass,
        cfg.truncation_tolerance,
    );
    let d = (x - x0) / l;
    let mut terms = vec![1.0];
    let mut running = 1.0;
    let mut k: u64 = 0;
    loop {
        k += 1;
        let q = 2.0 * PI * k as f64 / l;
        let envelope = 2.0 * (-beta * q * q / (2.0 * m)).exp();
        // k·d reduced to one turn so large k keeps cos accurate
        let turns = (k as f64 * d).rem_euclid(1.0);
        let t = envelope * (2.0 * PI * turns).cos();
        terms.push(t);
        running += t;
        if envelope < tol * running.abs() {
            break;
        }
    }
    let n = 2 * terms.len() - 1;
    terms.reverse();
    Ok(KernelValue {
        value: pairwise_sum(&terms) / l,
        terms: n,
    })
}

pub fn winding_sum_propagator(cfg: &CompactPropagatorConfig, x: f64, x0: f64) -> Result<f64> {
    winding_sum_detailed(cfg, x, x0).map(|v| v.value)
}

pub fn mode_sum_propagator(cfg: &CompactPropagatorConfig, x: f64, x0: f64) -> Result<f64> {
    mode_sum_detailed(cfg, x, x0).map(|v| v.value)
}

/// Outcome of comparing both propagators on an `n × n` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub max_abs_rel_diff: f64,
    pub grid: usize,
    pub winding_terms_max: usize,
    pub mode_terms_max: usize,
}

/// `max |winding − mode| / mode` over `x, x0 ∈ {iL/n}`.
pub fn propagator_identity(cfg: &CompactPropagatorConfig, grid: usize) -> Result<IdentityCheck> {
    if grid == 0 {
        return Err(Error::Usage("grid must be at least 1".into()));
    }
    let mut out = IdentityCheck {
        max_abs_rel_diff: 0.0,
        grid,
        winding_terms_max: 0,
        mode_terms_max: 0,
    };
    let point = |i: usize| cfg.circumference * i as f64 / grid as f64;
    for i in 0..grid {
        for j in 0..grid {
            let w = winding_sum_detailed(cfg, point(i), point(j))?;
            let m = mode_sum_detailed(cfg, point(i), point(j))?;
            out.max_abs_rel_diff = out
                .max_abs_rel_diff
                .max((w.value - m.value).abs() / m.value);
            out.winding_terms_max = out.winding_terms_max.max(w.terms);
            out.mode_terms_max = out.mode_terms_max.max(m.terms);
        }
    }
    Ok(out)
}

/// Relative jitter bound on each sampling instant.
pub const JITTER: f64 = 1e-3;
/// Minimum sampling step in units of the clock period.
pub const MIN_STEP_RATIO: f64 = 1e3;
pub const MIN_SAMPLES: usize = 10_000;
pub const DEFAULT_BINS: usize = 50;
/// Largest denominator treated as a resonance of `step/period`.
const RESONANCE_MAX_DENOMINATOR: u32 = 10;
const RESONANCE_WIDTH: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseHistogram {
    pub counts: Vec<u64>,
    /// Fraction of samples per bin.
    pub masses: Vec<f64>,
}

impl PhaseHistogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn samples(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `Σ counts / n`: exactly 1 for any non-empty histogram.
    pub fn total_mass(&self) -> f64 {
        self.samples() as f64 / self.samples() as f64
    }

    /// Pearson statistic against the uniform density.
    pub fn chi_square(&self) -> f64 {
        let expected = self.samples() as f64 / self.bins() as f64;
        let terms: Vec<f64> = self
            .counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .collect();
        pairwise_sum(&terms)
    }
}

/// Histogram of the phases seen at `j·step·(1 + u_j)`, `j = 1..=n`, with
/// `u_j` drawn uniformly from `±JITTER` by a generator seeded with `seed`.
pub fn phase_density_sample(
    c: &CycleClock,
    sampler_step: f64,
    n_samples: usize,
    seed: u64,
    bins: usize,
) -> Result<PhaseHistogram> {
    if !(sampler_step > 0.0 && sampler_step.is_finite()) {
        return Err(Error::Usage(format!(
            "sampler step must be > 0, got {sampler_step}"
        )));
    }
    if n_samples < MIN_SAMPLES {
        return Err(Error::Usage(format!(
            "need at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    if bins == 0 {
        return Err(Error::Usage("bins must be at least 1".into()));
    }
    let ratio = sampler_step / c.period();
    if ratio < MIN_STEP_RATIO {
        return Err(Error::AliasingRisk(format!(
            "step is only {ratio:.3e} periods; need at least {MIN_STEP_RATIO:e}"
        )));
    }
    let frac = ratio - ratio.floor();
    if let Some(q) = (1..=RESONANCE_MAX_DENOMINATOR)
        .find(|&q| distance_to_integer(frac * q as f64) < RESONANCE_WIDTH * q as f64)
    {
        return Err(Error::AliasingRisk(format!(
            "step/period = {ratio} sits on a rational with denominator {q}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; bins];
    for j in 1..=n_samples {
        let u: f64 = rng.random_range(-JITTER..JITTER);
        let t = j as f64 * sampler_step * (1.0 + u);
        let phase = c.phase_at(t);
        let bin = ((phase * bins as f64) as usize).min(bins - 1);
        counts[bin] += 1;
    }
    let masses = counts
        .iter()
        .map(|&c| c as f64 / n_samples as f64)
        .collect();
    Ok(PhaseHistogram { counts, masses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{default_particle_table, find_particle};
    use crate::cycles::Helicity;

    fn electron() -> ParticleSpec {
        find_particle(&default_particle_table(), "electron")
            .unwrap()
            .clone()
    }

    #[test]
    fn electron_spectrum_at_rest() {
        let k = Constants::default();
        let lines = harmonic_spectrum(&electron(), &Boost::identity(), &k, 3).unwrap();
        for l in &lines {
            let want = l.n as f64 * 510998.95;
            assert!((l.energy - want).abs() <= 1e-12 * want, "{l:?}");
        }
    }

    #[test]
    fn boosted_second_harmonic() {
        let k = Constants::default();
        let b = Boost::from_gamma([1.0, 0.0, 0.0], 2.0).unwrap();
        let lines = harmonic_spectrum(&electron(), &b, &k, 2).unwrap();
        assert!((lines[1].energy - 2.0 * 1021997.9).abs() <= 1e-11 * 2043995.8);
    }

    #[test]
    fn photon_spectrum_unsupported() {
        let p = ParticleSpec::new("photon", 0.0).unwrap();
        let r = harmonic_spectrum(&p, &Boost::identity(), &Constants::default(), 1);
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }

    #[test]
    fn identity_at_coincident_point() {
        let cfg = CompactPropagatorConfig::default();
        let w = winding_sum_propagator(&cfg, 0.0, 0.0).unwrap();
        let m = mode_sum_propagator(&cfg, 0.0, 0.0).unwrap();
        assert!((w - m).abs() <= 1e-10 * m);
        let w = winding_sum_propagator(&cfg, 0.3, 0.0).unwrap();
        let m = mode_sum_propagator(&cfg, 0.3, 0.0).unwrap();
        assert!((w - m).abs() <= 1e-10 * m);
    }

    #[test]
    fn long_time_is_uniform() {
        let cfg = CompactPropagatorConfig::default().with_imaginary_time(100.0);
        for (x, x0) in [(0.0, 0.0), (0.1, 0.7), (0.5, 0.0)] {
            assert!((winding_sum_propagator(&cfg, x, x0).unwrap() - 1.0).abs() < 1e-6);
            assert!((mode_sum_propagator(&cfg, x, x0).unwrap() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn kernel_is_symmetric() {
        let cfg = CompactPropagatorConfig::default();
        let a = winding_sum_propagator(&cfg, 0.2, 0.9).unwrap();
        let b = winding_sum_propagator(&cfg, 0.9, 0.2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        assert!(CompactPropagatorConfig::new(1.0, 1.0, 0.1, 1e-16).is_err());
        assert!(CompactPropagatorConfig::new(0.0, 1.0, 0.1, 1e-12).is_err());
        let cfg = CompactPropagatorConfig::default();
        assert!(matches!(
            winding_sum_propagator(&cfg, 1.0, 0.0),
            Err(Error::Domain(_))
        ));
    }

    fn fast_clock() -> CycleClock {
        CycleClock::new("e", 8.093299794302628e-21, 0.0, Helicity::Positive).unwrap()
    }

    #[test]
    fn histogram_mass_is_one() {
        let h = phase_density_sample(&fast_clock(), 1e-15, 10_000, 7, 50).unwrap();
        assert_eq!(h.total_mass(), 1.0);
        assert_eq!(h.samples(), 10_000);
    }

    #[test]
    fn commensurate_step_is_aliasing_risk() {
        let c = CycleClock::new("c", 1.0, 0.0, Helicity::Positive).unwrap();
        for step in [5000.0, 5000.5, 10.0] {
            assert!(matches!(
                phase_density_sample(&c, step, 10_000, 0, 50),
                Err(Error::AliasingRisk(_))
            ));
        }
    }

    #[test]
    fn same_seed_same_histogram() {
        let a = phase_density_sample(&fast_clock(), 1e-15, 10_000, 42, 50).unwrap();
        let b = phase_density_sample(&fast_clock(), 1e-15, 10_000, 42, 50).unwrap();
        assert_eq!(a, b);
    }
}
