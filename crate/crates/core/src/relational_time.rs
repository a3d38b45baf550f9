//! Time as a combination of clock phases.
//!
//! An instant is encoded by the [`Fingerprint`] of an ensemble: the phase of
//! every clock at that instant. Decoding inverts the map over a finite window.
//! Ensembles with rational period ratios repeat with the LCM of their periods;
//! otherwise the phase orbit is dense and returns only approximately.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::cycles::{ClockEnsemble, CycleClock};
use crate::error::{Error, Result};
use crate::numerics::{
    convergents, crt_merge, distance_to_integer, rational_from_f64, rational_lcm, rational_to_f64,
    snap_unit_rational, torus_distance, wrap_unit, wrap_unit_rational,
};

/// Largest continued-fraction denominator accepted when testing a float
/// period ratio for rationality.
pub const MAX_RATIO_DENOMINATOR: u64 = 1_000_000;

/// Rationalization tolerance used when no explicit one is supplied.
pub const DEFAULT_RATIONALIZATION_TOLERANCE: f64 = 1e-12;

/// Upper bound on how many candidate windows a decode or recurrence search
/// may visit before it gives up.
pub const MAX_CANDIDATES: u64 = 50_000_000;

/// Default recurrence horizon, in units of the longest period.
pub const DEFAULT_HORIZON_PERIODS: f64 = 1e7;

/// Phases of every clock of an ensemble at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    labels: Vec<String>,
    phases: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

impl Fingerprint {
    pub fn new(labels: Vec<String>, phases: Vec<f64>) -> Result<Self> {
        if labels.len() != phases.len() {
            return Err(Error::Usage(format!(
                "{} labels but {} phases",
                labels.len(),
                phases.len()
            )));
        }
        if let Some(p) = phases.iter().find(|p| !(0.0..1.0).contains(*p)) {
            return Err(Error::Validation(format!("phase {p} outside [0, 1)")));
        }
        Ok(Fingerprint {
            labels,
            phases,
            exact: None,
        })
    }

    /// Fingerprint with exact rational phases (each reduced into `[0, 1)`).
    pub fn exact(labels: Vec<String>, phases: Vec<BigRational>) -> Result<Self> {
        let phases: Vec<BigRational> = phases.iter().map(wrap_unit_rational).collect();
        let floats = phases
            .iter()
            .map(|p| wrap_unit(rational_to_f64(p)))
            .collect();
        let mut f = Fingerprint::new(labels, floats)?;
        f.exact = Some(phases);
        Ok(f)
    }

    /// Replaces every phase by the simplest rational within `tolerance`,
    /// e.g. `0.333` becomes `1/3` for `tolerance >= 1/3000`.
    pub fn snapped(&self, tolerance: f64) -> Result<Self> {
        let exact = self
            .phases
            .iter()
            .map(|&p| {
                snap_unit_rational(p, tolerance)
                    .ok_or_else(|| Error::Validation(format!("cannot rationalize phase {p}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Fingerprint::exact(self.labels.clone(), exact)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn exact_phases(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// `phase -> 1 - phase (mod 1)` componentwise.
    pub fn conjugate(&self) -> Self {
        Fingerprint {
            labels: self.labels.clone(),
            phases: self.phases.iter().map(|p| wrap_unit(1.0 - p)).collect(),
            exact: self.exact.as_ref().map(|ex| {
                ex.iter()
                    .map(|p| wrap_unit_rational(&(BigRational::one() - p)))
                    .collect()
            }),
        }
    }

    /// Largest per-clock torus distance to `other`.
    pub fn distance(&self, other: &Fingerprint) -> f64 {
        self.phases
            .iter()
            .zip(&other.phases)
            .map(|(a, b)| torus_distance(*a, *b))
            .fold(0.0, f64::max)
    }
}

/// Phase of every clock at `t`.
pub fn fingerprint_at(e: &ClockEnsemble, t: f64) -> Fingerprint {
    Fingerprint {
        labels: e.clocks().iter().map(|c| c.label().to_string()).collect(),
        phases: e.clocks().iter().map(|c| c.phase_at(t)).collect(),
        exact: None,
    }
}

/// Exact fingerprint at a rational instant; requires every clock to be exact.
pub fn fingerprint_at_exact(e: &ClockEnsemble, t: &BigRational) -> Result<Fingerprint> {
    if !e.all_exact() {
        return Err(Error::Usage(
            "exact fingerprint needs exact clock periods".into(),
        ));
    }
    let phases = e
        .clocks()
        .iter()
        .map(|c| {
            let turns = t / c.period_rational();
            let signed = if c.helicity().sign() > 0.0 {
                turns
            } else {
                -turns
            };
            wrap_unit_rational(&(c.initial_phase_rational() + signed))
        })
        .collect();
    Fingerprint::exact(
        e.clocks().iter().map(|c| c.label().to_string()).collect(),
        phases,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EnsembleKind {
    Periodic,
    Ergodic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleClassification {
    pub kind: EnsembleKind,
    /// LCM of the periods, seconds. Present iff `Periodic`.
    pub system_period: Option<f64>,
    /// The same LCM as an exact rational, when every period was exact.
    pub exact_system_period: Option<BigRational>,
    /// Pairs of clocks with identical periods; they add nothing to decoding.
    pub duplicate_periods: Vec<(String, String)>,
}

/// Periodic iff every period ratio is rational. With exact periods this is
/// always so and the LCM is exact. Float periods are rationalized against
/// the first clock through continued-fraction convergents with denominator
/// at most [`MAX_RATIO_DENOMINATOR`], accepted within relative `tolerance`.
pub fn classify(
    e: &ClockEnsemble,
    rationalization_tolerance: f64,
) -> Result<EnsembleClassification> {
    if e.is_empty() {
        return Err(Error::Usage("cannot classify an empty ensemble".into()));
    }
    if !(0.0..=1e-6).contains(&rationalization_tolerance) {
        return Err(Error::Usage(format!(
            "rationalization tolerance must lie in [0, 1e-6], got {rationalization_tolerance}"
        )));
    }
    if rationalization_tolerance == 0.0 && !e.all_exact() {
        return Err(Error::Usage(
            "tolerance 0 requires every period to be an exact rational".into(),
        ));
    }

    if e.all_exact() {
        let periods: Vec<BigRational> = e.clocks().iter().map(|c| c.period_rational()).collect();
        let lcm = rational_lcm(periods.iter()).expect("non-empty");
        return Ok(EnsembleClassification {
            kind: EnsembleKind::Periodic,
            system_period: Some(rational_to_f64(&lcm)),
            exact_system_period: Some(lcm),
            duplicate_periods: duplicates(e.clocks(), &periods),
        });
    }

    let base = e.clocks()[0].period();
    let mut multiples = Vec::with_capacity(e.len());
    for c in e.clocks() {
        match rationalize_ratio(c.period() / base, rationalization_tolerance) {
            Some(m) => multiples.push(m),
            None => {
                let ones: Vec<BigRational> = e
                    .clocks()
                    .iter()
                    .map(|c| rational_from_f64(c.period()).expect("finite"))
                    .collect();
                return Ok(EnsembleClassification {
                    kind: EnsembleKind::Ergodic,
                    system_period: None,
                    exact_system_period: None,
                    duplicate_periods: duplicates(e.clocks(), &ones),
                });
            }
        }
    }
    let lcm = rational_lcm(multiples.iter()).expect("non-empty");
    Ok(EnsembleClassification {
        kind: EnsembleKind::Periodic,
        system_period: Some(base * rational_to_f64(&lcm)),
        exact_system_period: None,
        duplicate_periods: duplicates(e.clocks(), &multiples),
    })
}

fn duplicates(clocks: &[CycleClock], keys: &[BigRational]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for i in 0..keys.len() {
        for j in i + 1..keys.len() {
            if keys[i] == keys[j] {
                out.push((clocks[i].label().to_string(), clocks[j].label().to_string()));
            }
        }
    }
    out
}

/// `p/q` with `q <= MAX_RATIO_DENOMINATOR` within relative `tolerance` of `ratio`.
fn rationalize_ratio(ratio: f64, tolerance: f64) -> Option<BigRational> {
    let (x, inverted) = if ratio >= 1.0 {
        (ratio, false)
    } else {
        (1.0 / ratio, true)
    };
    let exact_x = rational_from_f64(x)?;
    let tol = rational_from_f64(tolerance)? * &exact_x;
    convergents(x, MAX_RATIO_DENOMINATOR)
        .into_iter()
        .map(|(p, q)| BigRational::new(p, q))
        .find(|r| (r - &exact_x).abs() <= tol)
        .map(|r| if inverted { r.recip() } else { r })
}

fn check_decode_inputs(
    e: &ClockEnsemble,
    f: &Fingerprint,
    window: (f64, f64),
    tol: f64,
) -> Result<()> {
    if e.is_empty() {
        return Err(Error::Usage("cannot decode with an empty ensemble".into()));
    }
    if f.len() != e.len() {
        return Err(Error::Usage(format!(
            "fingerprint has {} phases for {} clocks",
            f.len(),
            e.len()
        )));
    }
    if !(window.0.is_finite() && window.1.is_finite() && window.0 <= window.1) {
        return Err(Error::Usage(format!(
            "invalid window [{}, {})",
            window.0, window.1
        )));
    }
    if !(tol > 0.0 && tol < 0.5) {
        return Err(Error::Usage(format!(
            "phase tolerance must lie in (0, 0.5), got {tol}"
        )));
    }
    Ok(())
}

/// All instants in `[window.0, window.1)` whose fingerprint matches `f`
/// within `phase_tolerance` per clock, ascending.
///
/// When every clock is exact and `f` carries exact phases the instants come
/// from a Chinese-remainder reconstruction and are exact. Otherwise each
/// clock's matching set is a union of intervals and these are intersected
/// clock by clock, starting from the slowest. Each surviving interval is
/// reported by its least-squares phase fit; hits closer than
/// `phase_tolerance · min_period` are merged.
pub fn decode_time(
    e: &ClockEnsemble,
    f: &Fingerprint,
    window: (f64, f64),
    phase_tolerance: f64,
) -> Result<Vec<f64>> {
    check_decode_inputs(e, f, window, phase_tolerance)?;
    if e.all_exact() {
        if let Some(exact) = f.exact_phases() {
            return decode_exact(e, exact, window).map(|v| v.iter().map(rational_to_f64).collect());
        }
    }
    decode_intervals(e, f, window, phase_tolerance)
}

/// Exact CRT decoding. Returns the instants as rationals.
pub fn decode_time_exact(
    e: &ClockEnsemble,
    f: &Fingerprint,
    window: (f64, f64),
) -> Result<Vec<BigRational>> {
    check_decode_inputs(e, f, window, 0.25)?;
    let exact = f
        .exact_phases()
        .ok_or_else(|| Error::Usage("exact decoding needs exact fingerprint phases".into()))?;
    if !e.all_exact() {
        return Err(Error::Usage(
            "exact decoding needs exact clock periods".into(),
        ));
    }
    decode_exact(e, exact, window)
}

fn decode_exact(
    e: &ClockEnsemble,
    phases: &[BigRational],
    window: (f64, f64),
) -> Result<Vec<BigRational>> {
    // t ≡ offset_i (mod period_i), offset_i = frac(s_i (φ_i - φ0_i)) · period_i
    let mut moduli = Vec::with_capacity(e.len());
    let mut offsets = Vec::with_capacity(e.len());
    for (c, phase) in e.clocks().iter().zip(phases) {
        let period = c.period_rational();
        let diff = phase - c.initial_phase_rational();
        let turns = if c.helicity().sign() > 0.0 {
            diff
        } else {
            -diff
        };
        offsets.push(wrap_unit_rational(&turns) * &period);
        moduli.push(period);
    }
    let denom = moduli
        .iter()
        .chain(&offsets)
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let scale = BigRational::from_integer(denom.clone());
    let to_int = |r: &BigRational| (r * &scale).to_integer();

    let mut residue = to_int(&offsets[0]);
    let mut modulus = to_int(&moduli[0]);
    for (o, m) in offsets.iter().zip(&moduli).skip(1) {
        match crt_merge(&residue, &modulus, &to_int(o), &to_int(m)) {
            Some((r, m)) => {
                residue = r;
                modulus = m;
            }
            None => return Ok(Vec::new()),
        }
    }

    let lo = rational_from_f64(window.0).expect("finite") * &scale;
    let hi = rational_from_f64(window.1).expect("finite") * &scale;
    let first = ((lo - BigRational::from_integer(residue.clone()))
        / BigRational::from_integer(modulus.clone()))
    .ceil()
    .to_integer();
    let span = (&hi / BigRational::from_integer(modulus.clone()))
        .ceil()
        .to_integer()
        - &first;
    if span.to_u64().is_some_and(|s| s > MAX_CANDIDATES) {
        return Err(Error::Usage("window holds too many solutions".into()));
    }
    let mut out = Vec::new();
    let mut k = first;
    loop {
        let s = BigRational::from_integer(&residue + &k * &modulus);
        if s >= hi {
            break;
        }
        out.push(s / &scale);
        k += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
struct Candidate {
    lo: f64,
    hi: f64,
    /// (centre, period) of the matching cycle of every clock visited so far.
    centres: Vec<(f64, f64)>,
}

/// For one clock, the centres `offset + k·period` whose closed half-width
/// `half` neighbourhood meets `[lo, hi]`, clipped to it.
fn clock_windows(
    offset: f64,
    period: f64,
    half: f64,
    lo: f64,
    hi: f64,
) -> impl Iterator<Item = (f64, f64, f64)> {
    let k_min = ((lo - offset - half) / period).floor() as i64;
    let k_max = ((hi - offset + half) / period).ceil() as i64;
    (k_min..=k_max).filter_map(move |k| {
        let centre = offset + k as f64 * period;
        let a = lo.max(centre - half);
        let b = hi.min(centre + half);
        (a <= b).then_some((centre, a, b))
    })
}

fn estimated_windows(span: f64, period: f64) -> f64 {
    span / period + 2.0
}

fn decode_intervals(
    e: &ClockEnsemble,
    f: &Fingerprint,
    window: (f64, f64),
    tol: f64,
) -> Result<Vec<f64>> {
    let (lo, hi) = window;
    let clocks = e.clocks();
    let offsets: Vec<f64> = clocks
        .iter()
        .zip(f.phases())
        .map(|(c, &phase)| {
            let turns = c.helicity().sign() * (phase - c.initial_phase());
            wrap_unit(turns) * c.period()
        })
        .collect();

    let mut order: Vec<usize> = (0..clocks.len()).collect();
    order.sort_by(|&a, &b| {
        clocks[b]
            .period()
            .total_cmp(&clocks[a].period())
            .then(a.cmp(&b))
    });
    let seed = order[0];
    let seed_period = clocks[seed].period();
    if estimated_windows(hi - lo, seed_period) > MAX_CANDIDATES as f64 {
        return Err(Error::Usage("window too long for the slowest clock".into()));
    }

    let mut cands: Vec<Candidate> =
        clock_windows(offsets[seed], seed_period, tol * seed_period, lo, hi)
            .map(|(c, a, b)| Candidate {
                lo: a,
                hi: b,
                centres: vec![(c, seed_period)],
            })
            .collect();

    for &i in &order[1..] {
        let period = clocks[i].period();
        let mut next = Vec::new();
        for cand in &cands {
            for (c, a, b) in clock_windows(offsets[i], period, tol * period, cand.lo, cand.hi) {
                let mut centres = cand.centres.clone();
                centres.push((c, period));
                next.push(Candidate {
                    lo: a,
                    hi: b,
                    centres,
                });
            }
        }
        cands = next;
        if cands.is_empty() {
            break;
        }
    }

    let mut hits: Vec<(f64, f64)> = cands
        .iter()
        .map(|cand| {
            let (num, den) = cand.centres.iter().fold((0.0, 0.0), |(n, d), &(c, p)| {
                (n + c / (p * p), d + 1.0 / (p * p))
            });
            let t = (num / den).clamp(cand.lo, cand.hi);
            let miss = cand
                .centres
                .iter()
                .map(|&(c, p)| ((t - c) / p).abs())
                .fold(0.0, f64::max);
            (t, miss)
        })
        .filter(|&(t, _)| t >= lo && t < hi)
        .collect();
    hits.sort_by(|a, b| a.0.total_cmp(&b.0));

    let merge_gap = tol * e.min_period();
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(hits.len());
    for h in hits {
        match out.last_mut() {
            Some(last) if h.0 - last.0 <= merge_gap => {
                if h.1 < last.1 {
                    *last = h;
                }
            }
            _ => out.push(h),
        }
    }
    Ok(out.into_iter().map(|(t, _)| t).collect())
}

/// First window of lags `Δ > 0`, after the trivial one around `Δ = 0`, in
/// which every clock has advanced by a whole number of cycles to within
/// `epsilon`. Returns `(entry, exit)` of that window, or the best candidate
/// seen when none starts below `horizon`.
fn first_return(
    e: &ClockEnsemble,
    epsilon: f64,
    horizon: f64,
) -> std::result::Result<(f64, f64), (f64, f64)> {
    let clocks = e.clocks();
    let mut order: Vec<usize> = (0..clocks.len()).collect();
    order.sort_by(|&a, &b| {
        clocks[b]
            .period()
            .total_cmp(&clocks[a].period())
            .then(a.cmp(&b))
    });
    let seed_period = clocks[order[0]].period();
    let half = |p: f64| epsilon * p;

    let mut best = (f64::NAN, f64::INFINITY);
    let mut k: u64 = 0;
    loop {
        let centre = k as f64 * seed_period;
        let start = centre - half(seed_period);
        if start > horizon || k > MAX_CANDIDATES {
            return Err(best);
        }
        if k > 0 {
            let miss = clocks
                .iter()
                .map(|c| distance_to_integer(centre / c.period()))
                .fold(0.0, f64::max);
            if miss < best.1 {
                best = (centre, miss);
            }
        }
        let mut windows = vec![(start, centre + half(seed_period))];
        for &i in &order[1..] {
            let p = clocks[i].period();
            let mut next = Vec::new();
            for &(a, b) in &windows {
                for (_, lo, hi) in clock_windows(0.0, p, half(p), a, b) {
                    // open neighbourhoods: drop degenerate touches
                    if lo < hi {
                        next.push((lo, hi));
                    }
                }
            }
            windows = next;
            if windows.is_empty() {
                break;
            }
        }
        windows.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(&(a, b)) = windows.iter().find(|w| w.0 > 0.0 && w.0 <= horizon) {
            return Ok((a, b));
        }
        k += 1;
    }
}

fn check_epsilon(e: &ClockEnsemble, epsilon: f64) -> Result<()> {
    if e.is_empty() {
        return Err(Error::Usage("empty ensemble".into()));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Usage(format!(
            "epsilon must lie in (0, 0.5), got {epsilon}"
        )));
    }
    Ok(())
}

/// Smallest `t > 0`, outside the initial neighbourhood, at which every phase
/// is within `epsilon` of its initial value. If the ensemble is periodic and
/// its system period lies in that first return window, the system period
/// itself is returned.
pub fn recurrence_time(e: &ClockEnsemble, epsilon: f64) -> Result<f64> {
    check_epsilon(e, epsilon)?;
    recurrence_time_with_horizon(e, epsilon, DEFAULT_HORIZON_PERIODS * e.max_period())
}

pub fn recurrence_time_with_horizon(e: &ClockEnsemble, epsilon: f64, horizon: f64) -> Result<f64> {
    check_epsilon(e, epsilon)?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Usage(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    match first_return(e, epsilon, horizon) {
        Ok((entry, exit)) => {
            let tol = if e.all_exact() {
                0.0
            } else {
                DEFAULT_RATIONALIZATION_TOLERANCE
            };
            if let Ok(class) = classify(e, tol) {
                if let Some(period) = class.system_period {
                    if entry <= period && period <= exit {
                        return Ok(period);
                    }
                }
            }
            Ok(entry)
        }
        Err((best_time, best_distance)) => Err(Error::NotFound {
            horizon,
            best_time,
            best_distance,
        }),
    }
}

/// Shortest separation between two instants in `[0, window]` whose
/// fingerprints differ by less than `epsilon` (largest per-clock distance),
/// ignoring the trivial neighbourhood of zero separation. Returns `window`
/// when no such pair exists.
pub fn distinguishability_gap(e: &ClockEnsemble, epsilon: f64, window: f64) -> Result<f64> {
    check_epsilon(e, epsilon)?;
    if !(window > 0.0 && window.is_finite()) {
        return Err(Error::Usage(format!(
            "window must be positive, got {window}"
        )));
    }
    match first_return(e, epsilon, window) {
        Ok((entry, _)) if entry <= window => Ok(entry),
        _ => Ok(window),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::Helicity;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn exact_345() -> ClockEnsemble {
        ClockEnsemble::from_exact_periods(&[rat(3, 1), rat(4, 1), rat(5, 1)]).unwrap()
    }

    #[test]
    fn fingerprint_of_seven() {
        let e = ClockEnsemble::from_periods(&[3.0, 4.0, 5.0]).unwrap();
        let f = fingerprint_at(&e, 7.0);
        let want = [1.0 / 3.0, 0.75, 0.4];
        for (a, b) in f.phases().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let z = fingerprint_at(&e, 0.0);
        assert_eq!(z.phases(), &[0.0, 0.0, 0.0]);
        let one = ClockEnsemble::from_periods(&[1.0]).unwrap();
        assert_eq!(fingerprint_at(&one, 0.25).phases(), &[0.25]);
    }

    #[test]
    fn exact_fingerprint_is_rational() {
        let f = fingerprint_at_exact(&exact_345(), &rat(7, 1)).unwrap();
        assert_eq!(
            f.exact_phases().unwrap(),
            &[rat(1, 3), rat(3, 4), rat(2, 5)]
        );
    }

    #[test]
    fn classify_examples() {
        let c = classify(&exact_345(), 0.0).unwrap();
        assert_eq!(c.kind, EnsembleKind::Periodic);
        assert_eq!(c.exact_system_period, Some(rat(60, 1)));

        let e = ClockEnsemble::from_periods(&[1.0, std::f64::consts::SQRT_2]).unwrap();
        assert_eq!(classify(&e, 1e-12).unwrap().kind, EnsembleKind::Ergodic);

        let e = ClockEnsemble::from_exact_periods(&[rat(1, 3), rat(1, 6)]).unwrap();
        assert_eq!(
            classify(&e, 0.0).unwrap().exact_system_period,
            Some(rat(1, 3))
        );

        let e = ClockEnsemble::from_periods(&[3.0, 4.0, 5.0]).unwrap();
        let c = classify(&e, 1e-12).unwrap();
        assert_eq!(c.system_period, Some(60.0));
    }

    #[test]
    fn classify_inverse_ratio_is_symmetric() {
        let e = ClockEnsemble::from_periods(&[std::f64::consts::SQRT_2, 1.0]).unwrap();
        assert_eq!(classify(&e, 1e-12).unwrap().kind, EnsembleKind::Ergodic);
    }

    #[test]
    fn classify_usage_errors() {
        let floats = ClockEnsemble::from_periods(&[1.0, 2.0]).unwrap();
        assert!(matches!(classify(&floats, 0.0), Err(Error::Usage(_))));
        let mut clocks = exact_345().clocks().to_vec();
        clocks.push(CycleClock::new("f", 2.0, 0.0, Helicity::Positive).unwrap());
        let mixed = ClockEnsemble::new(clocks).unwrap();
        assert!(matches!(classify(&mixed, 0.0), Err(Error::Usage(_))));
        assert!(classify(&mixed, 1e-9).is_ok());
        assert!(matches!(classify(&floats, 1e-3), Err(Error::Usage(_))));
    }

    #[test]
    fn duplicates_are_flagged() {
        let e = ClockEnsemble::from_periods(&[1.0, 1.0]).unwrap();
        let c = classify(&e, 1e-12).unwrap();
        assert_eq!(
            c.duplicate_periods,
            vec![("c0".to_string(), "c1".to_string())]
        );
    }

    #[test]
    fn exact_decode_crt() {
        let e = exact_345();
        let f = Fingerprint::exact(
            vec!["c0".into(), "c1".into(), "c2".into()],
            vec![rat(1, 3), rat(3, 4), rat(2, 5)],
        )
        .unwrap();
        assert_eq!(decode_time(&e, &f, (0.0, 60.0), 1e-6).unwrap(), vec![7.0]);
        assert_eq!(
            decode_time(&e, &f, (0.0, 120.0), 1e-6).unwrap(),
            vec![7.0, 67.0]
        );
        assert_eq!(
            decode_time_exact(&e, &f, (0.0, 60.0)).unwrap(),
            vec![rat(7, 1)]
        );
    }

    #[test]
    fn exact_decode_incompatible_is_empty() {
        let e = ClockEnsemble::from_exact_periods(&[rat(2, 1), rat(4, 1)]).unwrap();
        let f =
            Fingerprint::exact(vec!["c0".into(), "c1".into()], vec![rat(0, 1), rat(1, 4)]).unwrap();
        assert!(decode_time(&e, &f, (0.0, 100.0), 1e-3).unwrap().is_empty());
    }

    #[test]
    fn float_decode_matches() {
        let e = ClockEnsemble::from_periods(&[3.0, 4.0, 5.0]).unwrap();
        let f = fingerprint_at(&e, 7.0);
        let got = decode_time(&e, &f, (0.0, 60.0), 1e-6).unwrap();
        assert_eq!(got.len(), 1);
        assert!((got[0] - 7.0).abs() < 1e-9);
    }

    #[test]
    fn single_clock_aliases() {
        let e = ClockEnsemble::from_periods(&[1.0]).unwrap();
        let f = Fingerprint::new(vec!["c0".into()], vec![0.5]).unwrap();
        assert_eq!(
            decode_time(&e, &f, (0.0, 3.0), 1e-3).unwrap(),
            vec![0.5, 1.5, 2.5]
        );
    }

    #[test]
    fn decode_usage_errors() {
        let empty = ClockEnsemble::new(vec![]).unwrap();
        let f = Fingerprint::new(vec![], vec![]).unwrap();
        assert!(matches!(
            decode_time(&empty, &f, (0.0, 1.0), 0.1),
            Err(Error::Usage(_))
        ));
        let e = ClockEnsemble::from_periods(&[1.0]).unwrap();
        let f = Fingerprint::new(vec!["c0".into()], vec![0.5]).unwrap();
        assert!(decode_time(&e, &f, (0.0, 1.0), 0.5).is_err());
        assert!(decode_time(&e, &f, (0.0, f64::INFINITY), 0.1).is_err());
    }

    #[test]
    fn snapping_recovers_thirds() {
        let f = Fingerprint::new(vec!["a".into(), "b".into()], vec![0.333, 0.75]).unwrap();
        let s = f.snapped(1e-3).unwrap();
        assert_eq!(s.exact_phases().unwrap(), &[rat(1, 3), rat(3, 4)]);
    }

    #[test]
    fn recurrence_of_integers_is_lcm() {
        let e = ClockEnsemble::from_periods(&[3.0, 4.0, 5.0]).unwrap();
        assert_eq!(recurrence_time(&e, 1e-6).unwrap(), 60.0);
        assert_eq!(recurrence_time(&exact_345(), 1e-6).unwrap(), 60.0);
    }

    #[test]
    fn recurrence_of_sqrt2_near_41() {
        let e = ClockEnsemble::from_periods(&[1.0, std::f64::consts::SQRT_2]).unwrap();
        let t = recurrence_time(&e, 0.01).unwrap();
        assert!((t - 41.0).abs() < 0.01, "{t}");
    }

    #[test]
    fn recurrence_not_found_reports_best() {
        let e = ClockEnsemble::from_periods(&[1.0, std::f64::consts::SQRT_2]).unwrap();
        match recurrence_time_with_horizon(&e, 0.001, 100.0) {
            Err(Error::NotFound { best_time, .. }) => assert!(best_time > 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gap_examples() {
        let one = ClockEnsemble::from_periods(&[1.0]).unwrap();
        assert!((distinguishability_gap(&one, 0.01, 10.0).unwrap() - 1.0).abs() <= 0.011);
        let e = ClockEnsemble::from_periods(&[3.0, 4.0, 5.0]).unwrap();
        assert_eq!(distinguishability_gap(&e, 1e-9, 59.0).unwrap(), 59.0);
        let dup = ClockEnsemble::from_periods(&[1.0, 1.0]).unwrap();
        assert!((distinguishability_gap(&dup, 0.01, 10.0).unwrap() - 1.0).abs() <= 0.011);
    }
}
