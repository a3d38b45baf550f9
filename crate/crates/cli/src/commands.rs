use std::collections::BTreeMap;
use std::path::Path;

use cyclochron_core::constants::{find_particle, Constants, ParticleSpec};
use cyclochron_core::cycles::{
    clock_from_particle, invert_helicity, phase_at, tick_count, ClockEnsemble, CycleClock,
    ExternalAxis, Helicity,
};
use cyclochron_core::kinematics::{
    boost_momentum, compton_period, four_momentum, periodicity_of, phase_harmony_residual,
    photon_momentum, Boost, FourMomentum,
};
use cyclochron_core::modulation::{
    apply_events, causal_order, detect_regime_changes, regime_classify, PhaseHistory, Regime,
    Scenario,
};
use cyclochron_core::numerics::{rational_to_f64, snap_unit_rational};
use cyclochron_core::quantum::{
    harmonic_spectrum, phase_density_sample, propagator_identity, CompactPropagatorConfig,
};
use cyclochron_core::relational_time::{
    classify, decode_time, decode_time_exact, distinguishability_gap, fingerprint_at,
    fingerprint_at_exact, recurrence_time, recurrence_time_with_horizon, EnsembleKind, Fingerprint,
};
use cyclochron_core::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{fmt, num, nums};
use crate::Report;

/// Most samples `simulate` will write.
const MAX_HISTORY_SAMPLES: f64 = 1e7;

pub struct Context {
    pub k: Constants,
    pub table: Vec<ParticleSpec>,
    pub seed: u64,
}

pub fn dispatch(cmd: &Command, ctx: &Context) -> Result<Report> {
    match cmd {
        Command::Clock(a) => clock(a, ctx),
        Command::Ticks(a) => ticks(a, ctx),
        Command::Decode(a) => decode(a),
        Command::Recurrence(a) => recurrence(a),
        Command::Simulate(a) => simulate(a, ctx),
        Command::Detect(a) => detect(a),
        Command::Spectrum(a) => spectrum(a, ctx),
        Command::VerifyPropagator(a) => verify_propagator(a),
        Command::Classify(a) => classify_cmd(a, ctx),
    }
}

fn vec3(v: &[f64]) -> Result<[f64; 3]> {
    match v {
        [x, y, z] => Ok([*x, *y, *z]),
        _ => Err(Error::Usage(format!(
            "expected three components `x,y,z`, got {}",
            v.len()
        ))),
    }
}

impl MotionArgs {
    fn direction(&self) -> Result<[f64; 3]> {
        self.direction
            .as_deref()
            .map(vec3)
            .unwrap_or(Ok([1.0, 0.0, 0.0]))
    }

    fn boost(&self) -> Result<Boost> {
        match (&self.beta, self.gamma) {
            (Some(b), _) => Boost::new(vec3(b)?),
            (None, Some(g)) => Boost::from_gamma(self.direction()?, g),
            (None, None) => Ok(Boost::identity()),
        }
    }
}

fn momentum_json(m: &FourMomentum) -> Value {
    json!({
        "energy_ev": num(m.energy),
        "momentum_ev": nums(&m.momentum),
        "invariant_mass_ev": num(m.invariant_mass()),
    })
}

fn clock(a: &ClockArgs, ctx: &Context) -> Result<Report> {
    let k = &ctx.k;
    let p = find_particle(&ctx.table, &a.particle)?;
    let boost = a.motion.boost()?;
    let mut payload = json!({
        "particle": p.name,
        "rest_mass_ev": num(p.rest_mass_energy),
        "charge": num(p.charge),
        "spin": p.spin.to_string(),
        "T_tau_s": num(compton_period(p, k)),
        "beta": nums(&boost.velocity()),
        "gamma": num(boost.gamma()),
    });

    let state = if p.is_massless() {
        if a.t.is_some() {
            return Err(Error::Unsupported(format!(
                "`{}` has no internal clock to compare phases with",
                p.name
            )));
        }
        match a.energy {
            Some(e) => Some(photon_momentum(e, a.motion.direction()?)?),
            None => {
                // frozen clock: time can only be read off an external axis
                let axis = ExternalAxis::new(0.0)?;
                payload["external_axis"] = json!({ "origin_s": num(axis.coordinate(0.0)) });
                None
            }
        }
    } else {
        if a.energy.is_some() {
            return Err(Error::Usage(
                "--energy applies to massless particles only".into(),
            ));
        }
        Some(four_momentum(p, &boost, k)?)
    };

    if let Some(mut m) = state {
        if let Some(b) = &a.boost {
            m = boost_momentum(&m, &Boost::new(vec3(b)?)?);
        }
        let t = periodicity_of(&m, k)?;
        payload["four_momentum"] = momentum_json(&m);
        payload["four_periodicity"] = json!({
            "T_t_s": num(t.temporal_period),
            "lambda_m": nums(&t.spatial_wavelengths),
            "proper_period_s": num(t.proper_period),
        });
    }
    if let Some(t) = a.t {
        payload["phase_harmony"] = json!({
            "t_s": num(t),
            "residual_cycles": num(phase_harmony_residual(p, &boost, t, k)?),
        });
    }
    Ok(Report::new("clock", payload))
}

fn ticks(a: &TicksArgs, ctx: &Context) -> Result<Report> {
    let c = match (&a.particle, a.period) {
        (Some(name), _) => {
            let p = find_particle(&ctx.table, name)?;
            clock_from_particle(p, &a.motion.boost()?, &ctx.k, a.phase0, Helicity::Positive)?
        }
        (None, Some(period)) => CycleClock::new("clock", period, a.phase0, Helicity::Positive)?,
        (None, None) => return Err(Error::Usage("give --period or --particle".into())),
    };
    let n = tick_count(&c, a.from, a.to)?;
    let payload = json!({
        "period_s": num(c.period()),
        "from_s": num(a.from),
        "to_s": num(a.to),
        "ticks": n,
        "phase_at_end": num(phase_at(&c, a.to)),
    });
    Ok(Report::new("ticks", payload))
}

/// Exact value of an integer, decimal (`1.25`, `3e-2`) or fraction (`1/3`).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Usage(format!("`{s}` is not a rational number"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if frac.contains(['+', '-']) || (int.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let digits = format!(
        "{}{}",
        if int.is_empty() || int == "-" || int == "+" {
            format!("{int}0")
        } else {
            int.into()
        },
        frac
    );
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(n * Pow::pow(&ten, scale as u32))
    } else {
        BigRational::new(n, Pow::pow(&ten, (-scale) as u32))
    })
}

fn parse_f64(s: &str) -> Result<f64> {
    if s.contains('/') {
        return Ok(rational_to_f64(&parse_rational(s)?));
    }
    s.trim()
        .parse()
        .map_err(|_| Error::Usage(format!("`{s}` is not a number")))
}

fn ensemble(periods: &[String], exact: bool) -> Result<ClockEnsemble> {
    if exact {
        let p = periods
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        ClockEnsemble::from_exact_periods(&p)
    } else {
        let p = periods
            .iter()
            .map(|s| parse_f64(s))
            .collect::<Result<Vec<_>>>()?;
        ClockEnsemble::from_periods(&p)
    }
}

fn apply_inversions(e: ClockEnsemble, which: Option<&[String]>) -> Result<ClockEnsemble> {
    let Some(which) = which else { return Ok(e) };
    let all = which.iter().any(|w| w == "all");
    let mut flip = vec![all; e.len()];
    if !all {
        for w in which {
            let i: usize = w.parse().map_err(|_| {
                Error::Usage(format!("--invert takes clock indices or `all`, got `{w}`"))
            })?;
            *flip
                .get_mut(i)
                .ok_or_else(|| Error::Usage(format!("--invert index {i} out of range")))? = true;
        }
    }
    let clocks = e
        .clocks()
        .iter()
        .zip(flip)
        .map(|(c, f)| if f { invert_helicity(c) } else { c.clone() })
        .collect();
    ClockEnsemble::new(clocks)
}

fn rational_string(r: &BigRational) -> String {
    r.to_string()
}

fn labels(e: &ClockEnsemble) -> Vec<String> {
    e.clocks().iter().map(|c| c.label().to_string()).collect()
}

fn decode(a: &DecodeArgs) -> Result<Report> {
    let exact = a.ensemble.exact;
    let e = apply_inversions(ensemble(&a.ensemble.periods, exact)?, a.invert.as_deref())?;

    if let Some(at) = &a.at {
        let f = if exact {
            fingerprint_at_exact(&e, &parse_rational(at)?)?
        } else {
            fingerprint_at(&e, parse_f64(at)?)
        };
        let mut payload = json!({ "labels": f.labels(), "phases": nums(f.phases()) });
        if let Some(x) = f.exact_phases() {
            payload["exact_phases"] = json!(x.iter().map(rational_string).collect::<Vec<_>>());
        }
        let rows = f
            .labels()
            .iter()
            .zip(f.phases())
            .map(|(l, p)| vec![l.clone(), fmt(*p)])
            .collect();
        return Ok(Report::new("decode", payload).with_table(&["label", "phase"], rows));
    }

    let phases = a.phases.as_deref().unwrap_or_default();
    let window = a
        .window
        .as_deref()
        .and_then(|w| match w {
            [lo, hi] => Some((*lo, *hi)),
            _ => None,
        })
        .ok_or_else(|| Error::Usage("decoding needs --window lo,hi".into()))?;
    let mut payload = json!({});
    let instants = if exact {
        let exact_phases = phases
            .iter()
            .map(|s| {
                if s.contains('/') {
                    parse_rational(s)
                } else {
                    let x = parse_f64(s)?;
                    snap_unit_rational(x, a.tol).ok_or_else(|| {
                        Error::Usage(format!("phase {x} has no simple rational within {}", a.tol))
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let f = Fingerprint::exact(labels(&e), exact_phases)?;
        let hits = decode_time_exact(&e, &f, window)?;
        payload["exact_instants"] = json!(hits.iter().map(rational_string).collect::<Vec<_>>());
        hits.iter().map(rational_to_f64).collect::<Vec<_>>()
    } else {
        let values = phases
            .iter()
            .map(|s| parse_f64(s))
            .collect::<Result<Vec<_>>>()?;
        let f = Fingerprint::new(labels(&e), values)?;
        decode_time(&e, &f, window, a.tol)?
    };
    payload["instants"] = nums(&instants);
    payload["window"] = nums(&[window.0, window.1]);
    let rows = instants.iter().map(|t| vec![fmt(*t)]).collect();
    Ok(Report::new("decode", payload).with_table(&["instant_s"], rows))
}

fn recurrence(a: &RecurrenceArgs) -> Result<Report> {
    let e = ensemble(&a.ensemble.periods, a.ensemble.exact)?;
    let t = match a.horizon {
        Some(h) => recurrence_time_with_horizon(&e, a.epsilon, h)?,
        None => recurrence_time(&e, a.epsilon)?,
    };
    let mut payload = json!({ "epsilon": num(a.epsilon), "recurrence_time_s": num(t) });
    if let Some(w) = a.gap_window {
        payload["gap_window_s"] = num(w);
        payload["distinguishability_gap_s"] = num(distinguishability_gap(&e, a.epsilon, w)?);
    }
    Ok(Report::new("recurrence", payload))
}

fn read_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read `{}`: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

fn simulate(a: &SimulateArgs, ctx: &Context) -> Result<Report> {
    let (clocks, events) = read_scenario(&a.scenario)?.build(&ctx.table, &ctx.k)?;

    if a.causal_order {
        let schedules = causal_order(&events, &clocks, &ctx.k);
        let mut rows = Vec::new();
        for s in &schedules {
            for (rank, arr) in s.arrivals.iter().enumerate() {
                rows.push(vec![
                    s.observer.clone(),
                    rank.to_string(),
                    arr.event.to_string(),
                    fmt(arr.time),
                ]);
            }
        }
        let payload = json!({
            "observers": schedules.iter().map(|s| json!({
                "observer": s.observer,
                "arrivals": s.arrivals.iter().map(|x| json!({"event": x.event, "time_s": num(x.time)})).collect::<Vec<_>>(),
                "ties": s.ties,
            })).collect::<Vec<_>>()
        });
        return Ok(Report::new("simulate", payload)
            .with_table(&["observer", "rank", "event", "arrival_s"], rows));
    }

    let (until, step) = match (a.until, a.sample) {
        (Some(u), Some(s)) => (u, s),
        _ => return Err(Error::Usage("simulate needs --until and --sample".into())),
    };
    if !(step > 0.0 && step.is_finite() && until >= 0.0 && until.is_finite()) {
        return Err(Error::Usage("--until must be >= 0 and --sample > 0".into()));
    }
    let count = (until / step * (1.0 + 1e-12)).floor() + 1.0;
    if count > MAX_HISTORY_SAMPLES {
        return Err(Error::Usage(format!(
            "{count} samples requested; the limit is {MAX_HISTORY_SAMPLES}"
        )));
    }
    let count = count as usize;
    let timelines = apply_events(&clocks, &events, &ctx.k)?;
    let order: Vec<&str> = clocks.iter().map(|c| c.label()).collect();
    let histories: Vec<Vec<f64>> = order
        .iter()
        .map(|l| timelines[*l].sample(0.0, step, count).phases)
        .collect();
    let times: Vec<f64> = (0..count).map(|j| j as f64 * step).collect();

    let mut header = vec!["t"];
    header.extend(order.iter().copied());
    let rows = (0..count)
        .map(|j| {
            let mut r = vec![fmt(times[j])];
            r.extend(histories.iter().map(|h| fmt(h[j])));
            r
        })
        .collect();
    let payload = json!({
        "timelines": timelines.values().map(|tl| (tl.label.clone(), json!({
            "helicity": tl.helicity.sign(),
            "segments": tl.segments.iter().map(|s| json!({
                "start_time_s": num(s.start_time),
                "period_s": num(s.period),
                "phase_at_start": num(s.phase_at_start),
                "energy_ev": num(s.energy),
            })).collect::<Vec<_>>(),
        }))).collect::<BTreeMap<_, _>>(),
        "history": {
            "t": nums(&times),
            "phases": order.iter().zip(&histories).map(|(l, h)| (l.to_string(), nums(h))).collect::<BTreeMap<_, _>>(),
        },
    });
    let mut report = Report::new("simulate", payload).with_table(&header, rows);
    report.default_format = Format::Csv;
    Ok(report)
}

fn detect(a: &DetectArgs) -> Result<Report> {
    let file = std::fs::File::open(&a.history)
        .map_err(|e| Error::Usage(format!("cannot open `{}`: {e}", a.history.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    if header.first().map(String::as_str) != Some("t") || header.len() < 2 {
        return Err(Error::Parse {
            line: 1,
            message: "expected a header `t,<clock>,...`".into(),
        });
    }
    let mut columns = vec![Vec::new(); header.len()];
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        for (i, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid number `{field}`"),
            })?;
            columns[i].push(v);
        }
    }
    let t = &columns[0];
    if t.len() < 2 {
        return Err(Error::Usage("history needs at least two samples".into()));
    }
    let step = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if !(step.is_finite() && step > 0.0)
        || t.iter()
            .enumerate()
            .any(|(j, &x)| (x - (t[0] + j as f64 * step)).abs() > 1e-6 * step)
    {
        return Err(Error::Usage(
            "history must be sampled on a uniform, increasing time grid".into(),
        ));
    }
    if let Some(c) = &a.clock {
        if !header.contains(c) {
            return Err(Error::Usage(format!("no column `{c}` in history")));
        }
    }

    let mut clocks = Vec::new();
    let mut rows = Vec::new();
    for (label, phases) in header.iter().zip(&columns).skip(1) {
        if a.clock.as_ref().is_some_and(|c| c != label) {
            continue;
        }
        let history = PhaseHistory {
            start_time: t[0],
            phases: phases.clone(),
        };
        let changes = detect_regime_changes(&history, step)?;
        for c in &changes {
            rows.push(vec![
                label.clone(),
                fmt(c.time),
                fmt(c.old_period),
                fmt(c.new_period),
            ]);
        }
        clocks.push(json!({
            "clock": label,
            "changes": changes.iter().map(|c| json!({
                "time_s": num(c.time),
                "old_period_s": num(c.old_period),
                "new_period_s": num(c.new_period),
            })).collect::<Vec<_>>(),
        }));
    }
    let payload = json!({ "sample_step_s": num(step), "clocks": clocks });
    Ok(Report::new("detect", payload)
        .with_table(&["clock", "time_s", "old_period_s", "new_period_s"], rows))
}

fn spectrum(a: &SpectrumArgs, ctx: &Context) -> Result<Report> {
    let p = find_particle(&ctx.table, &a.particle)?;
    let boost = a.motion.boost()?;
    let lines = harmonic_spectrum(p, &boost, &ctx.k, a.n)?;
    let mut payload = json!({
        "particle": p.name,
        "lines": lines.iter().map(|l| json!({"n": l.n, "energy_ev": num(l.energy)})).collect::<Vec<_>>(),
    });
    let mut rows: Vec<Vec<String>> = lines
        .iter()
        .map(|l| vec![l.n.to_string(), fmt(l.energy)])
        .collect();
    let mut header = vec!["n", "energy_ev"];
    if a.density {
        let c = clock_from_particle(p, &boost, &ctx.k, 0.0, Helicity::Positive)?;
        let h = phase_density_sample(&c, a.step, a.samples, ctx.seed, a.bins)?;
        payload["density"] = json!({
            "step_s": num(a.step),
            "samples": h.samples(),
            "bins": h.bins(),
            "seed": ctx.seed,
            "counts": h.counts,
            "masses": nums(&h.masses),
            "total_mass": num(h.total_mass()),
            "chi_square": num(h.chi_square()),
        });
        header = vec!["bin", "count", "mass"];
        rows = h
            .counts
            .iter()
            .zip(&h.masses)
            .enumerate()
            .map(|(i, (c, m))| vec![i.to_string(), c.to_string(), fmt(*m)])
            .collect();
    }
    Ok(Report::new("spectrum", payload).with_table(&header, rows))
}

fn verify_propagator(a: &PropagatorArgs) -> Result<Report> {
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err(Error::Usage(format!("--tol must be > 0, got {}", a.tol)));
    }
    let cfg = CompactPropagatorConfig::new(a.circumference, a.mass, a.beta, a.truncation)?;
    let check = propagator_identity(&cfg, a.grid)?;
    let passed = check.max_abs_rel_diff <= a.tol;
    let payload = json!({
        "L": num(a.circumference),
        "m": num(a.mass),
        "beta": num(a.beta),
        "tol": num(a.tol),
        "truncation_tolerance": num(a.truncation),
        "max_abs_rel_diff": num(check.max_abs_rel_diff),
        "grid": [check.grid, check.grid],
        "terms_used": { "winding": check.winding_terms_max, "mode": check.mode_terms_max },
        "passed": passed,
    });
    let mut report = Report::new("verify-propagator", payload);
    report.failed = !passed;
    Ok(report)
}

fn classify_cmd(a: &ClassifyArgs, ctx: &Context) -> Result<Report> {
    if let Some(path) = &a.scenario {
        let (clocks, events) = read_scenario(path)?.build(&ctx.table, &ctx.k)?;
        let payload = match regime_classify(&clocks, &events) {
            Regime::Cyclic { system_period } => json!({
                "regime": "cyclic",
                "system_period_s": system_period.map(num),
            }),
            Regime::Ergodic => json!({ "regime": "ergodic" }),
            Regime::Chaotic => json!({ "regime": "chaotic" }),
        };
        return Ok(Report::new("classify", payload));
    }
    let periods = a.periods.as_deref().unwrap_or_default();
    let e = ensemble(periods, a.exact)?;
    let c = classify(&e, a.tol)?;
    let payload = json!({
        "kind": match c.kind { EnsembleKind::Periodic => "periodic", EnsembleKind::Ergodic => "ergodic" },
        "system_period_s": c.system_period.map(num),
        "exact_system_period": c.exact_system_period.as_ref().map(rational_string),
        "duplicate_periods": c.duplicate_periods,
    });
    Ok(Report::new("classify", payload))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("3").unwrap(), r(3, 1));
        assert_eq!(parse_rational("1/3").unwrap(), r(1, 3));
        assert_eq!(parse_rational("0.1").unwrap(), r(1, 10));
        assert_eq!(parse_rational("-2.5e-3").unwrap(), r(-1, 400));
        assert_eq!(parse_rational("1.5E2").unwrap(), r(150, 1));
        assert_eq!(parse_rational(".5").unwrap(), r(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }
}
