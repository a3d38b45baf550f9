use cyclochron_core::constants::{default_particle_table, find_particle, Constants};
use cyclochron_core::cycles::{
    clock_from_particle, invert_helicity, tick_count, CycleClock, Helicity,
};
use cyclochron_core::kinematics::Boost;
use cyclochron_core::numerics::torus_distance;
use proptest::prelude::*;

const CS_HZ: u64 = 9_192_631_770;

#[test]
fn caesium_second_has_exact_tick_count() {
    for period in [1.0 / CS_HZ as f64, 1.087827757e-10] {
        let c = CycleClock::new("cs", period, 0.0, Helicity::Positive).unwrap();
        assert_eq!(
            tick_count(&c, 0.0, 1.0).unwrap(),
            CS_HZ as u128,
            "period {period:e}"
        );
    }
}

#[test]
fn electron_second_tick_count() {
    let k = Constants::default();
    let e = find_particle(&default_particle_table(), "electron")
        .unwrap()
        .clone();
    let c = clock_from_particle(&e, &Boost::identity(), &k, 0.0, Helicity::Positive).unwrap();
    assert_eq!(
        tick_count(&c, 0.0, 1.0).unwrap(),
        123_558_996_381_668_893_172
    );
}

#[test]
fn caesium_to_electron_ratio() {
    let k = Constants::default();
    let e = find_particle(&default_particle_table(), "electron")
        .unwrap()
        .clone();
    let c = clock_from_particle(&e, &Boost::identity(), &k, 0.0, Helicity::Positive).unwrap();
    let ratio = (1.0 / CS_HZ as f64) / c.period();
    assert!((1.33e10..=1.36e10).contains(&ratio), "{ratio:e}");
}

#[test]
fn moving_clock_runs_slow() {
    let k = Constants::default();
    let e = find_particle(&default_particle_table(), "muon")
        .unwrap()
        .clone();
    let rest = clock_from_particle(&e, &Boost::identity(), &k, 0.0, Helicity::Positive).unwrap();
    let b = Boost::from_gamma([0.0, 0.0, 1.0], 3.0).unwrap();
    let moving = clock_from_particle(&e, &b, &k, 0.0, Helicity::Positive).unwrap();
    assert!(((moving.period() * 3.0 - rest.period()) / rest.period()).abs() < 1e-12);
}

fn clock() -> impl Strategy<Value = CycleClock> {
    (1e-3f64..1e3, 0.0f64..1.0, any::<bool>()).prop_map(|(p, phi, pos)| {
        let h = if pos {
            Helicity::Positive
        } else {
            Helicity::Negative
        };
        CycleClock::new("c", p, phi, h).unwrap()
    })
}

proptest! {
    #[test]
    fn phase_repeats_after_one_period(c in clock(), n in 0u32..1000, frac in 0.0f64..1.0) {
        let t = (n as f64 + frac) * c.period();
        let d = torus_distance(c.phase_at(t), c.phase_at(t + c.period()));
        prop_assert!(d <= 1e-9, "distance {d}");
    }

    #[test]
    fn ticks_are_additive(c in clock(), a in 0.0f64..1e4, b in 0.0f64..1e4, m in 0.0f64..1e4) {
        let mut v = [a, b, m];
        v.sort_by(f64::total_cmp);
        let whole = tick_count(&c, v[0], v[2]).unwrap();
        let parts = tick_count(&c, v[0], v[1]).unwrap() + tick_count(&c, v[1], v[2]).unwrap();
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn ticks_ignore_helicity(c in clock(), a in 0.0f64..1e4, len in 0.0f64..1e4) {
        prop_assert_eq!(
            tick_count(&c, a, a + len).unwrap(),
            tick_count(&invert_helicity(&c), a, a + len).unwrap()
        );
    }

    #[test]
    fn ticks_track_elapsed_periods(c in clock(), len in 0.0f64..1e4) {
        let n = tick_count(&c, 0.0, len).unwrap() as f64;
        prop_assert!((n - len / c.period()).abs() <= 1.0 + 1e-9 * n);
    }
}

#[test]
fn reversed_interval_is_an_error() {
    let c = CycleClock::new("c", 1.0, 0.0, Helicity::Positive).unwrap();
    assert!(tick_count(&c, 2.0, 1.0).is_err());
}
