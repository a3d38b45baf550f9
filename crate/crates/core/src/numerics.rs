//! Small numerical kernels shared by the physics modules: phase reduction on the
//! unit circle, compensated and pairwise summation, and exact rational helpers
//! (continued fractions, simplest rationals, CRT).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Maps any finite real into `[0, 1)`.
pub fn wrap_unit(x: f64) -> f64 {
    let w = x - x.floor();
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Distance on the unit circle, `min(|Δ|, 1 - |Δ|)` after wrapping.
pub fn torus_distance(a: f64, b: f64) -> f64 {
    let d = wrap_unit(a - b);
    d.min(1.0 - d)
}

/// Distance of `x` (in cycles) from the nearest integer.
pub fn distance_to_integer(x: f64) -> f64 {
    torus_distance(x, 0.0)
}

/// Fractional part of `t / period`, with the integer part removed exactly.
///
/// `f64` remainder is exact, so only the final division rounds. This keeps the
/// phase accurate after ~1e20 cycles where `(t / period).fract()` has no
/// fractional bits left at all.
pub fn cycles_fraction(t: f64, period: f64) -> f64 {
    let r = t.rem_euclid(period);
    wrap_unit(r / period)
}

/// Neumaier compensated sum.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut c = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Pairwise (cascade) summation with a fixed split rule, so the result only
/// depends on the slice contents and order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        let mut s = 0.0;
        for v in values {
            s += v;
        }
        return s;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Continued-fraction convergents `p/q` of a positive finite `x`, computed on
/// the exact binary value of `x`, stopping before the first denominator that
/// exceeds `max_denominator`.
pub fn convergents(x: f64, max_denominator: u64) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::new();
    let Some(mut r) = rational_from_f64(x) else {
        return out;
    };
    let limit = BigInt::from(max_denominator);
    let (mut p_prev, mut p) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q) = (BigInt::one(), BigInt::zero());
    loop {
        let a = r.floor().to_integer();
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        if q_next > limit {
            break;
        }
        out.push((p_next.clone(), q_next.clone()));
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        let rem = &r - BigRational::from_integer(a);
        if rem.is_zero() {
            break;
        }
        r = rem.recip();
    }
    out
}

/// The rational with the smallest denominator in the closed interval
/// `[lo, hi]`, `0 <= lo <= hi`.
pub fn simplest_rational_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    debug_assert!(!lo.is_negative() && lo <= hi);
    let a = lo.floor();
    if &a == lo {
        return a;
    }
    let next = &a + BigRational::one();
    if &next <= hi {
        return next;
    }
    let inner = simplest_rational_between(&(hi - &a).recip(), &(lo - &a).recip());
    a + inner.recip()
}

/// Snap a real in `[0, 1)` to the simplest rational within `tolerance`,
/// wrapping the result back into `[0, 1)`.
pub fn snap_unit_rational(x: f64, tolerance: f64) -> Option<BigRational> {
    let x = rational_from_f64(wrap_unit(x))?;
    let tol = rational_from_f64(tolerance.abs())?;
    let lo = &x - &tol;
    let hi = &x + &tol;
    let r = if lo.is_negative() {
        BigRational::zero()
    } else {
        simplest_rational_between(&lo, &hi)
    };
    Some(wrap_unit_rational(&r))
}

/// Fractional part of a rational, in `[0, 1)`.
pub fn wrap_unit_rational(r: &BigRational) -> BigRational {
    r - r.floor()
}

/// Least common multiple of positive rationals: `lcm(numerators) / gcd(denominators)`
/// over their reduced forms.
pub fn rational_lcm<'a, I: IntoIterator<Item = &'a BigRational>>(values: I) -> Option<BigRational> {
    let mut num: Option<BigInt> = None;
    let mut den: Option<BigInt> = None;
    for v in values {
        let (n, d) = (v.numer().abs(), v.denom().abs());
        num = Some(match num {
            None => n,
            Some(acc) => acc.lcm(&n),
        });
        den = Some(match den {
            None => d,
            Some(acc) => acc.gcd(&d),
        });
    }
    Some(BigRational::new(num?, den?))
}

/// Generalised Chinese remainder merge of `x ≡ a (mod m)` and `x ≡ b (mod n)`
/// for moduli that need not be coprime. Returns `(residue, lcm)` or `None`
/// when the congruences are incompatible.
pub fn crt_merge(a: &BigInt, m: &BigInt, b: &BigInt, n: &BigInt) -> Option<(BigInt, BigInt)> {
    let egcd = m.extended_gcd(n);
    let g = egcd.gcd;
    let diff = b - a;
    if !diff.is_multiple_of(&g) {
        return None;
    }
    let lcm = m / &g * n;
    let n_g = n / &g;
    // m * x ≡ diff (mod n), x = (diff / g) * inv(m / g) (mod n / g)
    let k = ((&diff / &g) * &egcd.x).mod_floor(&n_g);
    let x = (a + m * k).mod_floor(&lcm);
    Some((x, lcm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn wrap_handles_negative_and_boundary() {
        assert_eq!(wrap_unit(-1.5), 0.5);
        assert_eq!(wrap_unit(3.0), 0.0);
        assert_eq!(wrap_unit(-1e-20), 0.0);
        assert!(wrap_unit(-1e-20) < 1.0);
    }

    #[test]
    fn torus_distance_wraps() {
        assert!((torus_distance(0.95, 0.05) - 0.1).abs() < 1e-15);
        assert_eq!(torus_distance(0.25, 0.25), 0.0);
        assert_eq!(torus_distance(0.0, 0.5), 0.5);
    }

    #[test]
    fn cycles_fraction_survives_huge_counts() {
        // 2^70 = 1 (mod 3); the naive quotient has no fractional bits left.
        let t = 2f64.powi(70);
        assert_eq!((t / 3.0).fract(), 0.0);
        assert!((cycles_fraction(t, 3.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((cycles_fraction(-0.75, 3.0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(neumaier_sum(v), 2.0);
    }

    #[test]
    fn pairwise_is_order_stable() {
        let v: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        assert_eq!(pairwise_sum(&v), pairwise_sum(&v.clone()));
        assert!((pairwise_sum(&v) - neumaier_sum(v.iter().copied())).abs() < 1e-13);
    }

    #[test]
    fn convergents_of_sqrt2() {
        let cs = convergents(std::f64::consts::SQRT_2, 500);
        let pairs: Vec<(i64, i64)> = cs
            .iter()
            .map(|(p, q)| (p.to_i64().unwrap(), q.to_i64().unwrap()))
            .collect();
        assert_eq!(
            pairs,
            vec![
                (1, 1),
                (3, 2),
                (7, 5),
                (17, 12),
                (41, 29),
                (99, 70),
                (239, 169),
                (577, 408)
            ]
        );
    }

    #[test]
    fn convergents_terminate_on_exact_rationals() {
        let cs = convergents(0.75, 1_000_000);
        let last = cs.last().unwrap();
        assert_eq!((last.0.to_i64().unwrap(), last.1.to_i64().unwrap()), (3, 4));
    }

    #[test]
    fn simplest_rational_snaps_decimals() {
        assert_eq!(snap_unit_rational(0.333, 1e-3).unwrap(), rat(1, 3));
        assert_eq!(snap_unit_rational(0.75, 1e-9).unwrap(), rat(3, 4));
        assert_eq!(snap_unit_rational(0.4, 1e-9).unwrap(), rat(2, 5));
        assert_eq!(snap_unit_rational(0.9999999, 1e-3).unwrap(), rat(0, 1));
        assert_eq!(
            simplest_rational_between(&rat(3, 10), &rat(2, 5)),
            rat(1, 3)
        );
    }

    #[test]
    fn rational_lcm_examples() {
        let v = [rat(3, 1), rat(4, 1), rat(5, 1)];
        assert_eq!(rational_lcm(v.iter()).unwrap(), rat(60, 1));
        let v = [rat(1, 3), rat(1, 6)];
        assert_eq!(rational_lcm(v.iter()).unwrap(), rat(1, 3));
    }

    #[test]
    fn crt_merge_coprime_and_not() {
        let b = |x: i64| BigInt::from(x);
        let (x, m) = crt_merge(&b(1), &b(3), &b(3), &b(4)).unwrap();
        let (x, m) = crt_merge(&x, &m, &b(2), &b(5)).unwrap();
        assert_eq!((x, m), (b(7), b(60)));
        assert_eq!(crt_merge(&b(1), &b(4), &b(2), &b(6)), None);
        assert_eq!(crt_merge(&b(1), &b(4), &b(3), &b(6)), Some((b(9), b(12))));
    }
}
