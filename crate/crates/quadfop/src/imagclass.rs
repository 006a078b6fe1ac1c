//! Class numbers of imaginary quadratic fields by counting reduced
//! primitive binary quadratic forms, the 3-divisibility pipeline for the
//! mirror fields `ℚ(√−3M)`, and defining polynomials of the degree `p−1`
//! mirror fields.

use crate::arith;
use crate::fop::{run_fop_multi, DedupKey, PolyFamily, TraceRule};
use crate::poly::Poly;
use crate::prationality::nonrational_families;
use crate::quadfield;
use crate::{Error, Result, Sign};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

/// Whether `d < 0` is a fundamental discriminant.
pub fn is_fundamental_discriminant(d: i128) -> bool {
    if d >= 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => arith::squarefree_core(d).map_or(false, |c| c.r == 1),
        0 => {
            let q = d / 4;
            let qm = q.rem_euclid(4);
            (qm == 2 || qm == 3) && arith::squarefree_core(q).map_or(false, |c| c.r == 1)
        }
        _ => false,
    }
}

/// Shared smallest-prime-factor table for form counting.
pub struct FormCounter {
    spf: Vec<u32>,
}

impl FormCounter {
    /// Table large enough for every `a <= sqrt(|d|/3)` with `|d| <= max_abs_d`.
    pub fn new(max_abs_d: i128) -> FormCounter {
        let max_a = ((max_abs_d.unsigned_abs() / 3).max(4) as u64).sqrt_floor() + 2;
        let n = max_a as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        FormCounter { spf }
    }

    fn factor_small(&self, mut a: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        while a > 1 {
            let p = self.spf[a as usize] as u64;
            let mut e = 0;
            while a % p == 0 {
                a /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    /// Number of reduced primitive forms `(a, b, c)` of fundamental
    /// discriminant `d < 0`: `b² − 4ac = d`, `−a < b <= a <= c`, `b >= 0`
    /// when `a = c`, `gcd(a, b, c) = 1`.
    pub fn class_number(&self, d: i128) -> Result<u64> {
        if d >= 0 {
            return Err(Error::Invalid(format!("discriminant {d} is not negative")));
        }
        if !is_fundamental_discriminant(d) {
            return Err(Error::Invalid(format!("discriminant {d} is not fundamental")));
        }
        let abs_d = d.unsigned_abs();
        let a_max = ((abs_d / 3) as u64).sqrt_floor();
        if (a_max as usize) >= self.spf.len() {
            return Err(Error::Invalid(format!(
                "form counter table too small for |d| = {abs_d}"
            )));
        }
        let mut h = 0u64;
        for a in 1..=a_max {
            let m4a = 4 * a as u128;
            let d_red = (d.rem_euclid(m4a as i128)) as u64;
            for x in self.sqrt_mod_4a(d_red, a) {
                let b: i128 = if x <= a {
                    x as i128
                } else if x > 3 * a {
                    x as i128 - 4 * a as i128
                } else {
                    continue;
                };
                let c = (b * b - d) / (4 * a as i128);
                if c < a as i128 {
                    continue;
                }
                if c == a as i128 && b < 0 {
                    continue;
                }
                let g = gcd3(a, b.unsigned_abs() as u64, c as u64);
                if g == 1 {
                    h += 1;
                }
            }
        }
        Ok(h)
    }

    /// All square roots of `d` modulo `4a`, via prime-power roots and CRT.
    fn sqrt_mod_4a(&self, d: u64, a: u64) -> Vec<u64> {
        let mut components: Vec<(u64, u64)> = Vec::new(); // (modulus, prime)
        let mut e2 = 2u32;
        let mut odd = a;
        while odd % 2 == 0 {
            odd /= 2;
            e2 += 1;
        }
        components.push((2u64.pow(e2), 2));
        for (p, e) in self.factor_small(odd) {
            components.push((p.pow(e), p));
        }
        let mut acc: Vec<(u64, u64)> = vec![(0, 1)]; // (residue, modulus)
        for (pk, p) in components {
            let k = pk.ilog(p);
            let roots = arith::sqrt_mod_pk(d % pk, p, k);
            if roots.is_empty() {
                return Vec::new();
            }
            let mut next = Vec::with_capacity(acc.len() * roots.len());
            for &(r0, m0) in &acc {
                for &r1 in &roots {
                    next.push((crt_pair(r0, m0, r1, pk), m0 * pk));
                }
            }
            acc = next;
        }
        let mut out: Vec<u64> = acc.into_iter().map(|(r, _)| r).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn gcd3(a: u64, b: u64, c: u64) -> u64 {
    a.gcd(&b).gcd(&c)
}

fn crt_pair(r0: u64, m0: u64, r1: u64, m1: u64) -> u64 {
    // m0, m1 coprime; lift r0 mod m0 to match r1 mod m1
    if m0 == 1 {
        return r1;
    }
    let inv = arith::mod_inv(m0 % m1, m1).expect("coprime moduli");
    let diff = (r1 + m1 - r0 % m1) % m1;
    r0 + m0 * ((diff as u128 * inv as u128 % m1 as u128) as u64)
}

/// One-off reduced-form count; builds a table per call.
pub fn class_number_imag(d: i128) -> Result<u64> {
    FormCounter::new(d.unsigned_abs() as i128).class_number(d)
}

/// One record of the 3-divisibility pipeline.
#[derive(Clone, Debug)]
pub struct ImagClassReport {
    /// Positive square-free radical of the real field.
    pub radical: i128,
    pub t: u64,
    pub r: u64,
    /// Discriminant of `ℚ(√−3M)`.
    pub d_neg: i128,
    /// Class number of `ℚ(√−3M)`, when computed.
    pub h: Option<u64>,
    /// 3-valuation of `h`.
    pub v3: Option<u32>,
    /// Exponent of the swept unit over the fundamental unit.
    pub unit_exponent: u64,
    /// The swept unit is a cube.
    pub exception: bool,
}

/// Sweep `m(t) = (t₀ + 9t)² + 4` for `t₀` in `t0_set` (or the four
/// residue-filtered progressions when `filtered`), and report for each
/// first-occurrence radical the unit exponent, the cube-exception flag, and
/// — for radicals up to `class_limit` — the class number of `ℚ(√−3M)` with
/// its 3-valuation.
pub fn cubic_pipeline(
    bound: u64,
    t0_set: &[u64],
    filtered: bool,
    class_limit: Option<i128>,
) -> Result<Vec<ImagClassReport>> {
    let families: Vec<PolyFamily> = if filtered {
        nonrational_families(3, 7)?
            .into_iter()
            .map(|(_, _, f)| f)
            .collect()
    } else {
        for &t0 in t0_set {
            if ![0, 4, 5].contains(&t0) {
                return Err(Error::Invalid(format!(
                    "t0 = {t0} is not a valid offset (need 0, 4 or 5)"
                )));
            }
        }
        if t0_set.is_empty() {
            return Err(Error::Invalid("empty t0 set".into()));
        }
        t0_set
            .iter()
            .map(|&t0| PolyFamily::Quadratic {
                s: Sign::Neg,
                nu: 1,
                trace: TraceRule::Linear {
                    scale: 9,
                    offset: t0 as i64,
                },
            })
            .collect()
    };
    let run = run_fop_multi(&families, bound, DedupKey::Radical)?;

    let limited_max = run
        .records
        .iter()
        .filter(|r| !r.is_degenerate())
        .filter(|r| class_limit.map_or(true, |lim| r.radical <= lim))
        .map(|r| {
            let core = arith::squarefree_core(-3 * r.radical)?;
            Ok(discriminant_i128(core.core).unsigned_abs())
        })
        .collect::<Result<Vec<u128>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let counter = FormCounter::new(limited_max as i128);

    run.records
        .par_iter()
        .filter(|rec| !rec.is_degenerate())
        .map(|rec| {
            let fam = &families[rec.family as usize];
            let m = BigInt::from(rec.radical);
            let unit = fam.element(rec.t, &m, rec.r, None)?;
            let eps = quadfield::fundamental_unit(&m)?;
            let n = quadfield::unit_power_decompose(&unit, &eps)?;
            let core = arith::squarefree_core(-3 * rec.radical)?;
            let d_neg = discriminant_i128(core.core);
            let (h, v3) = if class_limit.map_or(true, |lim| rec.radical <= lim) {
                let h = counter.class_number(d_neg)?;
                let mut v3 = 0u32;
                let mut hh = h;
                while hh % 3 == 0 {
                    v3 += 1;
                    hh /= 3;
                }
                (Some(h), Some(v3))
            } else {
                (None, None)
            };
            Ok(ImagClassReport {
                radical: rec.radical,
                t: rec.t,
                r: rec.r,
                d_neg,
                h,
                v3,
                unit_exponent: n,
                exception: n % 3 == 0,
            })
        })
        .collect()
}

fn discriminant_i128(m: i128) -> i128 {
    if m.rem_euclid(4) == 1 {
        m
    } else {
        4 * m
    }
}

/// Coefficients `τ_j` of `Ψ(z + 2)`, where `Ψ` is the minimal polynomial of
/// `2cos(2π/p)`; the mirror defining polynomial is
/// `Σ_j τ_j M^{d−j} x^{2j}` with `d = (p−1)/2`.
pub fn mirror_polynomial_coeffs(p: u64) -> Result<Vec<BigInt>> {
    if p < 3 || !arith::is_prime(p) {
        return Err(Error::Invalid(format!("p = {p} is not an odd prime")));
    }
    let d = ((p - 1) / 2) as usize;
    // Ψ(y) = 1 + Σ_{i=1}^{d} V_i(y) with V_0 = 2, V_1 = y,
    // V_{k+1} = y·V_k − V_{k−1}
    let y = Poly::from_coeffs(vec![BigInt::zero(), BigInt::from(1)]);
    let mut v_prev = Poly::constant(BigInt::from(2));
    let mut v_cur = y.clone();
    let mut psi = Poly::constant(BigInt::from(1)).add(&v_cur);
    for _ in 2..=d {
        let v_next = y.mul(&v_cur).sub(&v_prev);
        psi = psi.add(&v_next);
        v_prev = std::mem::replace(&mut v_cur, v_next);
    }
    debug_assert_eq!(psi.degree(), Some(d));
    // shift z -> z + 2 by Horner
    let shift = Poly::from_coeffs(vec![BigInt::from(2), BigInt::from(1)]);
    let mut tau = Poly::zero();
    for c in psi.0.iter().rev() {
        tau = tau.mul(&shift).add(&Poly::constant(c.clone()));
    }
    let mut coeffs = tau.0;
    coeffs.resize(d + 1, BigInt::zero());
    Ok(coeffs)
}

/// Defining polynomial of `ℚ((ζ_p − ζ_p^{−1})√M)` over the integers, as
/// coefficients of `x^0..x^{p−1}`.
pub fn mirror_defining_polynomial(p: u64, m: &BigInt) -> Result<Vec<BigInt>> {
    let tau = mirror_polynomial_coeffs(p)?;
    let d = tau.len() - 1;
    let mut coeffs = vec![BigInt::zero(); p as usize];
    let mut mpow = BigInt::from(1);
    for j in (0..=d).rev() {
        // coefficient of x^{2j} is τ_j · M^{d−j}
        coeffs[2 * j] = &tau[j] * &mpow;
        mpow *= m;
    }
    Ok(coeffs)
}

// helper trait to keep u64 isqrt call sites short
trait SqrtFloor {
    fn sqrt_floor(self) -> u64;
}

impl SqrtFloor for u64 {
    fn sqrt_floor(self) -> u64 {
        num_integer::Roots::sqrt(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// independent reduced-form count: loop over b, scan divisors of
    /// (b² − d)/4
    fn class_number_oracle(d: i128) -> u64 {
        assert!(d < 0);
        let mut h = 0u64;
        let mut b = d.rem_euclid(2);
        while 3 * b * b <= -d {
            let q = (b * b - d) / 4;
            let mut a = b.max(1);
            while a * a <= q {
                if q % a == 0 {
                    let c = q / a;
                    if gcd3(a as u64, b as u64, c as u64) == 1 {
                        if b == 0 || a == b || a == c {
                            h += 1;
                        } else {
                            h += 2;
                        }
                    }
                }
                a += 1;
            }
            b += 2;
        }
        h
    }

    #[test]
    fn fundamental_discriminants() {
        assert!(is_fundamental_discriminant(-3));
        assert!(is_fundamental_discriminant(-4));
        assert!(is_fundamental_discriminant(-696));
        assert!(!is_fundamental_discriminant(-9));
        assert!(!is_fundamental_discriminant(-12));
        assert!(!is_fundamental_discriminant(5));
    }

    #[test]
    fn class_number_examples() {
        assert_eq!(class_number_imag(-3).unwrap(), 1);
        assert_eq!(class_number_imag(-4).unwrap(), 1);
        assert_eq!(class_number_imag(-23).unwrap(), 3);
        assert_eq!(class_number_imag(-696).unwrap(), 12);
        assert!(class_number_imag(-12).is_err());
        assert!(class_number_imag(5).is_err());
    }

    #[test]
    fn class_number_matches_oracle() {
        let counter = FormCounter::new(-4000);
        for d in (-4000..-2i128).filter(|d| is_fundamental_discriminant(*d)) {
            assert_eq!(
                counter.class_number(d).unwrap(),
                class_number_oracle(d),
                "d = {d}"
            );
        }
    }

    #[test]
    fn mirror_polynomial_examples() {
        // p = 5: x⁴ + 5Mx² + 5M²
        assert_eq!(
            mirror_polynomial_coeffs(5).unwrap(),
            vec![BigInt::from(5), BigInt::from(5), BigInt::from(1)]
        );
        // p = 3: x² + 3M
        assert_eq!(
            mirror_polynomial_coeffs(3).unwrap(),
            vec![BigInt::from(3), BigInt::from(1)]
        );
        let m = BigInt::from(29);
        let p5 = mirror_defining_polynomial(5, &m).unwrap();
        assert_eq!(
            p5,
            vec![
                BigInt::from(5 * 29 * 29),
                BigInt::zero(),
                BigInt::from(5 * 29),
                BigInt::zero(),
                BigInt::from(1)
            ]
        );
    }

    #[test]
    fn mirror_polynomial_exact_root() {
        // P((ζ − ζ^{−1})√M) = 0, verified in Z[x]/(x^p − 1): a multiple of
        // Φ_p reduces to a constant coefficient vector
        for p in [3u64, 5, 7, 11, 13] {
            let m = BigInt::from(58);
            let coeffs = mirror_defining_polynomial(p, &m).unwrap();
            let pu = p as usize;
            // A = M(x² + x^{p−2} − 2) mod x^p − 1
            let mut a = vec![BigInt::zero(); pu];
            a[2 % pu] += &m;
            a[(pu - 2) % pu] += &m;
            a[0] -= BigInt::from(2) * &m;
            // evaluate P as polynomial in x² ... x^{2j} -> power 2j mod p
            let mut total = vec![BigInt::zero(); pu];
            // Horner in A over Z[x]/(x^p − 1), using only even coefficients
            let mut acc = vec![BigInt::zero(); pu];
            for j in (0..=(pu - 1) / 2).rev() {
                acc = cyclic_mul(&acc, &a, pu);
                acc[0] += &coeffs[2 * j];
            }
            total
                .iter_mut()
                .zip(acc.iter())
                .for_each(|(t, v)| *t = v.clone());
            let first = total[0].clone();
            assert!(
                total.iter().all(|c| *c == first),
                "p = {p}: nonzero remainder {total:?}"
            );
        }
    }

    fn cyclic_mul(a: &[BigInt], b: &[BigInt], p: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); p];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[(i + j) % p] += x * y;
            }
        }
        out
    }

    #[test]
    fn cubic_pipeline_smoke() {
        let reports = cubic_pipeline(30, &[0, 4, 5], false, Some(1000)).unwrap();
        let m2 = reports.iter().find(|r| r.radical == 2).unwrap();
        assert_eq!(m2.t, 1);
        assert_eq!(m2.unit_exponent, 3);
        assert!(m2.exception);
        assert_eq!(m2.d_neg, -24);
        assert_eq!(m2.h, Some(2));
        assert_eq!(m2.v3, Some(0));
        let m13 = reports.iter().find(|r| r.radical == 13).unwrap();
        assert_eq!(m13.unit_exponent, 3);
        assert_eq!(m13.v3, Some(0));
    }
}
