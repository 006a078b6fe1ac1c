//! Units that are local p-th powers at p, the p-valuation of the normalized
//! p-adic regulator, global p-th power exceptions, and residue-filtered
//! families whose records are certified non-p-rational.

use crate::arith;
use crate::fop::{run_fop_multi, DedupKey, FopRecord, FopRun, PolyFamily, TraceRule};
use crate::quadfield::{self, QuadInt};
use crate::{Error, Result, Sign};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

/// p-adic valuation result; `Infinite` marks elements that are exactly 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PValuation {
    Finite(u32),
    Infinite,
}

impl PValuation {
    pub fn at_least(self, k: u32) -> bool {
        match self {
            PValuation::Finite(v) => v >= k,
            PValuation::Infinite => true,
        }
    }
}

/// The sixteen radical forms `a2·p⁴t² + b` of the local-power sweep, in
/// program order, as `(a2, b(s))` pairs for both signs.
const VARIANT_A_FORMS: [(u64, i64); 16] = [
    (1, -4),
    (1, -2),
    (1, -1),
    (1, 1),
    (1, 2),
    (1, 4),
    (4, -2),
    (4, 2),
    (9, -6),
    (9, 6),
    (9, -12),
    (9, 12),
    (25, -10),
    (25, 10),
    (25, -20),
    (25, 20),
];

/// The sixteen families `m(t) = a2·p⁴t² + b` whose units are local p-th
/// powers at `p` (both signs of each of the eight base forms).
pub fn variant_a_families(p: u64) -> Result<Vec<PolyFamily>> {
    check_odd_prime(p)?;
    let mut fams = Vec::with_capacity(16);
    for &(a2, b) in &VARIANT_A_FORMS {
        let fam = match (a2, b.unsigned_abs()) {
            // m = (p²t)² − s·1: unit p²t + r√M of norm s
            (1, 1) => PolyFamily::Compact {
                s: Sign::from_i64(-b.signum())?,
                nu: 1,
                trace: TraceRule::Linear {
                    scale: p * p,
                    offset: 0,
                },
            },
            // m = a²p⁴(kt)² − 2δas with b = −2δas
            _ => {
                let (a, delta, t_scale) = match (a2, b.unsigned_abs()) {
                    (1, 2) => (1u64, 1u8, 1u64),
                    (1, 4) => (1, 2, 1),
                    (4, 2) => (1, 1, 2),
                    (9, 6) => (3, 1, 1),
                    (9, 12) => (3, 2, 1),
                    (25, 10) => (5, 1, 1),
                    (25, 20) => (5, 2, 1),
                    other => unreachable!("unexpected form {other:?}"),
                };
                let s = Sign::from_i64(-b.signum())?;
                PolyFamily::LocalPower {
                    p,
                    a,
                    delta,
                    t_scale,
                    s,
                }
            }
        };
        fams.push(fam);
    }
    Ok(fams)
}

/// A trace-offset family `m(T) = T² − 4s` with `T = t₀ + p²t`.
#[derive(Clone, Debug)]
pub struct VariantBFamily {
    pub s: Sign,
    pub t0: u64,
    pub family: PolyFamily,
}

/// For each sign: `t₀ = 0` plus every root of `t₀² ≡ 2s (mod p²)`.
pub fn variant_b_families(p: u64, s: Sign) -> Result<Vec<VariantBFamily>> {
    check_odd_prime(p)?;
    let p2 = p * p;
    let two_s = (2 * s.value()).rem_euclid(p2 as i64) as u64;
    let mut t0s = vec![0u64];
    t0s.extend(arith::sqrt_mod_p2(two_s, p)?);
    Ok(t0s
        .into_iter()
        .map(|t0| VariantBFamily {
            s,
            t0,
            family: PolyFamily::Quadratic {
                s,
                nu: 1,
                trace: TraceRule::Linear {
                    scale: p2,
                    offset: t0 as i64,
                },
            },
        })
        .collect())
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::Invalid("p = 2 is out of scope".into()));
    }
    if !arith::is_prime(p) {
        return Err(Error::Invalid(format!("p = {p} is not prime")));
    }
    Ok(())
}

/// Elements `α + β√M` with coefficients mod `p^k`; halved coordinates are
/// normalized away by multiplying with `2⁻¹ mod p^k`.
struct ModRing {
    pk: BigUint,
    m_red: BigUint,
}

impl ModRing {
    fn new(p: u64, k: u32, m: &BigInt) -> ModRing {
        let pk = BigUint::from(p).pow(k);
        let m_red = m.mod_floor(&BigInt::from(pk.clone())).to_biguint().unwrap();
        ModRing { pk, m_red }
    }

    fn embed(&self, z: &QuadInt) -> (BigUint, BigUint) {
        let inv2 = (&self.pk + 1u32) / 2u32;
        let u = z.trace().mod_floor(&BigInt::from(self.pk.clone())).to_biguint().unwrap();
        let v = z.coeff().mod_floor(&BigInt::from(self.pk.clone())).to_biguint().unwrap();
        ((u * &inv2) % &self.pk, (v * &inv2) % &self.pk)
    }

    fn mul(&self, a: &(BigUint, BigUint), b: &(BigUint, BigUint)) -> (BigUint, BigUint) {
        let x = (&a.0 * &b.0 + &a.1 * &b.1 * &self.m_red) % &self.pk;
        let y = (&a.0 * &b.1 + &a.1 * &b.0) % &self.pk;
        (x, y)
    }

    fn pow(&self, base: &(BigUint, BigUint), mut e: u64) -> (BigUint, BigUint) {
        let mut acc = (BigUint::one(), BigUint::zero());
        let mut b = base.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }
}

fn vp_residue(x: &BigUint, p: u64) -> Option<u32> {
    // valuation of a residue; None when the residue is 0 (valuation unknown)
    if x.is_zero() {
        return None;
    }
    let p = BigUint::from(p);
    let mut v = 0u32;
    let mut x = x.clone();
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    Some(v)
}

/// Exact `v_p(unit^e − 1)` in the unramified case, and the pair
/// `(v_p(A−2), v_p(B))` of the halved coordinates in the ramified case,
/// computed mod `p^k` with `k` doubled until determined.
fn unit_power_minus_one_valuations(unit: &QuadInt, p: u64, e: u64) -> Result<(u32, u32)> {
    let mut k = 6u32;
    loop {
        if k > 4096 {
            return Err(Error::Invalid(format!(
                "valuation of unit^{e} − 1 not determined below p^4096 for p = {p}"
            )));
        }
        let ring = ModRing::new(p, k, unit.radical());
        let x = ring.pow(&ring.embed(unit), e);
        let a_minus = (&x.0 + &ring.pk - BigUint::one()) % &ring.pk;
        match (vp_residue(&a_minus, p), vp_residue(&x.1, p)) {
            (Some(va), Some(vb)) => return Ok((va, vb)),
            (Some(va), None) if va < k => return Ok((va, k)),
            (None, Some(vb)) if vb < k => return Ok((k, vb)),
            _ => k *= 2,
        }
    }
}

/// `v_p(#R_K)` from a unit of `ℚ(√M)`:
/// - `p` unramified with residue degree `f`: `v_p(unit^(p^f −1) − 1) − 1`;
/// - `p > 3` ramified: `(v_𝔭(unit^(p−1) − 1) − 1)/2` with
///   `v_𝔭(a + b√M) = min(2 v_p(a), 1 + 2 v_p(b))`;
/// - `p = 3` ramified: `(v_𝔭(unit⁶ − 1) − 2 − δ)/2`, `δ = 3` exactly when
///   `M ≡ −3 (mod 9)`.
pub fn regulator_valuation(unit: &QuadInt, p: u64) -> Result<PValuation> {
    check_odd_prime(p)?;
    if !unit.is_unit() {
        return Err(Error::Invalid(format!("{unit} is not a unit")));
    }
    if unit.coeff().is_zero() {
        return Ok(PValuation::Infinite);
    }
    let m = unit.radical();
    let m_mod_p = m.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    if m_mod_p == 0 {
        // ramified
        if p == 3 {
            let (va, vb) = unit_power_minus_one_valuations(unit, p, 6)?;
            let vfrak = (2 * va).min(1 + 2 * vb);
            let delta = if m.mod_floor(&BigInt::from(9)) == BigInt::from(6) {
                3
            } else {
                1
            };
            if vfrak < 2 + delta {
                return Err(Error::Invalid(format!(
                    "unexpected 𝔭-valuation {vfrak} for ramified p = 3, M = {m}"
                )));
            }
            Ok(PValuation::Finite((vfrak - 2 - delta) / 2))
        } else {
            let (va, vb) = unit_power_minus_one_valuations(unit, p, p - 1)?;
            let vfrak = (2 * va).min(1 + 2 * vb);
            Ok(PValuation::Finite((vfrak - 1) / 2))
        }
    } else {
        let f = if arith::legendre(m_mod_p, p) == 1 { 1 } else { 2 };
        let e = p.pow(f) - 1;
        let (va, vb) = unit_power_minus_one_valuations(unit, p, e)?;
        let v = va.min(vb);
        debug_assert!(v >= 1);
        Ok(PValuation::Finite(v - 1))
    }
}

/// A unit is a local p-th power at p iff its regulator valuation is >= 1.
pub fn local_pth_power_test(unit: &QuadInt, p: u64) -> Result<bool> {
    Ok(regulator_valuation(unit, p)?.at_least(1))
}

/// Exponent of `e` over the fundamental unit and the global p-th power flag.
pub fn global_pth_power_exception(e: &QuadInt, p: u64) -> Result<(u64, bool)> {
    let eps = quadfield::fundamental_unit(e.radical())?;
    let n = quadfield::unit_power_decompose(e, &eps)?;
    Ok((n, n % p as u64 == 0))
}

/// For each non-p-th-power `c` mod `q`, the residue
/// `t_q ≡ (c² + s)/(2cp²) (mod q)`; deduplicated on `t_q`, smallest witness
/// `c` kept, sorted by `t_q`.
pub fn residue_filter(p: u64, q: u64, s: Sign) -> Result<Vec<(u64, u64)>> {
    check_odd_prime(p)?;
    if !arith::is_prime(q) || (q - 1) % p != 0 {
        return Err(Error::Invalid(format!("q = {q} is not a prime ≡ 1 mod {p}")));
    }
    let p2 = (p * p) % q;
    let mut out: Vec<(u64, u64)> = Vec::new();
    for c in 2..q {
        if arith::is_pth_power_mod_q(c, p, q)? {
            continue;
        }
        let num = (c * c + q) % q;
        let num = ((num as i64 + s.value()).rem_euclid(q as i64)) as u64;
        let den = (2 * c % q) * p2 % q;
        let tq = num * arith::mod_inv(den, q).expect("denominator invertible") % q;
        if !out.iter().any(|&(_, t)| t == tq) {
            out.push((c, tq));
        }
    }
    out.sort_by_key(|&(_, t)| t);
    Ok(out)
}

/// The residue-filtered families `m(x) = p⁴(t_q + qx)² − s` for both signs,
/// negative sign first, residues ascending.
pub fn nonrational_families(p: u64, q: u64) -> Result<Vec<(Sign, u64, PolyFamily)>> {
    let mut fams = Vec::new();
    for s in [Sign::Neg, Sign::Pos] {
        for (_, tq) in residue_filter(p, q, s)? {
            fams.push((
                s,
                tq,
                PolyFamily::Compact {
                    s,
                    nu: 1,
                    trace: TraceRule::Linear {
                        scale: p * p * q,
                        offset: (p * p * tq) as i64,
                    },
                },
            ));
        }
    }
    Ok(fams)
}

/// Sweep the residue-filtered families; every record is a non-p-rational
/// field candidate, certified separately by [`certify_records`].
pub fn nonrational_list(p: u64, q: u64, bound: u64) -> Result<FopRun> {
    let fams: Vec<PolyFamily> = nonrational_families(p, q)?
        .into_iter()
        .map(|(_, _, f)| f)
        .collect();
    run_fop_multi(&fams, bound, DedupKey::Radical)
}

/// Per-record certificate: regulator valuation, unit exponent, exception flag.
#[derive(Clone, Debug)]
pub struct RegulatorReport {
    pub radical: i128,
    pub p: u64,
    pub regulator_valuation: PValuation,
    pub unit_exponent: u64,
    pub exception: bool,
    /// `p = 3` and `M ≡ −3 (mod 9)`: the torsion group picks up an extra
    /// root-of-unity factor independent of the regulator.
    pub w_contribution: bool,
}

/// Certify records of a sweep: the constructed unit must be a local p-th
/// power (regulator valuation >= 1) unless it is a global p-th power.
pub fn certify_records(
    families: &[PolyFamily],
    records: &[FopRecord],
    p: u64,
    limit: Option<usize>,
) -> Result<Vec<RegulatorReport>> {
    let take = limit.unwrap_or(records.len()).min(records.len());
    records[..take]
        .par_iter()
        .filter(|rec| !rec.is_degenerate())
        .map(|rec| {
            let fam = &families[rec.family as usize];
            let m = BigInt::from(rec.radical);
            let unit = fam.element(rec.t, &m, rec.r, None)?;
            let unit = if fam.element_norm().unsigned_abs() == 1 {
                unit
            } else {
                return Err(Error::Invalid("certification needs unit families".into()));
            };
            let (n, exception) = global_pth_power_exception(&unit, p)?;
            let regulator_valuation = regulator_valuation(&unit, p)?;
            Ok(RegulatorReport {
                radical: rec.radical,
                p,
                regulator_valuation,
                unit_exponent: n,
                exception,
                w_contribution: p == 3 && rec.radical.rem_euclid(9) == 6,
            })
        })
        .collect()
}

/// Heuristic ceiling `(c² B^{2h})^{1/p}` on radicals whose unit can be a
/// global p-th power, for trace substitutions `T = c·t^h + c₀`.
pub fn mbpow_bound(c: u64, h: u32, p: u64, bound: u64) -> f64 {
    let log = 2.0 * (c as f64).ln() + 2.0 * h as f64 * (bound as f64).ln();
    (log / p as f64).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(m: i64, u: i64, v: i64) -> QuadInt {
        QuadInt::new(BigInt::from(m), BigInt::from(u), BigInt::from(v)).unwrap()
    }

    #[test]
    fn variant_b_examples() {
        let b = variant_b_families(3, Sign::Neg).unwrap();
        let t0s: Vec<u64> = b.iter().map(|f| f.t0).collect();
        assert_eq!(t0s, vec![0, 4, 5]);
        let b = variant_b_families(7, Sign::Pos).unwrap();
        let t0s: Vec<u64> = b.iter().map(|f| f.t0).collect();
        assert_eq!(t0s, vec![0, 10, 39]);
        let b = variant_b_families(3, Sign::Pos).unwrap();
        let t0s: Vec<u64> = b.iter().map(|f| f.t0).collect();
        assert_eq!(t0s, vec![0]);
        assert!(variant_b_families(2, Sign::Neg).is_err());
    }

    #[test]
    fn variant_a_radical_forms() {
        let fams = variant_a_families(3).unwrap();
        assert_eq!(fams.len(), 16);
        // m(1) values must match a2·81 + b for the table
        let expect: Vec<i128> = VARIANT_A_FORMS
            .iter()
            .map(|&(a2, b)| (a2 * 81) as i128 + b as i128)
            .collect();
        let got: Vec<i128> = fams.iter().map(|f| f.radical_at(1, None).unwrap()).collect();
        assert_eq!(got, expect);
        // constructed elements are units of norm ±1
        for fam in &fams {
            let m = fam.radical_at(1, None).unwrap();
            let core = arith::squarefree_core(m).unwrap();
            let e = fam.element(1, &BigInt::from(core.core), core.r, None).unwrap();
            assert!(e.is_unit(), "family {fam:?}");
        }
        // (a,δ,s) = (1,2,1) at p=3: m(t) = 81t² − 4
        let idx = VARIANT_A_FORMS.iter().position(|&f| f == (1, -4)).unwrap();
        assert_eq!(fams[idx].radical_at(2, None).unwrap(), 81 * 4 - 4);
    }

    #[test]
    fn regulator_valuation_examples() {
        // (ε_5, 3): 3 inert, ε_5⁸ − 1 has valuation 1 -> result 0
        let e5 = quadfield::fundamental_unit(&BigInt::from(5)).unwrap();
        assert_eq!(
            regulator_valuation(&e5.unit, 3).unwrap(),
            PValuation::Finite(0)
        );
        // (ε_58, 3): 3 split, result 1
        let e58 = quadfield::fundamental_unit(&BigInt::from(58)).unwrap();
        assert_eq!(
            regulator_valuation(&e58.unit, 3).unwrap(),
            PValuation::Finite(1)
        );
        assert!(regulator_valuation(&e5.unit, 2).is_err());
    }

    #[test]
    fn local_power_examples() {
        // E_{-1}(9t) for t = 1: M = 85, local cube at 3
        let m = 81i128 + 4;
        let core = arith::squarefree_core(m).unwrap();
        assert_eq!(core.core, 85);
        let e = unit(85, 9, 1);
        assert!(local_pth_power_test(&e, 3).unwrap());
        let e5 = quadfield::fundamental_unit(&BigInt::from(5)).unwrap();
        assert!(!local_pth_power_test(&e5.unit, 3).unwrap());
        let one = QuadInt::one(BigInt::from(85));
        assert!(local_pth_power_test(&one, 3).unwrap());
    }

    #[test]
    fn global_exception_examples() {
        // p = 5: E_{-1}(25·151) over M = 29 is ε_29^10
        let t = 3775i128;
        let m = t * t + 4;
        let core = arith::squarefree_core(m).unwrap();
        assert_eq!((core.core, core.r), (29, 701));
        let e = unit(29, 3775, 701);
        let (n, exc) = global_pth_power_exception(&e, 5).unwrap();
        // ε₂₉⁵ = (3775 + 701√29)/2 exactly; 5 | n, so it is an exception
        assert_eq!(n, 5);
        assert!(exc);
        // n = 1 is never an exception
        let e13 = quadfield::fundamental_unit(&BigInt::from(13)).unwrap();
        let (n, exc) = global_pth_power_exception(&e13.unit.clone(), 3).unwrap();
        assert_eq!(n, 1);
        assert!(!exc);
    }

    #[test]
    fn residue_filter_examples() {
        let f = residue_filter(3, 7, Sign::Pos).unwrap();
        let tqs: Vec<u64> = f.iter().map(|&(_, t)| t).collect();
        assert_eq!(tqs, vec![2, 5]);
        let f = residue_filter(3, 7, Sign::Neg).unwrap();
        let tqs: Vec<u64> = f.iter().map(|&(_, t)| t).collect();
        assert_eq!(tqs, vec![3, 4]);
        assert!(residue_filter(3, 11, Sign::Pos).is_err());
    }

    #[test]
    fn residue_filter_norm_identity() {
        // q | N(E − c) for the constructed unit at t = t_q + qx
        for s in [Sign::Neg, Sign::Pos] {
            for (c, tq) in residue_filter(3, 7, s).unwrap() {
                for x in 1u64..=100 {
                    let t = tq + 7 * x;
                    let p2t = BigInt::from(9u64) * t;
                    // N(p²t − c + √(p⁴t² − s)) = c² + s − 2cp²t
                    let norm_val: BigInt = BigInt::from(c) * BigInt::from(c)
                        + BigInt::from(s.value())
                        - BigInt::from(2 * c) * &p2t;
                    assert!(norm_val.mod_floor(&BigInt::from(7)).is_zero());
                }
            }
        }
    }

    #[test]
    fn nonrational_prefix_small() {
        let run = nonrational_list(3, 7, 100).unwrap();
        let first: Vec<i128> = run.records.iter().take(4).map(|r| r.radical).collect();
        assert_eq!(first, vec![58, 74, 106, 359]);
        // B = 1 -> 4 records
        let run1 = nonrational_list(3, 7, 1).unwrap();
        assert_eq!(run1.stats.distinct, 4);
    }

    #[test]
    fn mbpow_examples() {
        assert!((mbpow_bound(9, 1, 3, 1_000_000) - 43267.49).abs() < 1.0);
        let fifth = (155625629f64).powf(0.2);
        assert!((fifth - 43.49268545).abs() < 1e-4);
        assert!((mbpow_bound(9, 1, 1_000_003, 1_000_000) - 1.0).abs() < 1e-3);
    }
}
