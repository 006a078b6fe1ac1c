//! The ten McLaughlin polynomial families: radical polynomials `mcl_k(t)`
//! with polynomial solutions `(U(t), V(t))` of
//! `U² − mcl_k·V² = N(E)`, yielding parametrized units for the sweep.
//!
//! Families 1–5 start from an integer-coordinate solution `u² − m v² = ±1`;
//! families 6–10 are the half-coordinate variants over bases
//! `(u + v√m)/2` with `u, v` odd and `m ≡ 1 (mod 4)`. For those, whether
//! `E(t)` lands in the ring of integers depends on the parity of `t`;
//! invalid parameters are skipped and counted.

use crate::arith;
use crate::fop::first_occurrence_merge;
use crate::poly::Poly;
use crate::quadfield::{self, QuadInt};
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

/// A validated family: radical polynomial plus doubled-coordinate unit
/// polynomials `2U(t)`, `2V(t)`.
#[derive(Clone, Debug)]
pub struct MclFamily {
    k: u8,
    base: (u64, u64, u64),
    mcl: Poly,
    u_num: Poly,
    v_num: Poly,
    /// `u² − m v²`, the constant value of `(2U)² − mcl·(2V)²` for k >= 6,
    /// or a quarter of it for k <= 5.
    base_norm: i64,
}

impl MclFamily {
    pub fn index(&self) -> u8 {
        self.k
    }

    pub fn base(&self) -> (u64, u64, u64) {
        self.base
    }

    /// Norm (±1) of the parametrized unit.
    pub fn element_norm(&self) -> i64 {
        if self.k <= 5 {
            self.base_norm
        } else {
            self.base_norm / 4
        }
    }

    pub fn radical_poly(&self) -> &Poly {
        &self.mcl
    }

    pub fn radical_at(&self, t: u64) -> BigInt {
        self.mcl.eval(&BigInt::from(t))
    }

    /// The unit `E(t) = (2U(t) + 2V(t)·r·√M)/2`; fails when the halved
    /// coordinates do not land in the ring (parity of `t`).
    pub fn element_at(&self, t: u64, core: &BigInt, r: &BigUint) -> Result<QuadInt> {
        let tb = BigInt::from(t);
        let u = self.u_num.eval(&tb);
        let v = self.v_num.eval(&tb) * BigInt::from(r.clone());
        QuadInt::new(core.clone(), u, v)
    }

    /// Recheck the defining identity `(2U)² − mcl·(2V)²` symbolically.
    pub fn verify_identity(&self) -> bool {
        let expected = if self.k <= 5 {
            4 * self.base_norm
        } else {
            self.base_norm
        };
        self.u_num
            .mul(&self.u_num)
            .sub(&self.mcl.mul(&self.v_num).mul(&self.v_num))
            .is_constant(&BigInt::from(expected))
    }
}

/// Build family `k` over the base `(m, u, v)`, validating the base norm,
/// coefficient integrality, and the defining identity.
pub fn make_mcl(k: u8, m: u64, u: u64, v: u64) -> Result<MclFamily> {
    if !(1..=10).contains(&k) {
        return Err(Error::Invalid(format!("family index {k} out of range")));
    }
    if m < 2 || arith::squarefree_core(m as i128)?.r != 1 {
        return Err(Error::Invalid(format!("base radical {m} is not square-free >= 2")));
    }
    if u < 1 || v < 1 {
        return Err(Error::Invalid("base coordinates must be positive".into()));
    }
    let norm4 = (u as i128) * (u as i128) - (m as i128) * (v as i128) * (v as i128);
    let norm4 = i64::try_from(norm4)
        .map_err(|_| Error::Overflow("base norm".into()))?;
    match k {
        1 => {
            if norm4.abs() != 1 {
                return Err(Error::Invalid(format!(
                    "family 1 needs u² − m v² = ±1, got {norm4}"
                )));
            }
        }
        2..=5 => {
            if norm4 != 1 {
                return Err(Error::Invalid(format!(
                    "family {k} needs u² − m v² = 1, got {norm4}"
                )));
            }
        }
        _ => {
            if m % 4 != 1 || u % 2 == 0 || v % 2 == 0 {
                return Err(Error::Invalid(format!(
                    "family {k} needs m ≡ 1 (mod 4) and odd coordinates"
                )));
            }
            let need = if k == 6 { norm4.abs() == 4 } else { norm4 == 4 };
            if !need {
                return Err(Error::Invalid(format!(
                    "family {k} needs u² − m v² = {}, got {norm4}",
                    if k == 6 { "±4" } else { "4" }
                )));
            }
        }
    }

    let mb = BigInt::from(m);
    let ub = BigInt::from(u);
    let vb = BigInt::from(v);
    let v2: BigInt = &vb * &vb;
    let v3: BigInt = &v2 * &vb;
    let v4: BigInt = &v2 * &v2;
    let v6: BigInt = &v4 * &v2;
    let p = |coeffs: Vec<BigInt>| Poly::from_coeffs(coeffs);
    let two = BigInt::from(2);

    // exact division with an integrality check, for the k = 4, 9 fractions
    let div_exact = |num: BigInt, den: BigInt| -> Result<BigInt> {
        if (&num % &den).is_zero() {
            Ok(num / den)
        } else {
            Err(Error::Invalid(format!(
                "family {k}: coefficient {num}/{den} is not integral"
            )))
        }
    };

    let (mcl, u_num, v_num) = match k {
        1 | 6 => {
            let mcl = p(vec![mb.clone(), &two * &ub, v2.clone()]);
            let scale = if k == 1 { 2 } else { 1 };
            (
                mcl,
                p(vec![&ub * scale, &v2 * scale]),
                p(vec![&vb * scale]),
            )
        }
        2 | 3 | 7 | 8 => {
            let w: BigInt = match k {
                2 => &ub - 1,
                3 => &ub + 1,
                7 => &ub - 2,
                _ => &ub + 2,
            };
            let mcl = p(vec![mb.clone(), &two * &w * &w, &w * &w * &v2]);
            let scale = if k <= 3 { 2 } else { 1 };
            (
                mcl,
                p(vec![&ub * scale, &w * &v2 * 2 * scale, &w * &v4 * scale]),
                p(vec![&vb * scale, &v3 * scale]),
            )
        }
        4 | 9 => {
            let (w, z): (BigInt, BigInt) = if k == 4 {
                (&ub + 1, &ub - 1)
            } else {
                (&ub + 2, &ub - 2)
            };
            let mcl = p(vec![
                mb.clone(),
                &two * &w * &z,
                &w * &w * &v2,
            ]);
            let scale = if k == 4 { 2 } else { 1 };
            let lead_u = div_exact(&w * &w * &v4 * scale, z.clone())?;
            let lead_v = div_exact(&w * &v3 * scale, z.clone())?;
            (
                mcl,
                p(vec![&ub * scale, &w * &v2 * 2 * scale, lead_u]),
                p(vec![&vb * scale, lead_v]),
            )
        }
        5 | 10 => {
            let w: BigInt = if k == 5 { &ub - 1 } else { &ub - 2 };
            let lin: BigInt = if k == 5 {
                &two * &w * (&two * &ub - 1)
            } else {
                BigInt::from(4) * &w * (&ub - 1)
            };
            let w2: BigInt = &w * &w;
            let mcl = p(vec![
                mb.clone(),
                lin,
                BigInt::from(6) * &w2 * &v2,
                BigInt::from(4) * &w2 * &v4,
                &w2 * &v6,
            ]);
            let scale = if k == 5 { 2 } else { 1 };
            (
                mcl,
                p(vec![
                    &ub * scale,
                    &w * &v2 * 3 * scale,
                    &w * &v4 * 3 * scale,
                    &w * &v6 * scale,
                ]),
                p(vec![&vb * scale, &v3 * scale]),
            )
        }
        _ => unreachable!(),
    };

    let fam = MclFamily {
        k,
        base: (m, u, v),
        mcl,
        u_num,
        v_num,
        base_norm: norm4,
    };
    if !fam.verify_identity() {
        return Err(Error::Invalid(format!(
            "family {k} over ({m}, {u}, {v}) fails its defining identity"
        )));
    }
    Ok(fam)
}

/// One sweep record; `exponent` is present when certification ran and the
/// fundamental unit fit the continued-fraction budget.
#[derive(Clone, Debug)]
pub struct MclRecord {
    pub radical: BigInt,
    pub t: u64,
    pub r: BigUint,
    pub exponent: Option<u64>,
    /// `Some(true)` when the unit is a proper power of the fundamental unit.
    pub exception: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct MclRun {
    pub records: Vec<MclRecord>,
    pub sweep_points: u64,
    /// Parameters whose unit misses the ring of integers (parity), skipped.
    pub skipped_parity: u64,
    /// Records whose fundamental unit exceeded the continued-fraction budget.
    pub budget_flagged: u64,
    /// Parameters whose radical resisted factorization within budget.
    pub factor_flagged: u64,
}

/// First-occurrence sweep of a McLaughlin family, with the exponent of each
/// unit over the fundamental unit computed for the first `cert_cap` records
/// (`None` certifies everything).
pub fn fop_mcl(family: &MclFamily, bound: u64, cert_cap: Option<usize>) -> Result<MclRun> {
    if bound < 1 {
        return Err(Error::Invalid("bound must be >= 1".into()));
    }
    #[derive(Clone)]
    enum Hit {
        Record { radical: BigInt, t: u64, r: BigUint },
        ParitySkip,
        FactorSkip,
    }
    let hits: Vec<Hit> = (1..=bound)
        .into_par_iter()
        .map(|t| {
            let mt = family.radical_at(t);
            if mt < BigInt::from(2) {
                return Hit::ParitySkip; // degenerate radical, nothing to record
            }
            let core = match arith::squarefree_core_big(&mt, arith::BIG_RHO_BUDGET) {
                Ok(c) => c,
                Err(Error::FactorBudget(_)) => return Hit::FactorSkip,
                Err(_) => return Hit::FactorSkip,
            };
            if family.element_at(t, &core.core, &core.r).is_err() {
                return Hit::ParitySkip;
            }
            Hit::Record {
                radical: core.core,
                t,
                r: core.r,
            }
        })
        .collect();

    let mut skipped_parity = 0u64;
    let mut factor_flagged = 0u64;
    let mut keyed: Vec<(BigInt, (u64, BigUint))> = Vec::new();
    for hit in hits {
        match hit {
            Hit::Record { radical, t, r } => keyed.push((radical, (t, r))),
            Hit::ParitySkip => skipped_parity += 1,
            Hit::FactorSkip => factor_flagged += 1,
        }
    }
    let merged = first_occurrence_merge(keyed);

    let cap = cert_cap.unwrap_or(merged.len());
    let mut budget_flagged = 0u64;
    let records: Vec<MclRecord> = merged
        .into_iter()
        .enumerate()
        .map(|(i, (radical, (t, r)))| -> Result<MclRecord> {
            let (exponent, exception) = if i < cap {
                match quadfield::fundamental_unit(&radical) {
                    Ok(eps) => {
                        let e = family.element_at(t, &radical, &r)?;
                        let e = e.abs_rep();
                        let n = quadfield::unit_power_decompose(&e, &eps)?;
                        (Some(n), Some(n > 1))
                    }
                    Err(Error::CfBudget { .. }) => {
                        budget_flagged += 1;
                        (None, None)
                    }
                    Err(e) => return Err(e),
                }
            } else {
                (None, None)
            };
            Ok(MclRecord {
                radical,
                t,
                r,
                exponent,
                exception,
            })
        })
        .collect::<Result<_>>()?;

    Ok(MclRun {
        records,
        sweep_points: bound,
        skipped_parity,
        budget_flagged,
        factor_flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn family1_small_base() {
        // (m,u,v) = (2,3,2): mcl1 = 4t² + 6t + 2, U = 4t + 3, V = 2
        let fam = make_mcl(1, 2, 3, 2).unwrap();
        assert_eq!(fam.radical_at(1), BigInt::from(12));
        assert!(fam.verify_identity());
        assert_eq!(fam.element_norm(), 1);
        // at t = 1: 49 − 12·4 = 1
        let core = arith::squarefree_core(12).unwrap();
        let e = fam
            .element_at(1, &BigInt::from(core.core), &BigUint::from(core.r))
            .unwrap();
        assert_eq!(e.norm(), BigInt::one());
        assert_eq!(*e.trace(), BigInt::from(14)); // 2U(1) = 14
    }

    #[test]
    fn paper_base_k10_accepted() {
        let fam = make_mcl(10, 301, 22745, 1311).unwrap();
        assert!(fam.verify_identity());
        assert_eq!(fam.radical_poly().degree(), Some(4));
        // leading coefficient (u−2)² v⁶
        let lead = BigInt::from(22743u64).pow(2) * BigInt::from(1311u64).pow(6);
        assert_eq!(fam.radical_poly().leading(), Some(&lead));
    }

    #[test]
    fn norm_minus_one_base_rejected_beyond_k1() {
        // (5, 2, 1): 4 − 5 = −1 works for k = 1 only
        assert!(make_mcl(1, 5, 2, 1).is_ok());
        assert!(make_mcl(2, 5, 2, 1).is_err());
        // (5, 1, 1): norm −4 half base works for k = 6 only
        assert!(make_mcl(6, 5, 1, 1).is_ok());
        assert!(make_mcl(7, 5, 1, 1).is_err());
    }

    #[test]
    fn half_families_land_in_ring() {
        // k = 6 over (5, 1, 1): halved coordinates always land in the ring
        // (the parity guard stays as a defensive check)
        let fam = make_mcl(6, 5, 1, 1).unwrap();
        let run = fop_mcl(&fam, 10, Some(3)).unwrap();
        assert_eq!(run.skipped_parity, 0);
        // first sorted radical is 2 (t = 1 gives 8 = 2·2²) with E = ε₂
        assert_eq!(run.records[0].radical, BigInt::from(2));
        assert_eq!(run.records[0].exponent, Some(1));
        // proper powers may appear for tiny t: t = 3 gives 20 = 5·2² and
        // E = 2+√5 = ε₅³
        let m5 = run.records.iter().find(|r| r.radical == BigInt::from(5)).unwrap();
        assert_eq!(m5.exponent, Some(3));
        assert_eq!(m5.exception, Some(true));
    }

    #[test]
    fn identity_random_bases() {
        // integer-basis families over Pell solutions of several fields
        for m in [2u64, 3, 6, 7, 11, 110] {
            let eps = quadfield::fundamental_unit(&BigInt::from(m)).unwrap();
            // find the smallest power with integer coordinates and norm 1
            let mut z = eps.unit.clone();
            loop {
                let two = BigInt::from(2);
                let integral = z.trace().bits() < 60
                    && (z.trace() % &two).is_zero()
                    && (z.coeff() % &two).is_zero();
                if integral && z.norm() == BigInt::one() {
                    break;
                }
                z = z.mul(&eps.unit).unwrap();
            }
            let u: BigInt = z.trace() / 2;
            let v: BigInt = z.coeff() / 2;
            let (u, v) = (u.to_u64().unwrap(), v.to_u64().unwrap());
            for k in 1..=5 {
                match make_mcl(k, m, u, v) {
                    Ok(fam) => assert!(fam.verify_identity(), "k = {k}, m = {m}"),
                    // k = 4 carries (u−1) divisibility side conditions
                    Err(e) => assert!(k == 4, "k = {k}, m = {m}: {e}"),
                }
            }
        }
    }
}
