//! Fundamental solutions of `u² − M v² = 4sν` via the first-occurrence
//! sweep, and an independent minimal-trace oracle.

use crate::fop::{run_fop, DedupKey, FopRun, PolyFamily};
use crate::quadfield::{self, QuadInt};
use crate::{Error, Result, Sign};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

/// A solution `α = (u + v√M)/2` of `N(α) = sν` with `u, v >= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormEqSolution {
    pub alpha: QuadInt,
    pub s: Sign,
    pub nu: u64,
}

/// Sweep `m(t) = t² − 4sν` over `t = 1..=bound`; each record's
/// `(t, r)` is the fundamental solution `(u, v)` for its radical.
pub fn fop_norm_solutions(s: Sign, nu: u64, bound: u64) -> Result<FopRun> {
    if nu < 1 {
        return Err(Error::Invalid("nu must be >= 1".into()));
    }
    run_fop(&PolyFamily::norms(s, nu), bound, DedupKey::Radical)
}

/// Scan traces `u = 1, 2, ..., trace_bound` for the first solution of
/// `u² − M v² = 4sν`; `None` when no trace in range works.
pub fn min_trace_oracle(
    m: u64,
    s: Sign,
    nu: u64,
    trace_bound: u64,
) -> Result<Option<NormEqSolution>> {
    if m < 2 {
        return Err(Error::Invalid(format!("radical must be >= 2, got {m}")));
    }
    let target = 4i128 * s.value() as i128 * nu as i128;
    for u in 1..=trace_bound {
        let w = (u as i128) * (u as i128) - target;
        if w <= 0 || w % (m as i128) != 0 {
            continue;
        }
        if let Some(v) = crate::arith::is_square_i128(w / m as i128) {
            if v >= 1 {
                let alpha = QuadInt::new(BigInt::from(m), BigInt::from(u), BigInt::from(v))?;
                return Ok(Some(NormEqSolution { alpha, s, nu }));
            }
        }
    }
    Ok(None)
}

/// Default oracle bound `4ν⌈√M⌉ + T(ε_M)`, generous for desk-scale checks.
pub fn default_trace_bound(m: u64, nu: u64) -> Result<u64> {
    let eps = quadfield::fundamental_unit(&BigInt::from(m))?;
    let sqrt_m = (m as f64).sqrt().ceil() as u64;
    let eps_trace = eps
        .unit
        .trace()
        .to_u64()
        .ok_or_else(|| Error::Overflow(format!("fundamental unit trace for M = {m}")))?;
    4u64.checked_mul(nu)
        .and_then(|x| x.checked_mul(sqrt_m))
        .and_then(|x| x.checked_add(eps_trace))
        .ok_or_else(|| Error::Overflow("oracle trace bound".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_examples() {
        // (13, -1, 3): u = 1, alpha = (1+√13)/2
        let sol = min_trace_oracle(13, Sign::Neg, 3, 100).unwrap().unwrap();
        assert_eq!(*sol.alpha.trace(), BigInt::from(1));
        assert_eq!(*sol.alpha.coeff(), BigInt::from(1));
        assert_eq!(sol.alpha.norm(), BigInt::from(-3));

        // (7, +1, 3): nothing
        assert!(min_trace_oracle(7, Sign::Pos, 3, 100_000).unwrap().is_none());

        // (37, -1, 225): u = 5, alpha = 5(1+√37)/2
        let sol = min_trace_oracle(37, Sign::Neg, 225, 1000).unwrap().unwrap();
        assert_eq!(*sol.alpha.trace(), BigInt::from(5));
        assert_eq!(*sol.alpha.coeff(), BigInt::from(5));
        assert_eq!(sol.alpha.norm(), BigInt::from(-225));
    }

    #[test]
    fn sweep_examples_small() {
        // s=-1, nu=15: [85,5] is a record, alpha = (5+√85)/2 of norm -15
        let run = fop_norm_solutions(Sign::Neg, 15, 1000).unwrap();
        let rec = run.records.iter().find(|r| r.radical == 85).unwrap();
        assert_eq!(rec.t, 5);
        assert_eq!(rec.r, 1);
        let fam = PolyFamily::norms(Sign::Neg, 15);
        let alpha = fam.element(rec.t, &BigInt::from(85), rec.r, None).unwrap();
        assert_eq!(alpha.norm(), BigInt::from(-15));
    }

    #[test]
    fn norm_identity_all_records() {
        for (s, nu) in [(Sign::Neg, 3u64), (Sign::Pos, 2), (Sign::Neg, 225)] {
            let run = fop_norm_solutions(s, nu, 400).unwrap();
            let fam = PolyFamily::norms(s, nu);
            for rec in run.records.iter().filter(|r| r.radical >= 2) {
                let alpha = fam
                    .element(rec.t, &BigInt::from(rec.radical), rec.r, None)
                    .unwrap();
                assert_eq!(alpha.norm(), BigInt::from(s.value() * nu as i64));
            }
        }
    }

    #[test]
    fn generator_trace_uniqueness_sampled() {
        // alpha·eps^{±1} never shares the minimal trace
        for (m, s, nu) in [(13u64, Sign::Neg, 3u64), (85, Sign::Neg, 15), (19, Sign::Neg, 15)] {
            let sol = min_trace_oracle(m, s, nu, 100_000).unwrap().unwrap();
            let eps = quadfield::fundamental_unit(&BigInt::from(m)).unwrap();
            let up = sol.alpha.mul(&eps.unit).unwrap().abs_rep();
            let down = sol.alpha.mul(&eps.unit.conj()).unwrap().abs_rep();
            assert!(up.trace() > sol.alpha.trace());
            assert!(down.trace() > sol.alpha.trace());
        }
    }
}
