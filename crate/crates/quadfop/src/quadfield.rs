//! Real quadratic integers in halved coordinates, fundamental units via
//! continued fractions, and unit power decomposition.
//!
//! An element of `ℚ(√M)` is stored as `(u + v√M)/2` with `u ≡ v (mod 2)`;
//! both coordinates odd force `M ≡ 1 (mod 4)`. This matches the convention
//! `T(α) = u`, `N(α) = (u² − M v²)/4` and avoids rationals entirely.

use crate::arith;
use crate::{Error, Result, Sign};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Default step budget for the continued fraction of `√M`.
pub const CF_BUDGET: u64 = 1_000_000;

/// Default cap on exponents searched by [`unit_power_decompose`].
pub const DECOMPOSE_CAP: u64 = 10_000_000;

/// `(u + v√M)/2` with the parity invariant enforced at construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadInt {
    radical: BigInt,
    u: BigInt,
    v: BigInt,
}

impl QuadInt {
    /// Build `(u + v√radical)/2`, checking ring membership.
    pub fn new(radical: BigInt, u: BigInt, v: BigInt) -> Result<Self> {
        if radical < BigInt::from(2) {
            return Err(Error::Invalid(format!(
                "radical must be >= 2, got {radical}"
            )));
        }
        let u_odd = u.is_odd();
        if u_odd != v.is_odd() {
            return Err(Error::Invalid(format!(
                "coordinates ({u}, {v}) have mixed parity"
            )));
        }
        if u_odd && (&radical).mod_floor(&BigInt::from(4)) != BigInt::one() {
            return Err(Error::Invalid(format!(
                "odd coordinates require radical ≡ 1 (mod 4), got {radical}"
            )));
        }
        Ok(QuadInt { radical, u, v })
    }

    /// `a + b√radical` on the integral basis, i.e. doubled coordinates.
    pub fn from_integer_coords(radical: BigInt, a: BigInt, b: BigInt) -> Result<Self> {
        Self::new(radical, a * 2, b * 2)
    }

    pub fn one(radical: BigInt) -> Self {
        QuadInt {
            radical,
            u: BigInt::from(2),
            v: BigInt::zero(),
        }
    }

    pub fn radical(&self) -> &BigInt {
        &self.radical
    }

    /// Trace `u` of `(u + v√M)/2`.
    pub fn trace(&self) -> &BigInt {
        &self.u
    }

    /// Coefficient of `√M` in doubled coordinates.
    pub fn coeff(&self) -> &BigInt {
        &self.v
    }

    pub fn norm(&self) -> BigInt {
        (&self.u * &self.u - &self.v * &self.v * &self.radical) / 4
    }

    pub fn conj(&self) -> QuadInt {
        QuadInt {
            radical: self.radical.clone(),
            u: self.u.clone(),
            v: -&self.v,
        }
    }

    pub fn is_unit(&self) -> bool {
        let n = self.norm();
        n.magnitude().is_one()
    }

    /// Representative with nonnegative coordinates, modulo sign and
    /// conjugation.
    pub fn abs_rep(&self) -> QuadInt {
        QuadInt {
            radical: self.radical.clone(),
            u: self.u.abs(),
            v: self.v.abs(),
        }
    }

    pub fn mul(&self, rhs: &QuadInt) -> Result<QuadInt> {
        if self.radical != rhs.radical {
            return Err(Error::MixedRadicals(
                self.radical.to_string(),
                rhs.radical.to_string(),
            ));
        }
        let u = &self.u * &rhs.u + &self.v * &rhs.v * &self.radical;
        let v = &self.u * &rhs.v + &self.v * &rhs.u;
        debug_assert!(u.is_even() && v.is_even());
        Ok(QuadInt {
            radical: self.radical.clone(),
            u: u / 2,
            v: v / 2,
        })
    }

    pub fn pow(&self, n: u64) -> QuadInt {
        let mut acc = QuadInt::one(self.radical.clone());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base).expect("same radical");
            }
            base = base.mul(&base).expect("same radical");
            n >>= 1;
        }
        acc
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.u.is_even() {
            write!(f, "{}+{}√{}", &self.u / 2, &self.v / 2, self.radical)
        } else {
            write!(f, "({}+{}√{})/2", self.u, self.v, self.radical)
        }
    }
}

/// Fundamental unit `ε_M > 1` together with its norm sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundUnit {
    pub unit: QuadInt,
    pub norm_sign: Sign,
}

/// Field discriminant of `ℚ(√M)` for square-free `M`: `M` when
/// `M ≡ 1 (mod 4)`, else `4M`. Works for negative radicals.
pub fn discriminant(m: &BigInt) -> Result<BigInt> {
    if m.is_zero() || m.is_one() {
        return Err(Error::Invalid(format!("degenerate radical {m}")));
    }
    if let Some(small) = m.to_i128() {
        if small.unsigned_abs() <= u64::MAX as u128 {
            let core = arith::squarefree_core(small)?;
            if core.r != 1 {
                return Err(Error::Invalid(format!("radical {m} is not square-free")));
            }
        }
    }
    Ok(discriminant_unchecked(m))
}

/// [`discriminant`] without the square-free check; for radicals already
/// produced as cores.
pub fn discriminant_unchecked(m: &BigInt) -> BigInt {
    if m.mod_floor(&BigInt::from(4)) == BigInt::one() {
        m.clone()
    } else {
        m * 4
    }
}

/// Fundamental unit of `ℚ(√M)` by the continued fraction of `√M`.
///
/// The expansion of `√M` yields the fundamental unit `x + y√M` of the order
/// `ℤ[√M]` with norm `(−1)^ℓ` for period length `ℓ`. When `M ≡ 1 (mod 4)`
/// the maximal order may contain its cube root with odd halved coordinates;
/// the trace of that root is the integer solution of `u³ − 3Su = 2x`, so the
/// adjustment needs only an integer cube root plus an exact verification.
pub fn fundamental_unit(m: &BigInt) -> Result<FundUnit> {
    fundamental_unit_budget(m, CF_BUDGET)
}

pub fn fundamental_unit_budget(m: &BigInt, budget: u64) -> Result<FundUnit> {
    if *m < BigInt::from(2) {
        return Err(Error::Invalid(format!("radical must be >= 2, got {m}")));
    }
    let a0 = m.sqrt();
    if &a0 * &a0 == *m {
        return Err(Error::Invalid(format!("radical {m} is a perfect square")));
    }

    let mut p_prev = BigInt::one();
    let mut p_cur = a0.clone();
    let mut q_prev = BigInt::zero();
    let mut q_cur = BigInt::one();
    let mut big_p = BigInt::zero();
    let mut big_q = BigInt::one();
    let mut a_k = a0.clone();

    let mut solution: Option<(BigInt, BigInt, i64)> = None;
    for step in 1..=budget {
        big_p = &a_k * &big_q - &big_p;
        big_q = (m - &big_p * &big_p) / &big_q;
        if big_q.is_one() {
            let s = if step % 2 == 1 { -1 } else { 1 };
            solution = Some((p_cur.clone(), q_cur.clone(), s));
            break;
        }
        a_k = (&a0 + &big_p) / &big_q;
        let p_next = &a_k * &p_cur + &p_prev;
        let q_next = &a_k * &q_cur + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
    }
    let Some((x, y, s)) = solution else {
        return Err(Error::CfBudget {
            radical: m.to_string(),
            budget,
        });
    };
    debug_assert_eq!(&x * &x - m * &y * &y, BigInt::from(s));

    if m.mod_floor(&BigInt::from(4)) == BigInt::one() {
        if let Some(root) = half_cube_root(m, &x, &y, s) {
            return Ok(root);
        }
    }
    Ok(FundUnit {
        unit: QuadInt::new(m.clone(), &x * 2, &y * 2)?,
        norm_sign: Sign::from_i64(s)?,
    })
}

/// Search for `(u + v√M)/2` with odd `u, v` whose cube is `x + y√M`.
fn half_cube_root(m: &BigInt, x: &BigInt, y: &BigInt, s: i64) -> Option<FundUnit> {
    let target: BigInt = x * 2;
    let approx = target.cbrt();
    let three_s = BigInt::from(3 * s);
    for delta in -2i64..=2 {
        let cand: BigInt = &approx + BigInt::from(delta);
        if cand < BigInt::one() || cand.is_even() {
            continue;
        }
        if &cand * &cand * &cand - &three_s * &cand != target {
            continue;
        }
        let w: BigInt = &cand * &cand - BigInt::from(4 * s);
        if w <= BigInt::zero() || !(&w % m).is_zero() {
            continue;
        }
        let v2: BigInt = w / m;
        let v = v2.sqrt();
        if &v * &v != v2 || v.is_even() {
            continue;
        }
        let unit = QuadInt::new(m.clone(), cand, v).ok()?;
        let cube = unit.pow(3);
        if *cube.trace() == x * 2 && *cube.coeff() == y * 2 {
            return Some(FundUnit {
                unit,
                norm_sign: Sign::from_i64(s).ok()?,
            });
        }
    }
    None
}

/// Smallest `n >= 1` with `e = eps^n`.
///
/// Traces of `eps^n` increase strictly, so the loop walks powers until the
/// trace reaches `e`'s and then demands exact equality.
pub fn unit_power_decompose(e: &QuadInt, eps: &FundUnit) -> Result<u64> {
    unit_power_decompose_capped(e, eps, DECOMPOSE_CAP)
}

pub fn unit_power_decompose_capped(e: &QuadInt, eps: &FundUnit, cap: u64) -> Result<u64> {
    if e.radical() != eps.unit.radical() {
        return Err(Error::MixedRadicals(
            e.radical().to_string(),
            eps.unit.radical().to_string(),
        ));
    }
    if !e.is_unit() {
        return Err(Error::Invalid(format!("{e} is not a unit")));
    }
    if e.trace() < &BigInt::one() || e.coeff() < &BigInt::one() {
        return Err(Error::Invalid(format!("{e} is not > 1 with positive coordinates")));
    }
    let mut z = eps.unit.clone();
    let mut n = 1u64;
    while z.trace() < e.trace() {
        z = z.mul(&eps.unit)?;
        n += 1;
        if n > cap {
            return Err(Error::PowerDecompose(format!(
                "exponent cap {cap} hit for {e}"
            )));
        }
    }
    if &z == e {
        Ok(n)
    } else {
        Err(Error::PowerDecompose(format!(
            "{e} is not a power of {}",
            eps.unit
        )))
    }
}
