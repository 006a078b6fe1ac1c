//! Integer primitives: deterministic Miller–Rabin, Pollard rho with Brent
//! cycle detection, square-free cores, modular square roots with Hensel
//! lifting, and power-residue tests.

use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;

/// Trial-division bound used before switching to Pollard rho.
pub const TRIAL_BOUND: u64 = 10_000;

/// Default iteration budget for Pollard rho on big integers.
pub const BIG_RHO_BUDGET: u64 = 50_000_000;

static SMALL_PRIMES: Lazy<Vec<u64>> = Lazy::new(|| sieve_primes(TRIAL_BOUND));

/// All primes `<= limit` by a plain sieve of Eratosthenes.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

/// The first `count` primes (`prime(1) = 2`).
pub fn first_primes(count: u64) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    // upper bound for the n-th prime, valid for n >= 6
    let n = count as f64;
    let bound = if count < 6 {
        13
    } else {
        (n * (n.ln() + n.ln().ln())).ceil() as u64 + 16
    };
    let mut primes = sieve_primes(bound);
    primes.truncate(count as usize);
    assert_eq!(primes.len(), count as usize);
    primes
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod modulus` with 128-bit intermediates.
pub fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, modulus);
        }
        base = mul_mod(base, base, modulus);
        exp >>= 1;
    }
    acc
}

/// Modular inverse of `a` mod `m`, if `gcd(a, m) = 1`.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller–Rabin for `u64`.
///
/// The witness set 2..=37 is sound below 3.317e24, which covers all of `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard rho (Brent variant) on an odd composite that is not a prime power
/// of a small prime. Restarts with a new polynomial offset on cycle failure,
/// so it always returns a nontrivial factor.
fn rho_brent(n: u64) -> u64 {
    debug_assert!(n > 1 && n % 2 == 1 && !is_prime(n));
    let step = |y: u64, c: u64| ((y as u128 * y as u128 + c as u128) % n as u128) as u64;
    for c in 1u64.. {
        let mut y = 2u64;
        let (mut x, mut ys) = (y, y);
        let mut q = 1u64;
        let mut g = 1u64;
        let m = 128u64;
        let mut r = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = step(y, c);
            }
            let mut k = 0u64;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = step(y, c);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            // backtrack one step at a time
            g = 1;
            while g == 1 {
                ys = step(ys, c);
                g = gcd_u64(x.abs_diff(ys), n);
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Full factorization of `n >= 1` as sorted `(prime, exponent)` pairs.
///
/// Trial division up to [`TRIAL_BOUND`], then Miller–Rabin plus Pollard rho
/// on what remains.
pub fn factor(n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut n = n;
    for &p in SMALL_PRIMES.iter() {
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        let mut stack = vec![n];
        let mut big: Vec<u64> = Vec::new();
        while let Some(m) = stack.pop() {
            if is_prime(m) {
                big.push(m);
            } else if let Some(root) = is_square_u64(m) {
                stack.push(root);
                stack.push(root);
            } else {
                let d = rho_brent(m);
                stack.push(d);
                stack.push(m / d);
            }
        }
        big.sort_unstable();
        for p in big {
            if let Some(last) = out.last_mut() {
                if last.0 == p {
                    last.1 += 1;
                    continue;
                }
            }
            out.push((p, 1));
        }
    }
    out.sort_unstable();
    out
}

const SQUARE_RESIDUES_MOD_64: u64 = {
    let mut mask = 0u64;
    let mut i = 0u64;
    while i < 64 {
        mask |= 1 << ((i * i) % 64);
        i += 1;
    }
    mask
};

/// Square root if `n` is a perfect square.
pub fn is_square_u64(n: u64) -> Option<u64> {
    if (SQUARE_RESIDUES_MOD_64 >> (n % 64)) & 1 == 0 {
        return None;
    }
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

/// Square root if `n >= 0` is a perfect square.
pub fn is_square_i128(n: i128) -> Option<u64> {
    if n < 0 {
        return None;
    }
    let n = n as u128;
    let r = n.sqrt();
    (r * r == n).then(|| r as u64)
}

/// Miller–Rabin on big integers; deterministic below 3.317e24, strong
/// probable-prime with the fixed witness set 2..=97 above that.
pub fn is_prime_big(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if n.is_even() {
        return false;
    }
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for &a in &[
        2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79,
        83, 89, 97,
    ] {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_brent_big(n: &BigUint, budget: u64) -> Result<BigUint> {
    let one = BigUint::one();
    let mut spent = 0u64;
    for c in 1u64.. {
        let c = BigUint::from(c);
        let mut y = BigUint::from(2u32);
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut q = one.clone();
        let mut g = one.clone();
        let m = 128u64;
        let mut r = 1u64;
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = (&y * &y + &c) % n;
            }
            let mut k = 0u64;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = (&y * &y + &c) % n;
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
                spent += m;
                if spent > budget {
                    return Err(Error::FactorBudget(n.to_string()));
                }
            }
            r *= 2;
        }
        if &g == n {
            g = one.clone();
            while g == one {
                ys = (&ys * &ys + &c) % n;
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                spent += 1;
                if spent > budget {
                    return Err(Error::FactorBudget(n.to_string()));
                }
            }
        }
        if &g != n && g > one {
            return Ok(g);
        }
    }
    unreachable!()
}

/// Full factorization of a big integer with a rho iteration budget.
pub fn factor_big(n: &BigUint, rho_budget: u64) -> Result<Vec<(BigUint, u32)>> {
    if let Some(small) = n.to_u64() {
        return Ok(factor(small)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect());
    }
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut n = n.clone();
    for &p in SMALL_PRIMES.iter() {
        let pb = BigUint::from(p);
        if n.is_one() {
            break;
        }
        if (&n % &pb).is_zero() {
            let mut e = 0u32;
            while (&n % &pb).is_zero() {
                n /= &pb;
                e += 1;
            }
            out.push((pb, e));
        }
    }
    let mut stack = vec![n];
    let mut rest: Vec<BigUint> = Vec::new();
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if let Some(small) = m.to_u64() {
            for (p, e) in factor(small) {
                for _ in 0..e {
                    rest.push(BigUint::from(p));
                }
            }
            continue;
        }
        if is_prime_big(&m) {
            rest.push(m);
            continue;
        }
        // cheap perfect-power shortcut before rho
        let sq = m.sqrt();
        if &sq * &sq == m {
            stack.push(sq.clone());
            stack.push(sq);
            continue;
        }
        let cb = m.cbrt();
        if &cb * &cb * &cb == m {
            stack.push(cb.clone());
            stack.push(cb.clone());
            stack.push(cb);
            continue;
        }
        let d = rho_brent_big(&m, rho_budget)?;
        stack.push(&m / &d);
        stack.push(d);
    }
    rest.sort();
    for p in rest {
        if let Some(last) = out.last_mut() {
            if last.0 == p {
                last.1 += 1;
                continue;
            }
        }
        out.push((p, 1));
    }
    out.sort();
    Ok(out)
}

/// Decomposition `m = core · r²` with `core` square-free carrying the sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SquareFreeCore {
    pub core: i128,
    pub r: u64,
}

/// Square-free core of a nonzero integer; the sign stays on the core.
pub fn squarefree_core(m: i128) -> Result<SquareFreeCore> {
    if m == 0 {
        return Err(Error::Invalid("squarefree_core of 0".into()));
    }
    let sign = m.signum();
    let abs = m.unsigned_abs();
    if let Ok(small) = u64::try_from(abs) {
        let mut core = 1u64;
        let mut r = 1u64;
        for (p, e) in factor(small) {
            if e % 2 == 1 {
                core *= p;
            }
            r *= p.pow(e / 2);
        }
        Ok(SquareFreeCore {
            core: sign * core as i128,
            r,
        })
    } else {
        let big = squarefree_core_big(&BigInt::from(m), BIG_RHO_BUDGET)?;
        Ok(SquareFreeCore {
            core: big.core.to_i128().ok_or_else(|| Error::Overflow("core".into()))?,
            r: big.r.to_u64().ok_or_else(|| Error::Overflow("core cofactor".into()))?,
        })
    }
}

/// Big-integer variant of [`squarefree_core`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareFreeCoreBig {
    pub core: BigInt,
    pub r: BigUint,
}

pub fn squarefree_core_big(m: &BigInt, rho_budget: u64) -> Result<SquareFreeCoreBig> {
    if m.is_zero() {
        return Err(Error::Invalid("squarefree_core of 0".into()));
    }
    let mut core = BigUint::one();
    let mut r = BigUint::one();
    for (p, e) in factor_big(m.magnitude(), rho_budget)? {
        if e % 2 == 1 {
            core *= &p;
        }
        r *= p.pow(e / 2);
    }
    let mut core = BigInt::from(core);
    if m.is_negative() {
        core = -core;
    }
    Ok(SquareFreeCoreBig { core, r })
}

/// Legendre symbol `(a/p)` for an odd prime `p`, in `{-1, 0, 1}`.
pub fn legendre(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    let t = mod_pow(a, (p - 1) / 2, p);
    if t == 1 {
        1
    } else {
        -1
    }
}

/// Jacobi symbol `(a/n)` for odd `n > 0`.
pub fn jacobi(a: i128, n: u64) -> i32 {
    debug_assert!(n % 2 == 1 && n > 0);
    let mut a = a.rem_euclid(n as i128) as u64;
    let mut n = n;
    let mut result = 1i32;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// A square root of `a` modulo an odd prime `p` (Tonelli–Shanks), or `None`
/// when `a` is a non-residue.
pub fn sqrt_mod_p(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(mod_pow(a, (p + 1) / 4, p));
    }
    // Tonelli–Shanks
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2u64;
    while legendre(z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(a, q, p);
    let mut r = mod_pow(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = mod_pow(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// All solutions of `t² ≡ a (mod p²)` for an odd prime `p` with `p ∤ a`,
/// sorted ascending. Empty when `a` is a non-residue mod `p`.
pub fn sqrt_mod_p2(a: u64, p: u64) -> Result<Vec<u64>> {
    if p < 3 || !is_prime(p) {
        return Err(Error::Invalid(format!("p = {p} is not an odd prime")));
    }
    let p2 = p
        .checked_mul(p)
        .ok_or_else(|| Error::Overflow(format!("p² for p = {p}")))?;
    let a = a % p2;
    if a % p == 0 {
        return Err(Error::Invalid(format!("a = {a} is divisible by p = {p}")));
    }
    let Some(r0) = sqrt_mod_p(a % p, p) else {
        return Ok(Vec::new());
    };
    // Hensel lift: x -> x - (x² - a) · (2x)⁻¹ mod p²
    let inv = mod_inv((2 * r0) % p2, p2).expect("2x invertible mod p²");
    let x2 = mul_mod(r0, r0, p2);
    let diff = (x2 + p2 - a % p2) % p2;
    let x = (r0 + p2 - mul_mod(diff, inv, p2)) % p2;
    let mut roots = vec![x, p2 - x];
    roots.sort_unstable();
    roots.dedup();
    Ok(roots)
}

/// Whether `c` is a p-th power modulo a prime `q ≡ 1 (mod p)`:
/// `c^((q−1)/p) ≡ 1 (mod q)`.
pub fn is_pth_power_mod_q(c: u64, p: u64, q: u64) -> Result<bool> {
    if !is_prime(q) {
        return Err(Error::Invalid(format!("q = {q} is not prime")));
    }
    if (q - 1) % p != 0 {
        return Err(Error::Invalid(format!("q = {q} is not 1 mod p = {p}")));
    }
    Ok(mod_pow(c % q, (q - 1) / p, q) == 1)
}

/// All square roots of `d` modulo `p^k` (`p` prime), with `d` arbitrary.
///
/// Handles divisibility of `d` by `p`, including `p = 2`. Used by the
/// reduced-form counter, where moduli `4a` stay word-sized.
pub fn sqrt_mod_pk(d: u64, p: u64, k: u32) -> Vec<u64> {
    let m = p.pow(k);
    let d = d % m;
    if k == 0 {
        return vec![0];
    }
    if d == 0 {
        // x ≡ 0 mod p^ceil(k/2)
        let step = p.pow(k.div_ceil(2));
        return (0..p.pow(k / 2)).map(|i| i * step).collect();
    }
    let w = {
        let mut w = 0u32;
        let mut dd = d;
        while dd % p == 0 {
            dd /= p;
            w += 1;
        }
        w
    };
    if w > 0 {
        if w % 2 == 1 {
            return Vec::new();
        }
        // x = p^(w/2) · y with y² ≡ d/p^w (mod p^(k−w))
        let half = p.pow(w / 2);
        let inner = sqrt_mod_pk(d / p.pow(w), p, k - w);
        let inner_mod = p.pow(k - w);
        // each inner root y (mod p^(k−w)) gives x = p^(w/2)·y defined mod
        // p^(k − w/2); lift to p^k in p^(w/2) ways
        let lift_step = half * inner_mod;
        let mut out = Vec::new();
        for y in inner {
            let base = half * y;
            let mut x = base;
            while x < m {
                out.push(x);
                x += lift_step;
            }
        }
        out.sort_unstable();
        out.dedup();
        return out;
    }
    if p == 2 {
        return sqrt_mod_2k(d, k);
    }
    let Some(r) = sqrt_mod_p(d % p, p) else {
        return Vec::new();
    };
    // Hensel lift through increasing precision
    let mut x = r;
    let mut prec = 1u32;
    while prec < k {
        let next = prec * 2;
        let modulus = p.pow(next.min(k));
        let inv = mod_inv(mul_mod(2, x, modulus), modulus).expect("2x invertible");
        let fx = (mul_mod(x, x, modulus) + modulus - d % modulus) % modulus;
        x = (x + modulus - mul_mod(fx, inv, modulus)) % modulus;
        prec = next;
    }
    let mut out = vec![x % m, (m - x % m) % m];
    out.sort_unstable();
    out.dedup();
    out
}

/// Square roots of odd `d` modulo `2^k`.
fn sqrt_mod_2k(d: u64, k: u32) -> Vec<u64> {
    let m = 1u64 << k;
    let d = d % m;
    debug_assert!(d % 2 == 1);
    match k {
        1 => return vec![1],
        2 => {
            return if d % 4 == 1 { vec![1, 3] } else { Vec::new() };
        }
        _ => {}
    }
    if d % 8 != 1 {
        return Vec::new();
    }
    // lift a root from mod 8 upward: from x mod 2^j, either x or x + 2^(j−1)
    let mut x = 1u64;
    for j in 3..k {
        let next = 1u64 << (j + 1);
        if (x * x) % next != d % next {
            x += 1u64 << (j - 1);
        }
    }
    let mut out = vec![x % m, (m - x) % m, (x + (m >> 1)) % m, (m - x + (m >> 1)) % m];
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn factor_examples() {
        // 96059600 = 9801² − 1
        assert_eq!(
            factor(96_059_600),
            vec![(2, 4), (5, 2), (7, 2), (13, 2), (29, 1)]
        );
        assert_eq!(factor(2), vec![(2, 1)]);
        // trial-division oracle on a mid-size input, checked by re-multiplication
        let n = 1_000_000_000_039u64;
        let f = factor(n);
        let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
        assert_eq!(back, n);
        for &(p, _) in &f {
            assert!(is_prime(p));
        }
    }

    #[test]
    fn squarefree_core_examples() {
        assert_eq!(squarefree_core(45).unwrap(), SquareFreeCore { core: 5, r: 3 });
        assert_eq!(
            squarefree_core(96_059_600).unwrap(),
            SquareFreeCore { core: 29, r: 1820 }
        );
        assert_eq!(
            squarefree_core(-12).unwrap(),
            SquareFreeCore { core: -3, r: 2 }
        );
        assert!(squarefree_core(0).is_err());
    }

    #[test]
    fn sqrt_mod_p2_examples() {
        // -2 mod 9 = 7: roots {4, 5}
        assert_eq!(sqrt_mod_p2(7, 3).unwrap(), vec![4, 5]);
        assert_eq!(sqrt_mod_p2(2, 7).unwrap(), vec![10, 39]);
        assert_eq!(sqrt_mod_p2(2, 5).unwrap(), Vec::<u64>::new());
        assert!(sqrt_mod_p2(9, 3).is_err());
        assert!(sqrt_mod_p2(2, 4).is_err());
    }

    #[test]
    fn pth_power_examples() {
        assert!(is_pth_power_mod_q(1, 3, 7).unwrap());
        assert!(!is_pth_power_mod_q(2, 3, 7).unwrap());
        assert!(is_pth_power_mod_q(6, 3, 7).unwrap());
        assert!(is_pth_power_mod_q(1, 5, 11).unwrap());
        assert!(is_pth_power_mod_q(2, 3, 5).is_err());
    }

    #[test]
    fn big_factor_roundtrip() {
        let n = BigUint::parse_bytes(b"2626108489187673545580128968", 10).unwrap();
        let f = factor_big(&n, BIG_RHO_BUDGET).unwrap();
        let mut back = BigUint::one();
        for (p, e) in &f {
            assert!(is_prime_big(p));
            back *= p.pow(*e);
        }
        assert_eq!(back, n);
    }

    #[test]
    fn sqrt_mod_pk_brute() {
        for &(p, kmax) in &[(2u64, 8u32), (3, 5), (5, 4), (7, 3), (13, 2)] {
            for k in 1..=kmax {
                let m = p.pow(k);
                for d in 0..m {
                    let got = sqrt_mod_pk(d, p, k);
                    let want: Vec<u64> = (0..m).filter(|x| (x * x) % m == d).collect();
                    assert_eq!(got, want, "p={p} k={k} d={d}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn core_roundtrip(m in 2i128..1_000_000_000_000i128) {
            let c = squarefree_core(m).unwrap();
            prop_assert_eq!(c.core * (c.r as i128) * (c.r as i128), m);
            for p in [2i128, 3, 5, 7, 11, 13, 101, 997] {
                prop_assert!(c.core % (p * p) != 0);
            }
        }

        #[test]
        fn factor_roundtrip(n in 2u64..1_000_000_000_000u64) {
            let f = factor(n);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(back, n);
        }

        #[test]
        fn sqrt_mod_p2_pairs(a in 1u64..10_000, pi in 0usize..6) {
            let p = [3u64, 5, 7, 11, 13, 17][pi];
            if a % p != 0 {
                let roots = sqrt_mod_p2(a, p).unwrap();
                let p2 = p * p;
                for &t0 in &roots {
                    prop_assert_eq!(mul_mod(t0, t0, p2), a % p2);
                }
                if !roots.is_empty() {
                    prop_assert_eq!(roots.len(), 2);
                    prop_assert_eq!(roots[0] + roots[1], p2);
                }
            }
        }
    }

    #[test]
    fn squarefree_core_property_dense() {
        // every prime square up to 10³ must be divided out
        for m in [4i128, 8, 9, 12, 49 * 5, 997 * 997 * 3, 1_000_003] {
            let c = squarefree_core(m).unwrap();
            assert_eq!(c.core * (c.r as i128).pow(2), m);
            for p in sieve_primes(1000) {
                let p = p as i128;
                assert_ne!(c.core % (p * p), 0, "core {} not squarefree", c.core);
            }
        }
    }
}
