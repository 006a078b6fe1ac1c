//! Minimal dense polynomials over the integers, used for symbolic identity
//! checks on parametrized unit families.

use num_bigint::BigInt;
use num_traits::Zero;

/// Coefficients in ascending degree order, highest coefficient nonzero
/// (the zero polynomial is an empty vector).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(pub Vec<BigInt>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: BigInt) -> Self {
        let mut p = Poly(vec![c]);
        p.trim();
        p
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = Poly(coeffs);
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
    }

    pub fn degree(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.0.last()
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in rhs.0.iter().enumerate() {
            out[i] += c;
        }
        Poly::from_coeffs(out)
    }

    pub fn sub(&self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in rhs.0.iter().enumerate() {
            out[i] -= c;
        }
        Poly::from_coeffs(out)
    }

    pub fn mul(&self, rhs: &Poly) -> Poly {
        if self.0.is_empty() || rhs.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn is_constant(&self, c: &BigInt) -> bool {
        if c.is_zero() {
            self.0.is_empty()
        } else {
            self.0.len() == 1 && &self.0[0] == c
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> Poly {
        Poly::from_coeffs(v.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn basic_ops() {
        let a = p(&[1, 2]); // 1 + 2t
        let b = p(&[3, 0, 1]); // 3 + t²
        assert_eq!(a.mul(&b), p(&[3, 6, 1, 2]));
        assert_eq!(a.add(&b), p(&[4, 2, 1]));
        assert_eq!(b.sub(&b), Poly::zero());
        assert_eq!(a.eval(&BigInt::from(10)), BigInt::from(21));
        assert_eq!(b.degree(), Some(2));
    }
}
