//! Exact group law on an elliptic curve in long Weierstrass form
//! y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6 over ℚ.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::{Error, Result};

/// A nonsingular long-Weierstrass curve over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    pub a1: BigRational,
    pub a2: BigRational,
    pub a3: BigRational,
    pub a4: BigRational,
    pub a6: BigRational,
}

/// A rational point: affine coordinates in lowest terms, or the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Point {
    Infinity,
    Affine { x: BigRational, y: BigRational },
}

impl Point {
    pub fn affine(x: BigRational, y: BigRational) -> Self {
        Point::Affine { x, y }
    }

    pub fn from_integers(x: i64, y: i64) -> Self {
        Point::Affine {
            x: BigRational::from_integer(BigInt::from(x)),
            y: BigRational::from_integer(BigInt::from(y)),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }
}

impl Curve {
    pub fn new(
        a1: BigRational,
        a2: BigRational,
        a3: BigRational,
        a4: BigRational,
        a6: BigRational,
    ) -> Result<Self> {
        let curve = Curve { a1, a2, a3, a4, a6 };
        if curve.discriminant().is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(curve)
    }

    pub fn from_integers(a1: i64, a2: i64, a3: i64, a4: i64, a6: i64) -> Result<Self> {
        let r = |v: i64| BigRational::from_integer(BigInt::from(v));
        Curve::new(r(a1), r(a2), r(a3), r(a4), r(a6))
    }

    /// b2, b4, b6, b8 covariants of the long Weierstrass model.
    fn b_invariants(&self) -> (BigRational, BigRational, BigRational, BigRational) {
        let four = BigRational::from_integer(BigInt::from(4));
        let two = BigRational::from_integer(BigInt::from(2));
        let b2 = &self.a1 * &self.a1 + &four * &self.a2;
        let b4 = &two * &self.a4 + &self.a1 * &self.a3;
        let b6 = &self.a3 * &self.a3 + &four * &self.a6;
        let b8 = &self.a1 * &self.a1 * &self.a6 + &four * &self.a2 * &self.a6
            - &self.a1 * &self.a3 * &self.a4
            + &self.a2 * &self.a3 * &self.a3
            - &self.a4 * &self.a4;
        (b2, b4, b6, b8)
    }

    pub fn discriminant(&self) -> BigRational {
        let (b2, b4, b6, b8) = self.b_invariants();
        let n = |v: i64| BigRational::from_integer(BigInt::from(v));
        -(&b2 * &b2) * &b8 - n(8) * &b4 * &b4 * &b4 - n(27) * &b6 * &b6 + n(9) * &b2 * &b4 * &b6
    }

    /// Primes dividing the numerator of the discriminant (bad reduction, for
    /// integral models). The rank-of-apparition bound r_p ≤ p+1+2√p relies on
    /// Hasse's theorem and is only guaranteed at primes of good reduction.
    pub fn bad_reduction_primes(&self, table: &crate::arith::PrimeTable) -> Result<Vec<u64>> {
        let disc = self.discriminant();
        let numer = disc.numer().abs();
        let n: u64 = numer
            .clone()
            .try_into()
            .map_err(|_| Error::Capacity("discriminant numerator exceeds u64".into()))?;
        Ok(table.factor(n)?.into_iter().map(|(p, _)| p).collect())
    }

    pub fn contains(&self, point: &Point) -> bool {
        match point {
            Point::Infinity => true,
            Point::Affine { x, y } => {
                let lhs = y * y + &self.a1 * x * y + &self.a3 * y;
                let rhs = x * x * x + &self.a2 * x * x + &self.a4 * x + &self.a6;
                lhs == rhs
            }
        }
    }

    pub fn negate(&self, point: &Point) -> Point {
        match point {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => Point::Affine {
                x: x.clone(),
                y: -y - &self.a1 * x - &self.a3,
            },
        }
    }

    pub fn add(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1) = match p {
            Point::Infinity => return q.clone(),
            Point::Affine { x, y } => (x, y),
        };
        let (x2, y2) = match q {
            Point::Infinity => return p.clone(),
            Point::Affine { x, y } => (x, y),
        };
        let (lambda, nu) = if x1 == x2 {
            // q = -p: vertical line.
            if *y2 == -y1 - &self.a1 * x1 - &self.a3 {
                return Point::Infinity;
            }
            // Tangent line at p.
            let three = BigRational::from_integer(BigInt::from(3));
            let two = BigRational::from_integer(BigInt::from(2));
            let denom = &two * y1 + &self.a1 * x1 + &self.a3;
            let lambda =
                (&three * x1 * x1 + &two * &self.a2 * x1 + &self.a4 - &self.a1 * y1) / &denom;
            let nu = (-(x1 * x1 * x1) + &self.a4 * x1 + &two * &self.a6 - &self.a3 * y1) / &denom;
            (lambda, nu)
        } else {
            let lambda = (y2 - y1) / (x2 - x1);
            let nu = y1 - &lambda * x1;
            (lambda, nu)
        };
        let x3 = &lambda * &lambda + &self.a1 * &lambda - &self.a2 - x1 - x2;
        let y3 = -(&lambda + &self.a1) * &x3 - &nu - &self.a3;
        Point::Affine { x: x3, y: y3 }
    }

    /// nP by left-to-right double-and-add over exact rationals.
    pub fn scalar_mul(&self, n: u64, point: &Point) -> Point {
        assert!(n >= 1, "scalar_mul expects n >= 1");
        let mut acc = point.clone();
        let bits = 64 - n.leading_zeros();
        for i in (0..bits - 1).rev() {
            acc = self.add(&acc, &acc);
            if n >> i & 1 == 1 {
                acc = self.add(&acc, point);
            }
        }
        acc
    }

    /// Certify infinite order: by Mazur's theorem a rational torsion point has
    /// order at most 12, so nP ≠ O for n = 1..=12 suffices.
    pub fn assert_infinite_order(&self, point: &Point) -> Result<bool> {
        if point.is_infinity() {
            return Err(Error::UndefinedInput("order of the identity".into()));
        }
        let mut acc = point.clone();
        for _ in 2..=12 {
            acc = self.add(&acc, point);
            if acc.is_infinity() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
