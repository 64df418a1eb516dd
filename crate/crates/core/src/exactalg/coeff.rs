use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Scalars of the coefficient rings: the integers or the rationals.
///
/// Everything else (the Bott element `z`, the `b_i`) is carried as extra
/// variables of the polynomial ring, so only these two scalar types exist.
pub trait Coefficient:
    Clone + PartialEq + Eq + Hash + Debug + Display + Zero + One + Send + Sync + 'static
{
    /// Short name used in diagnostics ("Z" or "Q").
    const NAME: &'static str;

    fn from_bigint(v: BigInt) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_bigint(BigInt::from(v))
    }

    /// `num / den`, if it lies in the ring.
    fn from_ratio(num: BigInt, den: BigInt) -> Option<Self>;

    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    fn try_inverse(&self) -> Option<Self>;

    fn to_rational(&self) -> BigRational;

    /// The value as an integer when it is one.
    fn to_integer(&self) -> Option<BigInt>;

    fn is_negative(&self) -> bool;
}

impl Coefficient for BigInt {
    const NAME: &'static str = "Z";

    fn from_bigint(v: BigInt) -> Self {
        v
    }

    fn from_ratio(num: BigInt, den: BigInt) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let (q, r) = num.div_rem(&den);
        r.is_zero().then_some(q)
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn neg_ref(&self) -> Self {
        -self
    }

    fn try_inverse(&self) -> Option<Self> {
        (self.abs().is_one()).then(|| self.clone())
    }

    fn to_rational(&self) -> BigRational {
        BigRational::from_integer(self.clone())
    }

    fn to_integer(&self) -> Option<BigInt> {
        Some(self.clone())
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

impl Coefficient for BigRational {
    const NAME: &'static str = "Q";

    fn from_bigint(v: BigInt) -> Self {
        BigRational::from_integer(v)
    }

    fn from_ratio(num: BigInt, den: BigInt) -> Option<Self> {
        (!den.is_zero()).then(|| BigRational::new(num, den))
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn neg_ref(&self) -> Self {
        -self
    }

    fn try_inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn to_rational(&self) -> BigRational {
        self.clone()
    }

    fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.numer().clone())
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}
