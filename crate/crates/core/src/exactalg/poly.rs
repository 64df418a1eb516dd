use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use smallvec::SmallVec;

use super::{AlgebraError, Coefficient, Space};

pub type Exponent = SmallVec<[i32; 8]>;

/// A sparse multivariate element: Laurent polynomial, polynomial or truncated
/// power series depending on the variable kinds of its [`Space`].
///
/// No zero coefficients are stored and every stored exponent respects the
/// truncation order of the space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MPoly<S> {
    space: Arc<Space>,
    terms: BTreeMap<Exponent, S>,
}

/// Laurent polynomial (e.g. in the characters `a1..an` and the Bott element `z`).
pub type LaurentPoly<S> = MPoly<S>;
/// Polynomial in degree-2 generators.
pub type Poly<S> = MPoly<S>;
/// Power series truncated at a total degree in the series variables.
pub type TruncSeries<S> = MPoly<S>;

impl<S: Coefficient> MPoly<S> {
    pub fn zero(space: &Arc<Space>) -> Self {
        MPoly { space: space.clone(), terms: BTreeMap::new() }
    }

    pub fn one(space: &Arc<Space>) -> Self {
        Self::constant(space, S::one())
    }

    pub fn constant(space: &Arc<Space>, c: S) -> Self {
        let exp: Exponent = SmallVec::from_elem(0, space.nvars());
        Self::monomial_unchecked(space, exp, c)
    }

    pub fn from_i64(space: &Arc<Space>, c: i64) -> Self {
        Self::constant(space, S::from_i64(c))
    }

    /// The `i`-th variable.
    pub fn var(space: &Arc<Space>, i: usize) -> Self {
        let mut exp: Exponent = SmallVec::from_elem(0, space.nvars());
        exp[i] = 1;
        Self::monomial_unchecked(space, exp, S::one())
    }

    pub fn var_named(space: &Arc<Space>, name: &str) -> Result<Self, AlgebraError> {
        let i = space.index_of(name).ok_or_else(|| AlgebraError::UnknownVariable(name.into()))?;
        Ok(Self::var(space, i))
    }

    pub fn monomial(space: &Arc<Space>, exp: &[i32], c: S) -> Result<Self, AlgebraError> {
        space.check_exponent(exp)?;
        Ok(Self::monomial_unchecked(space, exp.into(), c))
    }

    fn monomial_unchecked(space: &Arc<Space>, exp: Exponent, c: S) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() && space.keeps(&exp) {
            terms.insert(exp, c);
        }
        MPoly { space: space.clone(), terms }
    }

    pub fn from_terms<I>(space: &Arc<Space>, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Exponent, S)>,
    {
        let mut out = Self::zero(space);
        for (exp, c) in terms {
            space.check_exponent(&exp)?;
            out.add_term(exp, c);
        }
        Ok(out)
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn nvars(&self) -> usize {
        self.space.nvars()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exp: &[i32]) -> S {
        self.terms.get(exp).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of the zero exponent.
    pub fn constant_term(&self) -> S {
        let exp: Exponent = SmallVec::from_elem(0, self.nvars());
        self.coefficient(&exp)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// Adds `c * monomial(exp)` in place, honouring truncation.
    pub fn add_term(&mut self, exp: Exponent, c: S) {
        if c.is_zero() || !self.space.keeps(&exp) {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add_ref(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_same_space(&self, other: &Self) -> Result<(), AlgebraError> {
        if Arc::ptr_eq(&self.space, &other.space) || self.space == other.space {
            Ok(())
        } else {
            Err(AlgebraError::SpaceMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_same_space(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_same_space(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.neg_ref());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_same_space(other)?;
        let mut out = Self::zero(&self.space);
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        let trunc = self.space.trunc().map(|d| d as i64);
        let lhs: Vec<(i64, &Exponent, &S)> =
            self.terms.iter().map(|(e, c)| (self.space.series_degree(e), e, c)).collect();
        let rhs: Vec<(i64, &Exponent, &S)> =
            other.terms.iter().map(|(e, c)| (self.space.series_degree(e), e, c)).collect();
        for (da, ea, ca) in &lhs {
            for (db, eb, cb) in &rhs {
                if trunc.is_some_and(|d| da + db > d) {
                    continue;
                }
                let exp: Exponent = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                out.add_term(exp, ca.mul_ref(cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(&self.space);
        if c.is_zero() {
            return out;
        }
        for (e, v) in &self.terms {
            let p = v.mul_ref(c);
            if !p.is_zero() {
                out.terms.insert(e.clone(), p);
            }
        }
        out
    }

    /// Multiplies by a monomial; cheaper than a general product.
    pub fn shift(&self, exp: &[i32]) -> Result<Self, AlgebraError> {
        let mut out = Self::zero(&self.space);
        for (e, c) in &self.terms {
            let ne: Exponent = e.iter().zip(exp).map(|(a, b)| a + b).collect();
            self.space.check_exponent(&ne)?;
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(&self.space);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// The inverse when `self` is a monomial with a unit coefficient.
    pub fn monomial_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next()?;
        let inv = c.try_inverse()?;
        let ne: Exponent = e.iter().map(|x| -x).collect();
        self.space.check_exponent(&ne).ok()?;
        Some(Self::monomial_unchecked(&self.space, ne, inv))
    }

    /// Maximal total degree of the stored exponents, over all variables.
    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|e| e.iter().map(|&x| x as i64).sum()).max()
    }

    /// Minimal total degree of the stored exponents.
    pub fn low_degree(&self) -> Option<i64> {
        self.terms.keys().map(|e| e.iter().map(|&x| x as i64).sum()).min()
    }

    /// Largest absolute exponent of any variable.
    pub fn max_abs_exponent(&self) -> i32 {
        self.terms.keys().flat_map(|e| e.iter().map(|x| x.abs())).max().unwrap_or(0)
    }

    /// Terms whose exponents satisfy `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&[i32]) -> bool) -> Self {
        MPoly {
            space: self.space.clone(),
            terms: self.terms.iter().filter(|(e, _)| keep(e)).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    /// Reinterprets the element in another space by matching variable names.
    /// Variables missing from the target must not occur.
    pub fn embed(&self, target: &Arc<Space>) -> Result<Self, AlgebraError> {
        let map: Vec<Option<usize>> =
            self.space.vars().iter().map(|v| target.index_of(&v.name)).collect();
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut ne: Exponent = SmallVec::from_elem(0, target.nvars());
            for (i, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => ne[j] = x,
                    None => {
                        return Err(AlgebraError::UnknownVariable(self.space.var(i).name.clone()))
                    }
                }
            }
            target.check_exponent(&ne)?;
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    /// Same element with a different truncation order (terms above it dropped).
    pub fn retruncate(&self, order: u32) -> Self {
        let space = self.space.with_trunc(order);
        let mut out = Self::zero(&space);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    /// Maps every coefficient into another scalar ring.
    pub fn map_coefficients<T: Coefficient>(&self, f: impl Fn(&S) -> T) -> MPoly<T> {
        let mut out = MPoly::<T>::zero(&self.space);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Coefficients as integers, when all of them are integral.
    pub fn to_integral(&self) -> Option<MPoly<num_bigint::BigInt>> {
        let mut out = MPoly::zero(&self.space);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.to_integer()?);
        }
        Some(out)
    }

    /// Canonical ordering used for display: descending total degree, then
    /// descending lexicographic exponent.
    pub fn sorted_terms(&self) -> Vec<(&Exponent, &S)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: i64 = a.iter().map(|&x| x as i64).sum();
            let db: i64 = b.iter().map(|&x| x as i64).sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }
}

impl<S: Coefficient> fmt::Display for MPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (exp, c)) in self.sorted_terms().into_iter().enumerate() {
            let negative = c.is_negative();
            let abs = if negative { c.neg_ref() } else { c.clone() };
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = exp.iter().all(|&x| x == 0);
            if !abs.is_one() || is_const {
                factors.push(abs.to_string());
            }
            for (i, &x) in exp.iter().enumerate() {
                let name = &self.space.var(i).name;
                match x {
                    0 => {}
                    1 => factors.push(name.clone()),
                    _ => factors.push(format!("{name}^{x}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl<S: Coefficient> fmt::Debug for MPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}

impl<S: Coefficient> Add for &MPoly<S> {
    type Output = MPoly<S>;
    fn add(self, rhs: &MPoly<S>) -> MPoly<S> {
        self.checked_add(rhs).expect("operands live in different spaces")
    }
}

impl<S: Coefficient> Sub for &MPoly<S> {
    type Output = MPoly<S>;
    fn sub(self, rhs: &MPoly<S>) -> MPoly<S> {
        self.checked_sub(rhs).expect("operands live in different spaces")
    }
}

impl<S: Coefficient> Mul for &MPoly<S> {
    type Output = MPoly<S>;
    fn mul(self, rhs: &MPoly<S>) -> MPoly<S> {
        self.checked_mul(rhs).expect("operands live in different spaces")
    }
}

impl<S: Coefficient> Neg for &MPoly<S> {
    type Output = MPoly<S>;
    fn neg(self) -> MPoly<S> {
        MPoly {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg_ref())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<S: Coefficient> $tr for MPoly<S> {
            type Output = MPoly<S>;
            fn $m(self, rhs: MPoly<S>) -> MPoly<S> {
                (&self).$m(&rhs)
            }
        }
        impl<S: Coefficient> $tr<&MPoly<S>> for MPoly<S> {
            type Output = MPoly<S>;
            fn $m(self, rhs: &MPoly<S>) -> MPoly<S> {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<S: Coefficient> Neg for MPoly<S> {
    type Output = MPoly<S>;
    fn neg(self) -> MPoly<S> {
        -&self
    }
}
