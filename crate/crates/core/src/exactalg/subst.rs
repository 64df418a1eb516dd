use std::sync::Arc;

use num_traits::ToPrimitive;
use smallvec::SmallVec;

use super::{AlgebraError, Coefficient, Exponent, MPoly, Space};
use crate::intlat::IntMatrix;

impl<S: Coefficient> MPoly<S> {
    /// Inverse of a truncated series (or of a unit monomial).
    ///
    /// The part of series degree zero must be a unit monomial `u`; then
    /// `f^{-1} = u^{-1} * sum_i (-u^{-1} g)^i` with `g = f - u`, which is a
    /// finite sum under truncation.
    pub fn series_inverse(&self) -> Result<Self, AlgebraError> {
        if let Some(inv) = self.monomial_inverse() {
            return Ok(inv);
        }
        let space = self.space().clone();
        let Some(order) = space.trunc() else {
            return Err(AlgebraError::NotInvertible(self.to_string()));
        };
        let unit = self.filter_terms(|e| space.series_degree(e) == 0);
        let rest = self - &unit;
        let unit_inv =
            unit.monomial_inverse().ok_or_else(|| AlgebraError::NotInvertible(self.to_string()))?;
        let step = -&(&unit_inv * &rest);
        let mut acc = MPoly::one(&space);
        let mut power = MPoly::one(&space);
        for _ in 0..order {
            power = &power * &step;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        Ok(&unit_inv * &acc)
    }

    /// Ring homomorphism sending the `i`-th variable to `images[i]`, an
    /// element of `target`. Negative powers use the inverse of the image.
    pub fn substitute(&self, target: &Arc<Space>, images: &[MPoly<S>]) -> Result<Self, AlgebraError> {
        if images.len() != self.nvars() {
            return Err(AlgebraError::ArityMismatch { expected: self.nvars(), got: images.len() });
        }
        if images.iter().any(|m| m.space() != target) {
            return Err(AlgebraError::SpaceMismatch);
        }
        let n = self.nvars();
        let mut pos: Vec<Vec<MPoly<S>>> = (0..n).map(|_| vec![MPoly::one(target)]).collect();
        let mut neg: Vec<Vec<MPoly<S>>> = (0..n).map(|_| vec![MPoly::one(target)]).collect();
        let mut out = MPoly::zero(target);
        for (exp, c) in self.terms() {
            let mut term = MPoly::constant(target, c.clone());
            for (i, &e) in exp.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let k = e.unsigned_abs() as usize;
                let table = if e > 0 { &mut pos[i] } else { &mut neg[i] };
                if table.len() <= k {
                    let base = if e > 0 {
                        images[i].clone()
                    } else {
                        images[i].series_inverse()?
                    };
                    while table.len() <= k {
                        let next = table.last().expect("nonempty") * &base;
                        table.push(next);
                    }
                }
                term = &term * &table[k];
                if term.is_zero() {
                    break;
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Substitution where each variable's image is produced by `image`;
    /// returning `None` maps the variable to the variable of the same name in
    /// `target`.
    pub fn substitute_with(
        &self,
        target: &Arc<Space>,
        mut image: impl FnMut(usize) -> Option<MPoly<S>>,
    ) -> Result<Self, AlgebraError> {
        let mut images = Vec::with_capacity(self.nvars());
        for i in 0..self.nvars() {
            match image(i) {
                Some(m) => images.push(m),
                None => images.push(MPoly::var_named(target, &self.space().var(i).name)?),
            }
        }
        self.substitute(target, &images)
    }

    /// Character projection: the monomial `v^J` in the first `pi.cols()`
    /// variables goes to `t^{pi J}`; later variables are carried over to the
    /// trailing variables of `target` unchanged.
    pub fn exponent_substitution(&self, pi: &IntMatrix, target: &Arc<Space>) -> Result<Self, AlgebraError> {
        let n = pi.cols();
        let d = pi.rows();
        let extra = self.nvars().checked_sub(n).ok_or(AlgebraError::ArityMismatch {
            expected: n,
            got: self.nvars(),
        })?;
        if target.nvars() != d + extra {
            return Err(AlgebraError::ArityMismatch { expected: d + extra, got: target.nvars() });
        }
        let entries: Vec<Vec<i64>> = (0..d)
            .map(|k| (0..n).map(|j| pi[(k, j)].to_i64().expect("projection entry exceeds i64")).collect())
            .collect();
        let mut out = MPoly::zero(target);
        for (exp, c) in self.terms() {
            let mut ne: Exponent = SmallVec::from_elem(0, d + extra);
            for (k, row) in entries.iter().enumerate() {
                let v: i64 = row.iter().zip(exp.iter()).map(|(a, &b)| a * b as i64).sum();
                ne[k] = i32::try_from(v).map_err(|_| AlgebraError::ExponentOverflow)?;
            }
            for j in 0..extra {
                ne[d + j] = exp[n + j];
            }
            target.check_exponent(&ne)?;
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    /// Linear change of coordinates `x_i -> sum_k a[i][k] t_k` on the first
    /// `a.rows()` variables; later variables are carried over unchanged.
    pub fn linear_substitution(&self, a: &IntMatrix, target: &Arc<Space>) -> Result<Self, AlgebraError> {
        let n = a.rows();
        let d = a.cols();
        let extra = self.nvars().checked_sub(n).ok_or(AlgebraError::ArityMismatch {
            expected: n,
            got: self.nvars(),
        })?;
        if target.nvars() != d + extra {
            return Err(AlgebraError::ArityMismatch { expected: d + extra, got: target.nvars() });
        }
        let mut images = Vec::with_capacity(n + extra);
        for i in 0..n {
            let mut img = MPoly::zero(target);
            for k in 0..d {
                let c = S::from_bigint(a[(i, k)].clone());
                img = &img + &MPoly::var(target, k).scale(&c);
            }
            images.push(img);
        }
        for j in 0..extra {
            images.push(MPoly::var(target, d + j));
        }
        self.substitute(target, &images)
    }
}
