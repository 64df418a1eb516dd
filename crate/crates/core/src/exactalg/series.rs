use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use super::{AlgebraError, Coefficient, MPoly, Space};

/// Whether `f` has no terms of series degree zero.
pub fn has_zero_constant_term<S: Coefficient>(f: &MPoly<S>) -> bool {
    let space = f.space();
    f.terms().all(|(e, _)| space.series_degree(e) > 0)
}

/// `f(g)`: substitutes `g` for the series variable `var` of `f`. Every other
/// variable of `f` goes to the variable of the same name in `g`'s space.
pub fn compose<S: Coefficient>(f: &MPoly<S>, var: usize, g: &MPoly<S>) -> Result<MPoly<S>, AlgebraError> {
    if !f.space().is_series_var(var) {
        return Err(AlgebraError::NotSeriesVariable(f.space().var(var).name.clone()));
    }
    if !has_zero_constant_term(g) {
        return Err(AlgebraError::NonzeroConstantTerm);
    }
    let target = g.space().clone();
    f.substitute_with(&target, |i| (i == var).then(|| g.clone()))
}

/// Compositional inverse in the series variable `var`: returns `g` with
/// `f(g(t)) = t` up to the truncation order.
///
/// `f` must have no constant term and a unit scalar as linear coefficient.
pub fn reversion<S: Coefficient>(f: &MPoly<S>, var: usize) -> Result<MPoly<S>, AlgebraError> {
    let space = f.space().clone();
    if !space.is_series_var(var) {
        return Err(AlgebraError::NotSeriesVariable(space.var(var).name.clone()));
    }
    if !has_zero_constant_term(f) {
        return Err(AlgebraError::NonzeroConstantTerm);
    }
    let order = space.trunc().expect("series space has an order");
    let t = MPoly::var(&space, var);
    let mut lin_exp = vec![0; space.nvars()];
    lin_exp[var] = 1;
    let lin = f.coefficient(&lin_exp);
    let lin_inv = lin.try_inverse().ok_or(AlgebraError::VanishingLinearTerm)?;
    let higher = f - &t.scale(&lin);
    let mut g = t.scale(&lin_inv);
    for _ in 1..order {
        let h = compose(&higher, var, &g)?;
        g = (&t - &h).scale(&lin_inv);
    }
    Ok(g)
}

/// `exp(arg)` truncated; `arg` must have no constant term.
pub fn exp_series<S: Coefficient>(arg: &MPoly<S>) -> Result<MPoly<S>, AlgebraError> {
    if !has_zero_constant_term(arg) {
        return Err(AlgebraError::NonzeroConstantTerm);
    }
    let space = arg.space().clone();
    let order = space.trunc().ok_or(AlgebraError::MissingTruncation)?;
    let mut acc = MPoly::one(&space);
    let mut power = MPoly::one(&space);
    let mut factorial = BigInt::one();
    for k in 1..=order {
        power = &power * arg;
        if power.is_zero() {
            break;
        }
        factorial *= k;
        let c = S::from_ratio(BigInt::one(), factorial.clone())
            .ok_or_else(|| AlgebraError::Parse(format!("1/{factorial} is not in {}", S::NAME)))?;
        acc = &acc + &power.scale(&c);
    }
    Ok(acc)
}

/// Space with a single series variable `t` of degree 2 followed by `params`.
pub fn univariate_space(t: &str, order: u32, params: &Space) -> Arc<Space> {
    Space::series(&[t], order).join(params).expect("disjoint variable names")
}
