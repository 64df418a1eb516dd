//! Completion, Chern and Boardman transformations, and formal group law
//! arithmetic through the exponential `B(t) = t + b1 t^2 + b2 t^3 + ...`.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::exactalg::series::{compose, exp_series, has_zero_constant_term, reversion};
use crate::exactalg::{AlgebraError, Coefficient, MPoly, Rational, Space, VarKind, Variable};
use crate::piecewise::{PiecewiseElement, PiecewiseError, Theory};

/// `B(arg) = arg + sum_i b_i arg^{i+1}`, using every `b1, b2, ...` present in
/// the space of `arg`. Terms beyond the truncation order vanish.
pub fn b_series<S: Coefficient>(arg: &MPoly<S>) -> Result<MPoly<S>, AlgebraError> {
    if !has_zero_constant_term(arg) {
        return Err(AlgebraError::NonzeroConstantTerm);
    }
    let space = arg.space().clone();
    let mut acc = arg.clone();
    let mut power = arg.clone();
    let mut i = 1;
    while let Some(b) = space.index_of(&format!("b{i}")) {
        power = &power * arg;
        if power.is_zero() {
            break;
        }
        acc = &acc + &(&power * &MPoly::var(&space, b));
        i += 1;
    }
    Ok(acc)
}

/// Ring of `Z[b1..bD]` polynomials; `b_i` has degree `-2i`.
fn b_parameters(d: u32) -> Vec<Variable> {
    (1..=d as i32).map(|i| Variable::new(format!("b{i}"), VarKind::Polynomial, -2 * i)).collect()
}

/// Truncated power series in the given series variables over `Z[b1..bD]`,
/// truncated at order `d`.
pub fn b_space(series_vars: &[&str], d: u32) -> Arc<Space> {
    let mut vars: Vec<Variable> = series_vars.iter().map(|v| Variable::new(*v, VarKind::Series, 2)).collect();
    vars.extend(b_parameters(d));
    Space::new(vars, Some(d)).expect("distinct names")
}

/// The universal exponential series over `Z[b1..bD]`, truncated at `D`, and
/// the formal group law it induces on the additive group.
#[derive(Clone, Debug)]
pub struct BSeries {
    order: u32,
    series: MPoly<BigInt>,
    inverse: MPoly<BigInt>,
}

impl BSeries {
    pub fn new(order: u32) -> Self {
        let space = b_space(&["t"], order);
        let t = MPoly::var(&space, 0);
        let series = b_series(&t).expect("t has no constant term");
        let inverse = reversion(&series, 0).expect("B has unit linear term");
        BSeries { order, series, inverse }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `B(t)` in the space `Z[b1..bD][[t]]`.
    pub fn series(&self) -> &MPoly<BigInt> {
        &self.series
    }

    /// `B^{-1}(t)`.
    pub fn inverse(&self) -> &MPoly<BigInt> {
        &self.inverse
    }

    /// `B(X)`; `X` must live in a space containing `b1..bD` by name.
    pub fn apply(&self, x: &MPoly<BigInt>) -> Result<MPoly<BigInt>, AlgebraError> {
        compose(&self.series, 0, x)
    }

    pub fn apply_inverse(&self, x: &MPoly<BigInt>) -> Result<MPoly<BigInt>, AlgebraError> {
        compose(&self.inverse, 0, x)
    }

    /// `F(X, Y) = B(B^{-1}(X) + B^{-1}(Y))`.
    pub fn fgl_sum(&self, x: &MPoly<BigInt>, y: &MPoly<BigInt>) -> Result<MPoly<BigInt>, AlgebraError> {
        let s = self.apply_inverse(x)?.checked_add(&self.apply_inverse(y)?)?;
        self.apply(&s)
    }

    /// `[m](X) = B(m B^{-1}(X))`.
    pub fn fgl_mult(&self, m: i64, x: &MPoly<BigInt>) -> Result<MPoly<BigInt>, AlgebraError> {
        let s = self.apply_inverse(x)?.scale(&BigInt::from(m));
        self.apply(&s)
    }
}

/// `B(w1 x1 + ... + wn xn)` in `Z[b1..bD][[x1..xn]]`: the image of the
/// cobordism Euler class `[w1](u1) +_F ... +_F [wn](un)`.
pub fn borel_mu_euler(w: &[i64], order: u32) -> MPoly<BigInt> {
    let space = Theory::BorelMU { trunc: order }.ambient_space(w.len());
    let mut ell = MPoly::zero(&space);
    for (j, &c) in w.iter().enumerate() {
        ell = &ell + &MPoly::var(&space, j).scale(&BigInt::from(c));
    }
    b_series(&ell).expect("linear forms have no constant term")
}

/// `a_j -> 1 - g_j` on a single ambient element of the K theory.
pub fn complete_k_element(
    f: &MPoly<BigInt>,
    n: usize,
    order: u32,
) -> Result<MPoly<BigInt>, AlgebraError> {
    let target = Theory::BorelK { trunc: order }.ambient_space(n);
    let one = MPoly::one(&target);
    f.substitute_with(&target, |j| (j < n).then(|| &one - &MPoly::var(&target, j)))
}

/// `g_j -> 1 - exp(z x_j)` on a single ambient element of the BorelK theory.
pub fn chern_element(f: &MPoly<BigInt>, n: usize, order: u32) -> Result<MPoly<Rational>, AlgebraError> {
    let target = Theory::HR { trunc: order }.ambient_space(n);
    let z = MPoly::<Rational>::var_named(&target, "z")?;
    let one = MPoly::one(&target);
    let mut images = Vec::with_capacity(n);
    for j in 0..n {
        images.push(&one - &exp_series(&(&z * &MPoly::var(&target, j)))?);
    }
    let fq = f.map_coefficients(|c| Rational::from_integer(c.clone()));
    fq.substitute_with(&target, |j| (j < n).then(|| images[j].clone()))
}

/// `u_j -> B(x_j)` on a single ambient element of the MUu theory.
pub fn boardman_element(f: &MPoly<BigInt>, n: usize, order: u32) -> Result<MPoly<BigInt>, AlgebraError> {
    let target = Theory::BorelMU { trunc: order }.ambient_space(n);
    let mut images = Vec::with_capacity(n);
    for j in 0..n {
        images.push(b_series(&MPoly::var(&target, j))?);
    }
    f.substitute_with(&target, |j| (j < n).then(|| images[j].clone()))
}

fn expect_theory(f: Theory, tag: &str) -> Result<(), PiecewiseError> {
    if f.tag() != tag {
        return Err(PiecewiseError::Unsupported(format!("expected a {tag} element, got {f}")));
    }
    Ok(())
}

/// Completion at the augmentation ideal, conewise `a_j -> 1 - g_j`.
pub fn complete_k(
    f: &PiecewiseElement<BigInt>,
    order: u32,
) -> Result<PiecewiseElement<BigInt>, PiecewiseError> {
    expect_theory(f.theory(), "K")?;
    let n = f.fan().ambient_dim();
    f.transform(Theory::BorelK { trunc: order }, |c| complete_k_element(c, n, order))
}

/// Chern transformation, conewise `g_j -> 1 - exp(z x_j)`.
pub fn chern(f: &PiecewiseElement<BigInt>) -> Result<PiecewiseElement<Rational>, PiecewiseError> {
    expect_theory(f.theory(), "BorelK")?;
    let order = f.theory().trunc().expect("series theory");
    let n = f.fan().ambient_dim();
    f.transform(Theory::HR { trunc: order }, |c| chern_element(c, n, order))
}

/// Boardman transformation, conewise `u_j -> B(x_j)`.
pub fn boardman(f: &PiecewiseElement<BigInt>) -> Result<PiecewiseElement<BigInt>, PiecewiseError> {
    expect_theory(f.theory(), "MUu")?;
    let order = f.theory().trunc().expect("series theory");
    let n = f.fan().ambient_dim();
    f.transform(Theory::BorelMU { trunc: order }, |c| boardman_element(c, n, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::series::univariate_space;
    use proptest::prelude::*;

    type Z = BigInt;

    fn p(space: &Arc<Space>, s: &str) -> MPoly<Z> {
        MPoly::parse(space, s).unwrap()
    }

    #[test]
    fn b_series_inverse_to_order_three() {
        let b = BSeries::new(3);
        let sp = b.series().space().clone();
        assert_eq!(b.series(), &p(&sp, "t + b1*t^2 + b2*t^3"));
        assert_eq!(b.inverse(), &p(&sp, "t - b1*t^2 + 2*b1^2*t^3 - b2*t^3"));
    }

    #[test]
    fn fgl_small_cases() {
        let b = BSeries::new(2);
        let sp = b_space(&["t"], 2);
        let t = MPoly::var(&sp, 0);
        assert_eq!(b.fgl_sum(&t, &MPoly::zero(&sp)).unwrap(), t);
        // B(2 B^{-1}(t)) = 2(t - b1 t^2) + b1 (2t)^2
        assert_eq!(b.fgl_sum(&t, &t).unwrap(), p(&sp, "2*t + 2*b1*t^2"));
        let inv = b.fgl_mult(-1, &t).unwrap();
        assert!(b.fgl_sum(&t, &inv).unwrap().is_zero());
        assert!(b.fgl_sum(&MPoly::one(&sp), &t).is_err());
    }

    #[test]
    fn fgl_axioms_through_order_five() {
        for d in 1..=5 {
            let b = BSeries::new(d);
            let sp = b_space(&["X", "Y", "W"], d);
            let (x, y, w) = (MPoly::var(&sp, 0), MPoly::var(&sp, 1), MPoly::var(&sp, 2));
            let xy = b.fgl_sum(&x, &y).unwrap();
            assert_eq!(xy, b.fgl_sum(&y, &x).unwrap(), "order {d}");
            let left = b.fgl_sum(&xy, &w).unwrap();
            let right = b.fgl_sum(&x, &b.fgl_sum(&y, &w).unwrap()).unwrap();
            assert_eq!(left, right, "order {d}");
            assert_eq!(b.fgl_mult(2, &x).unwrap(), b.fgl_sum(&x, &x).unwrap());
        }
    }

    #[test]
    fn euler_classes() {
        let e = borel_mu_euler(&[0, 1], 3);
        let sp = e.space().clone();
        assert_eq!(e, p(&sp, "x2 + b1*x2^2 + b2*x2^3"));
        assert!(borel_mu_euler(&[0, 0], 3).is_zero());
        let e = borel_mu_euler(&[2, -1], 2);
        let sp = e.space().clone();
        assert_eq!(e, p(&sp, "(2*x1 - x2) + b1*(2*x1 - x2)^2"));
    }

    #[test]
    fn euler_class_is_linear_times_unit() {
        let e = borel_mu_euler(&[2, -1], 5);
        let sp = e.space().clone();
        let ell = p(&sp, "2*x1 - x2");
        // B(l) = l * (1 + b1 l + b2 l^2 + ...)
        let mut unit = MPoly::one(&sp);
        let mut pow = MPoly::one(&sp);
        for i in 1..=5 {
            pow = &pow * &ell;
            unit = &unit + &(&pow * &MPoly::var_named(&sp, &format!("b{i}")).unwrap());
        }
        assert_eq!(&ell * &unit, e);
        assert_eq!(&e * &unit.series_inverse().unwrap(), ell);
    }

    #[test]
    fn completion_of_a_unit() {
        let sp = Theory::K.ambient_space(2);
        let a = p(&sp, "a1");
        let g = complete_k_element(&a, 2, 3).unwrap();
        assert_eq!(g, p(g.space(), "1 - g1"));
        let inv = complete_k_element(&p(&sp, "a1^-1"), 2, 3).unwrap();
        assert_eq!(inv, p(inv.space(), "1 + g1 + g1^2 + g1^3"));
        let e = complete_k_element(&p(&sp, "1 - a1^2"), 2, 3).unwrap();
        assert_eq!(e, p(e.space(), "2*g1 - g1^2"));
        assert_eq!(complete_k_element(&p(&sp, "1"), 2, 3).unwrap(), MPoly::one(e.space()));
    }

    #[test]
    fn chern_of_gamma() {
        let sp = Theory::BorelK { trunc: 3 }.ambient_space(1);
        let c = chern_element(&p(&sp, "g1"), 1, 3).unwrap();
        let expected: MPoly<Rational> =
            MPoly::parse(c.space(), "-z*x1 - 1/2*z^2*x1^2 - 1/6*z^3*x1^3").unwrap();
        assert_eq!(c, expected);
        assert!(chern_element(&MPoly::zero(&sp), 1, 3).unwrap().is_zero());
    }

    #[test]
    fn chern_completion_of_alpha_is_exponential() {
        let sp = Theory::K.ambient_space(2);
        for (text, sign) in [("a2", 1), ("a2^-1", -1)] {
            let g = complete_k_element(&p(&sp, text), 2, 4).unwrap();
            let c = chern_element(&g, 2, 4).unwrap();
            let arg: MPoly<Rational> = MPoly::parse(c.space(), &format!("{sign}*z*x2")).unwrap();
            assert_eq!(c, exp_series(&arg).unwrap());
        }
    }

    #[test]
    fn boardman_of_u() {
        let sp = Theory::MUu { trunc: 3 }.ambient_space(2);
        let b = boardman_element(&p(&sp, "u1"), 2, 3).unwrap();
        assert_eq!(b, p(b.space(), "x1 + b1*x1^2 + b2*x1^3"));
        let prod = boardman_element(&p(&sp, "u1*u2"), 2, 3).unwrap();
        let expected = &boardman_element(&p(&sp, "u1"), 2, 3).unwrap() * &boardman_element(&p(&sp, "u2"), 2, 3).unwrap();
        assert_eq!(prod, expected);
        assert!(boardman_element(&MPoly::zero(&sp), 2, 3).unwrap().is_zero());
    }

    fn arb_series(order: u32) -> impl Strategy<Value = MPoly<Z>> {
        proptest::collection::vec((1i32..=order as i32, -3i64..=3), 1..4).prop_map(move |terms| {
            let params = Space::polynomial(&["c"]);
            let sp = univariate_space("t", order, &params);
            let mut f = MPoly::zero(&sp);
            for (e, c) in terms {
                f.add_term([e, 0].into_iter().collect(), Z::from(c));
            }
            f
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn prop_chern_is_injective_on_low_order(f in arb_series(3), g in arb_series(3)) {
            // the t-variable plays the role of g1
            let sp = Theory::BorelK { trunc: 3 }.ambient_space(1);
            let relabel = |h: &MPoly<Z>| {
                let mut out = MPoly::zero(&sp);
                for (e, c) in h.terms() {
                    out.add_term([e[0], 0].into_iter().collect(), c.clone());
                }
                out
            };
            let (cf, cg) = (chern_element(&relabel(&f), 1, 3).unwrap(), chern_element(&relabel(&g), 1, 3).unwrap());
            prop_assert_eq!(cf == cg, relabel(&f) == relabel(&g));
        }
    }
}
