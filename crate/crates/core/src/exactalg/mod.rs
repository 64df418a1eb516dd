//! Exact multivariate algebra: Laurent polynomials, polynomials and truncated
//! power series over the integers or the rationals.
//!
//! Coefficient rings such as `Z[z, z^-1]` or `Z[b1, ..., bN]` are modelled by
//! adding `z` or the `b_i` as extra variables, so a single sparse element type
//! [`MPoly`] covers every ring in use. A [`Space`] fixes the variables, their
//! kinds and degrees, and the truncation order.

mod coeff;
mod parse;
mod poly;
pub mod series;
mod space;
mod subst;

use thiserror::Error;

pub use coeff::Coefficient;
pub use poly::{Exponent, LaurentPoly, MPoly, Poly, TruncSeries};
pub use space::{Space, VarKind, Variable};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("operands live in different rings")]
    SpaceMismatch,
    #[error("expected {expected} variables, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("variable {0} does not admit negative exponents")]
    NegativeExponent(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("duplicate variable {0}")]
    DuplicateVariable(String),
    #[error("series variables require a truncation order")]
    MissingTruncation,
    #[error("truncation orders {0} and {1} differ")]
    TruncationMismatch(u32, u32),
    #[error("{0} is not invertible")]
    NotInvertible(String),
    #[error("series has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("series has no invertible linear term")]
    VanishingLinearTerm,
    #[error("{0} is not a series variable")]
    NotSeriesVariable(String),
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("parse error: {0}")]
    Parse(String),
}

#[cfg(test)]
mod tests {
    use super::series::{compose, exp_series, reversion, univariate_space};
    use super::*;
    use crate::intlat::IntMatrix;
    use num_bigint::BigInt;
    use proptest::prelude::*;
    use std::sync::Arc;

    type Z = BigInt;

    fn p(space: &Arc<Space>, s: &str) -> MPoly<Z> {
        MPoly::parse(space, s).unwrap()
    }

    #[test]
    fn laurent_product() {
        let sp = Space::laurent(&["a1", "a2"]);
        assert_eq!(&p(&sp, "1-a1") * &p(&sp, "1+a1"), p(&sp, "1-a1^2"));
        assert_eq!(&p(&sp, "a1^-2") * &p(&sp, "a1^2*a2"), p(&sp, "a2"));
    }

    #[test]
    fn polynomial_identity() {
        let sp = Space::polynomial(&["x1", "x2"]);
        let lhs = &(&p(&sp, "x2") * &p(&sp, "2*x1-x2")) + &p(&sp, "x2^2");
        assert_eq!(lhs, p(&sp, "2*x1*x2"));
    }

    #[test]
    fn truncated_square() {
        let params = Space::polynomial(&["b1"]);
        let sp = univariate_space("t", 3, &params);
        let b = p(&sp, "t + b1*t^2");
        assert_eq!(&b * &b, p(&sp, "t^2 + 2*b1*t^3"));
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let a = Space::polynomial(&["x1"]);
        let b = Space::polynomial(&["x1", "x2"]);
        assert_eq!(
            MPoly::<Z>::one(&a).checked_add(&MPoly::one(&b)),
            Err(AlgebraError::SpaceMismatch)
        );
        assert!(MPoly::<Z>::parse(&a, "x1^-1").is_err());
    }

    #[test]
    fn display_round_trip() {
        let sp = Space::new(
            vec![
                Variable::new("a1", VarKind::Laurent, 0),
                Variable::new("a2", VarKind::Laurent, 0),
                Variable::new("z", VarKind::Laurent, -2),
            ],
            None,
        )
        .unwrap();
        let f = p(&sp, "(1-a1)(a2-a1^2)*z^-1 - 3");
        let text = f.to_string();
        assert_eq!(MPoly::parse(&sp, &text).unwrap(), f);
        assert_eq!(text, "a1^3*z^-1 - a1^2*z^-1 - a1*a2*z^-1 + a2*z^-1 - 3");
        let q = Space::polynomial(&["x1"]);
        let r: MPoly<Rational> = MPoly::parse(&q, "1/2*x1^2 - 2/4").unwrap();
        assert_eq!(r.to_string(), "1/2*x1^2 - 1/2");
        assert!(MPoly::<Z>::parse(&q, "1/2*x1").is_err());
    }

    #[test]
    fn exponent_substitution_examples() {
        let sp = Space::laurent(&["a1", "a2"]);
        let t = Space::laurent(&["t1"]);
        let pi = IntMatrix::from_rows(&[[1, 2]]);
        let g = p(&sp, "1 - a2*a1^-2");
        assert!(g.exponent_substitution(&pi, &t).unwrap().is_zero());
        assert_eq!(p(&sp, "a1+a2").exponent_substitution(&pi, &t).unwrap(), p(&t, "t1 + t1^2"));
        let id = IntMatrix::identity(2);
        let f = p(&sp, "3*a1^-1*a2 - a2^4 + 7");
        assert_eq!(f.exponent_substitution(&id, &sp).unwrap(), f);
    }

    #[test]
    fn linear_substitution_examples() {
        let sp = Space::polynomial(&["x1", "x2"]);
        let t = Space::polynomial(&["t1"]);
        // restriction to the ray (0,1)
        let a = IntMatrix::from_rows(&[[0], [1]]);
        assert!(p(&sp, "2*x1").linear_substitution(&a, &t).unwrap().is_zero());
        // restriction to the ray (-1,-2)
        let a = IntMatrix::from_rows(&[[-1], [-2]]);
        assert!(p(&sp, "2*x1-x2").linear_substitution(&a, &t).unwrap().is_zero());
        let f = p(&sp, "x1^3 - 5*x1*x2 + 2");
        assert_eq!(f.linear_substitution(&IntMatrix::identity(2), &sp).unwrap(), f);
    }

    #[test]
    fn series_inverse_examples() {
        let sp = Space::series(&["g"], 3);
        assert_eq!(p(&sp, "1-g").series_inverse().unwrap(), p(&sp, "1+g+g^2+g^3"));
        assert_eq!(p(&sp, "1").series_inverse().unwrap(), p(&sp, "1"));
        let params = Space::polynomial(&["b1"]);
        let sp2 = univariate_space("t", 2, &params);
        assert_eq!(p(&sp2, "1+b1*t").series_inverse().unwrap(), p(&sp2, "1 - b1*t + b1^2*t^2"));
        assert!(p(&sp, "2+g").series_inverse().is_err());
        assert!(p(&sp, "g").series_inverse().is_err());
    }

    #[test]
    fn reversion_of_b_series() {
        let params = Space::polynomial(&["b1", "b2"]);
        let sp = univariate_space("t", 3, &params);
        let b = p(&sp, "t + b1*t^2 + b2*t^3");
        let inv = reversion(&b, 0).unwrap();
        // undetermined coefficients by hand: c2 = -b1, c3 = 2 b1^2 - b2
        assert_eq!(inv, p(&sp, "t - b1*t^2 + 2*b1^2*t^3 - b2*t^3"));
        assert_eq!(compose(&b, 0, &inv).unwrap(), p(&sp, "t"));
        assert_eq!(compose(&inv, 0, &b).unwrap(), p(&sp, "t"));
        assert_eq!(reversion(&p(&sp, "t^2"), 0), Err(AlgebraError::VanishingLinearTerm));
    }

    #[test]
    fn exp_of_zx() {
        let sp = Space::new(
            vec![Variable::new("x", VarKind::Series, 2), Variable::new("z", VarKind::Laurent, -2)],
            Some(3),
        )
        .unwrap();
        let arg: MPoly<Rational> = MPoly::parse(&sp, "z*x").unwrap();
        let e = exp_series(&arg).unwrap();
        let expected: MPoly<Rational> =
            MPoly::parse(&sp, "1 + z*x + 1/2*z^2*x^2 + 1/6*z^3*x^3").unwrap();
        assert_eq!(e, expected);
    }

    fn arb_laurent() -> impl Strategy<Value = MPoly<Z>> {
        proptest::collection::vec(((-2i32..=2, -2i32..=2), -3i64..=3), 0..5).prop_map(|terms| {
            let sp = Space::laurent(&["a1", "a2"]);
            let mut f = MPoly::zero(&sp);
            for ((e1, e2), c) in terms {
                f.add_term([e1, e2].into_iter().collect(), Z::from(c));
            }
            f
        })
    }

    fn arb_series() -> impl Strategy<Value = MPoly<Z>> {
        proptest::collection::vec(((0i32..=3, 0i32..=3), -3i64..=3), 0..6).prop_map(|terms| {
            let sp = Space::series(&["g1", "g2"], 4);
            let mut f = MPoly::zero(&sp);
            for ((e1, e2), c) in terms {
                f.add_term([e1, e2].into_iter().collect(), Z::from(c));
            }
            f
        })
    }

    proptest! {
        #[test]
        fn prop_ring_axioms(f in arb_laurent(), g in arb_laurent(), h in arb_laurent()) {
            prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
            prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
            prop_assert_eq!(&f * &g, &g * &f);
            prop_assert!((&f - &f).is_zero());
        }

        #[test]
        fn prop_series_ring_axioms(f in arb_series(), g in arb_series(), h in arb_series()) {
            prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
            prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        }

        #[test]
        fn prop_exponent_substitution_is_homomorphism(f in arb_laurent(), g in arb_laurent(),
                                                      a in -3i64..=3, b in -3i64..=3) {
            let t = Space::laurent(&["t1"]);
            let pi = IntMatrix::from_rows(&[[a, b]]);
            let lhs = (&f * &g).exponent_substitution(&pi, &t).unwrap();
            let rhs = &f.exponent_substitution(&pi, &t).unwrap() * &g.exponent_substitution(&pi, &t).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn prop_linear_substitution_is_homomorphism(f in arb_series(), g in arb_series(),
                                                    a in -3i64..=3, b in -3i64..=3) {
            let t = Space::series(&["t1"], 4);
            let m = IntMatrix::from_rows(&[[a], [b]]);
            let lhs = (&f * &g).linear_substitution(&m, &t).unwrap();
            let rhs = &f.linear_substitution(&m, &t).unwrap() * &g.linear_substitution(&m, &t).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn prop_series_inverse(f in arb_series(), c in prop_oneof![Just(1i64), Just(-1i64)]) {
            let sp = f.space().clone();
            let g = &f.filter_terms(|e| sp.series_degree(e) > 0) + &MPoly::from_i64(&sp, c);
            let inv = g.series_inverse().unwrap();
            prop_assert_eq!(&g * &inv, MPoly::one(&sp));
        }

        #[test]
        fn prop_reversion(c2 in -4i64..=4, c3 in -4i64..=4, c4 in -4i64..=4, c5 in -4i64..=4) {
            let sp = Space::series(&["t"], 5);
            let f = MPoly::<Z>::from_terms(&sp, [
                ([1].into_iter().collect(), Z::from(1)),
                ([2].into_iter().collect(), Z::from(c2)),
                ([3].into_iter().collect(), Z::from(c3)),
                ([4].into_iter().collect(), Z::from(c4)),
                ([5].into_iter().collect(), Z::from(c5)),
            ]).unwrap();
            let g = reversion(&f, 0).unwrap();
            prop_assert_eq!(compose(&f, 0, &g).unwrap(), MPoly::var(&sp, 0));
            prop_assert_eq!(compose(&g, 0, &f).unwrap(), MPoly::var(&sp, 0));
        }

        #[test]
        fn prop_text_round_trip(f in arb_laurent()) {
            let back = MPoly::<Z>::parse(f.space(), &f.to_string()).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
