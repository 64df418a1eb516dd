//! Face rings `R[y; Sigma]` and Laurent face algebras `F_K[beta; Sigma]`,
//! with one generator per ray, and the comparison map `xi*` to piecewise
//! algebras.
//!
//! Elements are stored as representatives in the free (Laurent) polynomial
//! ring on the rays. Two representatives are equal exactly when they agree
//! after [`FaceAlgebraElement::cone_evaluate`] on every maximal cone, which
//! sends `y_j` to 0 (`beta_j` to 1) for rays off the cone and inverts the
//! cone's ray matrix on the rest.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactalg::{AlgebraError, Coefficient, MPoly, Space, VarKind, Variable};
use crate::fan::{Cone, Fan};
use crate::piecewise::{FanCharts, PiecewiseElement, PiecewiseError, Theory};

#[derive(Debug, Error)]
pub enum FaceError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Piecewise(#[from] PiecewiseError),
    #[error("face algebras are only available for H, HQ and K, not {0}")]
    UnsupportedTheory(String),
    #[error("cone {0} is not smooth, so its coordinates are not defined over Z")]
    NotSmooth(String),
    #[error("cone {0} is not a full-dimensional cone of the fan")]
    NotMaximal(String),
    #[error("face algebra elements from different rings")]
    Mismatch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceKind {
    /// `R[y; Sigma]`, `y_j` of degree 2.
    Polynomial,
    /// `F_K[beta; Sigma]` over `Z[z, z^-1]`.
    Laurent,
}

fn kind_of(theory: Theory) -> Result<FaceKind, FaceError> {
    match theory {
        Theory::H | Theory::HQ => Ok(FaceKind::Polynomial),
        Theory::K => Ok(FaceKind::Laurent),
        other => Err(FaceError::UnsupportedTheory(other.to_string())),
    }
}

/// Free ring on the rays: `y0..y{m-1}`, or `beta0..beta{m-1}` and `z`.
pub fn face_space(theory: Theory, m: usize) -> Result<Arc<Space>, FaceError> {
    let vars = match kind_of(theory)? {
        FaceKind::Polynomial => (0..m).map(|j| Variable::new(format!("y{j}"), VarKind::Polynomial, 2)).collect(),
        FaceKind::Laurent => {
            let mut v: Vec<Variable> = (0..m).map(|j| Variable::new(format!("beta{j}"), VarKind::Laurent, 0)).collect();
            v.push(Variable::new("z", VarKind::Laurent, -2));
            v
        }
    };
    Ok(Space::new(vars, None)?)
}

/// Minimal sets of rays that do not span a cone.
pub fn stanley_reisner_nonfaces(fan: &Fan) -> Vec<Cone> {
    let m = fan.num_rays();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for size in 1..=m {
        let mut next = Vec::new();
        for s in &layer {
            let start = s.last().map_or(0, |&l| l + 1);
            for r in start..m {
                let mut t = s.clone();
                t.push(r);
                let c = Cone::new(t.iter().copied());
                if fan.contains_cone(&c) {
                    next.push(t);
                } else if (0..size).all(|drop| {
                    fan.contains_cone(&Cone::new(t.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, &r)| r)))
                }) {
                    out.push(c);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    out
}

/// Ranks of the face ring in degrees `0, 2, ..., max_degree`: in degree
/// `2k > 0`, a cone with `d >= 1` rays contributes the `C(k-1, d-1)`
/// monomials with exactly its support.
pub fn face_ring_hilbert(fan: &Fan, max_degree: u32) -> Vec<BigInt> {
    (0..=max_degree / 2)
        .map(|k| {
            if k == 0 {
                return BigInt::one();
            }
            fan.cones()
                .filter(|c| c.dim() >= 1)
                .map(|c| binomial(BigInt::from(k - 1), BigInt::from(c.dim() - 1)))
                .sum()
        })
        .collect()
}

/// Inverse of a square integer matrix over Q.
fn rational_inverse(m: &crate::intlat::IntMatrix) -> Option<Vec<Vec<BigRational>>> {
    let n = m.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::from_integer(m[(i, j)].clone()))
                .chain((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }))
                .collect()
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        let inv = a[col][col].recip();
        a[col].iter_mut().for_each(|v| *v = &*v * &inv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot = a[col].clone();
                a[r].iter_mut().zip(&pivot).for_each(|(v, p)| *v = &*v - &(&f * p));
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceAlgebraElement<S: Coefficient> {
    theory: Theory,
    charts: Arc<FanCharts>,
    representative: MPoly<S>,
}

impl<S: Coefficient> FaceAlgebraElement<S> {
    pub fn new(theory: Theory, charts: Arc<FanCharts>, representative: MPoly<S>) -> Result<Self, FaceError> {
        let space = face_space(theory, charts.fan().num_rays())?;
        if S::NAME != theory.coefficient_ring() || **representative.space() != *space {
            return Err(FaceError::Mismatch);
        }
        Ok(FaceAlgebraElement { theory, charts, representative })
    }

    pub fn parse(theory: Theory, charts: Arc<FanCharts>, text: &str) -> Result<Self, FaceError> {
        let space = face_space(theory, charts.fan().num_rays())?;
        let rep = MPoly::parse(&space, text)?;
        Self::new(theory, charts, rep)
    }

    /// The monomial `y_omega = prod_{j in omega} y_j` (or its `beta` analogue).
    pub fn ray_monomial(theory: Theory, charts: Arc<FanCharts>, omega: &Cone) -> Result<Self, FaceError> {
        let space = face_space(theory, charts.fan().num_rays())?;
        let mut e = vec![0i32; space.nvars()];
        omega.rays().iter().for_each(|&j| e[j] = 1);
        let rep = MPoly::monomial(&space, &e, S::one())?;
        Self::new(theory, charts, rep)
    }

    pub fn kind(&self) -> FaceKind {
        kind_of(self.theory).expect("checked on construction")
    }

    pub fn theory(&self) -> Theory {
        self.theory
    }

    pub fn fan(&self) -> &Fan {
        self.charts.fan()
    }

    pub fn representative(&self) -> &MPoly<S> {
        &self.representative
    }

    fn check_same(&self, other: &Self) -> Result<(), FaceError> {
        if self.theory != other.theory || self.charts.fan() != other.charts.fan() {
            return Err(FaceError::Mismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, FaceError> {
        self.check_same(other)?;
        Ok(FaceAlgebraElement { representative: &self.representative + &other.representative, ..self.clone() })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FaceError> {
        self.check_same(other)?;
        Ok(FaceAlgebraElement { representative: &self.representative * &other.representative, ..self.clone() })
    }

    /// Image in the ring of the maximal cone `sigma`, in the piecewise
    /// algebra's ambient coordinates.
    pub fn cone_evaluate(&self, sigma: &Cone) -> Result<MPoly<S>, FaceError> {
        let fan = self.charts.fan();
        let n = fan.ambient_dim();
        if !fan.max_cones().contains(sigma) || sigma.dim() != n {
            return Err(FaceError::NotMaximal(sigma.to_string()));
        }
        let inv = rational_inverse(&fan.ray_matrix(sigma)).ok_or_else(|| FaceError::NotMaximal(sigma.to_string()))?;
        let not_smooth = || FaceError::NotSmooth(sigma.to_string());
        let target = self.theory.ambient_space(n);
        let m = fan.num_rays();
        let mut images = Vec::with_capacity(self.representative.nvars());
        match self.kind() {
            FaceKind::Polynomial => {
                for j in 0..m {
                    let mut img = MPoly::zero(&target);
                    if let Some(k) = sigma.rays().iter().position(|&r| r == j) {
                        for (i, q) in inv[k].iter().enumerate() {
                            let c = S::from_ratio(q.numer().clone(), q.denom().clone()).ok_or_else(not_smooth)?;
                            img = &img + &MPoly::var(&target, i).scale(&c);
                        }
                    }
                    images.push(img);
                }
            }
            FaceKind::Laurent => {
                for j in 0..m {
                    let mut e = vec![0i32; target.nvars()];
                    if let Some(k) = sigma.rays().iter().position(|&r| r == j) {
                        for (i, q) in inv[k].iter().enumerate() {
                            if !q.is_integer() {
                                return Err(not_smooth());
                            }
                            e[i] = i32::try_from(q.to_integer()).map_err(|_| AlgebraError::ExponentOverflow)?;
                        }
                    }
                    images.push(MPoly::monomial(&target, &e, S::one())?);
                }
                images.push(MPoly::var_named(&target, "z")?);
            }
        }
        Ok(self.representative.substitute(&target, &images)?)
    }

    /// The tuple of cone evaluations, as a piecewise element.
    pub fn to_piecewise(&self) -> Result<PiecewiseElement<S>, FaceError> {
        let comps = self
            .charts
            .fan()
            .max_cones()
            .iter()
            .map(|c| self.cone_evaluate(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PiecewiseElement::new(self.theory, self.charts.clone(), comps)?)
    }

    /// Equality in the face algebra.
    pub fn equals(&self, other: &Self) -> Result<bool, FaceError> {
        self.check_same(other)?;
        let diff = FaceAlgebraElement { representative: &self.representative - &other.representative, ..self.clone() };
        for c in self.charts.fan().max_cones() {
            if !diff.cone_evaluate(c)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `xi*` on a global element: `x_i -> sum_j xi_ij y_j`, or
/// `a^J -> beta^{xi^tr J}`, restricted to the rays of `rho`.
fn global_to_face<S: Coefficient>(
    g: &MPoly<S>,
    theory: Theory,
    fan: &Fan,
    rho: &Cone,
    target: &Arc<Space>,
) -> Result<MPoly<S>, FaceError> {
    let n = fan.ambient_dim();
    let xi = fan.xi();
    let mut images = Vec::with_capacity(g.nvars());
    match kind_of(theory)? {
        FaceKind::Polynomial => {
            for i in 0..n {
                let mut img = MPoly::zero(target);
                for &j in rho.rays() {
                    img = &img + &MPoly::var(target, j).scale(&S::from_bigint(xi[(i, j)].clone()));
                }
                images.push(img);
            }
        }
        FaceKind::Laurent => {
            for i in 0..n {
                let mut e = vec![0i32; target.nvars()];
                for &j in rho.rays() {
                    e[j] = xi.entry_i64(i, j) as i32;
                }
                images.push(MPoly::monomial(target, &e, S::one())?);
            }
            images.push(MPoly::var_named(target, "z")?);
        }
    }
    Ok(g.substitute(target, &images)?)
}

/// The global element `g` read in the face algebra.
pub fn xi_star_global<S: Coefficient>(
    g: &MPoly<S>,
    theory: Theory,
    charts: Arc<FanCharts>,
) -> Result<FaceAlgebraElement<S>, FaceError> {
    let all = Cone::new(0..charts.fan().num_rays());
    let target = face_space(theory, charts.fan().num_rays())?;
    let rep = global_to_face(g, theory, charts.fan(), &all, &target)?;
    FaceAlgebraElement::new(theory, charts, rep)
}

/// A face algebra representative of the piecewise element `f`.
///
/// For each cone `rho`, `h_rho` is `xi*` applied to the component of any
/// maximal cone containing `rho`, using only the rays of `rho`. The
/// representative is `sum_rho k_rho` with `k_rho` the Mobius combination
/// `sum_{pi <= rho} (-1)^{|rho| - |pi|} h_pi`, so that the cone evaluation on
/// `sigma` telescopes to `h_sigma`. Requires a smooth fan, except for `HQ`.
pub fn xi_star<S: Coefficient>(f: &PiecewiseElement<S>) -> Result<FaceAlgebraElement<S>, FaceError> {
    let theory = f.theory();
    kind_of(theory)?;
    let fan = f.fan();
    if theory != Theory::HQ {
        if let Some((c, _)) = fan.cone_smoothness().into_iter().find(|(_, ok)| !ok) {
            return Err(FaceError::NotSmooth(c.to_string()));
        }
    }
    let target = face_space(theory, fan.num_rays())?;
    let cones: Vec<&Cone> = fan.cones().collect();
    // c_pi = sum over cones rho containing pi of (-1)^{|rho| - |pi|}
    let mut weights: BTreeMap<&Cone, i64> = BTreeMap::new();
    for pi in &cones {
        let w: i64 = cones
            .iter()
            .filter(|rho| pi.is_face_of(rho))
            .map(|rho| if (rho.dim() - pi.dim()) % 2 == 0 { 1 } else { -1 })
            .sum();
        if w != 0 {
            weights.insert(pi, w);
        }
    }
    let mut rep = MPoly::zero(&target);
    for (pi, w) in weights {
        let (k, _) = fan
            .max_cones()
            .iter()
            .enumerate()
            .find(|(_, s)| pi.is_face_of(s))
            .expect("every cone lies in a maximal cone");
        let h = global_to_face(&f.components()[k], theory, fan, pi, &target)?;
        rep = &rep + &h.scale(&S::from_i64(w));
    }
    FaceAlgebraElement::new(theory, f.charts().clone(), rep)
}

/// Whether `e` evaluates to the components of `f` on every maximal cone.
pub fn verify_xi_star_inverse<S: Coefficient>(
    f: &PiecewiseElement<S>,
    e: &FaceAlgebraElement<S>,
) -> Result<bool, FaceError> {
    for (c, comp) in f.fan().max_cones().iter().zip(f.components()) {
        if e.cone_evaluate(c)? != *comp {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::Rational;
    use crate::fan::{projective_space_fan, wps_fan, WeightVector};
    use crate::piecewise::hilbert_function;
    use proptest::prelude::*;

    type Z = BigInt;

    fn cp(n: usize) -> Arc<FanCharts> {
        FanCharts::new(projective_space_fan(n))
    }

    fn wps112() -> Arc<FanCharts> {
        FanCharts::new(wps_fan(&WeightVector::new(vec![1, 1, 2]).unwrap()).unwrap())
    }

    fn big(v: &[u64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn nonfaces() {
        assert_eq!(stanley_reisner_nonfaces(wps112().fan()), vec![Cone::new([0, 1, 2])]);
        assert_eq!(stanley_reisner_nonfaces(&projective_space_fan(1)), vec![Cone::new([0, 1])]);
        let single = Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![Cone::new([0, 1])]).unwrap();
        assert!(stanley_reisner_nonfaces(&single).is_empty());
        let square = Fan::product(&projective_space_fan(1), &projective_space_fan(1));
        assert_eq!(stanley_reisner_nonfaces(&square), vec![Cone::new([0, 1]), Cone::new([2, 3])]);
    }

    #[test]
    fn hilbert_counts() {
        assert_eq!(face_ring_hilbert(wps112().fan(), 8), big(&[1, 3, 6, 9, 12]));
        assert_eq!(face_ring_hilbert(&projective_space_fan(2), 8), big(&[1, 3, 6, 9, 12]));
        assert_eq!(face_ring_hilbert(&projective_space_fan(2), 0), big(&[1]));
    }

    #[test]
    fn product_of_one_minus_beta_vanishes_on_projective_space() {
        for n in 1..=3 {
            let c = cp(n);
            let text: Vec<String> = (0..=n).map(|j| format!("(1-beta{j})")).collect();
            let e = FaceAlgebraElement::<Z>::parse(Theory::K, c.clone(), &text.join("*")).unwrap();
            for s in c.fan().max_cones() {
                assert!(e.cone_evaluate(s).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn evaluation_examples() {
        let c = cp(2);
        let y1 = FaceAlgebraElement::<Z>::parse(Theory::H, c.clone(), "y1").unwrap();
        let x = Theory::H.ambient_space(2);
        // sigma_0 = {1, 2} has the coordinate basis as rays
        assert_eq!(y1.cone_evaluate(&Cone::new([1, 2])).unwrap(), MPoly::parse(&x, "x1").unwrap());
        // on {0, 1}: x = -y0 (1,1) + y1 (1,0), so y1 = x1 - x2
        assert_eq!(y1.cone_evaluate(&Cone::new([0, 1])).unwrap(), MPoly::parse(&x, "x1 - x2").unwrap());
        assert!(y1.cone_evaluate(&Cone::new([0, 2])).unwrap().is_zero());
        let one = FaceAlgebraElement::<Z>::parse(Theory::K, c.clone(), "1").unwrap();
        for s in c.fan().max_cones() {
            assert_eq!(one.cone_evaluate(s).unwrap(), MPoly::one(&Theory::K.ambient_space(2)));
        }
        assert!(matches!(y1.cone_evaluate(&Cone::new([1])), Err(FaceError::NotMaximal(_))));
    }

    #[test]
    fn nonfaces_evaluate_to_zero() {
        for charts in [cp(2), cp(3), FanCharts::new(Fan::product(&projective_space_fan(1), &projective_space_fan(1)))] {
            for omega in stanley_reisner_nonfaces(charts.fan()) {
                let e = FaceAlgebraElement::<Z>::ray_monomial(Theory::H, charts.clone(), &omega).unwrap();
                assert!(e.to_piecewise().unwrap().is_zero());
            }
        }
        let c = wps112();
        let e = FaceAlgebraElement::<Rational>::ray_monomial(Theory::HQ, c, &Cone::new([0, 1, 2])).unwrap();
        assert!(e.to_piecewise().unwrap().is_zero());
    }

    #[test]
    fn non_smooth_cones_need_rationals() {
        let c = wps112();
        let y0 = FaceAlgebraElement::<Z>::parse(Theory::H, c.clone(), "y0").unwrap();
        // sigma_1 = {0, 2}: rays (-1,-2), (0,1) are a basis; sigma_2 = {0, 1} is not
        assert!(y0.cone_evaluate(&Cone::new([0, 2])).is_ok());
        assert!(matches!(y0.cone_evaluate(&Cone::new([0, 1])), Err(FaceError::NotSmooth(_))));
        let q = FaceAlgebraElement::<Rational>::parse(Theory::HQ, c, "y0").unwrap();
        let x = Theory::HQ.ambient_space(2);
        assert_eq!(q.cone_evaluate(&Cone::new([0, 1])).unwrap(), MPoly::parse(&x, "-1/2*x2").unwrap());
    }

    #[test]
    fn global_characters() {
        let c = cp(2);
        let k = Theory::K.ambient_space(2);
        let g: MPoly<Z> = MPoly::parse(&k, "a1^2*a2^-1").unwrap();
        let f = PiecewiseElement::global(Theory::K, c.clone(), g.clone()).unwrap();
        let e = xi_star(&f).unwrap();
        assert!(verify_xi_star_inverse(&f, &e).unwrap());
        // xi^tr (2, -1) = (-1, 2, -1)
        let direct = FaceAlgebraElement::<Z>::parse(Theory::K, c.clone(), "beta0^-1*beta1^2*beta2^-1").unwrap();
        assert!(e.equals(&direct).unwrap());
        assert!(xi_star_global(&g, Theory::K, c.clone()).unwrap().equals(&direct).unwrap());
        let zero = xi_star(&PiecewiseElement::<Z>::zero(Theory::K, c)).unwrap();
        assert!(zero.representative().is_zero());
    }

    #[test]
    fn global_linear_forms() {
        let c = cp(2);
        let h = Theory::H.ambient_space(2);
        let f = PiecewiseElement::global(Theory::H, c.clone(), MPoly::<Z>::parse(&h, "x1").unwrap()).unwrap();
        let e = xi_star(&f).unwrap();
        let direct = FaceAlgebraElement::<Z>::parse(Theory::H, c, "y1 - y0").unwrap();
        assert!(e.equals(&direct).unwrap());
        assert!(verify_xi_star_inverse(&f, &e).unwrap());
    }

    #[test]
    fn xi_star_rejects_singular_fans() {
        let c = wps112();
        assert!(matches!(xi_star(&PiecewiseElement::<Z>::one(Theory::K, c.clone())), Err(FaceError::NotSmooth(_))));
        let one = PiecewiseElement::<Rational>::one(Theory::HQ, c);
        assert!(verify_xi_star_inverse(&one, &xi_star(&one).unwrap()).unwrap());
    }

    #[test]
    fn hilbert_functions_agree_on_smooth_fans() {
        let fans = vec![
            projective_space_fan(1),
            projective_space_fan(2),
            projective_space_fan(3),
            Fan::product(&projective_space_fan(1), &projective_space_fan(1)),
        ];
        for fan in fans {
            let expected: Vec<usize> = face_ring_hilbert(&fan, 6).iter().map(|v| v.try_into().unwrap()).collect();
            assert_eq!(hilbert_function(Theory::H, &FanCharts::new(fan), 6).unwrap(), expected);
        }
    }

    fn arb_face_poly() -> impl Strategy<Value = Vec<((u8, u8, u8), i64)>> {
        proptest::collection::vec(((0u8..3, 0u8..3, 0u8..3), -3i64..=3), 0..5)
    }

    fn build(theory: Theory, c: &Arc<FanCharts>, terms: &[((u8, u8, u8), i64)]) -> FaceAlgebraElement<Z> {
        let space = face_space(theory, 3).unwrap();
        let mut f = MPoly::zero(&space);
        for &((a, b, d), coef) in terms {
            let mut e = vec![a as i32, b as i32, d as i32];
            if theory == Theory::K {
                e.iter_mut().for_each(|v| *v -= 1);
                e.push(0);
            }
            f.add_term(e.into(), BigInt::from(coef));
        }
        FaceAlgebraElement::new(theory, c.clone(), f).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn prop_xi_star_round_trip(t1 in arb_face_poly(), t2 in arb_face_poly(), k in proptest::bool::ANY) {
            let theory = if k { Theory::K } else { Theory::H };
            let c = cp(2);
            let e1 = build(theory, &c, &t1);
            let e2 = build(theory, &c, &t2);
            let f1 = e1.to_piecewise().unwrap();
            let f2 = e2.to_piecewise().unwrap();
            prop_assert!(f1.is_valid());
            let back = xi_star(&f1).unwrap();
            prop_assert!(verify_xi_star_inverse(&f1, &back).unwrap());
            prop_assert!(back.equals(&e1).unwrap());
            let prod = xi_star(&f1).unwrap().mul(&xi_star(&f2).unwrap()).unwrap();
            prop_assert_eq!(prod.to_piecewise().unwrap(), f1.mul(&f2).unwrap());
        }
    }
}
