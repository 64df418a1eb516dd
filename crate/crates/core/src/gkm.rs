//! GKM description of the piecewise algebras of a divisive weighted projective
//! space: tuples `(y_0, ..., y_n)` of coefficient-ring elements, one per fixed
//! point, with `e(i, j) | y_i - y_j` for all `j < i`.
//!
//! The fixed point `k` corresponds to the maximal cone `sigma_{n-k}` of the
//! weighted projective fan; `h` puts `y_{n-k}` on `sigma_k`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{AlgebraError, MPoly, Space};
use crate::fan::{wps_fan, FanError, WeightVector};
use crate::intlat::IntMatrix;
use crate::piecewise::{FanCharts, PiecewiseElement, PiecewiseError, Theory};

#[derive(Debug, Error)]
pub enum GkmError {
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Piecewise(#[from] PiecewiseError),
    #[error("GKM tuples are only defined for the K and H theories, not {0}")]
    UnsupportedTheory(String),
    #[error("need 0 <= j < i <= {n}, got (i, j) = ({i}, {j})")]
    BadIndices { i: usize, j: usize, n: usize },
    #[error("expected {expected} entries, got {got}")]
    EntryCount { expected: usize, got: usize },
    #[error("entry {0} lives in the wrong ring")]
    WrongSpace(usize),
    #[error("tuple fails divisibility for {} pair(s)", .0.len())]
    Invalid(Vec<DivisibilityFailure>),
    #[error("piecewise element is not defined on the fan of {0}")]
    FanMismatch(WeightVector),
}

fn check_theory(theory: Theory) -> Result<(), GkmError> {
    match theory {
        Theory::K | Theory::H => Ok(()),
        other => Err(GkmError::UnsupportedTheory(other.to_string())),
    }
}

/// Exponent vector `J` of the character `rho_{i,j} = a_{n-j} a_{n-i}^{-c}`,
/// `c = chi_{n-j} / chi_{n-i}`, with the coordinate `a_0 = 1` dropped.
/// Entry `l - 1` belongs to `a_l`.
pub fn character_exponent(i: usize, j: usize, chi: &WeightVector) -> Result<Vec<i64>, GkmError> {
    let n = chi.n();
    if j >= i || i > n {
        return Err(GkmError::BadIndices { i, j, n });
    }
    let (hi, lo) = (n - j, n - i);
    let c = (chi.get(hi) / chi.get(lo)) as i64;
    let mut v = vec![0i64; n];
    v[hi - 1] = 1;
    if lo > 0 {
        v[lo - 1] = -c;
    }
    Ok(v)
}

/// Euler class of `rho_{i,j}`: `1 - a^J` in K-theory, the linear form `J.x`
/// in cohomology.
pub fn euler_class(i: usize, j: usize, chi: &WeightVector, theory: Theory) -> Result<MPoly<BigInt>, GkmError> {
    check_theory(theory)?;
    let exp = character_exponent(i, j, chi)?;
    let space = theory.ambient_space(chi.n());
    let mut out = MPoly::zero(&space);
    match theory {
        Theory::K => {
            let mut e: Vec<i32> = exp.iter().map(|&v| v as i32).collect();
            e.resize(space.nvars(), 0);
            out.add_term(vec![0; space.nvars()].into(), BigInt::from(1));
            out.add_term(e.into(), BigInt::from(-1));
        }
        _ => {
            for (l, &v) in exp.iter().enumerate() {
                if v != 0 {
                    out = &out + &MPoly::var(&space, l).scale(&BigInt::from(v));
                }
            }
        }
    }
    Ok(out)
}

/// The substitution killing `e(i, j)`: `a_{n-j} -> a_{n-i}^c` (resp.
/// `x_{n-j} -> c x_{n-i}`), with `a_0 = 1`, `x_0 = 0`. Because the leading
/// coordinate of `J` is 1, an element is divisible by `e(i, j)` exactly when
/// its image vanishes.
fn kill_euler_class(f: &MPoly<BigInt>, i: usize, j: usize, chi: &WeightVector, theory: Theory) -> Result<MPoly<BigInt>, GkmError> {
    let n = chi.n();
    let exp = character_exponent(i, j, chi)?;
    let hi = n - j - 1;
    let mut m = IntMatrix::identity(n);
    for l in 0..n {
        m[(l, hi)] = BigInt::from(0);
        m[(hi, l)] = BigInt::from(0);
    }
    let space = f.space().clone();
    Ok(match theory {
        // a^E -> a^{mE}: column hi carries the exponent of a_{n-j}
        Theory::K => {
            for (l, &v) in exp.iter().enumerate() {
                if l != hi {
                    m[(l, hi)] = BigInt::from(-v);
                }
            }
            f.exponent_substitution(&m, &space)?
        }
        // x_l -> sum_k m[l][k] x_k: row hi carries the image of x_{n-j}
        _ => {
            for (l, &v) in exp.iter().enumerate() {
                if l != hi {
                    m[(hi, l)] = BigInt::from(-v);
                }
            }
            f.linear_substitution(&m, &space)?
        }
    })
}

/// A pair `(i, j)` at which `e(i, j)` fails to divide `y_i - y_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisibilityFailure {
    pub i: usize,
    pub j: usize,
    pub euler_class: String,
    pub difference: String,
}

impl fmt::Display for DivisibilityFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}): {} does not divide {}", self.i, self.j, self.euler_class, self.difference)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GkmTuple {
    theory: Theory,
    chi: WeightVector,
    entries: Vec<MPoly<BigInt>>,
}

impl GkmTuple {
    /// Builds a tuple without checking divisibility; see [`GkmTuple::validate`].
    pub fn new(theory: Theory, chi: WeightVector, entries: Vec<MPoly<BigInt>>) -> Result<Self, GkmError> {
        check_theory(theory)?;
        chi.check_normalized_divisive()?;
        let n = chi.n();
        if entries.len() != n + 1 {
            return Err(GkmError::EntryCount { expected: n + 1, got: entries.len() });
        }
        let space = theory.ambient_space(n);
        if let Some(k) = entries.iter().position(|e| **e.space() != *space) {
            return Err(GkmError::WrongSpace(k));
        }
        Ok(GkmTuple { theory, chi, entries })
    }

    pub fn constant(theory: Theory, chi: WeightVector, c: MPoly<BigInt>) -> Result<Self, GkmError> {
        let n = chi.n();
        Self::new(theory, chi, vec![c; n + 1])
    }

    pub fn theory(&self) -> Theory {
        self.theory
    }

    pub fn chi(&self) -> &WeightVector {
        &self.chi
    }

    pub fn entries(&self) -> &[MPoly<BigInt>] {
        &self.entries
    }

    pub fn space(&self) -> Arc<Space> {
        self.theory.ambient_space(self.chi.n())
    }

    /// Every failing pair; empty when the tuple lies in the GKM ring.
    pub fn failures(&self) -> Result<Vec<DivisibilityFailure>, GkmError> {
        let n = self.chi.n();
        let mut out = Vec::new();
        for i in 1..=n {
            for j in 0..i {
                let diff = &self.entries[i] - &self.entries[j];
                if !kill_euler_class(&diff, i, j, &self.chi, self.theory)?.is_zero() {
                    out.push(DivisibilityFailure {
                        i,
                        j,
                        euler_class: euler_class(i, j, &self.chi, self.theory)?.to_string(),
                        difference: diff.to_string(),
                    });
                }
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<(), GkmError> {
        let f = self.failures()?;
        if f.is_empty() {
            Ok(())
        } else {
            Err(GkmError::Invalid(f))
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    fn zip(&self, other: &Self, op: impl Fn(&MPoly<BigInt>, &MPoly<BigInt>) -> MPoly<BigInt>) -> Result<Self, GkmError> {
        if self.theory != other.theory || self.chi != other.chi {
            return Err(AlgebraError::SpaceMismatch.into());
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| op(a, b)).collect();
        Ok(GkmTuple { theory: self.theory, chi: self.chi.clone(), entries })
    }

    pub fn add(&self, other: &Self) -> Result<Self, GkmError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, GkmError> {
        self.zip(other, |a, b| a * b)
    }

    /// Action of the coefficient ring, i.e. multiplication by a constant tuple.
    pub fn scale(&self, g: &MPoly<BigInt>) -> Result<Self, GkmError> {
        if **g.space() != *self.space() {
            return Err(AlgebraError::SpaceMismatch.into());
        }
        let entries = self.entries.iter().map(|e| e * g).collect();
        Ok(GkmTuple { theory: self.theory, chi: self.chi.clone(), entries })
    }

    pub fn to_json(&self) -> GkmJson {
        GkmJson {
            theory: self.theory.tag().to_string(),
            chi: self.chi.weights().to_vec(),
            entries: self.entries.iter().map(|e| e.to_string()).collect(),
        }
    }

    pub fn from_json(j: &GkmJson) -> Result<Self, GkmError> {
        let theory = Theory::from_tag(&j.theory, None)?;
        check_theory(theory)?;
        let chi = WeightVector::new(j.chi.clone())?;
        let space = theory.ambient_space(chi.n());
        let entries = j.entries.iter().map(|s| MPoly::parse(&space, s)).collect::<Result<Vec<_>, _>>()?;
        Self::new(theory, chi, entries)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GkmJson {
    pub theory: String,
    pub chi: Vec<u64>,
    pub entries: Vec<String>,
}

/// The isomorphism `h`: `y_{n-k}` becomes the component on `sigma_k`.
pub fn gkm_to_piecewise(t: &GkmTuple) -> Result<PiecewiseElement<BigInt>, GkmError> {
    t.validate()?;
    let charts = FanCharts::new(wps_fan(&t.chi)?);
    let n = t.chi.n();
    let components = (0..=n).map(|k| t.entries[n - k].clone()).collect();
    Ok(PiecewiseElement::new(t.theory, charts, components)?)
}

/// Inverse of [`gkm_to_piecewise`]: reads the maximal-cone components back.
pub fn piecewise_to_gkm(f: &PiecewiseElement<BigInt>, chi: &WeightVector) -> Result<GkmTuple, GkmError> {
    check_theory(f.theory())?;
    if *f.fan() != wps_fan(chi)? {
        return Err(GkmError::FanMismatch(chi.clone()));
    }
    let n = chi.n();
    let entries = (0..=n).map(|k| f.components()[n - k].clone()).collect();
    let t = GkmTuple::new(f.theory(), chi.clone(), entries)?;
    t.validate()?;
    Ok(t)
}

/// Module generators `tau_0, ..., tau_n`: `tau_k` vanishes at the fixed points
/// `i < k` and is `prod_{l<k} e(i, l)` at the others. `tau_0 = 1`.
pub fn generator_tuples(chi: &WeightVector, theory: Theory) -> Result<Vec<GkmTuple>, GkmError> {
    check_theory(theory)?;
    chi.check_normalized_divisive()?;
    let n = chi.n();
    let space = theory.ambient_space(n);
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut entries = Vec::with_capacity(n + 1);
        for i in 0..=n {
            if i < k {
                entries.push(MPoly::zero(&space));
            } else {
                let mut prod = MPoly::one(&space);
                for l in 0..k {
                    prod = &prod * &euler_class(i, l, chi, theory)?;
                }
                entries.push(prod);
            }
        }
        out.push(GkmTuple::new(theory, chi.clone(), entries)?);
    }
    Ok(out)
}

/// A random small coefficient-ring element: integer coefficients in
/// `[-3, 3]`, polynomial degree at most 2 (H) or Laurent exponents in
/// `[-2, 2]` and no `z` (K).
pub fn random_coefficient<R: Rng>(rng: &mut R, space: &Arc<Space>, theory: Theory) -> MPoly<BigInt> {
    let n = space.nvars() - usize::from(theory == Theory::K);
    let mut f = MPoly::zero(space);
    for _ in 0..rng.gen_range(0..4) {
        let mut e = vec![0i32; space.nvars()];
        match theory {
            Theory::K => e[..n].iter_mut().for_each(|v| *v = rng.gen_range(-2..=2)),
            _ => {
                for _ in 0..rng.gen_range(0..=2) {
                    e[rng.gen_range(0..n)] += 1;
                }
            }
        }
        f.add_term(e.into(), BigInt::from(rng.gen_range(-3..=3)));
    }
    f
}

/// A random element of the GKM ring, `sum_k c_k tau_k` with random
/// coefficients `c_k`.
pub fn random_valid_tuple<R: Rng>(rng: &mut R, chi: &WeightVector, theory: Theory) -> Result<GkmTuple, GkmError> {
    let gens = generator_tuples(chi, theory)?;
    let space = theory.ambient_space(chi.n());
    let mut acc = GkmTuple::constant(theory, chi.clone(), MPoly::zero(&space))?;
    for g in &gens {
        acc = acc.add(&g.scale(&random_coefficient(rng, &space, theory))?)?;
    }
    Ok(acc)
}

/// Pairs of distinct characters `rho_{i,j}` whose exponent vectors are
/// linearly dependent. Empty means the Euler classes are pairwise coprime.
pub fn dependent_character_pairs(chi: &WeightVector) -> Result<Vec<((usize, usize), (usize, usize))>, GkmError> {
    chi.check_normalized_divisive()?;
    let n = chi.n();
    let mut chars = Vec::new();
    for i in 1..=n {
        for j in 0..i {
            chars.push(((i, j), character_exponent(i, j, chi)?));
        }
    }
    let mut out = Vec::new();
    for (a, (pa, va)) in chars.iter().enumerate() {
        for (pb, vb) in &chars[a + 1..] {
            let m = IntMatrix::from_rows(&[va.clone(), vb.clone()]);
            if m.rank() < 2 {
                out.push((*pa, *pb));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chi(w: &[u64]) -> WeightVector {
        WeightVector::new(w.to_vec()).unwrap()
    }

    fn parse(theory: Theory, n: usize, s: &str) -> MPoly<BigInt> {
        MPoly::parse(&theory.ambient_space(n), s).unwrap()
    }

    #[test]
    fn euler_class_examples() {
        let c = chi(&[1, 1, 2]);
        assert_eq!(euler_class(1, 0, &c, Theory::K).unwrap(), parse(Theory::K, 2, "1 - a2*a1^-2"));
        assert_eq!(euler_class(1, 0, &c, Theory::H).unwrap(), parse(Theory::H, 2, "x2 - 2*x1"));
        assert_eq!(euler_class(2, 1, &c, Theory::K).unwrap(), parse(Theory::K, 2, "1 - a1"));
        assert_eq!(euler_class(2, 0, &c, Theory::H).unwrap(), parse(Theory::H, 2, "x2"));
        assert!(euler_class(0, 0, &c, Theory::H).is_err());
        assert!(euler_class(3, 1, &c, Theory::H).is_err());
    }

    #[test]
    fn divisibility_examples() {
        let c = chi(&[1, 1, 2]);
        // epsilon = (0 | 1-a1^2 | 1-a2) on sigma_0, sigma_1, sigma_2
        let eps = GkmTuple::new(
            Theory::K,
            c.clone(),
            vec![parse(Theory::K, 2, "1-a2"), parse(Theory::K, 2, "1-a1^2"), parse(Theory::K, 2, "0")],
        )
        .unwrap();
        assert!(eps.is_valid());
        let constant = GkmTuple::constant(Theory::H, c.clone(), parse(Theory::H, 2, "x1^2 - 7")).unwrap();
        assert!(constant.is_valid());
        let bad = GkmTuple::new(
            Theory::H,
            c.clone(),
            vec![parse(Theory::H, 2, "0"), parse(Theory::H, 2, "x1"), parse(Theory::H, 2, "0")],
        )
        .unwrap();
        let f = bad.failures().unwrap();
        assert_eq!(f.iter().map(|d| (d.i, d.j)).collect::<Vec<_>>(), vec![(1, 0)]);
    }

    #[test]
    fn epsilon_corresponds_to_its_tuple() {
        let c = chi(&[1, 1, 2]);
        let k = Theory::K;
        let t = GkmTuple::new(k, c.clone(), vec![parse(k, 2, "1-a2"), parse(k, 2, "1-a1^2"), parse(k, 2, "0")]).unwrap();
        let f = gkm_to_piecewise(&t).unwrap();
        let comps: Vec<String> = f.components().iter().map(|p| p.to_string()).collect();
        assert_eq!(comps, vec!["0", "-a1^2 + 1", "-a2 + 1"]);
        assert!(f.is_valid());
        assert_eq!(piecewise_to_gkm(&f, &c).unwrap(), t);
    }

    #[test]
    fn generators_are_valid_and_map_to_valid_elements() {
        for w in [&[1, 1][..], &[1, 1, 2], &[1, 1, 4], &[1, 1, 2, 6]] {
            let c = chi(w);
            for theory in [Theory::H, Theory::K] {
                for g in generator_tuples(&c, theory).unwrap() {
                    assert!(g.is_valid(), "{w:?} {theory}");
                    assert!(gkm_to_piecewise(&g).unwrap().is_valid());
                }
            }
        }
    }

    #[test]
    fn invalid_tuples_are_rejected_by_h() {
        let c = chi(&[1, 1, 2]);
        let h = Theory::H;
        let bad = GkmTuple::new(h, c, vec![parse(h, 2, "0"), parse(h, 2, "x1"), parse(h, 2, "0")]).unwrap();
        assert!(matches!(gkm_to_piecewise(&bad), Err(GkmError::Invalid(_))));
    }

    #[test]
    fn wrong_fan_is_rejected() {
        let c = chi(&[1, 1, 2]);
        let f = PiecewiseElement::<BigInt>::one(Theory::H, FanCharts::new(crate::fan::projective_space_fan(2)));
        assert!(matches!(piecewise_to_gkm(&f, &c), Err(GkmError::FanMismatch(_))));
        assert!(piecewise_to_gkm(&f, &chi(&[1, 1, 1])).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = random_valid_tuple(&mut rng, &chi(&[1, 1, 4]), Theory::K).unwrap();
        let text = serde_json::to_string(&t.to_json()).unwrap();
        let back: GkmJson = serde_json::from_str(&text).unwrap();
        assert_eq!(GkmTuple::from_json(&back).unwrap(), t);
    }

    #[test]
    fn characters_are_pairwise_independent() {
        // every normalized divisive weight vector with n <= 4 and chi_n <= 64
        fn extend(prefix: Vec<u64>, len: usize, out: &mut Vec<Vec<u64>>) {
            if prefix.len() == len {
                out.push(prefix);
                return;
            }
            let last = *prefix.last().unwrap();
            let mut m = 1;
            while last * m <= 64 {
                let mut next = prefix.clone();
                next.push(last * m);
                extend(next, len, out);
                m += 1;
            }
        }
        let mut all = Vec::new();
        for len in 2..=5 {
            extend(vec![1, 1], len, &mut all);
        }
        let mut checked = 0;
        for w in all {
            let c = chi(&w);
            assert!(dependent_character_pairs(&c).unwrap().is_empty(), "{w:?}");
            checked += 1;
        }
        assert!(checked > 100);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn prop_h_round_trips_and_multiplies(seed in 0u64..1_000_000, k in proptest::bool::ANY, wide in proptest::bool::ANY) {
            let theory = if k { Theory::K } else { Theory::H };
            let c = if wide { chi(&[1, 1, 4]) } else { chi(&[1, 1, 2]) };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_valid_tuple(&mut rng, &c, theory).unwrap();
            let t = random_valid_tuple(&mut rng, &c, theory).unwrap();
            let hs = gkm_to_piecewise(&s).unwrap();
            let ht = gkm_to_piecewise(&t).unwrap();
            proptest::prop_assert!(hs.is_valid());
            proptest::prop_assert_eq!(&piecewise_to_gkm(&hs, &c).unwrap(), &s);
            let st = s.mul(&t).unwrap();
            proptest::prop_assert_eq!(gkm_to_piecewise(&st).unwrap(), hs.mul(&ht).unwrap());
        }
    }
}
