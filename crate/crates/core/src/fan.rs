//! Simplicial rational fans, the weighted projective fan and fan maps.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intlat::{complement_basis, IntMatrix, LatticeBasis};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),
    #[error("weight vector {weights:?} is not normalized: the weights other than position {omitted} have gcd {gcd}")]
    NotNormalized { weights: Vec<u64>, omitted: usize, gcd: u64 },
    #[error("weight vector {weights:?} is not divisive: {lower} does not divide {upper}")]
    NotDivisive { weights: Vec<u64>, lower: u64, upper: u64 },
    #[error("ray {index} has length {got}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, got: usize },
    #[error("ray {0} is zero or not primitive")]
    NonPrimitiveRay(usize),
    #[error("rays {0} and {1} coincide")]
    DuplicateRay(usize, usize),
    #[error("cone {0} refers to a missing ray")]
    BadRayIndex(String),
    #[error("cone {0} is not simplicial")]
    NotSimplicial(String),
    #[error("cone {0} is not in the fan")]
    UnknownCone(String),
    #[error("maximal cone {0} is not full-dimensional")]
    NotFullDimensional(String),
    #[error("image of cone {0} lies in no target cone")]
    ImageNotInCone(String),
    #[error("fan map matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    MapShape { rows: usize, cols: usize, expected_rows: usize, expected_cols: usize },
    #[error("malformed cone id {0:?}")]
    BadConeId(String),
}

/// Weights `chi_0, ..., chi_n` of a weighted projective space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct WeightVector {
    weights: Vec<u64>,
}

impl TryFrom<Vec<u64>> for WeightVector {
    type Error = FanError;
    fn try_from(w: Vec<u64>) -> Result<Self, FanError> {
        WeightVector::new(w)
    }
}

impl From<WeightVector> for Vec<u64> {
    fn from(w: WeightVector) -> Self {
        w.weights
    }
}

impl WeightVector {
    pub fn new(weights: Vec<u64>) -> Result<Self, FanError> {
        if weights.len() < 2 {
            return Err(FanError::InvalidWeights("need at least two weights".into()));
        }
        if weights.iter().any(|&w| w == 0) {
            return Err(FanError::InvalidWeights("weights must be positive".into()));
        }
        Ok(WeightVector { weights })
    }

    /// `(1, ..., 1)` of length `n + 1`.
    pub fn ones(n: usize) -> Self {
        WeightVector { weights: vec![1; n + 1] }
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// The index `n`, one less than the number of weights.
    pub fn n(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn get(&self, i: usize) -> u64 {
        self.weights[i]
    }

    fn normalization_failure(&self) -> Option<(usize, u64)> {
        (0..self.weights.len()).find_map(|skip| {
            let g = self
                .weights
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .fold(0u64, |g, (_, &w)| g.gcd(&w));
            (g != 1).then_some((skip, g))
        })
    }

    /// Every `n` of the weights are coprime.
    pub fn is_normalized(&self) -> bool {
        self.normalization_failure().is_none()
    }

    /// The normalized weight vector of an equivariantly homeomorphic weighted
    /// projective space: first divide by the common gcd, then, while the
    /// weights other than `chi_j` share a factor `d`, divide them by `d`.
    /// Each step is valid because `d` is then coprime to `chi_j`.
    pub fn normalized(&self) -> WeightVector {
        let mut w = self.weights.clone();
        let g = w.iter().fold(0u64, |g, &x| g.gcd(&x));
        w.iter_mut().for_each(|x| *x /= g);
        let mut v = WeightVector { weights: w };
        while let Some((skip, d)) = v.normalization_failure() {
            for (i, x) in v.weights.iter_mut().enumerate() {
                if i != skip {
                    *x /= d;
                }
            }
        }
        v
    }

    /// `chi_j` divides `chi_n` for every `j < n`.
    pub fn is_weakly_divisive(&self) -> bool {
        let last = *self.weights.last().expect("nonempty");
        self.weights.iter().all(|&w| last % w == 0)
    }

    /// `chi_{j-1}` divides `chi_j` for every `j`.
    pub fn is_divisive(&self) -> bool {
        self.weights.windows(2).all(|p| p[1] % p[0] == 0)
    }

    /// Ok when the weights are normalized and divisive; otherwise names the
    /// first failing condition.
    pub fn check_normalized_divisive(&self) -> Result<(), FanError> {
        if let Some((omitted, gcd)) = self.normalization_failure() {
            return Err(FanError::NotNormalized { weights: self.weights.clone(), omitted, gcd });
        }
        if let Some(p) = self.weights.windows(2).find(|p| p[1] % p[0] != 0) {
            return Err(FanError::NotDivisive { weights: self.weights.clone(), lower: p[0], upper: p[1] });
        }
        Ok(())
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.weights.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A cone of a simplicial fan, as a sorted set of ray indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Cone {
    rays: Vec<usize>,
}

impl Cone {
    pub fn new(rays: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = rays.into_iter().collect();
        Cone { rays: set.into_iter().collect() }
    }

    pub fn zero() -> Self {
        Cone { rays: Vec::new() }
    }

    pub fn rays(&self) -> &[usize] {
        &self.rays
    }

    pub fn dim(&self) -> usize {
        self.rays.len()
    }

    pub fn contains_ray(&self, r: usize) -> bool {
        self.rays.binary_search(&r).is_ok()
    }

    pub fn is_face_of(&self, other: &Cone) -> bool {
        self.rays.iter().all(|&r| other.contains_ray(r))
    }

    pub fn intersect(&self, other: &Cone) -> Cone {
        Cone { rays: self.rays.iter().copied().filter(|&r| other.contains_ray(r)).collect() }
    }

    /// All faces, the zero cone and the cone itself included.
    pub fn faces(&self) -> Vec<Cone> {
        let k = self.rays.len();
        (0u64..(1 << k))
            .map(|mask| Cone { rays: (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| self.rays[i]).collect() })
            .collect()
    }
}

/// Comma-separated ray indices; the zero cone prints as the empty string.
impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rays.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Cone {
    type Err = FanError;
    fn from_str(s: &str) -> Result<Self, FanError> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Cone::zero());
        }
        let rays = s
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| FanError::BadConeId(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let cone = Cone::new(rays.iter().copied());
        if cone.dim() != rays.len() {
            return Err(FanError::BadConeId(s.to_string()));
        }
        Ok(cone)
    }
}

/// On-disk form of a fan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanJson {
    pub ambient_dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

/// A simplicial fan: primitive rays and the cones generated by subsets of
/// them, closed under taking faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    ambient_dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Cone>,
    cones: BTreeSet<Cone>,
}

fn gcd_i64(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

impl Fan {
    /// Builds and validates a fan from rays and generating cones. Generating
    /// cones contained in other generating cones are dropped; the order of
    /// the remaining ones is kept. With no generators the zero cone is the
    /// only cone.
    pub fn new(ambient_dim: usize, rays: Vec<Vec<i64>>, generators: Vec<Cone>) -> Result<Self, FanError> {
        for (i, r) in rays.iter().enumerate() {
            if r.len() != ambient_dim {
                return Err(FanError::DimensionMismatch { index: i, expected: ambient_dim, got: r.len() });
            }
            if gcd_i64(r) != 1 {
                return Err(FanError::NonPrimitiveRay(i));
            }
            if let Some(j) = rays[..i].iter().position(|s| s == r) {
                return Err(FanError::DuplicateRay(j, i));
            }
        }
        let mut max_cones: Vec<Cone> = Vec::new();
        for (i, c) in generators.iter().enumerate() {
            if c.rays.iter().any(|&r| r >= rays.len()) {
                return Err(FanError::BadRayIndex(c.to_string()));
            }
            let dominated = generators
                .iter()
                .enumerate()
                .any(|(j, d)| j != i && c.is_face_of(d) && (c != d || j < i));
            if !dominated {
                max_cones.push(c.clone());
            }
        }
        if max_cones.is_empty() {
            max_cones.push(Cone::zero());
        }
        let mut fan = Fan { ambient_dim, rays, max_cones, cones: BTreeSet::new() };
        for c in &fan.max_cones {
            if fan.ray_matrix(c).rank() != c.dim() {
                return Err(FanError::NotSimplicial(c.to_string()));
            }
        }
        let mut cones = BTreeSet::new();
        cones.insert(Cone::zero());
        for c in &fan.max_cones {
            cones.extend(c.faces());
        }
        fan.cones = cones;
        Ok(fan)
    }

    pub fn from_json(j: &FanJson) -> Result<Self, FanError> {
        Fan::new(j.ambient_dim, j.rays.clone(), j.max_cones.iter().map(|c| Cone::new(c.iter().copied())).collect())
    }

    pub fn to_json(&self) -> FanJson {
        FanJson {
            ambient_dim: self.ambient_dim,
            rays: self.rays.clone(),
            max_cones: self.max_cones.iter().map(|c| c.rays.clone()).collect(),
        }
    }

    /// Re-runs every structural check.
    pub fn validate(&self) -> Result<(), FanError> {
        let rebuilt = Fan::from_json(&self.to_json())?;
        debug_assert_eq!(&rebuilt, self);
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.max_cones
    }

    /// Every cone, ordered by ray set.
    pub fn cones(&self) -> impl Iterator<Item = &Cone> {
        self.cones.iter()
    }

    pub fn contains_cone(&self, c: &Cone) -> bool {
        self.cones.contains(c)
    }

    /// `ambient_dim x dim(c)` matrix whose columns are the rays of `c`.
    pub fn ray_matrix(&self, c: &Cone) -> IntMatrix {
        let cols: Vec<Vec<BigInt>> =
            c.rays.iter().map(|&r| self.rays[r].iter().map(|&x| BigInt::from(x)).collect()).collect();
        IntMatrix::from_columns_big(&cols, self.ambient_dim)
    }

    /// The `n x m` matrix of all rays.
    pub fn xi(&self) -> IntMatrix {
        self.ray_matrix(&Cone::new(0..self.rays.len()))
    }

    /// Saturated lattice of integer vectors orthogonal to the cone.
    pub fn orthogonal_lattice(&self, c: &Cone) -> LatticeBasis {
        complement_basis(&self.ray_matrix(c)).expect("cones of a fan are simplicial")
    }

    /// The common face of two cones of the fan.
    pub fn cone_intersection(&self, a: &Cone, b: &Cone) -> Result<Cone, FanError> {
        for c in [a, b] {
            if !self.contains_cone(c) {
                return Err(FanError::UnknownCone(c.to_string()));
            }
        }
        Ok(a.intersect(b))
    }

    /// Per maximal cone: whether its rays extend to a basis of `Z^n`.
    pub fn cone_smoothness(&self) -> Vec<(Cone, bool)> {
        self.max_cones
            .iter()
            .map(|c| {
                let basis = LatticeBasis::new(self.ambient_dim, self.ray_matrix(c).transpose().row_vecs())
                    .expect("simplicial cone");
                (c.clone(), basis.is_saturated())
            })
            .collect()
    }

    pub fn is_smooth(&self) -> bool {
        self.cone_smoothness().iter().all(|(_, s)| *s)
    }

    /// For fans whose maximal cones are all full-dimensional: every ridge
    /// borders exactly two maximal cones, lying on opposite sides of it, and
    /// the maximal cones are connected through ridges.
    pub fn is_complete_simplicial(&self) -> Result<bool, FanError> {
        let n = self.ambient_dim;
        if let Some(c) = self.max_cones.iter().find(|c| c.dim() != n) {
            return Err(FanError::NotFullDimensional(c.to_string()));
        }
        let mut ridges: HashMap<Cone, Vec<(usize, usize)>> = HashMap::new();
        for (i, c) in self.max_cones.iter().enumerate() {
            for &r in &c.rays {
                let ridge = Cone::new(c.rays.iter().copied().filter(|&s| s != r));
                ridges.entry(ridge).or_default().push((i, r));
            }
        }
        let mut adjacency = vec![Vec::new(); self.max_cones.len()];
        for (ridge, sides) in &ridges {
            if sides.len() != 2 {
                return Ok(false);
            }
            let normal = self.orthogonal_lattice(ridge);
            let w = &normal.vectors()[0];
            let side = |r: usize| -> BigInt { w.iter().zip(&self.rays[r]).map(|(a, &b)| a * b).sum() };
            let (sa, sb) = (side(sides[0].1), side(sides[1].1));
            if sa.signum() == sb.signum() {
                return Ok(false);
            }
            adjacency[sides[0].0].push(sides[1].0);
            adjacency[sides[1].0].push(sides[0].0);
        }
        let mut seen = vec![false; self.max_cones.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for &j in &adjacency[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        Ok(seen.iter().all(|&s| s))
    }

    /// Same fan with rays listed in a different order: new ray `i` is old
    /// ray `perm[i]`.
    pub fn permute_rays(&self, perm: &[usize]) -> Fan {
        let mut inverse = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let rays = perm.iter().map(|&old| self.rays[old].clone()).collect();
        let cones = self.max_cones.iter().map(|c| Cone::new(c.rays.iter().map(|&r| inverse[r]))).collect();
        Fan::new(self.ambient_dim, rays, cones).expect("permutation of a valid fan")
    }

    /// Fan of the product of two toric varieties. Maximal cones are listed
    /// with the first factor's index varying slowest.
    pub fn product(a: &Fan, b: &Fan) -> Fan {
        let n = a.ambient_dim + b.ambient_dim;
        let mut rays = Vec::with_capacity(a.num_rays() + b.num_rays());
        for r in &a.rays {
            let mut v = r.clone();
            v.resize(n, 0);
            rays.push(v);
        }
        for r in &b.rays {
            let mut v = vec![0; a.ambient_dim];
            v.extend_from_slice(r);
            rays.push(v);
        }
        let shift = a.num_rays();
        let mut cones = Vec::new();
        for c in &a.max_cones {
            for d in &b.max_cones {
                cones.push(Cone::new(c.rays.iter().copied().chain(d.rays.iter().map(|&r| r + shift))));
            }
        }
        Fan::new(n, rays, cones).expect("product of valid fans")
    }

    /// The fan in `Z^m` with rays `e_0, ..., e_{m-1}` whose cones are in
    /// bijection with the cones of `self`.
    pub fn coordinate_lift(&self) -> Fan {
        let m = self.num_rays();
        let rays = (0..m)
            .map(|i| {
                let mut v = vec![0; m];
                v[i] = 1;
                v
            })
            .collect();
        Fan::new(m, rays, self.max_cones.clone()).expect("coordinate cones are simplicial")
    }
}

/// Fan of the weighted projective space with weights `chi`: rays
/// `r_0 = (-1, -chi_2, ..., -chi_n)` and `r_j = e_j`; the maximal cone
/// `sigma_k` is spanned by every ray except `r_k`, listed in order of `k`.
pub fn wps_fan(chi: &WeightVector) -> Result<Fan, FanError> {
    chi.check_normalized_divisive()?;
    let n = chi.n();
    let mut rays = Vec::with_capacity(n + 1);
    let mut r0 = vec![-1i64];
    r0.extend(chi.weights()[2..].iter().map(|&w| -(w as i64)));
    rays.push(r0);
    for j in 1..=n {
        let mut v = vec![0i64; n];
        v[j - 1] = 1;
        rays.push(v);
    }
    let cones = (0..=n).map(|k| Cone::new((0..=n).filter(|&i| i != k))).collect();
    Fan::new(n, rays, cones)
}

pub fn projective_space_fan(n: usize) -> Fan {
    assert!(n >= 1, "projective space needs n >= 1");
    wps_fan(&WeightVector::ones(n)).expect("(1,...,1) is normalized and divisive")
}

/// A lattice map `Z^{n'} -> Z^n` carrying every cone of `source` into a cone
/// of `target`.
#[derive(Clone, Debug)]
pub struct FanMap {
    matrix: IntMatrix,
    source: Fan,
    target: Fan,
}

impl FanMap {
    pub fn new(matrix: IntMatrix, source: Fan, target: Fan) -> Result<Self, FanError> {
        if matrix.rows() != target.ambient_dim || matrix.cols() != source.ambient_dim {
            return Err(FanError::MapShape {
                rows: matrix.rows(),
                cols: matrix.cols(),
                expected_rows: target.ambient_dim,
                expected_cols: source.ambient_dim,
            });
        }
        let map = FanMap { matrix, source, target };
        for c in map.source.max_cones() {
            map.apply(c)?;
        }
        Ok(map)
    }

    /// The matrix of all rays, viewed as a map from [`Fan::coordinate_lift`].
    pub fn from_ray_matrix(fan: &Fan) -> Self {
        FanMap::new(fan.xi(), fan.coordinate_lift(), fan.clone()).expect("rays map onto their cones")
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn source(&self) -> &Fan {
        &self.source
    }

    pub fn target(&self) -> &Fan {
        &self.target
    }

    /// The smallest cone of the target containing the image of `c`.
    pub fn apply(&self, c: &Cone) -> Result<Cone, FanError> {
        if !self.source.contains_cone(c) {
            return Err(FanError::UnknownCone(c.to_string()));
        }
        let images: Vec<Vec<BigInt>> = c
            .rays
            .iter()
            .map(|&r| {
                let v: Vec<BigInt> = self.source.rays[r].iter().map(|&x| BigInt::from(x)).collect();
                self.matrix.mul_vec(&v)
            })
            .collect();
        let mut result: Option<Cone> = None;
        for t in self.target.cones() {
            let m = self.target.ray_matrix(t);
            if images.iter().all(|v| in_simplicial_cone(&m, v)) {
                result = Some(match result {
                    None => t.clone(),
                    Some(acc) => acc.intersect(t),
                });
            }
        }
        result.ok_or_else(|| FanError::ImageNotInCone(c.to_string()))
    }
}

/// Whether `v` is a nonnegative combination of the independent columns of `m`.
fn in_simplicial_cone(m: &IntMatrix, v: &[BigInt]) -> bool {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| BigRational::from_integer(m[(i, j)].clone()))
                .chain(std::iter::once(BigRational::from_integer(v[i].clone())))
                .collect()
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for j in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][j].is_zero()) else { continue };
        a.swap(r, p);
        let pivot = a[r][j].clone();
        for x in a[r].iter_mut() {
            *x /= &pivot;
        }
        for i in 0..rows {
            if i != r && !a[i][j].is_zero() {
                let f = a[i][j].clone();
                for k in 0..=cols {
                    let d = &a[r][k] * &f;
                    a[i][k] -= d;
                }
            }
        }
        pivot_cols.push(j);
        r += 1;
    }
    if (r..rows).any(|i| !a[i][cols].is_zero()) {
        return false;
    }
    (0..r).all(|i| !a[i][cols].is_negative())
}
