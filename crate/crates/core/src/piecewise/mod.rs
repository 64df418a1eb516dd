//! Piecewise algebras on fans: compatible tuples of ring elements, one per
//! maximal cone.
//!
//! Components are written in the ambient variables of the theory. The
//! component on a cone `sigma` is only meaningful modulo the Euler classes of
//! the characters orthogonal to `sigma`; restriction to a face makes this
//! concrete by projecting the character lattice onto `Z^n / sigma^perp`.

mod graded;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{AlgebraError, Coefficient, MPoly, Space, VarKind, Variable};
use crate::fan::{projective_space_fan, wps_fan, Cone, Fan, FanError, FanJson, WeightVector};
use crate::intlat::{quotient_projection, IntMatrix, LatticeError};
use crate::transforms::b_series;

pub use graded::{
    express_in_module_basis, graded_basis, hilbert_function, ordinary_cohomology_ranks, CohomologyRank,
    GradedBasisReport, ModuleBound,
};

/// Truncation order used when none is given.
pub const DEFAULT_TRUNC: u32 = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PiecewiseError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("component on cone {0} is not in the ambient ring of the theory")]
    WrongSpace(String),
    #[error("theory {theory} has coefficients in {expected}, not {got}")]
    CoefficientRing { theory: String, expected: &'static str, got: &'static str },
    #[error("operands belong to different theories or fans")]
    Mismatch,
    #[error("cone {sigma} is not a face of {tau}")]
    NotAFace { sigma: String, tau: String },
    #[error("cone {0} is not a maximal cone")]
    NotMaximal(String),
    #[error("missing component for cone {0}")]
    MissingComponent(String),
    #[error("unknown theory tag {0:?}")]
    UnknownTheory(String),
    #[error("degree {0} is odd")]
    OddDegree(u32),
    #[error("fan is not complete and simplicial")]
    NotComplete,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("bound {bound} too small to decide; at least {needed} required")]
    BoundTooSmall { needed: i64, bound: i64 },
    #[error("malformed input: {0}")]
    Malformed(String),
}

/// The equivariant theories whose piecewise algebras are modelled.
///
/// | tag       | ambient ring                                   | scalars |
/// |-----------|------------------------------------------------|---------|
/// | `H`       | `Z[x1..xn]`                                    | Z       |
/// | `HQ`      | `Q[x1..xn]`                                    | Q       |
/// | `K`       | `Z[a1^±..an^±, z^±]`                           | Z       |
/// | `BorelK`  | `Z[z^±][[g1..gn]]`, truncated                  | Z       |
/// | `HR`      | `Q[z^±][[x1..xn]]`, truncated                  | Q       |
/// | `BorelMU` | `Z[b1..bD][[x1..xn]]`, truncated at `D`        | Z       |
/// | `MUu`     | `Z[b1..bD][[u1..un]]`, read through `u -> B(x)`| Z       |
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Theory {
    H,
    HQ,
    K,
    BorelK { trunc: u32 },
    HR { trunc: u32 },
    BorelMU { trunc: u32 },
    MUu { trunc: u32 },
}

impl Theory {
    pub fn from_tag(tag: &str, trunc: Option<u32>) -> Result<Self, PiecewiseError> {
        let d = trunc.unwrap_or(DEFAULT_TRUNC);
        Ok(match tag {
            "H" => Theory::H,
            "HQ" => Theory::HQ,
            "K" => Theory::K,
            "BorelK" => Theory::BorelK { trunc: d },
            "HR" => Theory::HR { trunc: d },
            "BorelMU" => Theory::BorelMU { trunc: d },
            "MUu" => Theory::MUu { trunc: d },
            other => return Err(PiecewiseError::UnknownTheory(other.to_string())),
        })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Theory::H => "H",
            Theory::HQ => "HQ",
            Theory::K => "K",
            Theory::BorelK { .. } => "BorelK",
            Theory::HR { .. } => "HR",
            Theory::BorelMU { .. } => "BorelMU",
            Theory::MUu { .. } => "MUu",
        }
    }

    pub fn trunc(&self) -> Option<u32> {
        match *self {
            Theory::BorelK { trunc } | Theory::HR { trunc } | Theory::BorelMU { trunc } | Theory::MUu { trunc } => {
                Some(trunc)
            }
            _ => None,
        }
    }

    /// The same theory at another truncation order.
    pub fn with_trunc(&self, d: u32) -> Self {
        match self {
            Theory::BorelK { .. } => Theory::BorelK { trunc: d },
            Theory::HR { .. } => Theory::HR { trunc: d },
            Theory::BorelMU { .. } => Theory::BorelMU { trunc: d },
            Theory::MUu { .. } => Theory::MUu { trunc: d },
            other => *other,
        }
    }

    pub fn coefficient_ring(&self) -> &'static str {
        match self {
            Theory::HQ | Theory::HR { .. } => "Q",
            _ => "Z",
        }
    }

    fn coordinate(&self) -> (&'static str, VarKind, i32) {
        match self {
            Theory::H | Theory::HQ => ("x", VarKind::Polynomial, 2),
            Theory::K => ("a", VarKind::Laurent, 0),
            Theory::BorelK { .. } => ("g", VarKind::Series, 0),
            Theory::HR { .. } | Theory::BorelMU { .. } => ("x", VarKind::Series, 2),
            Theory::MUu { .. } => ("u", VarKind::Series, 2),
        }
    }

    fn parameters(&self) -> Vec<Variable> {
        match *self {
            Theory::K | Theory::BorelK { .. } | Theory::HR { .. } => vec![Variable::new("z", VarKind::Laurent, -2)],
            Theory::BorelMU { trunc } | Theory::MUu { trunc } => {
                (1..=trunc as i32).map(|i| Variable::new(format!("b{i}"), VarKind::Polynomial, -2 * i)).collect()
            }
            Theory::H | Theory::HQ => Vec::new(),
        }
    }

    fn space_with(&self, prefix: &str, kind: VarKind, degree: i32, n: usize) -> Arc<Space> {
        let mut vars: Vec<Variable> = (1..=n).map(|i| Variable::new(format!("{prefix}{i}"), kind, degree)).collect();
        vars.extend(self.parameters());
        Space::new(vars, self.trunc()).expect("theory spaces are well formed")
    }

    /// Ring in which the components live, for a fan in `Z^n`.
    pub fn ambient_space(&self, n: usize) -> Arc<Space> {
        let (prefix, kind, degree) = self.coordinate();
        self.space_with(prefix, kind, degree, n)
    }

    /// Ring of a cone with `d` rays, in coordinates `t1..td`. For `MUu` the
    /// cone coordinates are additive (`x`-type) coordinates.
    pub fn cone_space(&self, d: usize) -> Arc<Space> {
        let (_, kind, degree) = self.coordinate();
        self.space_with("t", kind, degree, d)
    }

    /// The coefficient ring, i.e. the ring of the zero cone.
    pub fn coefficient_space(&self) -> Arc<Space> {
        self.cone_space(0)
    }

    /// Image of an ambient element under the quotient map determined by the
    /// `d x n` character projection `pi`.
    pub fn restrict<S: Coefficient>(&self, f: &MPoly<S>, pi: &IntMatrix) -> Result<MPoly<S>, AlgebraError> {
        let target = self.cone_space(pi.rows());
        let n = pi.cols();
        match self {
            Theory::K => f.exponent_substitution(pi, &target),
            Theory::H | Theory::HQ | Theory::HR { .. } | Theory::BorelMU { .. } => {
                f.linear_substitution(&pi.transpose(), &target)
            }
            Theory::BorelK { .. } => {
                // g_j = 1 - a_j with a_j -> prod_k (1 - t_k)^{pi[k][j]}
                let one = MPoly::one(&target);
                let factors: Vec<MPoly<S>> = (0..pi.rows()).map(|k| &one - &MPoly::var(&target, k)).collect();
                let inverses =
                    factors.iter().map(|f| f.series_inverse()).collect::<Result<Vec<_>, _>>()?;
                f.substitute_with(&target, |j| {
                    (j < n).then(|| {
                        let mut prod = one.clone();
                        for k in 0..pi.rows() {
                            let e = pi.entry_i64(k, j);
                            let base = if e >= 0 { &factors[k] } else { &inverses[k] };
                            prod = &prod * &base.pow(e.unsigned_abs() as u32);
                        }
                        &one - &prod
                    })
                })
            }
            Theory::MUu { .. } => {
                let mut images = Vec::with_capacity(n);
                for j in 0..n {
                    let mut ell = MPoly::zero(&target);
                    for k in 0..pi.rows() {
                        let c = S::from_bigint(pi[(k, j)].clone());
                        ell = &ell + &MPoly::var(&target, k).scale(&c);
                    }
                    images.push(b_series(&ell)?);
                }
                f.substitute_with(&target, |j| (j < n).then(|| images[j].clone()))
            }
        }
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.trunc() {
            Some(d) => write!(f, "{}(D={d})", self.tag()),
            None => write!(f, "{}", self.tag()),
        }
    }
}

/// A fan together with the character projection of each of its cones.
#[derive(Debug, PartialEq, Eq)]
pub struct FanCharts {
    fan: Fan,
    projections: BTreeMap<Cone, IntMatrix>,
}

impl FanCharts {
    pub fn new(fan: Fan) -> Arc<Self> {
        let projections = fan
            .cones()
            .map(|c| {
                let pi = quotient_projection(&fan.orthogonal_lattice(c)).expect("orthogonal lattices are saturated");
                (c.clone(), pi)
            })
            .collect();
        Arc::new(FanCharts { fan, projections })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    /// `dim(c) x n` surjection whose kernel is the lattice orthogonal to `c`.
    pub fn projection(&self, c: &Cone) -> Result<&IntMatrix, PiecewiseError> {
        self.projections.get(c).ok_or_else(|| FanError::UnknownCone(c.to_string()).into())
    }
}

/// Incompatibility between the components on two maximal cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairFailure {
    pub first: Cone,
    pub second: Cone,
    pub face: Cone,
    /// Restriction of the difference of the two components to the face.
    pub difference: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub pairs_checked: usize,
    pub failures: Vec<PairFailure>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// One component per maximal cone, in the fan's maximal-cone order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseElement<S: Coefficient> {
    theory: Theory,
    charts: Arc<FanCharts>,
    components: Vec<MPoly<S>>,
}

impl<S: Coefficient> PiecewiseElement<S> {
    pub fn new(theory: Theory, charts: Arc<FanCharts>, components: Vec<MPoly<S>>) -> Result<Self, PiecewiseError> {
        if S::NAME != theory.coefficient_ring() {
            return Err(PiecewiseError::CoefficientRing {
                theory: theory.to_string(),
                expected: theory.coefficient_ring(),
                got: S::NAME,
            });
        }
        let cones = charts.fan.max_cones();
        if components.len() != cones.len() {
            return Err(PiecewiseError::ComponentCount { expected: cones.len(), got: components.len() });
        }
        let space = theory.ambient_space(charts.fan.ambient_dim());
        if let Some(i) = components.iter().position(|c| **c.space() != *space) {
            return Err(PiecewiseError::WrongSpace(cones[i].to_string()));
        }
        Ok(PiecewiseElement { theory, charts, components })
    }

    /// Builds an element from components keyed by maximal cone.
    pub fn from_map(
        theory: Theory,
        charts: Arc<FanCharts>,
        mut map: BTreeMap<Cone, MPoly<S>>,
    ) -> Result<Self, PiecewiseError> {
        let mut components = Vec::new();
        for c in charts.fan.max_cones() {
            components.push(map.remove(c).ok_or_else(|| PiecewiseError::MissingComponent(c.to_string()))?);
        }
        if let Some(extra) = map.keys().next() {
            return Err(PiecewiseError::NotMaximal(extra.to_string()));
        }
        Self::new(theory, charts, components)
    }

    /// The global element `g`: the same ambient element on every cone.
    pub fn global(theory: Theory, charts: Arc<FanCharts>, g: MPoly<S>) -> Result<Self, PiecewiseError> {
        let m = charts.fan.max_cones().len();
        Self::new(theory, charts, vec![g; m])
    }

    pub fn zero(theory: Theory, charts: Arc<FanCharts>) -> Self {
        let space = theory.ambient_space(charts.fan.ambient_dim());
        Self::global(theory, charts, MPoly::zero(&space)).expect("zero is global")
    }

    pub fn one(theory: Theory, charts: Arc<FanCharts>) -> Self {
        let space = theory.ambient_space(charts.fan.ambient_dim());
        Self::global(theory, charts, MPoly::one(&space)).expect("one is global")
    }

    pub fn theory(&self) -> Theory {
        self.theory
    }

    pub fn charts(&self) -> &Arc<FanCharts> {
        &self.charts
    }

    pub fn fan(&self) -> &Fan {
        &self.charts.fan
    }

    pub fn ambient_space(&self) -> Arc<Space> {
        self.theory.ambient_space(self.fan().ambient_dim())
    }

    pub fn components(&self) -> &[MPoly<S>] {
        &self.components
    }

    pub fn component(&self, c: &Cone) -> Option<&MPoly<S>> {
        let i = self.fan().max_cones().iter().position(|d| d == c)?;
        Some(&self.components[i])
    }

    /// Image of the component on `tau` in the ring of its face `sigma`.
    pub fn restrict(&self, tau: &Cone, sigma: &Cone) -> Result<MPoly<S>, PiecewiseError> {
        let f = self.component(tau).ok_or_else(|| PiecewiseError::NotMaximal(tau.to_string()))?;
        if !sigma.is_face_of(tau) {
            return Err(PiecewiseError::NotAFace { sigma: sigma.to_string(), tau: tau.to_string() });
        }
        Ok(self.theory.restrict(f, self.charts.projection(sigma)?)?)
    }

    /// Checks every pair of maximal cones on their common face.
    pub fn validate(&self) -> Result<ValidationReport, PiecewiseError> {
        let cones = self.fan().max_cones();
        let mut report = ValidationReport::default();
        for i in 0..cones.len() {
            for j in i + 1..cones.len() {
                let face = cones[i].intersect(&cones[j]);
                let pi = self.charts.projection(&face)?;
                let diff = &self.components[i] - &self.components[j];
                let r = self.theory.restrict(&diff, pi)?;
                report.pairs_checked += 1;
                if !r.is_zero() {
                    report.failures.push(PairFailure {
                        first: cones[i].clone(),
                        second: cones[j].clone(),
                        face,
                        difference: r.to_string(),
                    });
                }
            }
        }
        Ok(report)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().map(|r| r.is_valid()).unwrap_or(false)
    }

    /// Zero in the piecewise algebra: every component vanishes in the ring of
    /// its own cone.
    pub fn is_zero(&self) -> bool {
        let n = self.fan().ambient_dim();
        self.fan().max_cones().iter().zip(&self.components).all(|(c, f)| {
            if c.dim() == n {
                f.is_zero()
            } else {
                let pi = self.charts.projection(c).expect("maximal cones have charts");
                self.theory.restrict(f, pi).map(|r| r.is_zero()).unwrap_or(false)
            }
        })
    }

    fn check_compatible(&self, other: &Self) -> Result<(), PiecewiseError> {
        if self.theory != other.theory || (!Arc::ptr_eq(&self.charts, &other.charts) && self.charts != other.charts) {
            return Err(PiecewiseError::Mismatch);
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Self,
        op: impl Fn(&MPoly<S>, &MPoly<S>) -> MPoly<S>,
    ) -> Result<Self, PiecewiseError> {
        self.check_compatible(other)?;
        let components = self.components.iter().zip(&other.components).map(|(a, b)| op(a, b)).collect();
        Ok(PiecewiseElement { theory: self.theory, charts: self.charts.clone(), components })
    }

    pub fn add(&self, other: &Self) -> Result<Self, PiecewiseError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PiecewiseError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PiecewiseError> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn neg(&self) -> Self {
        PiecewiseElement {
            theory: self.theory,
            charts: self.charts.clone(),
            components: self.components.iter().map(|c| -c).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        self.map_components(|c| c.pow(k))
    }

    /// Product with an element of the ambient ring.
    pub fn scale(&self, g: &MPoly<S>) -> Result<Self, PiecewiseError> {
        if **g.space() != *self.ambient_space() {
            return Err(PiecewiseError::Mismatch);
        }
        Ok(self.map_components(|c| c * g))
    }

    /// Applies `f` to every component, keeping theory and fan.
    pub fn map_components(&self, f: impl Fn(&MPoly<S>) -> MPoly<S>) -> Self {
        PiecewiseElement {
            theory: self.theory,
            charts: self.charts.clone(),
            components: self.components.iter().map(f).collect(),
        }
    }

    /// Applies a conewise ring map into another theory on the same fan.
    pub fn transform<T: Coefficient>(
        &self,
        target: Theory,
        f: impl Fn(&MPoly<S>) -> Result<MPoly<T>, AlgebraError>,
    ) -> Result<PiecewiseElement<T>, PiecewiseError> {
        let components = self.components.iter().map(f).collect::<Result<Vec<_>, _>>()?;
        PiecewiseElement::new(target, self.charts.clone(), components)
    }

    /// The component on the zero cone, in the coefficient ring.
    pub fn augmentation(&self) -> Result<MPoly<S>, PiecewiseError> {
        let pi = self.charts.projection(&Cone::zero())?;
        Ok(self.theory.restrict(&self.components[0], pi)?)
    }

    pub fn to_json(&self) -> PiecewiseJson {
        PiecewiseJson {
            theory: self.theory.tag().to_string(),
            trunc: self.theory.trunc(),
            fan: FanRef::Inline(self.fan().to_json()),
            components: self
                .fan()
                .max_cones()
                .iter()
                .zip(&self.components)
                .map(|(c, f)| (c.to_string(), f.to_string()))
                .collect(),
        }
    }

    pub fn from_json(j: &PiecewiseJson) -> Result<Self, PiecewiseError> {
        let theory = Theory::from_tag(&j.theory, j.trunc)?;
        let charts = FanCharts::new(j.fan.resolve()?);
        let space = theory.ambient_space(charts.fan.ambient_dim());
        let mut map = BTreeMap::new();
        for (id, text) in &j.components {
            let cone: Cone = id.parse()?;
            let f = MPoly::parse(&space, text)?;
            if map.insert(cone, f).is_some() {
                return Err(PiecewiseError::Malformed(format!("cone {id} listed twice")));
            }
        }
        Self::from_map(theory, charts, map)
    }
}

/// How a fan is named in JSON documents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FanRef {
    Weights { weights: Vec<u64> },
    Projective { projective: usize },
    Inline(FanJson),
}

impl FanRef {
    pub fn resolve(&self) -> Result<Fan, PiecewiseError> {
        Ok(match self {
            FanRef::Weights { weights } => wps_fan(&WeightVector::new(weights.clone())?)?,
            FanRef::Projective { projective } => {
                if *projective == 0 {
                    return Err(PiecewiseError::Malformed("projective space needs n >= 1".into()));
                }
                projective_space_fan(*projective)
            }
            FanRef::Inline(j) => Fan::from_json(j)?,
        })
    }
}

/// On-disk form of a piecewise element; components are keyed by the
/// comma-separated ray indices of the maximal cones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecewiseJson {
    pub theory: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc: Option<u32>,
    pub fan: FanRef,
    pub components: BTreeMap<String, String>,
}
