//! Graded pieces of piecewise polynomial algebras, computed as kernels of
//! integer compatibility systems.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{FanCharts, PiecewiseElement, PiecewiseError, Theory};
use crate::exactalg::{Exponent, MPoly};
use crate::fan::Cone;
use crate::intlat::{kernel_basis, smith_normal_form, solve_integer, IntMatrix, LatticeBasis};

/// Exponent vectors of total degree `k` in `n` variables, in descending
/// lexicographic order.
pub(crate) fn monomials(n: usize, k: u32) -> Vec<Exponent> {
    fn rec(n: usize, k: u32, prefix: &mut Vec<i32>, out: &mut Vec<Exponent>) {
        if prefix.len() + 1 == n {
            prefix.push(k as i32);
            out.push(prefix.iter().copied().collect());
            prefix.pop();
            return;
        }
        for e in (0..=k).rev() {
            prefix.push(e as i32);
            rec(n, k - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if k == 0 {
            out.push(Exponent::new());
        }
        return out;
    }
    rec(n, k, &mut Vec::new(), &mut out);
    out
}

fn require_complete(charts: &FanCharts) -> Result<(), PiecewiseError> {
    match charts.fan().is_complete_simplicial() {
        Ok(true) => Ok(()),
        _ => Err(PiecewiseError::NotComplete),
    }
}

/// Lattice of degree-`2k` piecewise polynomials, with the coordinates used.
#[derive(Clone, Debug)]
pub struct GradedBasisReport {
    /// Cohomological degree `2k`.
    pub degree: u32,
    pub rank: usize,
    pub basis: Vec<PiecewiseElement<BigInt>>,
    /// Kernel of the compatibility system inside `Z^{cones x monomials}`.
    pub lattice: LatticeBasis,
    /// Degree-`k` monomials; unknown `i * monomials.len() + j` is the
    /// coefficient of monomial `j` on maximal cone `i`.
    pub monomials: Vec<Exponent>,
}

/// The compatibility system in degree `2k`: rows are equations, columns are
/// the unknown coefficients.
fn compatibility_matrix(charts: &FanCharts, k: u32, monos: &[Exponent]) -> Result<IntMatrix, PiecewiseError> {
    let fan = charts.fan();
    let n = fan.ambient_dim();
    let cones = fan.max_cones();
    let space = Theory::H.ambient_space(n);
    let per_cone = monos.len();
    let mut images: HashMap<Cone, Vec<MPoly<BigInt>>> = HashMap::new();
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..cones.len() {
        for j in i + 1..cones.len() {
            let face = cones[i].intersect(&cones[j]);
            if !images.contains_key(&face) {
                let pi = charts.projection(&face)?;
                let imgs = monos
                    .iter()
                    .map(|e| Theory::H.restrict(&MPoly::monomial(&space, e, BigInt::one())?, pi))
                    .collect::<Result<Vec<_>, _>>()?;
                images.insert(face.clone(), imgs);
            }
            let imgs = &images[&face];
            let targets = monomials(face.dim(), k);
            for t in &targets {
                let mut row = vec![BigInt::zero(); cones.len() * per_cone];
                let mut nonzero = false;
                for (m, img) in imgs.iter().enumerate() {
                    let c = img.coefficient(t);
                    if !c.is_zero() {
                        nonzero = true;
                        row[j * per_cone + m] = -c.clone();
                        row[i * per_cone + m] = c;
                    }
                }
                if nonzero {
                    rows.push(row);
                }
            }
        }
    }
    Ok(IntMatrix::from_rows_big(rows, cones.len() * per_cone))
}

fn element_from_vector(
    charts: &Arc<FanCharts>,
    monos: &[Exponent],
    v: &[BigInt],
) -> Result<PiecewiseElement<BigInt>, PiecewiseError> {
    let space = Theory::H.ambient_space(charts.fan().ambient_dim());
    let m = charts.fan().max_cones().len();
    let mut components = Vec::with_capacity(m);
    for i in 0..m {
        let mut f = MPoly::zero(&space);
        for (j, e) in monos.iter().enumerate() {
            f.add_term(e.clone(), v[i * monos.len() + j].clone());
        }
        components.push(f);
    }
    PiecewiseElement::new(Theory::H, charts.clone(), components)
}

/// Coefficient vector of a homogeneous element in the coordinates of
/// [`GradedBasisReport::monomials`].
fn vector_of(f: &PiecewiseElement<BigInt>, monos: &[Exponent]) -> Vec<BigInt> {
    let mut v = Vec::with_capacity(f.components().len() * monos.len());
    for c in f.components() {
        for e in monos {
            v.push(c.coefficient(e));
        }
    }
    v
}

/// Integral piecewise polynomials of cohomological degree `degree` on a
/// complete simplicial fan.
pub fn graded_basis(charts: &Arc<FanCharts>, degree: u32) -> Result<GradedBasisReport, PiecewiseError> {
    if degree % 2 == 1 {
        return Err(PiecewiseError::OddDegree(degree));
    }
    require_complete(charts)?;
    let k = degree / 2;
    let monos = monomials(charts.fan().ambient_dim(), k);
    let a = compatibility_matrix(charts, k, &monos)?;
    let lattice = kernel_basis(&a);
    let basis = lattice
        .vectors()
        .iter()
        .map(|v| element_from_vector(charts, &monos, v))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GradedBasisReport { degree, rank: lattice.rank(), basis, lattice, monomials: monos })
}

/// Ranks of the even graded pieces in degrees `0, 2, ..., max_degree`. For
/// `H` these are lattice ranks over Z, for `HQ` dimensions over Q.
pub fn hilbert_function(theory: Theory, charts: &Arc<FanCharts>, max_degree: u32) -> Result<Vec<usize>, PiecewiseError> {
    require_complete(charts)?;
    let n = charts.fan().ambient_dim();
    let mut out = Vec::new();
    for degree in (0..=max_degree).step_by(2) {
        let rank = match theory {
            Theory::H => graded_basis(charts, degree)?.rank,
            Theory::HQ => {
                let monos = monomials(n, degree / 2);
                let a = compatibility_matrix(charts, degree / 2, &monos)?;
                a.cols() - a.rank()
            }
            other => {
                return Err(PiecewiseError::Unsupported(format!("Hilbert functions need H or HQ, got {other}")))
            }
        };
        out.push(rank);
    }
    Ok(out)
}

/// Rank and torsion of one graded piece of the quotient by the ideal of
/// global linear forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyRank {
    pub degree: u32,
    pub rank: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<BigInt>,
}

/// Graded ranks of `P_H / (x1, ..., xn) P_H`, computed degree by degree as
/// the cokernel of multiplication by the global coordinates.
pub fn ordinary_cohomology_ranks(
    charts: &Arc<FanCharts>,
    max_degree: u32,
) -> Result<Vec<CohomologyRank>, PiecewiseError> {
    require_complete(charts)?;
    let n = charts.fan().ambient_dim();
    let space = Theory::H.ambient_space(n);
    let mut out = Vec::new();
    let mut previous: Option<GradedBasisReport> = None;
    for degree in (0..=max_degree).step_by(2) {
        let current = graded_basis(charts, degree)?;
        let lattice_t = current.lattice.to_matrix().transpose();
        let mut image_rows = Vec::new();
        if let Some(prev) = &previous {
            for b in &prev.basis {
                for l in 0..n {
                    let prod = b.scale(&MPoly::var(&space, l))?;
                    let v = vector_of(&prod, &current.monomials);
                    let coords = solve_integer(&lattice_t, &v).expect("products of piecewise elements are piecewise");
                    image_rows.push(coords);
                }
            }
        }
        let image = IntMatrix::from_rows_big(image_rows, current.rank);
        let (s, _, _) = smith_normal_form(&image);
        let diag: Vec<BigInt> =
            (0..s.rows().min(s.cols())).map(|i| s[(i, i)].clone()).filter(|d| !d.is_zero()).collect();
        let torsion = diag.iter().filter(|d| !d.is_one()).cloned().collect();
        out.push(CohomologyRank { degree, rank: current.rank - diag.len(), torsion });
        previous = Some(current);
    }
    Ok(out)
}

/// Size limit on the coefficients sought by [`express_in_module_basis`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleBound {
    /// Coefficients of cohomological degree at most this (H).
    Degree(u32),
    /// Coefficients with every `a`-exponent in `[-W, W]` (K).
    Window(u32),
}

/// Solves `f = sum_i c_i basis_i` with `c_i` ambient ring elements within
/// `bound`. Returns `Ok(None)` when no such coefficients exist within the
/// bound. When every basis element is homogeneous in the H theory a degree
/// bound large enough for `f` makes `None` a proof that no coefficients
/// exist at all.
pub fn express_in_module_basis(
    f: &PiecewiseElement<BigInt>,
    basis: &[PiecewiseElement<BigInt>],
    bound: ModuleBound,
) -> Result<Option<Vec<MPoly<BigInt>>>, PiecewiseError> {
    if basis.iter().any(|b| b.check_compatible(f).is_err()) {
        return Err(PiecewiseError::Mismatch);
    }
    require_complete(f.charts())?;
    let space = f.ambient_space();
    let n = f.fan().ambient_dim();
    let candidates: Vec<Vec<Exponent>> = match (f.theory(), bound) {
        (Theory::H, ModuleBound::Degree(d)) => {
            let cdeg = |c: &[MPoly<BigInt>]| c.iter().filter_map(MPoly::total_degree).max();
            let fdeg = cdeg(f.components()).unwrap_or(0);
            let bdeg = basis.iter().filter_map(|b| cdeg(b.components())).min().unwrap_or(0);
            let needed = 2 * (fdeg - bdeg).max(0);
            if needed > d as i64 {
                return Err(PiecewiseError::BoundTooSmall { needed, bound: d as i64 });
            }
            let monos: Vec<Exponent> = (0..=d / 2).flat_map(|k| monomials(n, k)).collect();
            vec![monos; basis.len()]
        }
        (Theory::K, ModuleBound::Window(w)) => {
            let reach = |c: &[MPoly<BigInt>]| {
                c.iter().flat_map(|p| p.terms().flat_map(|(e, _)| e[..n].iter().map(|x| x.abs()))).max().unwrap_or(0)
            };
            let b_reach = basis.iter().map(|b| reach(b.components())).max().unwrap_or(0);
            let needed = (reach(f.components()) - b_reach).max(0) as i64;
            if needed > w as i64 {
                return Err(PiecewiseError::BoundTooSmall { needed, bound: w as i64 });
            }
            let zexp = |c: &[MPoly<BigInt>]| -> Vec<i32> {
                let mut v: Vec<i32> = c.iter().flat_map(|p| p.terms().map(|(e, _)| e[n])).collect();
                v.sort_unstable();
                v.dedup();
                v
            };
            let fz = zexp(f.components());
            let window: Vec<Vec<i32>> = cube(n, w as i32);
            basis
                .iter()
                .map(|b| {
                    let mut shifts: Vec<i32> = zexp(b.components())
                        .iter()
                        .flat_map(|eb| fz.iter().map(move |ef| ef - eb))
                        .collect();
                    shifts.sort_unstable();
                    shifts.dedup();
                    let mut out = Vec::new();
                    for s in &shifts {
                        for j in &window {
                            let mut e: Exponent = j.iter().copied().collect();
                            e.push(*s);
                            out.push(e);
                        }
                    }
                    out
                })
                .collect()
        }
        (t, b) => return Err(PiecewiseError::Unsupported(format!("module bound {b:?} for theory {t}"))),
    };

    // one column per (basis element, coefficient monomial), one row per
    // (cone, product monomial)
    let m = f.fan().max_cones().len();
    let mut row_index: BTreeMap<(usize, Exponent), usize> = BTreeMap::new();
    let mut columns: Vec<Vec<(usize, BigInt)>> = Vec::new();
    let mut owners: Vec<(usize, Exponent)> = Vec::new();
    for (i, b) in basis.iter().enumerate() {
        for e in &candidates[i] {
            let mono = MPoly::monomial(&space, e, BigInt::one())?;
            let mut col = Vec::new();
            for cone in 0..m {
                let prod = &mono * &b.components()[cone];
                for (pe, c) in prod.terms() {
                    let next = row_index.len();
                    let r = *row_index.entry((cone, pe.clone())).or_insert(next);
                    col.push((r, c.clone()));
                }
            }
            if !col.is_empty() {
                columns.push(col);
                owners.push((i, e.clone()));
            }
        }
    }
    let mut rhs_entries = Vec::new();
    for cone in 0..m {
        for (e, c) in f.components()[cone].terms() {
            match row_index.get(&(cone, e.clone())) {
                Some(&r) => rhs_entries.push((r, c.clone())),
                None => return Ok(None),
            }
        }
    }
    let mut a = IntMatrix::zeros(row_index.len(), columns.len());
    for (j, col) in columns.iter().enumerate() {
        for (r, c) in col {
            a[(*r, j)] = c.clone();
        }
    }
    let mut rhs = vec![BigInt::zero(); row_index.len()];
    for (r, c) in rhs_entries {
        rhs[r] = c;
    }
    let Some(solution) = solve_integer(&a, &rhs) else { return Ok(None) };
    let mut coeffs = vec![MPoly::zero(&space); basis.len()];
    for ((i, e), c) in owners.iter().zip(solution) {
        coeffs[*i].add_term(e.clone(), c);
    }
    Ok(Some(coeffs))
}

/// All integer vectors in `[-w, w]^n`.
fn cube(n: usize, w: i32) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-w..=w).map(move |x| {
                    let mut u = v.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
    }
    out
}
