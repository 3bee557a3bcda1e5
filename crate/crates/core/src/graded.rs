//! Graded spaces over the rationals with a weight filtration.
//!
//! A space is a finite named basis with integer degrees and weights >= 1.
//! The weight-k filtration stage is the span of the basis elements of weight
//! at least k, so quotients by filtration stages are computed by deleting
//! basis elements. Basis order is declaration order and every matrix is
//! serialized against it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::linalg::{self, Matrix, PivotOrder, SolveOutcome, SpanTracker};
use crate::rat::Rat;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GradedError {
    #[error("duplicate basis name `{0}`")]
    DuplicateName(String),
    #[error("basis element `{0}` has weight 0; weights start at 1")]
    ZeroWeight(String),
    #[error("unknown basis name `{0}`")]
    UnknownName(String),
    #[error("entry ({target}, {src}) violates the degree of the map")]
    DegreeViolation { target: String, src: String },
    #[error("map does not preserve weights at entry ({target}, {src})")]
    WeightViolation { target: String, src: String },
    #[error("source space mismatch")]
    SpaceMismatch,
    #[error("differential does not square to zero on `{0}`")]
    NotSquareZero(String),
    #[error("map is not a chain map on basis element `{0}`")]
    NotChainMap(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub name: String,
    pub degree: i64,
    pub weight: u32,
}

#[derive(Clone, PartialEq, Eq)]
pub struct GradedSpace {
    basis: Vec<BasisElement>,
}

impl GradedSpace {
    pub fn new(basis: Vec<(&str, i64, u32)>) -> Result<Self, GradedError> {
        Self::from_elements(
            basis
                .into_iter()
                .map(|(name, degree, weight)| BasisElement { name: name.to_string(), degree, weight })
                .collect(),
        )
    }

    pub fn from_elements(basis: Vec<BasisElement>) -> Result<Self, GradedError> {
        let mut seen = BTreeSet::new();
        for b in &basis {
            if !seen.insert(b.name.clone()) {
                return Err(GradedError::DuplicateName(b.name.clone()));
            }
            if b.weight == 0 {
                return Err(GradedError::ZeroWeight(b.name.clone()));
            }
        }
        Ok(GradedSpace { basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.basis[i].weight
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn degrees(&self) -> BTreeSet<i64> {
        self.basis.iter().map(|b| b.degree).collect()
    }

    pub fn max_weight(&self) -> u32 {
        self.basis.iter().map(|b| b.weight).max().unwrap_or(0)
    }

    /// Indices of basis elements of the given degree (and minimum weight).
    pub fn slice(&self, degree: i64, min_weight: u32) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.degree(i) == degree && self.weight(i) >= min_weight)
            .collect()
    }

    /// The subspace spanned by basis elements of weight >= `min_weight`,
    /// together with the index embedding into `self`.
    pub fn filtration_stage(&self, min_weight: u32) -> (GradedSpace, Vec<usize>) {
        let indices: Vec<usize> =
            (0..self.dim()).filter(|&i| self.weight(i) >= min_weight).collect();
        let basis = indices.iter().map(|&i| self.basis[i].clone()).collect();
        (GradedSpace { basis }, indices)
    }

    /// The quotient by the weight-`n` stage: basis elements of weight < n.
    pub fn quotient_below(&self, n: u32) -> (GradedSpace, Vec<usize>) {
        let indices: Vec<usize> = (0..self.dim()).filter(|&i| self.weight(i) < n).collect();
        let basis = indices.iter().map(|&i| self.basis[i].clone()).collect();
        (GradedSpace { basis }, indices)
    }

    pub fn unit(&self, i: usize) -> Element {
        Element::single(i, Rat::from_integer(1.into()))
    }
}

impl fmt::Debug for GradedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .basis
            .iter()
            .map(|b| format!("{}:{}@{}", b.name, b.degree, b.weight))
            .collect();
        write!(f, "GradedSpace[{}]", items.join(", "))
    }
}

/// A sparse vector over the basis of some graded space.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Element {
    coeffs: BTreeMap<usize, Rat>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn single(i: usize, c: Rat) -> Self {
        let mut e = Element::zero();
        e.add_coeff(i, c);
        e
    }

    pub fn from_coeffs(pairs: impl IntoIterator<Item = (usize, Rat)>) -> Self {
        let mut e = Element::zero();
        for (i, c) in pairs {
            e.add_coeff(i, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(&i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rat)> {
        self.coeffs.iter().map(|(&i, c)| (i, c))
    }

    pub fn support(&self) -> Vec<usize> {
        self.coeffs.keys().copied().collect()
    }

    pub fn add_coeff(&mut self, i: usize, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(i).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (i, c) in other.iter() {
            out.add_coeff(i, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (i, c) in other.iter() {
            out.add_coeff(i, -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element { coeffs: self.coeffs.iter().map(|(&i, v)| (i, v * c)).collect() }
    }

    /// The common degree of the support, if homogeneous (`None` for 0).
    pub fn degree_in(&self, space: &GradedSpace) -> Option<i64> {
        let mut deg = None;
        for (i, _) in self.iter() {
            match deg {
                None => deg = Some(space.degree(i)),
                Some(d) if d != space.degree(i) => return None,
                _ => {}
            }
        }
        deg
    }

    pub fn is_homogeneous(&self, space: &GradedSpace, degree: i64) -> bool {
        self.iter().all(|(i, _)| space.degree(i) == degree)
    }

    pub fn min_weight(&self, space: &GradedSpace) -> Option<u32> {
        self.iter().map(|(i, _)| space.weight(i)).min()
    }

    /// Re-indexes along an index embedding (e.g. into a larger space).
    pub fn map_indices(&self, table: &[usize]) -> Element {
        Element { coeffs: self.iter().map(|(i, c)| (table[i], c.clone())).collect() }
    }

    /// Keeps only the coefficients on `indices`, renumbering against them.
    pub fn restrict_to(&self, indices: &[usize]) -> Element {
        let mut out = Element::zero();
        for (pos, &i) in indices.iter().enumerate() {
            let c = self.coeff(i);
            if !c.is_zero() {
                out.add_coeff(pos, c);
            }
        }
        out
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); dim];
        for (i, c) in self.iter() {
            v[i] = c.clone();
        }
        v
    }

    pub fn from_dense(v: &[Rat]) -> Element {
        Element::from_coeffs(v.iter().enumerate().map(|(i, c)| (i, c.clone())))
    }

    pub fn render(&self, space: &GradedSpace) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.iter()
            .map(|(i, c)| format!("{}*{}", crate::rat::render(c), space.name(i)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let items: Vec<String> =
            self.iter().map(|(i, c)| format!("{}*e{}", crate::rat::render(c), i)).collect();
        write!(f, "{}", items.join(" + "))
    }
}

/// A degree-homogeneous linear map between graded spaces, stored column-wise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    source: GradedSpace,
    target: GradedSpace,
    degree: i64,
    columns: BTreeMap<usize, Element>,
}

impl GradedMap {
    pub fn zero(source: GradedSpace, target: GradedSpace, degree: i64) -> Self {
        GradedMap { source, target, degree, columns: BTreeMap::new() }
    }

    pub fn identity(space: &GradedSpace) -> Self {
        let columns = (0..space.dim()).map(|i| (i, space.unit(i))).collect();
        GradedMap { source: space.clone(), target: space.clone(), degree: 0, columns }
    }

    pub fn from_columns(
        source: GradedSpace,
        target: GradedSpace,
        degree: i64,
        columns: Vec<(usize, Element)>,
    ) -> Result<Self, GradedError> {
        let mut map = GradedMap::zero(source, target, degree);
        for (src, col) in columns {
            for (tgt, c) in col.iter() {
                map.add_entry(tgt, src, c.clone())?;
            }
        }
        Ok(map)
    }

    pub fn add_entry(&mut self, target: usize, source: usize, c: Rat) -> Result<(), GradedError> {
        if c.is_zero() {
            return Ok(());
        }
        if self.target.degree(target) != self.source.degree(source) + self.degree {
            return Err(GradedError::DegreeViolation {
                target: self.target.name(target).to_string(),
                src: self.source.name(source).to_string(),
            });
        }
        self.columns.entry(source).or_default().add_coeff(target, c);
        if self.columns.get(&source).is_some_and(Element::is_zero) {
            self.columns.remove(&source);
        }
        Ok(())
    }

    pub fn source(&self) -> &GradedSpace {
        &self.source
    }

    pub fn target(&self) -> &GradedSpace {
        &self.target
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn column(&self, src: usize) -> Element {
        self.columns.get(&src).cloned().unwrap_or_default()
    }

    pub fn apply(&self, x: &Element) -> Element {
        let mut out = Element::zero();
        for (i, c) in x.iter() {
            if let Some(col) = self.columns.get(&i) {
                out = out.add(&col.scale(c));
            }
        }
        out
    }

    pub fn compose(&self, inner: &GradedMap) -> GradedMap {
        assert_eq!(inner.target, self.source, "composition mismatch");
        let mut out =
            GradedMap::zero(inner.source.clone(), self.target.clone(), self.degree + inner.degree);
        for (src, col) in &inner.columns {
            let img = self.apply(col);
            if !img.is_zero() {
                out.columns.insert(*src, img);
            }
        }
        out
    }

    pub fn add(&self, other: &GradedMap) -> GradedMap {
        assert_eq!(self.source, other.source);
        assert_eq!(self.target, other.target);
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (src, col) in &other.columns {
            let sum = out.column(*src).add(col);
            if sum.is_zero() {
                out.columns.remove(src);
            } else {
                out.columns.insert(*src, sum);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.columns.is_empty()
    }

    /// True when every nonzero entry maps into a weight at least as large.
    pub fn preserves_weights(&self) -> bool {
        self.columns.iter().all(|(&src, col)| {
            col.iter().all(|(tgt, _)| self.target.weight(tgt) >= self.source.weight(src))
        })
    }

    fn first_weight_violation(&self) -> Option<(usize, usize)> {
        for (&src, col) in &self.columns {
            for (tgt, _) in col.iter() {
                if self.target.weight(tgt) < self.source.weight(src) {
                    return Some((tgt, src));
                }
            }
        }
        None
    }

    pub fn check_preserves_weights(&self) -> Result<(), GradedError> {
        match self.first_weight_violation() {
            None => Ok(()),
            Some((tgt, src)) => Err(GradedError::WeightViolation {
                target: self.target.name(tgt).to_string(),
                src: self.source.name(src).to_string(),
            }),
        }
    }

    /// The dense block of the map from the given source indices to the given
    /// target indices.
    pub fn block(&self, target_indices: &[usize], source_indices: &[usize]) -> Matrix {
        let mut m = Matrix::zero(target_indices.len(), source_indices.len());
        for (j, &src) in source_indices.iter().enumerate() {
            let col = self.column(src);
            for (i, &tgt) in target_indices.iter().enumerate() {
                let c = col.coeff(tgt);
                if !c.is_zero() {
                    m.set(i, j, c);
                }
            }
        }
        m
    }

    /// Restricts to sub-bases of source and target given by index lists.
    /// Entries leaving the selected target indices are dropped (quotient) —
    /// callers restricting to subobjects should ensure closure themselves.
    pub fn restrict(
        &self,
        sub_source: &GradedSpace,
        source_indices: &[usize],
        sub_target: &GradedSpace,
        target_indices: &[usize],
    ) -> GradedMap {
        let mut out = GradedMap::zero(sub_source.clone(), sub_target.clone(), self.degree);
        for (j, &src) in source_indices.iter().enumerate() {
            let col = self.column(src).restrict_to(target_indices);
            if !col.is_zero() {
                out.columns.insert(j, col);
            }
        }
        out
    }
}

/// A cochain complex: a graded space with a weight-preserving square-zero
/// differential of degree one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    space: GradedSpace,
    differential: GradedMap,
}

impl ChainComplex {
    pub fn new(space: GradedSpace, differential: GradedMap) -> Result<Self, GradedError> {
        if differential.source != space || differential.target != space {
            return Err(GradedError::SpaceMismatch);
        }
        if differential.degree != 1 {
            return Err(GradedError::DegreeViolation {
                target: "<differential>".into(),
                src: "<degree != 1>".into(),
            });
        }
        differential.check_preserves_weights()?;
        for i in 0..space.dim() {
            let dd = differential.apply(&differential.apply(&space.unit(i)));
            if !dd.is_zero() {
                return Err(GradedError::NotSquareZero(space.name(i).to_string()));
            }
        }
        Ok(ChainComplex { space, differential })
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn differential(&self) -> &GradedMap {
        &self.differential
    }

    /// Restriction to the weight >= `min_weight` subcomplex.
    pub fn filtration_stage(&self, min_weight: u32) -> ChainComplex {
        let (sub, indices) = self.space.filtration_stage(min_weight);
        let d = self.differential.restrict(&sub, &indices, &sub, &indices);
        // Dropping entries is safe: the differential preserves weights, so
        // images of weight >= n elements stay in weight >= n.
        ChainComplex { space: sub, differential: d }
    }

    pub fn cohomology(&self, degree: i64) -> Cohomology {
        Cohomology::compute(self, degree)
    }
}

/// Cohomology of a complex in one degree: dimension, representative
/// cocycles, and the projection of cocycles onto representative coordinates.
pub struct Cohomology {
    pub degree: i64,
    pub dim: usize,
    /// Cocycles spanning a complement of the coboundaries (in full-space
    /// index coordinates).
    pub representatives: Vec<Element>,
    deg_indices: Vec<usize>,
    below_indices: Vec<usize>,
    boundary_basis: Vec<Vec<Rat>>,
    kernel: Vec<Vec<Rat>>,
    d_below: Matrix,
}

impl Cohomology {
    fn compute(complex: &ChainComplex, degree: i64) -> Cohomology {
        let space = complex.space();
        let deg_indices = space.slice(degree, 1);
        let above_indices = space.slice(degree + 1, 1);
        let below_indices = space.slice(degree - 1, 1);
        let d_here = complex.differential.block(&above_indices, &deg_indices);
        let d_below = complex.differential.block(&deg_indices, &below_indices);
        let kernel = linalg::kernel_basis(&d_here);
        let boundary_basis = linalg::column_space_basis(&d_below);
        let mut tracker = SpanTracker::new(deg_indices.len());
        for b in &boundary_basis {
            tracker.insert(b);
        }
        let mut representatives = Vec::new();
        let mut reps_local = Vec::new();
        for k in &kernel {
            if tracker.insert(k) {
                reps_local.push(k.clone());
                representatives.push(Element::from_coeffs(
                    k.iter().enumerate().map(|(pos, c)| (deg_indices[pos], c.clone())),
                ));
            }
        }
        Cohomology {
            degree,
            dim: representatives.len(),
            representatives,
            deg_indices,
            below_indices,
            boundary_basis,
            kernel,
            d_below,
        }
    }

    /// True when `z` (a degree-homogeneous element) is a cocycle recorded by
    /// this computation, i.e. lies in the span of the kernel.
    pub fn is_cocycle(&self, z: &Element) -> bool {
        let local = z.restrict_to(&self.deg_indices);
        let mut tracker = SpanTracker::new(self.deg_indices.len());
        for k in &self.kernel {
            tracker.insert(k);
        }
        tracker.contains(&local.to_dense(self.deg_indices.len()))
    }

    /// Coordinates of the class of `z` against the representatives, plus a
    /// primitive `w` with `dw = z - sum(coords * rep)`. `None` if `z` is not
    /// a cocycle.
    pub fn decompose(&self, z: &Element) -> Option<(Vec<Rat>, Element)> {
        if !self.is_cocycle(z) {
            return None;
        }
        let local = z.restrict_to(&self.deg_indices).to_dense(self.deg_indices.len());
        // Solve [B | R] x = z over the boundary and representative columns.
        let nb = self.boundary_basis.len();
        let nr = self.dim;
        let mut m = Matrix::zero(self.deg_indices.len(), nb + nr);
        for (j, b) in self.boundary_basis.iter().enumerate() {
            for (i, c) in b.iter().enumerate() {
                m.set(i, j, c.clone());
            }
        }
        for (j, r) in self.representatives.iter().enumerate() {
            let dense = r.restrict_to(&self.deg_indices).to_dense(self.deg_indices.len());
            for (i, c) in dense.iter().enumerate() {
                m.set(i, nb + j, c.clone());
            }
        }
        let SolveOutcome::Solution(x) = linalg::solve(&m, &local, PivotOrder::Lex) else {
            return None;
        };
        let coords: Vec<Rat> = x[nb..].to_vec();
        // Find a primitive for the boundary part.
        let boundary_part: Vec<Rat> = {
            let mut v = vec![Rat::zero(); self.deg_indices.len()];
            for (j, b) in self.boundary_basis.iter().enumerate() {
                for (i, c) in b.iter().enumerate() {
                    if !c.is_zero() && !x[j].is_zero() {
                        v[i] += c * &x[j];
                    }
                }
            }
            v
        };
        let SolveOutcome::Solution(w) = linalg::solve(&self.d_below, &boundary_part, PivotOrder::Lex)
        else {
            return None;
        };
        let primitive = Element::from_coeffs(
            w.iter().enumerate().map(|(pos, c)| (self.below_indices[pos], c.clone())),
        );
        Some((coords, primitive))
    }

    /// Projection to representative coordinates; kills exactly the
    /// coboundaries. `None` if `z` is not a cocycle.
    pub fn project(&self, z: &Element) -> Option<Vec<Rat>> {
        self.decompose(z).map(|(coords, _)| coords)
    }
}

/// Checks `f` is a chain map between the complexes (exactly, basis-wise).
pub fn check_chain_map(
    src: &ChainComplex,
    tgt: &ChainComplex,
    f: &GradedMap,
) -> Result<(), GradedError> {
    if f.source != *src.space() || f.target != *tgt.space() {
        return Err(GradedError::SpaceMismatch);
    }
    for i in 0..src.space().dim() {
        let e = src.space().unit(i);
        let lhs = f.apply(&src.differential.apply(&e));
        let rhs = tgt.differential.apply(&f.apply(&e));
        if lhs != rhs {
            return Err(GradedError::NotChainMap(src.space().name(i).to_string()));
        }
    }
    Ok(())
}

/// True iff the restriction of `f` to every filtration stage induces an
/// isomorphism on cohomology in every degree.
pub fn is_quasi_iso_on_filtration(
    src: &ChainComplex,
    tgt: &ChainComplex,
    f: &GradedMap,
) -> Result<bool, GradedError> {
    check_chain_map(src, tgt, f)?;
    f.check_preserves_weights()?;
    let max_weight = src.space().max_weight().max(tgt.space().max_weight());
    for n in 1..=max_weight.max(1) {
        let src_n = src.filtration_stage(n);
        let tgt_n = tgt.filtration_stage(n);
        let (sub_s, idx_s) = src.space().filtration_stage(n);
        let (sub_t, idx_t) = tgt.space().filtration_stage(n);
        let f_n = f.restrict(&sub_s, &idx_s, &sub_t, &idx_t);
        let mut degrees: BTreeSet<i64> = src_n.space().degrees();
        degrees.extend(tgt_n.space().degrees());
        for d in degrees {
            let hs = src_n.cohomology(d);
            let ht = tgt_n.cohomology(d);
            if hs.dim != ht.dim {
                return Ok(false);
            }
            if hs.dim == 0 {
                continue;
            }
            let mut m = Matrix::zero(ht.dim, hs.dim);
            for (j, rep) in hs.representatives.iter().enumerate() {
                let img = f_n.apply(rep);
                let Some(coords) = ht.project(&img) else { return Ok(false) };
                for (i, c) in coords.into_iter().enumerate() {
                    m.set(i, j, c);
                }
            }
            if linalg::rank(&m) != hs.dim {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff the restriction of `f` to every filtration stage is surjective
/// in every degree.
pub fn is_surjective_on_filtration(
    src: &ChainComplex,
    tgt: &ChainComplex,
    f: &GradedMap,
) -> Result<bool, GradedError> {
    check_chain_map(src, tgt, f)?;
    f.check_preserves_weights()?;
    let max_weight = src.space().max_weight().max(tgt.space().max_weight());
    for n in 1..=max_weight.max(1) {
        let mut degrees: BTreeSet<i64> = src.space().degrees();
        degrees.extend(tgt.space().degrees());
        for d in degrees {
            let rows = tgt.space().slice(d, n);
            if rows.is_empty() {
                continue;
            }
            let cols = src.space().slice(d, n);
            let block = f.block(&rows, &cols);
            if linalg::rank(&block) != rows.len() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn two_term() -> ChainComplex {
        // x in degree 0, y in degree 1, dx = y.
        let space = GradedSpace::new(vec![("x", 0, 1), ("y", 1, 1)]).unwrap();
        let mut d = GradedMap::zero(space.clone(), space.clone(), 1);
        d.add_entry(1, 0, rat(1)).unwrap();
        ChainComplex::new(space, d).unwrap()
    }

    #[test]
    fn space_invariants() {
        assert_eq!(
            GradedSpace::new(vec![("x", 0, 1), ("x", 1, 1)]),
            Err(GradedError::DuplicateName("x".into()))
        );
        assert_eq!(
            GradedSpace::new(vec![("x", 0, 0)]),
            Err(GradedError::ZeroWeight("x".into()))
        );
    }

    #[test]
    fn differential_must_square_to_zero() {
        let space = GradedSpace::new(vec![("a", 0, 1), ("b", 1, 1), ("c", 2, 1)]).unwrap();
        let mut d = GradedMap::zero(space.clone(), space.clone(), 1);
        d.add_entry(1, 0, rat(1)).unwrap();
        d.add_entry(2, 1, rat(1)).unwrap();
        assert!(matches!(ChainComplex::new(space, d), Err(GradedError::NotSquareZero(_))));
    }

    #[test]
    fn degree_violation_rejected() {
        let space = GradedSpace::new(vec![("x", 0, 1), ("y", 1, 1)]).unwrap();
        let mut d = GradedMap::zero(space.clone(), space, 1);
        assert!(d.add_entry(0, 1, rat(1)).is_err());
    }

    #[test]
    fn cohomology_acyclic_two_term() {
        let c = two_term();
        assert_eq!(c.cohomology(0).dim, 0);
        assert_eq!(c.cohomology(1).dim, 0);
    }

    #[test]
    fn cohomology_single_class() {
        let space = GradedSpace::new(vec![("x", 0, 1)]).unwrap();
        let d = GradedMap::zero(space.clone(), space.clone(), 1);
        let c = ChainComplex::new(space.clone(), d).unwrap();
        let h = c.cohomology(0);
        assert_eq!(h.dim, 1);
        assert_eq!(h.representatives[0], space.unit(0));
    }

    #[test]
    fn cohomology_two_sources_one_target() {
        // x0, x1 in degree 0, y in degree 1, d x0 = d x1 = y: H^0 = <x0 - x1>.
        let space = GradedSpace::new(vec![("x0", 0, 1), ("x1", 0, 1), ("y", 1, 1)]).unwrap();
        let mut d = GradedMap::zero(space.clone(), space.clone(), 1);
        d.add_entry(2, 0, rat(1)).unwrap();
        d.add_entry(2, 1, rat(1)).unwrap();
        let c = ChainComplex::new(space.clone(), d).unwrap();
        let h = c.cohomology(0);
        assert_eq!(h.dim, 1);
        // The representative must be a cocycle: a multiple of x0 - x1.
        let rep = &h.representatives[0];
        assert_eq!(rep.coeff(0), -rep.coeff(1));
        assert!(!rep.coeff(0).is_zero());
        // Rank-nullity: dim ker = 1, dim im(d^-1) = 0.
        let (coords, w) = h.decompose(&space.unit(0).sub(&space.unit(1))).unwrap();
        assert_eq!(coords.len(), 1);
        assert!(w.is_zero() || !w.is_zero()); // primitive may be zero here
    }

    #[test]
    fn decompose_splits_boundary_and_class() {
        let space = GradedSpace::new(vec![("x", 0, 1), ("y", 1, 1), ("z", 1, 1)]).unwrap();
        let mut d = GradedMap::zero(space.clone(), space.clone(), 1);
        d.add_entry(1, 0, rat(1)).unwrap(); // dx = y
        let c = ChainComplex::new(space.clone(), d).unwrap();
        let h = c.cohomology(1);
        assert_eq!(h.dim, 1); // spanned by [z]
        let z = space.unit(2).add(&space.unit(1).scale(&rat(3)));
        let (coords, w) = h.decompose(&z).unwrap();
        assert_eq!(coords, vec![rat(1)]);
        // dw = z - rep = 3y, so w = 3x.
        assert_eq!(c.differential().apply(&w), space.unit(1).scale(&rat(3)));
        // The projection kills coboundaries.
        let boundary = space.unit(1).scale(&rat(7));
        assert_eq!(h.project(&boundary).unwrap(), vec![rat(0)]);
    }

    #[test]
    fn quasi_iso_identity_and_zero() {
        let c = two_term();
        let id = GradedMap::identity(c.space());
        assert!(is_quasi_iso_on_filtration(&c, &c, &id).unwrap());

        // Acyclic complex maps quasi-isomorphically to zero.
        let zero_space = GradedSpace::new(vec![]).unwrap();
        let zero_d = GradedMap::zero(zero_space.clone(), zero_space.clone(), 1);
        let zero = ChainComplex::new(zero_space.clone(), zero_d).unwrap();
        let to_zero = GradedMap::zero(c.space().clone(), zero_space, 0);
        assert!(is_quasi_iso_on_filtration(&c, &zero, &to_zero).unwrap());

        // A complex with cohomology does not.
        let space = GradedSpace::new(vec![("x", 0, 1)]).unwrap();
        let d = GradedMap::zero(space.clone(), space.clone(), 1);
        let cx = ChainComplex::new(space.clone(), d).unwrap();
        let to_zero =
            GradedMap::zero(space, GradedSpace::new(vec![]).unwrap(), 0);
        let zero_space = GradedSpace::new(vec![]).unwrap();
        let zero = ChainComplex::new(
            zero_space.clone(),
            GradedMap::zero(zero_space, GradedSpace::new(vec![]).unwrap(), 1),
        )
        .unwrap();
        assert!(!is_quasi_iso_on_filtration(&cx, &zero, &to_zero).unwrap());
    }

    #[test]
    fn surjectivity_sees_weights() {
        let c = two_term();
        let id = GradedMap::identity(c.space());
        assert!(is_surjective_on_filtration(&c, &c, &id).unwrap());

        // Zero map onto a nonzero target is not surjective.
        let zero_map = GradedMap::zero(c.space().clone(), c.space().clone(), 0);
        assert!(!is_surjective_on_filtration(&c, &c, &zero_map).unwrap());

        // Weight-1 generator mapping onto a weight-2 generator fails at n=2.
        let src = GradedSpace::new(vec![("a", 0, 1)]).unwrap();
        let tgt = GradedSpace::new(vec![("b", 0, 2)]).unwrap();
        let cs = ChainComplex::new(src.clone(), GradedMap::zero(src.clone(), src.clone(), 1)).unwrap();
        let ct = ChainComplex::new(tgt.clone(), GradedMap::zero(tgt.clone(), tgt.clone(), 1)).unwrap();
        let mut f = GradedMap::zero(src, tgt, 0);
        f.add_entry(0, 0, rat(1)).unwrap();
        assert!(!is_surjective_on_filtration(&cs, &ct, &f).unwrap());
        // It is surjective at n = 1 in every degree, so only the filtration
        // condition can catch it.
        let rows = ct.space().slice(0, 1);
        let cols = cs.space().slice(0, 1);
        assert_eq!(linalg::rank(&f.block(&rows, &cols)), rows.len());
    }
}
