//! Simplices of the simplicial Maurer-Cartan set, horn filling, and
//! fibration lifting.
//!
//! An n-simplex of an algebra L is a Maurer-Cartan element of L tensored
//! with the polynomial forms on the n-simplex. Horns are filled
//! constructively: the Moore algorithm produces a linear extension, the
//! curvature defect lands in the abelian kernel of the current tower stage,
//! and the dilation homotopy centered at the missing face cancels it while
//! keeping the horn faces untouched. Lifting through a fibration threads the
//! same step through the filtration tower, following the
//! theta / eta / lambda construction.

use thiserror::Error;

use crate::algebra::{LInftyAlgebra, LinftyError};
use crate::forms::PolyForm;
use crate::graded::{Element, GradedMap, GradedSpace};
use crate::linalg::{self, Matrix, PivotOrder, SolveOutcome};
use crate::morphism::{self, InftyMorphism, MorphismError, TowerStage};
use crate::rat::{rat, Rat};
use crate::tensor::{self, TensorElement};

#[derive(Debug, Error)]
pub enum SimplicialError {
    #[error(transparent)]
    Algebra(#[from] LinftyError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error("simplex value is not homogeneous of total degree 0")]
    WrongTotalDegree,
    #[error("simplex is not Maurer-Cartan; curvature = {0}")]
    NotMaurerCartan(String),
    #[error("face index out of range")]
    FaceIndexOutOfRange,
    #[error("horn faces must have dimension m-1 and live in one algebra")]
    HornShape,
    #[error("horn faces {i} and {j} are not simplicially compatible")]
    HornIncompatible { i: usize, j: usize },
    #[error("expected an abelian algebra")]
    NotAbelian,
    #[error("map is not surjective at weight {weight}, degree {degree}: not a fibration there")]
    NotFibrationAt { weight: u32, degree: i64 },
    #[error("lifting precondition failed: {0}")]
    LiftPrecondition(&'static str),
    #[error("internal lifting invariant failed: {0}")]
    LiftInvariant(&'static str),
    #[error("no connecting edge found at stage {stage} (polynomial degree cap {max_poly_degree})")]
    EdgeNotFound { stage: u32, max_poly_degree: u32 },
    #[error("vertex lifting obstructed at stage {stage}")]
    VertexLiftObstructed { stage: u32 },
}

/// An m-simplex of the simplicial Maurer-Cartan set of an algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplex {
    algebra: LInftyAlgebra,
    value: TensorElement,
}

impl Simplex {
    /// Validates total degree 0 and the exact Maurer-Cartan condition.
    pub fn new(algebra: LInftyAlgebra, value: TensorElement) -> Result<Self, SimplicialError> {
        if !value.is_homogeneous(algebra.space(), 0) {
            return Err(SimplicialError::WrongTotalDegree);
        }
        let curv = tensor::curvature(&algebra, &value);
        if !curv.is_zero() {
            return Err(SimplicialError::NotMaurerCartan(curv.render(algebra.space())));
        }
        Ok(Simplex { algebra, value })
    }

    /// A vertex from a Maurer-Cartan element.
    pub fn vertex(algebra: LInftyAlgebra, alpha: &Element) -> Result<Self, SimplicialError> {
        Self::new(algebra, TensorElement::from_element(alpha, 0))
    }

    /// The totally degenerate m-simplex on a Maurer-Cartan element.
    pub fn constant(
        algebra: LInftyAlgebra,
        alpha: &Element,
        dim: usize,
    ) -> Result<Self, SimplicialError> {
        Self::new(algebra, TensorElement::from_element(alpha, dim))
    }

    pub fn algebra(&self) -> &LInftyAlgebra {
        &self.algebra
    }

    pub fn value(&self) -> &TensorElement {
        &self.value
    }

    pub fn dim(&self) -> usize {
        self.value.simplex_dim()
    }

    pub fn face(&self, i: usize) -> Result<Simplex, SimplicialError> {
        if self.dim() == 0 || i > self.dim() {
            return Err(SimplicialError::FaceIndexOutOfRange);
        }
        // Faces are algebra maps on the form legs, so MC is preserved; the
        // constructor re-checks anyway.
        Simplex::new(self.algebra.clone(), self.value.face(i))
    }

    pub fn degenerate(&self, j: usize) -> Result<Simplex, SimplicialError> {
        if j > self.dim() {
            return Err(SimplicialError::FaceIndexOutOfRange);
        }
        Simplex::new(self.algebra.clone(), self.value.degeneracy(j))
    }

    /// Vertex v of the simplex, as a Maurer-Cartan element.
    pub fn vertex_value(&self, v: usize) -> Element {
        self.value.eval_vertex(v)
    }
}

/// Applies the simplicial extension of a morphism to a simplex:
/// `sum_{r >= 1} (1/r!) f_r(s, ..., s)` with form legs wedged on the right.
pub fn apply_morphism(phi: &InftyMorphism, s: &Simplex) -> Result<Simplex, SimplicialError> {
    if s.algebra() != phi.source() {
        return Err(SimplicialError::LiftPrecondition("simplex not in the morphism source"));
    }
    let n = s.dim();
    let terms = s.value().homogeneous_terms();
    let mut out = TensorElement::zero(n);
    for (&r, _) in phi.components() {
        for (multiset, coeff) in
            tensor::term_multisets(phi.source().space(), &terms, r, phi.target().depth() - 1)
        {
            let letters: Vec<(usize, &PolyForm, usize)> =
                multiset.iter().map(|&t| (terms[t].0, &terms[t].1, terms[t].2)).collect();
            let v = tensor::eval_flat_on_letters(
                phi.source().space(),
                &|arity, basis| phi.eval_word(arity, basis),
                r,
                &letters,
                n,
            );
            out = out.add(&v.scale(&coeff));
        }
    }
    Simplex::new(phi.target().clone(), out)
}

/// A horn: all faces of an m-simplex except the k-th, pairwise compatible.
#[derive(Clone, Debug)]
pub struct HornData {
    m: usize,
    k: usize,
    faces: Vec<Option<Simplex>>,
}

impl HornData {
    pub fn new(m: usize, k: usize, faces: Vec<(usize, Simplex)>) -> Result<Self, SimplicialError> {
        if m == 0 || k > m {
            return Err(SimplicialError::HornShape);
        }
        let mut slots: Vec<Option<Simplex>> = vec![None; m + 1];
        for (i, s) in faces {
            if i > m || i == k || slots[i].is_some() {
                return Err(SimplicialError::HornShape);
            }
            if s.dim() + 1 != m {
                return Err(SimplicialError::HornShape);
            }
            slots[i] = Some(s);
        }
        for (i, slot) in slots.iter().enumerate() {
            if i != k && slot.is_none() {
                return Err(SimplicialError::HornShape);
            }
        }
        let algebra = slots.iter().flatten().next().map(|s| s.algebra().clone());
        if let Some(alg) = &algebra {
            if slots.iter().flatten().any(|s| s.algebra() != alg) {
                return Err(SimplicialError::HornShape);
            }
        }
        let horn = HornData { m, k, faces: slots };
        horn.check_compatibility()?;
        Ok(horn)
    }

    /// The horn obtained by forgetting the k-th face of a simplex.
    pub fn from_simplex(s: &Simplex, k: usize) -> Result<Self, SimplicialError> {
        let m = s.dim();
        let mut faces = Vec::new();
        for i in 0..=m {
            if i != k {
                faces.push((i, s.face(i)?));
            }
        }
        Self::new(m, k, faces)
    }

    fn check_compatibility(&self) -> Result<(), SimplicialError> {
        if self.m < 2 {
            return Ok(());
        }
        // d_i(face_j) = d_{j-1}(face_i) for i < j, both faces present.
        for i in 0..=self.m {
            for j in (i + 1)..=self.m {
                let (Some(fi), Some(fj)) = (&self.faces[i], &self.faces[j]) else { continue };
                if fj.value().face(i) != fi.value().face(j - 1) {
                    return Err(SimplicialError::HornIncompatible { i, j });
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn missing(&self) -> usize {
        self.k
    }

    pub fn face(&self, i: usize) -> Option<&Simplex> {
        self.faces.get(i).and_then(Option::as_ref)
    }

    pub fn algebra(&self) -> &LInftyAlgebra {
        self.faces.iter().flatten().next().map(Simplex::algebra).expect("m >= 1 gives a face")
    }

    /// Transports every face along a strict projection-like plan: legwise
    /// reindexing by basis names into the given algebra.
    pub fn transport(&self, to: &LInftyAlgebra) -> Result<HornData, SimplicialError> {
        let mut faces = Vec::new();
        let from_space = self.algebra().space().clone();
        for i in 0..=self.m {
            if let Some(f) = &self.faces[i] {
                let moved = f.value().transport(&from_space, to.space());
                faces.push((i, Simplex::new(to.clone(), moved)?));
            }
        }
        HornData::new(self.m, self.k, faces)
    }

    /// Checks that a simplex fills this horn exactly.
    pub fn is_filled_by(&self, s: &Simplex) -> bool {
        if s.dim() != self.m {
            return false;
        }
        (0..=self.m).filter(|&i| i != self.k).all(|i| {
            self.faces[i].as_ref().map(|f| f.value()) == s.face(i).ok().as_ref().map(|f| f.value())
        })
    }
}

/// Moore filler at the vector-space level: produces an element whose i-th
/// faces match the given ones for all i != k, using only face/degeneracy
/// identities.
fn moore_fill(m: usize, k: usize, face_value: &dyn Fn(usize) -> TensorElement) -> TensorElement {
    let mut u = TensorElement::zero(m);
    for i in 0..k {
        let delta = face_value(i).sub(&u.face(i));
        u = u.add(&delta.degeneracy(i));
    }
    for i in ((k + 1)..=m).rev() {
        let delta = face_value(i).sub(&u.face(i));
        u = u.add(&delta.degeneracy(i - 1));
    }
    u
}

/// Fills a horn in an abelian algebra with the Moore algorithm for
/// simplicial vector spaces.
pub fn fill_horn_abelian(
    algebra: &LInftyAlgebra,
    horn: &HornData,
) -> Result<Simplex, SimplicialError> {
    if !algebra.is_abelian() {
        return Err(SimplicialError::NotAbelian);
    }
    if horn.algebra() != algebra {
        return Err(SimplicialError::LiftPrecondition("horn lives in a different algebra"));
    }
    let filler = moore_fill(horn.dim(), horn.missing(), &|i| {
        horn.face(i).expect("validated horn").value().clone()
    });
    let s = Simplex::new(algebra.clone(), filler)?;
    if !horn.is_filled_by(&s) {
        return Err(SimplicialError::LiftInvariant("Moore filler does not match the horn"));
    }
    Ok(s)
}

/// The tower stage at weight n, saturated: beyond the truncation depth the
/// stage is the identity with empty kernel.
fn saturated_tower(alg: &LInftyAlgebra, n: u32) -> Result<TowerStage, SimplicialError> {
    if n <= alg.depth() {
        return Ok(morphism::quotient_tower(alg, n)?);
    }
    let empty_space = GradedSpace::from_elements(vec![]).expect("empty space");
    let empty = LInftyAlgebra::abelian(
        empty_space.clone(),
        GradedMap::zero(empty_space.clone(), empty_space.clone(), 1),
        2,
    )?;
    let identity = InftyMorphism::identity(alg);
    let inclusion = InftyMorphism::strict(
        empty.clone(),
        alg.clone(),
        &GradedMap::zero(empty_space, alg.space().clone(), 0),
    )?;
    Ok(TowerStage {
        total: alg.clone(),
        base: alg.clone(),
        kernel: empty,
        projection: identity,
        inclusion,
        total_indices: (0..alg.space().dim()).collect(),
        kernel_indices: vec![],
    })
}

/// Solves `psi(x) = target` legwise with a degreewise pivot solve; errors
/// with the failing weight and degree when `psi` is not surjective there.
fn apply_section(
    psi: &GradedMap,
    target: &TensorElement,
    weight_for_report: u32,
) -> Result<TensorElement, SimplicialError> {
    let mut out = TensorElement::zero(target.simplex_dim());
    for (b, form) in target.iter() {
        let degree = psi.target().degree(b);
        let rows: Vec<usize> = psi.target().slice(degree, 1);
        let cols: Vec<usize> = psi.source().slice(degree, 1);
        let block = psi.block(&rows, &cols);
        let mut e = vec![Rat::from_integer(0.into()); rows.len()];
        let pos = rows.iter().position(|&r| r == b).expect("row present");
        e[pos] = rat(1);
        match linalg::solve(&block, &e, PivotOrder::Lex) {
            SolveOutcome::Solution(x) => {
                for (j, c) in x.iter().enumerate() {
                    if !c.is_zero() {
                        out.add_term(cols[j], form.scale(c));
                    }
                }
            }
            SolveOutcome::Inconsistent(_) => {
                return Err(SimplicialError::NotFibrationAt { weight: weight_for_report, degree });
            }
        }
    }
    Ok(out)
}

use num_traits::Zero;

/// One pullback-corner lifting step at stage n of the tower.
///
/// Inputs: the stage morphism between weight-n quotients, a horn `gamma` in
/// its source, a filler `beta` of the projected horn one stage down, and a
/// simplex `beta_tilde` in the target compatible with both. Produces a
/// simplex `alpha` with `d_i alpha = gamma_i`, `p(alpha) = beta` and
/// `phi(alpha) = beta_tilde`, all verified exactly.
pub fn lift_through_tower_step(
    phi_stage: &InftyMorphism,
    gamma: &HornData,
    beta: &Simplex,
    beta_tilde: &Simplex,
) -> Result<Simplex, SimplicialError> {
    let src = phi_stage.source().clone();
    let tgt = phi_stage.target().clone();
    let n = src.depth();
    let m = gamma.dim();
    let k = gamma.missing();
    let src_stage = saturated_tower(&src, n)?;
    let tgt_stage = saturated_tower(&tgt, n)?;
    let phi_base = stage_morphism(phi_stage, &src_stage.base, &tgt_stage.base)?;

    if gamma.algebra() != &src {
        return Err(SimplicialError::LiftPrecondition("horn not in the stage source"));
    }
    if beta.algebra() != &src_stage.base || beta.dim() != m {
        return Err(SimplicialError::LiftPrecondition("beta not an m-simplex of the base"));
    }
    if beta_tilde.algebra() != &tgt || beta_tilde.dim() != m {
        return Err(SimplicialError::LiftPrecondition("beta_tilde not an m-simplex of the target"));
    }
    for i in 0..=m {
        if i == k {
            continue;
        }
        let face = gamma.face(i).expect("validated horn");
        let projected = face.value().transport(src.space(), src_stage.base.space());
        if projected != beta.value().face(i) {
            return Err(SimplicialError::LiftPrecondition("p(gamma_i) != d_i(beta)"));
        }
        let pushed = apply_morphism(phi_stage, face)?;
        if pushed.value() != &beta_tilde.value().face(i) {
            return Err(SimplicialError::LiftPrecondition("phi(gamma_i) != d_i(beta_tilde)"));
        }
    }
    let beta_pushed = apply_morphism(&phi_base, beta)?;
    if beta_tilde.value().transport(tgt.space(), tgt_stage.base.space()) != *beta_pushed.value() {
        return Err(SimplicialError::LiftPrecondition("p(beta_tilde) != phi(beta)"));
    }

    // Step 1: extend the horn linearly over beta and cancel the curvature
    // defect in the kernel with the dilation homotopy at vertex k.
    let u = moore_fill(m, k, &|i| gamma.face(i).expect("validated horn").value().clone());
    let eps = beta.value().sub(&u.transport(src.space(), src_stage.base.space()));
    let x0 = u.add(&eps.transport(src_stage.base.space(), src.space()));
    let defect = tensor::curvature(&src, &x0);
    ensure_kernel_valued(&defect, src.space(), n, "curvature defect outside the kernel")?;
    if !tensor::differential(&src, &defect).is_zero() {
        return Err(SimplicialError::LiftInvariant("curvature defect is not a cocycle"));
    }
    for i in 0..=m {
        if i != k && !defect.face(i).is_zero() {
            return Err(SimplicialError::LiftInvariant("curvature defect does not vanish on the horn"));
        }
    }
    let xi = defect.homotopy(src.space(), k).scale(&rat(-1));
    let theta_value = x0.add(&xi);
    let theta = Simplex::new(src.clone(), theta_value)?;
    for i in 0..=m {
        if i == k {
            continue;
        }
        if theta.value().face(i) != *gamma.face(i).expect("face").value() {
            return Err(SimplicialError::LiftInvariant("theta does not fill the horn"));
        }
    }
    if theta.value().transport(src.space(), src_stage.base.space()) != *beta.value() {
        return Err(SimplicialError::LiftInvariant("theta does not lift beta"));
    }

    // Step 2: the discrepancy eta lives in the abelian kernel of the target
    // tower and vanishes on the horn. This is asserted, not assumed.
    let theta_pushed = apply_morphism(phi_stage, &theta)?;
    let eta = theta_pushed.value().sub(beta_tilde.value());
    ensure_kernel_valued(&eta, tgt.space(), n, "eta outside the target kernel")?;
    let eta_in_kernel = eta.transport(tgt.space(), tgt_stage.kernel.space());
    if !tensor::differential(&tgt_stage.kernel, &eta_in_kernel).is_zero() {
        return Err(SimplicialError::LiftInvariant("eta is not Maurer-Cartan in the kernel"));
    }
    for i in 0..=m {
        if i != k && !eta.face(i).is_zero() {
            return Err(SimplicialError::LiftInvariant("eta does not vanish on the horn"));
        }
    }

    // Step 3: lift -eta through the strict abelian fibration between
    // kernels, vanishing on the horn.
    let psi = kernel_linear_map(phi_stage, &src_stage, &tgt_stage)?;
    let lambda0 = apply_section(&psi, &eta_in_kernel.scale(&rat(-1)), n - 1)?;
    let g = tensor::differential(&src_stage.kernel, &lambda0);
    let mu = g.homotopy(src_stage.kernel.space(), k).scale(&rat(-1));
    let lambda = lambda0.add(&mu);
    if !tensor::differential(&src_stage.kernel, &lambda).is_zero() {
        return Err(SimplicialError::LiftInvariant("lambda is not a cocycle"));
    }
    if lambda.map_legs(&psi) != eta_in_kernel.scale(&rat(-1)) {
        return Err(SimplicialError::LiftInvariant("lambda does not lift -eta"));
    }
    for i in 0..=m {
        if i != k && !lambda.face(i).is_zero() {
            return Err(SimplicialError::LiftInvariant("lambda does not vanish on the horn"));
        }
    }

    // Step 4: alpha = theta + lambda satisfies all three conditions.
    let alpha_value = theta.value().add(&lambda.transport(src_stage.kernel.space(), src.space()));
    let alpha = Simplex::new(src.clone(), alpha_value)?;
    if !gamma.is_filled_by(&alpha) {
        return Err(SimplicialError::LiftInvariant("alpha does not fill the horn"));
    }
    if alpha.value().transport(src.space(), src_stage.base.space()) != *beta.value() {
        return Err(SimplicialError::LiftInvariant("alpha does not lift beta"));
    }
    let alpha_pushed = apply_morphism(phi_stage, &alpha)?;
    if alpha_pushed.value() != beta_tilde.value() {
        return Err(SimplicialError::LiftInvariant("phi(alpha) != beta_tilde"));
    }
    Ok(alpha)
}

fn ensure_kernel_valued(
    te: &TensorElement,
    space: &GradedSpace,
    n: u32,
    msg: &'static str,
) -> Result<(), SimplicialError> {
    for (b, _) in te.iter() {
        if space.weight(b) != n - 1 {
            return Err(SimplicialError::LiftInvariant(msg));
        }
    }
    Ok(())
}

/// The strict linear map induced between the kernels of two tower stages.
fn kernel_linear_map(
    phi_stage: &InftyMorphism,
    src_stage: &TowerStage,
    tgt_stage: &TowerStage,
) -> Result<GradedMap, SimplicialError> {
    let linear = phi_stage.linear_term();
    Ok(linear.restrict(
        src_stage.kernel.space(),
        &src_stage.kernel_indices,
        tgt_stage.kernel.space(),
        &tgt_stage.kernel_indices,
    ))
}

/// The morphism induced between the bases of two tower stages (one stage
/// down), by truncating components legwise through basis names.
fn stage_morphism(
    phi: &InftyMorphism,
    new_src: &LInftyAlgebra,
    new_tgt: &LInftyAlgebra,
) -> Result<InftyMorphism, SimplicialError> {
    let mut components = crate::algebra::SymTable::new();
    for (&arity, table) in phi.components() {
        let mut out = std::collections::BTreeMap::new();
        for (word, value) in table {
            let Some(new_word) = word
                .iter()
                .map(|&i| new_src.space().index_of(phi.source().space().name(i)))
                .collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            let mut moved = Element::zero();
            for (t, c) in value.iter() {
                if let Some(j) = new_tgt.space().index_of(phi.target().space().name(t)) {
                    moved.add_coeff(j, c.clone());
                }
            }
            if !moved.is_zero() {
                out.insert(new_word, moved);
            }
        }
        if !out.is_empty() {
            components.insert(arity, out);
        }
    }
    Ok(InftyMorphism::new(new_src.clone(), new_tgt.clone(), components)?)
}

/// The zero algebra, used as the trivial lifting target.
fn zero_algebra() -> LInftyAlgebra {
    let space = GradedSpace::from_elements(vec![]).expect("empty space");
    LInftyAlgebra::abelian(space.clone(), GradedMap::zero(space.clone(), space, 1), 2)
        .expect("zero algebra")
}

/// Fills a horn in a nilpotent algebra by induction up the filtration
/// tower, starting from the abelian Moore fill.
pub fn fill_horn_nilpotent(
    algebra: &LInftyAlgebra,
    horn: &HornData,
) -> Result<Simplex, SimplicialError> {
    if horn.algebra() != algebra {
        return Err(SimplicialError::LiftPrecondition("horn lives in a different algebra"));
    }
    let (q2, _) = algebra.quotient(2.min(algebra.depth()))?;
    let mut filler = fill_horn_abelian(&q2, &horn.transport(&q2)?)?;
    let zero = zero_algebra();
    for n in 3..=algebra.depth() {
        let (qn, _) = algebra.quotient(n)?;
        let gamma = horn.transport(&qn)?;
        let phi = InftyMorphism::strict(
            qn.clone(),
            zero.clone(),
            &GradedMap::zero(qn.space().clone(), zero.space().clone(), 0),
        )?;
        let beta_tilde = Simplex::new(zero.clone(), TensorElement::zero(horn.dim()))?;
        filler = lift_through_tower_step(&phi, &gamma, &filler, &beta_tilde)?;
    }
    let final_value = filler.value().transport(filler.algebra().space(), algebra.space());
    let result = Simplex::new(algebra.clone(), final_value)?;
    if !horn.is_filled_by(&result) {
        return Err(SimplicialError::LiftInvariant("tower filler does not match the horn"));
    }
    Ok(result)
}

/// Lifts a horn filling problem through a fibration: returns `alpha` with
/// `d_i alpha = h_i` for `i != k` and `phi(alpha) = b`, built by threading
/// the tower step through every stage.
pub fn kan_fibration_lift(
    phi: &InftyMorphism,
    horn: &HornData,
    b: &Simplex,
) -> Result<Simplex, SimplicialError> {
    if horn.algebra() != phi.source() {
        return Err(SimplicialError::LiftPrecondition("horn not in the fibration source"));
    }
    if b.algebra() != phi.target() || b.dim() != horn.dim() {
        return Err(SimplicialError::LiftPrecondition("target simplex has the wrong shape"));
    }
    for i in 0..=horn.dim() {
        if i == horn.missing() {
            continue;
        }
        let pushed = apply_morphism(phi, horn.face(i).expect("face"))?;
        if pushed.value() != &b.value().face(i) {
            return Err(SimplicialError::LiftPrecondition("phi(h_i) != d_i(b)"));
        }
    }
    let n_max = phi.source().depth().max(phi.target().depth());
    let m = horn.dim();
    // Stage 1 base: the empty algebra quotient.
    let (q1, _) = phi.source().quotient(1)?;
    let mut alpha = Simplex::new(q1, TensorElement::zero(m))?;
    for n in 2..=n_max {
        let phi_n = truncate_saturating(phi, n)?;
        let gamma_n = horn.transport(phi_n.source())?;
        let beta_tilde =
            Simplex::new(phi_n.target().clone(), b.value().transport(b.algebra().space(), phi_n.target().space()))?;
        alpha = lift_through_tower_step(&phi_n, &gamma_n, &alpha, &beta_tilde)?;
    }
    Ok(alpha)
}

/// Truncates a morphism at stage n, saturating at each side's depth.
fn truncate_saturating(phi: &InftyMorphism, n: u32) -> Result<InftyMorphism, SimplicialError> {
    let (src, _) = phi.source().quotient(n.min(phi.source().depth()))?;
    let (tgt, _) = phi.target().quotient(n.min(phi.target().depth()))?;
    stage_morphism(phi, &src, &tgt)
}

/// Attempts to connect two Maurer-Cartan elements by an edge, solving
/// weight by weight up the tower. This is a witness generator under
/// polynomial-degree caps, not a decision procedure: a failure report names
/// the stage and the cap used.
pub fn connect_by_edge(
    algebra: &LInftyAlgebra,
    alpha0: &Element,
    alpha1: &Element,
    extra_degree: u32,
) -> Result<Simplex, SimplicialError> {
    algebra.require_mc(alpha0)?;
    algebra.require_mc(alpha1)?;
    if alpha0 == alpha1 {
        return Simplex::constant(algebra.clone(), alpha0, 1);
    }
    // Stage 2: the abelian case is a single cohomology decomposition.
    let (q2, _) = algebra.quotient(2.min(algebra.depth()))?;
    let a0_2 = restrict_element(alpha0, algebra.space(), q2.space());
    let a1_2 = restrict_element(alpha1, algebra.space(), q2.space());
    let complex = q2.complex().map_err(LinftyError::from)?;
    let h0 = complex.cohomology(0);
    let diff = a1_2.sub(&a0_2);
    let mut edge = match h0.decompose(&diff) {
        Some((coords, w)) if coords.iter().all(Rat::is_zero) => {
            // diff = dw exactly; the edge is a0 + t dw - w dt.
            let mut e = TensorElement::from_element(&a0_2, 1);
            let dw = complex.differential().apply(&w);
            for (i, c) in dw.iter() {
                e.add_term(i, PolyForm::coordinate(1, 1).scale(c));
            }
            for (i, c) in w.iter() {
                e.add_term(i, PolyForm::differential_coordinate(1, 1).scale(&-c.clone()));
            }
            Simplex::new(q2.clone(), e)?
        }
        _ => {
            return Err(SimplicialError::EdgeNotFound { stage: 2, max_poly_degree: 1 });
        }
    };
    // Higher stages: lift the edge and cancel the curvature defect with an
    // exact polynomial solve vanishing at both endpoints.
    for n in 3..=algebra.depth() {
        let (qn, _) = algebra.quotient(n)?;
        let stage = saturated_tower(&qn, n)?;
        let a0_n = restrict_element(alpha0, algebra.space(), qn.space());
        let a1_n = restrict_element(alpha1, algebra.space(), qn.space());
        let lifted = edge.value().transport(edge.algebra().space(), qn.space());
        // Fix the endpoints inside the kernel.
        let k0 = a0_n.sub(&lifted.eval_vertex(0));
        let k1 = a1_n.sub(&lifted.eval_vertex(1));
        let mut x = lifted;
        for (i, c) in k0.iter() {
            let form = PolyForm::one(1).sub(&PolyForm::coordinate(1, 1));
            x.add_term(i, form.scale(c));
        }
        for (i, c) in k1.iter() {
            x.add_term(i, PolyForm::coordinate(1, 1).scale(c));
        }
        let defect = tensor::curvature(&qn, &x);
        ensure_kernel_valued(&defect, qn.space(), n, "edge defect outside the kernel")?;
        let kernel_defect = defect.transport(qn.space(), stage.kernel.space());
        match solve_edge_correction(&stage.kernel, &kernel_defect, extra_degree) {
            Some(xi) => {
                let x_fixed = x.add(&xi.transport(stage.kernel.space(), qn.space()));
                edge = Simplex::new(qn.clone(), x_fixed)?;
            }
            None => {
                let cap = max_poly_degree(&kernel_defect) + 1 + extra_degree;
                return Err(SimplicialError::EdgeNotFound { stage: n, max_poly_degree: cap });
            }
        }
        if edge.vertex_value(0) != a0_n || edge.vertex_value(1) != a1_n {
            return Err(SimplicialError::LiftInvariant("edge endpoints drifted"));
        }
    }
    Ok(edge)
}

fn restrict_element(e: &Element, from: &GradedSpace, to: &GradedSpace) -> Element {
    let mut out = Element::zero();
    for (i, c) in e.iter() {
        if let Some(j) = to.index_of(from.name(i)) {
            out.add_coeff(j, c.clone());
        }
    }
    out
}

fn max_poly_degree(te: &TensorElement) -> u32 {
    let mut top = 0u32;
    for (_, form) in te.iter() {
        for (expo, _, _) in form.terms() {
            top = top.max(expo.iter().sum());
        }
    }
    top
}

/// Solves `D xi = -defect` in the abelian kernel, with `xi` of degree 0
/// vanishing at both vertices of the 1-simplex. Returns `None` when the
/// system is infeasible at the degree cap.
fn solve_edge_correction(
    kernel: &LInftyAlgebra,
    defect: &TensorElement,
    extra_degree: u32,
) -> Option<TensorElement> {
    let base_cap = max_poly_degree(defect) + 1;
    for cap in base_cap..=base_cap + extra_degree {
        if let Some(sol) = try_edge_correction(kernel, defect, cap as usize) {
            return Some(sol);
        }
    }
    None
}

fn try_edge_correction(
    kernel: &LInftyAlgebra,
    defect: &TensorElement,
    cap: usize,
) -> Option<TensorElement> {
    let space = kernel.space();
    // Unknowns: (basis of degree 0) x (powers 0..=cap) for the polynomial
    // part and (basis of degree -1) x (powers 0..cap) for the dt part.
    let mut unknowns: Vec<(usize, usize, bool)> = Vec::new();
    for i in 0..space.dim() {
        if space.degree(i) == 0 {
            for j in 0..=cap {
                unknowns.push((i, j, false));
            }
        }
        if space.degree(i) == -1 {
            for j in 0..cap.max(1) {
                unknowns.push((i, j, true));
            }
        }
    }
    if unknowns.is_empty() {
        return defect.is_zero().then(|| TensorElement::zero(1));
    }
    let unit = |&(i, j, dt): &(usize, usize, bool)| -> TensorElement {
        let mut form = PolyForm::one(1);
        for _ in 0..j {
            form = form.wedge(&PolyForm::coordinate(1, 1));
        }
        if dt {
            form = form.wedge(&PolyForm::differential_coordinate(1, 1));
        }
        let mut te = TensorElement::zero(1);
        te.add_term(i, form);
        te
    };
    // Row space: D(xi) + defect = 0 coefficients, plus endpoint rows.
    let mut row_keys: Vec<(usize, usize, bool)> = Vec::new();
    let rows_of = |te: &TensorElement, keys: &mut Vec<(usize, usize, bool)>| {
        for (b, form) in te.iter() {
            for (j, dt) in form_monomials(form) {
                let key = (b, j, dt);
                if !keys.contains(&key) {
                    keys.push(key);
                }
            }
        }
    };
    let columns: Vec<TensorElement> = unknowns
        .iter()
        .map(|u| tensor::differential(kernel, &unit(u)))
        .collect();
    for c in &columns {
        rows_of(c, &mut row_keys);
    }
    rows_of(defect, &mut row_keys);
    row_keys.sort_unstable();
    let endpoint_rows = 2 * space.slice(0, 1).len();
    let mut matrix = Matrix::zero(row_keys.len() + endpoint_rows, unknowns.len());
    let mut rhs = vec![Rat::from_integer(0.into()); row_keys.len() + endpoint_rows];
    for (col, column_value) in columns.iter().enumerate() {
        for (b, form) in column_value.iter() {
            for (j, dt) in form_monomials(form) {
                let row = row_keys.binary_search(&(b, j, dt)).expect("registered row");
                matrix.set(row, col, form_coefficient(form, j, dt));
            }
        }
    }
    for (b, form) in defect.iter() {
        for (j, dt) in form_monomials(form) {
            let row = row_keys.binary_search(&(b, j, dt)).expect("registered row");
            rhs[row] = -form_coefficient(form, j, dt);
        }
    }
    // Endpoint rows: xi(0) = xi(1) = 0 per degree-0 basis element.
    let deg0 = space.slice(0, 1);
    for (offset, &b) in deg0.iter().enumerate() {
        let row0 = row_keys.len() + 2 * offset;
        let row1 = row0 + 1;
        for (col, &(i, j, dt)) in unknowns.iter().enumerate() {
            if dt || i != b {
                continue;
            }
            if j == 0 {
                matrix.set(row0, col, rat(1));
            }
            matrix.set(row1, col, rat(1));
        }
    }
    match linalg::solve(&matrix, &rhs, PivotOrder::Lex) {
        SolveOutcome::Solution(x) => {
            let mut out = TensorElement::zero(1);
            for (col, u) in unknowns.iter().enumerate() {
                if !x[col].is_zero() {
                    out = out.add(&unit(u).scale(&x[col]));
                }
            }
            Some(out)
        }
        SolveOutcome::Inconsistent(_) => None,
    }
}

/// The (power, is_dt) monomial keys present in a form on the 1-simplex.
fn form_monomials(form: &PolyForm) -> Vec<(usize, bool)> {
    form.terms()
        .map(|(expo, wedge, _)| (expo.first().copied().unwrap_or(0) as usize, !wedge.is_empty()))
        .collect()
}

/// Coefficient of `t^j` or `t^j dt` in a form on the 1-simplex.
fn form_coefficient(form: &PolyForm, j: usize, dt: bool) -> Rat {
    let wedge: &[u8] = if dt { &[1] } else { &[] };
    form.term_coefficient(&[j as u32], wedge)
}

/// Lifts a Maurer-Cartan vertex through a morphism, stage by stage: at each
/// weight the joint linear system "stay flat, hit the target" is solved in
/// the abelian kernel. For acyclic fibrations this always succeeds; for
/// plain fibrations a genuine obstruction is reported with its stage.
pub fn lift_vertex(phi: &InftyMorphism, b: &Element) -> Result<Element, SimplicialError> {
    phi.target().require_mc(b)?;
    let n_max = phi.source().depth().max(phi.target().depth());
    let mut alpha = Element::zero();
    let mut prev_space = phi.source().quotient(1)?.0.space().clone();
    for n in 2..=n_max {
        let phi_n = truncate_saturating(phi, n)?;
        let src_n = phi_n.source().clone();
        let tgt_n = phi_n.target().clone();
        let b_n = restrict_element(b, phi.target().space(), tgt_n.space());
        let theta0 = lift_by_names(&alpha, &prev_space, src_n.space());
        let src_stage = saturated_tower(&src_n, n)?;
        let tgt_stage = saturated_tower(&tgt_n, n)?;
        let psi = kernel_linear_map(&phi_n, &src_stage, &tgt_stage)?;
        let curv0 = src_n.curvature(&theta0)?;
        let pushed0 = phi_n.pushforward_raw(&theta0);
        let mismatch = b_n.sub(&pushed0);
        // Both right-hand sides must already be kernel-valued.
        for (i, _) in curv0.iter() {
            if src_n.space().weight(i) != n - 1 {
                return Err(SimplicialError::LiftInvariant("vertex defect outside the kernel"));
            }
        }
        for (i, _) in mismatch.iter() {
            if tgt_n.space().weight(i) != n - 1 {
                return Err(SimplicialError::LiftInvariant("vertex mismatch outside the kernel"));
            }
        }
        let kernel = &src_stage.kernel;
        let cols: Vec<usize> = kernel.space().slice(0, 1);
        let rows_d: Vec<usize> = kernel.space().slice(1, 1);
        let rows_psi: Vec<usize> = tgt_stage.kernel.space().slice(0, 1);
        let d_block = kernel.differential().block(&rows_d, &cols);
        let psi_block = psi.block(&rows_psi, &cols);
        let mut matrix = Matrix::zero(rows_d.len() + rows_psi.len(), cols.len());
        for r in 0..rows_d.len() {
            for c in 0..cols.len() {
                matrix.set(r, c, d_block.get(r, c).clone());
            }
        }
        for r in 0..rows_psi.len() {
            for c in 0..cols.len() {
                matrix.set(rows_d.len() + r, c, psi_block.get(r, c).clone());
            }
        }
        let curv_in_kernel =
            restrict_element(&curv0, src_n.space(), kernel.space()).to_dense_on(&rows_d, kernel.space());
        let mismatch_in_kernel = restrict_element(&mismatch, tgt_n.space(), tgt_stage.kernel.space())
            .to_dense_on(&rows_psi, tgt_stage.kernel.space());
        let mut rhs = Vec::with_capacity(rows_d.len() + rows_psi.len());
        for v in curv_in_kernel {
            rhs.push(-v);
        }
        rhs.extend(mismatch_in_kernel);
        match linalg::solve(&matrix, &rhs, PivotOrder::Lex) {
            SolveOutcome::Solution(x) => {
                let mut xi = Element::zero();
                for (pos, c) in x.iter().enumerate() {
                    if !c.is_zero() {
                        let ambient = src_stage.kernel_indices[cols[pos]];
                        let _ = ambient;
                        xi.add_coeff(cols[pos], c.clone());
                    }
                }
                // Transport kernel coordinates into the stage algebra.
                let mut xi_in_stage = Element::zero();
                for (i, c) in xi.iter() {
                    let name = kernel.space().name(i);
                    let j = src_n.space().index_of(name).expect("kernel name in stage");
                    xi_in_stage.add_coeff(j, c.clone());
                }
                alpha = theta0.add(&xi_in_stage);
            }
            SolveOutcome::Inconsistent(_) => {
                return Err(SimplicialError::VertexLiftObstructed { stage: n });
            }
        }
        prev_space = src_n.space().clone();
    }
    // Final verification against the ambient data.
    let alpha_full = lift_by_names(&alpha, &prev_space, phi.source().space());
    phi.source().require_mc(&alpha_full)?;
    let pushed = phi.pushforward(&alpha_full)?;
    if pushed != *b {
        return Err(SimplicialError::LiftInvariant("vertex lift misses the target"));
    }
    Ok(alpha_full)
}

fn lift_by_names(e: &Element, from: &GradedSpace, to: &GradedSpace) -> Element {
    let mut out = Element::zero();
    for (i, c) in e.iter() {
        let j = to.index_of(from.name(i)).expect("section by names");
        out.add_coeff(j, c.clone());
    }
    out
}

impl Element {
    fn to_dense_on(&self, indices: &[usize], _space: &GradedSpace) -> Vec<Rat> {
        indices.iter().map(|&i| self.coeff(i)).collect()
    }
}
