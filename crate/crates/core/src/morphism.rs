//! Infinity-morphisms of filtered shifted L-infinity algebras.
//!
//! A morphism is stored through its Taylor components: degree-0 symmetric
//! maps from words of the source into the target, one table per arity. The
//! defining coalgebra-morphism equation is checked word by word; both sides
//! are assembled with the same Koszul conventions as the bracket machinery.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{
    self, koszul_perm_sign, set_partitions, sorted_words, subsets, unshuffle_sign, LInftyAlgebra,
    LinftyError, SymTable,
};
use crate::graded::{Element, GradedError, GradedMap, GradedSpace};
use crate::par;
use crate::rat::rat;

#[derive(Debug, Error)]
pub enum MorphismError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Linfty(#[from] LinftyError),
    #[error("component key {0:?} is not sorted")]
    UnsortedKey(Vec<String>),
    #[error("component value on {word:?} is not homogeneous of degree {expected}")]
    BadValueDegree { word: Vec<String>, expected: i64 },
    #[error("component on {word:?} violates the filtration condition")]
    WeightCondition { word: Vec<String> },
    #[error("coalgebra morphism equation fails on {word:?} with residual {residual}")]
    Equation { word: Vec<String>, residual: String },
    #[error("source/target mismatch in composition")]
    ComposeMismatch,
    #[error("pushforward input is not Maurer-Cartan: curvature = {0}")]
    InputNotMc(String),
    #[error("pushforward output is not Maurer-Cartan (broken morphism): curvature = {0}")]
    OutputNotMc(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InftyMorphism {
    source: LInftyAlgebra,
    target: LInftyAlgebra,
    components: SymTable,
}

/// Result of classifying a morphism against the model-structure classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MorphismClass {
    pub weak_equivalence: bool,
    pub fibration: bool,
    pub acyclic_fibration: bool,
}

impl InftyMorphism {
    pub fn new(
        source: LInftyAlgebra,
        target: LInftyAlgebra,
        components: SymTable,
    ) -> Result<Self, MorphismError> {
        for (&arity, table) in &components {
            for (word, value) in table {
                let names = |w: &[usize]| -> Vec<String> {
                    w.iter().map(|&i| source.space().name(i).to_string()).collect()
                };
                if word.len() != arity || !word.windows(2).all(|p| p[0] <= p[1]) {
                    return Err(MorphismError::UnsortedKey(names(word)));
                }
                let expected: i64 = word.iter().map(|&i| source.space().degree(i)).sum();
                if !value.is_homogeneous(target.space(), expected) {
                    return Err(MorphismError::BadValueDegree { word: names(word), expected });
                }
            }
        }
        Ok(InftyMorphism { source, target, components })
    }

    /// A morphism with only a linear term.
    pub fn strict(
        source: LInftyAlgebra,
        target: LInftyAlgebra,
        phi: &GradedMap,
    ) -> Result<Self, MorphismError> {
        assert_eq!(phi.degree(), 0, "linear term must have degree 0");
        assert!(phi.source() == source.space() && phi.target() == target.space());
        let mut arity1 = BTreeMap::new();
        for i in 0..source.space().dim() {
            let col = phi.column(i);
            if !col.is_zero() {
                arity1.insert(vec![i], col);
            }
        }
        let mut components = SymTable::new();
        components.insert(1, arity1);
        Self::new(source, target, components)
    }

    pub fn identity(alg: &LInftyAlgebra) -> Self {
        Self::strict(alg.clone(), alg.clone(), &GradedMap::identity(alg.space()))
            .expect("identity is strict")
    }

    pub fn source(&self) -> &LInftyAlgebra {
        &self.source
    }

    pub fn target(&self) -> &LInftyAlgebra {
        &self.target
    }

    pub fn components(&self) -> &SymTable {
        &self.components
    }

    pub fn is_strict(&self) -> bool {
        self.components.iter().all(|(&m, t)| m == 1 || t.values().all(Element::is_zero))
    }

    /// The linear term as a graded map of degree 0.
    pub fn linear_term(&self) -> GradedMap {
        let mut map = GradedMap::zero(self.source.space().clone(), self.target.space().clone(), 0);
        if let Some(t) = self.components.get(&1) {
            for (word, value) in t {
                for (tgt, c) in value.iter() {
                    map.add_entry(tgt, word[0], c.clone()).expect("degree-0 linear term");
                }
            }
        }
        map
    }

    /// Evaluates the arity-m component on letters in any order.
    pub fn eval_word(&self, arity: usize, letters: &[usize]) -> Element {
        assert_eq!(letters.len(), arity);
        let Some((sorted, negative)) = algebra::sort_with_sign(self.source.space(), letters)
        else {
            return Element::zero();
        };
        let raw = self
            .components
            .get(&arity)
            .and_then(|t| t.get(&sorted))
            .cloned()
            .unwrap_or_default();
        if negative {
            raw.scale(&rat(-1))
        } else {
            raw
        }
    }

    pub fn eval_elements(&self, arity: usize, args: &[Element]) -> Element {
        algebra::expand_multilinear(args, &mut |letters| self.eval_word(arity, letters))
    }

    /// The filtration condition on every stored component.
    pub fn check_weight_condition(&self) -> Result<(), MorphismError> {
        for table in self.components.values() {
            for (word, value) in table {
                let wt: u32 = word.iter().map(|&i| self.source.space().weight(i)).sum();
                if let Some(min) = value.min_weight(self.target.space()) {
                    if min < wt {
                        return Err(MorphismError::WeightCondition {
                            word: word
                                .iter()
                                .map(|&i| self.source.space().name(i).to_string())
                                .collect(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Left side of the morphism equation on a word: components applied
    /// after the source coderivation.
    fn equation_lhs(&self, word: &[usize]) -> Element {
        let m = word.len();
        let degrees: Vec<i64> = word.iter().map(|&i| self.source.space().degree(i)).collect();
        let mut acc = Element::zero();
        for k in 1..=m {
            for subset in subsets(m, k) {
                let negative = unshuffle_sign(&degrees, &subset);
                let letters: Vec<usize> = subset.iter().map(|&p| word[p]).collect();
                let inner = self.source.eval_word(k, &letters);
                if inner.is_zero() {
                    continue;
                }
                let rest: Vec<usize> =
                    (0..m).filter(|p| !subset.contains(p)).map(|p| word[p]).collect();
                for (b, c) in inner.iter() {
                    let mut args = Vec::with_capacity(m - k + 1);
                    args.push(b);
                    args.extend_from_slice(&rest);
                    let mut v = self.eval_word(m - k + 1, &args).scale(c);
                    if negative {
                        v = v.scale(&rat(-1));
                    }
                    acc = acc.add(&v);
                }
            }
        }
        acc
    }

    /// Right side of the morphism equation on a word: the target
    /// coderivation applied to the image, a sum over set partitions.
    fn equation_rhs(&self, word: &[usize]) -> Element {
        partition_sum(
            self.source.space(),
            word,
            &|arity, letters| self.eval_word(arity, letters),
            &|r, values| {
                if r == 1 {
                    self.target.differential().apply(&values[0])
                } else {
                    self.target.eval_elements(r, values)
                }
            },
        )
    }

    /// Residual of the coalgebra-morphism equation on one word.
    pub fn equation_residual(&self, word: &[usize]) -> Element {
        self.equation_lhs(word).sub(&self.equation_rhs(word))
    }

    /// Verifies the filtration condition and the full morphism equation on
    /// all words of total weight below the target depth.
    pub fn check_morphism(&self) -> Result<(), MorphismError> {
        self.check_weight_condition()?;
        let max_arity = (self.target.depth().saturating_sub(1)) as usize;
        let mut words = Vec::new();
        for m in 1..=max_arity {
            words.extend(sorted_words(self.source.space(), m, self.target.depth() - 1));
        }
        let failure = par::find_map_first(words, |word| {
            let residual = self.equation_residual(&word);
            if residual.is_zero() {
                None
            } else {
                Some((word.clone(), residual))
            }
        });
        match failure {
            None => Ok(()),
            Some((word, residual)) => Err(MorphismError::Equation {
                word: word.iter().map(|&i| self.source.space().name(i).to_string()).collect(),
                residual: residual.render(self.target.space()),
            }),
        }
    }

    /// The pushforward series `sum_{m >= 1} (1/m!) f_m(alpha^m)` on any
    /// degree-0 element, without Maurer-Cartan checks.
    pub fn pushforward_raw(&self, alpha: &Element) -> Element {
        let mut out = Element::zero();
        for (&m, _) in &self.components {
            for (letters, coeff) in algebra::multiset_expansion(
                self.source.space(),
                alpha,
                m,
                self.target.depth() - 1,
            ) {
                out = out.add(&self.eval_word(m, &letters).scale(&coeff));
            }
        }
        out
    }

    /// Pushes a Maurer-Cartan element forward, verified MC in the target.
    pub fn pushforward(&self, alpha: &Element) -> Result<Element, MorphismError> {
        let curv = self.source.curvature(alpha)?;
        if !curv.is_zero() {
            return Err(MorphismError::InputNotMc(curv.render(self.source.space())));
        }
        let out = self.pushforward_raw(alpha);
        let curv_out = self.target.curvature(&out)?;
        if !curv_out.is_zero() {
            return Err(MorphismError::OutputNotMc(curv_out.render(self.target.space())));
        }
        Ok(out)
    }

    /// Classification per the model-structure classes: the linear term must
    /// restrict to a quasi-isomorphism / surjection on every filtration
    /// stage.
    pub fn classify(&self) -> Result<MorphismClass, MorphismError> {
        self.check_morphism()?;
        let src = self.source.complex()?;
        let tgt = self.target.complex()?;
        let phi = self.linear_term();
        let weak_equivalence = crate::graded::is_quasi_iso_on_filtration(&src, &tgt, &phi)?;
        let fibration = crate::graded::is_surjective_on_filtration(&src, &tgt, &phi)?;
        Ok(MorphismClass {
            weak_equivalence,
            fibration,
            acyclic_fibration: weak_equivalence && fibration,
        })
    }
}

/// Sum over set partitions of the word, with Koszul reordering signs:
/// `sum_P eps(P) outer(r, [component(|B|, letters_B) for B in P])`.
pub(crate) fn partition_sum(
    space: &GradedSpace,
    word: &[usize],
    component: &impl Fn(usize, &[usize]) -> Element,
    outer: &impl Fn(usize, &[Element]) -> Element,
) -> Element {
    let m = word.len();
    let degrees: Vec<i64> = word.iter().map(|&i| space.degree(i)).collect();
    let mut acc = Element::zero();
    for partition in set_partitions(m) {
        let perm: Vec<usize> = partition.iter().flatten().copied().collect();
        let negative = koszul_perm_sign(&degrees, &perm);
        let mut values = Vec::with_capacity(partition.len());
        let mut vanished = false;
        for block in &partition {
            let letters: Vec<usize> = block.iter().map(|&p| word[p]).collect();
            let v = component(block.len(), &letters);
            if v.is_zero() {
                vanished = true;
                break;
            }
            values.push(v);
        }
        if vanished {
            continue;
        }
        let mut v = outer(partition.len(), &values);
        if negative {
            v = v.scale(&rat(-1));
        }
        acc = acc.add(&v);
    }
    acc
}

/// Composition of infinity-morphisms: components are sums over set
/// partitions of inner components fed into outer components.
pub fn compose(
    outer: &InftyMorphism,
    inner: &InftyMorphism,
) -> Result<InftyMorphism, MorphismError> {
    if inner.target != outer.source {
        return Err(MorphismError::ComposeMismatch);
    }
    let mut components = SymTable::new();
    let max_arity = (outer.target.depth().saturating_sub(1)) as usize;
    for m in 1..=max_arity {
        let mut table = BTreeMap::new();
        for word in sorted_words(inner.source.space(), m, outer.target.depth() - 1) {
            let value = partition_sum(
                inner.source.space(),
                &word,
                &|arity, letters| inner.eval_word(arity, letters),
                &|r, values| outer.eval_elements(r, values),
            );
            if !value.is_zero() {
                table.insert(word, value);
            }
        }
        if !table.is_empty() {
            components.insert(m, table);
        }
    }
    InftyMorphism::new(inner.source.clone(), outer.target.clone(), components)
}

/// One stage of the filtration tower of an algebra: the short exact
/// sequence of nilpotent algebras at weight n, with its strict morphisms.
pub struct TowerStage {
    /// `L / F_n L`.
    pub total: LInftyAlgebra,
    /// `L / F_{n-1} L`.
    pub base: LInftyAlgebra,
    /// `F_{n-1} L / F_n L`, an abelian algebra.
    pub kernel: LInftyAlgebra,
    /// Strict projection `total -> base`; always a fibration.
    pub projection: InftyMorphism,
    /// Strict inclusion `kernel -> total`.
    pub inclusion: InftyMorphism,
    /// Index embedding of the total basis into the ambient algebra.
    pub total_indices: Vec<usize>,
    /// Index embedding of the kernel basis into the total basis.
    pub kernel_indices: Vec<usize>,
}

/// Builds the weight-n stage of the quotient tower, `2 <= n <= depth`.
pub fn quotient_tower(alg: &LInftyAlgebra, n: u32) -> Result<TowerStage, LinftyError> {
    if n < 2 {
        return Err(LinftyError::StageOutOfRange(n));
    }
    let (total, total_indices) = alg.quotient(n)?;
    let base = alg.quotient(n - 1)?.0;
    let (kernel, kernel_indices) = alg.kernel_stage(n)?;
    let mut proj = GradedMap::zero(total.space().clone(), base.space().clone(), 0);
    for i in 0..total.space().dim() {
        if let Some(j) = base.space().index_of(total.space().name(i)) {
            proj.add_entry(j, i, rat(1)).expect("projection is degree 0");
        }
    }
    let mut incl = GradedMap::zero(kernel.space().clone(), total.space().clone(), 0);
    for (pos, &i) in kernel_indices.iter().enumerate() {
        incl.add_entry(i, pos, rat(1)).expect("inclusion is degree 0");
    }
    let projection = InftyMorphism::strict(total.clone(), base.clone(), &proj)
        .map_err(|_| LinftyError::StageOutOfRange(n))?;
    let inclusion = InftyMorphism::strict(kernel.clone(), total.clone(), &incl)
        .map_err(|_| LinftyError::StageOutOfRange(n))?;
    Ok(TowerStage { total, base, kernel, projection, inclusion, total_indices, kernel_indices })
}

/// Restricts a morphism to the weight-n quotients on both sides.
pub fn truncate_morphism(phi: &InftyMorphism, n: u32) -> Result<InftyMorphism, LinftyError> {
    let (src, src_indices) = phi.source.quotient(n)?;
    let (tgt, tgt_indices) = phi.target.quotient(n)?;
    let src_pos: BTreeMap<usize, usize> =
        src_indices.iter().enumerate().map(|(pos, &i)| (i, pos)).collect();
    let mut components = SymTable::new();
    for (&arity, table) in &phi.components {
        let mut out = BTreeMap::new();
        for (word, value) in table {
            let Some(new_word) =
                word.iter().map(|i| src_pos.get(i).copied()).collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            let restricted = value.restrict_to(&tgt_indices);
            if !restricted.is_zero() {
                out.insert(new_word, restricted);
            }
        }
        if !out.is_empty() {
            components.insert(arity, out);
        }
    }
    InftyMorphism::new(src, tgt, components).map_err(|_| LinftyError::StageOutOfRange(n))
}

/// The induced linear map on weight-(n-1) kernels of a morphism.
pub fn kernel_map(phi: &InftyMorphism, n: u32) -> Result<GradedMap, LinftyError> {
    let (k_src, src_idx) = phi.source.kernel_stage(n)?;
    let (k_tgt, tgt_idx) = phi.target.kernel_stage(n)?;
    // Kernel stages index into the quotients; translate to ambient indices.
    let (_, src_ambient) = phi.source.quotient(n)?;
    let (_, tgt_ambient) = phi.target.quotient(n)?;
    let src_in_ambient: Vec<usize> = src_idx.iter().map(|&i| src_ambient[i]).collect();
    let tgt_in_ambient: Vec<usize> = tgt_idx.iter().map(|&i| tgt_ambient[i]).collect();
    let linear = phi.linear_term();
    Ok(linear.restrict(k_src.space(), &src_in_ambient, k_tgt.space(), &tgt_in_ambient))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::graded::Element;

    #[test]
    fn identity_checks_and_classifies() {
        for (name, l) in corpus::all_algebras() {
            let id = InftyMorphism::identity(&l);
            assert!(id.check_morphism().is_ok(), "{name}");
            let class = id.classify().unwrap();
            assert!(class.weak_equivalence && class.fibration && class.acyclic_fibration, "{name}");
        }
    }

    #[test]
    fn bundled_morphisms_check() {
        for (name, phi) in corpus::all_morphisms() {
            assert!(phi.check_morphism().is_ok(), "{name} fails the morphism equation");
        }
    }

    #[test]
    fn projection_is_fibration_not_weq() {
        let p = corpus::fibration();
        let class = p.classify().unwrap();
        assert!(p.is_strict());
        assert!(class.fibration);
        assert!(!class.weak_equivalence);
    }

    #[test]
    fn tower_projections_are_fibrations() {
        for (name, l) in corpus::all_algebras() {
            for n in 2..=l.depth() {
                let stage = quotient_tower(&l, n).unwrap();
                assert!(stage.kernel.is_abelian(), "{name} kernel at {n}");
                let class = stage.projection.classify().unwrap();
                assert!(class.fibration, "{name} projection at {n} is not a fibration");
            }
        }
    }

    #[test]
    fn zero_map_weq_and_fibration_interplay() {
        // Acyclic two-term complex; the zero endomorphism is a weak
        // equivalence (both sides acyclic on every stage) but no fibration.
        let tgt_space = GradedSpace::new(vec![("x", 0, 1), ("y", 1, 1)]).unwrap();
        let mut d = GradedMap::zero(tgt_space.clone(), tgt_space.clone(), 1);
        d.add_entry(1, 0, rat(1)).unwrap();
        let tgt = LInftyAlgebra::abelian(tgt_space, d, 2).unwrap();
        let zero = InftyMorphism::strict(
            tgt.clone(),
            tgt.clone(),
            &GradedMap::zero(tgt.space().clone(), tgt.space().clone(), 0),
        )
        .unwrap();
        let class = zero.classify().unwrap();
        assert!(class.weak_equivalence);
        assert!(!class.fibration);
        assert!(!class.acyclic_fibration);
    }

    #[test]
    fn pushforward_examples() {
        // Identity pushforward is the identity on MC elements.
        let l = corpus::filtered4();
        let q = l.space().index_of("q").unwrap();
        let alpha = Element::single(q, rat(3));
        let id = InftyMorphism::identity(&l);
        assert_eq!(id.pushforward(&alpha).unwrap(), alpha);

        // Strict map of abelian algebras sends cocycles to their images.
        let ab = corpus::abelian5();
        let id_ab = InftyMorphism::identity(&ab);
        let c = ab.space().index_of("c").unwrap();
        let beta = Element::single(c, rat(-2));
        assert_eq!(id_ab.pushforward(&beta).unwrap(), beta);

        // Non-MC input is rejected.
        let x = l.space().index_of("x").unwrap();
        assert!(matches!(
            id.pushforward(&Element::single(x, rat(1))),
            Err(MorphismError::InputNotMc(_))
        ));

        // The bundled transfer morphism pushes wb-lines to u1 - u2 lines.
        let f = corpus::htt_infinity_morphism();
        let wb = f.source().space().index_of("wb").unwrap();
        let gamma = Element::single(wb, rat(2));
        let image = f.pushforward(&gamma).unwrap();
        let u1 = f.target().space().index_of("u1").unwrap();
        let u2 = f.target().space().index_of("u2").unwrap();
        assert_eq!(image, Element::from_coeffs([(u1, rat(2)), (u2, rat(-2))]));
    }

    #[test]
    fn compose_identity_and_strict() {
        let l = corpus::filtered4();
        let id = InftyMorphism::identity(&l);
        let f = corpus::htt_infinity_morphism();
        let id_b = InftyMorphism::identity(f.target());
        let lhs = compose(&id_b, &f).unwrap();
        assert_eq!(lhs.components(), f.components());
        let rhs = compose(&f, &InftyMorphism::identity(f.source())).unwrap();
        assert_eq!(rhs.components(), f.components());
        // Strict composed with strict is strict with composed linear terms.
        let stage = quotient_tower(&l, 3).unwrap();
        let p3 = stage.projection;
        let stage2 = quotient_tower(p3.target(), 2).unwrap();
        let p2 = stage2.projection;
        let c = compose(&p2, &p3).unwrap();
        assert!(c.is_strict());
        assert_eq!(c.linear_term(), p2.linear_term().compose(&p3.linear_term()));
        assert!(c.check_morphism().is_ok());
        // Mismatched source/target is rejected.
        assert!(matches!(compose(&id, &p3), Err(MorphismError::ComposeMismatch)));
    }

    #[test]
    fn composite_arity_two_partition_oracle() {
        // Compose the bundled transfer morphism with a nonstrict
        // endomorphism of its target; the arity-2 component of the
        // composite must be g1(f2(a,b)) + g2(f1 a, f1 b) by hand.
        let f = corpus::htt_infinity_morphism();
        let b = f.target().clone();
        let mut arity1 = BTreeMap::new();
        for i in 0..b.space().dim() {
            arity1.insert(vec![i], b.space().unit(i));
        }
        let mut arity2 = BTreeMap::new();
        arity2.insert(vec![0, 0], Element::from_coeffs([(1, rat(1)), (2, rat(-1))]));
        let mut outer_components = SymTable::new();
        outer_components.insert(1, arity1);
        outer_components.insert(2, arity2);
        let g = InftyMorphism::new(b.clone(), b.clone(), outer_components).unwrap();
        assert!(g.check_morphism().is_ok());
        let composite = compose(&g, &f).unwrap();
        let xb = f.source().space().index_of("xb").unwrap();
        let expected = g
            .eval_elements(1, &[f.eval_word(2, &[xb, xb])])
            .add(&g.eval_elements(2, &[f.eval_word(1, &[xb]), f.eval_word(1, &[xb])]));
        assert_eq!(composite.eval_word(2, &[xb, xb]), expected);
        assert!(composite.check_morphism().is_ok());
    }

    #[test]
    fn pushforward_respects_composition() {
        let l = corpus::filtered4();
        let stage3 = quotient_tower(&l, 3).unwrap();
        let p3 = stage3.projection;
        let stage2 = quotient_tower(p3.source(), 2).unwrap();
        let p2_lift = stage2.projection;
        // p2_lift goes L/F3 -> L/F2; p3 goes L/F3 -> L/F2 as well. Compose
        // p2 of the base tower with p3 instead.
        let base_stage2 = quotient_tower(p3.target(), 2).unwrap();
        let p2 = base_stage2.projection;
        let composite = compose(&p2, &p3).unwrap();
        let (l3, _) = l.quotient(3).unwrap();
        let q3 = l3.space().index_of("q").unwrap();
        let alpha = Element::single(q3, rat(2));
        assert!(l3.is_mc(&alpha).unwrap());
        let via_composite = composite.pushforward(&alpha).unwrap();
        let via_stages = p2.pushforward(&p3.pushforward(&alpha).unwrap()).unwrap();
        assert_eq!(via_composite, via_stages);
        let _ = p2_lift;
    }
}
