//! Filtered shifted L-infinity algebras.
//!
//! Brackets are graded-symmetric operations of degree +1 in every arity >= 2,
//! stored on weakly increasing basis multi-indices; evaluating on an
//! unsorted word inserts the Koszul sign of the sorting permutation computed
//! from internal degrees. Nilpotency is modeled by a truncation depth N: the
//! weight-N filtration stage is identically zero, so all curvature, twisting
//! and pushforward series terminate because an arity-m term raises weight to
//! at least m.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::graded::{ChainComplex, Element, GradedError, GradedMap, GradedSpace};
use crate::par;
use crate::rat::{inv_factorial, Rat};

pub type SymTable = BTreeMap<usize, BTreeMap<Vec<usize>, Element>>;

#[derive(Debug, Error)]
pub enum LinftyError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("bracket arity {0} outside 2..=arity_cap")]
    BadArity(usize),
    #[error("bracket key {0:?} is not sorted")]
    UnsortedKey(Vec<String>),
    #[error("bracket on {word:?} must vanish: repeated odd-degree letter")]
    OddSquareKey { word: Vec<String> },
    #[error("bracket value on {word:?} is not homogeneous of degree {expected}")]
    BadValueDegree { word: Vec<String>, expected: i64 },
    #[error("basis element `{0}` has weight >= the truncation depth")]
    WeightBeyondDepth(String),
    #[error("element is not homogeneous of degree {0}")]
    WrongDegree(i64),
    #[error("element is not Maurer-Cartan; curvature = {0}")]
    NotMaurerCartan(String),
    #[error("bracket value on {word:?} violates weight additivity")]
    WeightAdditivity { word: Vec<String> },
    #[error("quotient stage {0} out of range 2..=depth")]
    StageOutOfRange(u32),
}

/// A named report of the first violated identity found by
/// [`LInftyAlgebra::check_linfty`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiViolation {
    pub arity: usize,
    pub word: Vec<String>,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LInftyAlgebra {
    space: GradedSpace,
    differential: GradedMap,
    brackets: SymTable,
    arity_cap: usize,
    depth: u32,
}

impl LInftyAlgebra {
    /// Structural validation: degrees, sorted keys, arity and depth bounds.
    /// The generalized Jacobi identities are checked by
    /// [`Self::check_linfty`], weight additivity by
    /// [`Self::check_weight_additivity`].
    pub fn new(
        space: GradedSpace,
        differential: GradedMap,
        brackets: SymTable,
        arity_cap: usize,
        depth: u32,
    ) -> Result<Self, LinftyError> {
        if differential.degree() != 1
            || differential.source() != &space
            || differential.target() != &space
        {
            return Err(GradedError::SpaceMismatch.into());
        }
        differential.check_preserves_weights()?;
        for i in 0..space.dim() {
            if space.weight(i) >= depth {
                return Err(LinftyError::WeightBeyondDepth(space.name(i).to_string()));
            }
        }
        for (&arity, table) in &brackets {
            if arity < 2 || arity > arity_cap {
                return Err(LinftyError::BadArity(arity));
            }
            for (word, value) in table {
                let names = |w: &[usize]| w.iter().map(|&i| space.name(i).to_string()).collect();
                if !word.windows(2).all(|p| p[0] <= p[1]) || word.len() != arity {
                    return Err(LinftyError::UnsortedKey(names(word)));
                }
                if has_odd_square(&space, word) && !value.is_zero() {
                    return Err(LinftyError::OddSquareKey { word: names(word) });
                }
                let expected: i64 = word.iter().map(|&i| space.degree(i)).sum::<i64>() + 1;
                if !value.is_homogeneous(&space, expected) {
                    return Err(LinftyError::BadValueDegree { word: names(word), expected });
                }
            }
        }
        Ok(LInftyAlgebra { space, differential, brackets, arity_cap, depth })
    }

    /// An algebra with no brackets at all.
    pub fn abelian(
        space: GradedSpace,
        differential: GradedMap,
        depth: u32,
    ) -> Result<Self, LinftyError> {
        Self::new(space, differential, BTreeMap::new(), 2, depth)
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn differential(&self) -> &GradedMap {
        &self.differential
    }

    pub fn brackets(&self) -> &SymTable {
        &self.brackets
    }

    pub fn arity_cap(&self) -> usize {
        self.arity_cap
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn is_abelian(&self) -> bool {
        self.brackets.values().all(|t| t.values().all(Element::is_zero))
    }

    pub fn complex(&self) -> Result<ChainComplex, GradedError> {
        ChainComplex::new(self.space.clone(), self.differential.clone())
    }

    /// Evaluates the arity-m bracket on basis letters in any order, inserting
    /// the Koszul sign of the sorting permutation. Arity 1 is the
    /// differential.
    pub fn eval_word(&self, arity: usize, letters: &[usize]) -> Element {
        assert_eq!(letters.len(), arity);
        if arity == 1 {
            return self.differential.apply(&self.space.unit(letters[0]));
        }
        let Some((sorted, negative)) = sort_with_sign(&self.space, letters) else {
            return Element::zero();
        };
        let raw = self
            .brackets
            .get(&arity)
            .and_then(|t| t.get(&sorted))
            .cloned()
            .unwrap_or_default();
        if negative {
            raw.scale(&crate::rat::rat(-1))
        } else {
            raw
        }
    }

    /// Multilinear extension of [`Self::eval_word`] to element arguments.
    pub fn eval_elements(&self, arity: usize, args: &[Element]) -> Element {
        expand_multilinear(args, &mut |letters| self.eval_word(arity, letters))
    }

    /// Weight additivity of every stored bracket value.
    pub fn check_weight_additivity(&self) -> Result<(), LinftyError> {
        for table in self.brackets.values() {
            for (word, value) in table {
                let wt: u32 = word.iter().map(|&i| self.space.weight(i)).sum();
                if let Some(min) = value.min_weight(&self.space) {
                    if min < wt {
                        return Err(LinftyError::WeightAdditivity {
                            word: word.iter().map(|&i| self.space.name(i).to_string()).collect(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Expands the square of the structure coderivation on every basis word
    /// of total weight below the truncation depth and asserts exact
    /// vanishing. Returns the first violated identity otherwise.
    pub fn check_linfty(&self) -> Result<(), JacobiViolation> {
        let max_arity = (self.depth.saturating_sub(1)) as usize;
        let mut words = Vec::new();
        for m in 1..=max_arity {
            words.extend(sorted_words(&self.space, m, self.depth - 1));
        }
        par::find_map_first(words, |word| {
            let residual = self.jacobi_residual(&word);
            if residual.is_zero() {
                None
            } else {
                Some(JacobiViolation {
                    arity: word.len(),
                    word: word.iter().map(|&i| self.space.name(i).to_string()).collect(),
                    residual: residual.render(&self.space),
                })
            }
        })
        .map_or(Ok(()), Err)
    }

    /// The Jacobi residual on one word: the projection of Q^2 to the algebra.
    pub fn jacobi_residual(&self, word: &[usize]) -> Element {
        let m = word.len();
        let degrees: Vec<i64> = word.iter().map(|&i| self.space.degree(i)).collect();
        let mut acc = Element::zero();
        for k in 1..=m {
            for subset in subsets(m, k) {
                let negative = unshuffle_sign(&degrees, &subset);
                let inner_letters: Vec<usize> = subset.iter().map(|&p| word[p]).collect();
                let inner = self.eval_word(k, &inner_letters);
                if inner.is_zero() {
                    continue;
                }
                let rest: Vec<usize> =
                    (0..m).filter(|p| !subset.contains(p)).map(|p| word[p]).collect();
                let outer_arity = m - k + 1;
                for (b, c) in inner.iter() {
                    let mut letters = Vec::with_capacity(outer_arity);
                    letters.push(b);
                    letters.extend_from_slice(&rest);
                    let mut v = self.eval_word(outer_arity, &letters).scale(c);
                    if negative {
                        v = v.scale(&crate::rat::rat(-1));
                    }
                    acc = acc.add(&v);
                }
            }
        }
        acc
    }

    /// The curvature of a degree-0 element: `da + sum_m (1/m!) {a,...,a}_m`.
    pub fn curvature(&self, alpha: &Element) -> Result<Element, LinftyError> {
        if !alpha.is_homogeneous(&self.space, 0) {
            return Err(LinftyError::WrongDegree(0));
        }
        let mut out = self.differential.apply(alpha);
        for m in 2..=self.arity_cap {
            for (letters, coeff) in multiset_expansion(&self.space, alpha, m, self.depth - 1) {
                out = out.add(&self.eval_word(m, &letters).scale(&coeff));
            }
        }
        Ok(out)
    }

    pub fn is_mc(&self, alpha: &Element) -> Result<bool, LinftyError> {
        Ok(self.curvature(alpha)?.is_zero())
    }

    pub fn require_mc(&self, alpha: &Element) -> Result<(), LinftyError> {
        let c = self.curvature(alpha)?;
        if c.is_zero() {
            Ok(())
        } else {
            Err(LinftyError::NotMaurerCartan(c.render(&self.space)))
        }
    }

    /// Twists the structure by a Maurer-Cartan element. The underlying
    /// filtered space is unchanged.
    pub fn twist(&self, alpha: &Element) -> Result<LInftyAlgebra, LinftyError> {
        self.require_mc(alpha)?;
        let mut differential = self.differential.clone();
        for b in 0..self.space.dim() {
            let b_weight = self.space.weight(b);
            for k in 1..=self.arity_cap.saturating_sub(1) {
                let budget = (self.depth - 1).saturating_sub(b_weight);
                for (letters, coeff) in multiset_expansion(&self.space, alpha, k, budget) {
                    let mut word = letters;
                    word.push(b);
                    let img = self.eval_word(k + 1, &word).scale(&coeff);
                    for (tgt, c) in img.iter() {
                        differential.add_entry(tgt, b, c.clone())?;
                    }
                }
            }
        }
        let mut brackets: SymTable = BTreeMap::new();
        for m in 2..=self.arity_cap {
            let mut table = BTreeMap::new();
            for word in sorted_words(&self.space, m, self.depth - 1) {
                let word_weight: u32 = word.iter().map(|&i| self.space.weight(i)).sum();
                let mut value = self.eval_word(m, &word);
                for k in 1..=self.arity_cap.saturating_sub(m) {
                    let budget = (self.depth - 1).saturating_sub(word_weight);
                    for (letters, coeff) in multiset_expansion(&self.space, alpha, k, budget) {
                        let mut full = letters;
                        full.extend_from_slice(&word);
                        value = value.add(&self.eval_word(k + m, &full).scale(&coeff));
                    }
                }
                if !value.is_zero() {
                    table.insert(word, value);
                }
            }
            if !table.is_empty() {
                brackets.insert(m, table);
            }
        }
        LInftyAlgebra::new(self.space.clone(), differential, brackets, self.arity_cap, self.depth)
    }

    /// The quotient by the weight-n filtration stage, with the index
    /// embedding of the surviving basis into this algebra's basis. Stage 1
    /// is the zero algebra; stages above the depth are rejected.
    pub fn quotient(&self, n: u32) -> Result<(LInftyAlgebra, Vec<usize>), LinftyError> {
        if n < 1 || n > self.depth {
            return Err(LinftyError::StageOutOfRange(n));
        }
        let (sub, indices) = self.space.quotient_below(n);
        let position: BTreeMap<usize, usize> =
            indices.iter().enumerate().map(|(pos, &i)| (i, pos)).collect();
        let differential = self.differential.restrict(&sub, &indices, &sub, &indices);
        let mut brackets: SymTable = BTreeMap::new();
        for (&arity, table) in &self.brackets {
            let mut out = BTreeMap::new();
            for (word, value) in table {
                let Some(new_word) =
                    word.iter().map(|i| position.get(i).copied()).collect::<Option<Vec<_>>>()
                else {
                    continue;
                };
                let restricted = value.restrict_to(&indices);
                if !restricted.is_zero() {
                    out.insert(new_word, restricted);
                }
            }
            if !out.is_empty() {
                brackets.insert(arity, out);
            }
        }
        let q = LInftyAlgebra::new(sub, differential, brackets, self.arity_cap, n)?;
        Ok((q, indices))
    }

    /// The abelian subquotient spanned by weight exactly n-1, as an algebra,
    /// with the index embedding into the basis of `self.quotient(n)`.
    pub fn kernel_stage(&self, n: u32) -> Result<(LInftyAlgebra, Vec<usize>), LinftyError> {
        let (total, _) = self.quotient(n)?;
        let indices: Vec<usize> =
            (0..total.space.dim()).filter(|&i| total.space.weight(i) == n - 1).collect();
        let basis = indices.iter().map(|&i| total.space.basis()[i].clone()).collect();
        let sub = GradedSpace::from_elements(basis).expect("subbasis of a valid space");
        // The differential preserves weights and weight n-1 is the top stage
        // of the quotient, so restriction-projection is plain restriction.
        let differential = total.differential.restrict(&sub, &indices, &sub, &indices);
        let kernel = LInftyAlgebra::new(sub, differential, BTreeMap::new(), self.arity_cap, n)?;
        Ok((kernel, indices))
    }
}

fn has_odd_square(space: &GradedSpace, word: &[usize]) -> bool {
    word.windows(2).any(|p| p[0] == p[1] && space.degree(p[0]).rem_euclid(2) == 1)
}

/// Sorts basis letters, computing the Koszul sign of the permutation from
/// internal degrees. `None` when a repeated odd-degree letter forces zero.
pub(crate) fn sort_with_sign(space: &GradedSpace, letters: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = letters.to_vec();
    let mut negative = false;
    // Insertion sort, flipping the sign when two odd letters transpose.
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            if space.degree(v[j - 1]).rem_euclid(2) == 1 && space.degree(v[j]).rem_euclid(2) == 1 {
                negative = !negative;
            }
            v.swap(j - 1, j);
            j -= 1;
        }
    }
    if has_odd_square(space, &v) {
        return None;
    }
    Some((v, negative))
}

/// Koszul sign of extracting the letters at `subset` positions to the front
/// (both parts keeping their relative order). `true` means negative.
pub(crate) fn unshuffle_sign(degrees: &[i64], subset: &[usize]) -> bool {
    let mut negative = false;
    for &i in subset {
        if degrees[i].rem_euclid(2) == 0 {
            continue;
        }
        for (j, d) in degrees.iter().enumerate() {
            if j < i && !subset.contains(&j) && d.rem_euclid(2) == 1 {
                negative = !negative;
            }
        }
    }
    negative
}

/// Koszul sign of rearranging letters from original order into `perm` order
/// (`perm[i]` = original position appearing at output slot `i`).
pub(crate) fn koszul_perm_sign(degrees: &[i64], perm: &[usize]) -> bool {
    let mut negative = false;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j]
                && degrees[perm[i]].rem_euclid(2) == 1
                && degrees[perm[j]].rem_euclid(2) == 1
            {
                negative = !negative;
            }
        }
    }
    negative
}

/// All ascending k-subsets of `0..m`.
pub(crate) fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..m {
            if m - i < k - current.len() {
                break;
            }
            current.push(i);
            rec(i + 1, m, k, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// All set partitions of `0..m`, blocks ascending, ordered by least element.
pub(crate) fn set_partitions(m: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(next: usize, m: usize, current: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if next == m {
            out.push(current.clone());
            return;
        }
        for b in 0..current.len() {
            current[b].push(next);
            rec(next + 1, m, current, out);
            current[b].pop();
        }
        current.push(vec![next]);
        rec(next + 1, m, current, out);
        current.pop();
    }
    let mut out = Vec::new();
    rec(0, m, &mut Vec::new(), &mut out);
    out
}

/// Weakly increasing words of the given arity with total weight at most
/// `max_total_weight`, skipping words that vanish by an odd square.
pub(crate) fn sorted_words(
    space: &GradedSpace,
    arity: usize,
    max_total_weight: u32,
) -> Vec<Vec<usize>> {
    fn rec(
        space: &GradedSpace,
        start: usize,
        arity: usize,
        budget: u32,
        word: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if word.len() == arity {
            out.push(word.clone());
            return;
        }
        for i in start..space.dim() {
            let w = space.weight(i);
            let remaining = (arity - word.len() - 1) as u32;
            if w + remaining > budget {
                continue;
            }
            if word.last() == Some(&i) && space.degree(i).rem_euclid(2) == 1 {
                continue;
            }
            word.push(i);
            rec(space, i, arity, budget - w, word, out);
            word.pop();
        }
    }
    let mut out = Vec::new();
    rec(space, 0, arity, max_total_weight, &mut Vec::with_capacity(arity), &mut out);
    out
}

/// Expands `(1/m!) {alpha^m}` for a degree-0 element into weighted words:
/// multisets over the support with coefficient `prod c_i^{mu_i} / mu_i!`.
/// Multisets of total weight above `max_weight` are pruned.
pub(crate) fn multiset_expansion(
    space: &GradedSpace,
    alpha: &Element,
    m: usize,
    max_weight: u32,
) -> Vec<(Vec<usize>, Rat)> {
    fn rec(
        space: &GradedSpace,
        support: &[(usize, Rat)],
        pos: usize,
        remaining: usize,
        budget: u32,
        letters: &mut Vec<usize>,
        coeff: Rat,
        out: &mut Vec<(Vec<usize>, Rat)>,
    ) {
        if remaining == 0 {
            out.push((letters.clone(), coeff));
            return;
        }
        if pos == support.len() {
            return;
        }
        let (idx, c) = &support[pos];
        let w = space.weight(*idx);
        let mut power = Rat::from_integer(1.into());
        for mu in 0..=remaining {
            if (mu as u32) * w > budget {
                break;
            }
            let sub_coeff = &coeff * &power * inv_factorial(mu as u64);
            let before = letters.len();
            for _ in 0..mu {
                letters.push(*idx);
            }
            rec(
                space,
                support,
                pos + 1,
                remaining - mu,
                budget - (mu as u32) * w,
                letters,
                sub_coeff,
                out,
            );
            letters.truncate(before);
            power *= c;
        }
    }
    let support: Vec<(usize, Rat)> = alpha.iter().map(|(i, c)| (i, c.clone())).collect();
    let mut out = Vec::new();
    rec(
        space,
        &support,
        0,
        m,
        max_weight,
        &mut Vec::new(),
        Rat::from_integer(1.into()),
        &mut out,
    );
    out.retain(|(_, c)| !c.is_zero());
    out
}

/// Multilinear expansion of a symmetric basis-word operator over element
/// arguments. No signs appear here: reordering is handled by the operator.
pub(crate) fn expand_multilinear(
    args: &[Element],
    f: &mut impl FnMut(&[usize]) -> Element,
) -> Element {
    fn rec(
        supports: &[Vec<(usize, Rat)>],
        pos: usize,
        letters: &mut Vec<usize>,
        coeff: Rat,
        f: &mut impl FnMut(&[usize]) -> Element,
        acc: &mut Element,
    ) {
        if pos == supports.len() {
            let v = f(letters);
            *acc = acc.add(&v.scale(&coeff));
            return;
        }
        for (idx, c) in &supports[pos] {
            letters[pos] = *idx;
            rec(supports, pos + 1, letters, &coeff * c, f, acc);
        }
    }
    let supports: Vec<Vec<(usize, Rat)>> =
        args.iter().map(|a| a.iter().map(|(i, c)| (i, c.clone())).collect()).collect();
    let mut acc = Element::zero();
    let mut letters = vec![0usize; args.len()];
    rec(&supports, 0, &mut letters, Rat::from_integer(1.into()), f, &mut acc);
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::rat::{frac, rat};

    #[test]
    fn abelian_passes() {
        let l = corpus::abelian5();
        assert_eq!(l.check_linfty(), Ok(()));
        assert!(l.check_weight_additivity().is_ok());
    }

    #[test]
    fn dg_lie_passes() {
        let l = corpus::dg_lie2();
        assert_eq!(l.check_linfty(), Ok(()));
    }

    #[test]
    fn corrupted_bracket_is_caught_with_named_word() {
        // filtered4 with {x,q} doubled: the Jacobi identity on (z,x,x)
        // becomes p/2 + p/2 - p + p = p instead of zero.
        let good = corpus::filtered4();
        let mut brackets = good.brackets().clone();
        let x = good.space().index_of("x").unwrap();
        let q = good.space().index_of("q").unwrap();
        let p = good.space().index_of("p").unwrap();
        brackets.get_mut(&2).unwrap().insert(vec![x, q], Element::single(p, rat(1)));
        let bad = LInftyAlgebra::new(
            good.space().clone(),
            good.differential().clone(),
            brackets,
            good.arity_cap(),
            good.depth(),
        )
        .unwrap();
        let violation = bad.check_linfty().unwrap_err();
        assert_eq!(violation.arity, 3);
        assert_eq!(violation.word, vec!["z", "x", "x"]);
        assert_eq!(violation.residual, "1*p");
    }

    #[test]
    fn curvature_examples() {
        let l = corpus::dg_lie2();
        assert!(l.curvature(&Element::zero()).unwrap().is_zero());
        // curv(c x) = (c^2/2) y.
        let x = l.space().index_of("x").unwrap();
        let y = l.space().index_of("y").unwrap();
        let alpha = Element::single(x, rat(3));
        assert_eq!(l.curvature(&alpha).unwrap(), Element::single(y, frac(9, 2)));
        assert!(!l.is_mc(&alpha).unwrap());
        assert!(l.is_mc(&Element::zero()).unwrap());

        // Abelian with differential: curv is linear.
        let ab = corpus::abelian5();
        let a1 = ab.space().index_of("a1").unwrap();
        let b = ab.space().index_of("b").unwrap();
        assert_eq!(ab.curvature(&Element::single(a1, rat(2))).unwrap(), Element::single(b, rat(2)));
        // Degree check.
        assert!(ab.curvature(&Element::single(b, rat(1))).is_err());
    }

    #[test]
    fn twist_by_zero_is_identity() {
        let l = corpus::filtered4();
        let t = l.twist(&Element::zero()).unwrap();
        assert_eq!(t, l);
    }

    #[test]
    fn twist_of_abelian_unchanged() {
        let l = corpus::abelian5();
        let a2 = l.space().index_of("a2").unwrap();
        let c = l.space().index_of("c").unwrap();
        let alpha = Element::from_coeffs([(a2, rat(2)), (c, rat(-1))]);
        assert!(l.is_mc(&alpha).unwrap());
        assert_eq!(l.twist(&alpha).unwrap(), l);
    }

    #[test]
    fn twist_differential_hand_oracle() {
        // In filtered4, alpha = 2q is MC and the twisted differential sends
        // z to {alpha, z} = 2{z,q} = 2w.
        let l = corpus::filtered4();
        let q = l.space().index_of("q").unwrap();
        let z = l.space().index_of("z").unwrap();
        let w = l.space().index_of("w").unwrap();
        let alpha = Element::single(q, rat(2));
        assert!(l.is_mc(&alpha).unwrap());
        let t = l.twist(&alpha).unwrap();
        assert_eq!(t.differential().apply(&l.space().unit(z)), Element::single(w, rat(2)));
        assert_eq!(t.check_linfty(), Ok(()));
        // Twisting by a non-MC element is rejected.
        let x = l.space().index_of("x").unwrap();
        assert!(l.twist(&Element::single(x, rat(1))).is_err());
    }

    #[test]
    fn twist_composition_law() {
        // twist(twist(L, a), b) = twist(L, a + b) when both sides make sense.
        let l = corpus::filtered4();
        let q = l.space().index_of("q").unwrap();
        let w = l.space().index_of("w").unwrap();
        let a = Element::single(q, rat(1));
        let b = Element::from_coeffs([(q, rat(-2)), (w, rat(3))]);
        assert!(l.is_mc(&a).unwrap());
        let la = l.twist(&a).unwrap();
        assert!(la.is_mc(&b).unwrap());
        assert!(l.is_mc(&a.add(&b)).unwrap());
        assert_eq!(la.twist(&b).unwrap(), l.twist(&a.add(&b)).unwrap());
    }

    #[test]
    fn quotient_examples() {
        let l = corpus::dg_lie2();
        // n = depth gives the algebra back.
        let (full, _) = l.quotient(l.depth()).unwrap();
        assert_eq!(full, l);
        // n = 2 keeps only x, with no brackets.
        let (q2, _) = l.quotient(2).unwrap();
        assert_eq!(q2.space().dim(), 1);
        assert_eq!(q2.space().name(0), "x");
        assert!(q2.is_abelian());
        // Kernel at n = 3 is spanned by y and abelian.
        let (k3, _) = l.kernel_stage(3).unwrap();
        assert_eq!(k3.space().dim(), 1);
        assert_eq!(k3.space().name(0), "y");
        assert!(k3.is_abelian());
        // Stage 1 is the zero algebra; out-of-range stages are rejected.
        assert_eq!(l.quotient(1).unwrap().0.space().dim(), 0);
        assert!(l.quotient(0).is_err());
        assert!(l.quotient(l.depth() + 1).is_err());
    }

    #[test]
    fn sign_helpers() {
        let space = GradedSpace::new(vec![("a", 1, 1), ("b", 1, 1), ("c", 0, 1)]).unwrap();
        // Swapping two odd letters is negative.
        let (sorted, neg) = sort_with_sign(&space, &[1, 0]).unwrap();
        assert_eq!(sorted, vec![0, 1]);
        assert!(neg);
        // Odd square vanishes.
        assert!(sort_with_sign(&space, &[0, 0]).is_none());
        // Even letters move freely.
        let (_, neg) = sort_with_sign(&space, &[2, 0]).unwrap();
        assert!(!neg);
        // Unshuffle sign: extracting position 1 (odd) past position 0 (odd).
        assert!(unshuffle_sign(&[1, 1], &[1]));
        assert!(!unshuffle_sign(&[1, 1], &[0]));
        assert_eq!(set_partitions(3).len(), 5);
        assert_eq!(subsets(4, 2).len(), 6);
    }

    #[test]
    fn corpus_is_valid() {
        for (name, l) in corpus::all_algebras() {
            assert_eq!(l.check_linfty(), Ok(()), "{name} fails Jacobi");
            assert!(l.check_weight_additivity().is_ok(), "{name} fails additivity");
        }
    }
}
