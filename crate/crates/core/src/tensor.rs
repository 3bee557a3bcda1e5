//! Elements of an algebra tensored with polynomial forms on a simplex.
//!
//! A tensor element assigns a form coefficient to each basis element. The
//! differential is `d ⊗ 1 + 1 ⊗ d_form` with the usual Koszul sign; the
//! brackets move form legs out to the right, picking up a sign for every
//! form passing a basis letter:
//! `{b1 ⊗ w1, ..., bm ⊗ wm} = ± {b1,...,bm} ⊗ w1...wm`.

use std::collections::BTreeMap;

use crate::algebra::LInftyAlgebra;
use crate::forms::PolyForm;
use crate::graded::{Element, GradedMap, GradedSpace};
use crate::rat::{inv_factorial, rat, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorElement {
    n: usize,
    coeffs: BTreeMap<usize, PolyForm>,
}

impl TensorElement {
    pub fn zero(n: usize) -> Self {
        TensorElement { n, coeffs: BTreeMap::new() }
    }

    pub fn simplex_dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> PolyForm {
        self.coeffs.get(&i).cloned().unwrap_or_else(|| PolyForm::zero(self.n))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &PolyForm)> {
        self.coeffs.iter().map(|(&i, f)| (i, f))
    }

    pub fn support(&self) -> Vec<usize> {
        self.coeffs.keys().copied().collect()
    }

    pub fn add_term(&mut self, i: usize, form: PolyForm) {
        assert_eq!(form.simplex_dim(), self.n, "form dimension mismatch");
        if form.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(i).or_insert_with(|| PolyForm::zero(self.n));
        *entry = entry.add(&form);
        if entry.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (i, f) in other.iter() {
            out.add_term(i, f.clone());
        }
        out
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &Rat) -> TensorElement {
        let mut out = TensorElement::zero(self.n);
        for (i, f) in self.iter() {
            out.add_term(i, f.scale(c));
        }
        out
    }

    /// Wedges every coefficient with `form` on the right.
    pub fn wedge_right(&self, form: &PolyForm) -> TensorElement {
        let mut out = TensorElement::zero(self.n);
        for (i, f) in self.iter() {
            out.add_term(i, f.wedge(form));
        }
        out
    }

    /// A constant tensor element from a plain element.
    pub fn from_element(e: &Element, n: usize) -> TensorElement {
        let mut out = TensorElement::zero(n);
        for (i, c) in e.iter() {
            out.add_term(i, PolyForm::constant(n, c.clone()));
        }
        out
    }

    /// Splits into homogeneous letters `(basis, form, form-degree)`.
    pub fn homogeneous_terms(&self) -> Vec<(usize, PolyForm, usize)> {
        let mut out = Vec::new();
        for (i, f) in self.iter() {
            for p in 0..=self.n {
                let part = f.homogeneous_part(p);
                if !part.is_zero() {
                    out.push((i, part, p));
                }
            }
        }
        out
    }

    /// True when every term satisfies `deg(basis) + form degree = total`.
    pub fn is_homogeneous(&self, space: &GradedSpace, total: i64) -> bool {
        self.homogeneous_terms()
            .iter()
            .all(|(i, _, p)| space.degree(*i) + *p as i64 == total)
    }

    /// Applies a degree-0 linear map to the basis legs.
    pub fn map_legs(&self, map: &GradedMap) -> TensorElement {
        assert_eq!(map.degree(), 0, "legwise application needs a degree-0 map");
        let mut out = TensorElement::zero(self.n);
        for (i, f) in self.iter() {
            for (tgt, c) in map.column(i).iter() {
                out.add_term(tgt, f.scale(c));
            }
        }
        out
    }

    /// Re-indexes the basis legs by name between two spaces, dropping legs
    /// whose name is missing in the target (quotient transport).
    pub fn transport(&self, from: &GradedSpace, to: &GradedSpace) -> TensorElement {
        let mut out = TensorElement::zero(self.n);
        for (i, f) in self.iter() {
            if let Some(j) = to.index_of(from.name(i)) {
                out.add_term(j, f.clone());
            }
        }
        out
    }

    /// Face operator on the form legs.
    pub fn face(&self, i: usize) -> TensorElement {
        let mut out = TensorElement::zero(self.n - 1);
        for (b, f) in self.iter() {
            out.add_term(b, f.face(i));
        }
        out
    }

    /// Degeneracy operator on the form legs.
    pub fn degeneracy(&self, j: usize) -> TensorElement {
        let mut out = TensorElement::zero(self.n + 1);
        for (b, f) in self.iter() {
            out.add_term(b, f.degeneracy(j));
        }
        out
    }

    /// Evaluation of the 0-form parts at a vertex.
    pub fn eval_vertex(&self, v: usize) -> Element {
        let mut out = Element::zero();
        for (b, f) in self.iter() {
            out.add_coeff(b, f.eval_vertex(v));
        }
        out
    }

    /// The degenerate extension of a vertex value to dimension n.
    pub fn constant_simplex(e: &Element, n: usize) -> TensorElement {
        TensorElement::from_element(e, n)
    }

    /// The homotopy `H(b ⊗ w) = (-1)^{deg b} b ⊗ h_v(w)` with `h_v` the
    /// dilation contraction toward vertex `v`. Satisfies
    /// `D H + H D = id - ev_v` against [`differential`].
    pub fn homotopy(&self, space: &GradedSpace, v: usize) -> TensorElement {
        let mut out = TensorElement::zero(self.n);
        for (b, f) in self.iter() {
            let mut h = f.dilation_homotopy(v);
            if space.degree(b).rem_euclid(2) == 1 {
                h = h.scale(&rat(-1));
            }
            out.add_term(b, h);
        }
        out
    }

    pub fn render(&self, space: &GradedSpace) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.iter()
            .map(|(i, f)| format!("{} (x) ({})", space.name(i), f.render()))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// The tensor differential `d ⊗ 1 + 1 ⊗ d_form`.
pub fn differential(alg: &LInftyAlgebra, te: &TensorElement) -> TensorElement {
    let mut out = TensorElement::zero(te.simplex_dim());
    for (b, f) in te.iter() {
        for (tgt, c) in alg.differential().apply(&alg.space().unit(b)).iter() {
            out.add_term(tgt, f.scale(c));
        }
        let mut df = f.d();
        if alg.space().degree(b).rem_euclid(2) == 1 {
            df = df.scale(&rat(-1));
        }
        out.add_term(b, df);
    }
    out
}

/// Evaluates a flat symmetric operator on tensor letters: form legs move out
/// to the right with Koszul signs, then the flat operator acts on the basis
/// letters.
pub fn eval_flat_on_letters(
    space: &GradedSpace,
    flat: &impl Fn(usize, &[usize]) -> Element,
    arity: usize,
    letters: &[(usize, &PolyForm, usize)],
    n: usize,
) -> TensorElement {
    assert_eq!(letters.len(), arity);
    let mut negative = false;
    for i in 0..arity {
        for j in (i + 1)..arity {
            if letters[i].2 % 2 == 1 && space.degree(letters[j].0).rem_euclid(2) == 1 {
                negative = !negative;
            }
        }
    }
    let basis_letters: Vec<usize> = letters.iter().map(|l| l.0).collect();
    let value = flat(arity, &basis_letters);
    if value.is_zero() {
        return TensorElement::zero(n);
    }
    let mut wedge = PolyForm::one(n);
    for l in letters {
        wedge = wedge.wedge(l.1);
        if wedge.is_zero() {
            return TensorElement::zero(n);
        }
    }
    if negative {
        wedge = wedge.scale(&rat(-1));
    }
    let mut out = TensorElement::zero(n);
    for (b, c) in value.iter() {
        out.add_term(b, wedge.scale(c));
    }
    out
}

/// Multilinear expansion of a flat symmetric operator over tensor-element
/// arguments.
pub fn eval_flat_on_elements(
    space: &GradedSpace,
    flat: &impl Fn(usize, &[usize]) -> Element,
    arity: usize,
    args: &[&TensorElement],
    n: usize,
) -> TensorElement {
    assert_eq!(args.len(), arity);
    let term_lists: Vec<Vec<(usize, PolyForm, usize)>> =
        args.iter().map(|a| a.homogeneous_terms()).collect();
    let mut acc = TensorElement::zero(n);
    if term_lists.iter().any(Vec::is_empty) {
        return acc;
    }
    let mut choice: Vec<usize> = vec![0; arity];
    loop {
        let letters: Vec<(usize, &PolyForm, usize)> = choice
            .iter()
            .enumerate()
            .map(|(slot, &t)| {
                let (b, f, p) = &term_lists[slot][t];
                (*b, f, *p)
            })
            .collect();
        acc = acc.add(&eval_flat_on_letters(space, flat, arity, &letters, n));
        // Advance the mixed-radix counter.
        let mut slot = 0;
        loop {
            if slot == arity {
                return acc;
            }
            choice[slot] += 1;
            if choice[slot] < term_lists[slot].len() {
                break;
            }
            choice[slot] = 0;
            slot += 1;
        }
    }
}

/// The curvature of a degree-0 tensor element:
/// `D a + sum_m (1/m!) {a,...,a}_m`, expanded over multisets of the terms of
/// `a` (all of even total degree).
pub fn curvature(alg: &LInftyAlgebra, te: &TensorElement) -> TensorElement {
    let n = te.simplex_dim();
    let mut out = differential(alg, te);
    let terms = te.homogeneous_terms();
    for m in 2..=alg.arity_cap() {
        for (multiset, coeff) in term_multisets(alg.space(), &terms, m, alg.depth() - 1) {
            let letters: Vec<(usize, &PolyForm, usize)> =
                multiset.iter().map(|&t| (terms[t].0, &terms[t].1, terms[t].2)).collect();
            let v = eval_flat_on_letters(
                alg.space(),
                &|arity, basis| alg.eval_word(arity, basis),
                m,
                &letters,
                n,
            );
        out = out.add(&v.scale(&coeff));
        }
    }
    out
}

pub fn is_mc(alg: &LInftyAlgebra, te: &TensorElement) -> bool {
    te.is_homogeneous(alg.space(), 0) && curvature(alg, te).is_zero()
}

/// Multisets of term indices of size m with `1/prod(mu!)` coefficients,
/// pruned by total weight against `budget`.
pub(crate) fn term_multisets(
    space: &GradedSpace,
    terms: &[(usize, PolyForm, usize)],
    m: usize,
    budget: u32,
) -> Vec<(Vec<usize>, Rat)> {
    fn rec(
        weights: &[u32],
        pos: usize,
        remaining: usize,
        budget: u32,
        picked: &mut Vec<usize>,
        coeff: Rat,
        out: &mut Vec<(Vec<usize>, Rat)>,
    ) {
        if remaining == 0 {
            out.push((picked.clone(), coeff));
            return;
        }
        if pos == weights.len() {
            return;
        }
        for mu in 0..=remaining {
            if (mu as u32) * weights[pos] > budget {
                break;
            }
            let sub = &coeff * inv_factorial(mu as u64);
            let before = picked.len();
            for _ in 0..mu {
                picked.push(pos);
            }
            rec(weights, pos + 1, remaining - mu, budget - (mu as u32) * weights[pos], picked, sub, out);
            picked.truncate(before);
        }
    }
    let weights: Vec<u32> = terms.iter().map(|t| space.weight(t.0)).collect();
    let mut out = Vec::new();
    rec(&weights, 0, m, budget, &mut Vec::new(), Rat::from_integer(1.into()), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::rat::frac;

    fn t(n: usize, i: usize) -> PolyForm {
        PolyForm::coordinate(n, i)
    }
    fn dt(n: usize, i: usize) -> PolyForm {
        PolyForm::differential_coordinate(n, i)
    }

    #[test]
    fn tensor_differential_leibniz_sign() {
        // On an abelian algebra, D(x ⊗ t1) = dx ⊗ t1 + (-1)^{deg x} x ⊗ dt1.
        let ab = corpus::abelian5();
        let h = ab.space().index_of("h").unwrap(); // degree -1 (odd)
        let a1 = ab.space().index_of("a1").unwrap(); // degree 0
        let a2 = ab.space().index_of("a2").unwrap();
        let b = ab.space().index_of("b").unwrap();

        let mut te = TensorElement::zero(1);
        te.add_term(h, t(1, 1));
        let d = differential(&ab, &te);
        // dh = a2, and the form leg picks up the odd sign of h.
        let mut expect = TensorElement::zero(1);
        expect.add_term(a2, t(1, 1));
        expect.add_term(h, dt(1, 1).scale(&rat(-1)));
        assert_eq!(d, expect);

        let mut te = TensorElement::zero(1);
        te.add_term(a1, t(1, 1));
        let d = differential(&ab, &te);
        let mut expect = TensorElement::zero(1);
        expect.add_term(b, t(1, 1));
        expect.add_term(a1, dt(1, 1));
        assert_eq!(d, expect);

        // D^2 = 0.
        assert!(differential(&ab, &d).is_zero());
    }

    #[test]
    fn tensor_differential_squares_to_zero_everywhere() {
        for (name, l) in corpus::all_algebras() {
            for b in 0..l.space().dim() {
                for form in [t(2, 1), dt(2, 2), t(2, 2).wedge(&dt(2, 1))] {
                    let mut te = TensorElement::zero(2);
                    te.add_term(b, form);
                    let dd = differential(&l, &differential(&l, &te));
                    assert!(dd.is_zero(), "{name} basis {b}");
                }
            }
        }
    }

    #[test]
    fn bracket_moves_forms_with_signs() {
        // In dg_lie2: {x ⊗ dt1, x ⊗ 1} = {x,x} ⊗ dt1 = y ⊗ dt1 with no sign
        // (x is even); swapping the arguments flips nothing since the other
        // form leg is a 0-form times an even letter.
        let l = corpus::dg_lie2();
        let x = l.space().index_of("x").unwrap();
        let y = l.space().index_of("y").unwrap();
        let mut u = TensorElement::zero(1);
        u.add_term(x, dt(1, 1));
        let mut v = TensorElement::zero(1);
        v.add_term(x, PolyForm::one(1));
        let flat = |arity: usize, letters: &[usize]| l.eval_word(arity, letters);
        let uv = eval_flat_on_elements(l.space(), &flat, 2, &[&u, &v], 1);
        let mut expect = TensorElement::zero(1);
        expect.add_term(y, dt(1, 1));
        assert_eq!(uv, expect);
        let vu = eval_flat_on_elements(l.space(), &flat, 2, &[&v, &u], 1);
        assert_eq!(vu, expect);
    }

    #[test]
    fn tensor_bracket_is_symmetric_with_total_degree_signs() {
        // {u, v} = (-1)^{|u||v|} {v, u} on homogeneous tensor letters, for
        // letters of total degree 1 built from odd basis and 0-forms or even
        // basis and 1-forms.
        let l = corpus::filtered4();
        let z = l.space().index_of("z").unwrap(); // degree -1
        let x = l.space().index_of("x").unwrap(); // degree 0
        let flat = |arity: usize, letters: &[usize]| l.eval_word(arity, letters);
        // u = z ⊗ 1 (total degree -1, odd), v = x ⊗ dt1 (total degree 1, odd).
        let mut u = TensorElement::zero(1);
        u.add_term(z, PolyForm::one(1));
        let mut v = TensorElement::zero(1);
        v.add_term(x, dt(1, 1));
        let uv = eval_flat_on_elements(l.space(), &flat, 2, &[&u, &v], 1);
        let vu = eval_flat_on_elements(l.space(), &flat, 2, &[&v, &u], 1);
        assert_eq!(uv, vu.scale(&rat(-1)), "odd-odd letters must anticommute");
        assert!(!uv.is_zero());
    }

    #[test]
    fn curvature_of_constant_matches_flat_curvature() {
        let l = corpus::filtered4();
        let x = l.space().index_of("x").unwrap();
        let alpha = Element::single(x, frac(3, 2));
        let te = TensorElement::from_element(&alpha, 2);
        let curv_t = curvature(&l, &te);
        let curv_flat = l.curvature(&alpha).unwrap();
        assert_eq!(curv_t, TensorElement::from_element(&curv_flat, 2));
    }

    #[test]
    fn homotopy_contract_against_tensor_differential() {
        // D H + H D = id - ev_v on random-ish tensor elements.
        let l = corpus::filtered4();
        let space = l.space().clone();
        for v in 0..=1usize {
            for b in 0..space.dim() {
                for form in [t(1, 1), dt(1, 1), t(1, 1).wedge(&dt(1, 1)), PolyForm::one(1)] {
                    let mut te = TensorElement::zero(1);
                    te.add_term(b, form);
                    let lhs = differential(&l, &te.homotopy(&space, v))
                        .add(&differential(&l, &te).homotopy(&space, v));
                    let ev = TensorElement::from_element(&te.eval_vertex(v), 1);
                    let rhs = te.sub(&ev);
                    assert_eq!(lhs, rhs, "basis {b} vertex {v}");
                }
            }
        }
    }

    #[test]
    fn vertex_evaluation_and_transport() {
        let l = corpus::dg_lie2();
        let x = l.space().index_of("x").unwrap();
        let mut te = TensorElement::zero(1);
        te.add_term(x, t(1, 1).scale(&rat(2)));
        assert_eq!(te.eval_vertex(0), Element::zero());
        assert_eq!(te.eval_vertex(1), Element::single(x, rat(2)));
        // Transport into the weight-1 quotient keeps x, drops y.
        let (q, _) = l.quotient(2).unwrap();
        let y = l.space().index_of("y").unwrap();
        let mut te2 = te.clone();
        te2.add_term(y, dt(1, 1));
        let moved = te2.transport(l.space(), q.space());
        assert_eq!(moved.support(), vec![q.space().index_of("x").unwrap()]);
    }
}
