//! Bundled example algebras, morphisms and problem instances.
//!
//! These are the fixtures exercised by the test suites and shipped with the
//! CLI. Everything here is hand-checked: the constructors panic on
//! structural errors, and the validity tests assert the Jacobi identities
//! and weight additivity for each entry.

use std::collections::BTreeMap;

use crate::algebra::{LInftyAlgebra, SymTable};
use crate::graded::{ChainComplex, Element, GradedMap, GradedSpace};
use crate::morphism::InftyMorphism;
use crate::rat::{frac, rat};

fn insert_bracket(table: &mut SymTable, word: Vec<usize>, value: Element) {
    table.entry(word.len()).or_default().insert(word, value);
}

/// Abelian algebra with differential: h (deg -1), a1, a2, c (deg 0), b
/// (deg 1), with dh = a2 and d a1 = b. H^0 is spanned by [c].
pub fn abelian5() -> LInftyAlgebra {
    let space = GradedSpace::new(vec![
        ("h", -1, 1),
        ("a1", 0, 1),
        ("a2", 0, 1),
        ("c", 0, 1),
        ("b", 1, 1),
    ])
    .unwrap();
    let mut d = GradedMap::zero(space.clone(), space.clone(), 1);
    d.add_entry(2, 0, rat(1)).unwrap(); // dh = a2
    d.add_entry(4, 1, rat(1)).unwrap(); // da1 = b
    LInftyAlgebra::abelian(space, d, 2).unwrap()
}

/// Two-term shifted dg Lie algebra: x (deg 0, wt 1), y (deg 1, wt 2),
/// {x,x} = y, zero differential, depth 3. Its only MC element is 0.
pub fn dg_lie2() -> LInftyAlgebra {
    let space = GradedSpace::new(vec![("x", 0, 1), ("y", 1, 2)]).unwrap();
    let d = GradedMap::zero(space.clone(), space.clone(), 1);
    let mut brackets = SymTable::new();
    insert_bracket(&mut brackets, vec![0, 0], Element::single(1, rat(1)));
    LInftyAlgebra::new(space, d, brackets, 2, 3).unwrap()
}

/// Three-term structure with a nonzero arity-3 bracket:
/// {e1,e2} = m and {e1,e1,e2} = f.
pub fn linf3() -> LInftyAlgebra {
    let space =
        GradedSpace::new(vec![("e1", 0, 1), ("e2", 0, 1), ("m", 1, 2), ("f", 1, 3)]).unwrap();
    let d = GradedMap::zero(space.clone(), space.clone(), 1);
    let mut brackets = SymTable::new();
    insert_bracket(&mut brackets, vec![0, 1], Element::single(2, rat(1)));
    insert_bracket(&mut brackets, vec![0, 0, 1], Element::single(3, rat(1)));
    LInftyAlgebra::new(space, d, brackets, 3, 4).unwrap()
}

/// Filtered dg Lie algebra of depth 4 on z (deg -1), x, q, w (deg 0),
/// y, p (deg 1): {x,x} = y, {z,x} = q, {z,y} = p, {x,q} = p/2, {z,q} = w.
pub fn filtered4() -> LInftyAlgebra {
    let space = GradedSpace::new(vec![
        ("z", -1, 1),
        ("x", 0, 1),
        ("q", 0, 2),
        ("y", 1, 2),
        ("p", 1, 3),
        ("w", 0, 3),
    ])
    .unwrap();
    let d = GradedMap::zero(space.clone(), space.clone(), 1);
    let mut brackets = SymTable::new();
    insert_bracket(&mut brackets, vec![1, 1], Element::single(3, rat(1)));
    insert_bracket(&mut brackets, vec![0, 1], Element::single(2, rat(1)));
    insert_bracket(&mut brackets, vec![0, 3], Element::single(4, rat(1)));
    insert_bracket(&mut brackets, vec![1, 2], Element::single(4, frac(1, 2)));
    insert_bracket(&mut brackets, vec![0, 2], Element::single(5, rat(1)));
    LInftyAlgebra::new(space, d, brackets, 2, 4).unwrap()
}

/// A dg Lie algebra with gauge-equivalent Maurer-Cartan elements:
/// g (deg -1), x (deg 0) in weight 1, s (deg 0), y (deg 1) in weight 2,
/// with dg = x, ds = y, {g,x} = -s, {x,x} = y. The MC set is the family
/// `a x - (a^2/2) s`, all gauge equivalent to 0.
pub fn gauge4() -> LInftyAlgebra {
    let space =
        GradedSpace::new(vec![("g", -1, 1), ("x", 0, 1), ("s", 0, 2), ("y", 1, 2)]).unwrap();
    let mut d = GradedMap::zero(space.clone(), space.clone(), 1);
    d.add_entry(1, 0, rat(1)).unwrap(); // dg = x
    d.add_entry(3, 2, rat(1)).unwrap(); // ds = y
    let mut brackets = SymTable::new();
    insert_bracket(&mut brackets, vec![0, 1], Element::single(2, rat(-1)));
    insert_bracket(&mut brackets, vec![1, 1], Element::single(3, rat(1)));
    LInftyAlgebra::new(space, d, brackets, 2, 4).unwrap()
}

/// The gauge-equivalent vertex family of [`gauge4`]: `a x - (a^2/2) s`.
pub fn gauge4_vertex(a: i64) -> Element {
    Element::from_coeffs([(1, rat(a)), (2, frac(-a * a, 2))])
}

/// The homotopy-transfer target: a five-dimensional shifted dg Lie algebra
/// with d u1 = d u2 = v and {x,x} = y + v. Its cohomology is spanned by
/// [x], [u1 - u2] in degree 0 and [y] in degree 1.
pub fn htt_b() -> LInftyAlgebra {
    let space = GradedSpace::new(vec![
        ("x", 0, 1),
        ("u1", 0, 2),
        ("u2", 0, 2),
        ("y", 1, 2),
        ("v", 1, 2),
    ])
    .unwrap();
    let mut d = GradedMap::zero(space.clone(), space.clone(), 1);
    d.add_entry(4, 1, rat(1)).unwrap();
    d.add_entry(4, 2, rat(1)).unwrap();
    let mut brackets = SymTable::new();
    insert_bracket(
        &mut brackets,
        vec![0, 0],
        Element::from_coeffs([(3, rat(1)), (4, rat(1))]),
    );
    LInftyAlgebra::new(space, d, brackets, 2, 3).unwrap()
}

/// The cohomology of [`htt_b`] as a complex with zero differential:
/// xb, wb in degree 0 and yb in degree 1.
pub fn htt_a_complex() -> ChainComplex {
    let space = GradedSpace::new(vec![("xb", 0, 1), ("wb", 0, 1), ("yb", 1, 1)]).unwrap();
    let d = GradedMap::zero(space.clone(), space.clone(), 1);
    ChainComplex::new(space, d).unwrap()
}

/// The same space as an abelian algebra (for the corpus sweeps).
pub fn htt_a_abelian() -> LInftyAlgebra {
    let c = htt_a_complex();
    LInftyAlgebra::abelian(c.space().clone(), c.differential().clone(), 2).unwrap()
}

/// The cocycle section xb -> x, wb -> u1 - u2, yb -> y; a quasi-isomorphism
/// of complexes onto [`htt_b`].
pub fn htt_phi() -> GradedMap {
    let a = htt_a_complex();
    let b = htt_b();
    let mut phi = GradedMap::zero(a.space().clone(), b.space().clone(), 0);
    phi.add_entry(0, 0, rat(1)).unwrap(); // xb -> x
    phi.add_entry(1, 1, rat(1)).unwrap(); // wb -> u1
    phi.add_entry(2, 1, rat(-1)).unwrap(); // wb -> -u2
    phi.add_entry(3, 2, rat(1)).unwrap(); // yb -> y
    phi
}

/// A chain map that misses cohomology: the one-dimensional complex on xb
/// mapping onto x. Not a quasi-isomorphism; transfer against it obstructs
/// at arity 2.
pub fn htt_broken() -> (ChainComplex, GradedMap) {
    let space = GradedSpace::new(vec![("xb", 0, 1)]).unwrap();
    let d = GradedMap::zero(space.clone(), space.clone(), 1);
    let a = ChainComplex::new(space.clone(), d).unwrap();
    let b = htt_b();
    let mut phi = GradedMap::zero(space, b.space().clone(), 0);
    phi.add_entry(0, 0, rat(1)).unwrap();
    (a, phi)
}

/// The transferred structure on the cohomology of [`htt_b`]: the induced
/// bracket {xb,xb} = yb (weights adjusted so the bracket is filtered).
pub fn htt_transferred_source() -> LInftyAlgebra {
    let space = GradedSpace::new(vec![("xb", 0, 1), ("wb", 0, 1), ("yb", 1, 2)]).unwrap();
    let d = GradedMap::zero(space.clone(), space.clone(), 1);
    let mut brackets = SymTable::new();
    insert_bracket(&mut brackets, vec![0, 0], Element::single(2, rat(1)));
    LInftyAlgebra::new(space, d, brackets, 2, 3).unwrap()
}

/// A hand-computed solution of the transfer problem for [`htt_b`], bundled
/// as an honest infinity-morphism: linear term [`htt_phi`]-like and
/// f2(xb,xb) = -u1.
pub fn htt_infinity_morphism() -> InftyMorphism {
    let source = htt_transferred_source();
    let target = htt_b();
    let mut components: SymTable = BTreeMap::new();
    let mut arity1 = BTreeMap::new();
    arity1.insert(vec![0], Element::single(0, rat(1)));
    arity1.insert(vec![1], Element::from_coeffs([(1, rat(1)), (2, rat(-1))]));
    arity1.insert(vec![2], Element::single(3, rat(1)));
    components.insert(1, arity1);
    let mut arity2 = BTreeMap::new();
    arity2.insert(vec![0, 0], Element::single(1, rat(-1)));
    components.insert(2, arity2);
    InftyMorphism::new(source, target, components).unwrap()
}

/// The bundled fibration: the strict projection of the dg Lie algebra
/// [`filtered4`] onto its weight-1 abelianization.
pub fn fibration() -> InftyMorphism {
    let l = filtered4();
    let (ab, indices) = l.quotient(2).unwrap();
    let mut proj = GradedMap::zero(l.space().clone(), ab.space().clone(), 0);
    for (pos, &i) in indices.iter().enumerate() {
        proj.add_entry(pos, i, rat(1)).unwrap();
    }
    InftyMorphism::strict(l, ab, &proj).unwrap()
}

/// Everything [`LInftyAlgebra`]-shaped in the corpus, by name.
pub fn all_algebras() -> Vec<(&'static str, LInftyAlgebra)> {
    let fib = fibration();
    vec![
        ("abelian5", abelian5()),
        ("dg_lie2", dg_lie2()),
        ("linf3", linf3()),
        ("filtered4", filtered4()),
        ("gauge4", gauge4()),
        ("fibration_base", fib.target().clone()),
        ("htt_b", htt_b()),
        ("htt_a", htt_a_abelian()),
        ("htt_transferred_source", htt_transferred_source()),
    ]
}

/// Every bundled infinity-morphism, by name.
pub fn all_morphisms() -> Vec<(&'static str, InftyMorphism)> {
    let mut out = vec![
        ("fibration_p2", fibration()),
        ("htt_f", htt_infinity_morphism()),
    ];
    for (name, l) in all_algebras() {
        if name == "filtered4" {
            let stage = crate::morphism::quotient_tower(&l, 3).unwrap();
            out.push(("filtered4_p3", stage.projection));
            out.push(("filtered4_i2", stage.inclusion));
        }
    }
    out.push(("identity_filtered4", InftyMorphism::identity(&filtered4())));
    out
}
