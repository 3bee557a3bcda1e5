//! Polynomial de Rham forms on the standard simplices.
//!
//! A form on the n-simplex is written in the coordinates `t1..tn`; the
//! zeroth barycentric coordinate is eliminated via `t0 = 1 - t1 - ... - tn`
//! and `dt0 = -(dt1 + ... + dtn)`, which makes the representation canonical
//! and equality exact. Vertex `i` of the simplex is the point `t_i = 1`,
//! all other coordinates zero (vertex 0 is the origin).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::rat::{self, rat, Rat};

/// Monomial exponents followed by the strictly increasing wedge subset.
/// Variables are indexed 1..=n; the exponent vector always has length n.
type TermKey = (Vec<u32>, Vec<u8>);

/// A polynomial differential form on the standard n-simplex.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyForm {
    n: usize,
    terms: BTreeMap<TermKey, Rat>,
}

impl PolyForm {
    pub fn zero(n: usize) -> Self {
        PolyForm { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Rat) -> Self {
        let mut f = Self::zero(n);
        f.add_term(vec![0; n], vec![], c);
        f
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, rat(1))
    }

    /// The coordinate function `t_i`, `1 <= i <= n`.
    pub fn coordinate(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= n, "coordinate index out of range");
        let mut expo = vec![0; n];
        expo[i - 1] = 1;
        let mut f = Self::zero(n);
        f.add_term(expo, vec![], rat(1));
        f
    }

    /// The one-form `dt_i`, `1 <= i <= n`.
    pub fn differential_coordinate(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= n, "coordinate index out of range");
        let mut f = Self::zero(n);
        f.add_term(vec![0; n], vec![i as u8], rat(1));
        f
    }

    pub fn simplex_dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Form degree, if the form is homogeneous; `None` for 0 or mixed.
    pub fn form_degree(&self) -> Option<usize> {
        let mut deg = None;
        for (key, _) in &self.terms {
            let d = key.1.len();
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        deg
    }

    /// True when every term has wedge size `d` (vacuously true for 0).
    pub fn is_homogeneous(&self, d: usize) -> bool {
        self.terms.keys().all(|k| k.1.len() == d)
    }

    /// The component of the form in form-degree `d`.
    pub fn homogeneous_part(&self, d: usize) -> PolyForm {
        let mut f = Self::zero(self.n);
        for (key, c) in &self.terms {
            if key.1.len() == d {
                f.terms.insert(key.clone(), c.clone());
            }
        }
        f
    }

    /// Iterates the canonical terms as `(exponents, wedge subset, coeff)`.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &[u8], &Rat)> {
        self.terms.iter().map(|((e, w), c)| (e.as_slice(), w.as_slice(), c))
    }

    /// The exact coefficient of one monomial term.
    pub fn term_coefficient(&self, expo: &[u32], wedge: &[u8]) -> Rat {
        self.terms
            .get(&(expo.to_vec(), wedge.to_vec()))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    fn add_term(&mut self, expo: Vec<u32>, wedge: Vec<u8>, c: Rat) {
        if c.is_zero() {
            return;
        }
        let key = (expo, wedge);
        let entry = self.terms.entry(key.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &PolyForm) -> PolyForm {
        assert_eq!(self.n, other.n, "simplex dimension mismatch");
        let mut out = self.clone();
        for (key, c) in &other.terms {
            out.add_term(key.0.clone(), key.1.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &PolyForm) -> PolyForm {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &Rat) -> PolyForm {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        let mut out = Self::zero(self.n);
        for (key, v) in &self.terms {
            out.terms.insert(key.clone(), v * c);
        }
        out
    }

    /// Graded-commutative wedge product.
    pub fn wedge(&self, other: &PolyForm) -> PolyForm {
        assert_eq!(self.n, other.n, "simplex dimension mismatch");
        let mut out = Self::zero(self.n);
        for ((e1, w1), c1) in &self.terms {
            for ((e2, w2), c2) in &other.terms {
                let Some((wedge, sign)) = merge_wedges(w1, w2) else { continue };
                let expo = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let mut c = c1 * c2;
                if sign < 0 {
                    c = -c;
                }
                out.add_term(expo, wedge, c);
            }
        }
        out
    }

    /// Exterior differential.
    pub fn d(&self) -> PolyForm {
        let mut out = Self::zero(self.n);
        for ((expo, wedge), c) in &self.terms {
            for (var0, &e) in expo.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let i = (var0 + 1) as u8;
                let Some((new_wedge, sign)) = insert_into_wedge(wedge, i) else { continue };
                let mut new_expo = expo.clone();
                new_expo[var0] -= 1;
                let mut coeff = c * rat(e as i64);
                if sign < 0 {
                    coeff = -coeff;
                }
                out.add_term(new_expo, new_wedge, coeff);
            }
        }
        out
    }

    /// Substitutes `t_i := images[i-1]`, a 0-form on a target simplex, and
    /// `dt_i := d(images[i-1])`. All images must live on the same simplex.
    pub fn substitute(&self, target_n: usize, images: &[PolyForm]) -> PolyForm {
        assert_eq!(images.len(), self.n, "one image per coordinate required");
        for im in images {
            assert_eq!(im.simplex_dim(), target_n);
            assert!(im.is_homogeneous(0), "coordinate images must be 0-forms");
        }
        let d_images: Vec<PolyForm> = images.iter().map(|im| im.d()).collect();
        let mut out = PolyForm::zero(target_n);
        for ((expo, wedge), c) in &self.terms {
            let mut acc = PolyForm::constant(target_n, c.clone());
            for (var0, &e) in expo.iter().enumerate() {
                for _ in 0..e {
                    acc = acc.wedge(&images[var0]);
                }
            }
            for &i in wedge {
                acc = acc.wedge(&d_images[(i - 1) as usize]);
            }
            out = out.add(&acc);
        }
        out
    }

    /// Pullback along the i-th coface `Δ^{n-1} -> Δ^n`; restriction to the
    /// face opposite vertex `i`.
    pub fn face(&self, i: usize) -> PolyForm {
        assert!(self.n >= 1, "no faces of a 0-simplex form");
        assert!(i <= self.n, "face index out of range");
        let m = self.n - 1;
        let images: Vec<PolyForm> = (1..=self.n)
            .map(|j| {
                if j == i {
                    PolyForm::zero(m)
                } else if i == 0 && j == 1 {
                    // t1 restricts to the eliminated coordinate s0 = 1 - sum(s).
                    let mut f = PolyForm::one(m);
                    for v in 1..=m {
                        f = f.sub(&PolyForm::coordinate(m, v));
                    }
                    f
                } else if j < i {
                    PolyForm::coordinate(m, j)
                } else {
                    PolyForm::coordinate(m, j - 1)
                }
            })
            .collect();
        self.substitute(m, &images)
    }

    /// Pullback along the j-th codegeneracy `Δ^{n+1} -> Δ^n`.
    pub fn degeneracy(&self, j: usize) -> PolyForm {
        assert!(j <= self.n, "degeneracy index out of range");
        let m = self.n + 1;
        let images: Vec<PolyForm> = (1..=self.n)
            .map(|u| {
                if j == 0 {
                    PolyForm::coordinate(m, u + 1)
                } else if u < j {
                    PolyForm::coordinate(m, u)
                } else if u == j {
                    PolyForm::coordinate(m, u).add(&PolyForm::coordinate(m, u + 1))
                } else {
                    PolyForm::coordinate(m, u + 1)
                }
            })
            .collect();
        self.substitute(m, &images)
    }

    /// Evaluates the 0-form part at vertex `v`; higher form-degrees give 0.
    pub fn eval_vertex(&self, v: usize) -> Rat {
        assert!(v <= self.n, "vertex index out of range");
        let mut out = Rat::zero();
        for ((expo, wedge), c) in &self.terms {
            if !wedge.is_empty() {
                continue;
            }
            let alive = expo
                .iter()
                .enumerate()
                .all(|(var0, &e)| e == 0 || var0 + 1 == v);
            if alive {
                out += c;
            }
        }
        out
    }

    /// Radial contraction toward vertex `v`: the Poincaré homotopy `h` with
    /// `d(h w) + h(d w) = w - ev_v(w)` exactly, mapping polynomial forms to
    /// polynomial forms and lowering form-degree by one.
    pub fn dilation_homotopy(&self, v: usize) -> PolyForm {
        assert!(v <= self.n, "vertex index out of range");
        if v == 0 {
            return self.dilation_homotopy_origin();
        }
        self.shift_center(v, true).dilation_homotopy_origin().shift_center(v, false)
    }

    /// Rewrites in coordinates centered at vertex `v` (`to_centered = true`)
    /// or back (`false`): `t_v` is shifted by a constant, others unchanged.
    fn shift_center(&self, v: usize, to_centered: bool) -> PolyForm {
        let offset = if to_centered { rat(1) } else { rat(-1) };
        let images: Vec<PolyForm> = (1..=self.n)
            .map(|j| {
                let t = PolyForm::coordinate(self.n, j);
                if j == v {
                    t.add(&PolyForm::constant(self.n, offset.clone()))
                } else {
                    t
                }
            })
            .collect();
        self.substitute(self.n, &images)
    }

    fn dilation_homotopy_origin(&self) -> PolyForm {
        let mut out = PolyForm::zero(self.n);
        for ((expo, wedge), c) in &self.terms {
            let p = wedge.len();
            if p == 0 {
                continue;
            }
            let total: u32 = expo.iter().sum();
            let scale = c / rat(total as i64 + p as i64);
            for (pos, &i) in wedge.iter().enumerate() {
                let mut new_expo = expo.clone();
                new_expo[(i - 1) as usize] += 1;
                let new_wedge: Vec<u8> =
                    wedge.iter().enumerate().filter(|(q, _)| *q != pos).map(|(_, &w)| w).collect();
                let mut coeff = scale.clone();
                if pos % 2 == 1 {
                    coeff = -coeff;
                }
                out.add_term(new_expo, new_wedge, coeff);
            }
        }
        out
    }

    /// Canonical text rendering, e.g. `3/2*t1^2*dt1^dt2 + -1*t2`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for ((expo, wedge), c) in &self.terms {
            let mut factors = Vec::new();
            for (var0, &e) in expo.iter().enumerate() {
                if e == 1 {
                    factors.push(format!("t{}", var0 + 1));
                } else if e > 1 {
                    factors.push(format!("t{}^{}", var0 + 1, e));
                }
            }
            let wedge_str: Vec<String> = wedge.iter().map(|i| format!("dt{i}")).collect();
            let mut term = if factors.is_empty() && wedge_str.is_empty() {
                rat::render(c)
            } else {
                let mut body = factors.join("*");
                if !wedge_str.is_empty() {
                    if !body.is_empty() {
                        body.push('*');
                    }
                    body.push_str(&wedge_str.join("^"));
                }
                if c == &rat(1) {
                    body
                } else {
                    format!("{}*{}", rat::render(c), body)
                }
            };
            if term.is_empty() {
                term = rat::render(c);
            }
            parts.push(term);
        }
        parts.join(" + ")
    }

    /// Parses the rendering grammar: a `+`-separated sum of terms, each a
    /// `*`- or `^`-joined product of rational literals, `t<i>` (optionally
    /// with an integer exponent) and `dt<i>`.
    pub fn parse(n: usize, text: &str) -> Result<PolyForm, String> {
        let mut out = PolyForm::zero(n);
        let text = text.trim();
        if text.is_empty() || text == "0" {
            return Ok(out);
        }
        for raw_term in text.split('+') {
            let term = raw_term.trim();
            if term.is_empty() {
                return Err("empty term".to_string());
            }
            out = out.add(&Self::parse_term(n, term)?);
        }
        Ok(out)
    }

    fn parse_term(n: usize, term: &str) -> Result<PolyForm, String> {
        let mut negate = false;
        let mut rest = term;
        while let Some(r) = rest.strip_prefix('-') {
            negate = !negate;
            rest = r.trim_start();
        }
        // '*' separates factors; '^' after a factor is an exponent when an
        // integer follows (t1^2) and a wedge separator otherwise (dt1^dt2).
        let mut acc = PolyForm::one(n);
        for factor in rest.split('*').map(str::trim) {
            let mut pending: Option<PolyForm> = None;
            for piece in factor.split('^').map(str::trim) {
                if piece.is_empty() {
                    return Err(format!("empty factor in term `{term}`"));
                }
                if let Ok(exp) = piece.parse::<u32>() {
                    if let Some(base) = pending.take() {
                        let mut powed = PolyForm::one(n);
                        for _ in 0..exp {
                            powed = powed.wedge(&base);
                        }
                        pending = Some(powed);
                        continue;
                    }
                }
                let parsed = Self::parse_factor(n, piece)?;
                pending = Some(match pending.take() {
                    Some(prev) => prev.wedge(&parsed),
                    None => parsed,
                });
            }
            if let Some(p) = pending {
                acc = acc.wedge(&p);
            }
        }
        if negate {
            acc = acc.scale(&rat(-1));
        }
        Ok(acc)
    }

    fn parse_factor(n: usize, factor: &str) -> Result<PolyForm, String> {
        if let Some(idx) = factor.strip_prefix("dt") {
            let i: usize = idx.parse().map_err(|_| format!("bad index in `{factor}`"))?;
            if i < 1 || i > n {
                return Err(format!("dt index out of range in `{factor}`"));
            }
            return Ok(PolyForm::differential_coordinate(n, i));
        }
        if let Some(idx) = factor.strip_prefix('t') {
            if let Ok(i) = idx.parse::<usize>() {
                if i < 1 || i > n {
                    return Err(format!("t index out of range in `{factor}`"));
                }
                return Ok(PolyForm::coordinate(n, i));
            }
        }
        rat::parse(factor)
            .map(|c| PolyForm::constant(n, c))
            .ok_or_else(|| format!("cannot parse factor `{factor}`"))
    }
}

impl fmt::Debug for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyForm(n={}, {})", self.n, self.render())
    }
}

/// Merges two strictly increasing wedge subsets, returning the merged subset
/// and the Koszul sign of the interleaving; `None` on a repeated generator.
fn merge_wedges(a: &[u8], b: &[u8]) -> Option<(Vec<u8>, i8)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut sign = 1i8;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            // b[j] moves left past the remaining a-generators.
            if (a.len() - i) % 2 == 1 {
                sign = -sign;
            }
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, sign))
}

/// Inserts `i` in front as `dt_i ∧ dt_wedge` and sorts, tracking the sign.
fn insert_into_wedge(wedge: &[u8], i: u8) -> Option<(Vec<u8>, i8)> {
    if wedge.contains(&i) {
        return None;
    }
    let before = wedge.iter().filter(|&&w| w < i).count();
    let mut out = Vec::with_capacity(wedge.len() + 1);
    out.extend(wedge.iter().copied().filter(|&w| w < i));
    out.push(i);
    out.extend(wedge.iter().copied().filter(|&w| w > i));
    Some((out, if before % 2 == 0 { 1 } else { -1 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::frac;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t(n: usize, i: usize) -> PolyForm {
        PolyForm::coordinate(n, i)
    }
    fn dt(n: usize, i: usize) -> PolyForm {
        PolyForm::differential_coordinate(n, i)
    }

    pub(crate) fn random_form(n: usize, rng: &mut ChaCha8Rng) -> PolyForm {
        let mut f = PolyForm::zero(n);
        let terms = rng.gen_range(1..=4);
        for _ in 0..terms {
            let expo: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
            let mut wedge: Vec<u8> = (1..=n as u8).filter(|_| rng.gen_bool(0.4)).collect();
            wedge.sort_unstable();
            let c = frac(rng.gen_range(-4..=4), rng.gen_range(1..=3));
            f.add_term(expo, wedge, c);
        }
        f
    }

    #[test]
    fn wedge_basics() {
        let n = 2;
        assert!(dt(n, 1).wedge(&dt(n, 1)).is_zero());
        assert_eq!(t(n, 1).wedge(&dt(n, 2)).render(), "t1*dt2");
        assert_eq!(dt(n, 1).wedge(&dt(n, 2)), dt(n, 2).wedge(&dt(n, 1)).scale(&rat(-1)));
    }

    #[test]
    fn differential_basics() {
        let n = 2;
        assert_eq!(t(n, 1).d(), dt(n, 1));
        let prod = t(n, 1).wedge(&t(n, 2));
        let leibniz = t(n, 2).wedge(&dt(n, 1)).add(&t(n, 1).wedge(&dt(n, 2)));
        assert_eq!(prod.d(), leibniz);
        assert!(dt(n, 1).d().is_zero());
    }

    #[test]
    fn d_squared_zero_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 0..=4 {
            for _ in 0..200 {
                let f = random_form(n, &mut rng);
                assert!(f.d().d().is_zero(), "d^2 != 0 on {f:?}");
            }
        }
    }

    #[test]
    fn wedge_associative_graded_commutative_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=3 {
            for _ in 0..60 {
                let a = random_form(n, &mut rng);
                let b = random_form(n, &mut rng);
                let c = random_form(n, &mut rng);
                assert_eq!(a.wedge(&b).wedge(&c), a.wedge(&b.wedge(&c)));
                // Check graded commutativity degreewise.
                for p in 0..=n {
                    for q in 0..=n {
                        let ap = a.homogeneous_part(p);
                        let bq = b.homogeneous_part(q);
                        let lhs = ap.wedge(&bq);
                        let mut rhs = bq.wedge(&ap);
                        if p * q % 2 == 1 {
                            rhs = rhs.scale(&rat(-1));
                        }
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn face_conventions() {
        // Vertex 1 of the 1-simplex has t1 = 1; vertex 0 has t1 = 0.
        assert_eq!(t(1, 1).face(0), PolyForm::one(0));
        assert_eq!(t(1, 1).face(1), PolyForm::zero(0));
        assert_eq!(t(1, 1).eval_vertex(1), rat(1));
        assert_eq!(t(1, 1).eval_vertex(0), rat(0));
        assert_eq!(dt(1, 1).eval_vertex(0), rat(0));
    }

    #[test]
    fn simplicial_identities_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=4 {
            for _ in 0..40 {
                let f = random_form(n, &mut rng);
                // d_i d_j = d_{j-1} d_i for i < j (acting contravariantly).
                for j in 1..=n {
                    for i in 0..j {
                        assert_eq!(f.face(j).face(i), f.face(i).face(j - 1));
                    }
                }
                // s_i then the appropriate faces gives back the form.
                for j in 0..n {
                    let s = f.degeneracy(j);
                    assert_eq!(s.face(j), f);
                    assert_eq!(s.face(j + 1), f);
                }
            }
        }
        // Degeneracy/face interchange on a couple of fixed indices.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..40 {
            let f = random_form(2, &mut rng);
            // d_0 s_1 = s_0 d_0 on forms of the 2-simplex.
            assert_eq!(f.degeneracy(1).face(0), f.face(0).degeneracy(0));
        }
    }

    #[test]
    fn dilation_homotopy_examples() {
        // h(dt1) toward vertex 0 on the 1-simplex is t1.
        assert_eq!(dt(1, 1).dilation_homotopy(0), t(1, 1));
        // h vanishes on 0-forms.
        assert!(PolyForm::one(1).dilation_homotopy(0).is_zero());
        // h(t1 dt1) = t1^2/2.
        let got = t(1, 1).wedge(&dt(1, 1)).dilation_homotopy(0);
        assert_eq!(got, t(1, 1).wedge(&t(1, 1)).scale(&frac(1, 2)));
    }

    #[test]
    fn dilation_homotopy_contract_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=3 {
            for v in 0..=n {
                for _ in 0..40 {
                    let f = random_form(n, &mut rng);
                    let h_df = f.d().dilation_homotopy(v);
                    let d_hf = f.dilation_homotopy(v).d();
                    let lhs = h_df.add(&d_hf);
                    let ev = PolyForm::constant(n, f.eval_vertex(v));
                    let rhs = f.sub(&ev);
                    assert_eq!(lhs, rhs, "dh+hd != id - ev at v={v}, f={f:?}");
                }
            }
        }
    }

    #[test]
    fn dilation_homotopy_commutes_with_faces_preserving_center() {
        // For i != k the face map carries the dilation center along.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 2..=3 {
            for k in 0..=n {
                for i in 0..=n {
                    if i == k {
                        continue;
                    }
                    let k_face = if k < i { k } else { k - 1 };
                    for _ in 0..25 {
                        let f = random_form(n, &mut rng);
                        let lhs = f.dilation_homotopy(k).face(i);
                        let rhs = f.face(i).dilation_homotopy(k_face);
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn render_parse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 0..=3 {
            for _ in 0..80 {
                let f = random_form(n, &mut rng);
                let text = f.render();
                let back = PolyForm::parse(n, &text).unwrap();
                assert_eq!(back, f, "round trip failed on `{text}`");
            }
        }
        let f = PolyForm::parse(2, "3/2*t1^2*dt1^dt2 + -1*t2").unwrap();
        let expect = t(2, 1)
            .wedge(&t(2, 1))
            .wedge(&dt(2, 1))
            .wedge(&dt(2, 2))
            .scale(&frac(3, 2))
            .add(&t(2, 2).scale(&rat(-1)));
        assert_eq!(f, expect);
        assert!(PolyForm::parse(1, "dt2").is_err());
        assert_eq!(PolyForm::parse(1, "0").unwrap(), PolyForm::zero(1));
    }
}
