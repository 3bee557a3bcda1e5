//! Dense exact linear algebra over the rationals with solution certificates.

use num_traits::Zero;

use crate::rat::Rat;

/// Column scanning order used when choosing pivots. Underdetermined systems
/// get their free variables set to zero, so the two orders produce genuinely
/// different (but equally valid) solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotOrder {
    Lex,
    RevLex,
}

impl PivotOrder {
    fn columns(self, n: usize) -> Vec<usize> {
        match self {
            PivotOrder::Lex => (0..n).collect(),
            PivotOrder::RevLex => (0..n).rev().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rat::from_integer(1.into()));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn apply(&self, x: &[Rat]) -> Vec<Rat> {
        assert_eq!(x.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = Rat::zero();
                for c in 0..self.cols {
                    let a = self.get(r, c);
                    if !a.is_zero() && !x[c].is_zero() {
                        acc += a * &x[c];
                    }
                }
                acc
            })
            .collect()
    }

    /// Left action `y^T A`.
    pub fn apply_transpose(&self, y: &[Rat]) -> Vec<Rat> {
        assert_eq!(y.len(), self.rows, "dimension mismatch");
        (0..self.cols)
            .map(|c| {
                let mut acc = Rat::zero();
                for r in 0..self.rows {
                    let a = self.get(r, c);
                    if !a.is_zero() && !y[r].is_zero() {
                        acc += a * &y[r];
                    }
                }
                acc
            })
            .collect()
    }
}

/// Either an exact solution or an exact inconsistency witness `y` with
/// `yA = 0` and `yb != 0`.
#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Solution(Vec<Rat>),
    Inconsistent(Vec<Rat>),
}

/// Row echelon data for `A`: the reduced rows, pivot columns, and the row
/// transform `t` with `t * A = reduced`.
struct Echelon {
    reduced: Vec<Vec<Rat>>,
    transform: Vec<Vec<Rat>>,
    pivots: Vec<(usize, usize)>, // (row, col) in reduced
}

fn echelonize(a: &Matrix, order: PivotOrder) -> Echelon {
    let (m, n) = (a.rows, a.cols);
    let mut rows: Vec<Vec<Rat>> = (0..m)
        .map(|r| (0..n).map(|c| a.get(r, c).clone()).collect())
        .collect();
    let mut transform: Vec<Vec<Rat>> = (0..m)
        .map(|r| {
            let mut row = vec![Rat::zero(); m];
            row[r] = Rat::from_integer(1.into());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut next_row = 0usize;
    for col in order.columns(n) {
        let Some(pr) = (next_row..m).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(next_row, pr);
        transform.swap(next_row, pr);
        let inv = Rat::from_integer(1.into()) / rows[next_row][col].clone();
        for v in rows[next_row].iter_mut().chain(transform[next_row].iter_mut()) {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        for r in 0..m {
            if r == next_row || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            for c in 0..n {
                if !rows[next_row][c].is_zero() {
                    let delta = &rows[next_row][c] * &factor;
                    rows[r][c] -= delta;
                }
            }
            for c in 0..m {
                if !transform[next_row][c].is_zero() {
                    let delta = &transform[next_row][c] * &factor;
                    transform[r][c] -= delta;
                }
            }
        }
        pivots.push((next_row, col));
        next_row += 1;
        if next_row == m {
            break;
        }
    }
    Echelon { reduced: rows, transform, pivots }
}

/// Solves `Ax = b` exactly, or returns an inconsistency certificate.
/// Free variables are set to zero, so the result is the pivot solution
/// determined by `order`.
pub fn solve(a: &Matrix, b: &[Rat], order: PivotOrder) -> SolveOutcome {
    assert_eq!(b.len(), a.rows, "dimension mismatch");
    let ech = echelonize(a, order);
    let tb: Vec<Rat> = (0..a.rows)
        .map(|r| {
            let mut acc = Rat::zero();
            for c in 0..a.rows {
                if !ech.transform[r][c].is_zero() && !b[c].is_zero() {
                    acc += &ech.transform[r][c] * &b[c];
                }
            }
            acc
        })
        .collect();
    let pivot_rows: Vec<usize> = ech.pivots.iter().map(|&(r, _)| r).collect();
    for r in 0..a.rows {
        if !pivot_rows.contains(&r) && !tb[r].is_zero() {
            return SolveOutcome::Inconsistent(ech.transform[r].clone());
        }
    }
    let mut x = vec![Rat::zero(); a.cols];
    for &(r, c) in &ech.pivots {
        // Reduced pivot rows have a single 1 in their pivot column and zeros
        // in the other pivot columns; free columns contribute nothing since
        // the free variables are zero.
        x[c] = tb[r].clone();
    }
    SolveOutcome::Solution(x)
}

pub fn rank(a: &Matrix) -> usize {
    echelonize(a, PivotOrder::Lex).pivots.len()
}

/// A basis of `ker A`, one vector per free column (lex order).
pub fn kernel_basis(a: &Matrix) -> Vec<Vec<Rat>> {
    let ech = echelonize(a, PivotOrder::Lex);
    let pivot_cols: Vec<usize> = ech.pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for free in 0..a.cols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); a.cols];
        v[free] = Rat::from_integer(1.into());
        for &(r, c) in &ech.pivots {
            v[c] = -ech.reduced[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// A basis of the column space of `A`, as vectors of length `a.rows()`.
pub fn column_space_basis(a: &Matrix) -> Vec<Vec<Rat>> {
    let mut t = Matrix::zero(a.cols, a.rows);
    for r in 0..a.rows {
        for c in 0..a.cols {
            t.set(c, r, a.get(r, c).clone());
        }
    }
    let ech = echelonize(&t, PivotOrder::Lex);
    ech.pivots.iter().map(|&(r, _)| ech.reduced[r].clone()).collect()
}

/// A right inverse of `A` (a linear section), if `A` is surjective.
pub fn right_inverse(a: &Matrix, order: PivotOrder) -> Option<Matrix> {
    let mut out = Matrix::zero(a.cols, a.rows);
    for j in 0..a.rows {
        let mut e = vec![Rat::zero(); a.rows];
        e[j] = Rat::from_integer(1.into());
        match solve(a, &e, order) {
            SolveOutcome::Solution(x) => {
                for i in 0..a.cols {
                    out.set(i, j, x[i].clone());
                }
            }
            SolveOutcome::Inconsistent(_) => return None,
        }
    }
    Some(out)
}

/// Incrementally maintained span, used to extend bases and test membership.
pub struct SpanTracker {
    dim: usize,
    rows: Vec<Vec<Rat>>, // kept in echelon form
}

impl SpanTracker {
    pub fn new(dim: usize) -> Self {
        SpanTracker { dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        let mut w = v.to_vec();
        for row in &self.rows {
            let lead = row.iter().position(|x| !x.is_zero()).unwrap();
            if !w[lead].is_zero() {
                let factor = w[lead].clone() / row[lead].clone();
                for (wi, ri) in w.iter_mut().zip(row) {
                    if !ri.is_zero() {
                        let delta = ri * &factor;
                        *wi -= delta;
                    }
                }
            }
        }
        w
    }

    /// Returns true (and absorbs `v`) when `v` is independent of the span.
    pub fn insert(&mut self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.dim);
        let w = self.reduce(v);
        if w.iter().all(Rat::is_zero) {
            return false;
        }
        self.rows.push(w);
        self.rows.sort_by_key(|row| row.iter().position(|x| !x.is_zero()).unwrap());
        true
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.reduce(v).iter().all(Rat::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{frac, rat};

    #[test]
    fn identity_solve() {
        let a = Matrix::identity(2);
        let b = vec![rat(1), frac(-3, 2)];
        match solve(&a, &b, PivotOrder::Lex) {
            SolveOutcome::Solution(x) => assert_eq!(x, b),
            _ => panic!("expected solution"),
        }
    }

    #[test]
    fn underdetermined_solve() {
        // [1 1] x = (2): any x with x1 + x2 = 2.
        let a = Matrix::from_rows(vec![vec![rat(1), rat(1)]]);
        let b = vec![rat(2)];
        match solve(&a, &b, PivotOrder::Lex) {
            SolveOutcome::Solution(x) => {
                assert_eq!(a.apply(&x), b);
                assert_eq!(x, vec![rat(2), rat(0)]);
            }
            _ => panic!("expected solution"),
        }
        match solve(&a, &b, PivotOrder::RevLex) {
            SolveOutcome::Solution(x) => {
                assert_eq!(a.apply(&x), b);
                assert_eq!(x, vec![rat(0), rat(2)]);
            }
            _ => panic!("expected solution"),
        }
    }

    #[test]
    fn inconsistency_certificate() {
        // [[1],[1]] x = (0,1) is inconsistent; a witness is y = (1,-1) up to scale.
        let a = Matrix::from_rows(vec![vec![rat(1)], vec![rat(1)]]);
        let b = vec![rat(0), rat(1)];
        match solve(&a, &b, PivotOrder::Lex) {
            SolveOutcome::Inconsistent(y) => {
                assert!(a.apply_transpose(&y).iter().all(Rat::is_zero), "yA != 0");
                let yb: Rat = y.iter().zip(&b).map(|(u, v)| u * v).sum();
                assert!(!yb.is_zero(), "yb = 0");
            }
            _ => panic!("expected certificate"),
        }
    }

    #[test]
    fn kernel_and_rank() {
        let a = Matrix::from_rows(vec![vec![rat(1), rat(2), rat(3)], vec![rat(2), rat(4), rat(6)]]);
        assert_eq!(rank(&a), 1);
        let ker = kernel_basis(&a);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(a.apply(v).iter().all(Rat::is_zero));
        }
    }

    #[test]
    fn right_inverse_section() {
        let a = Matrix::from_rows(vec![vec![rat(1), rat(1), rat(0)], vec![rat(0), rat(1), rat(1)]]);
        let s = right_inverse(&a, PivotOrder::Lex).unwrap();
        for j in 0..2 {
            let mut e = vec![rat(0), rat(0)];
            e[j] = rat(1);
            let col: Vec<Rat> = (0..3).map(|i| s.get(i, j).clone()).collect();
            assert_eq!(a.apply(&col), e);
        }
        let not_surjective = Matrix::from_rows(vec![vec![rat(1)], vec![rat(1)]]);
        assert!(right_inverse(&not_surjective, PivotOrder::Lex).is_none());
    }

    #[test]
    fn span_tracker() {
        let mut t = SpanTracker::new(3);
        assert!(t.insert(&[rat(1), rat(0), rat(1)]));
        assert!(t.insert(&[rat(0), rat(1), rat(0)]));
        assert!(!t.insert(&[rat(2), rat(3), rat(2)]));
        assert_eq!(t.rank(), 2);
        assert!(t.contains(&[rat(5), rat(-1), rat(5)]));
        assert!(!t.contains(&[rat(0), rat(0), rat(1)]));
    }
}
