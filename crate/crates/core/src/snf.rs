//! Smith normal form over the integers, with transforms.
//!
//! For an `m x n` matrix `M` we find unimodular `U` (`m x m`) and `V`
//! (`n x n`) with `U M V = D` diagonal and `d_1 | d_2 | ...`. Row vectors
//! are elements of `Z^n`; the quotient `Z^n / rowspace(M)` is read off
//! in the coordinates `x V`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Quotient rounded to the nearest integer.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if (&r * 2u32).abs() > b.abs() {
        q + 1
    } else {
        q
    }
}

fn row_axpy(m: &mut Matrix, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (a, b) = if dst < src {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

fn col_axpy(m: &mut Matrix, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        if !row[src].is_zero() {
            let t = q * &row[src];
            row[dst] -= t;
        }
    }
}

fn col_swap(m: &mut Matrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `x M` for a row vector `x`.
fn row_times(x: &[BigInt], m: &Matrix, ncols: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); ncols];
    for (xi, row) in x.iter().zip(m) {
        if xi.is_zero() {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            if !r.is_zero() {
                *o += xi * r;
            }
        }
    }
    out
}

/// `M y` for a column vector `y`.
fn times_col(m: &Matrix, y: &[BigInt]) -> Vec<BigInt> {
    m.iter().map(|row| dot(row, y)).collect()
}

#[derive(Debug, Clone)]
pub struct Smith {
    rows: usize,
    cols: usize,
    diag: Vec<BigInt>,
    u: Matrix,
    v: Matrix,
    v_inv: Matrix,
}

/// Proof that a linear system has no integral solution: a combination `u`
/// of the equations with `u M ≡ 0` but `u c ≢ 0`, modulo `modulus`
/// (zero meaning exact).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Infeasibility {
    pub combination: Vec<BigInt>,
    pub modulus: BigInt,
}

impl Smith {
    pub fn compute(matrix: &[Vec<BigInt>], cols: usize) -> Smith {
        let rows = matrix.len();
        let mut a: Matrix = matrix.to_vec();
        debug_assert!(a.iter().all(|r| r.len() == cols));
        let mut u = identity(rows);
        let mut v = identity(cols);
        let mut v_inv = identity(cols);
        let mut diag = Vec::new();

        // Column op `col_dst -= q col_src` on A, V; inverse row op on V⁻¹.
        let col_op = |a: &mut Matrix, v: &mut Matrix, vi: &mut Matrix, dst: usize, src: usize, q: &BigInt| {
            col_axpy(a, dst, src, q);
            col_axpy(v, dst, src, q);
            row_axpy(vi, src, dst, &-q);
        };

        for t in 0..rows.min(cols) {
            let Some((pi, pj)) = min_entry(&a, t, t) else {
                break;
            };
            a.swap(t, pi);
            u.swap(t, pi);
            col_swap(&mut a, t, pj);
            col_swap(&mut v, t, pj);
            v_inv.swap(t, pj);
            loop {
                for i in (t + 1)..rows {
                    if !a[i][t].is_zero() {
                        let q = round_div(&a[i][t], &a[t][t]);
                        row_axpy(&mut a, i, t, &q);
                        row_axpy(&mut u, i, t, &q);
                    }
                }
                for j in (t + 1)..cols {
                    if !a[t][j].is_zero() {
                        let q = round_div(&a[t][j], &a[t][t]);
                        col_op(&mut a, &mut v, &mut v_inv, j, t, &q);
                    }
                }
                // smallest leftover in the pivot row or column becomes the pivot
                let mut best: Option<(bool, usize)> = None;
                let mut best_abs = a[t][t].abs();
                for i in (t + 1)..rows {
                    if !a[i][t].is_zero() && a[i][t].abs() < best_abs {
                        best_abs = a[i][t].abs();
                        best = Some((true, i));
                    }
                }
                for j in (t + 1)..cols {
                    if !a[t][j].is_zero() && a[t][j].abs() < best_abs {
                        best_abs = a[t][j].abs();
                        best = Some((false, j));
                    }
                }
                match best {
                    Some((true, i)) => {
                        a.swap(t, i);
                        u.swap(t, i);
                        continue;
                    }
                    Some((false, j)) => {
                        col_swap(&mut a, t, j);
                        col_swap(&mut v, t, j);
                        v_inv.swap(t, j);
                        continue;
                    }
                    None => {}
                }
                let clean = ((t + 1)..rows).all(|i| a[i][t].is_zero()) && ((t + 1)..cols).all(|j| a[t][j].is_zero());
                if !clean {
                    continue;
                }
                let p = a[t][t].clone();
                let bad = ((t + 1)..rows).find(|&i| ((t + 1)..cols).any(|j| !a[i][j].is_multiple_of(&p)));
                match bad {
                    Some(i) => {
                        row_axpy(&mut a, t, i, &BigInt::from(-1));
                        row_axpy(&mut u, t, i, &BigInt::from(-1));
                    }
                    None => break,
                }
            }
            if a[t][t].is_negative() {
                for x in a[t].iter_mut().chain(u[t].iter_mut()) {
                    *x = -&*x;
                }
            }
            diag.push(a[t][t].clone());
        }
        Smith {
            rows,
            cols,
            diag,
            u,
            v,
            v_inv,
        }
    }

    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.diag
    }

    pub fn free_rank(&self) -> usize {
        self.cols - self.rank()
    }

    pub fn torsion(&self) -> Vec<BigInt> {
        self.diag.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    /// Basis of the left kernel `{x : x M = 0}`.
    pub fn left_kernel(&self) -> Vec<Vec<BigInt>> {
        self.u[self.rank()..].to_vec()
    }

    /// Moduli of the quotient coordinates: torsion factors, then `0` for
    /// each free coordinate.
    pub fn moduli(&self) -> Vec<BigInt> {
        let mut out = self.torsion();
        out.extend(std::iter::repeat(BigInt::zero()).take(self.free_rank()));
        out
    }

    fn reduced_y(&self, x: &[BigInt]) -> Vec<BigInt> {
        let mut y = row_times(x, &self.v, self.cols);
        for (yi, d) in y.iter_mut().zip(&self.diag) {
            *yi = yi.mod_floor(d);
        }
        y
    }

    /// Class of `x` in the quotient, in the coordinates described by
    /// [`Smith::moduli`].
    pub fn coordinates(&self, x: &[BigInt]) -> Vec<BigInt> {
        let y = self.reduced_y(x);
        y.into_iter()
            .enumerate()
            .filter(|(i, _)| self.diag.get(*i).map_or(true, |d| !d.is_one()))
            .map(|(_, v)| v)
            .collect()
    }

    /// A representative of `x` that depends only on its class.
    pub fn canonical_lift(&self, x: &[BigInt]) -> Vec<BigInt> {
        row_times(&self.reduced_y(x), &self.v_inv, self.cols)
    }

    pub fn in_rowspace(&self, x: &[BigInt]) -> bool {
        self.reduced_y(x).iter().all(Zero::is_zero)
    }

    /// An integral `y` with `M y = c`, or a certificate that none exists.
    pub fn solve(&self, c: &[BigInt]) -> Result<Vec<BigInt>, Infeasibility> {
        assert_eq!(c.len(), self.rows);
        let uc = times_col(&self.u, c);
        let mut z = vec![BigInt::zero(); self.cols];
        for (i, val) in uc.iter().enumerate() {
            match self.diag.get(i) {
                Some(d) => {
                    let (q, r) = val.div_mod_floor(d);
                    if !r.is_zero() {
                        return Err(Infeasibility {
                            combination: self.u[i].clone(),
                            modulus: d.clone(),
                        });
                    }
                    z[i] = q;
                }
                None if !val.is_zero() => {
                    return Err(Infeasibility {
                        combination: self.u[i].clone(),
                        modulus: BigInt::zero(),
                    })
                }
                None => {}
            }
        }
        Ok(times_col(&self.v, &z))
    }
}

impl Infeasibility {
    /// Checks the certificate against the system.
    pub fn verify(&self, matrix: &[Vec<BigInt>], cols: usize, c: &[BigInt]) -> bool {
        let reduce = |x: BigInt| if self.modulus.is_zero() { x } else { x.mod_floor(&self.modulus) };
        let lhs = row_times(&self.combination, &matrix.to_vec(), cols);
        lhs.into_iter().all(|x| reduce(x).is_zero()) && !reduce(dot(&self.combination, c)).is_zero()
    }
}

fn min_entry(a: &Matrix, r0: usize, c0: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(r0) {
        for (j, x) in row.iter().enumerate().skip(c0) {
            if x.is_zero() {
                continue;
            }
            if best.map_or(true, |(bi, bj)| x.abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn mul(a: &Matrix, b: &Matrix, inner: usize, cols: usize) -> Matrix {
        a.iter()
            .map(|row| (0..cols).map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum()).collect())
            .collect()
    }

    /// Invariant factors from gcds of k-minors; only for tiny matrices.
    fn oracle_factors(m: &Matrix, cols: usize) -> Vec<BigInt> {
        fn det(m: &[Vec<BigInt>]) -> BigInt {
            if m.len() == 1 {
                return m[0][0].clone();
            }
            let mut acc = BigInt::zero();
            for j in 0..m.len() {
                let minor: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = &m[0][j] * det(&minor);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        let mut gcds = vec![BigInt::one()];
        for k in 1..=m.len().min(cols) {
            let mut g = BigInt::zero();
            for rs in subsets(m.len(), k) {
                for cs in subsets(cols, k) {
                    let sub: Vec<Vec<BigInt>> = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j].clone()).collect()).collect();
                    g = g.gcd(&det(&sub));
                }
            }
            if g.is_zero() {
                break;
            }
            gcds.push(g);
        }
        gcds.windows(2).map(|w| &w[1] / &w[0]).collect()
    }

    #[test]
    fn small_examples() {
        let s = Smith::compute(&mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]), 3);
        assert_eq!(s.invariant_factors(), &ints(&[2, 6, 12])[..]);
        let s = Smith::compute(&mat(&[&[1, -1]]), 2);
        assert_eq!((s.free_rank(), s.torsion().len()), (1, 0));
        let s = Smith::compute(&[], 4);
        assert_eq!(s.free_rank(), 4);
        let s = Smith::compute(&mat(&[&[1, 1], &[1, -1]]), 2);
        assert_eq!(s.torsion(), ints(&[2]));
    }

    #[test]
    fn solve_and_witness() {
        let m = mat(&[&[2, 0], &[0, 3], &[0, 0]]);
        let s = Smith::compute(&m, 2);
        let y = s.solve(&ints(&[4, 9, 0])).unwrap();
        assert_eq!(times_col(&m, &y), ints(&[4, 9, 0]));
        let e = s.solve(&ints(&[1, 0, 0])).unwrap_err();
        assert!(e.verify(&m, 2, &ints(&[1, 0, 0])));
        let e = s.solve(&ints(&[0, 0, 5])).unwrap_err();
        assert_eq!(e.modulus, BigInt::zero());
        assert!(e.verify(&m, 2, &ints(&[0, 0, 5])));
    }

    fn small_matrix() -> impl Strategy<Value = (Matrix, usize)> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            (proptest::collection::vec(proptest::collection::vec(-6i64..=6, c), r), Just(c))
                .prop_map(|(m, c)| (m.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect(), c))
        })
    }

    proptest! {
        #[test]
        fn factorization_holds((m, c) in small_matrix()) {
            let s = Smith::compute(&m, c);
            let d = mul(&mul(&s.u, &m, m.len(), c), &s.v, c, c);
            for (i, row) in d.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    let expect = if i == j && i < s.rank() { s.diag[i].clone() } else { BigInt::zero() };
                    prop_assert_eq!(x, &expect);
                }
            }
            prop_assert_eq!(mul(&s.v, &s.v_inv, c, c), identity(c));
            for w in s.diag.windows(2) {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
            prop_assert!(s.diag.iter().all(|x| x.is_positive()));
            prop_assert_eq!(s.diag.clone(), oracle_factors(&m, c));
        }

        #[test]
        fn lift_is_class_function((m, c) in small_matrix(), x in proptest::collection::vec(-9i64..=9, 4), k in proptest::collection::vec(-3i64..=3, 4)) {
            let s = Smith::compute(&m, c);
            let x: Vec<BigInt> = x[..c].iter().map(|&v| BigInt::from(v)).collect();
            let k: Vec<BigInt> = k[..m.len()].iter().map(|&v| BigInt::from(v)).collect();
            let shifted: Vec<BigInt> = x.iter().zip(row_times(&k, &m, c)).map(|(a, b)| a + b).collect();
            prop_assert_eq!(s.canonical_lift(&x), s.canonical_lift(&shifted));
            prop_assert_eq!(s.coordinates(&x), s.coordinates(&shifted));
            let diff: Vec<BigInt> = x.iter().zip(s.canonical_lift(&x)).map(|(a, b)| a - b).collect();
            prop_assert!(s.in_rowspace(&diff));
        }

        #[test]
        fn solve_roundtrip((m, c) in small_matrix(), y in proptest::collection::vec(-5i64..=5, 4), c2 in proptest::collection::vec(-5i64..=5, 4)) {
            let s = Smith::compute(&m, c);
            let y: Vec<BigInt> = y[..c].iter().map(|&v| BigInt::from(v)).collect();
            let rhs = times_col(&m, &y);
            let sol = s.solve(&rhs).unwrap();
            prop_assert_eq!(times_col(&m, &sol), rhs);
            let arb: Vec<BigInt> = c2[..m.len()].iter().map(|&v| BigInt::from(v)).collect();
            match s.solve(&arb) {
                Ok(sol) => prop_assert_eq!(times_col(&m, &sol), arb),
                Err(e) => prop_assert!(e.verify(&m, c, &arb)),
            }
        }
    }
}
