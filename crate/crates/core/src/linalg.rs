//! Exact integer and rational linear algebra.
//!
//! Integer matrices are plain `Vec<Vec<i128>>` in row-major order. The Smith
//! normal form here carries both unimodular transforms, which is what the
//! lattice quotients, integer solvers and K0 presentations need.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

pub type IntMatrix = Vec<Vec<i128>>;

/// Smith normal form `D = U * A * V` with `U`, `V` unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    /// Nonzero invariant factors `d_1 | d_2 | ... | d_rank`, all positive.
    pub diag: Vec<i128>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
    pub rows: usize,
    pub cols: usize,
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix, inner: usize) -> IntMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn swap_cols(m: &mut IntMatrix, i: usize, j: usize) {
    for row in m.iter_mut() {
        row.swap(i, j);
    }
}

/// col_j += factor * col_i
fn add_col(m: &mut IntMatrix, i: usize, j: usize, factor: i128) {
    for row in m.iter_mut() {
        row[j] += factor * row[i];
    }
}

/// row_j += factor * row_i
fn add_row(m: &mut IntMatrix, i: usize, j: usize, factor: i128) {
    let src = m[i].clone();
    for (dst, s) in m[j].iter_mut().zip(src) {
        *dst += factor * s;
    }
}

/// Computes the Smith normal form of an `rows x cols` integer matrix.
pub fn smith(a: &IntMatrix, cols: usize) -> Smith {
    let rows = a.len();
    let mut d = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut rank = 0;

    for k in 0..rows.min(cols) {
        // smallest nonzero entry of the trailing block
        let pivot = (k..rows)
            .flat_map(|i| (k..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| d[i][j] != 0)
            .min_by_key(|&(i, j)| d[i][j].abs());
        let Some((pi, pj)) = pivot else { break };
        d.swap(k, pi);
        u.swap(k, pi);
        swap_cols(&mut d, k, pj);
        swap_cols(&mut v, k, pj);

        loop {
            let mut dirty = false;
            for i in k + 1..rows {
                if d[i][k] != 0 {
                    let q = Integer::div_floor(&d[i][k], &d[k][k]);
                    add_row(&mut d, k, i, -q);
                    add_row(&mut u, k, i, -q);
                    if d[i][k] != 0 {
                        d.swap(k, i);
                        u.swap(k, i);
                        dirty = true;
                    }
                }
            }
            for j in k + 1..cols {
                if d[k][j] != 0 {
                    let q = Integer::div_floor(&d[k][j], &d[k][k]);
                    add_col(&mut d, k, j, -q);
                    add_col(&mut v, k, j, -q);
                    if d[k][j] != 0 {
                        swap_cols(&mut d, k, j);
                        swap_cols(&mut v, k, j);
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let bad = (k + 1..rows)
                .flat_map(|i| (k + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| d[i][j] % d[k][k] != 0);
            match bad {
                Some((i, _)) => {
                    add_row(&mut d, i, k, 1);
                    add_row(&mut u, i, k, 1);
                }
                None => break,
            }
        }
        if d[k][k] < 0 {
            for x in d[k].iter_mut() {
                *x = -*x;
            }
            for x in u[k].iter_mut() {
                *x = -*x;
            }
        }
        rank += 1;
    }
    Smith {
        diag: (0..rank).map(|i| d[i][i]).collect(),
        u,
        v,
        rank,
        rows,
        cols,
    }
}

/// Row-style Hermite normal form: an echelon basis of the row lattice with
/// positive pivots and entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_rows(a: &IntMatrix, cols: usize) -> IntMatrix {
    let mut m: IntMatrix = a.clone();
    let mut out: IntMatrix = Vec::new();
    let mut col = 0;
    while col < cols && !m.is_empty() {
        loop {
            let nz: Vec<usize> = (0..m.len()).filter(|&i| m[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| m[i][col].abs()).unwrap();
            for &i in &nz {
                if i != p {
                    let q = Integer::div_floor(&m[i][col], &m[p][col]);
                    add_row(&mut m, p, i, -q);
                }
            }
        }
        if let Some(p) = (0..m.len()).find(|&i| m[i][col] != 0) {
            let mut row = m.remove(p);
            if row[col] < 0 {
                row.iter_mut().for_each(|x| *x = -*x);
            }
            out.push(row);
        }
        col += 1;
    }
    // reduce above pivots
    for r in 0..out.len() {
        let pc = out[r].iter().position(|&x| x != 0).unwrap();
        let piv = out[r][pc];
        for above in 0..r {
            let q = Integer::div_floor(&out[above][pc], &piv);
            if q != 0 {
                let src = out[r].clone();
                for (x, s) in out[above].iter_mut().zip(src) {
                    *x -= q * s;
                }
            }
        }
    }
    out
}

/// Reduces `x` modulo the row lattice given by a Hermite basis, producing the
/// canonical coset representative.
pub fn reduce_mod_hermite(x: &[i128], hermite: &IntMatrix) -> Vec<i128> {
    let mut x = x.to_vec();
    for row in hermite {
        let pc = row.iter().position(|&v| v != 0).unwrap();
        let q = Integer::div_floor(&x[pc], &row[pc]);
        if q != 0 {
            for (xi, r) in x.iter_mut().zip(row) {
                *xi -= q * r;
            }
        }
    }
    x
}

/// Finds integer `x` with `sum_i x_i * gens[i] = target`, if any.
pub fn solve_left(gens: &IntMatrix, target: &[i128]) -> Option<Vec<i128>> {
    let cols = target.len();
    if gens.is_empty() {
        return target.iter().all(|&t| t == 0).then(Vec::new);
    }
    let s = smith(gens, cols);
    // x U^{-1} D = b V
    let bv: Vec<i128> = (0..cols)
        .map(|j| (0..cols).map(|k| target[k] * s.v[k][j]).sum())
        .collect();
    let mut y = vec![0i128; gens.len()];
    for j in 0..cols {
        if j < s.rank {
            if bv[j] % s.diag[j] != 0 {
                return None;
            }
            y[j] = bv[j] / s.diag[j];
        } else if bv[j] != 0 {
            return None;
        }
    }
    // x = y U
    Some(
        (0..gens.len())
            .map(|i| (0..gens.len()).map(|k| y[k] * s.u[k][i]).sum())
            .collect(),
    )
}

/// Basis of the integer kernel `{x : M x = 0}` of an `rows x cols` matrix.
pub fn integer_kernel(m: &IntMatrix, cols: usize) -> IntMatrix {
    if m.is_empty() {
        return identity(cols);
    }
    let s = smith(m, cols);
    (s.rank..cols)
        .map(|j| (0..cols).map(|i| s.v[i][j]).collect())
        .collect()
}

/// Inverse of a unimodular matrix, via its Smith form.
pub fn unimodular_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    let n = m.len();
    let s = smith(m, n);
    if s.rank != n || s.diag.iter().any(|&d| d != 1) {
        return None;
    }
    // I = U M V  =>  M^{-1} = V U
    Some(mat_mul(&s.v, &s.u, n))
}

pub type Rational = Ratio<i128>;

/// Row-reduces a rational matrix in place and returns its rank.
pub fn rational_rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let piv = m[rank][c];
        for i in 0..m.len() {
            if i != rank && !m[i][c].is_zero() {
                let f = m[i][c] / piv;
                for j in c..cols {
                    let t = m[rank][j] * f;
                    m[i][j] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rational solve of `sum_i x_i * gens[i] = target`.
pub fn rational_solve_left(gens: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let k = gens.len();
    let cols = target.len();
    // augmented system: columns are equations, unknowns x_i
    let mut m: Vec<Vec<Rational>> = (0..cols)
        .map(|j| {
            let mut row: Vec<Rational> = (0..k).map(|i| gens[i][j]).collect();
            row.push(target[j]);
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let piv = m[r][c];
        for x in m[r].iter_mut() {
            *x /= piv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..=k {
                    let t = m[r][j] * f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); k];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = m[row][k];
    }
    Some(x)
}

/// Rank of an integer matrix reduced modulo a prime `p`.
pub fn rank_mod_p(rows: &[Vec<i128>], p: i128) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x.mod_floor(&p)).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = mod_inverse(m[rank][c], p).expect("p is prime");
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let f = (m[i][c] * inv).mod_floor(&p);
                for j in c..cols {
                    m[i][j] = (m[i][j] - f * m[rank][j]).mod_floor(&p);
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn mod_inverse(a: i128, n: i128) -> Option<i128> {
    let e = a.mod_floor(&n).extended_gcd(&n);
    e.gcd.is_one().then(|| e.x.mod_floor(&n))
}

/// Prime factorisation by trial division (inputs are small moduli).
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_smith(a: &IntMatrix, cols: usize) -> Smith {
        let s = smith(a, cols);
        let ua = mat_mul(&s.u, a, a.len());
        let d = mat_mul(&ua, &s.v, cols);
        for (i, row) in d.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                let expect = if i == j && i < s.rank { s.diag[i] } else { 0 };
                assert_eq!(x, expect, "D[{i}][{j}]");
            }
        }
        for w in s.diag.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        s
    }

    #[test]
    fn smith_of_small_matrices() {
        let s = check_smith(&vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3);
        assert_eq!(s.diag, vec![2, 6, 12]);
        let s = check_smith(&vec![vec![0, 0], vec![0, 0]], 2);
        assert_eq!(s.rank, 0);
        let s = check_smith(&vec![vec![2, 0], vec![0, 3]], 2);
        assert_eq!(s.diag, vec![1, 6]);
    }

    #[test]
    fn hermite_and_reduction() {
        let h = hermite_rows(&vec![vec![2, 4], vec![0, 6]], 2);
        assert_eq!(h, vec![vec![2, 4], vec![0, 6]]);
        let h = hermite_rows(&vec![vec![1, 0]], 2);
        assert_eq!(reduce_mod_hermite(&[3, 5], &h), vec![0, 5]);
    }

    #[test]
    fn integer_solve_and_kernel() {
        assert_eq!(solve_left(&vec![vec![2], vec![3]], &[1]).map(|x| 2 * x[0] + 3 * x[1]), Some(1));
        assert_eq!(solve_left(&vec![vec![2], vec![4]], &[1]), None);
        let k = integer_kernel(&vec![vec![1, 0]], 2);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0][0], 0);
        assert_eq!(k[0][1].abs(), 1);
    }

    #[test]
    fn field_ranks() {
        assert_eq!(rank_mod_p(&[vec![1, 1], vec![1, 1]], 2), 1);
        assert_eq!(rank_mod_p(&[vec![2, 0], vec![0, 1]], 2), 1);
        let r = |n: i128| Rational::from_integer(n);
        assert_eq!(rational_rank(&[vec![r(1), r(2)], vec![r(2), r(4)]]), 1);
        let x = rational_solve_left(&[vec![r(2), r(0)], vec![r(0), r(4)]], &[r(1), r(1)]).unwrap();
        assert_eq!(x, vec![Ratio::new(1, 2), Ratio::new(1, 4)]);
    }
}
