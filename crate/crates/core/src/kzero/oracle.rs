//! Exhaustive classification of idempotent matrices over `ℤ/n`.
//!
//! Every idempotent of size at most `n_max` is enumerated. Two idempotents
//! `p` (k×k) and `q` (l×l) are identified only when a witness pair
//! `u ∈ q M p`, `v ∈ p M q` with `vu = p` and `uv = q` is found by trying
//! every candidate, so a missing identification is a certificate within the
//! bound. The Grothendieck group of the truncated monoid comes from the Smith
//! form of the relations `[p ⊕ q] - [p] - [q]`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::{K0Element, K0Group, Label};
use crate::error::{Error, Result};
use crate::rings::ZMod;

/// Largest base ring the oracle accepts.
pub const MAX_BASE: u64 = 16;
/// Largest matrix size the oracle accepts.
pub const MAX_SIZE: usize = 3;
/// Largest number of matrices of size `n_max` the oracle will enumerate.
pub const MAX_MATRICES: u64 = 1 << 16;

/// A square matrix over `ℤ/n`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SmallMatrix {
    pub size: usize,
    pub entries: Vec<u64>,
}

fn mul(n: u64, a: &[u64], b: &[u64], rows: usize, inner: usize, cols: usize) -> Vec<u64> {
    let mut out = vec![0u64; rows * cols];
    for i in 0..rows {
        for k in 0..inner {
            let x = a[i * inner + k];
            if x == 0 {
                continue;
            }
            for j in 0..cols {
                out[i * cols + j] = (out[i * cols + j] + x * b[k * cols + j]) % n;
            }
        }
    }
    out
}

/// All `rows × cols` matrices over `ℤ/n`, in lexicographic order.
fn all_matrices(n: u64, rows: usize, cols: usize) -> impl ParallelIterator<Item = Vec<u64>> {
    let len = rows * cols;
    let total = n.pow(len as u32);
    (0..total).into_par_iter().map(move |mut idx| {
        let mut m = vec![0u64; len];
        for slot in m.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        m
    })
}

/// Stable isomorphism classes of idempotents up to a size bound.
#[derive(Clone, Debug)]
pub struct IdemClassTable {
    modulus: u64,
    n_max: usize,
    idempotents: Vec<SmallMatrix>,
    class_of: Vec<usize>,
    /// First idempotent of each class; it has the smallest size in the class.
    representatives: Vec<usize>,
    /// `(a, b, c)` with `[rep a] + [rep b] = [c]`.
    additions: Vec<(usize, usize, usize)>,
    index: HashMap<SmallMatrix, usize>,
}

impl IdemClassTable {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn idempotents(&self) -> &[SmallMatrix] {
        &self.idempotents
    }

    pub fn class_count(&self) -> usize {
        self.representatives.len()
    }

    pub fn representative(&self, class: usize) -> &SmallMatrix {
        &self.idempotents[self.representatives[class]]
    }

    pub fn additions(&self) -> &[(usize, usize, usize)] {
        &self.additions
    }

    /// The class of an enumerated idempotent.
    pub fn class_of(&self, m: &SmallMatrix) -> Option<usize> {
        self.index.get(m).map(|&i| self.class_of[i])
    }

    pub fn label(&self, class: usize) -> Label {
        Label::Class(class)
    }

    /// Re-runs the witness search between `m` and its class representative.
    pub fn witness(&self, m: &SmallMatrix) -> Option<(Vec<u64>, Vec<u64>)> {
        let rep = self.representative(self.class_of(m)?);
        find_witness(self.modulus, m, rep)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "modulus": self.modulus,
            "n_max": self.n_max,
            "idempotents": self.idempotents.len(),
            "classes": self.representatives.iter().map(|&i| json!({
                "size": self.idempotents[i].size,
                "entries": self.idempotents[i].entries,
            })).collect::<Vec<_>>(),
            "additions": self.additions.iter().map(|(a, b, c)| json!([a, b, c])).collect::<Vec<_>>(),
        })
    }
}

/// Searches `u ∈ q M p`, `v ∈ p M q` with `vu = p` and `uv = q`. Candidates
/// are tried in lexicographic order, so the witness found is deterministic.
fn find_witness(n: u64, p: &SmallMatrix, q: &SmallMatrix) -> Option<(Vec<u64>, Vec<u64>)> {
    let (k, l) = (p.size, q.size);
    // u: l×k, v: k×l
    let us: Vec<Vec<u64>> = all_matrices(n, l, k)
        .filter(|u| mul(n, &mul(n, &q.entries, u, l, l, k), &p.entries, l, k, k) == *u)
        .collect();
    let vs: Vec<Vec<u64>> = all_matrices(n, k, l)
        .filter(|v| mul(n, &mul(n, &p.entries, v, k, k, l), &q.entries, k, l, l) == *v)
        .collect();
    us.par_iter().find_map_first(|u| {
        vs.iter()
            .find(|v| mul(n, v, u, k, l, k) == p.entries && mul(n, u, v, l, k, l) == q.entries)
            .map(|v| (u.clone(), v.clone()))
    })
}

fn direct_sum(p: &SmallMatrix, q: &SmallMatrix) -> SmallMatrix {
    let size = p.size + q.size;
    let mut entries = vec![0u64; size * size];
    for i in 0..p.size {
        for j in 0..p.size {
            entries[i * size + j] = p.entries[i * p.size + j];
        }
    }
    for i in 0..q.size {
        for j in 0..q.size {
            entries[(p.size + i) * size + p.size + j] = q.entries[i * q.size + j];
        }
    }
    SmallMatrix { size, entries }
}

/// Enumerates, classifies and presents `K0` of the truncated monoid of
/// idempotents over `ℤ/n` of size at most `n_max`.
pub fn k0_bruteforce(base: ZMod, n_max: usize) -> Result<(IdemClassTable, K0Group)> {
    let n = base.0;
    if !(2..=MAX_BASE).contains(&n) || n_max > MAX_SIZE {
        return Err(Error::BudgetExceeded(format!(
            "oracle needs 2 ≤ |B| ≤ {MAX_BASE} and n_max ≤ {MAX_SIZE}, got |B| = {n}, n_max = {n_max}"
        )));
    }
    let largest = n.checked_pow((n_max * n_max) as u32).unwrap_or(u64::MAX);
    if largest > MAX_MATRICES {
        return Err(Error::BudgetExceeded(format!("{largest} matrices of size {n_max} exceed {MAX_MATRICES}")));
    }
    let mut idempotents = Vec::new();
    for size in 0..=n_max {
        let found: Vec<SmallMatrix> = all_matrices(n, size, size)
            .filter(|m| mul(n, m, m, size, size, size) == *m)
            .map(|entries| SmallMatrix { size, entries })
            .collect();
        idempotents.extend(found);
    }
    let mut class_of = Vec::with_capacity(idempotents.len());
    let mut representatives: Vec<usize> = Vec::new();
    for (i, p) in idempotents.iter().enumerate() {
        let hit = representatives.iter().position(|&r| find_witness(n, p, &idempotents[r]).is_some());
        match hit {
            Some(c) => class_of.push(c),
            None => {
                class_of.push(representatives.len());
                representatives.push(i);
            }
        }
    }
    let index: HashMap<SmallMatrix, usize> = idempotents.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut additions = Vec::new();
    for (a, &ra) in representatives.iter().enumerate() {
        for (b, &rb) in representatives.iter().enumerate() {
            let (p, q) = (&idempotents[ra], &idempotents[rb]);
            if p.size + q.size > n_max {
                continue;
            }
            let s = direct_sum(p, q);
            let c = class_of[index[&s]];
            additions.push((a, b, c));
        }
    }
    let classes = representatives.len();
    let relations: Vec<Vec<i64>> = additions
        .iter()
        .map(|&(a, b, c)| {
            let mut row = vec![0i64; classes];
            row[c] += 1;
            row[a] -= 1;
            row[b] -= 1;
            row
        })
        .filter(|r| r.iter().any(|&x| x != 0))
        .collect();
    let group = K0Group::new((0..classes).map(Label::Class).collect(), relations)?;
    let table = IdemClassTable { modulus: n, n_max, idempotents, class_of, representatives, additions, index };
    Ok((table, group))
}

/// Element of the oracle group for an idempotent matrix given by rows.
pub fn oracle_class(table: &IdemClassTable, rows: &[Vec<u64>]) -> Option<K0Element> {
    let size = rows.len();
    let entries = rows.iter().flatten().map(|x| x % table.modulus).collect();
    table.class_of(&SmallMatrix { size, entries }).map(|c| K0Element::basis(Label::Class(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank_mod_p;

    fn rank(m: &SmallMatrix, p: u64) -> usize {
        let rows: Vec<Vec<i128>> = m.entries.chunks(m.size.max(1)).map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        if m.size == 0 {
            0
        } else {
            rank_mod_p(&rows, p as i128)
        }
    }

    /// Group ≅ ℤ and every class maps to ± its rank.
    fn class_is_rank(n: u64, p: u64, n_max: usize) {
        let (table, group) = k0_bruteforce(ZMod(n), n_max).unwrap();
        assert!(group.is_free_of_rank(1));
        let unit = table
            .idempotents()
            .iter()
            .find(|m| rank(m, p) == 1)
            .map(|m| group.coordinates(&K0Element::basis(Label::Class(table.class_of(m).unwrap()))).unwrap()[0])
            .unwrap();
        assert_eq!(unit.abs(), 1);
        for m in table.idempotents() {
            let c = group.coordinates(&K0Element::basis(Label::Class(table.class_of(m).unwrap()))).unwrap();
            assert_eq!(c, vec![unit * rank(m, p) as i128]);
        }
        assert_eq!(table.class_count(), n_max + 1);
    }

    #[test]
    fn fields_and_local_rings_give_rank() {
        class_is_rank(2, 2, 2);
        class_is_rank(4, 2, 1);
        class_is_rank(4, 2, 2);
        class_is_rank(3, 3, 2);
        class_is_rank(2, 2, 3);
    }

    #[test]
    fn small_cases() {
        let (t, g) = k0_bruteforce(ZMod(4), 1).unwrap();
        assert_eq!(t.idempotents().iter().filter(|m| m.size == 1).count(), 2);
        assert!(g.is_free_of_rank(1));
        let (_, g0) = k0_bruteforce(ZMod(2), 0).unwrap();
        assert!(g0.is_free_of_rank(0));
        let (t2, _) = k0_bruteforce(ZMod(2), 2).unwrap();
        // 16 matrices, 8 idempotent: 0, I and six of rank one
        assert_eq!(t2.idempotents().iter().filter(|m| m.size == 2).count(), 8);
        let m = SmallMatrix { size: 2, entries: vec![1, 1, 0, 0] };
        let (u, v) = t2.witness(&m).unwrap();
        let rep = t2.representative(t2.class_of(&m).unwrap());
        assert_eq!(mul(2, &u, &v, rep.size, 2, rep.size), rep.entries);
    }

    #[test]
    fn budget_guard() {
        assert!(matches!(k0_bruteforce(ZMod(17), 1), Err(Error::BudgetExceeded(_))));
        assert!(matches!(k0_bruteforce(ZMod(2), 4), Err(Error::BudgetExceeded(_))));
        assert!(matches!(k0_bruteforce(ZMod(5), 3), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn z6_splits_into_two_ranks() {
        // ℤ/6 ≅ F₂ × F₃: projectives are pairs of ranks, K0 ≅ ℤ²
        let (t, g) = k0_bruteforce(ZMod(6), 2).unwrap();
        assert_eq!(t.class_count(), 9);
        assert!(g.is_free_of_rank(2));
    }
}
