use crate::error::{Error, Result};

/// Groups up to this order get exhaustive axiom checks.
pub(crate) const EXHAUSTIVE_LIMIT: usize = 64;

/// A finite group given by its multiplication table on indices `0..order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTable {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteTable {
    /// Validates the table; associativity is checked exhaustively up to
    /// order 64 and skipped above (use `GroupSpec::check_axioms` to sample).
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let m = table.len();
        if m == 0 || table.iter().any(|row| row.len() != m || row.iter().any(|&x| x >= m)) {
            return Err(Error::InvalidSpec("multiplication table must be square over 0..order".into()));
        }
        let identity = (0..m)
            .find(|&e| (0..m).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::InvalidSpec("table has no identity".into()))?;
        let inverses = (0..m)
            .map(|a| {
                (0..m)
                    .find(|&b| table[a][b] == identity && table[b][a] == identity)
                    .ok_or_else(|| Error::InvalidSpec(format!("element {a} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        if m <= EXHAUSTIVE_LIMIT {
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        if table[table[a][b]][c] != table[a][table[b][c]] {
                            return Err(Error::InvalidSpec(format!("not associative at ({a},{b},{c})")));
                        }
                    }
                }
            }
        }
        Ok(FiniteTable { table, identity, inverses })
    }

    pub fn cyclic(order: usize) -> Self {
        let table = (0..order)
            .map(|i| (0..order).map(|j| (i + j) % order).collect())
            .collect();
        FiniteTable::new(table).expect("cyclic table is a group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_groups() {
        assert!(FiniteTable::new(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteTable::new(vec![vec![0, 1]]).is_err());
        // a quasigroup with identity that is not associative
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(FiniteTable::new(loop5).is_err());
    }

    #[test]
    fn klein_four_group() {
        let v4 = FiniteTable::new(vec![
            vec![0, 1, 2, 3],
            vec![1, 0, 3, 2],
            vec![2, 3, 0, 1],
            vec![3, 2, 1, 0],
        ])
        .unwrap();
        assert_eq!(v4.identity(), 0);
        assert!((0..4).all(|a| v4.inverse(a) == a));
    }
}
