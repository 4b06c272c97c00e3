use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::groups::{GroupElement, GroupSpec};
use crate::linalg::{smith, IntMatrix};

/// A basis label of a K0 presentation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// The class of a shift `⟨s⟩`.
    Degree(GroupElement),
    /// A coset `h ∈ G/N`.
    Coset(GroupElement),
    /// `(s, h) ⊗ [⟨1⟩]` in an induced module.
    Pair(GroupElement, GroupElement),
    /// A stable isomorphism class found by the brute-force oracle.
    Class(usize),
}

impl Label {
    pub fn to_json(&self) -> Value {
        match self {
            Label::Degree(g) => json!({ "degree": g.to_json() }),
            Label::Coset(h) => json!({ "coset": h.to_json() }),
            Label::Pair(s, h) => json!({ "pair": [s.to_json(), h.to_json()] }),
            Label::Class(i) => json!({ "class": i }),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Degree(g) => write!(f, "⟨{g}⟩"),
            Label::Coset(h) => write!(f, "[{h}]"),
            Label::Pair(s, h) => write!(f, "({s},{h})⊗"),
            Label::Class(i) => write!(f, "#{i}"),
        }
    }
}

/// A finite integer combination of labels with no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct K0Element {
    terms: BTreeMap<Label, i64>,
}

impl K0Element {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(label: Label) -> Self {
        Self::from_terms([(label, 1)])
    }

    pub fn from_terms<I: IntoIterator<Item = (Label, i64)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (l, c) in terms {
            out.add_term(l, c);
        }
        out
    }

    pub fn add_term(&mut self, label: Label, c: i64) {
        let e = self.terms.entry(label).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn coefficient(&self, label: &Label) -> i64 {
        self.terms.get(label).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Label, i64)> {
        self.terms.iter().map(|(l, c)| (l, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &K0Element) -> K0Element {
        let mut out = self.clone();
        for (l, c) in other.terms() {
            out.add_term(l.clone(), c);
        }
        out
    }

    pub fn scale(&self, k: i64) -> K0Element {
        Self::from_terms(self.terms().map(|(l, c)| (l.clone(), c * k)))
    }

    pub fn sub(&self, other: &K0Element) -> K0Element {
        self.add(&other.scale(-1))
    }

    /// Relabels every term; colliding labels are summed.
    pub fn map_labels<F: FnMut(&Label) -> Result<Label>>(&self, mut f: F) -> Result<K0Element> {
        let mut out = K0Element::zero();
        for (l, c) in self.terms() {
            out.add_term(f(l)?, c);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.terms().map(|(l, c)| json!([l.to_json(), c])).collect())
    }
}

impl fmt::Display for K0Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (l, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·{l}")?;
        }
        Ok(())
    }
}

/// `g · x` for labels that are degrees: `⟨s⟩ ↦ ⟨g s⟩`.
pub fn shift_action(group: &GroupSpec, g: &GroupElement, x: &K0Element) -> Result<K0Element> {
    x.map_labels(|l| match l {
        Label::Degree(s) => Ok(Label::Degree(group.compose(g, s)?)),
        other => Err(Error::LabelKind(format!("{other} is not a degree label"))),
    })
}

/// `ℤ^labels / (row span of the relations)`, reduced by Smith normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K0Group {
    labels: Vec<Label>,
    relations: Vec<Vec<i64>>,
    diag: Vec<i128>,
    rank: usize,
    /// Column transform of the Smith form; `x ↦ x V` diagonalises the quotient.
    v: IntMatrix,
}

impl K0Group {
    pub fn new(labels: Vec<Label>, relations: Vec<Vec<i64>>) -> Result<Self> {
        let n = labels.len();
        if relations.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch("relation length differs from the label count".into()));
        }
        let m: IntMatrix = relations.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
        let (diag, v) = if m.is_empty() {
            (Vec::new(), crate::linalg::identity(n))
        } else {
            let s = smith(&m, n);
            (s.diag, s.v)
        };
        let rank = n - diag.len();
        Ok(K0Group { labels, relations, diag, rank, v })
    }

    /// The free abelian group on `labels`.
    pub fn free(labels: Vec<Label>) -> Self {
        Self::new(labels, Vec::new()).expect("no relations")
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn relations(&self) -> &[Vec<i64>] {
        &self.relations
    }

    /// Free rank: label count minus the rank of the relations.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn snf_diagonal(&self) -> &[i128] {
        &self.diag
    }

    pub fn torsion(&self) -> Vec<i128> {
        self.diag.iter().copied().filter(|&d| d > 1).collect()
    }

    pub fn is_free_of_rank(&self, r: usize) -> bool {
        self.rank == r && self.torsion().is_empty()
    }

    /// Coordinates of `x` in `ℤ^rank ⊕ ⊕ ℤ/d`: torsion residues first (in
    /// `[0, d)`), then the free part.
    pub fn coordinates(&self, x: &K0Element) -> Result<Vec<i128>> {
        let n = self.labels.len();
        let mut vec = vec![0i128; n];
        for (l, c) in x.terms() {
            let i = self
                .labels
                .iter()
                .position(|m| m == l)
                .ok_or_else(|| Error::LabelKind(format!("{l} is not a basis label")))?;
            vec[i] = i128::from(c);
        }
        let y: Vec<i128> = (0..n).map(|j| (0..n).map(|k| vec[k] * self.v[k][j]).sum()).collect();
        let mut out = Vec::new();
        for (j, &d) in self.diag.iter().enumerate() {
            if d > 1 {
                out.push(y[j].rem_euclid(d));
            }
        }
        out.extend_from_slice(&y[self.diag.len()..]);
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "labels": self.labels.iter().map(Label::to_json).collect::<Vec<_>>(),
            "rank": self.rank,
            "snf_diagonal": self.diag.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "relations": self.relations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn deg(k: i64) -> Label {
        Label::Degree(GroupElement::free([k]))
    }

    #[test]
    fn shift_relabels_degrees() {
        let g = GroupSpec::free_abelian(1);
        let x = K0Element::from_terms([(deg(0), 1), (deg(1), 3)]);
        let y = shift_action(&g, &GroupElement::free([2]), &x).unwrap();
        assert_eq!(y, K0Element::from_terms([(deg(2), 1), (deg(3), 3)]));
        assert_eq!(shift_action(&g, &g.identity(), &x).unwrap(), x);
        assert!(shift_action(&g, &g.identity(), &K0Element::basis(Label::Class(0))).is_err());
    }

    #[test]
    fn smith_presentation() {
        // ℤ³ / (2e0, e1 - e2) ≅ ℤ ⊕ ℤ/2
        let g = K0Group::new(vec![deg(0), deg(1), deg(2)], vec![vec![2, 0, 0], vec![0, 1, -1]]).unwrap();
        assert_eq!(g.rank(), 1);
        assert_eq!(g.torsion(), vec![2]);
        let a = g.coordinates(&K0Element::basis(deg(1))).unwrap();
        let b = g.coordinates(&K0Element::basis(deg(2))).unwrap();
        assert_eq!(a, b);
        assert_eq!(g.coordinates(&K0Element::from_terms([(deg(0), 2)])).unwrap(), vec![0, 0]);
        assert!(K0Group::free(vec![]).is_free_of_rank(0));
    }

    proptest! {
        #[test]
        fn shift_is_an_action(a in -5i64..5, b in -5i64..5, c in proptest::collection::vec((-4i64..4, -3i64..3), 0..5)) {
            let g = GroupSpec::free_abelian(1);
            let x = K0Element::from_terms(c.into_iter().map(|(k, n)| (deg(k), n)));
            let ea = GroupElement::free([a]);
            let eb = GroupElement::free([b]);
            let lhs = shift_action(&g, &ea, &shift_action(&g, &eb, &x).unwrap()).unwrap();
            let rhs = shift_action(&g, &GroupElement::free([a + b]), &x).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn element_group_laws(c in proptest::collection::vec((-4i64..4, -3i64..3), 0..6), d in proptest::collection::vec((-4i64..4, -3i64..3), 0..6)) {
            let x = K0Element::from_terms(c.into_iter().map(|(k, n)| (deg(k), n)));
            let y = K0Element::from_terms(d.into_iter().map(|(k, n)| (deg(k), n)));
            prop_assert_eq!(x.add(&y), y.add(&x));
            prop_assert!(x.sub(&x).is_zero());
            prop_assert!(x.terms().all(|(_, c)| c != 0));
        }
    }
}
