use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Structured basis label: an atom, a number, or a tuple of labels. Tensor
/// products, hom spaces, and induced representations build tuple labels from
/// the labels of their constituents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Num(usize),
    Atom(String),
    Tuple(Vec<Label>),
}

impl Label {
    pub fn atom(s: impl Into<String>) -> Self {
        Label::Atom(s.into())
    }

    pub fn pair(a: Label, b: Label) -> Self {
        Label::Tuple(vec![a, b])
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Num(n) => write!(f, "{n}"),
            Label::Atom(s) => write!(f, "{s}"),
            Label::Tuple(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Finite-dimensional rational vector space with an ordered, duplicate-free
/// basis. The labels are documentation for coordinates; all arithmetic is
/// positional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinVectSpace {
    labels: Vec<Label>,
}

impl FinVectSpace {
    pub fn new(labels: Vec<Label>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(Error::bad_input(format!("duplicate basis label {l}")));
            }
        }
        Ok(FinVectSpace { labels })
    }

    /// Space with basis labels `0..dim`.
    pub fn numbered(dim: usize) -> Self {
        FinVectSpace {
            labels: (0..dim).map(Label::Num).collect(),
        }
    }

    pub fn atoms<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        FinVectSpace::new(names.into_iter().map(|s| Label::Atom(s.into())).collect())
    }

    pub fn zero() -> Self {
        FinVectSpace { labels: vec![] }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    /// Tensor product basis in row-major order: the index of
    /// `(i_1, …, i_k)` is `i_1` major through `i_k` minor.
    pub fn tensor_many(factors: &[&FinVectSpace]) -> FinVectSpace {
        let mut labels = vec![Label::Tuple(vec![])];
        for f in factors {
            let mut next = Vec::with_capacity(labels.len() * f.dim());
            for l in &labels {
                for fl in &f.labels {
                    let Label::Tuple(items) = l else { unreachable!() };
                    let mut items = items.clone();
                    items.push(fl.clone());
                    next.push(Label::Tuple(items));
                }
            }
            labels = next;
        }
        FinVectSpace { labels }
    }

    pub fn tensor(&self, other: &FinVectSpace) -> FinVectSpace {
        let mut labels = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.labels {
            for b in &other.labels {
                labels.push(Label::pair(a.clone(), b.clone()));
            }
        }
        FinVectSpace { labels }
    }

    /// Hom-space basis of matrix units, ordered domain-major: the unit
    /// `E(dom j → cod i)` has index `j * cod.dim() + i`.
    pub fn hom(domain: &FinVectSpace, codomain: &FinVectSpace) -> FinVectSpace {
        let mut labels = Vec::with_capacity(domain.dim() * codomain.dim());
        for a in &domain.labels {
            for b in &codomain.labels {
                labels.push(Label::pair(a.clone(), b.clone()));
            }
        }
        FinVectSpace { labels }
    }

    pub fn direct_sum(&self, other: &FinVectSpace) -> FinVectSpace {
        let mut labels: Vec<Label> = self
            .labels
            .iter()
            .map(|l| Label::pair(Label::Num(0), l.clone()))
            .collect();
        labels.extend(
            other
                .labels
                .iter()
                .map(|l| Label::pair(Label::Num(1), l.clone())),
        );
        FinVectSpace { labels }
    }
}
