//! The functor calculus on colored vector spaces: free algebras, cowedges
//! (invariant hom pieces), the symmetric-envelope components, the chain
//! spaces they assemble into, and the comparison maps between them.

mod chains;
mod free;
mod identities;
mod maps;
mod prop;
#[cfg(test)]
mod tests;

pub use chains::{ChainBlock, ChainPiece, ChainSpace, GradedTensor};
pub use free::{free_algebra, free_map, FreeAlgebra, FreeBlock};
pub use identities::{
    check_algebra, check_coalgebra, verify_identities, AlgebraData, CoalgebraData, IdentityItem,
    IdentityReport,
};
pub(crate) use identities::composable_pairs;
pub use maps::{alpha, chain_counit, chain_map, diagonal};
pub use prop::{gamma_hat, prop_component, PropComponent, PropElem, PropType};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{zero_vec, FinVectSpace, Label, Mat};
use crate::seq::{Color, Perm, SeqOrbit};
use crate::util::flat_index;

/// One finite-dimensional space per color of a palette.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredSpace {
    spaces: Vec<FinVectSpace>,
}

impl ColoredSpace {
    pub fn new(spaces: Vec<FinVectSpace>) -> Self {
        ColoredSpace { spaces }
    }

    /// Numbered bases of the given dimensions, one per color.
    pub fn standard(dims: &[usize]) -> Self {
        ColoredSpace {
            spaces: dims.iter().map(|&d| FinVectSpace::numbered(d)).collect(),
        }
    }

    pub fn num_colors(&self) -> usize {
        self.spaces.len()
    }

    pub fn space(&self, c: Color) -> &FinVectSpace {
        &self.spaces[c]
    }

    pub fn dim(&self, c: Color) -> usize {
        self.spaces[c].dim()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(FinVectSpace::dim).collect()
    }

    /// Tensor product over a color sequence, in sequence order.
    pub fn tensor_seq(&self, seq: &[Color]) -> FinVectSpace {
        let factors: Vec<&FinVectSpace> = seq.iter().map(|&c| &self.spaces[c]).collect();
        FinVectSpace::tensor_many(&factors)
    }
}

/// Weight-graded colored space. A missing key is the zero space; weights
/// beyond the working cap are simply absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSpace {
    pub num_colors: usize,
    pub pieces: BTreeMap<(usize, Color), FinVectSpace>,
}

impl GradedSpace {
    pub fn empty(num_colors: usize) -> Self {
        GradedSpace {
            num_colors,
            pieces: BTreeMap::new(),
        }
    }

    /// A plain colored space concentrated in weight one.
    pub fn concentrated(c: &ColoredSpace) -> Self {
        let mut pieces = BTreeMap::new();
        for color in 0..c.num_colors() {
            if c.dim(color) > 0 {
                pieces.insert((1, color), c.space(color).clone());
            }
        }
        GradedSpace {
            num_colors: c.num_colors(),
            pieces,
        }
    }

    pub fn piece(&self, w: usize, c: Color) -> Option<&FinVectSpace> {
        self.pieces.get(&(w, c))
    }

    pub fn dim(&self, w: usize, c: Color) -> usize {
        self.piece(w, c).map_or(0, FinVectSpace::dim)
    }

    pub fn total_dim(&self) -> usize {
        self.pieces.values().map(FinVectSpace::dim).sum()
    }

    pub fn max_weight(&self) -> usize {
        self.pieces.keys().map(|&(w, _)| w).max().unwrap_or(0)
    }

    /// Dimension of every nonzero piece, sorted by (weight, color).
    pub fn dim_table(&self) -> Vec<(usize, Color, usize)> {
        self.pieces
            .iter()
            .map(|(&(w, c), s)| (w, c, s.dim()))
            .collect()
    }

    /// Total dimension per weight.
    /// Total dimension at each weight `1..=cap`, summed over colors.
    pub fn weight_dims(&self, cap: usize) -> Vec<usize> {
        let mut out = vec![0; cap];
        for (&(w, _), s) in &self.pieces {
            if (1..=cap).contains(&w) {
                out[w - 1] += s.dim();
            }
        }
        out
    }
}

/// Weight-preserving map between graded spaces, block by block. A missing
/// block is the zero map.
#[derive(Debug, Clone)]
pub struct GradedMap {
    pub domain: GradedSpace,
    pub codomain: GradedSpace,
    pub blocks: BTreeMap<(usize, Color), Mat>,
}

impl GradedMap {
    pub fn zero(domain: GradedSpace, codomain: GradedSpace) -> Self {
        GradedMap {
            domain,
            codomain,
            blocks: BTreeMap::new(),
        }
    }

    pub fn identity(space: &GradedSpace) -> Self {
        let blocks = space
            .pieces
            .iter()
            .map(|(&k, s)| (k, Mat::identity(s.dim())))
            .collect();
        GradedMap {
            domain: space.clone(),
            codomain: space.clone(),
            blocks,
        }
    }

    /// A colored map placed in weight one.
    pub fn concentrated(domain: &ColoredSpace, codomain: &ColoredSpace, mats: Vec<Mat>) -> Self {
        let mut blocks = BTreeMap::new();
        for (c, m) in mats.into_iter().enumerate() {
            if m.rows() > 0 && m.cols() > 0 && !m.is_zero() {
                blocks.insert((1, c), m);
            }
        }
        GradedMap {
            domain: GradedSpace::concentrated(domain),
            codomain: GradedSpace::concentrated(codomain),
            blocks,
        }
    }

    pub fn block(&self, w: usize, c: Color) -> Option<&Mat> {
        self.blocks.get(&(w, c))
    }

    pub fn set_block(&mut self, w: usize, c: Color, m: Mat) -> Result<()> {
        if m.cols() != self.domain.dim(w, c) || m.rows() != self.codomain.dim(w, c) {
            return Err(Error::ShapeMismatch {
                ctx: "graded map block",
                expected: format!("{}x{}", self.codomain.dim(w, c), self.domain.dim(w, c)),
                got: format!("{}x{}", m.rows(), m.cols()),
            });
        }
        if !m.is_zero() {
            self.blocks.insert((w, c), m);
        }
        Ok(())
    }

    /// Applies the block at `(w, c)` to a piece coordinate vector.
    pub fn apply_piece(&self, w: usize, c: Color, v: &[Rat]) -> Vec<Rat> {
        match self.block(w, c) {
            Some(m) => m.apply(v),
            None => zero_vec(self.codomain.dim(w, c)),
        }
    }

    pub fn compose(&self, other: &GradedMap) -> GradedMap {
        // self ∘ other
        let mut blocks = BTreeMap::new();
        for (&k, m) in &other.blocks {
            if let Some(n) = self.blocks.get(&k) {
                let prod = n.matmul(m);
                if !prod.is_zero() {
                    blocks.insert(k, prod);
                }
            }
        }
        GradedMap {
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
            blocks,
        }
    }

    pub fn equals(&self, other: &GradedMap) -> bool {
        let keys: std::collections::BTreeSet<_> = self
            .blocks
            .keys()
            .chain(other.blocks.keys())
            .copied()
            .collect();
        keys.into_iter().all(|k| {
            let rows = self.codomain.dim(k.0, k.1);
            let cols = self.domain.dim(k.0, k.1);
            let a = self.blocks.get(&k).cloned().unwrap_or(Mat::zero(rows, cols));
            let b = other
                .blocks
                .get(&k)
                .cloned()
                .unwrap_or(Mat::zero(rows, cols));
            a == b
        })
    }

    /// Every block is injective.
    pub fn is_injective(&self) -> bool {
        self.domain.pieces.iter().all(|(&(w, c), s)| {
            if s.dim() == 0 {
                return true;
            }
            match self.block(w, c) {
                Some(m) => m.rank() == s.dim(),
                None => false,
            }
        })
    }
}

use crate::linalg::Rat;

/// Permutation of a tensor-product basis induced by moving factor `i` to
/// position `delta(i)`: source factors have dimensions `dims`, and the target
/// slot `delta(i)` has the dimension of source slot `i`.
pub fn tensor_perm(dims: &[usize], delta: &Perm) -> Perm {
    let n = dims.len();
    let total: usize = dims.iter().product();
    let mut tgt_dims = vec![0usize; n];
    for i in 0..n {
        tgt_dims[delta.apply(i)] = dims[i];
    }
    let mut images = vec![0usize; total];
    for (src, k) in crate::util::Odometer::new(dims).enumerate() {
        let mut tk = vec![0usize; n];
        for i in 0..n {
            tk[delta.apply(i)] = k[i];
        }
        images[src] = flat_index(&tk, &tgt_dims);
    }
    Perm::from_images(images)
}

/// Label identifying a sequence orbit by its sorted color word.
pub(crate) fn orbit_label(o: &SeqOrbit) -> Label {
    Label::Tuple(o.rep().iter().map(|&c| Label::Num(c)).collect())
}

/// Kronecker product of per-color matrices over a color sequence; the empty
/// sequence gives the 1×1 identity.
pub(crate) fn tensor_over_seq(f: &[Mat], seq: &[Color]) -> Mat {
    let mut acc: Option<Mat> = None;
    for &c in seq {
        acc = Some(match acc {
            None => f[c].clone(),
            Some(a) => a.kron(&f[c]),
        });
    }
    acc.unwrap_or_else(|| Mat::identity(1))
}
