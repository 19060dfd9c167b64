//! Truncated free algebra over an operad: the weight-graded coinvariant
//! pieces of `P(x̄;y) ⊗ A^⊗x̄`, with the quotient maps from their ambient
//! spaces and a section picking one representative per class.

use num::Zero;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{
    unit_vec, zero_vec, ActionMat, FinVectSpace, GroupGens, Label, LinearMap, Mat, Rat,
};
use crate::operad::OperadData;
use crate::seq::{orbits_of_len, Color, Perm, SeqOrbit};

use super::{orbit_label, tensor_perm, ColoredSpace, GradedSpace};

/// One orbit block of a graded piece: the ambient product space, the class
/// quotient, and a section of it.
#[derive(Debug, Clone)]
pub struct FreeBlock {
    pub orbit: SeqOrbit,
    pub output: Color,
    /// `P(x̄;y) ⊗ A^⊗x̄` at the sorted representative.
    pub ambient: FinVectSpace,
    /// Quotient onto the classes of the stabilizer action.
    pub proj: LinearMap,
    /// One ambient preimage per class, `proj ∘ sect = id`.
    pub sect: Mat,
    /// Offset of this block inside the graded piece `(|x̄|, y)`.
    pub offset: usize,
}

impl FreeBlock {
    pub fn class_dim(&self) -> usize {
        self.proj.codomain.dim()
    }
}

/// The free algebra on a colored space, truncated at a weight cap.
#[derive(Debug, Clone)]
pub struct FreeAlgebra {
    pub algebra: ColoredSpace,
    pub cap: usize,
    pub grading: GradedSpace,
    pub blocks: BTreeMap<(SeqOrbit, Color), FreeBlock>,
}

impl FreeAlgebra {
    pub fn block(&self, orbit: &SeqOrbit, output: Color) -> Option<&FreeBlock> {
        self.blocks.get(&(orbit.clone(), output))
    }

    /// Block containing class `idx` of the graded piece `(w, y)`, along with
    /// the index local to the block.
    pub fn locate(&self, w: usize, y: Color, idx: usize) -> Option<(&FreeBlock, usize)> {
        self.blocks
            .iter()
            .filter(|((o, c), _)| o.len() == w && *c == y)
            .find_map(|(_, b)| {
                (b.offset..b.offset + b.class_dim())
                    .contains(&idx)
                    .then_some((b, idx - b.offset))
            })
    }

    /// Class of an ambient vector of a block, placed in piece coordinates.
    pub fn class_of(&self, orbit: &SeqOrbit, output: Color, v: &[Rat]) -> Result<Vec<Rat>> {
        let block = self.block(orbit, output).ok_or_else(|| {
            Error::MissingComponent(format!("free-algebra block at {:?}", orbit.rep()))
        })?;
        let piece_dim = self.grading.dim(orbit.len(), output);
        let mut out = zero_vec(piece_dim);
        for (i, x) in block.proj.apply(v).into_iter().enumerate() {
            out[block.offset + i] = x;
        }
        Ok(out)
    }
}

/// Builds the truncated free algebra on `a`. Weights run up to
/// `cap.min(op.cap)`; pieces with no operations are absent.
pub fn free_algebra(op: &OperadData, a: &ColoredSpace, cap: usize) -> Result<FreeAlgebra> {
    if a.num_colors() != op.palette.len() {
        return Err(Error::bad_input(
            "algebra space must have one component per operad color",
        ));
    }
    let cap = cap.min(op.cap);
    let mut grading = GradedSpace::empty(op.palette.len());
    let mut blocks = BTreeMap::new();
    for w in 1..=cap {
        for y in 0..op.palette.len() {
            let mut piece_labels: Vec<Label> = Vec::new();
            let mut offset = 0;
            let mut piece_blocks: Vec<((SeqOrbit, Color), FreeBlock)> = Vec::new();
            for orbit in orbits_of_len(op.palette.len(), w) {
                let Some(comp) = op.component(&orbit, y) else {
                    continue;
                };
                let a_dims: Vec<usize> = orbit.rep().iter().map(|&c| a.dim(c)).collect();
                let a_tensor = a.tensor_seq(orbit.rep());
                let ambient = FinVectSpace::tensor_many(&[&comp.space, &a_tensor]);
                if ambient.dim() == 0 {
                    continue;
                }
                let gens: Vec<ActionMat> = orbit
                    .young_gen_positions()
                    .iter()
                    .enumerate()
                    .map(|(gi, &t)| {
                        let swap = tensor_perm(&a_dims, &Perm::adjacent(w, t));
                        comp.gens()[gi].tensor(&ActionMat::Perm(swap.images().to_vec()))
                    })
                    .collect();
                let (_, proj) = GroupGens::new(ambient.clone(), gens).coinvariants()?;
                let classes = proj.codomain.dim();
                if classes == 0 {
                    continue;
                }
                let sect = section_of(&proj.mat)?;
                for j in 0..classes {
                    piece_labels.push(Label::Tuple(vec![
                        orbit_label(&orbit),
                        proj.codomain.label(j).clone(),
                    ]));
                }
                piece_blocks.push((
                    (orbit.clone(), y),
                    FreeBlock {
                        orbit,
                        output: y,
                        ambient,
                        proj,
                        sect,
                        offset,
                    },
                ));
                offset += classes;
            }
            if !piece_labels.is_empty() {
                grading
                    .pieces
                    .insert((w, y), FinVectSpace::new(piece_labels)?);
                blocks.extend(piece_blocks);
            }
        }
    }
    Ok(FreeAlgebra {
        algebra: a.clone(),
        cap,
        grading,
        blocks,
    })
}

/// Right inverse of a surjective matrix: column `k` solves `m x = e_k`.
pub(crate) fn section_of(m: &Mat) -> Result<Mat> {
    let mut cols = Vec::with_capacity(m.rows());
    for k in 0..m.rows() {
        let x = m
            .solve(&unit_vec(m.rows(), k))
            .ok_or_else(|| Error::bad_input("quotient map is not surjective"))?;
        cols.push(x);
    }
    Ok(Mat::from_cols(m.cols(), cols))
}

/// Functorial action on coefficients: per-color maps induce a weight-graded
/// map between free algebras over the same operad.
pub fn free_map(
    dom: &FreeAlgebra,
    cod: &FreeAlgebra,
    f: &[Mat],
) -> Result<super::GradedMap> {
    if f.len() != dom.algebra.num_colors() {
        return Err(Error::bad_input("one matrix per color expected"));
    }
    let mut out = super::GradedMap::zero(dom.grading.clone(), cod.grading.clone());
    for (&(w, y), piece) in &dom.grading.pieces {
        let cod_dim = cod.grading.dim(w, y);
        if cod_dim == 0 {
            continue;
        }
        let mut m = Mat::zero(cod_dim, piece.dim());
        for ((orbit, output), dblock) in &dom.blocks {
            if orbit.len() != w || *output != y {
                continue;
            }
            let Some(cblock) = cod.block(orbit, y) else {
                continue;
            };
            let ft = super::tensor_over_seq(f, orbit.rep());
            let op_dim = dblock.ambient.dim() / ft.cols().max(1);
            let induced = cblock
                .proj
                .mat
                .matmul(&Mat::identity(op_dim).kron(&ft))
                .matmul(&dblock.sect);
            for i in 0..induced.rows() {
                for j in 0..induced.cols() {
                    let v = induced.get(i, j);
                    if !v.is_zero() {
                        m.set(cblock.offset + i, dblock.offset + j, v.clone());
                    }
                }
            }
        }
        out.set_block(w, y, m)?;
    }
    Ok(out)
}
