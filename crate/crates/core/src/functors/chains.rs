//! Iterated cowedge spaces: graded pieces assembled from invariant hom
//! blocks, one block per descending chain of sequence orbits. A length-n
//! chain contributes the stabilizer-invariant maps from the head component
//! tensored with the intermediate decomposition components into a graded
//! tensor power of the coefficients.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{ActionMat, FinVectSpace, GroupGens, Label, Mat, Rat, Subspace};
use crate::operad::OperadData;
use crate::seq::{orbits_of_len, Color, SeqOrbit};
use crate::util::{compositions, flat_index, Odometer};

use super::prop::{prop_component, PropComponent};
use super::{orbit_label, GradedSpace};

/// Weighted tensor power of a graded space over a color sequence: the direct
/// sum over weight vectors summing to a total of the per-position pieces.
#[derive(Debug, Clone)]
pub struct GradedTensor {
    pub seq: Vec<Color>,
    pub total: usize,
    pub space: FinVectSpace,
    pub summands: Vec<TensorSummand>,
}

#[derive(Debug, Clone)]
pub struct TensorSummand {
    pub weights: Vec<usize>,
    pub dims: Vec<usize>,
    pub offset: usize,
}

impl GradedTensor {
    pub fn new(d: &GradedSpace, seq: &[Color], total: usize) -> GradedTensor {
        let mut summands = Vec::new();
        let mut labels = Vec::new();
        let mut offset = 0;
        for weights in compositions(total, seq.len(), 1) {
            let pieces: Option<Vec<&FinVectSpace>> = weights
                .iter()
                .zip(seq)
                .map(|(&w, &c)| d.piece(w, c))
                .collect();
            let Some(pieces) = pieces else { continue };
            let dims: Vec<usize> = pieces.iter().map(|p| p.dim()).collect();
            let block = FinVectSpace::tensor_many(&pieces);
            let wlabel = Label::Tuple(weights.iter().map(|&w| Label::Num(w)).collect());
            for l in block.labels() {
                labels.push(Label::Tuple(vec![wlabel.clone(), l.clone()]));
            }
            summands.push(TensorSummand {
                weights,
                dims,
                offset,
            });
            offset += block.dim();
        }
        GradedTensor {
            seq: seq.to_vec(),
            total,
            space: FinVectSpace::new(labels).expect("distinct weight prefixes"),
            summands,
        }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Summand index and per-position factor indices of a basis element.
    pub fn locate(&self, idx: usize) -> (usize, Vec<usize>) {
        let s = self
            .summands
            .iter()
            .rposition(|s| s.offset <= idx)
            .expect("index in range");
        (s, crate::util::unflatten(idx - self.summands[s].offset, &self.summands[s].dims))
    }

    pub fn index_of(&self, summand: usize, k: &[usize]) -> usize {
        self.summands[summand].offset + flat_index(k, &self.summands[summand].dims)
    }

    pub fn summand_with_weights(&self, weights: &[usize]) -> Option<usize> {
        self.summands.iter().position(|s| s.weights == weights)
    }

    /// Action of the adjacent transposition `(t, t+1)` of positions. Both the
    /// factors and their weights move, so summands map onto each other.
    pub fn transposition_action(&self, t: usize) -> ActionMat {
        let mut images = vec![0usize; self.dim()];
        for (_, s) in self.summands.iter().enumerate() {
            let mut w = s.weights.clone();
            w.swap(t, t + 1);
            let tgt_idx = self.summand_with_weights(&w).expect("closed under swaps");
            let tgt = &self.summands[tgt_idx];
            for (local, k) in Odometer::new(&s.dims).enumerate() {
                let mut kk = k.clone();
                kk.swap(t, t + 1);
                images[s.offset + local] = tgt.offset + flat_index(&kk, &tgt.dims);
            }
        }
        ActionMat::Perm(images)
    }
}

/// One chain's block inside a graded piece.
#[derive(Debug, Clone)]
pub struct ChainBlock {
    pub chain: Vec<SeqOrbit>,
    /// Decomposition components between consecutive chain entries,
    /// `props[i] = component(chain[i+1]; chain[i])`.
    pub props: Vec<PropComponent>,
    /// Head operation space `P(chain[0]; y)` with its stabilizer action.
    pub head: FinVectSpace,
    pub head_gens: Vec<ActionMat>,
    pub target: GradedTensor,
    pub dom: FinVectSpace,
    pub dom_dims: Vec<usize>,
    pub inv: Subspace,
    pub offset: usize,
}

impl ChainBlock {
    pub fn dim(&self) -> usize {
        self.inv.dim()
    }

    /// Invariant basis element `j` as a matrix `target × dom`.
    pub fn basis_mat(&self, j: usize) -> Mat {
        hom_to_mat(&self.inv.basis_vector(j), self.dom.dim(), self.target.dim())
    }
}

/// Hom-space vector of `FinVectSpace::hom(dom, cod)` as a `cod × dom` matrix.
pub(crate) fn hom_to_mat(v: &[Rat], dom: usize, cod: usize) -> Mat {
    let mut m = Mat::zero(cod, dom);
    for j in 0..dom {
        for i in 0..cod {
            m.set(i, j, v[j * cod + i].clone());
        }
    }
    m
}

pub(crate) fn mat_to_hom(m: &Mat) -> Vec<Rat> {
    let mut v = Vec::with_capacity(m.rows() * m.cols());
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            v.push(m.get(i, j).clone());
        }
    }
    v
}

/// A graded piece: blocks in a fixed order with offsets into one space.
#[derive(Debug, Clone)]
pub struct ChainPiece {
    pub blocks: Vec<ChainBlock>,
    pub space: FinVectSpace,
}

impl ChainPiece {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Block index and offset-corrected local index.
    pub fn locate(&self, idx: usize) -> (usize, usize) {
        let b = self
            .blocks
            .iter()
            .rposition(|b| b.offset <= idx)
            .expect("index in range");
        (b, idx - self.blocks[b].offset)
    }

    pub fn block_with_chain(&self, chain: &[SeqOrbit]) -> Option<&ChainBlock> {
        self.blocks.iter().find(|b| b.chain == chain)
    }
}

/// The n-th iterated cowedge of an operad with coefficients in a graded
/// space, truncated at a weight cap.
#[derive(Debug, Clone)]
pub struct ChainSpace {
    pub n: usize,
    pub cap: usize,
    pub coeffs: GradedSpace,
    pub pieces: BTreeMap<(usize, Color), ChainPiece>,
    pub grading: GradedSpace,
}

impl ChainSpace {
    pub fn build(op: &OperadData, coeffs: &GradedSpace, n: usize, cap: usize) -> Result<ChainSpace> {
        if n == 0 {
            return Err(Error::bad_input("chain length must be at least 1"));
        }
        if coeffs.num_colors != op.palette.len() {
            return Err(Error::bad_input(
                "coefficients must be graded over the operad's colors",
            ));
        }
        let mut prop_cache: BTreeMap<(SeqOrbit, SeqOrbit), PropComponent> = BTreeMap::new();
        let mut pieces = BTreeMap::new();
        let mut grading = GradedSpace::empty(op.palette.len());
        for w in 1..=cap {
            for y in 0..op.palette.len() {
                let mut blocks: Vec<ChainBlock> = Vec::new();
                let mut labels: Vec<Label> = Vec::new();
                let mut offset = 0;
                for chain in chains_for(op, coeffs, n, w, y, &mut prop_cache)? {
                    let block = build_block(op, coeffs, &chain, w, y, &prop_cache, offset)?;
                    if block.dim() == 0 {
                        continue;
                    }
                    let chain_label =
                        Label::Tuple(chain.iter().map(orbit_label).collect());
                    for j in 0..block.dim() {
                        labels.push(Label::Tuple(vec![chain_label.clone(), Label::Num(j)]));
                    }
                    offset += block.dim();
                    blocks.push(block);
                }
                if !blocks.is_empty() {
                    let space = FinVectSpace::new(labels)?;
                    grading.pieces.insert((w, y), space.clone());
                    pieces.insert((w, y), ChainPiece { blocks, space });
                }
            }
        }
        Ok(ChainSpace {
            n,
            cap,
            coeffs: coeffs.clone(),
            pieces,
            grading,
        })
    }

    pub fn piece(&self, w: usize, y: Color) -> Option<&ChainPiece> {
        self.pieces.get(&(w, y))
    }

    pub fn dim(&self, w: usize, y: Color) -> usize {
        self.pieces.get(&(w, y)).map_or(0, |p| p.dim())
    }
}

/// All chains `x̄₁ ≥ … ≥ x̄ₙ` (by length) that can carry a nonzero block:
/// every consecutive decomposition component is populated, the head
/// component exists, and the innermost tensor is nonempty.
fn chains_for(
    op: &OperadData,
    coeffs: &GradedSpace,
    n: usize,
    w: usize,
    y: Color,
    cache: &mut BTreeMap<(SeqOrbit, SeqOrbit), PropComponent>,
) -> Result<Vec<Vec<SeqOrbit>>> {
    let mut innermost = Vec::new();
    for len in 1..=w {
        for orbit in orbits_of_len(op.palette.len(), len) {
            if GradedTensor::new(coeffs, orbit.rep(), w).dim() > 0 {
                innermost.push(orbit);
            }
        }
    }
    let mut chains: Vec<Vec<SeqOrbit>> = innermost.into_iter().map(|o| vec![o]).collect();
    for _ in 1..n {
        let mut next = Vec::new();
        for chain in chains {
            let inner = chain[0].clone();
            for len in 1..=inner.len() {
                for outer in orbits_of_len(op.palette.len(), len) {
                    let key = (inner.clone(), outer.clone());
                    if !cache.contains_key(&key) {
                        let pc = prop_component(op, &inner, &outer)?;
                        cache.insert(key.clone(), pc);
                    }
                    if cache[&key].dim() == 0 {
                        continue;
                    }
                    let mut longer = Vec::with_capacity(chain.len() + 1);
                    longer.push(outer);
                    longer.extend(chain.iter().cloned());
                    next.push(longer);
                }
            }
        }
        chains = next;
    }
    Ok(chains
        .into_iter()
        .filter(|c| op.component(&c[0], y).is_some())
        .collect())
}

fn build_block(
    op: &OperadData,
    coeffs: &GradedSpace,
    chain: &[SeqOrbit],
    w: usize,
    y: Color,
    cache: &BTreeMap<(SeqOrbit, SeqOrbit), PropComponent>,
    offset: usize,
) -> Result<ChainBlock> {
    let n = chain.len();
    let head_comp = op
        .component(&chain[0], y)
        .ok_or_else(|| Error::MissingComponent(format!("{:?} -> {y}", chain[0].rep())))?;
    let head = head_comp.space.clone();
    let head_gens = head_comp.gens().to_vec();
    let props: Vec<PropComponent> = (0..n - 1)
        .map(|i| cache[&(chain[i + 1].clone(), chain[i].clone())].clone())
        .collect();
    let target = GradedTensor::new(coeffs, chain[n - 1].rep(), w);

    let mut factors: Vec<&FinVectSpace> = vec![&head];
    factors.extend(props.iter().map(|p| &p.space));
    let dom = FinVectSpace::tensor_many(&factors);
    let dom_dims: Vec<usize> = factors.iter().map(|f| f.dim()).collect();

    let hom_space = FinVectSpace::hom(&dom, &target.space);
    let mut hom_gens = Vec::new();
    for i in 0..n {
        for (gi, &t) in chain[i].young_gen_positions().iter().enumerate() {
            let mut facs: Vec<ActionMat> = dom_dims
                .iter()
                .map(|&d| ActionMat::identity_perm(d))
                .collect();
            if i == 0 {
                facs[0] = head_gens[gi].clone();
            } else {
                facs[i] = props[i - 1].ambient_gens[gi].clone();
            }
            if i + 1 < n {
                facs[i + 1] = props[i].slot_gens[gi].clone();
            }
            let dom_g = tensor_fold(&facs);
            let cod_g = if i + 1 == n {
                target.transposition_action(t)
            } else {
                ActionMat::identity_perm(target.dim())
            };
            hom_gens.push(ActionMat::hom_conj(&dom_g, &cod_g));
        }
    }
    let inv = GroupGens::new(hom_space, hom_gens).invariants()?;

    Ok(ChainBlock {
        chain: chain.to_vec(),
        props,
        head,
        head_gens,
        target,
        dom,
        dom_dims,
        inv,
        offset,
    })
}

pub(crate) fn tensor_fold(facs: &[ActionMat]) -> ActionMat {
    let mut it = facs.iter();
    let first = it.next().expect("at least one factor").clone();
    it.fold(first, |acc, f| acc.tensor(f))
}
