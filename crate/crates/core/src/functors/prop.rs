//! Multi-output components assembled from the operad: ordered block
//! decompositions of an ambient sequence with one operation per slot. The
//! space carries commuting actions of the ambient stabilizer (relabelling
//! positions) and the slot stabilizer (exchanging equal-colored slots), and
//! composes against an outer operation through `gamma_hat`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{ActionMat, FinVectSpace, Label, Mat};
use crate::operad::{OpVector, OperadData};
use crate::seq::{block_decompositions, induce, InduceSlot, InducedRep, Perm, SeqOrbit};

/// One summand: a tuple of block orbits together with the induced ambient
/// representation on all placements of those blocks.
#[derive(Debug, Clone)]
pub struct PropType {
    pub orbits: Vec<SeqOrbit>,
    pub rep: InducedRep,
}

/// The component at (ambient sequence `ū`; slot sequence `x̄`), both taken at
/// sorted representatives.
#[derive(Debug, Clone)]
pub struct PropComponent {
    pub ambient: SeqOrbit,
    pub slots: SeqOrbit,
    pub types: Vec<PropType>,
    /// Starting index of each type inside `space`.
    pub offsets: Vec<usize>,
    pub space: FinVectSpace,
    /// Ambient stabilizer action, aligned with `ambient.young_gen_positions()`.
    pub ambient_gens: Vec<ActionMat>,
    /// Slot stabilizer action, aligned with `slots.young_gen_positions()`.
    pub slot_gens: Vec<ActionMat>,
}

/// A decoded basis element of a `PropComponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropElem {
    pub type_idx: usize,
    pub partition: usize,
    /// Operation basis index in each slot.
    pub k: Vec<usize>,
}

impl PropComponent {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn decode(&self, idx: usize) -> PropElem {
        let ty = match self.offsets.binary_search(&idx) {
            Ok(t) => t,
            Err(t) => t - 1,
        };
        let (partition, k) = self.types[ty].rep.decode(idx - self.offsets[ty]);
        PropElem {
            type_idx: ty,
            partition,
            k,
        }
    }

    pub fn index_of(&self, ty: usize, partition: usize, k: &[usize]) -> usize {
        self.offsets[ty] + self.types[ty].rep.basis_index(partition, k)
    }

    /// Type whose block-orbit tuple matches, if present.
    pub fn type_with_orbits(&self, orbits: &[SeqOrbit]) -> Option<usize> {
        self.types.iter().position(|t| t.orbits == orbits)
    }
}

/// Builds the component at (`ambient`; `slots`). Types with an empty
/// operation space in some slot are dropped.
pub fn prop_component(
    op: &OperadData,
    ambient: &SeqOrbit,
    slots: &SeqOrbit,
) -> Result<PropComponent> {
    let m = slots.len();
    if m == 0 || ambient.len() < m {
        return Err(Error::bad_input("slot sequence must fit inside ambient"));
    }
    let mut types = Vec::new();
    for dec in block_decompositions(ambient, m) {
        let populated = dec
            .blocks
            .iter()
            .zip(slots.rep())
            .all(|(o, &c)| op.dim(o, c) > 0);
        if !populated {
            continue;
        }
        let islots: Vec<InduceSlot> = dec
            .blocks
            .iter()
            .zip(slots.rep())
            .map(|(o, &c)| {
                let comp = op.component(o, c).expect("populated slot");
                InduceSlot {
                    orbit: o.clone(),
                    space: comp.space.clone(),
                    gens: comp.gens().to_vec(),
                }
            })
            .collect();
        let rep = induce(ambient, &islots)?;
        types.push(PropType {
            orbits: dec.blocks,
            rep,
        });
    }

    let mut offsets = Vec::with_capacity(types.len());
    let mut labels = Vec::new();
    let mut off = 0;
    for (t, ty) in types.iter().enumerate() {
        offsets.push(off);
        off += ty.rep.space.dim();
        for l in ty.rep.space.labels() {
            labels.push(Label::Tuple(vec![Label::Num(t), l.clone()]));
        }
    }
    let space = FinVectSpace::new(labels)?;

    let ambient_gens: Vec<ActionMat> = ambient
        .young_gen_positions()
        .iter()
        .enumerate()
        .map(|(gi, _)| block_diag(types.iter().map(|ty| &ty.rep.gens[gi])))
        .collect();

    let type_index: BTreeMap<Vec<SeqOrbit>, usize> = types
        .iter()
        .enumerate()
        .map(|(t, ty)| (ty.orbits.clone(), t))
        .collect();
    let mut slot_gens = Vec::new();
    for &t in &slots.young_gen_positions() {
        let mut images = vec![0usize; space.dim()];
        for (ti, ty) in types.iter().enumerate() {
            let mut swapped = ty.orbits.clone();
            swapped.swap(t, t + 1);
            let tj = *type_index.get(&swapped).expect("closed under slot swaps");
            let tgt = &types[tj].rep;
            for idx in 0..ty.rep.space.dim() {
                let (pi, mut k) = ty.rep.decode(idx);
                let mut assignment = ty.rep.partitions[pi].assignment.clone();
                for a in assignment.iter_mut() {
                    if *a == t {
                        *a = t + 1;
                    } else if *a == t + 1 {
                        *a = t;
                    }
                }
                k.swap(t, t + 1);
                let pj = tgt
                    .partition_index(&assignment)
                    .expect("swapped placement exists");
                images[offsets[ti] + idx] = offsets[tj] + tgt.basis_index(pj, &k);
            }
        }
        slot_gens.push(ActionMat::Perm(images));
    }

    Ok(PropComponent {
        ambient: ambient.clone(),
        slots: slots.clone(),
        types,
        offsets,
        space,
        ambient_gens,
        slot_gens,
    })
}

/// Direct sum of actions on consecutive index ranges.
pub(crate) fn block_diag<'a>(parts: impl Iterator<Item = &'a ActionMat>) -> ActionMat {
    let parts: Vec<&ActionMat> = parts.collect();
    if parts.iter().all(|p| matches!(p, ActionMat::Perm(_))) {
        let mut images = Vec::new();
        let mut off = 0;
        for p in parts {
            if let ActionMat::Perm(v) = p {
                images.extend(v.iter().map(|&x| x + off));
                off += v.len();
            }
        }
        ActionMat::Perm(images)
    } else {
        let mut acc: Option<Mat> = None;
        for p in parts {
            let m = p.to_mat();
            acc = Some(match acc {
                None => m,
                Some(a) => a.direct_sum(&m),
            });
        }
        ActionMat::Dense(acc.expect("at least one part"))
    }
}

/// Composes an outer operation with a basis element of the component:
/// evaluate the slot operations, compose, and relabel the composite's inputs
/// onto the ambient positions of the element's placement.
pub fn gamma_hat(
    op: &OperadData,
    outer: &OpVector,
    prop: &PropComponent,
    idx: usize,
) -> Result<OpVector> {
    if outer.inputs != prop.slots.rep() {
        return Err(Error::bad_input(
            "outer operation inputs must match the slot sequence",
        ));
    }
    let e = prop.decode(idx);
    let ty = &prop.types[e.type_idx];
    let part = &ty.rep.partitions[e.partition];
    let inners: Vec<OpVector> = ty
        .orbits
        .iter()
        .zip(prop.slots.rep())
        .zip(&e.k)
        .map(|((o, &c), &ki)| op.basis_op(o.rep(), c, ki))
        .collect::<Result<_>>()?;
    let raw = op.compose(outer, &inners)?;
    let mut images = Vec::with_capacity(prop.ambient.len());
    for b in &part.blocks {
        images.extend(b.iter().copied());
    }
    op.act(&raw, &Perm::from_images(images), prop.ambient.rep())
}
