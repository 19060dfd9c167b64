//! Induction of stabilizer representations along a block decomposition.
//!
//! Given a sorted sequence `z̄` split into `m` labeled nonempty blocks with a
//! representation `V_i` of the stabilizer of each block orbit, the induced
//! space has basis `(B⃗, k⃗)`: an ordered set partition of the positions of
//! `z̄` realizing the prescribed block orbits, together with a basis tensor
//! of the `V_i`. The stabilizer of `z̄` acts by moving partitions and, when a
//! transposition stays inside a block, by the block's own generator.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{ActionMat, FinVectSpace, Label, LinearMap, Mat, Rat};
use crate::seq::SeqOrbit;
use crate::util::{flat_index, unflatten};

/// One block slot: its orbit, the representation space, and the action of
/// the adjacent-transposition generators of its stabilizer, aligned with
/// `orbit.young_gen_positions()`.
#[derive(Debug, Clone)]
pub struct InduceSlot {
    pub orbit: SeqOrbit,
    pub space: FinVectSpace,
    pub gens: Vec<ActionMat>,
}

/// One ordered set partition realizing the slot orbits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndPartition {
    /// Slot of each position of the ambient sorted sequence.
    pub assignment: Vec<usize>,
    /// Positions of each block, ascending.
    pub blocks: Vec<Vec<usize>>,
}

/// The induced representation of the stabilizer of `z̄`.
#[derive(Debug, Clone)]
pub struct InducedRep {
    pub space: FinVectSpace,
    pub partitions: Vec<IndPartition>,
    /// Basis offset of each partition's tensor block.
    pub offsets: Vec<usize>,
    pub slot_dims: Vec<usize>,
    /// Action of the generator at each young position of the ambient orbit,
    /// aligned with `ambient.young_gen_positions()`.
    pub gens: Vec<ActionMat>,
    /// Per partition, the basis injection `⊗_i V_i → induced`.
    pub inclusions: Vec<LinearMap>,
}

impl InducedRep {
    pub fn tensor_dim(&self) -> usize {
        self.slot_dims.iter().product()
    }

    pub fn partition_index(&self, assignment: &[usize]) -> Option<usize> {
        self.partitions
            .iter()
            .position(|p| p.assignment == assignment)
    }

    /// Basis index of `(partition, k⃗)`.
    pub fn basis_index(&self, partition: usize, k: &[usize]) -> usize {
        self.offsets[partition] + flat_index(k, &self.slot_dims)
    }

    /// Partition and slot multi-index of a basis element.
    pub fn decode(&self, idx: usize) -> (usize, Vec<usize>) {
        let td = self.tensor_dim();
        (idx / td, unflatten(idx % td, &self.slot_dims))
    }
}

fn multiset_perms(labels: &[usize]) -> Vec<Vec<usize>> {
    // distinct rearrangements in lexicographic order
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(labels.len());
    fn rec(
        counts: &mut BTreeMap<usize, usize>,
        cur: &mut Vec<usize>,
        total: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == total {
            out.push(cur.clone());
            return;
        }
        let keys: Vec<usize> = counts.keys().copied().collect();
        for k in keys {
            if counts[&k] == 0 {
                continue;
            }
            *counts.get_mut(&k).unwrap() -= 1;
            cur.push(k);
            rec(counts, cur, total, out);
            cur.pop();
            *counts.get_mut(&k).unwrap() += 1;
        }
    }
    rec(&mut counts, &mut cur, labels.len(), &mut out);
    out
}

/// Builds the induced representation. The concatenated block orbits must use
/// exactly the colors of `ambient`, and every block must be nonempty.
pub fn induce(ambient: &SeqOrbit, slots: &[InduceSlot]) -> Result<InducedRep> {
    let mut all: Vec<usize> = Vec::new();
    for s in slots {
        if s.orbit.is_empty() {
            return Err(Error::bad_input("empty block in decomposition"));
        }
        all.extend_from_slice(s.orbit.rep());
    }
    all.sort_unstable();
    if all != ambient.rep() {
        return Err(Error::bad_input(
            "block decomposition does not match ambient sequence",
        ));
    }

    let n = ambient.len();
    let m = slots.len();
    let slot_dims: Vec<usize> = slots.iter().map(|s| s.space.dim()).collect();
    let tensor_dim: usize = slot_dims.iter().product();

    // Enumerate assignments class by class: within each color class the slot
    // labels form a fixed multiset, and classes are independent.
    let rep = ambient.rep();
    let mut class_perms: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut class_ranges: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && rep[j] == rep[i] {
            j += 1;
        }
        let mut labels = Vec::new();
        for (si, s) in slots.iter().enumerate() {
            let cnt = s.orbit.rep().iter().filter(|&&c| c == rep[i]).count();
            labels.extend(std::iter::repeat(si).take(cnt));
        }
        class_perms.push(multiset_perms(&labels));
        class_ranges.push((i, j));
        i = j;
    }
    let mut partitions: Vec<IndPartition> = Vec::new();
    let mut choice = vec![0usize; class_perms.len()];
    'outer: loop {
        let mut assignment = vec![0usize; n];
        for (ci, &(start, _end)) in class_ranges.iter().enumerate() {
            for (off, &slot) in class_perms[ci][choice[ci]].iter().enumerate() {
                assignment[start + off] = slot;
            }
        }
        let mut blocks = vec![Vec::new(); m];
        for (pos, &slot) in assignment.iter().enumerate() {
            blocks[slot].push(pos);
        }
        partitions.push(IndPartition { assignment, blocks });
        let mut ci = class_perms.len();
        loop {
            if ci == 0 {
                break 'outer;
            }
            ci -= 1;
            choice[ci] += 1;
            if choice[ci] < class_perms[ci].len() {
                break;
            }
            choice[ci] = 0;
        }
    }

    let offsets: Vec<usize> = (0..partitions.len()).map(|p| p * tensor_dim).collect();
    let part_index: BTreeMap<Vec<usize>, usize> = partitions
        .iter()
        .enumerate()
        .map(|(idx, p)| (p.assignment.clone(), idx))
        .collect();

    // basis labels: (assignment, slot basis labels...)
    let mut labels = Vec::with_capacity(partitions.len() * tensor_dim);
    for p in &partitions {
        let a_label = Label::Tuple(p.assignment.iter().map(|&s| Label::Num(s)).collect());
        for flat in 0..tensor_dim {
            let k = unflatten(flat, &slot_dims);
            let mut tup = vec![a_label.clone()];
            for (si, &ki) in k.iter().enumerate() {
                tup.push(slots[si].space.label(ki).clone());
            }
            labels.push(Label::Tuple(tup));
        }
    }
    let space = FinVectSpace::new(labels)?;

    let all_perm_gens = slots
        .iter()
        .all(|s| s.gens.iter().all(|g| g.is_perm()));

    let mut gens = Vec::new();
    for &t in &ambient.young_gen_positions() {
        if all_perm_gens {
            let mut images = vec![0usize; space.dim()];
            for (pi, p) in partitions.iter().enumerate() {
                let (qi, corr) = transposed_partition(p, t, slots, &part_index);
                for flat in 0..tensor_dim {
                    let src = offsets[pi] + flat;
                    let dst = match &corr {
                        None => offsets[qi] + flat,
                        Some((si, g)) => {
                            let mut k = unflatten(flat, &slot_dims);
                            k[*si] = g.image_of(k[*si]).expect("perm gen");
                            offsets[qi] + flat_index(&k, &slot_dims)
                        }
                    };
                    images[src] = dst;
                }
            }
            gens.push(ActionMat::Perm(images));
        } else {
            let mut mat = Mat::zero(space.dim(), space.dim());
            for (pi, p) in partitions.iter().enumerate() {
                let (qi, corr) = transposed_partition(p, t, slots, &part_index);
                for flat in 0..tensor_dim {
                    let src = offsets[pi] + flat;
                    match &corr {
                        None => mat.set(offsets[qi] + flat, src, Rat::from_integer(1.into())),
                        Some((si, g)) => {
                            let k = unflatten(flat, &slot_dims);
                            let col = g.to_mat().col(k[*si]);
                            for (kk, v) in col.iter().enumerate() {
                                if !num::Zero::is_zero(v) {
                                    let mut k2 = k.clone();
                                    k2[*si] = kk;
                                    let dst = offsets[qi] + flat_index(&k2, &slot_dims);
                                    mat.set(dst, src, mat.get(dst, src) + v.clone());
                                }
                            }
                        }
                    }
                }
            }
            gens.push(ActionMat::Dense(mat));
        }
    }

    let mut inclusions = Vec::new();
    let tensor_space =
        FinVectSpace::tensor_many(&slots.iter().map(|s| &s.space).collect::<Vec<_>>());
    for &off in &offsets {
        let mut mat = Mat::zero(space.dim(), tensor_dim);
        for flat in 0..tensor_dim {
            mat.set(off + flat, flat, Rat::from_integer(1.into()));
        }
        inclusions.push(LinearMap::new(tensor_space.clone(), space.clone(), mat));
    }

    Ok(InducedRep {
        space,
        partitions,
        offsets,
        slot_dims,
        gens,
        inclusions,
    })
}

/// Effect of the adjacent transposition at `t` on a partition: the new
/// partition index plus, when both positions share a block, the slot whose
/// internal generator corrects the move.
fn transposed_partition<'a>(
    p: &IndPartition,
    t: usize,
    slots: &'a [InduceSlot],
    part_index: &BTreeMap<Vec<usize>, usize>,
) -> (usize, Option<(usize, &'a ActionMat)>) {
    let (a, b) = (p.assignment[t], p.assignment[t + 1]);
    if a == b {
        let local = p.blocks[a].iter().position(|&pos| pos == t).unwrap();
        let young = slots[a].orbit.young_gen_positions();
        let gi = young
            .iter()
            .position(|&y| y == local)
            .expect("internal transposition lands on a young position");
        (part_index[&p.assignment], Some((a, &slots[a].gens[gi])))
    } else {
        let mut assignment = p.assignment.clone();
        assignment.swap(t, t + 1);
        (part_index[&assignment], None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::GroupGens;

    fn trivial_slot(orbit: SeqOrbit) -> InduceSlot {
        let gens = orbit
            .young_gen_positions()
            .iter()
            .map(|_| ActionMat::identity_perm(1))
            .collect();
        InduceSlot {
            orbit,
            space: FinVectSpace::numbered(1),
            gens,
        }
    }

    #[test]
    fn partition_count_matches_multinomials() {
        // z̄ = (0,0,0,1,1) into blocks (0,0,1) and (0,1):
        // choose positions: C(3,2) * C(2,1) = 6
        let ambient = SeqOrbit::from_sorted(vec![0, 0, 0, 1, 1]);
        let ind = induce(
            &ambient,
            &[
                trivial_slot(SeqOrbit::from_sorted(vec![0, 0, 1])),
                trivial_slot(SeqOrbit::from_sorted(vec![0, 1])),
            ],
        )
        .unwrap();
        assert_eq!(ind.partitions.len(), 6);
        assert_eq!(ind.space.dim(), 6);
    }

    #[test]
    fn generators_are_involutions_with_full_orbit() {
        let ambient = SeqOrbit::from_sorted(vec![0, 0, 0]);
        let ind = induce(
            &ambient,
            &[
                trivial_slot(SeqOrbit::from_sorted(vec![0, 0])),
                trivial_slot(SeqOrbit::from_sorted(vec![0])),
            ],
        )
        .unwrap();
        assert_eq!(ind.space.dim(), 3);
        for g in &ind.gens {
            let sq = g.compose(g);
            assert!(sq.is_identity());
        }
        // the S3 action on the 3 partitions is transitive: invariants dim 1
        let gg = GroupGens::new(ind.space.clone(), ind.gens.clone());
        assert_eq!(gg.invariants().unwrap().dim(), 1);
    }

    #[test]
    fn internal_transposition_uses_block_generator() {
        // z̄ = (0,0) in one block of size 2 with the sign representation
        let ambient = SeqOrbit::from_sorted(vec![0, 0]);
        let sign = ActionMat::Dense(Mat::from_rows(vec![vec![crate::linalg::rat(-1, 1)]]));
        let ind = induce(
            &ambient,
            &[InduceSlot {
                orbit: SeqOrbit::from_sorted(vec![0, 0]),
                space: FinVectSpace::numbered(1),
                gens: vec![sign],
            }],
        )
        .unwrap();
        assert_eq!(ind.space.dim(), 1);
        let gg = GroupGens::new(ind.space.clone(), ind.gens.clone());
        assert_eq!(gg.invariants().unwrap().dim(), 0);
    }
}
