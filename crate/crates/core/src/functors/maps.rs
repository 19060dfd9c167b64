//! Natural maps between iterated cowedge spaces: functoriality in the
//! coefficients, the counit, the one-step diagonal, and the comparison map
//! that evaluates an outer cowedge of cowedges into a longer chain space.

use num::Zero;

use crate::error::{Error, Result};
use crate::linalg::{zero_vec, Mat, Rat};
use crate::operad::OperadData;
use crate::seq::{sort_morphism, Color, SeqOrbit};
use crate::util::{flat_index, Odometer};

use super::chains::{mat_to_hom, ChainBlock, ChainSpace};
use super::GradedMap;

fn in_invariants(b: &ChainBlock, hom: &[Rat], what: &str) -> Result<Vec<Rat>> {
    b.inv.coords_of(hom).ok_or_else(|| {
        Error::bad_input(format!("{what}: image left the invariant block"))
    })
}

/// Functorial action on coefficients: post-composition with the tensor
/// powers of a weight-graded map. Both chain spaces must have the same
/// length and cap; `f` goes from the domain's coefficients to the
/// codomain's.
pub fn chain_map(f: &GradedMap, dom_cs: &ChainSpace, cod_cs: &ChainSpace) -> Result<GradedMap> {
    if dom_cs.n != cod_cs.n {
        return Err(Error::bad_input("chain lengths differ"));
    }
    let mut out = GradedMap::zero(dom_cs.grading.clone(), cod_cs.grading.clone());
    for (&(w, y), dpiece) in &dom_cs.pieces {
        let Some(cpiece) = cod_cs.piece(w, y) else {
            continue;
        };
        let mut m = Mat::zero(cpiece.dim(), dpiece.dim());
        for dblock in &dpiece.blocks {
            let Some(cblock) = cpiece.block_with_chain(&dblock.chain) else {
                continue;
            };
            let t = tensor_of_map(f, &dblock.target, &cblock.target);
            for j in 0..dblock.dim() {
                let mapped = t.matmul(&dblock.basis_mat(j));
                let coords =
                    in_invariants(cblock, &mat_to_hom(&mapped), "coefficient functoriality")?;
                for (i, x) in coords.into_iter().enumerate() {
                    m.set(cblock.offset + i, dblock.offset + j, x);
                }
            }
        }
        out.set_block(w, y, m)?;
    }
    Ok(out)
}

/// Matrix of `⊗_p f` between two weighted tensor powers over the same
/// sequence and total weight.
fn tensor_of_map(
    f: &GradedMap,
    dom: &super::chains::GradedTensor,
    cod: &super::chains::GradedTensor,
) -> Mat {
    let mut t = Mat::zero(cod.dim(), dom.dim());
    for ds in &dom.summands {
        let Some(ci) = cod.summand_with_weights(&ds.weights) else {
            continue;
        };
        let cs = &cod.summands[ci];
        let mut kron: Option<Mat> = None;
        let mut all = true;
        for (&wp, &cp) in ds.weights.iter().zip(&dom.seq) {
            match f.block(wp, cp) {
                Some(b) => {
                    kron = Some(match kron {
                        None => b.clone(),
                        Some(k) => k.kron(b),
                    });
                }
                None => {
                    all = false;
                    break;
                }
            }
        }
        if !all {
            continue;
        }
        let kron = kron.expect("nonempty sequence");
        for i in 0..kron.rows() {
            for j in 0..kron.cols() {
                let v = kron.get(i, j);
                if !v.is_zero() {
                    t.set(cs.offset + i, ds.offset + j, v.clone());
                }
            }
        }
    }
    t
}

/// Counit of a length-1 chain space: evaluate at the unit operation. Only
/// the single-position chain `(y)` contributes; every other block vanishes.
pub fn chain_counit(op: &OperadData, cs: &ChainSpace) -> Result<GradedMap> {
    if cs.n != 1 {
        return Err(Error::bad_input("counit wants a length-1 chain space"));
    }
    let mut out = GradedMap::zero(cs.grading.clone(), cs.coeffs.clone());
    for (&(w, y), piece) in &cs.pieces {
        let cod_dim = cs.coeffs.dim(w, y);
        if cod_dim == 0 {
            continue;
        }
        let mut m = Mat::zero(cod_dim, piece.dim());
        let point = SeqOrbit::from_sorted(vec![y]);
        if let Some(block) = piece.block_with_chain(std::slice::from_ref(&point)) {
            let unit = op.unit_op(y)?;
            for j in 0..block.dim() {
                let vals = block.basis_mat(j).apply(&unit.coords);
                for (i, x) in vals.into_iter().enumerate() {
                    m.set(i, block.offset + j, x);
                }
            }
        }
        out.set_block(w, y, m)?;
    }
    Ok(out)
}

/// One-step diagonal: precompose a length-1 element with every composite of
/// a head operation and a decomposition element, producing a length-2
/// element.
pub fn diagonal(op: &OperadData, p1: &ChainSpace, p2: &ChainSpace) -> Result<GradedMap> {
    if p1.n != 1 || p2.n != 2 {
        return Err(Error::bad_input("diagonal goes from length 1 to length 2"));
    }
    let mut out = GradedMap::zero(p1.grading.clone(), p2.grading.clone());
    for (&(w, y), piece1) in &p1.pieces {
        let Some(piece2) = p2.piece(w, y) else {
            continue;
        };
        let mut m = Mat::zero(piece2.dim(), piece1.dim());
        for cb in &piece2.blocks {
            let Some(b1) = piece1.block_with_chain(&cb.chain[1..]) else {
                continue;
            };
            let head_dim = cb.dom_dims[0];
            let prop = &cb.props[0];
            // composite coordinates per domain basis element of the block
            let mut comps: Vec<(usize, Vec<Rat>)> = Vec::new();
            for mu in 0..head_dim {
                let outer = op.basis_op(cb.chain[0].rep(), y, mu)?;
                for bidx in 0..prop.dim() {
                    let c = super::prop::gamma_hat(op, &outer, prop, bidx)?;
                    if !c.is_zero() {
                        comps.push((mu * prop.dim() + bidx, c.coords));
                    }
                }
            }
            let cod_dim = cb.target.dim();
            for j in 0..b1.dim() {
                let fj = b1.basis_mat(j);
                let mut hom = zero_vec(cb.dom.dim() * cod_dim);
                for (dom_idx, coords) in &comps {
                    for (i, x) in fj.apply(coords).into_iter().enumerate() {
                        hom[dom_idx * cod_dim + i] = x;
                    }
                }
                let coords = in_invariants(cb, &hom, "diagonal")?;
                for (i, x) in coords.into_iter().enumerate() {
                    m.set(cb.offset + i, b1.offset + j, x);
                }
            }
        }
        out.set_block(w, y, m)?;
    }
    Ok(out)
}

/// Comparison map gluing an outer chain space over the grading of an inner
/// one into the combined chain space: chains concatenate, the decomposition
/// element between the two layers splits positions into subtrees, and inner
/// elements evaluate locally in each subtree.
pub fn alpha(
    outer_cs: &ChainSpace,
    inner_cs: &ChainSpace,
    cod_cs: &ChainSpace,
) -> Result<GradedMap> {
    let n = outer_cs.n;
    let m = inner_cs.n;
    if cod_cs.n != n + m {
        return Err(Error::bad_input("combined chain length must be n + m"));
    }
    if outer_cs.coeffs.dim_table() != inner_cs.grading.dim_table() {
        return Err(Error::bad_input(
            "outer coefficients must be the inner chain space's grading",
        ));
    }
    let mut out = GradedMap::zero(outer_cs.grading.clone(), cod_cs.grading.clone());
    for (&(w, y), cpiece) in &cod_cs.pieces {
        let Some(opiece) = outer_cs.piece(w, y) else {
            continue;
        };
        let mut mat = Mat::zero(cpiece.dim(), opiece.dim());
        for cb in &cpiece.blocks {
            let Some(ob) = opiece.block_with_chain(&cb.chain[..n]) else {
                continue;
            };
            apply_alpha_block(inner_cs, n, m, cb, ob, &mut mat)?;
        }
        out.set_block(w, y, mat)?;
    }
    Ok(out)
}

fn apply_alpha_block(
    inner_cs: &ChainSpace,
    n: usize,
    m: usize,
    cb: &ChainBlock,
    ob: &ChainBlock,
    mat: &mut Mat,
) -> Result<()> {
    debug_assert_eq!(&cb.dom_dims[..n], &ob.dom_dims[..]);
    let outer_dims = &cb.dom_dims[..n];
    let cod_dim = cb.target.dim();
    let inner_seq = cb.chain[n - 1].rep();

    // Decode the outer-target basis once: each index names a weight vector
    // over the middle sequence and, per position, an inner block with a
    // local invariant index.
    let mut mid_decode: Vec<(Vec<usize>, Vec<(&ChainBlock, usize)>)> = Vec::new();
    for i in 0..ob.target.dim() {
        let (s, k) = ob.target.locate(i);
        let weights = ob.target.summands[s].weights.clone();
        let mut locs = Vec::with_capacity(inner_seq.len());
        for (p, (&wp, &ep)) in weights.iter().zip(&k).enumerate() {
            let piece = inner_cs
                .piece(wp, inner_seq[p])
                .ok_or_else(|| Error::bad_input("inner piece missing for outer entry"))?;
            let (bi, local) = piece.locate(ep);
            locs.push((&piece.blocks[bi], local));
        }
        mid_decode.push((weights, locs));
    }

    for j in 0..ob.dim() {
        let h = ob.basis_mat(j);
        let mut hom = zero_vec(cb.dom.dim() * cod_dim);
        for (cod_dom_idx, key) in Odometer::new(&cb.dom_dims).enumerate() {
            let outer_dom_idx = flat_index(&key[..n], outer_dims);
            for i in 0..ob.target.dim() {
                let coeff = h.get(i, outer_dom_idx);
                if coeff.is_zero() {
                    continue;
                }
                let (_, locs) = &mid_decode[i];
                accumulate_composite(
                    n,
                    m,
                    cb,
                    &key[n..],
                    locs,
                    coeff,
                    &mut hom[cod_dom_idx * cod_dim..(cod_dom_idx + 1) * cod_dim],
                )?;
            }
        }
        let coords = in_invariants(cb, &hom, "comparison map")?;
        for (i, x) in coords.into_iter().enumerate() {
            mat.set(cb.offset + i, ob.offset + j, x);
        }
    }
    Ok(())
}

/// Evaluates the inner elements named by `locs` on the lower levels of the
/// combined chain element and adds the resulting tensor, scaled by `coeff`,
/// onto the target slice.
fn accumulate_composite(
    n: usize,
    m: usize,
    cb: &ChainBlock,
    lower_key: &[usize],
    locs: &[(&ChainBlock, usize)],
    coeff: &Rat,
    target: &mut [Rat],
) -> Result<()> {
    let num_mid = locs.len();
    // Split positions of each lower level into subtrees, starting from the
    // decomposition element joining the two layers.
    let join = &cb.props[n - 1];
    let je = join.decode(lower_key[0]);
    let jt = &join.types[je.type_idx];
    let jpart = &jt.rep.partitions[je.partition];
    let mut subtrees: Vec<Vec<usize>> = jpart.blocks.clone();
    // Per-subtree local domain key, starting with the head operation index.
    let mut local_keys: Vec<Vec<usize>> = Vec::with_capacity(num_mid);
    for p in 0..num_mid {
        let (ib, _) = locs[p];
        if jt.orbits[p] != ib.chain[0] {
            return Ok(());
        }
        local_keys.push(vec![je.k[p]]);
    }

    for lvl in 1..m {
        let prop = &cb.props[n - 1 + lvl];
        let pe = prop.decode(lower_key[lvl]);
        let pt = &prop.types[pe.type_idx];
        let ppart = &pt.rep.partitions[pe.partition];
        let mut next_subtrees: Vec<Vec<usize>> = Vec::with_capacity(num_mid);
        for p in 0..num_mid {
            let (ib, _) = locs[p];
            let local_prop = &ib.props[lvl - 1];
            // Gather this subtree's slice of the level: blocks hanging off
            // its positions, in ascending position order.
            let mut positions = Vec::new();
            let mut local_orbits = Vec::with_capacity(subtrees[p].len());
            let mut local_assignment_by_pos: Vec<(usize, usize)> = Vec::new();
            for (slot_rank, &q) in subtrees[p].iter().enumerate() {
                local_orbits.push(pt.orbits[q].clone());
                for &pos in &ppart.blocks[q] {
                    local_assignment_by_pos.push((pos, slot_rank));
                }
                positions.extend(ppart.blocks[q].iter().copied());
            }
            positions.sort_unstable();
            local_assignment_by_pos.sort_unstable();
            let seq: Vec<Color> = positions
                .iter()
                .map(|&pos| cb.chain[n + lvl].rep()[pos])
                .collect();
            let (local_orbit, _) = sort_morphism(&seq);
            if local_orbit != ib.chain[lvl] {
                return Ok(());
            }
            let Some(lt) = local_prop.type_with_orbits(&local_orbits) else {
                return Ok(());
            };
            let assignment: Vec<usize> = local_assignment_by_pos
                .iter()
                .map(|&(_, slot)| slot)
                .collect();
            let Some(lp) = local_prop.types[lt].rep.partition_index(&assignment) else {
                return Ok(());
            };
            let lk: Vec<usize> = subtrees[p].iter().map(|&q| pe.k[q]).collect();
            local_keys[p].push(local_prop.index_of(lt, lp, &lk));
            next_subtrees.push(positions);
        }
        subtrees = next_subtrees;
    }

    // Evaluate each inner element at its local domain key and distribute
    // the factors onto global positions.
    let mut factors: Vec<Vec<(usize, Rat)>> = Vec::with_capacity(num_mid);
    for p in 0..num_mid {
        let (ib, r) = locs[p];
        let g = ib.basis_mat(r);
        let local_dom = flat_index(&local_keys[p], &ib.dom_dims);
        let col: Vec<(usize, Rat)> = (0..g.rows())
            .filter_map(|i| {
                let v = g.get(i, local_dom);
                (!v.is_zero()).then(|| (i, v.clone()))
            })
            .collect();
        if col.is_empty() {
            return Ok(());
        }
        factors.push(col);
    }

    let counts: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let deepest = cb.chain[n + m - 1].len();
    for pick in Odometer::new(&counts) {
        let mut c = coeff.clone();
        let mut weights = vec![0usize; deepest];
        let mut indices = vec![0usize; deepest];
        for p in 0..num_mid {
            let (ib, _) = locs[p];
            let (idx, v) = &factors[p][pick[p]];
            c *= v;
            let (s, k) = ib.target.locate(*idx);
            let summand = &ib.target.summands[s];
            for (r, &pos) in subtrees[p].iter().enumerate() {
                weights[pos] = summand.weights[r];
                indices[pos] = k[r];
            }
        }
        let s = cb
            .target
            .summand_with_weights(&weights)
            .ok_or_else(|| Error::bad_input("composite weight vector missing in target"))?;
        let t = cb.target.index_of(s, &indices);
        target[t] += &c;
    }
    Ok(())
}
