//! Consistency checks tying the functor constructions together: four
//! identities comparing independent routes to the same space, each with a
//! panel of seeded naturality squares, plus law checkers for algebra and
//! coalgebra structures over an operad.

use std::collections::BTreeMap;

use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{rat_int, ActionMat, FinVectSpace, GroupGens, Mat, Rat, Subspace};
use crate::operad::{LawStats, OperadData, ValidationReport};
use crate::seq::{orbits_of_len, sort_morphism, Color, Perm, SeqOrbit};
use crate::util::{compositions, Odometer};

use super::chains::{hom_to_mat, ChainSpace, GradedTensor};
use super::free::{free_algebra, free_map, section_of, FreeAlgebra};
use super::prop::prop_component;
use super::{tensor_perm, ColoredSpace, GradedSpace};

#[derive(Debug, Clone)]
pub struct IdentityItem {
    pub name: String,
    pub checked: u64,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub items: Vec<IdentityItem>,
}

impl IdentityReport {
    pub fn ok(&self) -> bool {
        self.items.iter().all(|i| i.failures.is_empty())
    }

    pub fn failure_count(&self) -> usize {
        self.items.iter().map(|i| i.failures.len()).sum()
    }
}

struct ItemBuilder {
    name: &'static str,
    checked: u64,
    failures: Vec<String>,
}

impl ItemBuilder {
    fn new(name: &'static str) -> Self {
        ItemBuilder {
            name,
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(detail());
        }
    }

    fn finish(self) -> IdentityItem {
        IdentityItem {
            name: self.name.to_string(),
            checked: self.checked,
            failures: self.failures,
        }
    }
}

fn rand_mat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| rat_int(rng.gen_range(-2..=2)))
}

fn rand_color_maps(rng: &mut ChaCha8Rng, space: &ColoredSpace) -> Vec<Mat> {
    (0..space.num_colors())
        .map(|c| rand_mat(rng, space.dim(c), space.dim(c)))
        .collect()
}

use super::tensor_over_seq;

/// Runs the four structural identities over a seeded panel of coefficient
/// maps. Exact comparisons throughout; failures carry their location.
pub fn verify_identities(
    op: &OperadData,
    a_dims: &[usize],
    c_dims: &[usize],
    cap: usize,
    seed: u64,
    panels: usize,
) -> Result<IdentityReport> {
    let a = ColoredSpace::standard(a_dims);
    let c = ColoredSpace::standard(c_dims);
    let cap = cap.min(op.cap);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items = vec![
        point_section_identity(&a, panels, &mut rng).finish(),
        free_factorization_identity(op, &a, cap, panels, &mut rng)?.finish(),
        cowedge_factorization_identity(op, &c, cap, panels, &mut rng)?.finish(),
        envelope_exchange_identity(op, &a, cap, panels, &mut rng)?.finish(),
    ];
    Ok(IdentityReport { items })
}

/// Evaluating the weight-1 concentration at single-position sequences gives
/// back the colored space, naturally.
fn point_section_identity(a: &ColoredSpace, panels: usize, rng: &mut ChaCha8Rng) -> ItemBuilder {
    let mut item = ItemBuilder::new("point-section");
    let graded = GradedSpace::concentrated(a);
    for color in 0..a.num_colors() {
        item.check(graded.dim(1, color) == a.dim(color), || {
            format!(
                "piece (1, {color}): dim {} vs {}",
                graded.dim(1, color),
                a.dim(color)
            )
        });
    }
    for _ in 0..panels {
        let f = rand_color_maps(rng, a);
        let gf = super::GradedMap::concentrated(a, a, f.to_vec());
        for color in 0..a.num_colors() {
            item.check(gf.block(1, color).map_or(true, |b| *b == f[color]), || {
                format!("naturality at color {color}")
            });
        }
    }
    item
}

/// The free algebra computed directly agrees with the route through the
/// single-output decomposition component: same kernel for every orbit's
/// class quotient, and quotient maps that match along the canonical
/// identification, naturally in the coefficients.
fn free_factorization_identity(
    op: &OperadData,
    a: &ColoredSpace,
    cap: usize,
    panels: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ItemBuilder> {
    let mut item = ItemBuilder::new("free-factorization");
    let free = free_algebra(op, a, cap)?;
    for w in 1..=cap {
        for y in 0..op.palette.len() {
            let point = SeqOrbit::from_sorted(vec![y]);
            for orbit in orbits_of_len(op.palette.len(), w) {
                if op.dim(&orbit, y) == 0 {
                    continue;
                }
                let envelope = envelope_quotient(op, a, &orbit, &point)?;
                let Some(block) = free.block(&orbit, y) else {
                    item.check(envelope.1.codomain.dim() == 0, || {
                        format!("orbit {:?} -> {y}: direct route has no block", orbit.rep())
                    });
                    continue;
                };
                let (ambient, proj_env) = envelope;
                item.check(ambient.dim() == block.ambient.dim(), || {
                    format!("orbit {:?} -> {y}: ambient dims differ", orbit.rep())
                });
                let ker_env = Subspace::span(ambient.clone(), proj_env.mat.kernel());
                let ker_dir = Subspace::span(ambient.clone(), block.proj.mat.kernel());
                item.check(
                    ker_env.is_subspace_of(&ker_dir) && ker_dir.is_subspace_of(&ker_env),
                    || format!("orbit {:?} -> {y}: quotient kernels differ", orbit.rep()),
                );
                // Canonical identification between the two quotients.
                let sect_env = section_of(&proj_env.mat)?;
                let iso = block.proj.mat.matmul(&sect_env);
                for p in 0..panels {
                    let f = rand_color_maps(rng, a);
                    let fa = tensor_over_seq(&f, orbit.rep());
                    let amb_map = Mat::identity(block.ambient.dim() / fa.rows()).kron(&fa);
                    let via_env = proj_env.mat.matmul(&amb_map).matmul(&sect_env);
                    let via_dir = block.proj.mat.matmul(&amb_map).matmul(&block.sect);
                    let lhs = iso.matmul(&via_env);
                    let rhs = via_dir.matmul(&iso);
                    item.check(lhs == rhs, || {
                        format!(
                            "orbit {:?} -> {y}: naturality panel {p} differs",
                            orbit.rep()
                        )
                    });
                }
            }
        }
    }
    Ok(item)
}

/// Coinvariants of the one-slot decomposition component tensored with the
/// coefficient power, with its own ambient action.
fn envelope_quotient(
    op: &OperadData,
    a: &ColoredSpace,
    orbit: &SeqOrbit,
    point: &SeqOrbit,
) -> Result<(FinVectSpace, crate::linalg::LinearMap)> {
    let pc = prop_component(op, orbit, point)?;
    let a_dims: Vec<usize> = orbit.rep().iter().map(|&c| a.dim(c)).collect();
    let a_tensor = a.tensor_seq(orbit.rep());
    let ambient = FinVectSpace::tensor_many(&[&pc.space, &a_tensor]);
    let gens: Vec<ActionMat> = orbit
        .young_gen_positions()
        .iter()
        .enumerate()
        .map(|(gi, &t)| {
            let swap = tensor_perm(&a_dims, &Perm::adjacent(orbit.len(), t));
            pc.ambient_gens[gi].tensor(&ActionMat::Perm(swap.images().to_vec()))
        })
        .collect();
    let (_, proj) = GroupGens::new(ambient.clone(), gens).coinvariants()?;
    Ok((ambient, proj))
}

/// The length-1 chain space agrees with invariants taken through the
/// one-slot decomposition component, as subspaces of the same hom space,
/// naturally in the coefficients.
fn cowedge_factorization_identity(
    op: &OperadData,
    c: &ColoredSpace,
    cap: usize,
    panels: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ItemBuilder> {
    let mut item = ItemBuilder::new("cowedge-factorization");
    let graded = GradedSpace::concentrated(c);
    let cs = ChainSpace::build(op, &graded, 1, cap)?;
    for w in 1..=cap {
        for y in 0..op.palette.len() {
            let point = SeqOrbit::from_sorted(vec![y]);
            for orbit in orbits_of_len(op.palette.len(), w) {
                if op.dim(&orbit, y) == 0 {
                    continue;
                }
                let c_dims: Vec<usize> = orbit.rep().iter().map(|&cc| c.dim(cc)).collect();
                let c_dim: usize = c_dims.iter().product();
                if c_dim == 0 {
                    continue;
                }
                let pc = prop_component(op, &orbit, &point)?;
                let c_tensor = c.tensor_seq(orbit.rep());
                let hom = FinVectSpace::hom(&pc.space, &c_tensor);
                let gens: Vec<ActionMat> = orbit
                    .young_gen_positions()
                    .iter()
                    .enumerate()
                    .map(|(gi, &t)| {
                        let swap = tensor_perm(&c_dims, &Perm::adjacent(orbit.len(), t));
                        ActionMat::hom_conj(
                            &pc.ambient_gens[gi],
                            &ActionMat::Perm(swap.images().to_vec()),
                        )
                    })
                    .collect();
                let inv_env = GroupGens::new(hom, gens).invariants()?;
                let inv_dir = cs
                    .piece(w, y)
                    .and_then(|p| p.block_with_chain(std::slice::from_ref(&orbit)))
                    .map(|b| b.inv.clone());
                let Some(inv_dir) = inv_dir else {
                    item.check(inv_env.dim() == 0, || {
                        format!("orbit {:?} -> {y}: direct route has no block", orbit.rep())
                    });
                    continue;
                };
                item.check(
                    inv_env.is_subspace_of(&inv_dir) && inv_dir.is_subspace_of(&inv_env),
                    || format!("orbit {:?} -> {y}: invariant subspaces differ", orbit.rep()),
                );
                if inv_env.dim() == 0 {
                    continue;
                }
                // Express one basis in the other's coordinates.
                let iso = Mat::from_cols(
                    inv_dir.dim(),
                    (0..inv_env.dim())
                        .map(|j| {
                            inv_dir
                                .coords_of(&inv_env.basis_vector(j))
                                .expect("equal subspaces")
                        })
                        .collect(),
                );
                for p in 0..panels {
                    let f = rand_color_maps(rng, c);
                    let ft = tensor_over_seq(&f, orbit.rep());
                    let env_mapped = induced_on_invariants(&inv_env, &ft, pc.space.dim());
                    let dir_mapped = induced_on_invariants(&inv_dir, &ft, pc.space.dim());
                    let (Some(env_mapped), Some(dir_mapped)) = (env_mapped, dir_mapped) else {
                        item.check(false, || {
                            format!(
                                "orbit {:?} -> {y}: panel {p} left the invariants",
                                orbit.rep()
                            )
                        });
                        continue;
                    };
                    let lhs = iso.matmul(&env_mapped);
                    let rhs = dir_mapped.matmul(&iso);
                    item.check(lhs == rhs, || {
                        format!(
                            "orbit {:?} -> {y}: naturality panel {p} differs",
                            orbit.rep()
                        )
                    });
                }
            }
        }
    }
    Ok(item)
}

/// Matrix of post-composition with `f` restricted to an invariant subspace
/// of a hom space, in that subspace's own basis.
fn induced_on_invariants(inv: &Subspace, f: &Mat, dom_dim: usize) -> Option<Mat> {
    let cod_dim = f.rows();
    let mut cols = Vec::with_capacity(inv.dim());
    for j in 0..inv.dim() {
        let h = hom_to_mat(&inv.basis_vector(j), dom_dim, cod_dim);
        let mapped = f.matmul(&h);
        cols.push(inv.coords_of(&super::chains::mat_to_hom(&mapped))?);
    }
    Some(Mat::from_cols(inv.dim(), cols))
}

/// Weighted tensor powers of the free algebra agree with the decomposition
/// component route, through an explicit basis-level comparison that sorts
/// the concatenated sequences, naturally in the coefficients.
fn envelope_exchange_identity(
    op: &OperadData,
    a: &ColoredSpace,
    cap: usize,
    panels: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ItemBuilder> {
    let mut item = ItemBuilder::new("envelope-exchange");
    let free = free_algebra(op, a, cap)?;
    let mut outputs: Vec<SeqOrbit> = orbits_of_len(op.palette.len(), 1);
    outputs.extend(orbits_of_len(op.palette.len(), 2));
    for ybar in &outputs {
        for w in ybar.len()..=cap {
            let lhs = GradedTensor::new(&free.grading, ybar.rep(), w);
            let rhs = envelope_blocks(op, a, ybar, w)?;
            let rhs_dim: usize = rhs.iter().map(|b| b.classes.dim()).sum();
            item.check(lhs.dim() == rhs_dim, || {
                format!(
                    "outputs {:?}, weight {w}: dims {} vs {rhs_dim}",
                    ybar.rep(),
                    lhs.dim()
                )
            });
            if lhs.dim() != rhs_dim || lhs.dim() == 0 {
                continue;
            }
            let phi = exchange_matrix(a, &free, ybar, &lhs, &rhs)?;
            item.check(phi.rank() == lhs.dim(), || {
                format!(
                    "outputs {:?}, weight {w}: comparison map not invertible",
                    ybar.rep()
                )
            });
            for p in 0..panels {
                let f = rand_color_maps(rng, a);
                let lhs_map = lhs_functorial(&free, &f, ybar, w, &lhs)?;
                let rhs_map = rhs_functorial(a, &f, &rhs)?;
                let left = phi.matmul(&lhs_map);
                let right = rhs_map.matmul(&phi);
                item.check(left == right, || {
                    format!(
                        "outputs {:?}, weight {w}: naturality panel {p} differs",
                        ybar.rep()
                    )
                });
            }
        }
    }
    Ok(item)
}

struct EnvelopeBlock {
    orbit: SeqOrbit,
    pc: super::prop::PropComponent,
    ambient: FinVectSpace,
    classes: FinVectSpace,
    proj: crate::linalg::LinearMap,
    sect: Mat,
    offset: usize,
}

fn envelope_blocks(
    op: &OperadData,
    a: &ColoredSpace,
    ybar: &SeqOrbit,
    w: usize,
) -> Result<Vec<EnvelopeBlock>> {
    let mut blocks = Vec::new();
    let mut offset = 0;
    for orbit in orbits_of_len(op.palette.len(), w) {
        let pc = prop_component(op, &orbit, ybar)?;
        if pc.dim() == 0 {
            continue;
        }
        let a_dims: Vec<usize> = orbit.rep().iter().map(|&cc| a.dim(cc)).collect();
        let a_tensor = a.tensor_seq(orbit.rep());
        let ambient = FinVectSpace::tensor_many(&[&pc.space, &a_tensor]);
        if ambient.dim() == 0 {
            continue;
        }
        let gens: Vec<ActionMat> = orbit
            .young_gen_positions()
            .iter()
            .enumerate()
            .map(|(gi, &t)| {
                let swap = tensor_perm(&a_dims, &Perm::adjacent(orbit.len(), t));
                pc.ambient_gens[gi].tensor(&ActionMat::Perm(swap.images().to_vec()))
            })
            .collect();
        let (classes, proj) = GroupGens::new(ambient.clone(), gens).coinvariants()?;
        if classes.dim() == 0 {
            continue;
        }
        let sect = section_of(&proj.mat)?;
        let classes_dim = classes.dim();
        blocks.push(EnvelopeBlock {
            orbit,
            pc,
            ambient,
            classes,
            proj,
            sect,
            offset,
        });
        offset += classes_dim;
    }
    Ok(blocks)
}

/// Sends each tensor of free-algebra classes to the class of the assembled
/// decomposition element: concatenate the representative sequences, sort,
/// and realize the placement whose blocks are the sorted positions of each
/// factor.
fn exchange_matrix(
    a: &ColoredSpace,
    free: &FreeAlgebra,
    ybar: &SeqOrbit,
    lhs: &GradedTensor,
    rhs: &[EnvelopeBlock],
) -> Result<Mat> {
    let rhs_dim: usize = rhs.iter().map(|b| b.classes.dim()).sum();
    let mut phi = Mat::zero(rhs_dim, lhs.dim());
    let piece_blocks = piece_block_index(free);
    for s in &lhs.summands {
        for (local, k) in Odometer::new(&s.dims).enumerate() {
            let col = s.offset + local;
            // Decode each factor to an orbit block and a class, then to an
            // ambient representative.
            let mut factor_orbits: Vec<SeqOrbit> = Vec::with_capacity(k.len());
            let mut factor_vecs: Vec<Vec<(usize, usize, Rat)>> = Vec::with_capacity(k.len());
            for (p, (&wp, &kp)) in s.weights.iter().zip(&k).enumerate() {
                let yp = ybar.rep()[p];
                let (orbit, block, local_class) = piece_blocks
                    .locate(free, wp, yp, kp)
                    .expect("piece index decodes");
                let amb = block.sect.col(local_class);
                let a_dim: usize = orbit.rep().iter().map(|&cc| a.dim(cc)).product();
                let mut terms = Vec::new();
                for (i, v) in amb.into_iter().enumerate() {
                    if !v.is_zero() {
                        terms.push((i / a_dim, i % a_dim, v));
                    }
                }
                factor_orbits.push(orbit);
                factor_vecs.push(terms);
            }
            let mut concat: Vec<Color> = Vec::new();
            for o in &factor_orbits {
                concat.extend_from_slice(o.rep());
            }
            let (sorted_orbit, sigma) = sort_morphism(&concat);
            let block = rhs
                .iter()
                .find(|b| b.orbit == sorted_orbit)
                .expect("populated target block");
            let ty = block
                .pc
                .type_with_orbits(&factor_orbits)
                .expect("factor orbits form a type");
            let mut assignment = vec![0usize; concat.len()];
            let mut pos = 0;
            for (slot, o) in factor_orbits.iter().enumerate() {
                for _ in 0..o.len() {
                    assignment[sigma.apply(pos)] = slot;
                    pos += 1;
                }
            }
            let partition = block.pc.types[ty]
                .rep
                .partition_index(&assignment)
                .expect("assignment realizes the type");
            let concat_a_dims: Vec<usize> = concat.iter().map(|&cc| a.dim(cc)).collect();
            let reorder = tensor_perm(&concat_a_dims, &sigma);
            let a_dim_total: usize = concat_a_dims.iter().product();
            // Accumulate the ambient vector of the assembled element.
            let mut ambient = crate::linalg::zero_vec(block.ambient.dim());
            let counts: Vec<usize> = factor_vecs.iter().map(|fv| fv.len()).collect();
            if counts.iter().any(|&n| n == 0) {
                continue;
            }
            for pick in Odometer::new(&counts) {
                let mut coeff = rat_int(1);
                let mut ks = Vec::with_capacity(factor_vecs.len());
                let mut a_flat = 0usize;
                for (p, fv) in factor_vecs.iter().enumerate() {
                    let (op_idx, a_idx, ref v) = fv[pick[p]];
                    coeff *= v;
                    ks.push(op_idx);
                    let f_dim: usize = factor_orbits[p].rep().iter().map(|&cc| a.dim(cc)).product();
                    a_flat = a_flat * f_dim + a_idx;
                }
                let prop_idx = block.pc.index_of(ty, partition, &ks);
                let global_a = reorder.apply(a_flat);
                ambient[prop_idx * a_dim_total + global_a] += &coeff;
            }
            for (i, v) in block.proj.apply(&ambient).into_iter().enumerate() {
                if !v.is_zero() {
                    phi.set(block.offset + i, col, v);
                }
            }
        }
    }
    Ok(phi)
}

/// Index from a graded-piece basis position back to its orbit block.
struct PieceBlockIndex {
    by_piece: BTreeMap<(usize, Color), Vec<(SeqOrbit, usize, usize)>>,
}

fn piece_block_index(free: &FreeAlgebra) -> PieceBlockIndex {
    let mut by_piece: BTreeMap<(usize, Color), Vec<(SeqOrbit, usize, usize)>> = BTreeMap::new();
    for ((orbit, y), block) in &free.blocks {
        by_piece.entry((orbit.len(), *y)).or_default().push((
            orbit.clone(),
            block.offset,
            block.class_dim(),
        ));
    }
    PieceBlockIndex { by_piece }
}

impl PieceBlockIndex {
    fn locate<'f>(
        &self,
        free: &'f FreeAlgebra,
        w: usize,
        y: Color,
        idx: usize,
    ) -> Option<(SeqOrbit, &'f super::free::FreeBlock, usize)> {
        for (orbit, offset, dim) in self.by_piece.get(&(w, y))? {
            if idx >= *offset && idx < offset + dim {
                return Some((orbit.clone(), free.block(orbit, y)?, idx - offset));
            }
        }
        None
    }
}

/// Block-diagonal matrix of the weighted tensor power of the free functor's
/// action on a coefficient map.
fn lhs_functorial(
    free: &FreeAlgebra,
    f: &[Mat],
    ybar: &SeqOrbit,
    _w: usize,
    lhs: &GradedTensor,
) -> Result<Mat> {
    let fmap = free_map(free, free, f)?;
    let mut m = Mat::zero(lhs.dim(), lhs.dim());
    for s in &lhs.summands {
        let mut kron: Option<Mat> = None;
        for (&wp, &yp) in s.weights.iter().zip(ybar.rep()) {
            let b = fmap
                .block(wp, yp)
                .cloned()
                .unwrap_or_else(|| Mat::zero(free.grading.dim(wp, yp), free.grading.dim(wp, yp)));
            kron = Some(match kron {
                None => b,
                Some(acc) => acc.kron(&b),
            });
        }
        let kron = kron.expect("nonempty outputs");
        for i in 0..kron.rows() {
            for j in 0..kron.cols() {
                let v = kron.get(i, j);
                if !v.is_zero() {
                    m.set(s.offset + i, s.offset + j, v.clone());
                }
            }
        }
    }
    Ok(m)
}

fn rhs_functorial(_a: &ColoredSpace, f: &[Mat], rhs: &[EnvelopeBlock]) -> Result<Mat> {
    let total: usize = rhs.iter().map(|b| b.classes.dim()).sum();
    let mut m = Mat::zero(total, total);
    for block in rhs {
        let ft = tensor_over_seq(f, block.orbit.rep());
        let amb = Mat::identity(block.pc.dim()).kron(&ft);
        let induced = block.proj.mat.matmul(&amb).matmul(&block.sect);
        for i in 0..induced.rows() {
            for j in 0..induced.cols() {
                let v = induced.get(i, j);
                if !v.is_zero() {
                    m.set(block.offset + i, block.offset + j, v.clone());
                }
            }
        }
    }
    Ok(m)
}

/// Multiplication data for an algebra over an operad: one matrix per basis
/// operation of each component, at sorted representatives.
#[derive(Debug, Clone)]
pub struct AlgebraData {
    pub space: ColoredSpace,
    pub mult: BTreeMap<(SeqOrbit, Color), Vec<Mat>>,
}

/// Comultiplication data for a coalgebra over an operad, mirroring
/// `AlgebraData` with arrows reversed.
#[derive(Debug, Clone)]
pub struct CoalgebraData {
    pub space: ColoredSpace,
    pub comult: BTreeMap<(SeqOrbit, Color), Vec<Mat>>,
}

fn mat_residual(x: &Mat, y: &Mat) -> Rat {
    use num::Signed;
    let mut worst = rat_int(0);
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            let d = (x.get(i, j) - y.get(i, j)).abs();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Composable pairs of basis operations within a weight cap: an outer
/// component plus a choice of inner basis operation for every input.
///
/// Enumeration is driven by the weight split of the inner arities, so the
/// cost is proportional to the pairs that survive the cap rather than to
/// the full product of candidate lists.
pub(crate) fn composable_pairs(
    op: &OperadData,
    cap: usize,
) -> Vec<(SeqOrbit, Color, usize, Vec<(SeqOrbit, usize)>)> {
    let mut out = Vec::new();
    for ((orbit, y), comp) in &op.components {
        let n = orbit.len();
        if n > cap {
            continue;
        }
        for total in n..=cap.min(op.cap) {
            for wvec in compositions(total, n, 1) {
                let per_slot: Vec<Vec<(SeqOrbit, usize)>> = orbit
                    .rep()
                    .iter()
                    .zip(&wvec)
                    .map(|(&x, &wj)| {
                        let mut cands = Vec::new();
                        for z in orbits_of_len(op.palette.len(), wj) {
                            for k in 0..op.dim(&z, x) {
                                cands.push((z.clone(), k));
                            }
                        }
                        cands
                    })
                    .collect();
                let counts: Vec<usize> = per_slot.iter().map(|s| s.len()).collect();
                for pick in Odometer::new(&counts) {
                    let inners: Vec<(SeqOrbit, usize)> = pick
                        .iter()
                        .enumerate()
                        .map(|(j, &pi)| per_slot[j][pi].clone())
                        .collect();
                    for mu in 0..comp.dim() {
                        out.push((orbit.clone(), *y, mu, inners.clone()));
                    }
                }
            }
        }
    }
    out
}

/// Checks multiplication data against the operad's laws: stabilizer
/// equivariance, the unit, and compatibility with every composition of
/// basis operations within the cap.
pub fn check_algebra(op: &OperadData, data: &AlgebraData, cap: usize) -> Result<ValidationReport> {
    let cap = cap.min(op.cap);
    let a = &data.space;
    let mut equiv = LawStats::new("stabilizer-equivariance");
    let mut unit = LawStats::new("unit");
    let mut assoc = LawStats::new("composition");

    for ((orbit, y), mats) in &data.mult {
        let comp = op
            .component(orbit, *y)
            .ok_or_else(|| crate::error::Error::MissingComponent(format!("{:?}", orbit.rep())))?;
        if mats.len() != comp.dim() {
            return Err(crate::error::Error::bad_input(format!(
                "expected {} matrices at {:?} -> {y}, got {}",
                comp.dim(),
                orbit.rep(),
                mats.len()
            )));
        }
        let a_dims: Vec<usize> = orbit.rep().iter().map(|&cc| a.dim(cc)).collect();
        for (gi, &t) in orbit.young_gen_positions().iter().enumerate() {
            let g = comp.gens()[gi].to_mat();
            let tp = ActionMat::Perm(
                tensor_perm(&a_dims, &Perm::adjacent(orbit.len(), t))
                    .images()
                    .to_vec(),
            )
            .to_mat();
            for kk in 0..comp.dim() {
                let lhs = Mat::from_fn(a.dim(*y), tp.cols(), |i, j| {
                    let mut acc = rat_int(0);
                    for l in 0..comp.dim() {
                        let c = g.get(l, kk);
                        if !c.is_zero() {
                            acc += c * mats[l].get(i, j);
                        }
                    }
                    acc
                });
                let rhs = mats[kk].matmul(&tp);
                equiv.checked += 1;
                if lhs != rhs {
                    equiv.failures.push(format!(
                        "component {:?} -> {y}, generator at {t}, basis {kk} (residual {})",
                        orbit.rep(),
                        crate::linalg::rat_to_string(&mat_residual(&lhs, &rhs)),
                    ));
                }
            }
        }
    }

    for y in 0..op.palette.len() {
        let u = op.unit_op(y)?;
        let key = (SeqOrbit::from_sorted(vec![y]), y);
        if let Some(mats) = data.mult.get(&key) {
            let mut m = Mat::zero(a.dim(y), a.dim(y));
            for (kk, c) in u.coords.iter().enumerate() {
                if !c.is_zero() {
                    for i in 0..a.dim(y) {
                        for j in 0..a.dim(y) {
                            let v = m.get(i, j) + c * mats[kk].get(i, j);
                            m.set(i, j, v);
                        }
                    }
                }
            }
            unit.checked += 1;
            if m != Mat::identity(a.dim(y)) {
                unit.failures.push(format!(
                    "unit at color {y} (residual {})",
                    crate::linalg::rat_to_string(&mat_residual(&m, &Mat::identity(a.dim(y))))
                ));
            }
        }
    }

    for (orbit, y, mu, inners) in composable_pairs(op, cap) {
        let Some(outer_mats) = data.mult.get(&(orbit.clone(), y)) else {
            continue;
        };
        let inner_mats: Option<Vec<&Mat>> = inners
            .iter()
            .zip(orbit.rep())
            .map(|((z, k), &x)| data.mult.get(&(z.clone(), x)).map(|ms| &ms[*k]))
            .collect();
        let Some(inner_mats) = inner_mats else {
            continue;
        };
        let outer = op.basis_op(orbit.rep(), y, mu)?;
        let inner_ops: Vec<_> = inners
            .iter()
            .zip(orbit.rep())
            .map(|((z, k), &x)| op.basis_op(z.rep(), x, *k))
            .collect::<Result<_>>()?;
        let gamma = op.compose(&outer, &inner_ops)?;
        let wbar: Vec<Color> = gamma.inputs.clone();
        let (worbit, sigma) = sort_morphism(&wbar);
        let w_dims: Vec<usize> = wbar.iter().map(|&cc| a.dim(cc)).collect();
        let tp = ActionMat::Perm(tensor_perm(&w_dims, &sigma).images().to_vec()).to_mat();
        let gamma_mats = data.mult.get(&(worbit.clone(), y));
        let rows = a.dim(y);
        let cols: usize = w_dims.iter().product();
        let mut route1 = Mat::zero(rows, cols);
        if let Some(gm) = gamma_mats {
            for (kk, cval) in gamma.coords.iter().enumerate() {
                if cval.is_zero() {
                    continue;
                }
                let term = gm[kk].matmul(&tp).scale(cval);
                for i in 0..rows {
                    for j in 0..cols {
                        let v = route1.get(i, j) + term.get(i, j);
                        route1.set(i, j, v);
                    }
                }
            }
        } else if !gamma.is_zero() {
            assoc.checked += 1;
            assoc.failures.push(format!(
                "composite at {:?} -> {y} has no multiplication data",
                worbit.rep()
            ));
            continue;
        }
        let mut kron: Option<Mat> = None;
        for im in &inner_mats {
            kron = Some(match kron {
                None => (*im).clone(),
                Some(acc) => acc.kron(im),
            });
        }
        let route2 = outer_mats[mu].matmul(&kron.expect("nonempty inputs"));
        assoc.checked += 1;
        if route1 != route2 {
            assoc.failures.push(format!(
                "outer {:?} -> {y} basis {mu} with inners {:?} (residual {})",
                orbit.rep(),
                inners.iter().map(|(z, k)| (z.rep().to_vec(), *k)).collect::<Vec<_>>(),
                crate::linalg::rat_to_string(&mat_residual(&route1, &route2)),
            ));
        }
    }

    Ok(ValidationReport {
        laws: vec![equiv, unit, assoc],
    })
}

/// Checks comultiplication data: the mirror of `check_algebra`, with
/// transports and compositions reversed.
pub fn check_coalgebra(
    op: &OperadData,
    data: &CoalgebraData,
    cap: usize,
) -> Result<ValidationReport> {
    let cap = cap.min(op.cap);
    let c = &data.space;
    let mut equiv = LawStats::new("stabilizer-equivariance");
    let mut counit = LawStats::new("counit");
    let mut coassoc = LawStats::new("cocomposition");

    for ((orbit, y), mats) in &data.comult {
        let comp = op
            .component(orbit, *y)
            .ok_or_else(|| crate::error::Error::MissingComponent(format!("{:?}", orbit.rep())))?;
        if mats.len() != comp.dim() {
            return Err(crate::error::Error::bad_input(format!(
                "expected {} matrices at {:?} -> {y}, got {}",
                comp.dim(),
                orbit.rep(),
                mats.len()
            )));
        }
        let c_dims: Vec<usize> = orbit.rep().iter().map(|&cc| c.dim(cc)).collect();
        for (gi, &t) in orbit.young_gen_positions().iter().enumerate() {
            let g = comp.gens()[gi].to_mat();
            let tp = ActionMat::Perm(
                tensor_perm(&c_dims, &Perm::adjacent(orbit.len(), t))
                    .images()
                    .to_vec(),
            )
            .to_mat();
            for kk in 0..comp.dim() {
                let lhs = Mat::from_fn(tp.rows(), c.dim(*y), |i, j| {
                    let mut acc = rat_int(0);
                    for l in 0..comp.dim() {
                        let cc = g.get(l, kk);
                        if !cc.is_zero() {
                            acc += cc * mats[l].get(i, j);
                        }
                    }
                    acc
                });
                let rhs = tp.matmul(&mats[kk]);
                equiv.checked += 1;
                if lhs != rhs {
                    equiv.failures.push(format!(
                        "component {:?} -> {y}, generator at {t}, basis {kk} (residual {})",
                        orbit.rep(),
                        crate::linalg::rat_to_string(&mat_residual(&lhs, &rhs)),
                    ));
                }
            }
        }
    }

    for y in 0..op.palette.len() {
        let u = op.unit_op(y)?;
        let key = (SeqOrbit::from_sorted(vec![y]), y);
        if let Some(mats) = data.comult.get(&key) {
            let mut m = Mat::zero(c.dim(y), c.dim(y));
            for (kk, cv) in u.coords.iter().enumerate() {
                if !cv.is_zero() {
                    for i in 0..c.dim(y) {
                        for j in 0..c.dim(y) {
                            let v = m.get(i, j) + cv * mats[kk].get(i, j);
                            m.set(i, j, v);
                        }
                    }
                }
            }
            counit.checked += 1;
            if m != Mat::identity(c.dim(y)) {
                counit.failures.push(format!(
                    "counit at color {y} (residual {})",
                    crate::linalg::rat_to_string(&mat_residual(&m, &Mat::identity(c.dim(y))))
                ));
            }
        }
    }

    for (orbit, y, mu, inners) in composable_pairs(op, cap) {
        let Some(outer_mats) = data.comult.get(&(orbit.clone(), y)) else {
            continue;
        };
        let inner_mats: Option<Vec<&Mat>> = inners
            .iter()
            .zip(orbit.rep())
            .map(|((z, k), &x)| data.comult.get(&(z.clone(), x)).map(|ms| &ms[*k]))
            .collect();
        let Some(inner_mats) = inner_mats else {
            continue;
        };
        let outer = op.basis_op(orbit.rep(), y, mu)?;
        let inner_ops: Vec<_> = inners
            .iter()
            .zip(orbit.rep())
            .map(|((z, k), &x)| op.basis_op(z.rep(), x, *k))
            .collect::<Result<_>>()?;
        let gamma = op.compose(&outer, &inner_ops)?;
        let wbar: Vec<Color> = gamma.inputs.clone();
        let (worbit, sigma) = sort_morphism(&wbar);
        let w_dims: Vec<usize> = wbar.iter().map(|&cc| c.dim(cc)).collect();
        let tp_inv = ActionMat::Perm(
            tensor_perm(&w_dims, &sigma).inverse().images().to_vec(),
        )
        .to_mat();
        let gamma_mats = data.comult.get(&(worbit.clone(), y));
        let rows: usize = w_dims.iter().product();
        let cols = c.dim(y);
        let mut route1 = Mat::zero(rows, cols);
        if let Some(gm) = gamma_mats {
            for (kk, cval) in gamma.coords.iter().enumerate() {
                if cval.is_zero() {
                    continue;
                }
                let term = tp_inv.matmul(&gm[kk]).scale(cval);
                for i in 0..rows {
                    for j in 0..cols {
                        let v = route1.get(i, j) + term.get(i, j);
                        route1.set(i, j, v);
                    }
                }
            }
        } else if !gamma.is_zero() {
            coassoc.checked += 1;
            coassoc.failures.push(format!(
                "composite at {:?} -> {y} has no comultiplication data",
                worbit.rep()
            ));
            continue;
        }
        let mut kron: Option<Mat> = None;
        for im in &inner_mats {
            kron = Some(match kron {
                None => (*im).clone(),
                Some(acc) => acc.kron(im),
            });
        }
        let route2 = kron.expect("nonempty inputs").matmul(&outer_mats[mu]);
        coassoc.checked += 1;
        if route1 != route2 {
            coassoc.failures.push(format!(
                "outer {:?} -> {y} basis {mu} with inners {:?} (residual {})",
                orbit.rep(),
                inners.iter().map(|(z, k)| (z.rep().to_vec(), *k)).collect::<Vec<_>>(),
                crate::linalg::rat_to_string(&mat_residual(&route1, &route2)),
            ));
        }
    }

    Ok(ValidationReport {
        laws: vec![equiv, counit, coassoc],
    })
}
