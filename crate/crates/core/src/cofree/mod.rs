//! Jets, translations, Hankel rank profiles, and represented elements.
//!
//! A jet is a finite window onto an invariant functional on the free
//! carrier: one linear functional per input orbit up to a weight cap. The
//! question this module answers is whether such a window is the shadow of a
//! finite-dimensional coalgebra element, and if so, it produces the element:
//! a state space, comultiplication matrices, an output map, and an initial
//! vector whose expansion reproduces the jet exactly.

use std::collections::BTreeMap;

use num::Zero;

use crate::error::{Error, Result};
use crate::functors::{
    check_coalgebra, composable_pairs, free_algebra, tensor_over_seq, tensor_perm, CoalgebraData,
    ColoredSpace, FreeAlgebra,
};
use crate::linalg::{rat_int, unit_vec, zero_vec, ActionMat, Mat, Rat};
use crate::operad::{
    Component, GammaCtx, GammaSource, LawStats, OpVector, OperadData, ValidationReport,
};
use crate::seq::{Color, Perm, SeqOrbit, sort_morphism};
use crate::util::{compositions, flat_index, unflatten, Odometer};

/// A weight-truncated invariant functional on the free carrier over a
/// colored space.
///
/// For every input orbit `x̄` with `|x̄| <= cap` the jet stores a functional
/// on `P(x̄; output) ⊗ C^⊗x̄` at the sorted representative, sparsely: only
/// nonzero values appear, keyed by `(operation index, tensor index)` with
/// tensor indices flattened row-major over the representative. Blocks must
/// be compatible with the stabilizer action; `validate_jet` checks this.
#[derive(Debug, Clone)]
pub struct Jet {
    pub operad: String,
    pub target: ColoredSpace,
    pub output: Color,
    pub cap: usize,
    pub entries: BTreeMap<SeqOrbit, BTreeMap<(usize, usize), Rat>>,
}

impl Jet {
    pub fn zero(operad: impl Into<String>, target: ColoredSpace, output: Color, cap: usize) -> Jet {
        Jet {
            operad: operad.into(),
            target,
            output,
            cap,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, orbit: &SeqOrbit, k: usize, t: usize) -> Rat {
        self.entries
            .get(orbit)
            .and_then(|b| b.get(&(k, t)))
            .cloned()
            .unwrap_or_else(|| rat_int(0))
    }

    /// Sets one value, keeping the representation normalized: zeros are
    /// removed rather than stored, and empty blocks are dropped.
    pub fn set(&mut self, orbit: &SeqOrbit, k: usize, t: usize, v: Rat) {
        let block = self.entries.entry(orbit.clone()).or_default();
        if v.is_zero() {
            block.remove(&(k, t));
        } else {
            block.insert((k, t), v);
        }
        if self.entries.get(orbit).is_some_and(|b| b.is_empty()) {
            self.entries.remove(orbit);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, r: &Rat) -> Jet {
        let mut out = self.clone();
        if r.is_zero() {
            out.entries.clear();
            return out;
        }
        for block in out.entries.values_mut() {
            for v in block.values_mut() {
                *v = &*v * r;
            }
        }
        out
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        if !same_shape(self, other) {
            return Err(Error::bad_input(
                "jet addition requires matching operad, target, output color, and cap",
            ));
        }
        let mut out = self.clone();
        for (orbit, block) in &other.entries {
            for (&(k, t), v) in block {
                let sum = out.get(orbit, k, t) + v;
                out.set(orbit, k, t, sum);
            }
        }
        Ok(out)
    }

    /// Forgets all blocks above a smaller cap.
    pub fn truncate(&self, cap: usize) -> Jet {
        let mut out = self.clone();
        out.cap = self.cap.min(cap);
        out.entries.retain(|orbit, _| orbit.len() <= cap);
        out
    }
}

fn same_shape(a: &Jet, b: &Jet) -> bool {
    a.operad == b.operad
        && a.output == b.output
        && a.cap == b.cap
        && a.target.dims() == b.target.dims()
}

/// Structural equality of normalized jets, shape included.
pub fn jets_equal(a: &Jet, b: &Jet) -> bool {
    same_shape(a, b) && a.entries == b.entries
}

/// Transport of one sparse block along a stabilizer generator: the moved
/// functional `(g·f)(v ⊗ φ) = f(g(v) ⊗ tp(φ))`, which equals `f` exactly
/// when `f` is invariant under the generator.
fn transport_block(
    block: &BTreeMap<(usize, usize), Rat>,
    g: &ActionMat,
    tp: &Perm,
    op_dim: usize,
) -> BTreeMap<(usize, usize), Rat> {
    let mut out: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
    let tp_inv = tp.inverse();
    match g {
        ActionMat::Perm(images) => {
            let pi = Perm::from_images(images.clone());
            let pi_inv = pi.inverse();
            for (&(k, t), v) in block {
                out.insert((pi_inv.apply(k), tp_inv.apply(t)), v.clone());
            }
        }
        ActionMat::Dense(m) => {
            for (&(k1, t1), v) in block {
                for k in 0..op_dim {
                    let c = m.get(k1, k);
                    if c.is_zero() {
                        continue;
                    }
                    let e = out.entry((k, tp_inv.apply(t1))).or_insert_with(|| rat_int(0));
                    *e += c * v;
                }
            }
            out.retain(|_, v| !v.is_zero());
        }
    }
    out
}

/// Checks a jet against the operad: block shapes and stabilizer
/// equivariance. Violations are reported as data, not errors.
pub fn validate_jet(op: &OperadData, jet: &Jet) -> ValidationReport {
    let mut shape = LawStats::new("shape");
    let mut equiv = LawStats::new("stabilizer-equivariance");

    shape.checked += 1;
    if jet.target.num_colors() != op.palette.len() {
        shape
            .failures
            .push("target color count differs from the palette".into());
    }
    if jet.output >= op.palette.len() {
        shape.failures.push("output color out of range".into());
    }
    if jet.cap > op.cap {
        shape
            .failures
            .push(format!("jet cap {} exceeds operad cap {}", jet.cap, op.cap));
    }

    for (orbit, block) in &jet.entries {
        shape.checked += 1;
        let Some(comp) = op.component(orbit, jet.output) else {
            shape
                .failures
                .push(format!("no component at orbit {:?}", orbit.rep()));
            continue;
        };
        if orbit.len() > jet.cap {
            shape
                .failures
                .push(format!("block at {:?} lies above the cap", orbit.rep()));
        }
        let dims: Vec<usize> = orbit.rep().iter().map(|&c| jet.target.dim(c)).collect();
        let tdim: usize = dims.iter().product();
        let mut in_range = true;
        for (&(k, t), v) in block {
            if k >= comp.dim() || t >= tdim {
                in_range = false;
                shape
                    .failures
                    .push(format!("index ({k}, {t}) out of range at {:?}", orbit.rep()));
            }
            if v.is_zero() {
                shape
                    .failures
                    .push(format!("stored zero at {:?}", orbit.rep()));
            }
        }
        if !in_range {
            continue;
        }
        for (gi, &pos) in comp.gen_positions().iter().enumerate() {
            equiv.checked += 1;
            let tp = tensor_perm(&dims, &Perm::adjacent(orbit.len(), pos));
            let moved = transport_block(block, &comp.gens()[gi], &tp, comp.dim());
            if moved != *block {
                equiv.failures.push(format!(
                    "block at {:?} moves under the transposition at {pos}",
                    orbit.rep()
                ));
            }
        }
    }

    ValidationReport {
        laws: vec![shape, equiv],
    }
}

/// Smallest stabilizer-invariant block containing `seed`, built by closing
/// the seed under the generator transports. Only permutation actions are
/// supported; a seed that cannot be extended consistently is rejected.
pub fn equivariant_closure(
    comp: &Component,
    dims: &[usize],
    seed: BTreeMap<(usize, usize), Rat>,
) -> Result<BTreeMap<(usize, usize), Rat>> {
    let n = comp.inputs.len();
    let mut rels: Vec<(Perm, Perm, Perm, Perm)> = Vec::new();
    for (gi, &pos) in comp.gen_positions().iter().enumerate() {
        let pi = match &comp.gens()[gi] {
            ActionMat::Perm(images) => Perm::from_images(images.clone()),
            ActionMat::Dense(_) => {
                return Err(Error::bad_input(
                    "equivariant closure requires a permutation stabilizer action",
                ))
            }
        };
        let tp = tensor_perm(dims, &Perm::adjacent(n, pos));
        rels.push((pi.inverse(), tp.inverse(), pi, tp));
    }

    let mut out: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
    for ((k, t), v) in seed {
        if !v.is_zero() {
            out.insert((k, t), v);
        }
    }
    let mut queue: Vec<(usize, usize)> = out.keys().cloned().collect();
    // invariance forces f(k, t) = f(pi(k), tp(t)) for every generator
    while let Some((k, t)) = queue.pop() {
        let v = out[&(k, t)].clone();
        for (pi, tp, pi_inv, tp_inv) in &rels {
            for key in [
                (pi.apply(k), tp.apply(t)),
                (pi_inv.apply(k), tp_inv.apply(t)),
            ] {
                match out.get(&key) {
                    Some(w) if *w == v => {}
                    Some(_) => {
                        return Err(Error::EquivarianceViolation(format!(
                            "seed forces two values at ({}, {})",
                            key.0, key.1
                        )))
                    }
                    None => {
                        out.insert(key, v.clone());
                        queue.push(key);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// An element of one ambient block `P(x̄; color) ⊗ C^⊗x̄` at the sorted
/// representative, written as a sparse sum of `(operation, tensor)` basis
/// vectors. Used as composition fodder when pairing jets against classes.
#[derive(Debug, Clone)]
pub struct CoElement {
    pub orbit: SeqOrbit,
    pub color: Color,
    pub terms: Vec<(usize, usize, Rat)>,
}

/// Ambient representative of one free-algebra class, read off the section.
pub fn co_element(free: &FreeAlgebra, w: usize, color: Color, class: usize) -> Result<CoElement> {
    let (block, local) = free.locate(w, color, class).ok_or_else(|| {
        Error::bad_input(format!("no class {class} at weight {w}, color {color}"))
    })?;
    let tdim: usize = block
        .orbit
        .rep()
        .iter()
        .map(|&c| free.algebra.dim(c))
        .product();
    let mut terms = Vec::new();
    for amb in 0..block.ambient.dim() {
        let v = block.sect.get(amb, local);
        if !v.is_zero() {
            terms.push((amb / tdim, amb % tdim, v.clone()));
        }
    }
    Ok(CoElement {
        orbit: block.orbit.clone(),
        color,
        terms,
    })
}

struct CtxEntry {
    slots: Vec<(SeqOrbit, Color)>,
    slot_tdims: Vec<usize>,
    sigma: Perm,
    t_orbit: SeqOrbit,
    tp: Perm,
}

/// Cache of sort morphisms and tensor transports, keyed by the head orbit
/// and the slot orbits. These depend only on the operad's palette and the
/// target dimensions, so one memo can serve many jets over the same target.
pub struct EvalMemo {
    ctxs: BTreeMap<(SeqOrbit, Vec<SeqOrbit>), CtxEntry>,
}

impl EvalMemo {
    pub fn new() -> Self {
        EvalMemo {
            ctxs: BTreeMap::new(),
        }
    }
}

impl Default for EvalMemo {
    fn default() -> Self {
        Self::new()
    }
}

/// Value of `jet` on the composite of a head basis operation with one
/// ambient element per slot: the sparse pairing that never materializes the
/// composite as a dense vector.
///
/// `fills[j]` must live at the color of position `j` of the head's sorted
/// representative, and the total weight must stay within the jet's cap.
pub fn eval_element(
    op: &OperadData,
    jet: &Jet,
    head_orbit: &SeqOrbit,
    head_idx: usize,
    fills: &[&CoElement],
    memo: &mut EvalMemo,
) -> Rat {
    debug_assert_eq!(fills.len(), head_orbit.len());
    debug_assert!(fills
        .iter()
        .zip(head_orbit.rep())
        .all(|(e, &c)| e.color == c));

    let key = (
        head_orbit.clone(),
        fills.iter().map(|e| e.orbit.clone()).collect::<Vec<_>>(),
    );
    let ent = memo.ctxs.entry(key).or_insert_with(|| {
        let slots: Vec<(SeqOrbit, Color)> =
            fills.iter().map(|e| (e.orbit.clone(), e.color)).collect();
        let w_seq: Vec<Color> = slots
            .iter()
            .flat_map(|(o, _)| o.rep().iter().copied())
            .collect();
        let (t_orbit, sigma) = sort_morphism(&w_seq);
        let dims: Vec<usize> = w_seq.iter().map(|&c| jet.target.dim(c)).collect();
        let tp = tensor_perm(&dims, &sigma);
        let slot_tdims: Vec<usize> = fills
            .iter()
            .map(|e| e.orbit.rep().iter().map(|&c| jet.target.dim(c)).product())
            .collect();
        CtxEntry {
            slots,
            slot_tdims,
            sigma,
            t_orbit,
            tp,
        }
    });

    let Some(block) = jet.entries.get(&ent.t_orbit) else {
        return rat_int(0);
    };
    let gctx = GammaCtx {
        outer_orbit: head_orbit,
        output: jet.output,
        slots: &ent.slots,
        sigma_w: &ent.sigma,
        t_orbit: &ent.t_orbit,
    };

    let counts: Vec<usize> = fills.iter().map(|e| e.terms.len()).collect();
    let mut gamma_cache: BTreeMap<Vec<usize>, Vec<(usize, Rat)>> = BTreeMap::new();
    let mut acc = rat_int(0);
    for pick in Odometer::new(&counts) {
        let mut inner = Vec::with_capacity(fills.len());
        let mut flat = 0usize;
        let mut coeff = rat_int(1);
        for (j, &pj) in pick.iter().enumerate() {
            let (k, t, c) = &fills[j].terms[pj];
            inner.push(*k);
            flat = flat * ent.slot_tdims[j] + t;
            coeff *= c;
        }
        let tpos = ent.tp.apply(flat);
        let gammas = gamma_cache
            .entry(inner.clone())
            .or_insert_with(|| op.gamma.basis_gamma(&gctx, head_idx, &inner));
        for (bi, co) in gammas.iter() {
            if let Some(v) = block.get(&(*bi, tpos)) {
                acc += v * co * &coeff;
            }
        }
    }
    acc
}

/// Pairing of a jet with one free-algebra class at the jet's output color,
/// evaluated through the section. Invariance of the jet makes the result
/// independent of the chosen section.
pub fn pair_class(free: &FreeAlgebra, jet: &Jet, w: usize, class: usize) -> Result<Rat> {
    let (block, local) = free.locate(w, jet.output, class).ok_or_else(|| {
        Error::bad_input(format!("no class {class} at weight {w} and the jet's output color"))
    })?;
    let Some(jb) = jet.entries.get(&block.orbit) else {
        return Ok(rat_int(0));
    };
    let tdim: usize = block
        .orbit
        .rep()
        .iter()
        .map(|&c| jet.target.dim(c))
        .product();
    let mut acc = rat_int(0);
    for amb in 0..block.ambient.dim() {
        let s = block.sect.get(amb, local);
        if s.is_zero() {
            continue;
        }
        if let Some(v) = jb.get(&(amb / tdim, amb % tdim)) {
            acc += s * v;
        }
    }
    Ok(acc)
}

/// Weight-one readout of a jet: its values on the unit operation tensored
/// with each basis vector of the target at the output color.
pub fn unit_pairing(op: &OperadData, jet: &Jet) -> Result<Vec<Rat>> {
    let y = jet.output;
    let u = op
        .units
        .get(&y)
        .ok_or_else(|| Error::MissingComponent(format!("unit at color {y}")))?;
    let orbit = SeqOrbit::of(&[y]);
    let cdim = jet.target.dim(y);
    let mut out = zero_vec(cdim);
    if let Some(block) = jet.entries.get(&orbit) {
        for (b, slot) in out.iter_mut().enumerate() {
            for (k, uk) in u.iter().enumerate() {
                if let Some(v) = block.get(&(k, b)) {
                    *slot += uk * v;
                }
            }
        }
    }
    Ok(out)
}

/// A one-hole composition pattern: a head basis operation with every slot
/// but one filled by a free-algebra class. Applying it to a jet gives the
/// translated jet on the hole color.
///
/// `args[j]` is the `(weight, class index)` filling of the j-th non-hole
/// slot, in slot order of the sorted head representative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Context {
    pub orbit: SeqOrbit,
    pub head_idx: usize,
    pub slot: usize,
    pub args: Vec<(usize, usize)>,
}

impl Context {
    /// Total weight of the filled slots; the hole adds the weight of
    /// whatever is plugged in later.
    pub fn weight(&self) -> usize {
        self.args.iter().map(|&(w, _)| w).sum()
    }

    pub fn hole_color(&self) -> Color {
        self.orbit.rep()[self.slot]
    }

    /// Slot position of the j-th argument.
    fn arg_slot(&self, j: usize) -> usize {
        if j < self.slot {
            j
        } else {
            j + 1
        }
    }
}

/// Translation of a jet by a context: the functional
/// `c ↦ jet(head(args…, c, args…))` on the hole color, with cap reduced by
/// the context weight.
pub fn translate(op: &OperadData, jet: &Jet, ctx: &Context) -> Result<Jet> {
    let n = ctx.orbit.len();
    let comp = op
        .component(&ctx.orbit, jet.output)
        .ok_or_else(|| Error::MissingComponent(format!("component at {:?}", ctx.orbit.rep())))?;
    if ctx.slot >= n || ctx.args.len() + 1 != n || ctx.head_idx >= comp.dim() {
        return Err(Error::bad_input("malformed context"));
    }
    let w = ctx.weight();
    if w + 1 > jet.cap {
        return Err(Error::CapExceeded {
            requested: w + 1,
            cap: jet.cap,
        });
    }
    let z = ctx.hole_color();
    let new_cap = jet.cap - w;

    let free = free_algebra(op, &jet.target, w)?;
    let mut arg_elems = Vec::with_capacity(ctx.args.len());
    for (j, &(aw, ac)) in ctx.args.iter().enumerate() {
        let color = ctx.orbit.rep()[ctx.arg_slot(j)];
        arg_elems.push(co_element(&free, aw, color, ac)?);
    }

    let mut out = Jet::zero(jet.operad.clone(), jet.target.clone(), z, new_cap);
    let mut memo = EvalMemo::new();
    for ((orbit, y), comp2) in &op.components {
        if *y != z || orbit.len() > new_cap {
            continue;
        }
        let tdim: usize = orbit.rep().iter().map(|&c| jet.target.dim(c)).product();
        for k in 0..comp2.dim() {
            for t in 0..tdim {
                let hole = CoElement {
                    orbit: orbit.clone(),
                    color: z,
                    terms: vec![(k, t, rat_int(1))],
                };
                let mut fills: Vec<&CoElement> = Vec::with_capacity(n);
                let mut ai = 0;
                for pos in 0..n {
                    if pos == ctx.slot {
                        fills.push(&hole);
                    } else {
                        fills.push(&arg_elems[ai]);
                        ai += 1;
                    }
                }
                let v = eval_element(op, jet, &ctx.orbit, ctx.head_idx, &fills, &mut memo);
                if !v.is_zero() {
                    out.set(orbit, k, t, v);
                }
            }
        }
    }
    Ok(out)
}

/// Rank profile of the translation pairing of a jet, level by level.
///
/// Level `l` pairs contexts of weight at most `l/2` against classes of
/// weight at most `l - l/2`, so every probed composite stays within the
/// cap; `ranks[l-1]` sums the resulting ranks over hole colors. The jet is
/// the shadow of a finite-dimensional element exactly when the profile
/// stops growing, which the final two levels witness.
#[derive(Debug, Clone)]
pub struct HankelReport {
    pub cap: usize,
    pub row_budget: usize,
    pub col_budget: usize,
    pub ranks: Vec<usize>,
    pub stabilized: bool,
    /// Rank per hole color at the full budgets.
    pub state_dims: Vec<usize>,
    /// Contexts whose rows realize the final rank, per hole color.
    pub witnesses: Vec<Vec<Context>>,
}

/// Incremental row-space basis over the rationals.
struct RowBasis {
    rows: Vec<(usize, Vec<Rat>)>,
}

impl RowBasis {
    fn new() -> Self {
        RowBasis { rows: Vec::new() }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; a surviving vector joins it.
    fn insert(&mut self, mut v: Vec<Rat>) -> bool {
        loop {
            let Some(p) = v.iter().position(|x| !x.is_zero()) else {
                return false;
            };
            match self.rows.iter().find(|(q, _)| *q == p) {
                Some((_, r)) => {
                    let c = v[p].clone();
                    for (a, b) in v.iter_mut().zip(r) {
                        *a -= &c * b;
                    }
                }
                None => {
                    let inv = v[p].clone();
                    for x in v.iter_mut() {
                        *x = &*x / &inv;
                    }
                    self.rows.push((p, v));
                    return true;
                }
            }
        }
    }
}

/// The materialized pairing grid behind a Hankel report: column classes and
/// their ambient representatives per color, and all context rows with their
/// pairing vectors, in context-weight order.
struct Grid {
    free: FreeAlgebra,
    /// Per color: `(weight, class)` in ascending weight order.
    cols: Vec<Vec<(usize, usize)>>,
    col_elems: Vec<Vec<CoElement>>,
    /// Per hole color: contexts with their full pairing rows.
    rows: Vec<Vec<(Context, Vec<Rat>)>>,
}

impl Grid {
    /// Number of columns of color `z` with weight at most `cb`.
    fn col_count(&self, z: Color, cb: usize) -> usize {
        self.cols[z].iter().take_while(|&&(w, _)| w <= cb).count()
    }
}

fn build_grid(op: &OperadData, jet: &Jet) -> Result<(Grid, HankelReport)> {
    if jet.cap == 0 {
        return Err(Error::bad_input("jet cap must be at least one"));
    }
    if jet.cap > op.cap {
        return Err(Error::CapExceeded {
            requested: jet.cap,
            cap: op.cap,
        });
    }
    let ncolors = op.palette.len();
    let row_budget = jet.cap / 2;
    let col_budget = jet.cap - row_budget;
    let free = free_algebra(op, &jet.target, col_budget)?;

    let mut cols: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ncolors];
    let mut col_elems: Vec<Vec<CoElement>> = vec![Vec::new(); ncolors];
    for z in 0..ncolors {
        for w in 1..=col_budget {
            for class in 0..free.grading.dim(w, z) {
                cols[z].push((w, class));
                col_elems[z].push(co_element(&free, w, z, class)?);
            }
        }
    }

    let mut rows: Vec<Vec<(Context, Vec<Rat>)>> = vec![Vec::new(); ncolors];
    let mut memo = EvalMemo::new();
    for r in 0..=row_budget {
        for ((orbit, y), comp) in &op.components {
            if *y != jet.output {
                continue;
            }
            let n = orbit.len();
            for slot in 0..n {
                let z = orbit.rep()[slot];
                for wvec in compositions(r, n - 1, 1) {
                    let counts: Vec<usize> = wvec
                        .iter()
                        .enumerate()
                        .map(|(j, &wj)| {
                            let pos = if j < slot { j } else { j + 1 };
                            free.grading.dim(wj, orbit.rep()[pos])
                        })
                        .collect();
                    for classes in Odometer::new(&counts) {
                        let args: Vec<(usize, usize)> =
                            wvec.iter().copied().zip(classes.iter().copied()).collect();
                        for head_idx in 0..comp.dim() {
                            let ctx = Context {
                                orbit: orbit.clone(),
                                head_idx,
                                slot,
                                args: args.clone(),
                            };
                            let mut row = Vec::with_capacity(cols[z].len());
                            for ci in 0..cols[z].len() {
                                let mut fills: Vec<&CoElement> = Vec::with_capacity(n);
                                let mut ai = 0;
                                for pos in 0..n {
                                    if pos == slot {
                                        fills.push(&col_elems[z][ci]);
                                    } else {
                                        let (aw, ac) = args[ai];
                                        let zc = orbit.rep()[pos];
                                        fills.push(
                                            &col_elems[zc][self_col_index(&cols[zc], aw, ac)],
                                        );
                                        ai += 1;
                                    }
                                }
                                row.push(eval_element(
                                    op, jet, orbit, head_idx, &fills, &mut memo,
                                ));
                            }
                            rows[z].push((ctx, row));
                        }
                    }
                }
            }
        }
    }

    let grid = Grid {
        free,
        cols,
        col_elems,
        rows,
    };

    let mut ranks = Vec::with_capacity(jet.cap);
    let mut witnesses: Vec<Vec<Context>> = vec![Vec::new(); ncolors];
    let mut state_dims = vec![0usize; ncolors];
    for l in 1..=jet.cap {
        let rb = l / 2;
        let cb = l - rb;
        let mut total = 0;
        for z in 0..ncolors {
            let ncl = grid.col_count(z, cb);
            let mut basis = RowBasis::new();
            for (ctx, row) in &grid.rows[z] {
                if ctx.weight() > rb {
                    continue;
                }
                if basis.rank() == ncl {
                    break;
                }
                let accepted = basis.insert(row[..ncl].to_vec());
                if accepted && l == jet.cap {
                    witnesses[z].push(ctx.clone());
                }
            }
            if l == jet.cap {
                state_dims[z] = basis.rank();
            }
            total += basis.rank();
        }
        ranks.push(total);
    }

    let stabilized = if jet.cap >= 2 {
        ranks[jet.cap - 1] == ranks[jet.cap - 2]
    } else {
        ranks[0] == 0
    };
    let report = HankelReport {
        cap: jet.cap,
        row_budget,
        col_budget,
        ranks,
        stabilized,
        state_dims,
        witnesses,
    };
    Ok((grid, report))
}

fn self_col_index(cols: &[(usize, usize)], w: usize, class: usize) -> usize {
    cols.iter()
        .position(|&(cw, cc)| cw == w && cc == class)
        .expect("argument class within the column budget")
}

/// Rank profile of the jet's translation pairing.
pub fn hankel(op: &OperadData, jet: &Jet) -> Result<HankelReport> {
    build_grid(op, jet).map(|(_, report)| report)
}

/// A coalgebra element in matrix form: finitely many states per color,
/// comultiplication matrices per component, a readout into the target, and
/// an initial state. Expansion turns it back into a jet.
#[derive(Debug, Clone)]
pub struct RepresentedElement {
    pub operad: String,
    pub target: ColoredSpace,
    pub cap: usize,
    pub states: ColoredSpace,
    /// Per component `(x̄, y)` and basis operation: a matrix from states at
    /// `y` to the tensor of states over `x̄`, rows flattened row-major.
    /// Absent components comultiply to zero.
    pub comult: BTreeMap<(SeqOrbit, Color), Vec<Mat>>,
    /// Per color: the readout from states into the target.
    pub output: Vec<Mat>,
    pub initial_color: Color,
    pub initial: Vec<Rat>,
}

impl RepresentedElement {
    pub fn coalgebra(&self) -> CoalgebraData {
        CoalgebraData {
            space: self.states.clone(),
            comult: self.comult.clone(),
        }
    }

    /// The same coalgebra, pointed at a different state vector.
    pub fn with_initial(&self, color: Color, initial: Vec<Rat>) -> Result<RepresentedElement> {
        if color >= self.states.num_colors() || initial.len() != self.states.dim(color) {
            return Err(Error::bad_input("initial vector has the wrong dimension"));
        }
        let mut out = self.clone();
        out.initial_color = color;
        out.initial = initial;
        Ok(out)
    }

    /// Readout of the initial state.
    pub fn counit(&self) -> Vec<Rat> {
        self.output[self.initial_color].apply(&self.initial)
    }
}

/// Jet of a represented element up to `cap`: every block is the readout of
/// the comultiplied initial state.
pub fn expand(op: &OperadData, e: &RepresentedElement, cap: usize) -> Result<Jet> {
    if cap > e.cap {
        return Err(Error::CapExceeded {
            requested: cap,
            cap: e.cap,
        });
    }
    if e.operad != op.name {
        return Err(Error::bad_input(format!(
            "element was built over '{}', not '{}'",
            e.operad, op.name
        )));
    }
    let mut jet = Jet::zero(
        e.operad.clone(),
        e.target.clone(),
        e.initial_color,
        cap,
    );
    for ((orbit, y), mats) in &e.comult {
        if *y != e.initial_color || orbit.len() > cap {
            continue;
        }
        let readout = tensor_over_seq(&e.output, orbit.rep());
        for (k, m) in mats.iter().enumerate() {
            let w = readout.apply(&m.apply(&e.initial));
            for (t, v) in w.into_iter().enumerate() {
                if !v.is_zero() {
                    jet.set(orbit, k, t, v);
                }
            }
        }
    }
    Ok(jet)
}

/// One comultiplication of the initial state, as a sum of pure tensors of
/// re-pointed copies of the element.
pub fn comult_terms(
    e: &RepresentedElement,
    orbit: &SeqOrbit,
    k: usize,
) -> Result<Vec<(Rat, Vec<RepresentedElement>)>> {
    let Some(mats) = e.comult.get(&(orbit.clone(), e.initial_color)) else {
        return Ok(Vec::new());
    };
    if k >= mats.len() {
        return Err(Error::bad_input("operation index out of range"));
    }
    let dims: Vec<usize> = orbit.rep().iter().map(|&c| e.states.dim(c)).collect();
    let v = mats[k].apply(&e.initial);
    let mut terms = Vec::new();
    for (flat, coeff) in v.into_iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let multi = unflatten(flat, &dims);
        let mut factors = Vec::with_capacity(multi.len());
        for (p, &tp) in multi.iter().enumerate() {
            let c = orbit.rep()[p];
            factors.push(e.with_initial(c, unit_vec(e.states.dim(c), tp))?);
        }
        terms.push((coeff, factors));
    }
    Ok(terms)
}

/// Wraps user-supplied coalgebra data as a represented element, gated on
/// the coalgebra laws.
pub fn lift(
    op: &OperadData,
    target: ColoredSpace,
    data: CoalgebraData,
    output: Vec<Mat>,
    initial_color: Color,
    initial: Vec<Rat>,
    cap: usize,
) -> Result<RepresentedElement> {
    let ncolors = op.palette.len();
    if data.space.num_colors() != ncolors || target.num_colors() != ncolors {
        return Err(Error::bad_input(
            "state and target spaces must cover the palette",
        ));
    }
    if output.len() != ncolors {
        return Err(Error::bad_input("one readout matrix per color required"));
    }
    for z in 0..ncolors {
        if output[z].rows() != target.dim(z) || output[z].cols() != data.space.dim(z) {
            return Err(Error::bad_input(format!(
                "readout at color {z} has the wrong shape"
            )));
        }
    }
    if initial_color >= ncolors || initial.len() != data.space.dim(initial_color) {
        return Err(Error::bad_input("initial vector has the wrong dimension"));
    }
    let report = check_coalgebra(op, &data, cap)?;
    if !report.ok() {
        return Err(Error::bad_input(format!(
            "comultiplication data fails {} coalgebra law instances",
            report.failure_count()
        )));
    }
    Ok(RepresentedElement {
        operad: op.name.clone(),
        target,
        cap,
        states: data.space,
        comult: data.comult,
        output,
        initial_color,
        initial,
    })
}

/// Why a jet could not be realized, together with the rank evidence.
#[derive(Debug, Clone)]
pub struct RealizationFailure {
    pub report: HankelReport,
    pub reason: String,
}

/// Outcome of `realize`: either a verified element or a diagnosed failure.
/// Failure is data, not an error; errors are reserved for malformed input.
#[derive(Debug, Clone)]
pub enum Realization {
    Realized(RepresentedElement),
    Failed(RealizationFailure),
}

/// Reconstructs a represented element from a jet, or explains why none
/// exists within the cap.
///
/// States are independent translation rows of the Hankel grid; the
/// comultiplication is solved from pairing identities against column
/// tuples, then everything is verified: coalgebra laws and an exact
/// expansion round trip. Only a fully verified element is `Realized`.
pub fn realize(op: &OperadData, jet: &Jet) -> Result<Realization> {
    if jet.cap == 0 {
        return Err(Error::bad_input("jet cap must be at least one"));
    }
    let ncolors = op.palette.len();
    if jet.is_zero() {
        let states = ColoredSpace::standard(&vec![0; ncolors]);
        let output = (0..ncolors)
            .map(|z| Mat::zero(jet.target.dim(z), 0))
            .collect();
        return Ok(Realization::Realized(RepresentedElement {
            operad: jet.operad.clone(),
            target: jet.target.clone(),
            cap: jet.cap,
            states,
            comult: BTreeMap::new(),
            output,
            initial_color: jet.output,
            initial: Vec::new(),
        }));
    }

    let (grid, report) = build_grid(op, jet)?;
    if !report.stabilized {
        return Ok(Realization::Failed(RealizationFailure {
            report,
            reason: "rank profile still growing at the weight cap".into(),
        }));
    }

    let s_dims = report.state_dims.clone();
    let states = ColoredSpace::standard(&s_dims);

    // one translated jet and one pairing row per state
    let mut state_jets: Vec<Vec<Jet>> = Vec::with_capacity(ncolors);
    let mut r_mats: Vec<Mat> = Vec::with_capacity(ncolors);
    let mut w_js: Vec<Vec<usize>> = Vec::with_capacity(ncolors);
    for z in 0..ncolors {
        let mut jets = Vec::with_capacity(report.witnesses[z].len());
        let mut rows = Vec::with_capacity(report.witnesses[z].len());
        let mut ws = Vec::with_capacity(report.witnesses[z].len());
        for ctx in &report.witnesses[z] {
            ws.push(ctx.weight());
            jets.push(translate(op, jet, ctx)?);
            let full = grid.rows[z]
                .iter()
                .find(|(c, _)| c == ctx)
                .expect("witness row present")
                .1
                .clone();
            rows.push(full);
        }
        r_mats.push(if rows.is_empty() {
            Mat::zero(0, grid.cols[z].len())
        } else {
            Mat::from_rows(rows)
        });
        state_jets.push(jets);
        w_js.push(ws);
    }

    // initial state: coordinates of the jet's own pairing row
    let y0 = jet.output;
    let mut f_row = Vec::with_capacity(grid.cols[y0].len());
    for &(w, class) in &grid.cols[y0] {
        f_row.push(pair_class(&grid.free, jet, w, class)?);
    }
    let a = Mat::from_fn(grid.cols[y0].len(), s_dims[y0], |c, i| {
        r_mats[y0].get(i, c).clone()
    });
    let Some(initial) = a.solve(&f_row) else {
        return Ok(Realization::Failed(RealizationFailure {
            report,
            reason: "the jet's pairing row leaves the span of the state rows".into(),
        }));
    };

    // Comultiplication, solved component by component in arity order. Two
    // sources pin the matrices down. Pairing identities against column
    // tuples determine each state column as far as that state's weight
    // budget reaches; the budget is the cap minus the witness weight, since
    // deeper composites fall outside the jet. Cocompositions whose outer
    // and inner factors are already solved reach the operations the budgets
    // cannot see, one direct assignment per monomial composite. Whatever
    // neither source touches stays zero, and the final gates decide whether
    // the result is an element.
    struct Prop {
        outer: (SeqOrbit, Color),
        mu: usize,
        inners: Vec<(SeqOrbit, usize)>,
        kstar: usize,
        cval: Rat,
        wbar: Vec<Color>,
        sigma: Perm,
    }
    let mut props: BTreeMap<(SeqOrbit, Color), Vec<Prop>> = BTreeMap::new();
    for (o_orbit, oy, mu, inners) in composable_pairs(op, jet.cap) {
        let outer_v = op.basis_op(o_orbit.rep(), oy, mu)?;
        let inner_ops: Vec<OpVector> = inners
            .iter()
            .zip(o_orbit.rep())
            .map(|((z, k), &x)| op.basis_op(z.rep(), x, *k))
            .collect::<Result<_>>()?;
        let gamma = op.compose(&outer_v, &inner_ops)?;
        let nz: Vec<(usize, &Rat)> = gamma
            .coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let [(kstar, cval)] = nz[..] else {
            continue;
        };
        let (worbit, sigma) = sort_morphism(&gamma.inputs);
        props.entry((worbit, oy)).or_default().push(Prop {
            outer: (o_orbit, oy),
            mu,
            inners,
            kstar,
            cval: cval.clone(),
            wbar: gamma.inputs,
            sigma,
        });
    }

    let mut order: Vec<(SeqOrbit, Color)> = op
        .components
        .keys()
        .filter(|(o, _)| o.len() <= jet.cap)
        .cloned()
        .collect();
    order.sort_by_key(|(o, y)| (o.len(), o.clone(), *y));

    let mut comult: BTreeMap<(SeqOrbit, Color), Vec<Mat>> = BTreeMap::new();
    let mut memo = EvalMemo::new();
    for key in &order {
        let (orbit, y) = key;
        let comp = op.component(orbit, *y).expect("component exists");
        let sy = s_dims[*y];
        if sy == 0 {
            continue;
        }
        let n = orbit.len();
        let xdims: Vec<usize> = orbit.rep().iter().map(|&c| s_dims[c]).collect();
        let tcols: usize = xdims.iter().product();
        let mut mats: Vec<Option<Mat>> = vec![None; comp.dim()];

        for p in props.get(key).into_iter().flatten() {
            let Some(outer_mats) = comult.get(&p.outer) else {
                continue;
            };
            let inner_mats: Option<Vec<&Mat>> = p
                .inners
                .iter()
                .zip(p.outer.0.rep())
                .map(|((z, k), &x)| comult.get(&(z.clone(), x)).map(|ms| &ms[*k]))
                .collect();
            let Some(inner_mats) = inner_mats else {
                continue;
            };
            let mut kron: Option<Mat> = None;
            for im in &inner_mats {
                kron = Some(match kron {
                    None => (*im).clone(),
                    Some(acc) => acc.kron(im),
                });
            }
            let route2 = kron.expect("nonempty inputs").matmul(&outer_mats[p.mu]);
            let w_dims: Vec<usize> = p.wbar.iter().map(|&cc| s_dims[cc]).collect();
            let tp_inv = tensor_perm(&w_dims, &p.sigma).inverse();
            let gm = Mat::from_fn(tcols, sy, |r, cidx| {
                route2.get(tp_inv.apply(r), cidx) / &p.cval
            });
            match &mats[p.kstar] {
                None => mats[p.kstar] = Some(gm),
                Some(old) => {
                    if *old != gm {
                        return Ok(Realization::Failed(RealizationFailure {
                            report,
                            reason: format!(
                                "cocompositions into orbit {:?} disagree",
                                orbit.rep()
                            ),
                        }));
                    }
                }
            }
        }

        let open: Vec<usize> = (0..comp.dim()).filter(|&k| mats[k].is_none()).collect();
        if !open.is_empty() {
            let mut open_mats: Vec<Mat> = vec![Mat::zero(tcols, sy); open.len()];
            for j in 0..sy {
                let bj = jet.cap - w_js[*y][j];
                if n > bj {
                    continue;
                }
                let tuples = column_tuples(&grid, orbit.rep(), bj);
                if tuples.is_empty() {
                    continue;
                }
                let m = Mat::from_fn(tuples.len(), tcols, |r, tflat| {
                    let multi = unflatten(tflat, &xdims);
                    let mut prod = rat_int(1);
                    for (p, &tp) in multi.iter().enumerate() {
                        prod *= r_mats[orbit.rep()[p]].get(tp, tuples[r][p]);
                    }
                    prod
                });
                let mut rhs = Mat::zero(tuples.len(), open.len());
                for (r, tuple) in tuples.iter().enumerate() {
                    let fills: Vec<&CoElement> = tuple
                        .iter()
                        .enumerate()
                        .map(|(p, &ci)| &grid.col_elems[orbit.rep()[p]][ci])
                        .collect();
                    for (ci, &k) in open.iter().enumerate() {
                        let v = eval_element(op, &state_jets[*y][j], orbit, k, &fills, &mut memo);
                        rhs.set(r, ci, v);
                    }
                }
                let Some(x) = m.solve_many(&rhs) else {
                    return Ok(Realization::Failed(RealizationFailure {
                        report,
                        reason: format!(
                            "pairing identities at orbit {:?} admit no comultiplication",
                            orbit.rep()
                        ),
                    }));
                };
                for (ci, om) in open_mats.iter_mut().enumerate() {
                    for t in 0..tcols {
                        om.set(t, j, x.get(t, ci).clone());
                    }
                }
            }
            for (&k, om) in open.iter().zip(open_mats) {
                mats[k] = Some(om);
            }
        }

        let mats: Vec<Mat> = mats.into_iter().map(|m| m.expect("all solved")).collect();
        comult.insert(key.clone(), mats);
    }

    // readout: weight-one values of each state jet
    let mut output = Vec::with_capacity(ncolors);
    for z in 0..ncolors {
        let mut m = Mat::zero(jet.target.dim(z), s_dims[z]);
        for (i, g) in state_jets[z].iter().enumerate() {
            for (b, v) in unit_pairing(op, g)?.into_iter().enumerate() {
                m.set(b, i, v);
            }
        }
        output.push(m);
    }

    let e = RepresentedElement {
        operad: jet.operad.clone(),
        target: jet.target.clone(),
        cap: jet.cap,
        states,
        comult,
        output,
        initial_color: y0,
        initial,
    };

    let laws = check_coalgebra(op, &e.coalgebra(), jet.cap)?;
    if !laws.ok() {
        return Ok(Realization::Failed(RealizationFailure {
            report,
            reason: format!(
                "solved comultiplication fails {} coalgebra law instances",
                laws.failure_count()
            ),
        }));
    }
    let back = expand(op, &e, jet.cap)?;
    if !jets_equal(&back, jet) {
        return Ok(Realization::Failed(RealizationFailure {
            report,
            reason: "expansion of the solved element disagrees with the jet".into(),
        }));
    }
    Ok(Realization::Realized(e))
}

/// Column-index tuples per slot whose weights sum to at most `budget`,
/// each slot contributing at least weight one.
fn column_tuples(grid: &Grid, rep: &[Color], budget: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(rep.len());
    tuples_rec(grid, rep, budget, &mut cur, &mut out);
    out
}

fn tuples_rec(
    grid: &Grid,
    rep: &[Color],
    budget: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let p = cur.len();
    if p == rep.len() {
        out.push(cur.clone());
        return;
    }
    let reserve = rep.len() - p - 1;
    for (ci, &(w, _)) in grid.cols[rep[p]].iter().enumerate() {
        if w + reserve > budget {
            break;
        }
        cur.push(ci);
        tuples_rec(grid, rep, budget - w, cur, out);
        cur.pop();
    }
}

/// The element whose comultiplications are all identities on a single
/// state, with unit readout. Valid over operads whose unit coordinates and
/// structure coefficients sum to one in every component, which the law
/// check enforces.
pub fn grouplike_element(op: &OperadData, color: Color, cap: usize) -> Result<RepresentedElement> {
    if cap > op.cap {
        return Err(Error::CapExceeded {
            requested: cap,
            cap: op.cap,
        });
    }
    let ncolors = op.palette.len();
    if color >= ncolors {
        return Err(Error::bad_input("initial color out of range"));
    }
    let target = ColoredSpace::standard(&vec![1; ncolors]);
    let states = ColoredSpace::standard(&vec![1; ncolors]);
    let mut comult = BTreeMap::new();
    for ((orbit, y), comp) in &op.components {
        if orbit.len() > cap {
            continue;
        }
        let mats = vec![Mat::from_fn(1, 1, |_, _| rat_int(1)); comp.dim()];
        comult.insert((orbit.clone(), *y), mats);
    }
    let output = vec![Mat::identity(1); ncolors];
    lift(
        op,
        target,
        CoalgebraData {
            space: states,
            comult,
        },
        output,
        color,
        vec![rat_int(1)],
        cap,
    )
}

/// A two-state element: a grouplike state `g` and a state `x` that
/// comultiplies as the sum of all single insertions of `x` among copies of
/// `g`. Pointed at `x` by default.
pub fn primitive_pair_element(
    op: &OperadData,
    color: Color,
    cap: usize,
) -> Result<RepresentedElement> {
    if cap > op.cap {
        return Err(Error::CapExceeded {
            requested: cap,
            cap: op.cap,
        });
    }
    let ncolors = op.palette.len();
    if color >= ncolors {
        return Err(Error::bad_input("initial color out of range"));
    }
    let target = ColoredSpace::standard(&vec![1; ncolors]);
    let states = ColoredSpace::standard(&vec![2; ncolors]);
    let mut comult = BTreeMap::new();
    for ((orbit, y), comp) in &op.components {
        let n = orbit.len();
        if n > cap {
            continue;
        }
        let tdim = 1usize << n;
        let mut m = Mat::zero(tdim, 2);
        m.set(0, 0, rat_int(1));
        for p in 0..n {
            m.set(1 << (n - 1 - p), 1, rat_int(1));
        }
        comult.insert((orbit.clone(), *y), vec![m; comp.dim()]);
    }
    let output = vec![Mat::from_fn(1, 2, |_, _| rat_int(1)); ncolors];
    lift(
        op,
        target,
        CoalgebraData {
            space: states,
            comult,
        },
        output,
        color,
        unit_vec(2, 1),
        cap,
    )
}

/// Characteristic jet of the words `a^k b^k` over a two-letter alphabet, on
/// a single-color word operad: at arity `2k` it is the invariant functional
/// supported on the orbit of the identity operation tensored with
/// `a^k b^k`, and zero at odd arities.
pub fn matched_blocks_jet(op: &OperadData, cap: usize) -> Result<Jet> {
    if op.palette.len() != 1 {
        return Err(Error::bad_input("a single-color operad is required"));
    }
    if !matches!(op.gamma, GammaSource::AssocWords) {
        return Err(Error::bad_input("a word operad is required"));
    }
    if cap > op.cap {
        return Err(Error::CapExceeded {
            requested: cap,
            cap: op.cap,
        });
    }
    let target = ColoredSpace::standard(&[2]);
    let mut jet = Jet::zero(op.name.clone(), target, 0, cap);
    let mut k = 1;
    while 2 * k <= cap {
        let n = 2 * k;
        let orbit = SeqOrbit::from_sorted(vec![0; n]);
        let comp = op
            .component(&orbit, 0)
            .ok_or_else(|| Error::MissingComponent(format!("arity {n} component")))?;
        let dims = vec![2usize; n];
        let word: Vec<usize> = (0..n).map(|i| usize::from(i >= k)).collect();
        let mut seed = BTreeMap::new();
        seed.insert(
            (Perm::identity(n).lex_rank(), flat_index(&word, &dims)),
            rat_int(1),
        );
        let block = equivariant_closure(comp, &dims, seed)?;
        jet.entries.insert(orbit, block);
        k += 1;
    }
    Ok(jet)
}

#[cfg(test)]
mod tests;
