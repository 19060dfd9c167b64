//! Colored symmetric operads over the rationals, with every component stored
//! at the sorted orbit representative of its input sequence.
//!
//! A vector "over inputs x̄" always means: coordinates in the component at
//! `sort(x̄)`, identified along the canonical stable-sort morphism. All
//! symmetry bookkeeping is concentrated in [`OperadData::compose`] and
//! [`OperadData::act`], which conjugate by those canonical morphisms and act
//! through the stabilizer generators stored on each component.

mod builders;

pub use builders::{
    assoc, by_name, colored_words, comm, nilpotent, to_table, two_color_module,
};

use std::collections::BTreeMap;

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{unit_vec, zero_vec, ActionMat, FinVectSpace, Rat};
use crate::seq::{sort_morphism, young_word, Color, ColorSeq, Palette, Perm, SeqOrbit};

/// One component `P(r̄; y)` at a sorted representative `r̄`, together with
/// the action of the adjacent-transposition generators of its stabilizer.
#[derive(Debug, Clone)]
pub struct Component {
    pub inputs: SeqOrbit,
    pub output: Color,
    pub space: FinVectSpace,
    young_positions: Vec<usize>,
    young: Vec<ActionMat>,
}

impl Component {
    pub fn new(
        inputs: SeqOrbit,
        output: Color,
        space: FinVectSpace,
        young: Vec<ActionMat>,
    ) -> Result<Self> {
        let young_positions = inputs.young_gen_positions();
        if young.len() != young_positions.len() {
            return Err(Error::ShapeMismatch {
                ctx: "component stabilizer generators",
                expected: young_positions.len().to_string(),
                got: young.len().to_string(),
            });
        }
        for g in &young {
            if g.dim() != space.dim() {
                return Err(Error::ShapeMismatch {
                    ctx: "stabilizer generator dimension",
                    expected: space.dim().to_string(),
                    got: g.dim().to_string(),
                });
            }
        }
        Ok(Component {
            inputs,
            output,
            space,
            young_positions,
            young,
        })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn gens(&self) -> &[ActionMat] {
        &self.young
    }

    pub fn gen_positions(&self) -> &[usize] {
        &self.young_positions
    }

    /// The action of a stabilizer element, computed through its word in the
    /// adjacent-transposition generators.
    pub fn action_of(&self, delta: &Perm) -> ActionMat {
        let word = young_word(&self.inputs, delta);
        let mut acc = ActionMat::identity_perm(self.space.dim());
        for &p in &word {
            let gi = self
                .young_positions
                .binary_search(&p)
                .expect("word letter is a stabilizer generator position");
            acc = acc.compose(&self.young[gi]);
        }
        acc
    }
}

/// Key of one structure coefficient: all basis indices refer to components
/// at sorted representatives, inner slots listed in the order of the sorted
/// outer sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GammaKey {
    pub outer: Vec<Color>,
    pub output: Color,
    pub outer_idx: usize,
    pub inners: Vec<(Vec<Color>, usize)>,
}

/// Context shared by all structure-coefficient lookups of one composition:
/// the sorted outer representative, the sorted inner representatives in slot
/// order, and the sort morphism of their concatenation. Coefficient lists
/// returned by [`GammaSource::basis_gamma`] are coordinates at the sorted
/// representative of the result, i.e. already include transport along
/// `sigma_w`.
pub struct GammaCtx<'a> {
    pub outer_orbit: &'a SeqOrbit,
    pub output: Color,
    pub slots: &'a [(SeqOrbit, Color)],
    pub sigma_w: &'a Perm,
    pub t_orbit: &'a SeqOrbit,
}

/// Where a composition rule comes from: an explicit coefficient table, the
/// word-concatenation rule (basis of a component of arity n = permutations
/// of n, lexicographically ranked), or the rule that every component is a
/// line and every coefficient is 1.
#[derive(Debug, Clone)]
pub enum GammaSource {
    Table(BTreeMap<GammaKey, Vec<(usize, Rat)>>),
    AssocWords,
    OneDim,
}

impl GammaSource {
    pub fn basis_gamma(
        &self,
        ctx: &GammaCtx<'_>,
        f_idx: usize,
        inner_idx: &[usize],
    ) -> Vec<(usize, Rat)> {
        match self {
            GammaSource::OneDim => vec![(0, Rat::one())],
            GammaSource::AssocWords => {
                let n = ctx.outer_orbit.len();
                let tau = Perm::from_lex_rank(n, f_idx);
                let sizes: Vec<usize> = ctx.slots.iter().map(|(o, _)| o.len()).collect();
                let mut off = vec![0usize; n];
                for j in 1..n {
                    off[j] = off[j - 1] + sizes[j - 1];
                }
                // factor k of the result word: block j contributes the
                // letters of inner slot tau(j), internally reordered by it
                let mut images = Vec::with_capacity(ctx.t_orbit.len());
                for j in 0..n {
                    let s = tau.apply(j);
                    let rho = Perm::from_lex_rank(sizes[s], inner_idx[s]);
                    for l in 0..sizes[s] {
                        images.push(off[s] + rho.apply(l));
                    }
                }
                let pi = Perm::from_images(images);
                vec![(ctx.sigma_w.compose(&pi).lex_rank(), Rat::one())]
            }
            GammaSource::Table(map) => {
                let key = GammaKey {
                    outer: ctx.outer_orbit.rep().to_vec(),
                    output: ctx.output,
                    outer_idx: f_idx,
                    inners: ctx
                        .slots
                        .iter()
                        .zip(inner_idx)
                        .map(|((o, _), &i)| (o.rep().to_vec(), i))
                        .collect(),
                };
                map.get(&key).cloned().unwrap_or_default()
            }
        }
    }
}

/// An element of one component, tagged with its input sequence in user
/// order. `coords` live at the sorted representative; an absent component is
/// represented by empty coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpVector {
    pub inputs: ColorSeq,
    pub output: Color,
    pub coords: Vec<Rat>,
}

impl OpVector {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, r: &Rat) -> OpVector {
        OpVector {
            inputs: self.inputs.clone(),
            output: self.output,
            coords: self.coords.iter().map(|c| c * r).collect(),
        }
    }

    pub fn add(&self, other: &OpVector) -> OpVector {
        assert_eq!(self.inputs, other.inputs);
        assert_eq!(self.output, other.output);
        OpVector {
            inputs: self.inputs.clone(),
            output: self.output,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    fn nonzero(&self) -> Vec<(usize, &Rat)> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }
}

/// Sampling bounds for law checking.
#[derive(Debug, Clone)]
pub struct ValidateOptions {
    /// Largest total arity of composite shapes that are checked.
    pub max_arity: usize,
    /// Basis-tuple samples per shape; shapes with at most this many tuples
    /// are checked exhaustively.
    pub samples: usize,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            max_arity: 5,
            samples: 24,
            seed: 0,
        }
    }
}

impl ValidateOptions {
    /// Check every basis tuple of every shape up to `max_arity`.
    pub fn exhaustive(max_arity: usize) -> Self {
        ValidateOptions {
            max_arity,
            samples: usize::MAX,
            seed: 0,
        }
    }
}

/// One law family: how many instances were checked and which ones failed.
/// Failure entries name the offending component, basis indices, and the
/// largest residual entry, so a report with an empty failure list is the
/// only "pass".
#[derive(Debug, Clone)]
pub struct LawStats {
    pub law: String,
    pub checked: u64,
    pub failures: Vec<String>,
}

impl LawStats {
    pub fn new(law: impl Into<String>) -> Self {
        LawStats {
            law: law.into(),
            checked: 0,
            failures: Vec::new(),
        }
    }
}

/// What was checked, law by law, with instance counts and failures.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub laws: Vec<LawStats>,
}

impl ValidationReport {
    pub fn failure_count(&self) -> usize {
        self.laws.iter().map(|l| l.failures.len()).sum()
    }

    pub fn ok(&self) -> bool {
        self.failure_count() == 0
    }
}

/// A colored symmetric operad with a hard arity cap: components, units, and
/// a composition rule.
#[derive(Debug, Clone)]
pub struct OperadData {
    pub name: String,
    pub palette: Palette,
    pub cap: usize,
    pub components: BTreeMap<(SeqOrbit, Color), Component>,
    pub units: BTreeMap<Color, Vec<Rat>>,
    pub gamma: GammaSource,
}

impl OperadData {
    pub fn component(&self, orbit: &SeqOrbit, output: Color) -> Option<&Component> {
        self.components.get(&(orbit.clone(), output))
    }

    pub fn dim(&self, orbit: &SeqOrbit, output: Color) -> usize {
        self.component(orbit, output).map_or(0, Component::dim)
    }

    pub fn zero_op(&self, inputs: &[Color], output: Color) -> OpVector {
        let orbit = SeqOrbit::of(inputs);
        OpVector {
            inputs: inputs.to_vec(),
            output,
            coords: zero_vec(self.dim(&orbit, output)),
        }
    }

    pub fn basis_op(&self, inputs: &[Color], output: Color, idx: usize) -> Result<OpVector> {
        let orbit = SeqOrbit::of(inputs);
        let d = self.dim(&orbit, output);
        if idx >= d {
            return Err(Error::bad_input(format!(
                "basis index {idx} out of range for a component of dimension {d}"
            )));
        }
        Ok(OpVector {
            inputs: inputs.to_vec(),
            output,
            coords: unit_vec(d, idx),
        })
    }

    pub fn unit_op(&self, color: Color) -> Result<OpVector> {
        let coords = self
            .units
            .get(&color)
            .ok_or_else(|| Error::MissingComponent(format!("unit at color {color}")))?
            .clone();
        Ok(OpVector {
            inputs: vec![color],
            output: color,
            coords,
        })
    }

    fn check_op(&self, v: &OpVector, ctx: &'static str) -> Result<()> {
        if v.inputs.is_empty() {
            return Err(Error::bad_input(format!("{ctx}: empty input sequence")));
        }
        let d = self.dim(&SeqOrbit::of(&v.inputs), v.output);
        if v.coords.len() != d {
            return Err(Error::ShapeMismatch {
                ctx,
                expected: d.to_string(),
                got: v.coords.len().to_string(),
            });
        }
        Ok(())
    }

    /// Transport along a sequence morphism `tau : inputs → target`
    /// (`inputs[i] = target[tau(i)]`).
    pub fn act(&self, v: &OpVector, tau: &Perm, target: &[Color]) -> Result<OpVector> {
        self.check_op(v, "act")?;
        if tau.len() != v.inputs.len() || target.len() != v.inputs.len() {
            return Err(Error::ShapeMismatch {
                ctx: "act",
                expected: v.inputs.len().to_string(),
                got: target.len().to_string(),
            });
        }
        for i in 0..v.inputs.len() {
            if v.inputs[i] != target[tau.apply(i)] {
                return Err(Error::ColorMismatch {
                    expected: self.palette.name(v.inputs[i]).to_string(),
                    got: self.palette.name(target[tau.apply(i)]).to_string(),
                });
            }
        }
        let (orbit, s1) = sort_morphism(&v.inputs);
        let (_, s2) = sort_morphism(target);
        let coords = match self.component(&orbit, v.output) {
            None => vec![],
            Some(comp) => {
                let delta = s2.compose(tau).compose(&s1.inverse());
                if delta.is_identity() {
                    v.coords.clone()
                } else {
                    comp.action_of(&delta).apply_vec(&v.coords)
                }
            }
        };
        Ok(OpVector {
            inputs: target.to_vec(),
            output: v.output,
            coords,
        })
    }

    /// Operadic composition: plugs `inners[i]` into input `i` of `outer`.
    /// The result is indexed by the concatenation of the inner input
    /// sequences.
    pub fn compose(&self, outer: &OpVector, inners: &[OpVector]) -> Result<OpVector> {
        self.check_op(outer, "compose outer")?;
        let n = outer.inputs.len();
        if inners.len() != n {
            return Err(Error::ShapeMismatch {
                ctx: "compose inner count",
                expected: n.to_string(),
                got: inners.len().to_string(),
            });
        }
        for (i, g) in inners.iter().enumerate() {
            self.check_op(g, "compose inner")?;
            if g.output != outer.inputs[i] {
                return Err(Error::ColorMismatch {
                    expected: self.palette.name(outer.inputs[i]).to_string(),
                    got: self.palette.name(g.output).to_string(),
                });
            }
        }
        let z_seq: ColorSeq = inners
            .iter()
            .flat_map(|g| g.inputs.iter().copied())
            .collect();
        if z_seq.len() > self.cap {
            return Err(Error::CapExceeded {
                requested: z_seq.len(),
                cap: self.cap,
            });
        }
        let (t_orbit, sigma_z) = sort_morphism(&z_seq);
        let (f_orbit, sigma_f) = sort_morphism(&outer.inputs);
        let sigma_f_inv = sigma_f.inverse();
        // slot j of the sorted outer receives inner number sigma_f^{-1}(j)
        let slot_inner: Vec<&OpVector> =
            (0..n).map(|j| &inners[sigma_f_inv.apply(j)]).collect();
        let slot_sort: Vec<(SeqOrbit, Perm)> = slot_inner
            .iter()
            .map(|g| sort_morphism(&g.inputs))
            .collect();
        let w_seq: ColorSeq = slot_sort
            .iter()
            .flat_map(|(o, _)| o.rep().iter().copied())
            .collect();
        let (w_orbit, sigma_w) = sort_morphism(&w_seq);
        debug_assert_eq!(w_orbit, t_orbit);

        let result_comp = self.component(&t_orbit, outer.output);
        let result_dim = result_comp.map_or(0, Component::dim);
        let mut raw = zero_vec(result_dim);
        let mut any = false;
        if result_dim > 0 {
            let slots: Vec<(SeqOrbit, Color)> = slot_sort
                .iter()
                .enumerate()
                .map(|(j, (o, _))| (o.clone(), f_orbit.rep()[j]))
                .collect();
            let ctx = GammaCtx {
                outer_orbit: &f_orbit,
                output: outer.output,
                slots: &slots,
                sigma_w: &sigma_w,
                t_orbit: &t_orbit,
            };
            let f_nz = outer.nonzero();
            let inner_nz: Vec<Vec<(usize, &Rat)>> =
                slot_inner.iter().map(|g| g.nonzero()).collect();
            if !f_nz.is_empty() && inner_nz.iter().all(|l| !l.is_empty()) {
                let mut odo = vec![0usize; n];
                'tuples: loop {
                    for &(fi, cf) in &f_nz {
                        let mut coeff = cf.clone();
                        let mut idxs = Vec::with_capacity(n);
                        for (j, &o) in odo.iter().enumerate() {
                            let (gi, cg) = inner_nz[j][o];
                            coeff *= cg;
                            idxs.push(gi);
                        }
                        for (bi, co) in self.gamma.basis_gamma(&ctx, fi, &idxs) {
                            if bi >= result_dim {
                                return Err(Error::bad_input(format!(
                                    "structure coefficient index {bi} exceeds component dimension {result_dim}"
                                )));
                            }
                            raw[bi] += coeff.clone() * co;
                            any = true;
                        }
                    }
                    let mut j = n;
                    loop {
                        if j == 0 {
                            break 'tuples;
                        }
                        j -= 1;
                        odo[j] += 1;
                        if odo[j] < inner_nz[j].len() {
                            break;
                        }
                        odo[j] = 0;
                    }
                }
            }
        }

        let coords = if any {
            // undo all three normalizations at once: inner sorts, the block
            // shuffle induced by the outer sort, and the final sort
            let inv_sorts: Vec<Perm> = slot_sort.iter().map(|(_, s)| s.inverse()).collect();
            let oplus = Perm::direct_sum(&inv_sorts.iter().collect::<Vec<_>>());
            let sizes: Vec<usize> = slot_inner.iter().map(|g| g.inputs.len()).collect();
            let shuffle = sigma_f_inv.block_shuffle(&sizes);
            let delta = sigma_z
                .compose(&shuffle)
                .compose(&oplus)
                .compose(&sigma_w.inverse());
            if delta.is_identity() {
                raw
            } else {
                result_comp
                    .expect("nonzero raw requires a component")
                    .action_of(&delta)
                    .apply_vec(&raw)
            }
        } else {
            raw
        };
        Ok(OpVector {
            inputs: z_seq,
            output: outer.output,
            coords,
        })
    }

    /// Checks the operad laws: stabilizer-generator relations, unit laws,
    /// equivariance of the composition rule in the outer and inner slots,
    /// and associativity, on shapes up to `opts.max_arity` with deterministic
    /// sampling of basis tuples.
    pub fn validate(&self, opts: &ValidateOptions) -> Result<ValidationReport> {
        let mut laws: Vec<LawStats> = Vec::new();

        for c in 0..self.palette.len() {
            let coords = self
                .units
                .get(&c)
                .ok_or_else(|| Error::bad_input(format!("missing unit at color {c}")))?;
            let d = self.dim(&SeqOrbit::from_sorted(vec![c]), c);
            if coords.len() != d || coords.iter().all(|x| x.is_zero()) {
                return Err(Error::bad_input(format!("bad unit vector at color {c}")));
            }
        }

        let mut coxeter = LawStats {
            law: "stabilizer-relations".into(),
            checked: 0,
            failures: Vec::new(),
        };
        for ((orbit, output), comp) in &self.components {
            if orbit.is_empty() || orbit.len() > self.cap || *output >= self.palette.len() {
                return Err(Error::bad_input("component outside the allowed shapes"));
            }
            let here = |rel: &str| {
                format!(
                    "{} at {:?} -> {}",
                    rel,
                    orbit.rep(),
                    self.palette.name(*output)
                )
            };
            let gens = comp.gens();
            let pos = comp.gen_positions();
            for g in gens {
                coxeter.checked += 1;
                if !eq_action(&g.compose(g), &ActionMat::identity_perm(comp.dim())) {
                    coxeter.failures.push(here("generator square"));
                }
            }
            for a in 0..gens.len() {
                for b in (a + 1)..gens.len() {
                    coxeter.checked += 1;
                    if pos[b] == pos[a] + 1 {
                        let st = gens[a].compose(&gens[b]);
                        let cube = st.compose(&st).compose(&st);
                        if !eq_action(&cube, &ActionMat::identity_perm(comp.dim())) {
                            coxeter.failures.push(here("braid relation"));
                        }
                    } else if pos[b] > pos[a] + 1 {
                        let ab = gens[a].compose(&gens[b]);
                        let ba = gens[b].compose(&gens[a]);
                        if !eq_action(&ab, &ba) {
                            coxeter.failures.push(here("distant commutation"));
                        }
                    }
                }
            }
        }
        laws.push(coxeter);

        let mut units_law = LawStats {
            law: "unit-laws".into(),
            checked: 0,
            failures: Vec::new(),
        };
        for ((orbit, output), comp) in &self.components {
            let units: Vec<OpVector> = orbit
                .rep()
                .iter()
                .map(|&c| self.unit_op(c))
                .collect::<Result<_>>()?;
            for idx in 0..comp.dim() {
                let f = self.basis_op(orbit.rep(), *output, idx)?;
                let right = self.compose(&f, &units)?;
                units_law.checked += 1;
                if right.coords != f.coords {
                    units_law.failures.push(format!(
                        "right unit at {:?} -> {} index {} (residual {})",
                        orbit.rep(),
                        self.palette.name(*output),
                        idx,
                        max_abs_diff(&right.coords, &f.coords)
                    ));
                }
                let left = self.compose(&self.unit_op(*output)?, &[f.clone()])?;
                units_law.checked += 1;
                if left.coords != f.coords {
                    units_law.failures.push(format!(
                        "left unit at {:?} -> {} index {} (residual {})",
                        orbit.rep(),
                        self.palette.name(*output),
                        idx,
                        max_abs_diff(&left.coords, &f.coords)
                    ));
                }
            }
        }
        laws.push(units_law);

        // candidates per output color, for building composite shapes
        let mut by_output: BTreeMap<Color, Vec<&(SeqOrbit, Color)>> = BTreeMap::new();
        for key in self.components.keys() {
            by_output.entry(key.1).or_default().push(key);
        }
        let empty: Vec<&(SeqOrbit, Color)> = Vec::new();

        let max_arity = opts.max_arity.min(self.cap);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut equi_outer = LawStats {
            law: "outer-equivariance".into(),
            checked: 0,
            failures: Vec::new(),
        };
        let mut equi_inner = LawStats {
            law: "inner-equivariance".into(),
            checked: 0,
            failures: Vec::new(),
        };
        let mut assoc = LawStats {
            law: "associativity".into(),
            checked: 0,
            failures: Vec::new(),
        };

        for (key_f, comp_f) in &self.components {
            let (f_orbit, output) = key_f;
            let n = f_orbit.len();
            if n > max_arity {
                continue;
            }
            // all ways to give each slot an inner component within budget
            let mut stack: Vec<Vec<&(SeqOrbit, Color)>> = vec![vec![]];
            for j in 0..n {
                let color = f_orbit.rep()[j];
                let cands = by_output.get(&color).unwrap_or(&empty);
                let mut next = Vec::new();
                for partial in &stack {
                    let used: usize = partial.iter().map(|k| k.0.len()).sum();
                    let slots_left = n - j - 1;
                    for cand in cands {
                        if used + cand.0.len() + slots_left <= max_arity {
                            let mut ext = partial.clone();
                            ext.push(cand);
                            next.push(ext);
                        }
                    }
                }
                stack = next;
            }
            for assignment in &stack {
                let dims: Vec<usize> = std::iter::once(comp_f.dim())
                    .chain(assignment.iter().map(|k| self.dim(&k.0, k.1)))
                    .collect();
                if dims.iter().any(|&d| d == 0) {
                    continue;
                }
                let tuples = sample_tuples(&dims, opts.samples, &mut rng);
                for tuple in &tuples {
                    let f = self.basis_op(f_orbit.rep(), *output, tuple[0])?;
                    let gs: Vec<OpVector> = assignment
                        .iter()
                        .zip(&tuple[1..])
                        .map(|(k, &i)| self.basis_op(k.0.rep(), k.1, i))
                        .collect::<Result<_>>()?;
                    let base = self.compose(&f, &gs)?;

                    // outer equivariance across each stabilizer generator
                    for &t in &f_orbit.young_gen_positions() {
                        let s = Perm::adjacent(n, t);
                        let f_acted = self.act(&f, &s, f_orbit.rep())?;
                        let mut gs_perm = gs.clone();
                        gs_perm.swap(t, t + 1);
                        let lhs = self.compose(&f_acted, &gs_perm)?;
                        let sizes: Vec<usize> =
                            gs.iter().map(|g| g.inputs.len()).collect();
                        let shuffle = s.block_shuffle(&sizes);
                        let rhs = self.act(&base, &shuffle, &lhs.inputs)?;
                        equi_outer.checked += 1;
                        if lhs.coords != rhs.coords {
                            equi_outer.failures.push(format!(
                                "outer swap at {:?} -> {} position {} tuple {:?} (residual {})",
                                f_orbit.rep(),
                                self.palette.name(*output),
                                t,
                                tuple,
                                max_abs_diff(&lhs.coords, &rhs.coords)
                            ));
                        }
                    }

                    // inner equivariance across each inner stabilizer generator
                    for (j, g) in gs.iter().enumerate() {
                        let gj_orbit = SeqOrbit::of(&g.inputs);
                        for &t in &gj_orbit.young_gen_positions() {
                            let s = Perm::adjacent(g.inputs.len(), t);
                            let mut gs_acted = gs.clone();
                            gs_acted[j] = self.act(g, &s, &g.inputs)?;
                            let lhs = self.compose(&f, &gs_acted)?;
                            let parts: Vec<Perm> = gs
                                .iter()
                                .enumerate()
                                .map(|(jj, gg)| {
                                    if jj == j {
                                        s.clone()
                                    } else {
                                        Perm::identity(gg.inputs.len())
                                    }
                                })
                                .collect();
                            let oplus = Perm::direct_sum(&parts.iter().collect::<Vec<_>>());
                            let rhs = self.act(&base, &oplus, &base.inputs)?;
                            equi_inner.checked += 1;
                            if lhs.coords != rhs.coords {
                                equi_inner.failures.push(format!(
                                    "inner slot {} at {:?} -> {} position {} tuple {:?} (residual {})",
                                    j,
                                    f_orbit.rep(),
                                    self.palette.name(*output),
                                    t,
                                    tuple,
                                    max_abs_diff(&lhs.coords, &rhs.coords)
                                ));
                            }
                        }
                    }
                }

                // third level for associativity
                let z_colors: ColorSeq = assignment
                    .iter()
                    .flat_map(|k| k.0.rep().iter().copied())
                    .collect();
                let mut third: Vec<Vec<&(SeqOrbit, Color)>> = vec![vec![]];
                for (i, &color) in z_colors.iter().enumerate() {
                    let cands = by_output.get(&color).unwrap_or(&empty);
                    let mut next = Vec::new();
                    for partial in &third {
                        let used: usize = partial.iter().map(|k| k.0.len()).sum();
                        let slots_left = z_colors.len() - i - 1;
                        for cand in cands {
                            if used + cand.0.len() + slots_left <= max_arity {
                                let mut ext = partial.clone();
                                ext.push(cand);
                                next.push(ext);
                            }
                        }
                    }
                    third = next;
                }
                for h_assign in &third {
                    let mut dims: Vec<usize> = vec![comp_f.dim()];
                    dims.extend(assignment.iter().map(|k| self.dim(&k.0, k.1)));
                    dims.extend(h_assign.iter().map(|k| self.dim(&k.0, k.1)));
                    if dims.iter().any(|&d| d == 0) {
                        continue;
                    }
                    let tuples = sample_tuples(&dims, opts.samples, &mut rng);
                    for tuple in &tuples {
                        let f = self.basis_op(f_orbit.rep(), *output, tuple[0])?;
                        let gs: Vec<OpVector> = assignment
                            .iter()
                            .zip(&tuple[1..=n])
                            .map(|(k, &i)| self.basis_op(k.0.rep(), k.1, i))
                            .collect::<Result<_>>()?;
                        let hs: Vec<OpVector> = h_assign
                            .iter()
                            .zip(&tuple[n + 1..])
                            .map(|(k, &i)| self.basis_op(k.0.rep(), k.1, i))
                            .collect::<Result<_>>()?;
                        let lhs = self.compose(&self.compose(&f, &gs)?, &hs)?;
                        let mut off = 0;
                        let mut middles = Vec::with_capacity(n);
                        for g in &gs {
                            let m = g.inputs.len();
                            middles.push(self.compose(g, &hs[off..off + m])?);
                            off += m;
                        }
                        let rhs = self.compose(&f, &middles)?;
                        assoc.checked += 1;
                        if lhs.inputs != rhs.inputs || lhs.coords != rhs.coords {
                            assoc.failures.push(format!(
                                "associativity at outer {:?} -> {} tuple {:?} (residual {})",
                                f_orbit.rep(),
                                self.palette.name(*output),
                                tuple,
                                max_abs_diff(&lhs.coords, &rhs.coords)
                            ));
                        }
                    }
                }
            }
        }
        laws.push(equi_outer);
        laws.push(equi_inner);
        laws.push(assoc);
        Ok(ValidationReport { laws })
    }
}

/// Largest absolute entry of `a - b`, padding the shorter vector with zeros.
fn max_abs_diff(a: &[Rat], b: &[Rat]) -> Rat {
    let zero = Rat::zero();
    let mut best = Rat::zero();
    for i in 0..a.len().max(b.len()) {
        let x = a.get(i).unwrap_or(&zero);
        let y = b.get(i).unwrap_or(&zero);
        let d = abs_rat(&(x.clone() - y.clone()));
        if d > best {
            best = d;
        }
    }
    best
}

fn abs_rat(x: &Rat) -> Rat {
    if x < &Rat::zero() {
        -x.clone()
    } else {
        x.clone()
    }
}

fn eq_action(a: &ActionMat, b: &ActionMat) -> bool {
    match (a, b) {
        (ActionMat::Perm(p), ActionMat::Perm(q)) => p == q,
        _ => a.to_mat() == b.to_mat(),
    }
}

/// All index tuples below `dims` when their number is at most `budget`,
/// otherwise `budget` tuples drawn from the given generator.
fn sample_tuples(dims: &[usize], budget: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    if total <= budget {
        let mut out = Vec::with_capacity(total);
        let mut odo = vec![0usize; dims.len()];
        loop {
            out.push(odo.clone());
            let mut j = dims.len();
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                odo[j] += 1;
                if odo[j] < dims[j] {
                    break;
                }
                odo[j] = 0;
            }
        }
    } else {
        (0..budget)
            .map(|_| dims.iter().map(|&d| rng.gen_range(0..d)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests;
