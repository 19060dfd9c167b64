use std::collections::{BTreeSet, VecDeque};

use num::{One, Zero};

use crate::error::{Error, Result};

use super::map::LinearMap;
use super::mat::Mat;
use super::rat::Rat;
use super::space::{FinVectSpace, Label};
use super::subspace::Subspace;

/// Invertible operator given either as a basis permutation or as a dense
/// matrix. Permutations compose, tensor, and invert without touching any
/// rationals, which keeps large structured components cheap.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ActionMat {
    /// `e_i ↦ e_{p[i]}`.
    Perm(Vec<usize>),
    Dense(Mat),
}

impl ActionMat {
    pub fn identity_perm(dim: usize) -> Self {
        ActionMat::Perm((0..dim).collect())
    }

    pub fn dim(&self) -> usize {
        match self {
            ActionMat::Perm(p) => p.len(),
            ActionMat::Dense(m) => m.rows(),
        }
    }

    pub fn is_perm(&self) -> bool {
        matches!(self, ActionMat::Perm(_))
    }

    pub fn is_identity(&self) -> bool {
        match self {
            ActionMat::Perm(p) => p.iter().enumerate().all(|(i, &j)| i == j),
            ActionMat::Dense(m) => *m == Mat::identity(m.rows()),
        }
    }

    pub fn apply_vec(&self, v: &[Rat]) -> Vec<Rat> {
        match self {
            ActionMat::Perm(p) => {
                let mut out = vec![Rat::zero(); v.len()];
                for (i, x) in v.iter().enumerate() {
                    out[p[i]] = x.clone();
                }
                out
            }
            ActionMat::Dense(m) => m.apply(v),
        }
    }

    pub fn image_of(&self, i: usize) -> Option<usize> {
        match self {
            ActionMat::Perm(p) => Some(p[i]),
            ActionMat::Dense(_) => None,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ActionMat) -> ActionMat {
        match (self, other) {
            (ActionMat::Perm(a), ActionMat::Perm(b)) => {
                ActionMat::Perm(b.iter().map(|&i| a[i]).collect())
            }
            _ => ActionMat::Dense(self.to_mat().matmul(&other.to_mat())),
        }
    }

    pub fn inverse(&self) -> ActionMat {
        match self {
            ActionMat::Perm(p) => {
                let mut inv = vec![0; p.len()];
                for (i, &j) in p.iter().enumerate() {
                    inv[j] = i;
                }
                ActionMat::Perm(inv)
            }
            ActionMat::Dense(m) => {
                ActionMat::Dense(m.inverse().expect("action matrices are invertible"))
            }
        }
    }

    /// Tensor product on row-major tensor bases.
    pub fn tensor(&self, other: &ActionMat) -> ActionMat {
        match (self, other) {
            (ActionMat::Perm(a), ActionMat::Perm(b)) => {
                let (da, db) = (a.len(), b.len());
                let mut p = vec![0; da * db];
                for i in 0..da {
                    for j in 0..db {
                        p[i * db + j] = a[i] * db + b[j];
                    }
                }
                ActionMat::Perm(p)
            }
            _ => ActionMat::Dense(self.to_mat().kron(&other.to_mat())),
        }
    }

    pub fn to_mat(&self) -> Mat {
        match self {
            ActionMat::Perm(p) => {
                let mut m = Mat::zero(p.len(), p.len());
                for (i, &j) in p.iter().enumerate() {
                    m.set(j, i, Rat::one());
                }
                m
            }
            ActionMat::Dense(m) => m.clone(),
        }
    }

    /// Conjugation action on hom-space coordinates (domain-major matrix
    /// units): a pair of operators `(g_dom, g_cod)` sends the unit
    /// `E(j → i)` to `E(g_dom j → g_cod i)` — i.e. `h ↦ g_cod ∘ h ∘ g_dom⁻¹`.
    pub fn hom_conj(g_dom: &ActionMat, g_cod: &ActionMat) -> ActionMat {
        match (g_dom, g_cod) {
            (ActionMat::Perm(a), ActionMat::Perm(b)) => {
                let (da, db) = (a.len(), b.len());
                let mut p = vec![0; da * db];
                for j in 0..da {
                    for i in 0..db {
                        p[j * db + i] = a[j] * db + b[i];
                    }
                }
                ActionMat::Perm(p)
            }
            _ => {
                // h ↦ g_cod h g_dom⁻¹ on domain-major coordinates is
                // (g_dom⁻¹)ᵀ ⊗ g_cod.
                let gi = g_dom.inverse().to_mat().transpose();
                ActionMat::Dense(gi.kron(&g_cod.to_mat()))
            }
        }
    }
}

/// Finitely generated group of invertible operators on a labeled space.
#[derive(Debug, Clone)]
pub struct GroupGens {
    pub space: FinVectSpace,
    pub gens: Vec<ActionMat>,
}

impl GroupGens {
    pub fn new(space: FinVectSpace, gens: Vec<ActionMat>) -> Self {
        for g in &gens {
            assert_eq!(g.dim(), space.dim(), "generator dimension mismatch");
        }
        GroupGens { space, gens }
    }

    pub fn trivial(space: FinVectSpace) -> Self {
        GroupGens {
            space,
            gens: vec![],
        }
    }

    pub fn is_permutation_action(&self) -> bool {
        self.gens.iter().all(ActionMat::is_perm)
    }

    /// Orbits of basis indices under the generated group, each sorted, the
    /// list sorted by smallest member. Only defined for permutation actions.
    pub fn orbits(&self) -> Option<Vec<Vec<usize>>> {
        if !self.is_permutation_action() {
            return None;
        }
        let n = self.space.dim();
        let mut seen = vec![false; n];
        let mut orbits = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut orbit = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            orbit.insert(start);
            while let Some(i) = queue.pop_front() {
                for g in &self.gens {
                    let j = g.image_of(i).unwrap();
                    if !seen[j] {
                        seen[j] = true;
                        orbit.insert(j);
                        queue.push_back(j);
                    }
                }
            }
            orbits.push(orbit.into_iter().collect());
        }
        Some(orbits)
    }

    /// Enumerates the whole group by breadth-first products of generators.
    pub fn enumerate(&self, bound: usize) -> Result<Vec<ActionMat>> {
        let id = if self.is_permutation_action() {
            ActionMat::identity_perm(self.space.dim())
        } else {
            ActionMat::Dense(Mat::identity(self.space.dim()))
        };
        let mut seen = BTreeSet::new();
        let mut elements = vec![id.clone()];
        seen.insert(format!("{id:?}"));
        let mut queue = VecDeque::from([id]);
        while let Some(g) = queue.pop_front() {
            for s in &self.gens {
                let h = s.compose(&g);
                let key = format!("{h:?}");
                if seen.insert(key) {
                    if elements.len() >= bound {
                        return Err(Error::GroupTooLarge { bound });
                    }
                    elements.push(h.clone());
                    queue.push_back(h);
                }
            }
        }
        Ok(elements)
    }

    /// Fixed subspace, computed as the image of the averaging projector
    /// `(1/|G|) Σ_g g` (the ground field has characteristic zero). For a
    /// permutation action the projector image has the orbit-sum basis, which
    /// is produced directly.
    pub fn invariants(&self) -> Result<Subspace> {
        if let Some(orbits) = self.orbits() {
            let n = self.space.dim();
            let cols: Vec<Vec<Rat>> = orbits
                .iter()
                .map(|orbit| {
                    let mut v = vec![Rat::zero(); n];
                    for &i in orbit {
                        v[i] = Rat::one();
                    }
                    v
                })
                .collect();
            return Ok(Subspace::span(
                self.space.clone(),
                Mat::from_cols(n, cols),
            ));
        }
        let group = self.enumerate(GROUP_BOUND)?;
        let n = self.space.dim();
        let mut sum = Mat::zero(n, n);
        for g in &group {
            sum = &sum + &g.to_mat();
        }
        let avg = sum.scale(&(Rat::one() / Rat::from_integer(group.len().into())));
        Ok(Subspace::span(self.space.clone(), avg))
    }

    /// Coinvariant quotient: the cokernel of `span{g·v − v}`. For a
    /// permutation action the classes of basis vectors along orbits are a
    /// basis, with the orbit minimum as representative label.
    pub fn coinvariants(&self) -> Result<(FinVectSpace, LinearMap)> {
        if let Some(orbits) = self.orbits() {
            let n = self.space.dim();
            let labels: Vec<Label> = orbits
                .iter()
                .map(|o| Label::pair(Label::atom("class"), self.space.label(o[0]).clone()))
                .collect();
            let qspace = FinVectSpace::new(labels).expect("orbit minima are distinct");
            let mut proj = Mat::zero(orbits.len(), n);
            for (k, orbit) in orbits.iter().enumerate() {
                for &i in orbit {
                    proj.set(k, i, Rat::one());
                }
            }
            let map = LinearMap::new(self.space.clone(), qspace.clone(), proj);
            return Ok((qspace, map));
        }
        let n = self.space.dim();
        let mut cols = Vec::new();
        for g in &self.gens {
            let gm = g.to_mat();
            for i in 0..n {
                let mut col = gm.col(i);
                col[i] -= Rat::one();
                cols.push(col);
            }
        }
        let rel = Subspace::span(self.space.clone(), Mat::from_cols(n, cols));
        Ok(rel.quotient())
    }
}

const GROUP_BOUND: usize = 50_000;

/// Representation of the symmetric group `S_n` given by the images of the
/// adjacent transpositions `s_1, …, s_{n-1}`.
#[derive(Debug, Clone)]
pub struct PermAction {
    pub degree: usize,
    pub action: GroupGens,
}

impl PermAction {
    pub fn new(degree: usize, space: FinVectSpace, images: Vec<ActionMat>) -> Result<Self> {
        if images.len() + 1 != degree.max(1) {
            return Err(Error::bad_input(format!(
                "S_{degree} needs {} adjacent-transposition images, got {}",
                degree.max(1) - 1,
                images.len()
            )));
        }
        Ok(PermAction {
            degree,
            action: GroupGens::new(space, images),
        })
    }

    pub fn space(&self) -> &FinVectSpace {
        &self.action.space
    }

    /// Checks the Coxeter presentation of `S_n` on the generator images:
    /// involutions, braid relations, and distant commutation.
    pub fn coxeter_check(&self) -> Result<()> {
        let gens = &self.action.gens;
        let is_id = |m: &ActionMat| m.is_identity();
        for (i, s) in gens.iter().enumerate() {
            if !is_id(&s.compose(s)) {
                return Err(Error::CoxeterViolation {
                    relation: format!("s{}^2 = 1", i + 1),
                });
            }
        }
        for i in 0..gens.len().saturating_sub(1) {
            let st = gens[i].compose(&gens[i + 1]);
            if !is_id(&st.compose(&st).compose(&st)) {
                return Err(Error::CoxeterViolation {
                    relation: format!("(s{} s{})^3 = 1", i + 1, i + 2),
                });
            }
        }
        for i in 0..gens.len() {
            for j in i + 2..gens.len() {
                let ab = gens[i].compose(&gens[j]);
                let ba = gens[j].compose(&gens[i]);
                if ab != ba {
                    return Err(Error::CoxeterViolation {
                        relation: format!("s{} s{} = s{} s{}", i + 1, j + 1, j + 1, i + 1),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn invariants(&self) -> Result<Subspace> {
        self.action.invariants()
    }

    pub fn coinvariants(&self) -> Result<(FinVectSpace, LinearMap)> {
        self.action.coinvariants()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::mat::rat_vec;

    /// Regular-ish action of S_2 on 2 points by swap.
    fn swap_action() -> GroupGens {
        GroupGens::new(FinVectSpace::numbered(2), vec![ActionMat::Perm(vec![1, 0])])
    }

    #[test]
    fn perm_invariants_are_orbit_sums() {
        let inv = swap_action().invariants().unwrap();
        assert_eq!(inv.dim(), 1);
        assert!(inv.contains(&rat_vec(&[1, 1])));
        assert!(!inv.contains(&rat_vec(&[1, 0])));
    }

    #[test]
    fn dense_averaging_matches_perm_path() {
        let perm = swap_action();
        let dense = GroupGens::new(
            FinVectSpace::numbered(2),
            vec![ActionMat::Dense(ActionMat::Perm(vec![1, 0]).to_mat())],
        );
        assert_eq!(
            perm.invariants().unwrap().basis(),
            dense.invariants().unwrap().basis()
        );
        let (qp, _) = perm.coinvariants().unwrap();
        let (qd, _) = dense.coinvariants().unwrap();
        assert_eq!(qp.dim(), qd.dim());
    }

    #[test]
    fn coxeter_check_accepts_s3_and_rejects_corruption() {
        // permutation representation of S_3 on 3 points
        let good = PermAction::new(
            3,
            FinVectSpace::numbered(3),
            vec![
                ActionMat::Perm(vec![1, 0, 2]),
                ActionMat::Perm(vec![0, 2, 1]),
            ],
        )
        .unwrap();
        good.coxeter_check().unwrap();
        let bad = PermAction::new(
            3,
            FinVectSpace::numbered(3),
            vec![
                ActionMat::Perm(vec![1, 0, 2]),
                ActionMat::Perm(vec![1, 2, 0]),
            ],
        )
        .unwrap();
        assert!(bad.coxeter_check().is_err());
    }

    #[test]
    fn hom_conjugation_on_units() {
        // dom perm swaps 0,1 in a 2-dim space; cod identity on 3-dim.
        let g = ActionMat::hom_conj(
            &ActionMat::Perm(vec![1, 0]),
            &ActionMat::identity_perm(3),
        );
        // unit E(0 → 2) at index 0*3+2 goes to E(1 → 2) at 1*3+2
        assert_eq!(g.image_of(2), Some(5));
    }

    #[test]
    fn group_enumeration_counts_s3() {
        let a = GroupGens::new(
            FinVectSpace::numbered(3),
            vec![
                ActionMat::Perm(vec![1, 0, 2]),
                ActionMat::Perm(vec![0, 2, 1]),
            ],
        );
        assert_eq!(a.enumerate(100).unwrap().len(), 6);
    }
}
