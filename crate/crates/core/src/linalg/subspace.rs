use num::{One, Zero};

use super::map::LinearMap;
use super::mat::Mat;
use super::rat::Rat;
use super::space::{FinVectSpace, Label};

/// Subspace of an ambient labeled space, stored as a basis matrix in reduced
/// column echelon form. Two subspaces of the same ambient space are equal
/// exactly when their basis matrices are equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    pub ambient: FinVectSpace,
    basis: Mat,
}

impl Subspace {
    /// Span of the columns of `spanning`; the stored basis is canonicalized.
    pub fn span(ambient: FinVectSpace, spanning: Mat) -> Self {
        assert_eq!(spanning.rows(), ambient.dim(), "ambient dimension mismatch");
        Subspace {
            ambient,
            basis: spanning.rcef(),
        }
    }

    pub fn full(ambient: FinVectSpace) -> Self {
        let n = ambient.dim();
        Subspace {
            ambient,
            basis: Mat::identity(n),
        }
    }

    pub fn zero(ambient: FinVectSpace) -> Self {
        let n = ambient.dim();
        Subspace {
            ambient,
            basis: Mat::zero(n, 0),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn basis_vector(&self, j: usize) -> Vec<Rat> {
        self.basis.col(j)
    }

    /// The subspace as a space in its own right (numbered basis) together
    /// with the inclusion into the ambient space.
    pub fn as_space(&self) -> (FinVectSpace, LinearMap) {
        let space = FinVectSpace::numbered(self.dim());
        let incl = LinearMap::new(space.clone(), self.ambient.clone(), self.basis.clone());
        (space, incl)
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.coords_of(v).is_some()
    }

    /// Coordinates of `v` in the stored basis, if `v` lies in the subspace.
    pub fn coords_of(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        self.basis.solve(v)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        // Columns (x, y) with B1 x = B2 y; the intersection is B1 x.
        let stacked = self.basis.hstack(&(-&other.basis));
        let ker = stacked.kernel();
        let mut cols = Vec::new();
        for j in 0..ker.cols() {
            let xy = ker.col(j);
            let x = &xy[..self.dim()];
            cols.push(self.basis.apply(x));
        }
        Subspace::span(
            self.ambient.clone(),
            Mat::from_cols(self.ambient.dim(), cols),
        )
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        Subspace::span(self.ambient.clone(), self.basis.hstack(&other.basis))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        (0..self.dim()).all(|j| other.contains(&self.basis_vector(j)))
    }

    /// Tensor product of subspaces inside the tensor of the ambient spaces.
    pub fn tensor(&self, other: &Subspace) -> Subspace {
        let ambient = self.ambient.tensor(&other.ambient);
        Subspace::span(ambient, self.basis.kron(other.basis()))
    }

    /// Quotient of the ambient space by this subspace: the quotient space
    /// (classes of the non-pivot ambient basis vectors) and the projection.
    pub fn quotient(&self) -> (FinVectSpace, LinearMap) {
        let n = self.ambient.dim();
        // Row-reduce the transpose so each basis vector reads as a row whose
        // pivot coordinate can be eliminated from ambient basis vectors.
        let (rr, pivots) = self.basis.transpose().rref();
        let free: Vec<usize> = (0..n).filter(|i| !pivots.contains(i)).collect();
        let labels: Vec<Label> = free
            .iter()
            .map(|&i| Label::pair(Label::atom("class"), self.ambient.label(i).clone()))
            .collect();
        let qspace = FinVectSpace::new(labels).expect("distinct ambient labels");
        let mut proj = Mat::zero(free.len(), n);
        for (qi, &i) in free.iter().enumerate() {
            proj.set(qi, i, Rat::one());
        }
        // e_{pivot} maps to minus the free part of its reduced row.
        for (row, &p) in pivots.iter().enumerate() {
            for (qi, &i) in free.iter().enumerate() {
                let v = -rr.get(row, i).clone();
                if !v.is_zero() {
                    proj.set(qi, p, v);
                }
            }
        }
        let proj = LinearMap::new(self.ambient.clone(), qspace.clone(), proj);
        (qspace, proj)
    }
}

pub fn kernel(map: &LinearMap) -> Subspace {
    Subspace {
        ambient: map.domain.clone(),
        basis: map.mat.kernel(),
    }
}

pub fn image(map: &LinearMap) -> Subspace {
    Subspace::span(map.codomain.clone(), map.mat.clone())
}

/// Fiber product of `f : A → C` and `g : B → C`: the subspace of `A ⊕ B`
/// where both legs agree, with its two projections.
#[derive(Debug, Clone)]
pub struct Pullback {
    pub total: Subspace,
    pub space: FinVectSpace,
    pub to_left: LinearMap,
    pub to_right: LinearMap,
}

pub fn pullback(f: &LinearMap, g: &LinearMap) -> Pullback {
    assert_eq!(f.codomain, g.codomain, "pullback target mismatch");
    let stacked = f.mat.hstack(&(-&g.mat));
    let ker = stacked.kernel();
    let ambient = f.domain.direct_sum(&g.domain);
    let total = Subspace {
        ambient,
        basis: ker,
    };
    let (space, incl) = total.as_space();
    let da = f.domain.dim();
    let db = g.domain.dim();
    let proj_a = Mat::from_fn(da, total.dim(), |i, j| incl.mat.get(i, j).clone());
    let proj_b = Mat::from_fn(db, total.dim(), |i, j| incl.mat.get(da + i, j).clone());
    Pullback {
        to_left: LinearMap::new(space.clone(), f.domain.clone(), proj_a),
        to_right: LinearMap::new(space.clone(), g.domain.clone(), proj_b),
        total,
        space,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::mat::rat_vec;

    fn m(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(rows.iter().map(|r| rat_vec(r)).collect())
    }

    #[test]
    fn intersect_planes() {
        let amb = FinVectSpace::numbered(3);
        let s1 = Subspace::span(amb.clone(), m(&[&[1, 0], &[0, 1], &[0, 0]]));
        let s2 = Subspace::span(amb.clone(), m(&[&[0, 0], &[1, 0], &[0, 1]]));
        let i = s1.intersect(&s2);
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&rat_vec(&[0, 1, 0])));
    }

    #[test]
    fn pullback_agrees_with_kernel() {
        let a = FinVectSpace::numbered(2);
        let c = FinVectSpace::numbered(1);
        let f = LinearMap::new(a.clone(), c.clone(), m(&[&[1, 0]]));
        let g = LinearMap::new(a.clone(), c.clone(), m(&[&[0, 1]]));
        let pb = pullback(&f, &g);
        // pairs ((x1,x2),(y1,y2)) with x1 = y2
        assert_eq!(pb.total.dim(), 3);
        for j in 0..pb.total.dim() {
            let v = pb.total.basis_vector(j);
            assert_eq!(f.apply(&v[..2]), g.apply(&v[2..]));
        }
    }

    #[test]
    fn quotient_projects_onto_classes() {
        let amb = FinVectSpace::numbered(3);
        let s = Subspace::span(amb.clone(), m(&[&[1], &[1], &[0]]));
        let (q, proj) = s.quotient();
        assert_eq!(q.dim(), 2);
        // e0 and -e1 agree modulo the subspace
        let a = proj.apply(&rat_vec(&[1, 0, 0]));
        let b = proj.apply(&rat_vec(&[0, -1, 0]));
        assert_eq!(a, b);
        // the subspace itself maps to zero
        assert!(proj.apply(&rat_vec(&[1, 1, 0])).iter().all(Rat::is_zero));
    }

    #[test]
    fn tensor_of_subspaces() {
        let a = FinVectSpace::numbered(2);
        let s = Subspace::span(a.clone(), m(&[&[1], &[1]]));
        let t = s.tensor(&Subspace::full(a.clone()));
        assert_eq!(t.dim(), 2);
        assert!(t.contains(&rat_vec(&[1, 0, 1, 0])));
        assert!(!t.contains(&rat_vec(&[1, 0, 0, 0])));
    }
}
