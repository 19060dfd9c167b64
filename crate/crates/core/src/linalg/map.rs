use super::mat::Mat;
use super::rat::Rat;
use super::space::FinVectSpace;

/// Linear map between labeled spaces. The matrix has `codomain.dim()` rows
/// and `domain.dim()` columns and acts on coordinate columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap {
    pub domain: FinVectSpace,
    pub codomain: FinVectSpace,
    pub mat: Mat,
}

impl LinearMap {
    pub fn new(domain: FinVectSpace, codomain: FinVectSpace, mat: Mat) -> Self {
        assert_eq!(mat.rows(), codomain.dim(), "codomain dimension mismatch");
        assert_eq!(mat.cols(), domain.dim(), "domain dimension mismatch");
        LinearMap {
            domain,
            codomain,
            mat,
        }
    }

    pub fn identity(space: &FinVectSpace) -> Self {
        LinearMap::new(space.clone(), space.clone(), Mat::identity(space.dim()))
    }

    pub fn zero(domain: FinVectSpace, codomain: FinVectSpace) -> Self {
        let mat = Mat::zero(codomain.dim(), domain.dim());
        LinearMap {
            domain,
            codomain,
            mat,
        }
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        self.mat.apply(v)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        assert_eq!(
            other.codomain, self.domain,
            "composition domain/codomain mismatch"
        );
        LinearMap::new(
            other.domain.clone(),
            self.codomain.clone(),
            self.mat.matmul(&other.mat),
        )
    }

    /// Tensor product of maps on row-major tensor bases.
    pub fn tensor(&self, other: &LinearMap) -> LinearMap {
        LinearMap::new(
            self.domain.tensor(&other.domain),
            self.codomain.tensor(&other.codomain),
            self.mat.kron(&other.mat),
        )
    }

    pub fn tensor_many(maps: &[&LinearMap]) -> LinearMap {
        let domains: Vec<&FinVectSpace> = maps.iter().map(|m| &m.domain).collect();
        let codomains: Vec<&FinVectSpace> = maps.iter().map(|m| &m.codomain).collect();
        let mut mat = Mat::identity(1);
        for m in maps {
            mat = mat.kron(&m.mat);
        }
        LinearMap::new(
            FinVectSpace::tensor_many(&domains),
            FinVectSpace::tensor_many(&codomains),
            mat,
        )
    }

    /// Transpose on the dual bases; domain and codomain swap.
    pub fn dual(&self) -> LinearMap {
        LinearMap::new(
            self.codomain.clone(),
            self.domain.clone(),
            self.mat.transpose(),
        )
    }

    pub fn direct_sum(&self, other: &LinearMap) -> LinearMap {
        LinearMap::new(
            self.domain.direct_sum(&other.domain),
            self.codomain.direct_sum(&other.codomain),
            self.mat.direct_sum(&other.mat),
        )
    }

    pub fn add(&self, other: &LinearMap) -> LinearMap {
        assert_eq!(self.domain, other.domain);
        assert_eq!(self.codomain, other.codomain);
        LinearMap::new(
            self.domain.clone(),
            self.codomain.clone(),
            &self.mat + &other.mat,
        )
    }

    pub fn is_zero(&self) -> bool {
        self.mat.is_zero()
    }
}
