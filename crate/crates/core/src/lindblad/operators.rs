// SPDX-License-Identifier: Apache-2.0

//! Operators on the three-level atom ⊗ truncated Fock space.
//!
//! Every composite operator is a Kronecker product with the atomic factor
//! first, so the basis index of `|level, n⟩` is `level * (n_max + 1) + n`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::LindbladError;

pub type CMatrix = DMatrix<Complex64>;

/// Relative tolerance used when checking `H = H†`.
pub const HERMITIAN_RTOL: f64 = 1e-12;

/// Atomic levels of the Λ-system. `E` is the common excited state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    S,
    E,
    D,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::S, Level::E, Level::D];

    pub fn index(self) -> usize {
        match self {
            Level::S => 0,
            Level::E => 1,
            Level::D => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Level::S => "S",
            Level::E => "E",
            Level::D => "D",
        }
    }
}

/// Shape of the truncated Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertConfig {
    n_max: usize,
}

impl HilbertConfig {
    pub const ATOMIC_LEVELS: usize = 3;

    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn photon_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        Self::ATOMIC_LEVELS * self.photon_dim()
    }

    pub fn levels(&self) -> [Level; 3] {
        Level::ALL
    }

    pub fn basis_index(&self, level: Level, n: usize) -> usize {
        level.index() * self.photon_dim() + n
    }
}

/// Square complex matrix acting on a Hilbert space of dimension `dim`.
///
/// Hamiltonians are stored in rad/s, collapse operators in √(rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix(CMatrix);

impl OperatorMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self, LindbladError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(LindbladError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        Ok(Self(matrix))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.map(|z| z * factor))
    }

    /// Largest entry of `|H − H†|` relative to the largest entry of `|H|`.
    pub fn hermiticity_error(&self) -> f64 {
        let scale = self.0.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let diff = (&self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        diff / scale
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_error() <= HERMITIAN_RTOL
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }
}

impl std::ops::Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix(&self.0 + &rhs.0)
    }
}

impl std::ops::Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix(&self.0 * &rhs.0)
    }
}

/// Standard operator set for a [`HilbertConfig`].
#[derive(Debug, Clone)]
pub struct OperatorSet {
    cfg: HilbertConfig,
    /// Cavity annihilator `I ⊗ a`.
    pub a: OperatorMatrix,
    /// Number operator `I ⊗ a†a`.
    pub number: OperatorMatrix,
    pub identity: OperatorMatrix,
}

/// Photon-space annihilator with `a|n⟩ = √n |n−1⟩`.
pub fn fock_annihilator(n_max: usize) -> CMatrix {
    let d = n_max + 1;
    let mut a = CMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Atomic `|to⟩⟨from|` on the bare three-level space.
pub fn atomic_transition(to: Level, from: Level) -> CMatrix {
    let mut m = CMatrix::zeros(3, 3);
    m[(to.index(), from.index())] = Complex64::new(1.0, 0.0);
    m
}

pub fn build_operators(cfg: HilbertConfig) -> OperatorSet {
    let photon_id = CMatrix::identity(cfg.photon_dim(), cfg.photon_dim());
    let atom_id = CMatrix::identity(3, 3);
    let a_ph = fock_annihilator(cfg.n_max());
    let n_ph = a_ph.adjoint() * &a_ph;
    OperatorSet {
        cfg,
        a: OperatorMatrix(atom_id.kronecker(&a_ph)),
        number: OperatorMatrix(atom_id.kronecker(&n_ph)),
        identity: OperatorMatrix(atom_id.kronecker(&photon_id)),
    }
}

impl OperatorSet {
    pub fn config(&self) -> HilbertConfig {
        self.cfg
    }

    pub fn a_dag(&self) -> OperatorMatrix {
        self.a.adjoint()
    }

    /// `|level⟩⟨level| ⊗ I`.
    pub fn projector(&self, level: Level) -> OperatorMatrix {
        self.transition(level, level)
    }

    /// `|to⟩⟨from| ⊗ I`.
    pub fn transition(&self, to: Level, from: Level) -> OperatorMatrix {
        let photon_id = CMatrix::identity(self.cfg.photon_dim(), self.cfg.photon_dim());
        self.compose(&atomic_transition(to, from), &photon_id)
    }

    /// Kronecker product `atomic ⊗ photon`, atomic factor first.
    pub fn compose(&self, atomic: &CMatrix, photon: &CMatrix) -> OperatorMatrix {
        assert_eq!(atomic.shape(), (3, 3), "atomic factor must be 3x3");
        assert_eq!(
            photon.shape(),
            (self.cfg.photon_dim(), self.cfg.photon_dim()),
            "photon factor has wrong dimension"
        );
        OperatorMatrix(atomic.kronecker(photon))
    }

    /// `|level, n⟩⟨level, n|`.
    pub fn basis_projector(&self, level: Level, n: usize) -> OperatorMatrix {
        let i = self.cfg.basis_index(level, n);
        let mut m = CMatrix::zeros(self.cfg.dim(), self.cfg.dim());
        m[(i, i)] = Complex64::new(1.0, 0.0);
        OperatorMatrix(m)
    }
}
