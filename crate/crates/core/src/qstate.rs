//! Spin-½ / polarization states built from Bloch directions, plus the
//! validated state types the rest of the crate passes around.
//!
//! Phase convention: every state this module constructs has its first
//! non-negligible amplitude real and nonnegative. Physical quantities never
//! depend on it, but it makes printed states reproducible.

use std::ops::Neg;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::tensor::{self, kron, kron_vec, ComplexMatrix, FactorShape, DEFAULT_TOL};

/// Normalization tolerance for Bloch vectors and state vectors.
pub const NORM_TOL: f64 = 1e-12;

/// Amplitudes below this modulus are skipped when fixing the phase.
const GAUGE_EPS: f64 = 1e-12;

/// Unit direction `n⃗` on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const X: Self = Self {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };
    pub const Y: Self = Self {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };
    pub const Z: Self = Self {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Self { x, y, z };
        let norm = v.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized { norm });
        }
        Ok(v)
    }

    /// Rescales an arbitrary nonzero direction to unit length.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Unnormalized { norm });
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Uniform sample on the unit sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let r = (1.0 - z * z).max(0.0).sqrt();
        Self {
            x: r * phi.cos(),
            y: r * phi.sin(),
            z,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Neg for BlochVector {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// Eigenvalue of `σ⃗·n⃗`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Amplitudes over a factor shape. Normalized unless built with
/// [`StateVector::unnormalized`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    shape: FactorShape,
    amplitudes: Vec<Complex64>,
    normalized: bool,
}

impl StateVector {
    pub fn new(shape: FactorShape, amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = Self::unnormalized(shape, amplitudes)?;
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized { norm });
        }
        Ok(Self {
            normalized: true,
            ..v
        })
    }

    /// Intermediate vectors that need not have unit norm.
    pub fn unnormalized(shape: FactorShape, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != shape.dim() {
            return Err(Error::DimensionMismatch {
                expected: shape.dim(),
                actual: amplitudes.len(),
            });
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            shape,
            amplitudes,
            normalized: false,
        })
    }

    /// Single two-level state from two amplitudes.
    pub fn qubit(a: Complex64, b: Complex64) -> Result<Self> {
        Self::new(FactorShape::qubits(1), vec![a, b])
    }

    /// Recovers `ψ` (in the standard phase convention) from a pure `|ψ⟩⟨ψ|`.
    pub fn from_pure_density(rho: &DensityMatrix, tol: f64) -> Result<Self> {
        if (rho.purity() - 1.0).abs() > tol {
            return Err(Error::InvalidDensity("state is not pure"));
        }
        let m = rho.matrix();
        let pivot = (0..m.rows())
            .max_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re))
            .expect("density matrix has at least one row");
        let scale = m[(pivot, pivot)].re.sqrt();
        let mut amps: Vec<_> = m.column(pivot).iter().map(|z| z / scale).collect();
        fix_phase(&mut amps);
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|z| *z /= norm);
        Self::new(rho.shape().clone(), amps)
    }

    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Product state `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            shape: self.shape.concat(&other.shape),
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
            normalized: self.normalized && other.normalized,
        }
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm();
        if norm <= GAUGE_EPS {
            return Err(Error::Unnormalized { norm });
        }
        Self::new(
            self.shape.clone(),
            self.amplitudes.iter().map(|z| z / norm).collect(),
        )
    }

    fn require_normalized(&self) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized { norm });
        }
        Ok(())
    }
}

fn fix_phase(amps: &mut [Complex64]) {
    if let Some(pivot) = amps.iter().find(|z| z.norm() > GAUGE_EPS).copied() {
        let phase = pivot.conj() / pivot.norm();
        amps.iter_mut().for_each(|z| *z *= phase);
    }
}

/// The operator `σ⃗·n⃗`.
pub fn pauli_dot(n: &BlochVector) -> Result<ComplexMatrix> {
    BlochVector::new(n.x, n.y, n.z)?;
    Ok(ComplexMatrix::from_vec(
        2,
        2,
        vec![
            Complex64::new(n.z, 0.0),
            Complex64::new(n.x, -n.y),
            Complex64::new(n.x, n.y),
            Complex64::new(-n.z, 0.0),
        ],
    )
    .expect("2x2 finite entries"))
}

/// Eigenvector of `σ⃗·n⃗` with eigenvalue `sign`.
///
/// Uses the half-angle form `(cos θ/2, e^{iφ} sin θ/2)`, which stays
/// accurate at both poles.
pub fn spin_state(n: &BlochVector, sign: Sign) -> StateVector {
    let rho = n.x.hypot(n.y);
    // take the well-conditioned half angle from n_z, the other from sin θ = ρ
    let (cos_half, sin_half) = if n.z >= 0.0 {
        let cos_half = ((1.0 + n.z) / 2.0).sqrt();
        (cos_half, rho / (2.0 * cos_half))
    } else {
        let sin_half = ((1.0 - n.z) / 2.0).sqrt();
        (rho / (2.0 * sin_half), sin_half)
    };
    let phase = if rho > 0.0 {
        Complex64::new(n.x / rho, n.y / rho)
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut amps = match sign {
        Sign::Plus => vec![Complex64::new(cos_half, 0.0), phase * sin_half],
        Sign::Minus => vec![Complex64::new(sin_half, 0.0), -phase * cos_half],
    };
    fix_phase(&mut amps);
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|z| *z /= norm);
    StateVector {
        shape: FactorShape::qubits(1),
        amplitudes: amps,
        normalized: true,
    }
}

/// The state orthogonal to a two-level `psi`, in the standard phase convention.
pub fn orthogonal_state(psi: &StateVector) -> Result<StateVector> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: psi.dim(),
        });
    }
    psi.require_normalized()?;
    let [a, b] = [psi.amplitudes[0], psi.amplitudes[1]];
    let mut amps = vec![-b.conj(), a.conj()];
    fix_phase(&mut amps);
    Ok(StateVector {
        shape: psi.shape.clone(),
        amplitudes: amps,
        normalized: true,
    })
}

/// Total-spin-zero state `(χ_n⊗χ_{-n} − χ_{-n}⊗χ_n)/√2`.
pub fn singlet(n: &BlochVector) -> StateVector {
    let up = spin_state(n, Sign::Plus);
    let down = spin_state(n, Sign::Minus);
    let a = up.tensor(&down);
    let b = down.tensor(&up);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    StateVector {
        shape: FactorShape::qubits(2),
        amplitudes: a
            .amplitudes
            .iter()
            .zip(&b.amplitudes)
            .map(|(x, y)| (x - y) * s)
            .collect(),
        normalized: true,
    }
}

/// Hermitian idempotent operator on the factors described by `shape`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    shape: FactorShape,
    matrix: ComplexMatrix,
}

impl Projector {
    pub fn from_matrix(shape: FactorShape, matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != shape.dim() {
            return Err(Error::DimensionMismatch {
                expected: shape.dim(),
                actual: matrix.rows(),
            });
        }
        if !tensor::is_hermitian(&matrix, DEFAULT_TOL)? {
            return Err(Error::NotProjector("not hermitian"));
        }
        if (&matrix * &matrix).max_abs_diff(&matrix) > DEFAULT_TOL {
            return Err(Error::NotProjector("not idempotent"));
        }
        Ok(Self { shape, matrix })
    }

    /// `|ψ⟩⟨ψ|` for normalized `psi`.
    pub fn from_state(psi: &StateVector) -> Result<Self> {
        psi.require_normalized()?;
        Ok(Self {
            shape: psi.shape.clone(),
            matrix: ComplexMatrix::outer(&psi.amplitudes, &psi.amplitudes),
        })
    }

    pub fn identity(shape: FactorShape) -> Self {
        let matrix = ComplexMatrix::identity(shape.dim());
        Self { shape, matrix }
    }

    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Rank, read off the trace.
    pub fn rank(&self) -> usize {
        tensor::trace(&self.matrix).expect("square").re.round() as usize
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            shape: self.shape.concat(&other.shape),
            matrix: kron(&self.matrix, &other.matrix),
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite operator over `shape`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    shape: FactorShape,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(shape: FactorShape, matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(shape, matrix, DEFAULT_TOL)
    }

    pub fn with_tolerance(shape: FactorShape, matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != shape.dim() {
            return Err(Error::DimensionMismatch {
                expected: shape.dim(),
                actual: matrix.rows(),
            });
        }
        if !tensor::is_hermitian(&matrix, tol)? {
            return Err(Error::InvalidDensity("not hermitian"));
        }
        if !tensor::is_unit_trace(&matrix, tol)? {
            return Err(Error::InvalidDensity("trace is not 1"));
        }
        if !tensor::is_psd(&matrix, tol)? {
            return Err(Error::InvalidDensity("not positive semidefinite"));
        }
        Ok(Self { shape, matrix })
    }

    pub fn from_state(psi: &StateVector) -> Result<Self> {
        let p = Projector::from_state(psi)?;
        Self::new(p.shape, p.matrix)
    }

    /// `E/d`.
    pub fn maximally_mixed(shape: FactorShape) -> Self {
        let d = shape.dim();
        Self {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
            shape,
        }
    }

    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρ_ij|² for hermitian ρ
        self.matrix.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity(&self, psi: &StateVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: psi.dim(),
            });
        }
        let rho_psi = self.matrix.apply(psi.amplitudes())?;
        let value: Complex64 = psi
            .amplitudes()
            .iter()
            .zip(&rho_psi)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(value.re.clamp(0.0, 1.0))
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            shape: self.shape.concat(&other.shape),
            matrix: kron(&self.matrix, &other.matrix),
        }
    }
}

pub fn projector(psi: &StateVector) -> Result<Projector> {
    Projector::from_state(psi)
}

pub fn density(psi: &StateVector) -> Result<DensityMatrix> {
    DensityMatrix::from_state(psi)
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

pub fn fidelity(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    rho.fidelity(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn bloch_vector_validation() {
        assert!(BlochVector::new(0.0, 0.0, 2.0).is_err());
        assert!(BlochVector::new(S, S, 0.0).is_ok());
        let n = BlochVector::normalized(0.0, 3.0, 4.0).unwrap();
        assert!((n.norm() - 1.0).abs() < 1e-15);
        assert!(BlochVector::normalized(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn pauli_dot_axes() {
        assert_eq!(
            pauli_dot(&BlochVector::Z).unwrap(),
            ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
        );
        assert_eq!(
            pauli_dot(&BlochVector::X).unwrap(),
            ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
        );
        let y = pauli_dot(&BlochVector::Y).unwrap();
        assert_eq!(y[(0, 1)], c(0.0, -1.0));
        assert_eq!(y[(1, 0)], c(0.0, 1.0));
        assert!(pauli_dot(&BlochVector {
            x: 1.0,
            y: 1.0,
            z: 0.0
        })
        .is_err());
    }

    #[test]
    fn spin_states_on_axes() {
        let up = spin_state(&BlochVector::Z, Sign::Plus);
        let down = spin_state(&BlochVector::Z, Sign::Minus);
        assert!(close(up.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)], 1e-15));
        assert!(close(down.amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0)], 1e-15));
        let x_up = spin_state(&BlochVector::X, Sign::Plus);
        assert!(close(x_up.amplitudes(), &[c(S, 0.0), c(S, 0.0)], 1e-15));
    }

    #[test]
    fn spin_state_at_south_pole_is_well_defined() {
        let south = -BlochVector::Z;
        let up = spin_state(&south, Sign::Plus);
        assert!(close(up.amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0)], 1e-15));
        // within rounding of the pole
        let near = BlochVector::normalized(1e-9, -1e-9, -1.0).unwrap();
        let v = spin_state(&near, Sign::Plus);
        let applied = pauli_dot(&near).unwrap().apply(v.amplitudes()).unwrap();
        assert!(close(&applied, v.amplitudes(), 1e-12));
    }

    #[test]
    fn eigen_relation_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = BlochVector::random(&mut rng);
            let sigma = pauli_dot(&n).unwrap();
            for (sign, s) in [(Sign::Plus, 1.0), (Sign::Minus, -1.0)] {
                let v = spin_state(&n, sign);
                let lhs = sigma.apply(v.amplitudes()).unwrap();
                let rhs: Vec<_> = v.amplitudes().iter().map(|z| z * s).collect();
                assert!(close(&lhs, &rhs, 1e-12));
                assert!((v.norm() - 1.0).abs() < 1e-12);
            }
            let sq = &sigma * &sigma;
            assert!(sq.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
            let ip = spin_state(&n, Sign::Plus)
                .inner(&spin_state(&n, Sign::Minus))
                .unwrap();
            assert!(ip.norm() < 1e-12);
        }
    }

    #[test]
    fn phase_convention_first_component_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = BlochVector::random(&mut rng);
            for sign in [Sign::Plus, Sign::Minus] {
                let a = spin_state(&n, sign).amplitudes()[0];
                assert!(a.re >= 0.0 && a.im == 0.0);
            }
        }
    }

    #[test]
    fn orthogonal_state_examples() {
        let e0 = StateVector::qubit(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let o = orthogonal_state(&e0).unwrap();
        assert!(close(o.amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0)], 1e-15));

        let plus = StateVector::qubit(c(S, 0.0), c(S, 0.0)).unwrap();
        let o = orthogonal_state(&plus).unwrap();
        assert!(close(o.amplitudes(), &[c(S, 0.0), c(-S, 0.0)], 1e-15));

        let unnorm =
            StateVector::unnormalized(FactorShape::qubits(1), vec![c(2.0, 0.0), c(0.0, 0.0)])
                .unwrap();
        assert!(orthogonal_state(&unnorm).is_err());
        assert!(orthogonal_state(&singlet(&BlochVector::Z)).is_err());
    }

    #[test]
    fn orthogonal_matches_minus_eigenvector_up_to_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = BlochVector::random(&mut rng);
            let o = orthogonal_state(&spin_state(&n, Sign::Plus)).unwrap();
            let m = spin_state(&n, Sign::Minus);
            assert!((o.inner(&m).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn singlet_along_z() {
        let s = singlet(&BlochVector::Z);
        assert!(close(
            s.amplitudes(),
            &[c(0.0, 0.0), c(S, 0.0), c(-S, 0.0), c(0.0, 0.0)],
            1e-15
        ));
    }

    #[test]
    fn singlet_is_axis_independent_and_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let reference = singlet(&BlochVector::Z);
        for _ in 0..100 {
            let n = BlochVector::random(&mut rng);
            let s = singlet(&n);
            assert!((s.inner(&reference).unwrap().norm() - 1.0).abs() < 1e-12);
            let a = s.amplitudes();
            // swapping the two factors exchanges indices 1 and 2
            let swapped = [a[0], a[2], a[1], a[3]];
            let negated: Vec<_> = a.iter().map(|z| -z).collect();
            assert!(close(&swapped, &negated, 1e-12));
        }
    }

    #[test]
    fn projector_examples() {
        let e0 = StateVector::qubit(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(
            projector(&e0).unwrap().matrix(),
            &ComplexMatrix::from_real_diag(&[1.0, 0.0])
        );
        let minus = StateVector::qubit(c(S, 0.0), c(-S, 0.0)).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]]);
        assert!(projector(&minus).unwrap().matrix().max_abs_diff(&expected) < 1e-15);
        assert_eq!(projector(&minus).unwrap().rank(), 1);
        let unnorm =
            StateVector::unnormalized(FactorShape::qubits(1), vec![c(1.0, 0.0), c(1.0, 0.0)])
                .unwrap();
        assert!(projector(&unnorm).is_err());
        assert!(density(&unnorm).is_err());
    }

    #[test]
    fn projector_from_matrix_checks() {
        let shape = FactorShape::qubits(1);
        assert!(
            Projector::from_matrix(shape.clone(), ComplexMatrix::identity(2).scale_real(0.5))
                .is_err()
        );
        let skew = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(
            Projector::from_matrix(shape.clone(), skew),
            Err(Error::NotProjector("not hermitian"))
        );
        assert_eq!(Projector::identity(FactorShape::qubits(2)).rank(), 4);
    }

    #[test]
    fn purity_and_fidelity() {
        let mixed = DensityMatrix::maximally_mixed(FactorShape::qubits(1));
        assert!((purity(&mixed) - 0.5).abs() < 1e-15);
        let x_up = spin_state(&BlochVector::X, Sign::Plus);
        let x_down = spin_state(&-BlochVector::X, Sign::Plus);
        let rho = density(&x_up).unwrap();
        assert!((purity(&rho) - 1.0).abs() < 1e-15);
        assert!(fidelity(&rho, &x_down).unwrap() < 1e-15);
        assert!((fidelity(&rho, &x_up).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity(&rho, &singlet(&BlochVector::Z)).is_err());
    }

    #[test]
    fn density_rejects_invalid() {
        let shape = FactorShape::qubits(1);
        let neg = ComplexMatrix::from_real_diag(&[1.5, -0.5]);
        assert_eq!(
            DensityMatrix::new(shape.clone(), neg),
            Err(Error::InvalidDensity("not positive semidefinite"))
        );
        let trace2 = ComplexMatrix::identity(2);
        assert_eq!(
            DensityMatrix::new(shape, trace2),
            Err(Error::InvalidDensity("trace is not 1"))
        );
    }

    #[test]
    fn pure_density_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let psi = spin_state(&BlochVector::random(&mut rng), Sign::Minus);
            let back = StateVector::from_pure_density(&density(&psi).unwrap(), 1e-10).unwrap();
            assert!(close(back.amplitudes(), psi.amplitudes(), 1e-12));
        }
        let mixed = DensityMatrix::maximally_mixed(FactorShape::qubits(1));
        assert!(StateVector::from_pure_density(&mixed, 1e-10).is_err());
    }
}
