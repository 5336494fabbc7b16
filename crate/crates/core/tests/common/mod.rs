//! Reference computations used as independent oracles. Nothing here calls
//! `embed`, `partial_trace`, or the conditioning code it is checking.

#![allow(dead_code)]

use cdm::qstate::{DensityMatrix, StateVector};
use cdm::tensor::{ComplexMatrix, FactorShape};
use num_complex::Complex64;
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| random_complex(rng)).collect();
    ComplexMatrix::from_vec(rows, cols, data).unwrap()
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| random_complex(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

pub fn random_state<R: Rng>(rng: &mut R, shape: FactorShape) -> StateVector {
    let v = random_unit_vector(rng, shape.dim());
    StateVector::new(shape, v).unwrap()
}

/// `A A† / Tr(A A†)` with `A` of random rank between 1 and `dim`.
pub fn random_density<R: Rng>(rng: &mut R, shape: FactorShape) -> DensityMatrix {
    let d = shape.dim();
    let rank = rng.random_range(1..=d);
    let a = random_matrix(rng, d, rank);
    let aa = &a * &a.dagger();
    let tr: f64 = (0..d).map(|i| aa[(i, i)].re).sum();
    DensityMatrix::new(shape, aa.scale_real(1.0 / tr)).unwrap()
}

/// Orthonormal basis of `C^dim` by Gram–Schmidt on random vectors.
pub fn random_basis<R: Rng>(rng: &mut R, dim: usize) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    while basis.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| random_complex(rng)).collect();
        for b in &basis {
            let ip: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= ip * bi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    basis
}

/// Digits of `index` for qubit count `n`, most significant first.
pub fn bits_of(index: usize, n: usize) -> Vec<usize> {
    (0..n).rev().map(|k| (index >> k) & 1).collect()
}

pub fn index_of(bits: &[usize]) -> usize {
    bits.iter().fold(0, |acc, &b| acc * 2 + b)
}

/// Kronecker product straight from `(A⊗B)[i·p+k, j·q+l] = A[i,j]·B[k,l]`.
pub fn kron_by_formula(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (m, n, p, q) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(m * p, n * q);
    for i in 0..m {
        for j in 0..n {
            for k in 0..p {
                for l in 0..q {
                    out[(i * p + k, j * q + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Relabels qubit factors: new factor `k` is old factor `perm[k]`.
pub fn permute_qubits(m: &ComplexMatrix, perm: &[usize]) -> ComplexMatrix {
    let n = perm.len();
    let d = 1 << n;
    let remap = |i: usize| {
        let old = bits_of(i, n);
        let new: Vec<usize> = perm.iter().map(|&src| old[src]).collect();
        index_of(&new)
    };
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out[(remap(i), remap(j))] = m[(i, j)];
        }
    }
    out
}

/// Inverse of a permutation.
pub fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

/// Partial trace over qubit factors by explicit summation over matching
/// traced digits.
pub fn partial_trace_by_sum(rho: &ComplexMatrix, n: usize, traced: &[usize]) -> ComplexMatrix {
    let kept: Vec<usize> = (0..n).filter(|k| !traced.contains(k)).collect();
    let dk = 1 << kept.len();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..(1 << n) {
        for j in 0..(1 << n) {
            let bi = bits_of(i, n);
            let bj = bits_of(j, n);
            if traced.iter().all(|&t| bi[t] == bj[t]) {
                let a = index_of(&kept.iter().map(|&k| bi[k]).collect::<Vec<_>>());
                let b = index_of(&kept.iter().map(|&k| bj[k]).collect::<Vec<_>>());
                out[(a, b)] += rho[(i, j)];
            }
        }
    }
    out
}

/// Conditional state of the remaining qubits when the `on` qubits of the
/// pure state `psi` are projected onto `phi`: contract
/// `θ(rest) = Σ_on φ*(on) ψ(on, rest)` and normalize `θθ†`.
/// Returns `(ρ, ‖θ‖²)`.
pub fn condition_pure_by_contraction(
    psi: &[Complex64],
    n: usize,
    on: &[usize],
    phi: &[Complex64],
) -> (ComplexMatrix, f64) {
    let rest: Vec<usize> = (0..n).filter(|k| !on.contains(k)).collect();
    let mut theta = vec![c(0.0, 0.0); 1 << rest.len()];
    for (i, amp) in psi.iter().enumerate() {
        let b = bits_of(i, n);
        let u = index_of(&on.iter().map(|&k| b[k]).collect::<Vec<_>>());
        let r = index_of(&rest.iter().map(|&k| b[k]).collect::<Vec<_>>());
        theta[r] += phi[u].conj() * amp;
    }
    let p: f64 = theta.iter().map(|z| z.norm_sqr()).sum();
    let rho = ComplexMatrix::outer(&theta, &theta).scale_real(1.0 / p);
    (rho, p)
}

/// Closed-form eigenvalues of a 2x2 hermitian matrix, ascending.
pub fn eig2(m: &ComplexMatrix) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)].norm();
    let mid = (a + d) / 2.0;
    let r = (((a - d) / 2.0).powi(2) + b * b).sqrt();
    [mid - r, mid + r]
}

pub fn real(m: &[&[f64]]) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(m)
}

/// `(I + sign·σ·n)/2` from the Pauli matrices written out entrywise.
pub fn bloch_projector(n: [f64; 3], sign: f64) -> ComplexMatrix {
    let [x, y, z] = n;
    let h = 0.5 * sign;
    ComplexMatrix::from_vec(
        2,
        2,
        vec![
            c(0.5 + h * z, 0.0),
            c(h * x, -h * y),
            c(h * x, h * y),
            c(0.5 - h * z, 0.0),
        ],
    )
    .unwrap()
}
