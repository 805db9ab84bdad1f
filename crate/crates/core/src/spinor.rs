//! Exact diagonalization of the single-mode spin-1 Hamiltonian
//! H = (c₂/2N) F² − q n₀ at small atom number.
//!
//! The Fock basis {|n₊, n₀, n₋⟩ : n₊ + n₀ + n₋ = N} is ordered
//! lexicographically in (n₊, n₀). Operators are assembled in sparse form on
//! the full basis; the solve splits the basis into magnetization blocks
//! M = n₊ − n₋ (both F² and n₀ conserve M) and diagonalizes each block
//! densely, which yields the complete spectrum.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub const MAX_ATOMS: u64 = 60;

/// Occupations (n₊, n₀, n₋).
pub type FockState = (u32, u32, u32);

#[derive(Debug, Clone)]
pub struct FockBasis {
    n_atoms: u32,
    states: Vec<FockState>,
}

impl FockBasis {
    pub fn new(n_atoms: u32) -> Self {
        let n = n_atoms;
        let mut states = Vec::with_capacity(((n + 1) * (n + 2) / 2) as usize);
        for plus in 0..=n {
            for zero in 0..=(n - plus) {
                states.push((plus, zero, n - plus - zero));
            }
        }
        FockBasis { n_atoms, states }
    }

    pub fn n_atoms(&self) -> u32 {
        self.n_atoms
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    /// Index of (n₊, n₀, ·) in lexicographic order.
    pub fn index(&self, plus: u32, zero: u32) -> Option<usize> {
        let n = self.n_atoms;
        if plus > n || zero > n - plus {
            return None;
        }
        let (p, n) = (plus as usize, n as usize);
        // rows before `p` hold (N+1) + N + ... + (N-p+2) states
        Some(p * (n + 1) - p * p.saturating_sub(1) / 2 + zero as usize)
    }
}

/// Sparse real matrix in row-major map form; enough for N ≤ 60.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<BTreeMap<usize, f64>>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        SparseMatrix {
            dim,
            rows: vec![BTreeMap::new(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if v != 0.0 {
            *self.rows[i].entry(j).or_insert(0.0) += v;
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i].get(&j).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(&j, &v)| (i, j, v)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = SparseMatrix::zeros(self.dim);
        for (i, j, v) in self.entries() {
            t.add(j, i, v);
        }
        t
    }

    pub fn matmul(&self, other: &SparseMatrix) -> Self {
        let mut out = SparseMatrix::zeros(self.dim);
        for (i, row) in self.rows.iter().enumerate() {
            for (&k, &a) in row {
                for (&j, &b) in &other.rows[k] {
                    out.add(i, j, a * b);
                }
            }
        }
        out
    }

    pub fn scaled_add(&self, alpha: f64, other: &SparseMatrix, beta: f64) -> Self {
        let mut out = SparseMatrix::zeros(self.dim);
        for (i, j, v) in self.entries() {
            out.add(i, j, alpha * v);
        }
        for (i, j, v) in other.entries() {
            out.add(i, j, beta * v);
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.entries() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.entries()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().map(|(_, _, v)| v * v).sum::<f64>().sqrt()
    }
}

/// Spin operators on the full Fock basis.
#[derive(Debug, Clone)]
pub struct SpinorOperators {
    pub basis: FockBasis,
    pub fz: SparseMatrix,
    pub fplus: SparseMatrix,
    pub fminus: SparseMatrix,
    pub f2: SparseMatrix,
    pub n0: SparseMatrix,
}

impl SpinorOperators {
    pub fn new(n_atoms: u32) -> Self {
        let basis = FockBasis::new(n_atoms);
        let dim = basis.len();
        let mut fz = SparseMatrix::zeros(dim);
        let mut fplus = SparseMatrix::zeros(dim);
        let mut n0 = SparseMatrix::zeros(dim);
        let sqrt2 = std::f64::consts::SQRT_2;
        for (j, &(p, z, m)) in basis.states().iter().enumerate() {
            fz.add(j, j, p as f64 - m as f64);
            n0.add(j, j, z as f64);
            // ψ₊†ψ₀
            if z > 0 {
                let i = basis.index(p + 1, z - 1).expect("target state in basis");
                fplus.add(i, j, sqrt2 * (((p + 1) * z) as f64).sqrt());
            }
            // ψ₀†ψ₋
            if m > 0 {
                let i = basis.index(p, z + 1).expect("target state in basis");
                fplus.add(i, j, sqrt2 * (((z + 1) * m) as f64).sqrt());
            }
        }
        let fminus = fplus.transpose();
        let transverse = fplus.matmul(&fminus).scaled_add(0.5, &fminus.matmul(&fplus), 0.5);
        let f2 = fz.matmul(&fz).scaled_add(1.0, &transverse, 1.0);
        SpinorOperators {
            basis,
            fz,
            fplus,
            fminus,
            f2,
            n0,
        }
    }

    /// H = (c₂/2N) F² − q n₀.
    pub fn hamiltonian(&self, c2: f64, q: f64) -> SparseMatrix {
        let n = self.basis.n_atoms() as f64;
        self.f2.scaled_add(c2 / (2.0 * n), &self.n0, -q)
    }
}

/// Low-lying spectrum of the spinor Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorSpectrum {
    /// The lowest eigenvalues in ascending order, relative to the ground state.
    pub eigenvalues: Vec<f64>,
    /// ⟨n₀⟩ in the ground state.
    pub ground_n0_expectation: f64,
    pub basis_dimension: usize,
}

impl SpinorSpectrum {
    /// Gap to the first excited level.
    pub fn first_gap(&self) -> Option<f64> {
        self.eigenvalues.get(1).copied()
    }
}

struct BlockSolution {
    magnetization: i64,
    values: Vec<f64>,
    ground_n0: f64,
}

fn solve_block(ops: &SpinorOperators, h: &SparseMatrix, members: &[usize], magnetization: i64) -> Result<BlockSolution> {
    let dim = members.len();
    let mut local = DMatrix::<f64>::zeros(dim, dim);
    let position: BTreeMap<usize, usize> = members.iter().enumerate().map(|(a, &g)| (g, a)).collect();
    for (a, &g) in members.iter().enumerate() {
        for (&j, &v) in &h.rows[g] {
            let b = *position.get(&j).ok_or_else(|| {
                Error::Numerical("Hamiltonian couples different magnetization blocks".into())
            })?;
            local[(a, b)] = v;
        }
    }
    let eig = SymmetricEigen::new(local);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let ground = eig.eigenvectors.column(order[0]);
    let ground_n0 = members
        .iter()
        .enumerate()
        .map(|(a, &g)| ground[a] * ground[a] * ops.n0.get(g, g))
        .sum();
    Ok(BlockSolution {
        magnetization,
        values: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        ground_n0,
    })
}

/// The `k` lowest levels of H = (c₂/2N)F² − q n₀ and ⟨n₀⟩ in the ground
/// state. Energies are shifted so that the ground state sits at zero.
pub fn exact_spinor_spectrum(n_atoms: u64, c2: f64, q: f64, k: usize) -> Result<SpinorSpectrum> {
    if n_atoms > MAX_ATOMS {
        return Err(Error::Resource(format!(
            "exact diagonalization limited to N <= {MAX_ATOMS}, got {n_atoms}"
        )));
    }
    if n_atoms < 2 {
        return Err(Error::Domain(format!("n_atoms must be >= 2, got {n_atoms}")));
    }
    if !(c2.is_finite() && q.is_finite()) {
        return Err(Error::Domain("c2 and q must be finite".into()));
    }
    let n = n_atoms as u32;
    let dim = ((n + 1) * (n + 2) / 2) as usize;
    if k == 0 || k > dim {
        return Err(Error::Domain(format!("k must be in 1..={dim}, got {k}")));
    }
    let ops = SpinorOperators::new(n);
    let h = ops.hamiltonian(c2, q);

    let mut blocks: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &(p, _, m)) in ops.basis.states().iter().enumerate() {
        blocks.entry(p as i64 - m as i64).or_default().push(i);
    }
    let solved = blocks
        .iter()
        .map(|(&mag, members)| solve_block(&ops, &h, members, mag))
        .collect::<Result<Vec<_>>>()?;

    let mut all: Vec<f64> = solved.iter().flat_map(|b| b.values.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    let e0 = all[0];
    // ties (q = 0, odd N) resolve to the block with the smallest |M|, then M
    let tol = 1e-12 * all.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let ground = solved
        .iter()
        .filter(|b| b.values[0] - e0 <= tol)
        .min_by_key(|b| (b.magnetization.abs(), b.magnetization))
        .expect("at least one block holds the ground state");

    Ok(SpinorSpectrum {
        eigenvalues: all.iter().take(k).map(|e| e - e0).collect(),
        ground_n0_expectation: ground.ground_n0,
        basis_dimension: dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_dimension_and_indexing() {
        for n in [2u32, 5, 17, 40] {
            let b = FockBasis::new(n);
            assert_eq!(b.len(), ((n + 1) * (n + 2) / 2) as usize);
            for (i, &(p, z, m)) in b.states().iter().enumerate() {
                assert_eq!(p + z + m, n);
                assert_eq!(b.index(p, z), Some(i));
            }
            assert_eq!(b.index(n + 1, 0), None);
        }
        let s = exact_spinor_spectrum(2, 1.0, 0.3, 6).unwrap();
        assert_eq!(s.basis_dimension, 6);
        assert_eq!(s.eigenvalues.len(), 6);
    }

    #[test]
    fn operators_conserve_atom_number() {
        let ops = SpinorOperators::new(9);
        let states = ops.basis.states();
        for m in [&ops.fz, &ops.fplus, &ops.fminus, &ops.f2, &ops.n0] {
            for (i, j, _) in m.entries() {
                let (a, b) = (states[i], states[j]);
                assert_eq!(a.0 + a.1 + a.2, b.0 + b.1 + b.2);
            }
        }
        // F₊ raises the magnetization by exactly one
        for (i, j, _) in ops.fplus.entries() {
            let (a, b) = (states[i], states[j]);
            assert_eq!(a.0 as i64 - a.2 as i64, b.0 as i64 - b.2 as i64 + 1);
        }
    }

    #[test]
    fn f2_symmetric_psd_with_spin_multiplets() {
        let n = 8;
        let ops = SpinorOperators::new(n);
        let norm = ops.f2.frobenius_norm();
        assert!(ops.f2.max_asymmetry() < 1e-12 * norm);
        let eig = SymmetricEigen::new(ops.f2.to_dense());
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-9 * norm);
        // eigenvalues are F(F+1) with F of the same parity as N
        for &v in eig.eigenvalues.iter() {
            let f = ((1.0 + 4.0 * v).sqrt() - 1.0) / 2.0;
            assert!((f - f.round()).abs() < 1e-8, "{v}");
            assert_eq!(f.round() as u32 % 2, n % 2);
        }
    }

    #[test]
    fn zero_field_gap_is_three_c2_over_n() {
        for n in [10u64, 20, 30] {
            let c2 = 1.7;
            let s = exact_spinor_spectrum(n, c2, 0.0, 8).unwrap();
            // F = 0 singlet, then the F = 2 quintuplet
            let gap = 3.0 * c2 / n as f64;
            for e in &s.eigenvalues[1..6] {
                assert!((e - gap).abs() < 1e-10, "{e} vs {gap}");
            }
        }
    }

    #[test]
    fn block_solve_matches_dense_full_solve() {
        let (n, c2, q) = (12u64, 1.0, 0.04);
        let s = exact_spinor_spectrum(n, c2, q, 91).unwrap();
        let ops = SpinorOperators::new(n as u32);
        let dense = ops.hamiltonian(c2, q).to_dense();
        let eig = SymmetricEigen::new(dense);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        for (a, b) in s.eigenvalues.iter().zip(&vals) {
            assert!((a - (b - vals[0])).abs() < 1e-10);
        }
        let imin = (0..vals.len())
            .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
            .unwrap();
        let g = eig.eigenvectors.column(imin);
        let n0: f64 = ops.basis.states().iter().enumerate().map(|(i, s)| g[i] * g[i] * s.1 as f64).sum();
        assert!((n0 - s.ground_n0_expectation).abs() < 1e-9);
    }

    #[test]
    fn ground_state_localises_with_field() {
        let s = exact_spinor_spectrum(20, 1.0, 0.02, 4).unwrap();
        assert!(s.ground_n0_expectation > 0.0 && s.ground_n0_expectation <= 20.0);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(s.eigenvalues[0], 0.0);
        // the first rotor excitation is the degenerate M = ±1 pair
        assert!((s.eigenvalues[1] - s.eigenvalues[2]).abs() < 1e-10);
    }

    #[test]
    fn regression_n20() {
        // frozen from the first run of this solver; rotor ω_θ ≈ 0.2093
        let s = exact_spinor_spectrum(20, 1.0, 0.02, 4).unwrap();
        assert!((s.eigenvalues[1] - 0.187_730_89).abs() < 1e-7, "{}", s.eigenvalues[1]);
        assert!((20.0 - s.ground_n0_expectation - 4.495_82).abs() < 1e-4);
    }

    #[test]
    fn argument_errors() {
        assert!(matches!(exact_spinor_spectrum(61, 1.0, 0.1, 1), Err(Error::Resource(_))));
        assert!(matches!(exact_spinor_spectrum(1, 1.0, 0.1, 1), Err(Error::Domain(_))));
        assert!(matches!(exact_spinor_spectrum(4, 1.0, 0.1, 16), Err(Error::Domain(_))));
        assert!(matches!(exact_spinor_spectrum(4, 1.0, 0.1, 0), Err(Error::Domain(_))));
    }
}
