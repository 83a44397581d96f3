//! Dense 4×4 complex linear algebra and the spin-3/2 operator algebra.
//!
//! Basis order is fixed everywhere: `{|+3/2⟩, |+1/2⟩, |−1/2⟩, |−3/2⟩}`.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{QuditError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative Hermiticity tolerance accepted by the eigensolver.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-10;
/// Jacobi sweeps stop once every off-diagonal is below this times `‖M‖_max`.
const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;
/// Eigenvalues closer than this (relative) are treated as one degenerate block.
const DEGENERACY_TOL: f64 = 1e-12;

/// A 4×4 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMatrix4(pub [[Complex64; 4]; 4]);

impl Default for ComplexMatrix4 {
    fn default() -> Self {
        Self::zeros()
    }
}

impl ComplexMatrix4 {
    pub const fn zeros() -> Self {
        ComplexMatrix4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        Self::from_diagonal_real([1.0; 4])
    }

    pub fn from_diagonal(d: [Complex64; 4]) -> Self {
        let mut m = Self::zeros();
        for (k, v) in d.into_iter().enumerate() {
            m.0[k][k] = v;
        }
        m
    }

    pub fn from_diagonal_real(d: [f64; 4]) -> Self {
        Self::from_diagonal(d.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn from_real(rows: [[f64; 4]; 4]) -> Self {
        ComplexMatrix4(rows.map(|r| r.map(|x| Complex64::new(x, 0.0))))
    }

    /// Builds a matrix from a function of (row, column).
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64; 4], b: &[Complex64; 4]) -> Self {
        Self::from_fn(|i, j| a[i] * b[j].conj())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * k)
    }

    pub fn scale_real(&self, k: f64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * k)
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|k| self.0[k][k]).sum()
    }

    pub fn diagonal(&self) -> [Complex64; 4] {
        [self.0[0][0], self.0[1][1], self.0[2][2], self.0[3][3]]
    }

    pub fn column(&self, j: usize) -> [Complex64; 4] {
        [self.0[0][j], self.0[1][j], self.0[2][j], self.0[3][j]]
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    /// `max |A_ij − B_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn mul_vec(&self, v: &[Complex64; 4]) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    /// `max |M − M†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `max |U†U − I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }
}

impl Index<(usize, usize)> for ComplexMatrix4 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Add for ComplexMatrix4 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl Sub for ComplexMatrix4 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl Neg for ComplexMatrix4 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_real(-1.0)
    }
}

impl Mul for ComplexMatrix4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
    }
}

impl Mul<f64> for ComplexMatrix4 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale_real(rhs)
    }
}

/// The spin-3/2 operators `(Sz, Sx, Sy)` in the fixed basis.
#[derive(Clone, Copy, Debug)]
pub struct SpinOperators {
    pub sz: ComplexMatrix4,
    pub sx: ComplexMatrix4,
    pub sy: ComplexMatrix4,
}

impl SpinOperators {
    pub fn sz_squared(&self) -> ComplexMatrix4 {
        self.sz * self.sz
    }
}

pub fn spin_operators() -> SpinOperators {
    let r3 = 3.0_f64.sqrt() / 2.0;
    let sz = ComplexMatrix4::from_diagonal_real([1.5, 0.5, -0.5, -1.5]);
    let sx = ComplexMatrix4::from_real([
        [0.0, r3, 0.0, 0.0],
        [r3, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, r3],
        [0.0, 0.0, r3, 0.0],
    ]);
    // Sy = (1/2i)·[[0, √3, 0, 0], [−√3, 0, 2, 0], [0, −2, 0, √3], [0, 0, −√3, 0]]
    let i = |x: f64| Complex64::new(0.0, x);
    let sy = ComplexMatrix4([
        [ZERO, i(-r3), ZERO, ZERO],
        [i(r3), ZERO, i(-1.0), ZERO],
        [ZERO, i(1.0), ZERO, i(-r3)],
        [ZERO, ZERO, i(r3), ZERO],
    ]);
    SpinOperators { sz, sx, sy }
}

/// Eigenvalues (ascending) and the unitary whose columns are the eigenvectors.
#[derive(Clone, Copy, Debug)]
pub struct Eigen {
    pub values: [f64; 4],
    pub vectors: ComplexMatrix4,
}

impl Eigen {
    /// `V · diag(f(λ)) · V†`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix4 {
        let d = ComplexMatrix4::from_diagonal(self.values.map(f));
        self.vectors * d * self.vectors.adjoint()
    }
}

/// Cyclic complex Jacobi eigensolver for a Hermitian 4×4 matrix.
pub fn hermitian_eigendecomposition(m: &ComplexMatrix4) -> Result<Eigen> {
    let scale = m.max_abs();
    let deviation = m.hermitian_deviation();
    let tolerance = HERMITIAN_INPUT_TOL * scale.max(f64::MIN_POSITIVE);
    if deviation > tolerance {
        return Err(QuditError::NotHermitian {
            deviation,
            tolerance,
        });
    }
    // Symmetrize exactly so the rotations act on a truly Hermitian matrix.
    let mut a = (*m + m.adjoint()).scale_real(0.5);
    for k in 0..4 {
        a.0[k][k].im = 0.0;
    }
    let mut v = ComplexMatrix4::identity();
    if scale == 0.0 {
        return Ok(Eigen {
            values: [0.0; 4],
            vectors: v,
        });
    }
    let threshold = JACOBI_TOL * scale;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = (0..4)
            .flat_map(|p| ((p + 1)..4).map(move |q| (p, q)))
            .fold(0.0_f64, |acc, (p, q)| acc.max(a.0[p][q].norm()));
        if off < threshold {
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                let apq = a.0[p][q];
                let r = apq.norm();
                if r < threshold * 1e-3 {
                    continue;
                }
                // Phase rotation on column q makes a_pq real and positive, then a
                // real Givens rotation annihilates it.
                let phase = apq.conj() / r;
                let theta = 0.5 * (2.0 * r).atan2(a.0[q][q].re - a.0[p][p].re);
                let (s, c) = theta.sin_cos();
                let mut g = ComplexMatrix4::identity();
                g.0[p][p] = Complex64::new(c, 0.0);
                g.0[p][q] = Complex64::new(s, 0.0);
                g.0[q][p] = phase * -s;
                g.0[q][q] = phase * c;
                a = g.adjoint() * a * g;
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                a.0[p][p].im = 0.0;
                a.0[q][q].im = 0.0;
                v = v * g;
            }
        }
    }

    let mut order: Vec<usize> = (0..4).collect();
    let vals: Vec<f64> = (0..4).map(|k| a.0[k][k].re).collect();
    order.sort_by(|&x, &y| vals[x].total_cmp(&vals[y]));
    // Inside degenerate clusters, order by the index of the dominant component.
    let dominant = |col: usize| {
        (0..4)
            .max_by(|&i, &j| v.0[i][col].norm().total_cmp(&v.0[j][col].norm()))
            .unwrap_or(0)
    };
    let mut start = 0;
    while start < 4 {
        let mut end = start + 1;
        while end < 4 && (vals[order[end]] - vals[order[start]]).abs() <= DEGENERACY_TOL * scale {
            end += 1;
        }
        order[start..end].sort_by_key(|&c| dominant(c));
        start = end;
    }

    let values = [vals[order[0]], vals[order[1]], vals[order[2]], vals[order[3]]];
    let vectors = ComplexMatrix4::from_fn(|i, j| v.0[i][order[j]]);
    Ok(Eigen { values, vectors })
}

/// `exp(−i·H·t)` via the eigendecomposition of `H`.
pub fn propagator(h: &ComplexMatrix4, t: f64) -> Result<ComplexMatrix4> {
    if !t.is_finite() {
        return Err(QuditError::InvalidParameter(format!(
            "propagation time must be finite, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(ComplexMatrix4::identity());
    }
    let eig = hermitian_eigendecomposition(h)?;
    Ok(eig.apply_fn(|lambda| Complex64::from_polar(1.0, -lambda * t)))
}

/// Propagator of a diagonal Hamiltonian with real energies.
pub fn diagonal_propagator(energies: [f64; 4], t: f64) -> ComplexMatrix4 {
    ComplexMatrix4::from_diagonal(energies.map(|e| Complex64::from_polar(1.0, -e * t)))
}

/// Pure-state normalization tolerance.
pub const STATE_NORM_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted for a density matrix.
pub const DENSITY_EIG_TOL: f64 = -1e-10;

/// A state of the four-level manifold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuartetState {
    Pure([Complex64; 4]),
    Mixed(ComplexMatrix4),
}

impl QuartetState {
    /// Basis ket `|k⟩` (index in the fixed basis order).
    pub fn basis(k: usize) -> Self {
        let mut amps = [ZERO; 4];
        amps[k] = ONE;
        QuartetState::Pure(amps)
    }

    /// `|+1/2⟩`.
    pub fn plus_half() -> Self {
        Self::basis(1)
    }

    /// `|−1/2⟩`.
    pub fn minus_half() -> Self {
        Self::basis(2)
    }

    /// Equal statistical mixture of `|+1/2⟩` and `|−1/2⟩`.
    pub fn mixed_half() -> Self {
        QuartetState::Mixed(ComplexMatrix4::from_diagonal_real([0.0, 0.5, 0.5, 0.0]))
    }

    pub fn density_matrix(&self) -> ComplexMatrix4 {
        match self {
            QuartetState::Pure(a) => ComplexMatrix4::outer(a, a),
            QuartetState::Mixed(rho) => *rho,
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, QuartetState::Pure(_))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            QuartetState::Pure(a) => {
                let norm: f64 = a.iter().map(|c| c.norm_sqr()).sum();
                if (norm - 1.0).abs() > STATE_NORM_TOL {
                    return Err(QuditError::InvalidState(format!(
                        "ket norm² = {norm}, expected 1"
                    )));
                }
            }
            QuartetState::Mixed(rho) => {
                let scale = rho.max_abs().max(1.0);
                if rho.hermitian_deviation() > STATE_NORM_TOL * scale {
                    return Err(QuditError::InvalidState(
                        "density matrix is not Hermitian".into(),
                    ));
                }
                let tr = rho.trace();
                if (tr.re - 1.0).abs() > STATE_NORM_TOL || tr.im.abs() > STATE_NORM_TOL {
                    return Err(QuditError::InvalidState(format!(
                        "density matrix trace = {tr}, expected 1"
                    )));
                }
                let eig = hermitian_eigendecomposition(rho)?;
                if eig.values[0] < DENSITY_EIG_TOL {
                    return Err(QuditError::InvalidState(format!(
                        "density matrix has negative eigenvalue {}",
                        eig.values[0]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Pure components with their weights: the ket itself, or the
    /// eigen-ensemble of a density matrix (zero-weight terms dropped).
    pub fn ensemble(&self) -> Result<Vec<(f64, [Complex64; 4])>> {
        match self {
            QuartetState::Pure(a) => Ok(vec![(1.0, *a)]),
            QuartetState::Mixed(rho) => {
                let eig = hermitian_eigendecomposition(rho)?;
                Ok((0..4)
                    .filter(|&k| eig.values[k] > 1e-15)
                    .map(|k| (eig.values[k], eig.vectors.column(k)))
                    .collect())
            }
        }
    }

    /// Expectation value `Tr[O ρ]` (real part).
    pub fn expectation(&self, op: &ComplexMatrix4) -> f64 {
        (*op * self.density_matrix()).trace().re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spin_matrices_match_definitions() {
        let s = spin_operators();
        assert_eq!(s.sz.diagonal().map(|z| z.re), [1.5, 0.5, -0.5, -1.5]);
        assert_abs_diff_eq!(s.sx[(0, 1)].re, 0.866_025_403_784_438_6, epsilon = 1e-15);
        assert_eq!(s.sx[(1, 2)].re, 1.0);
        assert_eq!(s.sx[(2, 3)], s.sx[(0, 1)]);
        assert!(s.sx.hermitian_deviation() == 0.0);
        assert!(s.sy.hermitian_deviation() == 0.0);
    }

    #[test]
    fn angular_momentum_algebra() {
        let s = spin_operators();
        let i = Complex64::new(0.0, 1.0);
        assert!(s.sx.commutator(&s.sy).max_abs_diff(&s.sz.scale(i)) < 1e-14);
        assert!(s.sy.commutator(&s.sz).max_abs_diff(&s.sx.scale(i)) < 1e-14);
        assert!(s.sz.commutator(&s.sx).max_abs_diff(&s.sy.scale(i)) < 1e-14);
        let casimir = s.sx * s.sx + s.sy * s.sy + s.sz * s.sz;
        assert!(casimir.max_abs_diff(&ComplexMatrix4::identity().scale_real(3.75)) < 1e-14);
    }

    #[test]
    fn diagonal_input_is_returned_as_is() {
        let m = ComplexMatrix4::from_diagonal_real([1.0, 2.0, 3.0, 4.0]);
        let eig = hermitian_eigendecomposition(&m).unwrap();
        assert_eq!(eig.values, [1.0, 2.0, 3.0, 4.0]);
        assert_eq!(eig.vectors, ComplexMatrix4::identity());
    }

    #[test]
    fn reversed_diagonal_is_sorted() {
        let m = ComplexMatrix4::from_diagonal_real([4.0, -1.0, 3.0, 0.5]);
        let eig = hermitian_eigendecomposition(&m).unwrap();
        assert_eq!(eig.values, [-1.0, 0.5, 3.0, 4.0]);
        assert_eq!(eig.vectors[(1, 0)], ONE);
        assert_eq!(eig.vectors[(0, 3)], ONE);
    }

    #[test]
    fn degenerate_block_ordered_by_dominant_component() {
        let m = ComplexMatrix4::from_diagonal_real([2.0, 1.0, 2.0, 1.0]);
        let eig = hermitian_eigendecomposition(&m).unwrap();
        assert_eq!(eig.values, [1.0, 1.0, 2.0, 2.0]);
        let cols: Vec<usize> = (0..4)
            .map(|c| (0..4).find(|&r| eig.vectors[(r, c)].norm() > 0.5).unwrap())
            .collect();
        assert_eq!(cols, vec![1, 3, 0, 2]);
    }

    #[test]
    fn sx_has_spin_spectrum() {
        let eig = hermitian_eigendecomposition(&spin_operators().sx).unwrap();
        for (got, want) in eig.values.iter().zip([-1.5, -0.5, 0.5, 1.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-13);
        }
        assert!(eig.vectors.unitarity_deviation() < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = spin_operators().sx;
        m[(0, 1)] += Complex64::new(1e-3, 0.0);
        match hermitian_eigendecomposition(&m) {
            Err(QuditError::NotHermitian { deviation, .. }) => assert!(deviation > 1e-4),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn zero_matrix() {
        let eig = hermitian_eigendecomposition(&ComplexMatrix4::zeros()).unwrap();
        assert_eq!(eig.values, [0.0; 4]);
    }

    #[test]
    fn propagator_edge_cases() {
        let h = spin_operators().sx * 3.0;
        assert_eq!(propagator(&h, 0.0).unwrap(), ComplexMatrix4::identity());
        let e = [0.3, -1.2, 2.0, 0.0];
        let d = propagator(&ComplexMatrix4::from_diagonal_real(e), 0.7).unwrap();
        assert!(d.max_abs_diff(&diagonal_propagator(e, 0.7)) < 1e-15);
        assert!(propagator(&h, f64::NAN).is_err());
    }

    #[test]
    fn state_validation() {
        assert!(QuartetState::plus_half().validate().is_ok());
        assert!(QuartetState::mixed_half().validate().is_ok());
        let bad = QuartetState::Pure([ONE, ONE, ZERO, ZERO]);
        assert!(bad.validate().is_err());
        let neg = QuartetState::Mixed(ComplexMatrix4::from_diagonal_real([1.5, -0.5, 0.0, 0.0]));
        assert!(neg.validate().is_err());
        let ens = QuartetState::mixed_half().ensemble().unwrap();
        assert_eq!(ens.len(), 2);
        assert!(ens.iter().all(|(w, _)| (*w - 0.5).abs() < 1e-15));
    }
}
