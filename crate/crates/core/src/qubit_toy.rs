//! Finite-dimensional state algebra: pure and mixed states over tensor
//! products, partial trace, partial transpose, PPT negativity and Uhlmann
//! fidelity.
//!
//! Basis ordering is big-endian over subsystems: for three qubits `|abc>`
//! lives at index `4a + 2b + c`.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, C64};

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted in a density matrix; leaves room for
/// quadrature round-off in the mode-space reductions.
pub const EIGEN_FLOOR: f64 = -1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: DVector<C64>,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(amplitudes: DVector<C64>, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let norm_sqr = amplitudes.norm_squared();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "state is not normalized: squared norm {norm_sqr}"
            )));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Normalizes `amplitudes` before validating.
    pub fn normalized(amplitudes: DVector<C64>, dims: Vec<usize>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateInput(
                "zero or non-finite state vector".into(),
            ));
        }
        Self::new(amplitudes.unscale(norm), dims)
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch: {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
            dims: self.dims.clone(),
        }
    }
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: DMatrix<C64>, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidArgument(
                "density matrix must be square".into(),
            ));
        }
        check_dims(&dims, matrix.nrows())?;
        let n = matrix.nrows();
        for i in 0..n {
            for j in 0..=i {
                let d = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
                if d > HERMITIAN_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not Hermitian at ({i},{j}): deviation {d:e}"
                    )));
                }
            }
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidArgument(format!("trace is {tr}, expected 1")));
        }
        let rho = Self { matrix, dims };
        let min = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < EIGEN_FLOOR {
            return Err(Error::InvalidArgument(format!(
                "matrix is not positive semidefinite: eigenvalue {min:e}"
            )));
        }
        Ok(rho)
    }

    /// Convex combination `sum_k p_k rho_k`. Weights must be nonnegative and
    /// sum to one.
    pub fn mixture(terms: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let mut acc = DMatrix::zeros(first.dim(), first.dim());
        for (p, rho) in terms {
            if rho.dims != first.dims {
                return Err(Error::InvalidArgument("mixture of mismatched dims".into()));
            }
            if *p < 0.0 {
                return Err(Error::InvalidArgument(format!("negative weight {p}")));
            }
            acc += rho.matrix.scale(*p);
        }
        Self::new(acc, first.dims.clone())
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            matrix: self.matrix.kronecker(&other.matrix),
            dims,
        }
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, unitary: &DMatrix<C64>) -> Result<DensityMatrix> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::InvalidArgument("unitary has wrong shape".into()));
        }
        let m = unitary * &self.matrix * unitary.adjoint();
        let m = (&m + m.adjoint()).unscale(2.0);
        Ok(DensityMatrix {
            matrix: m,
            dims: self.dims.clone(),
        })
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr rho^2`.
    pub fn purity(&self) -> f64 {
        // Tr(rho rho) = sum_ij rho_ij rho_ji = sum_ij |rho_ij|^2 for Hermitian rho.
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "invalid subsystem dims {dims:?}"
        )));
    }
    let prod: usize = dims.iter().product();
    if prod != len {
        return Err(Error::InvalidArgument(format!(
            "dims {dims:?} have product {prod}, but the space has dimension {len}"
        )));
    }
    Ok(())
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `(|000> + |111>)/sqrt 2`.
pub fn make_ghz() -> PureState {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = DVector::zeros(8);
    v[0] = C64::new(a, 0.0);
    v[7] = C64::new(a, 0.0);
    PureState::new(v, vec![2, 2, 2]).expect("GHZ state is normalized")
}

/// `(|100> + |010> + |001>)/sqrt 3`.
pub fn make_w() -> PureState {
    let a = 1.0 / 3f64.sqrt();
    let mut v = DVector::zeros(8);
    for idx in [4, 2, 1] {
        v[idx] = C64::new(a, 0.0);
    }
    PureState::new(v, vec![2, 2, 2]).expect("W state is normalized")
}

/// `(|01> + |10>)/sqrt 2`.
pub fn make_psi_plus() -> PureState {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = DVector::zeros(4);
    v[1] = C64::new(a, 0.0);
    v[2] = C64::new(a, 0.0);
    PureState::new(v, vec![2, 2]).expect("Psi+ is normalized")
}

/// Projector onto a computational basis state of the given subsystems.
pub fn basis_projector(dims: &[usize], digits: &[usize]) -> Result<DensityMatrix> {
    if dims.len() != digits.len() || digits.iter().zip(dims).any(|(d, n)| d >= n) {
        return Err(Error::InvalidArgument(format!(
            "digits {digits:?} do not index dims {dims:?}"
        )));
    }
    let n: usize = dims.iter().product();
    let idx = compose(digits, dims);
    let mut m = DMatrix::zeros(n, n);
    m[(idx, idx)] = C64::new(1.0, 0.0);
    DensityMatrix::new(m, dims.to_vec())
}

fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (d, n)| acc * n + d)
}

fn decompose(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, n) in out.iter_mut().zip(dims).rev() {
        *slot = index % n;
        index /= n;
    }
}

fn validate_subset(subset: &[usize], n_sub: usize, what: &str) -> Result<()> {
    if subset.is_empty() || subset.len() >= n_sub {
        return Err(Error::InvalidArgument(format!(
            "{what} must be a nonempty proper subset of {n_sub} subsystems, got {subset:?}"
        )));
    }
    let mut seen = vec![false; n_sub];
    for &s in subset {
        if s >= n_sub || std::mem::replace(&mut seen[s], true) {
            return Err(Error::InvalidArgument(format!(
                "{what} {subset:?} has an out-of-range or repeated subsystem"
            )));
        }
    }
    Ok(())
}

/// Reduced state on the subsystems in `keep`, in the order given.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = rho.dims();
    validate_subset(keep, dims.len(), "keep")?;
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let trace_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let dk: usize = keep_dims.iter().product();
    let dt: usize = trace_dims.iter().product();

    // full[k * dt + t] = index in the original space of (kept digits k, traced digits t)
    let mut full = vec![0usize; dk * dt];
    let mut digits = vec![0usize; dims.len()];
    let mut kd = vec![0usize; keep.len()];
    let mut td = vec![0usize; traced.len()];
    for k in 0..dk {
        decompose(k, &keep_dims, &mut kd);
        for t in 0..dt {
            decompose(t, &trace_dims, &mut td);
            for (pos, &sub) in keep.iter().enumerate() {
                digits[sub] = kd[pos];
            }
            for (pos, &sub) in traced.iter().enumerate() {
                digits[sub] = td[pos];
            }
            full[k * dt + t] = compose(&digits, dims);
        }
    }

    let m = rho.matrix();
    let reduced = DMatrix::from_fn(dk, dk, |r, c| {
        (0..dt)
            .map(|t| m[(full[r * dt + t], full[c * dt + t])])
            .sum()
    });
    Ok(DensityMatrix {
        matrix: reduced,
        dims: keep_dims,
    })
}

/// Transpose of the subsystems listed in `side`, leaving the rest untouched.
pub fn partial_transpose(rho: &DensityMatrix, side: &[usize]) -> Result<DMatrix<C64>> {
    let dims = rho.dims();
    validate_subset(side, dims.len(), "cut")?;
    let n = rho.dim();
    let m = rho.matrix();
    let mut out = DMatrix::zeros(n, n);
    let mut rd = vec![0usize; dims.len()];
    let mut cd = vec![0usize; dims.len()];
    for r in 0..n {
        decompose(r, dims, &mut rd);
        for c in 0..n {
            decompose(c, dims, &mut cd);
            for &s in side {
                std::mem::swap(&mut rd[s], &mut cd[s]);
            }
            out[(r, c)] = m[(compose(&rd, dims), compose(&cd, dims))];
            for &s in side {
                std::mem::swap(&mut rd[s], &mut cd[s]);
            }
        }
    }
    Ok(out)
}

/// Sum of the magnitudes of the negative eigenvalues of the partial transpose
/// across the cut `side | rest`.
pub fn negativity(rho: &DensityMatrix, side: &[usize]) -> Result<f64> {
    let pt = partial_transpose(rho, side)?;
    Ok(hermitian_eigenvalues(&pt)
        .into_iter()
        .filter(|&l| l < 0.0)
        .fold(0.0, |acc, l| acc - l))
}

fn psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = m.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.max(0.0).sqrt(), 0.0)));
    v * d * v.adjoint()
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dims() != sigma.dims() {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: {:?} vs {:?}",
            rho.dims(),
            sigma.dims()
        )));
    }
    let s = psd_sqrt(rho.matrix());
    let inner = &s * sigma.matrix() * &s;
    let inner = (&inner + inner.adjoint()).unscale(2.0);
    let root_trace: f64 = hermitian_eigenvalues(&inner)
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn ghz_amplitudes() {
        let ghz = make_ghz();
        let a = std::f64::consts::FRAC_1_SQRT_2;
        for (i, z) in ghz.amplitudes().iter().enumerate() {
            let expect = if i == 0 || i == 7 { a } else { 0.0 };
            assert_eq!(*z, C64::new(expect, 0.0));
        }
        assert!((ghz.amplitudes().norm() - 1.0).abs() < 1e-15);
        assert!(ghz.inner(&make_w()).unwrap().norm() < 1e-15);
    }

    #[test]
    fn w_amplitudes_and_symmetry() {
        let w = make_w();
        let a = 1.0 / 3f64.sqrt();
        let nonzero: Vec<usize> = (0..8).filter(|&i| w.amplitudes()[i].norm() > 0.0).collect();
        assert_eq!(nonzero, vec![1, 2, 4]);
        for i in nonzero {
            assert_eq!(w.amplitudes()[i].re, a);
        }
        let rho = w.density();
        let r0 = partial_trace(&rho, &[0]).unwrap();
        let r1 = partial_trace(&rho, &[1]).unwrap();
        let r2 = partial_trace(&rho, &[2]).unwrap();
        assert!(max_abs_diff(r0.matrix(), r1.matrix()) < 1e-15);
        assert!(max_abs_diff(r0.matrix(), r2.matrix()) < 1e-15);
    }

    #[test]
    fn traced_ghz_is_classical_mixture() {
        let reduced = partial_trace(&make_ghz().density(), &[0, 1]).unwrap();
        let p00 = basis_projector(&[2, 2], &[0, 0]).unwrap();
        let p11 = basis_projector(&[2, 2], &[1, 1]).unwrap();
        let expect = DensityMatrix::mixture(&[(0.5, &p00), (0.5, &p11)]).unwrap();
        assert!(max_abs_diff(reduced.matrix(), expect.matrix()) < 1e-12);
        assert!(negativity(&reduced, &[0]).unwrap() < 1e-10);
        assert!((fidelity(&reduced, &expect).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn traced_w_keeps_psi_plus() {
        let reduced = partial_trace(&make_w().density(), &[0, 1]).unwrap();
        let psi = make_psi_plus().density();
        let p00 = basis_projector(&[2, 2], &[0, 0]).unwrap();
        let expect = DensityMatrix::mixture(&[(2.0 / 3.0, &psi), (1.0 / 3.0, &p00)]).unwrap();
        assert!(max_abs_diff(reduced.matrix(), expect.matrix()) < 1e-12);
        assert!(negativity(&reduced, &[0]).unwrap() > 0.1);
    }

    #[test]
    fn keep_order_is_respected() {
        // |0><0| (x) |1><1| traced down to (1, 0) must put subsystem 1 first.
        let a = basis_projector(&[2], &[0]).unwrap();
        let b = basis_projector(&[3], &[1]).unwrap();
        let c = basis_projector(&[2], &[1]).unwrap();
        let rho = a.kron(&b).kron(&c);
        let r = partial_trace(&rho, &[1, 0]).unwrap();
        assert_eq!(r.dims(), &[3, 2]);
        let expect = b.kron(&a);
        assert!(max_abs_diff(r.matrix(), expect.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_keep() {
        let rho = make_ghz().density();
        assert!(matches!(
            partial_trace(&rho, &[]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            partial_trace(&rho, &[0, 1, 2]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            partial_trace(&rho, &[3]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            partial_trace(&rho, &[1, 1]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn negativity_rejects_bad_cut() {
        let rho = make_psi_plus().density();
        assert!(negativity(&rho, &[]).is_err());
        assert!(negativity(&rho, &[0, 1]).is_err());
    }

    #[test]
    fn psi_plus_negativity_is_half() {
        let n = negativity(&make_psi_plus().density(), &[1]).unwrap();
        assert!((n - 0.5).abs() < 1e-12, "{n}");
    }

    #[test]
    fn fidelity_cases() {
        let ghz = make_ghz().density();
        let w = make_w().density();
        assert!((fidelity(&ghz, &ghz).unwrap() - 1.0).abs() < 1e-10);
        assert!(fidelity(&ghz, &w).unwrap() < 1e-12);
        let psi = make_psi_plus();
        assert!(matches!(
            fidelity(&ghz, &psi.density()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn constructor_rejects_invalid_matrices() {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(0, 1)] = C64::new(0.0, 0.1);
        assert!(DensityMatrix::new(m.clone(), vec![2]).is_err());
        m[(1, 0)] = C64::new(0.0, -0.1);
        // Hermitian, unit trace, but eigenvalues 1.0099 and -0.0099
        assert!(DensityMatrix::new(m, vec![2]).is_err());
        let half = DMatrix::<C64>::identity(2, 2).unscale(4.0);
        assert!(DensityMatrix::new(half, vec![2]).is_err());
        assert!(DensityMatrix::new(DMatrix::identity(4, 4).unscale(4.0), vec![3]).is_err());
    }

    #[test]
    fn purity_of_maximally_mixed() {
        let rho = DensityMatrix::new(DMatrix::identity(6, 6).unscale(6.0), vec![2, 3]).unwrap();
        assert!((rho.purity() - 1.0 / 6.0).abs() < 1e-15);
        assert!((make_w().density().purity() - 1.0).abs() < 1e-15);
    }
}
