//! Reference implementations used only by the tests. They are written from
//! the defining formulas and share no code with the library.
#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn phi_oracle(x: f64) -> C {
    if x == 0.0 {
        return C::new(1.0, 0.0);
    }
    (C::new(1.0, 0.0) - C::new(0.0, -x).exp()) / C::new(0.0, x)
}

pub fn gauss(nu: f64, sigma: f64) -> f64 {
    (-nu * nu / (2.0 * sigma * sigma)).exp()
}

/// Composite Simpson rule with `panels` (even) panels on `[-span, span]`.
pub fn simpson(panels: usize, span: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(panels.is_multiple_of(2));
    let h = 2.0 * span / panels as f64;
    let nodes = (0..=panels).map(|k| -span + k as f64 * h).collect();
    let weights = (0..=panels)
        .map(|k| {
            let c = if k == 0 || k == panels {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect();
    (nodes, weights)
}

/// Symmetric three-mode setup with identical Gaussian filters.
#[derive(Clone, Copy, Debug)]
pub struct Setup {
    pub t12: f64,
    pub t32: f64,
    pub sigma: f64,
    pub panels: usize,
    pub span: f64,
}

impl Setup {
    fn amplitude(&self, nu1: f64, nu3: f64) -> C {
        let x = -nu1 * self.t12 - nu3 * self.t32;
        let f = gauss(nu1, self.sigma) * gauss(nu1 + nu3, self.sigma) * gauss(nu3, self.sigma);
        phi_oracle(x) * f
    }

    fn amplitude_no_f3(&self, nu1: f64, nu3: f64) -> C {
        let x = -nu1 * self.t12 - nu3 * self.t32;
        phi_oracle(x) * (gauss(nu1, self.sigma) * gauss(nu1 + nu3, self.sigma))
    }

    /// `int dnu3 | int dnu1 A(nu1, nu3) e^{i nu1 tau} |^2` with photon 3 unfiltered.
    pub fn g2_w(&self, tau: f64) -> f64 {
        let (nu, w) = simpson(self.panels, self.span);
        let mut total = 0.0;
        for (&nu3, &w3) in nu.iter().zip(&w) {
            let mut inner = C::new(0.0, 0.0);
            for (&nu1, &w1) in nu.iter().zip(&w) {
                inner += self.amplitude_no_f3(nu1, nu3) * C::from_polar(w1, nu1 * tau);
            }
            total += w3 * inner.norm_sqr();
        }
        total
    }

    /// `| int dnu1 dnu3 A(nu1, nu3) e^{i (nu1 tau12 + nu3 tau32)} |^2`.
    pub fn g3_w(&self, tau12: f64, tau32: f64) -> f64 {
        let (nu, w) = simpson(self.panels, self.span);
        let mut sum = C::new(0.0, 0.0);
        for (&nu3, &w3) in nu.iter().zip(&w) {
            for (&nu1, &w1) in nu.iter().zip(&w) {
                sum += self.amplitude(nu1, nu3) * C::from_polar(w1 * w3, nu1 * tau12 + nu3 * tau32);
            }
        }
        sum.norm_sqr()
    }
}

/// Full width at half maximum of samples `(x, y)` by linear interpolation
/// of the two outermost half-maximum crossings.
pub fn fwhm_oracle(x: &[f64], y: &[f64]) -> f64 {
    let peak = y.iter().cloned().fold(f64::MIN, f64::max);
    let half = 0.5 * peak;
    let cross = |i: usize| x[i] + (half - y[i]) / (y[i + 1] - y[i]) * (x[i + 1] - x[i]);
    let left = (0..y.len() - 1)
        .find(|&i| y[i] < half && y[i + 1] >= half)
        .unwrap();
    let right = (0..y.len() - 1)
        .rev()
        .find(|&i| y[i] >= half && y[i + 1] < half)
        .unwrap();
    cross(right) - cross(left)
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Hermitian eigenvalues through the real embedding `[[Re, -Im], [Im, Re]]`,
/// whose spectrum is the Hermitian spectrum with every value doubled.
pub fn hermitian_eigenvalues_oracle(m: &DMatrix<C>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = vec![vec![0.0; 2 * n]; 2 * n];
    for r in 0..n {
        for c in 0..n {
            let z = m[(r, c)];
            a[r][c] = z.re;
            a[r + n][c + n] = z.re;
            a[r][c + n] = -z.im;
            a[r + n][c] = z.im;
        }
    }
    jacobi_eigenvalues(a).into_iter().step_by(2).collect()
}

/// Transpose of the first factor of a `da x db` bipartite operator.
pub fn partial_transpose_first(m: &DMatrix<C>, da: usize, db: usize) -> DMatrix<C> {
    let mut out = DMatrix::zeros(da * db, da * db);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    out[(k * db + j, i * db + l)] = m[(i * db + j, k * db + l)];
                }
            }
        }
    }
    out
}

pub fn negativity_oracle(m: &DMatrix<C>, da: usize, db: usize) -> f64 {
    hermitian_eigenvalues_oracle(&partial_transpose_first(m, da, db))
        .into_iter()
        .filter(|&x| x < 0.0)
        .map(|x| -x)
        .sum()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_complex_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> DMatrix<C> {
    DMatrix::from_fn(rows, cols, |_, _| {
        C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// `G G^dagger / Tr` for a random `d x rank` matrix `G`.
pub fn random_density(rng: &mut StdRng, d: usize, rank: usize) -> DMatrix<C> {
    let g = random_complex_matrix(rng, d, rank);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

pub fn random_unitary(rng: &mut StdRng, d: usize) -> DMatrix<C> {
    random_complex_matrix(rng, d, d).qr().q()
}

pub fn kron(a: &DMatrix<C>, b: &DMatrix<C>) -> DMatrix<C> {
    a.kronecker(b)
}
