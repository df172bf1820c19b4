//! Self-contained dense linear algebra for small symmetric (and a few
//! nonsymmetric) matrices.
//!
//! Everything downstream needs full spectra of matrices no larger than a few
//! hundred rows: Hessians of the shifted objective, iteration Jacobians, and
//! projected classification matrices. At that size a cyclic Jacobi sweep is
//! simpler than tridiagonalization and hands back orthonormal eigenvectors
//! for free; runtime is dominated by tensor contractions, not by `eigh`.

use crate::error::{Error, Result};
use serde::Serialize;

/// Dense symmetric matrix, row-major storage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymMatrix {
    n: usize,
    a: Vec<f64>,
}

/// Maximum asymmetry tolerated when constructing from contraction output.
const SYMMETRY_TOL: f64 = 1e-12;

impl SymMatrix {
    /// Build from row-major values, requiring symmetry to 1e-12 (relative to
    /// the largest entry). The stored matrix is exactly symmetrized.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("SymMatrix::new"));
        }
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((values[i * n + j] - values[j * n + i]).abs());
            }
        }
        if worst > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(worst));
        }
        Ok(Self::symmetrized(n, values))
    }

    /// Build by averaging A <- (A + A^T)/2, without a symmetry check.
    pub fn symmetrized(n: usize, mut values: Vec<f64>) -> Self {
        assert_eq!(values.len(), n * n, "SymMatrix storage size");
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (values[i * n + j] + values[j * n + i]);
                values[i * n + j] = avg;
                values[j * n + i] = avg;
            }
        }
        Self { n, a: values }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            a: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
        self.a[j * self.n + i] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.a
    }

    /// y = A x
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let n = self.n;
        self.a
            .chunks_exact(n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// x^T A x
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.apply(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.a {
            *v *= c;
        }
    }
}

/// Full spectrum of a symmetric matrix: eigenvalues ascending, orthonormal
/// eigenvectors stored column-major and aligned with the eigenvalues.
#[derive(Debug, Clone)]
pub struct Spectrum {
    n: usize,
    pub eigenvalues: Vec<f64>,
    vectors: Vec<f64>, // column-major: vectors[j*n + i] = Q[i][j]
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn eigenvector(&self, j: usize) -> &[f64] {
        &self.vectors[j * self.n..(j + 1) * self.n]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }
}

/// Full eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps until the off-diagonal Frobenius mass drops below 1e-14 * |A|_F,
/// capped at 100 sweeps (an error then reports the mass actually achieved).
pub fn eigh(a: &SymMatrix) -> Result<Spectrum> {
    let n = a.n;
    if a.a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("eigh"));
    }
    let mut m = a.a.clone();
    let mut q = vec![0.0; n * n]; // row-major accumulation of rotations
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    let target = 1e-14 * a.frobenius_norm();

    let off = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * m[i * n + j] * m[i * n + j];
            }
        }
        s.sqrt()
    };

    let mut converged = n < 2;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        if off(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for r in (p + 1)..n {
                let apq = m[p * n + r];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[r * n + r];
                let theta = (aqq - app) / (2.0 * apq);
                // smaller-magnitude root of t^2 + 2 theta t - 1 = 0
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + r];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + r] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[r * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[r * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let qkp = q[k * n + p];
                    let qkq = q[k * n + r];
                    q[k * n + p] = c * qkp - s * qkq;
                    q[k * n + r] = s * qkp + c * qkq;
                }
            }
        }
        sweeps += 1;
    }
    if !converged && off(&m) > target {
        return Err(Error::EighNoConvergence {
            sweeps,
            off: off(&m),
        });
    }

    let first_nonzero_sign = |col: usize| -> f64 {
        for i in 0..n {
            let v = q[i * n + col];
            if v.abs() > 1e-12 {
                return v.signum();
            }
        }
        1.0
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let li = m[i * n + i];
        let lj = m[j * n + j];
        li.partial_cmp(&lj).unwrap().then_with(|| {
            first_nonzero_sign(i)
                .partial_cmp(&first_nonzero_sign(j))
                .unwrap()
        })
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&j| m[j * n + j]).collect();
    let mut vectors = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[dst * n + i] = q[i * n + src];
        }
    }
    Ok(Spectrum {
        n,
        eigenvalues,
        vectors,
    })
}

/// Largest eigenvalue magnitude.
pub fn spectral_radius(a: &SymMatrix) -> Result<f64> {
    let s = eigh(a)?;
    Ok(s.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs())))
}

/// Orthonormal basis of the hyperplane orthogonal to a unit vector `x`,
/// returned as n-1 column vectors.
///
/// Columns 2..n of the Householder reflector that maps e_1 to +/-x; the sign
/// is chosen away from x[0] so the reflector stays well conditioned.
pub fn ortho_complement(x: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = x.len();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnit(norm));
    }
    if n == 1 {
        return Ok(Vec::new());
    }
    let flip = x[0] > 0.0;
    let xt: Vec<f64> = x.iter().map(|&v| if flip { -v } else { v }).collect();
    // v = e_1 - xt, H = I - 2 v v^T / (v^T v); column j of H is e_j - beta v_j v
    let mut v = xt.clone();
    v[0] -= 1.0;
    for e in &mut v {
        *e = -*e;
    }
    let beta = 2.0 / v.iter().map(|e| e * e).sum::<f64>();
    let mut cols = Vec::with_capacity(n - 1);
    for j in 1..n {
        let mut col: Vec<f64> = v.iter().map(|&vi| -beta * v[j] * vi).collect();
        col[j] += 1.0;
        cols.push(col);
    }
    Ok(cols)
}

/// U^T M U for column set `u`; the projected matrix is symmetric by
/// construction and symmetrized against rounding.
pub fn project_symmetric(m: &SymMatrix, u: &[Vec<f64>]) -> SymMatrix {
    let k = u.len();
    let mu: Vec<Vec<f64>> = u.iter().map(|col| m.apply(col)).collect();
    let mut out = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            out[i * k + j] = u[i].iter().zip(&mu[j]).map(|(a, b)| a * b).sum();
        }
    }
    SymMatrix::symmetrized(k, out)
}

/// Dense square matrix without a symmetry contract.
#[derive(Debug, Clone)]
pub struct Mat {
    n: usize,
    a: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            a: vec![0.0; n * n],
        }
    }

    pub fn from_values(n: usize, a: Vec<f64>) -> Self {
        assert_eq!(a.len(), n * n, "Mat storage size");
        Self { n, a }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }
}

/// Solve A x = b by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &Mat, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.n;
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let mut m = a.a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                m[i * n + col]
                    .abs()
                    .partial_cmp(&m[j * n + col].abs())
                    .unwrap()
            })
            .unwrap();
        if m[pivot * n + col].abs() < 1e-300 {
            return Err(Error::NonFinite("singular linear system"));
        }
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            rhs.swap(col, pivot);
        }
        let d = m[col * n + col];
        for i in (col + 1)..n {
            let f = m[i * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m[i * n + j] -= f * m[col * n + j];
            }
            rhs[i] -= f * rhs[col];
        }
    }
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in (i + 1)..n {
            acc -= m[i * n + j] * rhs[j];
        }
        rhs[i] = acc / m[i * n + i];
    }
    Ok(rhs)
}

/// One eigenvalue of a general real matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEig {
    pub re: f64,
    pub im: f64,
}

impl ComplexEig {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Eigenvalues (only) of a general real square matrix: orthogonal reduction
/// to upper Hessenberg form followed by the Francis double-shift QR
/// iteration. Used to cross-check the augmented extrapolation Jacobian,
/// whose spectrum is genuinely complex.
pub fn eig_general(b: &Mat) -> Result<Vec<ComplexEig>> {
    let n = b.n;
    if b.a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("eig_general"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = b.a.clone();
    hessenberg(n, &mut h);
    let mut eigs = hqr(n, &mut h)?;
    // deterministic order: ascending modulus, then real part, then imag part
    eigs.sort_by(|a, b| {
        a.modulus()
            .partial_cmp(&b.modulus())
            .unwrap()
            .then(a.re.partial_cmp(&b.re).unwrap())
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(eigs)
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(n: usize, h: &mut [f64]) {
    for k in 1..n.saturating_sub(1) {
        // zero column k-1 below row k
        let mut scale = 0.0f64;
        for i in k..n {
            scale += h[i * n + (k - 1)].abs();
        }
        if scale == 0.0 {
            continue;
        }
        let mut v = vec![0.0; n];
        let mut sigma = 0.0;
        for i in k..n {
            v[i] = h[i * n + (k - 1)] / scale;
            sigma += v[i] * v[i];
        }
        let alpha = -v[k].signum() * sigma.sqrt();
        let beta = sigma - v[k] * alpha;
        if beta == 0.0 {
            continue;
        }
        v[k] -= alpha;
        // H <- P H P with P = I - v v^T / beta
        for j in 0..n {
            let mut s = 0.0;
            for i in k..n {
                s += v[i] * h[i * n + j];
            }
            s /= beta;
            for i in k..n {
                h[i * n + j] -= s * v[i];
            }
        }
        for i in 0..n {
            let mut s = 0.0;
            for j in k..n {
                s += h[i * n + j] * v[j];
            }
            s /= beta;
            for j in k..n {
                h[i * n + j] -= s * v[j];
            }
        }
        h[k * n + (k - 1)] = scale * alpha;
        for i in (k + 1)..n {
            h[i * n + (k - 1)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; returns all
/// eigenvalues. Classic EISPACK `hqr` control flow.
fn hqr(n: usize, h: &mut [f64]) -> Result<Vec<ComplexEig>> {
    const MAX_ITS: usize = 60;
    let eps = f64::EPSILON;
    let mut eigs = Vec::with_capacity(n);
    let mut anorm = 0.0f64;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += h[i * n + j].abs();
        }
    }
    if anorm == 0.0 {
        return Ok(vec![ComplexEig { re: 0.0, im: 0.0 }; n]);
    }

    let mut nn = n as isize - 1;
    let mut t = 0.0f64;
    while nn >= 0 {
        let mut its = 0;
        loop {
            // find l such that h[l][l-1] is negligible
            let mut l = nn;
            while l >= 1 {
                let s = {
                    let s = h[(l - 1) as usize * n + (l - 1) as usize].abs()
                        + h[l as usize * n + l as usize].abs();
                    if s == 0.0 {
                        anorm
                    } else {
                        s
                    }
                };
                if h[l as usize * n + (l - 1) as usize].abs() <= eps * s {
                    h[l as usize * n + (l - 1) as usize] = 0.0;
                    break;
                }
                l -= 1;
            }
            let x = h[nn as usize * n + nn as usize];
            if l == nn {
                eigs.push(ComplexEig { re: x + t, im: 0.0 });
                nn -= 1;
                break;
            }
            let y = h[(nn - 1) as usize * n + (nn - 1) as usize];
            let w = h[nn as usize * n + (nn - 1) as usize] * h[(nn - 1) as usize * n + nn as usize];
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                let x = x + t;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    let r1 = x + z;
                    let r2 = if z != 0.0 { x - w / z } else { r1 };
                    eigs.push(ComplexEig { re: r1, im: 0.0 });
                    eigs.push(ComplexEig { re: r2, im: 0.0 });
                } else {
                    eigs.push(ComplexEig { re: x + p, im: z });
                    eigs.push(ComplexEig { re: x + p, im: -z });
                }
                nn -= 2;
                break;
            }
            if its == MAX_ITS {
                return Err(Error::EighNoConvergence {
                    sweeps: MAX_ITS,
                    off: anorm,
                });
            }
            let (mut x, mut y, mut w) = (x, y, w);
            if its == 10 || its == 20 || its == 30 || its == 40 || its == 50 {
                // exceptional shift
                t += x;
                for i in 0..=nn as usize {
                    h[i * n + i] -= x;
                }
                let s = h[nn as usize * n + (nn - 1) as usize].abs()
                    + h[(nn - 1) as usize * n + (nn - 2) as usize].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            // look for two consecutive small subdiagonal elements
            let mut m = nn - 2;
            let (mut p, mut q, mut r) = (0.0f64, 0.0f64, 0.0f64);
            while m >= l {
                let mu = m as usize;
                let z = h[mu * n + mu];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h[(mu + 1) * n + mu] + h[mu * n + mu + 1];
                q = h[(mu + 1) * n + mu + 1] - z - rr - ss;
                r = h[(mu + 2) * n + mu + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = h[mu * n + mu - 1].abs() * (q.abs() + r.abs());
                let v = p.abs()
                    * (h[(mu - 1) * n + mu - 1].abs() + z.abs() + h[(mu + 1) * n + mu + 1].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                let iu = i as usize;
                h[iu * n + iu - 2] = 0.0;
                if i != m + 2 {
                    h[iu * n + iu - 3] = 0.0;
                }
            }
            // double QR step over rows l..nn, columns m..nn
            for k in m..nn {
                let ku = k as usize;
                if k != m {
                    p = h[ku * n + ku - 1];
                    q = h[(ku + 1) * n + ku - 1];
                    r = if k != nn - 1 {
                        h[(ku + 2) * n + ku - 1]
                    } else {
                        0.0
                    };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        h[ku * n + ku - 1] = -h[ku * n + ku - 1];
                    }
                } else {
                    h[ku * n + ku - 1] = -s * x;
                }
                p += s;
                let x2 = p / s;
                let y2 = q / s;
                let z2 = r / s;
                q /= p;
                r /= p;
                // row modification
                for j in ku..=nn as usize {
                    let mut pp = h[ku * n + j] + q * h[(ku + 1) * n + j];
                    if k != nn - 1 {
                        pp += r * h[(ku + 2) * n + j];
                        h[(ku + 2) * n + j] -= pp * z2;
                    }
                    h[(ku + 1) * n + j] -= pp * y2;
                    h[ku * n + j] -= pp * x2;
                }
                // column modification
                let mmin = if nn < k + 3 {
                    nn as usize
                } else {
                    (k + 3) as usize
                };
                for i in (l as usize)..=mmin {
                    let mut pp = x2 * h[i * n + ku] + y2 * h[i * n + ku + 1];
                    if k != nn - 1 {
                        pp += z2 * h[i * n + ku + 2];
                        h[i * n + ku + 2] -= pp * r;
                    }
                    h[i * n + ku + 1] -= pp * q;
                    h[i * n + ku] -= pp;
                }
            }
        }
    }
    Ok(eigs)
}
