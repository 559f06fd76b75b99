//! Dense complex matrix kernel for multipartite operators.
//!
//! Everything here operates on small (at most ~64x64) square matrices stored
//! row-major. Subsystem index convention, used throughout the crate:
//! **subsystem 0 is the slowest-varying (leftmost) tensor factor**, so the
//! flat index of `|i_0 i_1 ... i_{n-1}>` is `i_0*d_1*...*d_{n-1} + ... + i_{n-1}`.

use num_complex::Complex;

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;

/// Ordered list of subsystem dimensions attached to an operator.
///
/// A dimension of 1 marks a trivial subsystem (e.g. a rank-one environment
/// produced by purifying a pure state).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimList(Vec<usize>);

impl DimList {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDims("empty dimension list".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidDims(format!("zero dimension in {dims:?}")));
        }
        Ok(Self(dims.to_vec()))
    }

    pub fn product(&self) -> usize {
        self.0.iter().product()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Checks that the list is consistent with a square matrix of side `side`.
    pub fn check_side(&self, side: usize) -> Result<()> {
        if self.product() != side {
            return Err(Error::DimMismatch {
                expected: self.product(),
                got: side,
            });
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for DimList {
    type Output = usize;
    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from rows of `(re, im)` pairs; mostly for tests and IO.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidDims("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Rank-one projector |v><v| of a (not necessarily normalized) vector.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = k * other.cols;
                let orow = i * other.cols;
                for j in 0..other.cols {
                    out.data[orow + j] += a * other.data[row + j];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of `self - self^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self[(i, j)] - self[(j, i)].conj();
                s += d.norm_sqr();
            }
        }
        s.sqrt()
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.cols, other.rows);
        debug_assert_eq!(self.rows, other.cols);
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                s += self[(i, k)] * other[(k, i)];
            }
        }
        s
    }

    /// `U * self * U^dagger`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product; `a` is the slower-varying (leftmost) factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let av = a[(ia, ja)];
            if av.re == 0.0 && av.im == 0.0 {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out[(ia * b.rows() + ib, ja * b.cols() + jb)] = av * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Strides of each subsystem under the slowest-first convention.
fn strides(dims: &DimList) -> Vec<usize> {
    let n = dims.len();
    let mut s = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn compose_index(values: &[usize], strides: &[usize]) -> usize {
    values.iter().zip(strides).map(|(v, s)| v * s).sum()
}

/// Advances a mixed-radix counter; returns false once it wraps around.
fn next_tuple(values: &mut [usize], radices: &[usize]) -> bool {
    for k in (0..values.len()).rev() {
        values[k] += 1;
        if values[k] < radices[k] {
            return true;
        }
        values[k] = 0;
    }
    false
}

/// Partial trace keeping the subsystems listed in `keep` (in their original
/// relative order). The trace is preserved: `Tr(result) == Tr(m)`.
pub fn partial_trace(m: &ComplexMatrix, dims: &DimList, keep: &[usize]) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    dims.check_side(m.rows())?;
    let n = dims.len();
    if keep.is_empty() || keep.iter().any(|&k| k >= n) {
        return Err(Error::InvalidDims(format!("bad keep set {keep:?}")));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    let traced: Vec<usize> = (0..n).filter(|k| !keep.contains(k)).collect();

    let st = strides(dims);
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let out_side: usize = keep_dims.iter().product();
    let mut out = ComplexMatrix::zeros(out_side, out_side);

    let mut kr = vec![0usize; keep.len()];
    let mut out_r = 0usize;
    loop {
        let mut kc = vec![0usize; keep.len()];
        let mut out_c = 0usize;
        loop {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut t = vec![0usize; traced.len()];
            loop {
                let mut rv = 0usize;
                let mut cv = 0usize;
                for (pos, &sys) in keep.iter().enumerate() {
                    rv += kr[pos] * st[sys];
                    cv += kc[pos] * st[sys];
                }
                for (pos, &sys) in traced.iter().enumerate() {
                    rv += t[pos] * st[sys];
                    cv += t[pos] * st[sys];
                }
                acc += m[(rv, cv)];
                if traced.is_empty() || !next_tuple(&mut t, &traced_dims) {
                    break;
                }
            }
            out[(out_r, out_c)] = acc;
            out_c += 1;
            if !next_tuple(&mut kc, &keep_dims) {
                break;
            }
        }
        out_r += 1;
        if !next_tuple(&mut kr, &keep_dims) {
            break;
        }
    }
    Ok(out)
}

/// Transpose on the designated subsystem only. Applying it twice is the identity.
pub fn partial_transpose(m: &ComplexMatrix, dims: &DimList, which: usize) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    dims.check_side(m.rows())?;
    if which >= dims.len() {
        return Err(Error::InvalidDims(format!(
            "subsystem {which} out of range for {} subsystems",
            dims.len()
        )));
    }
    let st = strides(dims);
    let n = dims.len();
    let radices: Vec<usize> = dims.as_slice().to_vec();
    let mut out = ComplexMatrix::zeros(m.rows(), m.cols());

    let mut rv = vec![0usize; n];
    loop {
        let mut cv = vec![0usize; n];
        loop {
            // swap the `which` digit between row and column
            let mut r2 = rv.clone();
            let mut c2 = cv.clone();
            std::mem::swap(&mut r2[which], &mut c2[which]);
            out[(compose_index(&r2, &st), compose_index(&c2, &st))] =
                m[(compose_index(&rv, &st), compose_index(&cv, &st))];
            if !next_tuple(&mut cv, &radices) {
                break;
            }
        }
        if !next_tuple(&mut rv, &radices) {
            break;
        }
    }
    Ok(out)
}

/// Relabels subsystems: new position `k` holds what used to be subsystem
/// `perm[k]`. Pure basis permutation, so the spectrum is unchanged.
pub fn permute_subsystems(
    m: &ComplexMatrix,
    dims: &DimList,
    perm: &[usize],
) -> Result<(ComplexMatrix, DimList)> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    dims.check_side(m.rows())?;
    let n = dims.len();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::InvalidPermutation);
    }
    let new_dims = DimList::new(&perm.iter().map(|&p| dims[p]).collect::<Vec<_>>())?;
    let old_st = strides(dims);
    let new_st = strides(&new_dims);
    let radices: Vec<usize> = new_dims.as_slice().to_vec();
    let mut out = ComplexMatrix::zeros(m.rows(), m.cols());

    // new value tuple v maps to old tuple with old[perm[k]] = v[k]
    let mut rv = vec![0usize; n];
    loop {
        let mut cv = vec![0usize; n];
        loop {
            let mut old_r = 0usize;
            let mut old_c = 0usize;
            for k in 0..n {
                old_r += rv[k] * old_st[perm[k]];
                old_c += cv[k] * old_st[perm[k]];
            }
            out[(compose_index(&rv, &new_st), compose_index(&cv, &new_st))] = m[(old_r, old_c)];
            if !next_tuple(&mut cv, &radices) {
                break;
            }
        }
        if !next_tuple(&mut rv, &radices) {
            break;
        }
    }
    Ok((out, new_dims))
}

/// Default tolerance for Hermiticity preconditions.
pub const HERMITICITY_TOL: f64 = 1e-9;
/// Default tolerance for positive-semidefiniteness verdicts.
pub const PSD_TOL: f64 = 1e-9;

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues sorted ascending and a unitary whose columns are the
/// matching eigenvectors, with `m = V diag(w) V^dagger` to within
/// `1e-10 * ||m||_F` in Frobenius norm.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let scale = m.frobenius_norm().max(1.0);
    let defect = m.hermiticity_defect();
    if defect > HERMITICITY_TOL * scale {
        return Err(Error::NotHermitian { defect });
    }

    let n = m.rows();
    // work on the Hermitian part so tiny asymmetries cannot bias the sweep
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);

    let off = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let target = 1e-14 * m.frobenius_norm().max(1e-300);
    for _sweep in 0..60 {
        if off(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r; // e^{i phi}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = I except J[p,p]=c, J[p,q]=s*phase, J[q,p]=-s*conj(phase), J[q,q]=c
                let jpq = phase * s;
                let jqp = -phase.conj() * s;

                // A <- J^dagger A J: update columns then rows
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c + aiq * jqp;
                    a[(i, q)] = aip * jpq + aiq * c;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c + aqj * jqp.conj();
                    a[(q, j)] = apj * jpq.conj() + aqj * c;
                }
                // V <- V J
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c + viq * jqp;
                    v[(i, q)] = vip * jpq + viq * c;
                }
                // enforce exact symmetry of the touched pair
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((values, vectors))
}

/// Outcome of a positive-semidefiniteness probe.
#[derive(Debug, Clone, Copy)]
pub struct PsdReport {
    pub is_psd: bool,
    pub min_eig: f64,
    pub herm_defect: f64,
}

/// Reports whether `m` is PSD within `tol`, together with the minimum
/// eigenvalue of its Hermitian part and the Hermiticity defect. Never errors:
/// defects are reported in the result instead.
pub fn psd_check(m: &ComplexMatrix, tol: f64) -> PsdReport {
    let herm_defect = m.hermiticity_defect();
    let norm = m.frobenius_norm();
    let n = m.rows();
    let herm = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let (vals, _) = eig_hermitian(&herm).expect("hermitian part is hermitian");
    let min_eig = vals.first().copied().unwrap_or(0.0);
    let is_psd = herm_defect <= tol * norm && min_eig >= -tol * norm.max(1.0);
    PsdReport {
        is_psd,
        min_eig,
        herm_defect,
    }
}

/// sigma_x.
pub fn pauli_x() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 1)] = Complex64::new(1.0, 0.0);
    m[(1, 0)] = Complex64::new(1.0, 0.0);
    m
}

/// sigma_y.
pub fn pauli_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 1)] = Complex64::new(0.0, -1.0);
    m[(1, 0)] = Complex64::new(0.0, 1.0);
    m
}

/// sigma_z.
pub fn pauli_z() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 0)] = Complex64::new(1.0, 0.0);
    m[(1, 1)] = Complex64::new(-1.0, 0.0);
    m
}
