//! Dense complex linear algebra and many-body operator construction for
//! open chains of d-level sites (d = 2 qubits, d = 3 transmon qutrits).
//!
//! Everything is stored dense: the largest Hilbert space in scope is
//! 3^6 = 729, where an eigendecomposition is still a sub-millisecond
//! operation. Site 1 is the leftmost tensor factor throughout.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance for the Hermiticity check performed at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Tolerance for unitarity checks.
pub const UNITARITY_TOL: f64 = 1e-8;
/// Safety margin kept from the +/- pi branch cut of the principal log.
pub const BRANCH_CUT_MARGIN: f64 = 0.1;

/// Pauli axis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// An open chain of `n_sites` identical d-level systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainSpec {
    n_sites: usize,
    local_dim: usize,
}

impl ChainSpec {
    pub fn new(n_sites: usize, local_dim: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidParams("n_sites must be >= 1".into()));
        }
        if local_dim != 2 && local_dim != 3 {
            return Err(Error::UnsupportedLocalDim(local_dim));
        }
        Ok(Self { n_sites, local_dim })
    }

    /// Spin-1/2 chain.
    pub fn qubits(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, 2)
    }

    /// Three-level transmon chain.
    pub fn qutrits(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, 3)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    /// Total Hilbert-space dimension `local_dim^n_sites`.
    pub fn dim(&self) -> usize {
        self.local_dim.pow(self.n_sites as u32)
    }

    /// Even-sublattice sites (2, 4, ...), 1-based.
    pub fn even_sites(&self) -> impl Iterator<Item = usize> {
        (2..=self.n_sites).step_by(2)
    }

    /// Odd-sublattice sites (1, 3, ...), 1-based.
    pub fn odd_sites(&self) -> impl Iterator<Item = usize> {
        (1..=self.n_sites).step_by(2)
    }
}

/// A dense complex square matrix together with a verified Hermiticity flag.
///
/// The flag is never taken on trust: `hermitian` constructors measure
/// `max |M - M^dag|` and reject anything above [`HERMITICITY_TOL`].
#[derive(Debug, Clone)]
pub struct Operator {
    mat: CMatrix,
    hermitian: bool,
}

impl Operator {
    /// Wrap a matrix without claiming Hermiticity.
    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { mat, hermitian: false })
    }

    /// Wrap a matrix, verifying and recording Hermiticity.
    pub fn hermitian_from_matrix(mat: CMatrix) -> Result<Self> {
        let mut op = Self::from_matrix(mat)?;
        let dev = op.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian(dev));
        }
        op.hermitian = true;
        Ok(op)
    }

    /// Flag a matrix Hermitian without measuring. Reserved for sums of
    /// already-verified Hermitian operators with real coefficients, where
    /// Hermiticity holds by closure; external inputs must go through
    /// [`Operator::hermitian_from_matrix`].
    pub(crate) fn hermitian_unchecked(mat: CMatrix) -> Self {
        Self { mat, hermitian: true }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim),
            hermitian: true,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: CMatrix::zeros(dim, dim),
            hermitian: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Whether this operator was constructed through a verifying path.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for i in 0..self.mat.nrows() {
            for j in i..self.mat.ncols() {
                dev = dev.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            hermitian: self.hermitian,
        }
    }

    /// `self * other` as operators (matrix product).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} operators",
                self.dim(),
                other.dim()
            )));
        }
        Self::from_matrix(gemm(&self.mat, &other.mat, false))
    }

    /// `self + scale * other`, preserving Hermiticity when it holds.
    pub fn add_scaled(&self, scale: f64, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "sum of {}x{} operators",
                self.dim(),
                other.dim()
            )));
        }
        let mat = &self.mat + &other.mat * C64::new(scale, 0.0);
        Ok(Self {
            mat,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            mat: &self.mat * C64::new(factor, 0.0),
            hermitian: self.hermitian,
        }
    }

    /// Apply to a state vector.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if self.dim() != psi.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator dim {} vs state dim {}",
                self.dim(),
                psi.dim()
            )));
        }
        Ok(StateVector {
            amplitudes: gemv(&self.mat, &psi.amplitudes),
        })
    }

    /// Expectation value `<psi|M|psi>` (real part; exact for Hermitian M).
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        if self.dim() != psi.dim() {
            return Err(Error::DimensionMismatch(
                "expectation dimension mismatch".into(),
            ));
        }
        let v = gemv(&self.mat, &psi.amplitudes);
        Ok(psi.amplitudes.dotc(&v).re)
    }

    /// Largest entry-wise deviation from another operator.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut dev = 0.0f64;
        for (a, b) in self.mat.iter().zip(other.mat.iter()) {
            dev = dev.max((a - b).norm());
        }
        dev
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    pub fn unitarity_deviation(&self) -> f64 {
        let prod = self.mat.adjoint() * &self.mat;
        let mut dev = 0.0f64;
        for i in 0..prod.nrows() {
            for j in 0..prod.ncols() {
                let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                dev = dev.max((prod[(i, j)] - expect).norm());
            }
        }
        dev
    }
}

/// Normalized pure state on the chain Hilbert space.
#[derive(Debug, Clone)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    /// Norm tolerance: anything that claims to preserve norm is checked at 1e-10.
    pub const NORM_TOL: f64 = 1e-10;

    pub fn from_amplitudes(amplitudes: CVector) -> Result<Self> {
        let psi = Self { amplitudes };
        let norm = psi.norm();
        if !norm.is_finite() {
            return Err(Error::NonFinite("state amplitudes".into()));
        }
        if (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NormDrift {
                norm,
                tol: Self::NORM_TOL,
            });
        }
        Ok(psi)
    }

    /// Normalize on construction (for convenience in building product states).
    pub fn normalized(mut amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NonFinite("cannot normalize zero/non-finite vector".into()));
        }
        amplitudes /= C64::new(norm, 0.0);
        Ok(Self { amplitudes })
    }

    /// Computational basis state |index>.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch(format!(
                "basis index {index} out of dimension {dim}"
            )));
        }
        let mut v = CVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    /// Tensor product of single-site states, site 1 leftmost.
    pub fn product_state(sites: &[CVector]) -> Result<Self> {
        let mut acc = CVector::from_element(1, C64::new(1.0, 0.0));
        for s in sites {
            acc = kron_vec(&acc, s);
        }
        Self::normalized(acc)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(
                "inner product dimension mismatch".into(),
            ));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i * b.len() + j] = ai * bj;
        }
    }
    out
}

/// Standard 2x2 Pauli matrix; Hermitian and involutory.
pub fn pauli(axis: Axis) -> Operator {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let mat = match axis {
        Axis::X => CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        Axis::Y => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Axis::Z => CMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
    };
    Operator { mat, hermitian: true }
}

/// Truncated bosonic ladder operators on a d-level site.
///
/// Returns `(lower, raise)` with `lower|n> = sqrt(n)|n-1>` and
/// `raise = lower^dag`.
pub fn ladder(local_dim: usize) -> Result<(Operator, Operator)> {
    if local_dim != 2 && local_dim != 3 {
        return Err(Error::UnsupportedLocalDim(local_dim));
    }
    let mut lower = CMatrix::zeros(local_dim, local_dim);
    for n in 1..local_dim {
        lower[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let raise = lower.adjoint();
    Ok((
        Operator { mat: lower, hermitian: false },
        Operator { mat: raise, hermitian: false },
    ))
}

/// Kronecker (tensor) product `a (x) b`.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    Operator {
        mat: a.mat.kronecker(&b.mat),
        hermitian: a.hermitian && b.hermitian,
    }
}

/// Embed a single-site operator at `site` (1-based) of the chain, identity
/// elsewhere. Site 1 is the leftmost tensor factor.
pub fn embed(op: &Operator, site: usize, chain: &ChainSpec) -> Result<Operator> {
    if op.dim() != chain.local_dim() {
        return Err(Error::DimensionMismatch(format!(
            "local operator dim {} vs chain local_dim {}",
            op.dim(),
            chain.local_dim()
        )));
    }
    if site == 0 || site > chain.n_sites() {
        return Err(Error::SiteOutOfRange {
            site,
            n_sites: chain.n_sites(),
        });
    }
    let left = chain.local_dim().pow((site - 1) as u32);
    let right = chain.local_dim().pow((chain.n_sites() - site) as u32);
    let mut out = kron(&Operator::identity(left), op);
    out = kron(&out, &Operator::identity(right));
    Ok(out)
}

/// Sum of `op` embedded at each of the given sites.
pub fn embed_sum(op: &Operator, sites: impl IntoIterator<Item = usize>, chain: &ChainSpec) -> Result<Operator> {
    let mut acc = Operator::zeros(chain.dim());
    for site in sites {
        acc = acc.add_scaled(1.0, &embed(op, site, chain)?)?;
    }
    Ok(acc)
}

// LAPACK divide-and-conquer Hermitian eigensolver plus BLAS level-3/2
// products. Complex64 is layout-compatible with LAPACK's complex*16 and
// nalgebra stores column-major, so matrices pass through without copies
// or transposes. OpenBLAS is pinned to one thread: matrices here are tiny
// and parallelism lives at the sweep level.
extern "C" {
    fn zheevd_(
        jobz: *const u8,
        uplo: *const u8,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        w: *mut f64,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        lrwork: *const i32,
        iwork: *mut i32,
        liwork: *const i32,
        info: *mut i32,
    );
    fn zgemm_(
        transa: *const u8,
        transb: *const u8,
        m: *const i32,
        n: *const i32,
        k: *const i32,
        alpha: *const C64,
        a: *const C64,
        lda: *const i32,
        b: *const C64,
        ldb: *const i32,
        beta: *const C64,
        c: *mut C64,
        ldc: *const i32,
    );
    fn zgemv_(
        trans: *const u8,
        m: *const i32,
        n: *const i32,
        alpha: *const C64,
        a: *const C64,
        lda: *const i32,
        x: *const C64,
        incx: *const i32,
        beta: *const C64,
        y: *mut C64,
        incy: *const i32,
    );
    fn openblas_set_num_threads(n: i32);
}

fn blas_init() {
    static INIT: std::sync::Once = std::sync::Once::new();
    INIT.call_once(|| unsafe { openblas_set_num_threads(1) });
}

/// `a * b` or `a * b^dag` through BLAS.
fn gemm(a: &CMatrix, b: &CMatrix, conj_transpose_b: bool) -> CMatrix {
    blas_init();
    let (m, k) = (a.nrows() as i32, a.ncols() as i32);
    let n = if conj_transpose_b { b.nrows() } else { b.ncols() } as i32;
    let mut c = CMatrix::zeros(m as usize, n as usize);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let transb = if conj_transpose_b { b"C" } else { b"N" };
    let ldb = b.nrows() as i32;
    unsafe {
        zgemm_(
            b"N".as_ptr(),
            transb.as_ptr(),
            &m,
            &n,
            &k,
            &one,
            a.as_slice().as_ptr(),
            &m,
            b.as_slice().as_ptr(),
            &ldb,
            &zero,
            c.as_mut_slice().as_mut_ptr(),
            &m,
        );
    }
    c
}

fn gemv(a: &CMatrix, x: &CVector) -> CVector {
    blas_init();
    let (m, n) = (a.nrows() as i32, a.ncols() as i32);
    let mut y = CVector::zeros(m as usize);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let inc = 1i32;
    unsafe {
        zgemv_(
            b"N".as_ptr(),
            &m,
            &n,
            &one,
            a.as_slice().as_ptr(),
            &m,
            x.as_slice().as_ptr(),
            &inc,
            &zero,
            y.as_mut_slice().as_mut_ptr(),
            &inc,
        );
    }
    y
}

/// Eigendecomposition of a Hermitian operator: `h = V diag(w) V^dag`
/// with real eigenvalues in ascending order.
pub fn eigh(h: &Operator) -> Result<(Vec<f64>, CMatrix)> {
    if !h.hermitian {
        let dev = h.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian(dev));
        }
    }
    let n = h.dim();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty operator".into()));
    }
    blas_init();
    let mut a = h.mat.clone();
    let mut w = vec![0.0f64; n];
    let ni = n as i32;
    let lwork = (2 * n + n * n) as i32;
    let lrwork = (1 + 5 * n + 2 * n * n) as i32;
    let liwork = (3 + 5 * n) as i32;
    let mut work = vec![C64::new(0.0, 0.0); lwork as usize];
    let mut rwork = vec![0.0f64; lrwork as usize];
    let mut iwork = vec![0i32; liwork as usize];
    let mut info = 0i32;
    unsafe {
        zheevd_(
            b"V".as_ptr(),
            b"L".as_ptr(),
            &ni,
            a.as_mut_slice().as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &lrwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::ConvergenceFailure(format!(
            "zheevd failed with info = {info}"
        )));
    }
    Ok((w, a))
}

/// `exp(-i * scale * h)` for Hermitian `h`, via eigendecomposition.
///
/// The result is unitary to machine precision; `scale = 0` gives the identity.
pub fn expm_hermitian(h: &Operator, scale: f64) -> Result<Operator> {
    let (w, v) = eigh(h)?;
    let mut phased = v.clone();
    for (k, wk) in w.iter().enumerate() {
        let phase = C64::from_polar(1.0, -scale * wk);
        for r in 0..phased.nrows() {
            phased[(r, k)] *= phase;
        }
    }
    let mat = gemm(&phased, &v, true);
    Ok(Operator { mat, hermitian: false })
}

/// `|<b|a>|^2`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    let ov = b.inner(a)?;
    Ok(ov.norm_sqr())
}

/// Action of `exp(-i * scale * h)` on a state, evaluated by a norm-scaled
/// Taylor series converged to machine precision.
///
/// Equivalent to `expm_hermitian(h, scale).apply(psi)` but needs only
/// matrix-vector products: the argument is split into segments with
/// `||scale * h|| <= 1` (infinity-norm bound) and each segment's series is
/// summed until the terms vanish at working precision. Norm bookkeeping is
/// left to the caller; drift per step is at the rounding level.
pub fn expm_apply(h: &Operator, scale: f64, psi: &StateVector) -> Result<StateVector> {
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator dim {} vs state dim {}",
            h.dim(),
            psi.dim()
        )));
    }
    if !h.hermitian {
        let dev = h.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian(dev));
        }
    }
    // cheap upper bound on ||h||: max row sum of |re| + |im|
    let dim = h.dim();
    let mut norm_inf = 0.0f64;
    for i in 0..dim {
        let mut row = 0.0;
        for j in 0..dim {
            let z = h.mat[(i, j)];
            row += z.re.abs() + z.im.abs();
        }
        norm_inf = norm_inf.max(row);
    }
    let segments = ((norm_inf * scale.abs()).ceil() as usize).max(1);
    let seg = -scale / segments as f64;

    let mut v = psi.amplitudes.clone();
    for _ in 0..segments {
        let mut acc = v.clone();
        let mut term = v.clone();
        for k in 1..=64u32 {
            let w = gemv(&h.mat, &term);
            let factor = C64::new(0.0, seg / k as f64);
            term = w * factor;
            acc += &term;
            if term.norm() < 1e-16 {
                break;
            }
            if k == 64 {
                return Err(Error::ConvergenceFailure(
                    "exponential series did not converge".into(),
                ));
            }
        }
        v = acc;
    }
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("exponential action".into()));
    }
    Ok(StateVector { amplitudes: v })
}

/// Principal Hermitian logarithm of a unitary: returns `H` with
/// `exp(-i H) = u` and eigenphases in (-pi, pi).
///
/// Uses the Cayley transform `K = 2i (u - 1)(u + 1)^{-1}`, which is Hermitian
/// for unitary `u` with eigenvalues `2 tan(h_k / 2)`; the arctangent then
/// recovers the principal phases without a complex Schur decomposition.
/// Rejects inputs with any eigenphase within [`BRANCH_CUT_MARGIN`] of +/- pi.
pub fn principal_log_unitary(u: &Operator) -> Result<Operator> {
    let udev = u.unitarity_deviation();
    if udev > UNITARITY_TOL {
        return Err(Error::NotUnitary(udev));
    }
    let dim = u.dim();
    let id = CMatrix::identity(dim, dim);
    let denom = &u.mat + &id;
    let lu = denom.lu();
    let solved = lu
        .solve(&(&u.mat - &id))
        .ok_or(Error::BranchCut {
            phase: std::f64::consts::PI,
            margin: BRANCH_CUT_MARGIN,
        })?;
    let k_mat = solved * C64::new(0.0, 2.0);
    // Cayley output is Hermitian up to roundoff; symmetrize before eigh.
    let k_sym = (&k_mat + k_mat.adjoint()) * C64::new(0.5, 0.0);
    let k = Operator { mat: k_sym, hermitian: true };
    let (w, v) = eigh(&k)?;
    let mut phases = Vec::with_capacity(w.len());
    for kk in &w {
        let h = 2.0 * (kk / 2.0).atan();
        if h.abs() > std::f64::consts::PI - BRANCH_CUT_MARGIN {
            return Err(Error::BranchCut {
                phase: h,
                margin: BRANCH_CUT_MARGIN,
            });
        }
        phases.push(h);
    }
    let mut scaled = v.clone();
    for (kcol, h) in phases.iter().enumerate() {
        for r in 0..scaled.nrows() {
            scaled[(r, kcol)] *= C64::new(*h, 0.0);
        }
    }
    let mat = gemm(&scaled, &v, true);
    // Hermitian by construction; go through the verifying constructor anyway.
    Operator::hermitian_from_matrix(mat)
}
