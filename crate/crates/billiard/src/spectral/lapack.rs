//! Minimal shim onto the system LAPACK (`dsyevd`) for dense symmetric
//! eigendecomposition.
//!
//! The library is loaded lazily with `dlopen` rather than linked: OpenBLAS
//! picks its compute kernels in a load-time constructor, and on CPUs newer
//! than the library the auto-dispatch selects a corrupt path (observed
//! here: correct eigenvalues but garbage eigenvectors above the blocked
//! threshold). Loading lazily lets us pin `OPENBLAS_CORETYPE` to a
//! conservative kernel family first, and a one-time self-check verifies a
//! known eigensystem before the backend is trusted.
//!
//! The input buffer is interpreted column-major; since the matrix is
//! symmetric this equals its row-major transpose, and with `jobz = 'V'` the
//! rows of the buffer hold the orthonormal eigenvectors on exit.

use crate::error::{Error, Result};
use std::os::raw::{c_char, c_int, c_void};
use std::sync::OnceLock;

type DsyevdFn = unsafe extern "C" fn(
    jobz: *const c_char,
    uplo: *const c_char,
    n: *const c_int,
    a: *mut f64,
    lda: *const c_int,
    w: *mut f64,
    work: *mut f64,
    lwork: *const c_int,
    iwork: *mut c_int,
    liwork: *const c_int,
    info: *mut c_int,
    jobz_len: usize,
    uplo_len: usize,
);

fn load_backend() -> DsyevdFn {
    if std::env::var_os("OPENBLAS_CORETYPE").is_none() {
        std::env::set_var("OPENBLAS_CORETYPE", "HASWELL");
    }
    let handle = unsafe {
        libc::dlopen(
            c"libopenblas.so.0".as_ptr(),
            libc::RTLD_NOW | libc::RTLD_LOCAL,
        )
    };
    assert!(
        !handle.is_null(),
        "cannot load libopenblas.so.0 for the dense eigensolver"
    );
    let sym: *mut c_void = unsafe { libc::dlsym(handle, c"dsyevd_".as_ptr()) };
    assert!(!sym.is_null(), "libopenblas does not export dsyevd_");
    unsafe { std::mem::transmute::<*mut c_void, DsyevdFn>(sym) }
}

fn backend() -> DsyevdFn {
    static BACKEND: OnceLock<DsyevdFn> = OnceLock::new();
    *BACKEND.get_or_init(|| {
        let f = load_backend();
        self_check(f);
        f
    })
}

/// Solves a known 96-dimensional eigensystem and verifies the eigenvector
/// residuals, so a silently broken BLAS aborts loudly instead of producing
/// wrong physics.
fn self_check(f: DsyevdFn) {
    let n = 96usize;
    let mut a = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 1.0 / ((i + j + 1) as f64) + if i == j { i as f64 } else { 0.0 };
        }
    }
    let orig = a.clone();
    let w = eigh_with(f, n, &mut a, true).expect("LAPACK self-check eigensolve failed");
    let mut worst = 0.0f64;
    for k in [0usize, 37, n - 1] {
        for i in 0..n {
            let mut av = 0.0;
            for j in 0..n {
                av += orig[i * n + j] * a[k * n + j];
            }
            worst = worst.max((av - w[k] * a[k * n + i]).abs());
        }
    }
    assert!(
        worst < 1e-9,
        "LAPACK backend failed the eigenvector self-check (residual {worst:.3e}); \
         set OPENBLAS_CORETYPE to a kernel family your CPU supports"
    );
}

/// Eigendecomposition of the symmetric `n x n` matrix stored densely in `a`.
///
/// Returns the ascending eigenvalues. When `vectors` is set, `a` is
/// overwritten so that row `k` (row-major) is the eigenvector of the `k`-th
/// eigenvalue; otherwise the contents of `a` are destroyed.
pub fn eigh_inplace(n: usize, a: &mut [f64], vectors: bool) -> Result<Vec<f64>> {
    eigh_with(backend(), n, a, vectors)
}

fn eigh_with(dsyevd: DsyevdFn, n: usize, a: &mut [f64], vectors: bool) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(Error::ShapeMismatch(format!(
            "expected {n}x{n} buffer, got {} elements",
            a.len()
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let jobz = if vectors { b'V' } else { b'N' } as c_char;
    let uplo = b'L' as c_char;
    let nn = n as c_int;
    let mut w = vec![0.0f64; n];
    let mut info: c_int = 0;

    // workspace query
    let mut wkopt = 0.0f64;
    let mut iwkopt: c_int = 0;
    let query: c_int = -1;
    unsafe {
        dsyevd(
            &jobz,
            &uplo,
            &nn,
            a.as_mut_ptr(),
            &nn,
            w.as_mut_ptr(),
            &mut wkopt,
            &query,
            &mut iwkopt,
            &query,
            &mut info,
            1,
            1,
        );
    }
    if info != 0 {
        return Err(Error::SolverFailure { info });
    }
    let mut work = vec![0.0f64; (wkopt as usize).max(1)];
    let mut iwork = vec![0 as c_int; (iwkopt as usize).max(1)];
    let (lw, liw) = (work.len() as c_int, iwork.len() as c_int);
    unsafe {
        dsyevd(
            &jobz,
            &uplo,
            &nn,
            a.as_mut_ptr(),
            &nn,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lw,
            iwork.as_mut_ptr(),
            &liw,
            &mut info,
            1,
            1,
        );
    }
    if info != 0 {
        return Err(Error::SolverFailure { info });
    }
    Ok(w)
}
