//! C ABI over `qfock`.
//!
//! Schemes and operators are opaque heap handles created by `*_new` and
//! released by the matching `*_free`. Every fallible function returns a
//! [`QfStatus`]; on failure the message is kept per thread and can be read
//! with [`qf_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qfock::deformation::DeformationScheme;
use qfock::fock_matrix::{build_operator, verify_algebra, OperatorName, TruncatedOperator};
use qfock::paired_state::{quadrature_variances, MomentSet};
use qfock::squeezed::{self, SqueezedSpec};
use qfock::sweep::{self, Family, OutputFormat, SweepSpec};
use qfock::thermal::{self, ThermalSpec};
use qfock::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    Divergent = 4,
    Precondition = 5,
    Numeric = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Opaque deformation scheme handle.
pub struct QfScheme(DeformationScheme);

/// Opaque truncated operator handle.
pub struct QfOperator(TruncatedOperator);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QfMoments {
    pub adag_a: f64,
    pub a_adag: f64,
    pub a_atilde: f64,
    pub adag_atildedag: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QfQuadratures {
    pub var1: f64,
    pub var2: f64,
    pub product: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfFamily {
    Squeezed = 0,
    Thermal = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfFormat {
    Csv = 0,
    Json = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> QfStatus {
    match err {
        Error::Parse(_) => QfStatus::ParseError,
        Error::Divergent { .. } | Error::NotConverged { .. } => QfStatus::Divergent,
        Error::Precondition(_) => QfStatus::Precondition,
        Error::NonFinite { .. }
        | Error::DivisionByZero { .. }
        | Error::FactorialOverflow { .. }
        | Error::NegativeDeformation { .. } => QfStatus::Numeric,
        _ => QfStatus::InvalidArgument,
    }
}

fn guard<F>(f: F) -> QfStatus
where
    F: FnOnce() -> Result<(), (QfStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            QfStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (QfStatus, String)>;
}

impl<T> IntoFfi<T> for qfock::Result<T> {
    fn ffi(self) -> Result<T, (QfStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (QfStatus, String) {
    (QfStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (QfStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (QfStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), (QfStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn scheme_ref<'a>(s: *const QfScheme) -> Result<&'a DeformationScheme, (QfStatus, String)> {
    s.as_ref().map(|s| &s.0).ok_or_else(|| null("scheme"))
}

impl From<MomentSet> for QfMoments {
    fn from(m: MomentSet) -> Self {
        QfMoments {
            adag_a: m.adag_a,
            a_adag: m.a_adag,
            a_atilde: m.a_atilde,
            adag_atildedag: m.adag_atildedag,
        }
    }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL,
/// or 0 when there is no error.
///
/// # Safety
/// `buf` must be NULL or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn qf_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Creates a scheme from `undeformed`, `bm` or `expr:<text>`.
///
/// # Safety
/// `descriptor` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qf_scheme_new(descriptor: *const c_char, q: f64, out: *mut *mut QfScheme) -> QfStatus {
    guard(|| {
        let d = read_str(descriptor, "descriptor")?;
        let scheme = DeformationScheme::from_descriptor(d, q).ffi()?;
        write_out(out, Box::into_raw(Box::new(QfScheme(scheme))), "out")
    })
}

/// # Safety
/// `scheme` must be NULL or a handle from [`qf_scheme_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qf_scheme_free(scheme: *mut QfScheme) {
    if !scheme.is_null() {
        drop(Box::from_raw(scheme));
    }
}

/// `D_q(n)`.
///
/// # Safety
/// `scheme` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qf_scheme_eval_d(scheme: *const QfScheme, n: u32, out: *mut f64) -> QfStatus {
    guard(|| {
        let v = scheme_ref(scheme)?.eval_d(n).ffi()?;
        write_out(out, v, "out")
    })
}

/// `D_q(n)!`.
///
/// # Safety
/// `scheme` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qf_scheme_d_factorial(scheme: *const QfScheme, n: u32, out: *mut f64) -> QfStatus {
    guard(|| {
        let v = scheme_ref(scheme)?.d_factorial(n).ffi()?;
        write_out(out, v, "out")
    })
}

/// Builds `annihilation`, `creation`, `number` or `identity` of size `dim`.
///
/// # Safety
/// `scheme` must be a live handle, `name` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qf_operator_new(
    scheme: *const QfScheme,
    name: *const c_char,
    dim: usize,
    out: *mut *mut QfOperator,
) -> QfStatus {
    guard(|| {
        let s = scheme_ref(scheme)?;
        let name: OperatorName = read_str(name, "name")?.parse().ffi()?;
        let op = build_operator(name, s, dim).ffi()?;
        write_out(out, Box::into_raw(Box::new(QfOperator(op))), "out")
    })
}

/// # Safety
/// `op` must be NULL or a handle from [`qf_operator_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qf_operator_free(op: *mut QfOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Matrix dimension, or 0 for NULL.
///
/// # Safety
/// `op` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qf_operator_dim(op: *const QfOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.dim())
}

/// Copies the `dim * dim` entries in row-major order.
///
/// # Safety
/// `op` must be a live handle and `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qf_operator_copy_entries(op: *const QfOperator, buf: *mut f64, len: usize) -> QfStatus {
    guard(|| {
        let op = &op.as_ref().ok_or_else(|| null("operator"))?.0;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let dim = op.dim();
        if len < dim * dim {
            return Err((
                QfStatus::BufferTooSmall,
                format!("need {} doubles, got {len}", dim * dim),
            ));
        }
        for i in 0..dim {
            for j in 0..dim {
                *buf.add(i * dim + j) = op.get(i, j);
            }
        }
        Ok(())
    })
}

/// Runs the algebra check; writes whether every relation passed and the
/// largest scaled residual.
///
/// # Safety
/// `scheme` must be a live handle; output pointers writable.
#[no_mangle]
pub unsafe extern "C" fn qf_verify_algebra(
    scheme: *const QfScheme,
    dim: usize,
    tol: f64,
    out_passed: *mut bool,
    out_max_residual: *mut f64,
) -> QfStatus {
    guard(|| {
        let report = verify_algebra(scheme_ref(scheme)?, dim, tol).ffi()?;
        let worst = report.residuals.iter().map(|r| r.scaled).fold(0.0, f64::max);
        write_out(out_passed, report.passed(), "out_passed")?;
        write_out(out_max_residual, worst, "out_max_residual")
    })
}

/// Second moments of the squeezed vacuum by truncated series.
///
/// # Safety
/// `scheme` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qf_squeezed_moments(
    scheme: *const QfScheme,
    xi: f64,
    tail_tol: f64,
    out: *mut QfMoments,
) -> QfStatus {
    guard(|| {
        let spec = SqueezedSpec::new(xi, scheme_ref(scheme)?.clone(), tail_tol).ffi()?;
        let m = squeezed::squeezed_moments(&spec).ffi()?;
        write_out(out, m.into(), "out")
    })
}

/// Second moments of the thermal vacuum by truncated series.
///
/// # Safety
/// `scheme` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qf_thermal_moments(
    scheme: *const QfScheme,
    theta: f64,
    tail_tol: f64,
    out: *mut QfMoments,
) -> QfStatus {
    guard(|| {
        let spec = ThermalSpec::new(theta, scheme_ref(scheme)?.clone(), tail_tol).ffi()?;
        let m = thermal::thermal_moments(&spec).ffi()?;
        write_out(out, m.into(), "out")
    })
}

/// # Safety
/// `moments` must be readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qf_quadrature_variances(moments: *const QfMoments, out: *mut QfQuadratures) -> QfStatus {
    guard(|| {
        let m = moments.as_ref().ok_or_else(|| null("moments"))?;
        let v = quadrature_variances(&MomentSet {
            adag_a: m.adag_a,
            a_adag: m.a_adag,
            a_atilde: m.a_atilde,
            adag_atildedag: m.adag_atildedag,
        });
        write_out(
            out,
            QfQuadratures {
                var1: v.var1,
                var2: v.var2,
                product: v.product,
            },
            "out",
        )
    })
}

/// Biedenharn-Macfarlane squeezed mean photon number in closed form.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qf_squeezed_nbar_closed_bm(q: f64, xi: f64, out: *mut f64) -> QfStatus {
    guard(|| write_out(out, squeezed::nbar_closed_bm(q, xi).ffi()?, "out"))
}

/// Biedenharn-Macfarlane thermal mean occupation in closed form.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qf_thermal_nbar_closed_bm(q: f64, theta: f64, out: *mut f64) -> QfStatus {
    guard(|| write_out(out, thermal::thermal_nbar_closed_bm(q, theta).ffi()?.nbar, "out"))
}

/// Squeezed-vacuum entanglement entropy in bits.
#[no_mangle]
pub extern "C" fn qf_squeezed_entropy_bits(xi: f64) -> f64 {
    squeezed::entanglement_entropy_closed(xi)
}

/// Thermal-vacuum entanglement entropy in bits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qf_thermal_entropy_bits(theta: f64, out: *mut f64) -> QfStatus {
    guard(|| write_out(out, thermal::thermal_entropy_bits(theta).ffi()?, "out"))
}

/// Runs a sweep and returns the rendered table as a new string, to be
/// released with [`qf_string_free`].
///
/// # Safety
/// `scheme` must be NUL-terminated; `q_values`/`params` must point to
/// `n_q`/`n_params` doubles; `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn qf_sweep(
    family: QfFamily,
    scheme: *const c_char,
    q_values: *const f64,
    n_q: usize,
    params: *const f64,
    n_params: usize,
    tail_tol: f64,
    format: QfFormat,
    out: *mut *mut c_char,
) -> QfStatus {
    guard(|| {
        if q_values.is_null() || params.is_null() {
            return Err(null("value list"));
        }
        let format = match format {
            QfFormat::Csv => OutputFormat::Csv,
            QfFormat::Json => OutputFormat::Json,
        };
        let spec = SweepSpec {
            family: match family {
                QfFamily::Squeezed => Family::Squeezed,
                QfFamily::Thermal => Family::Thermal,
            },
            scheme: read_str(scheme, "scheme")?.to_string(),
            q_values: std::slice::from_raw_parts(q_values, n_q).to_vec(),
            params: std::slice::from_raw_parts(params, n_params).to_vec(),
            tail_tol,
            format,
            out: None,
        };
        let rows = sweep::run_sweep(&spec).ffi()?;
        let text = CString::new(sweep::render(&rows, format))
            .map_err(|_| (QfStatus::InvalidArgument, "output contains NUL".to_string()))?;
        write_out(out, text.into_raw(), "out")
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
