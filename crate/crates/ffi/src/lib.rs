//! C interface to `z2cover-core`.
//!
//! Every function returns a [`Z2cStatus`]; results come back through out
//! pointers. On failure a description is available from
//! [`z2c_last_error_message`] on the same thread. Strings returned by the
//! library must be released with [`z2c_string_free`], handles with their
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use z2cover_core::families::{build_family, theorem_table, FamilyReport};
use z2cover_core::picard::{PointTag, SurfaceModel};
use z2cover_core::{cover, render, verify, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Z2cStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DomainError = 3,
    VerificationFailed = 4,
    Panic = 5,
}

/// A surface `F_e` with its blow-ups.
pub struct Z2cSurface(SurfaceModel);

/// A fully built family report.
pub struct Z2cFamilyReport(FamilyReport);

/// Plain-data view of a report.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Z2cSummary {
    pub family: u32,
    pub n: i64,
    pub k2: i64,
    pub pg: i64,
    pub chi: i64,
    pub q: i64,
    pub map_degree: i64,
    pub image_degree: i64,
    pub bpf: bool,
    pub has_nodes: bool,
    pub nodes: i64,
    /// All internal consistency checks passed.
    pub consistent: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn classify(e: &Error) -> Z2cStatus {
    match e {
        Error::FamilyOutOfRange(_)
        | Error::ParameterOutOfRange { .. }
        | Error::Length { .. }
        | Error::GroupRank { .. }
        | Error::InvalidPointType(_) => Z2cStatus::InvalidArgument,
        _ => Z2cStatus::DomainError,
    }
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (Z2cStatus, String)>) -> Z2cStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => Z2cStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            Z2cStatus::Panic
        }
    }
}

fn core_err(e: Error) -> (Z2cStatus, String) {
    (classify(&e), e.to_string())
}

fn null(name: &str) -> (Z2cStatus, String) {
    (Z2cStatus::NullPointer, format!("{name} is null"))
}

fn into_c_string(s: String) -> Result<*mut c_char, (Z2cStatus, String)> {
    CString::new(s).map(CString::into_raw).map_err(|_| {
        (
            Z2cStatus::DomainError,
            "output contains a NUL byte".to_owned(),
        )
    })
}

/// # Safety
/// `ptr` must be null or point to `len` readable `i64`s.
unsafe fn coords<'a>(ptr: *const i64, len: usize) -> Result<&'a [i64], (Z2cStatus, String)> {
    if ptr.is_null() {
        return Err(null("coordinate array"));
    }
    // SAFETY: caller contract.
    Ok(unsafe { std::slice::from_raw_parts(ptr, len) })
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn z2c_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn z2c_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: allocated by CString::into_raw in this crate.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn z2c_surface_hirzebruch(e: u32, out: *mut *mut Z2cSurface) -> Z2cStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = Box::new(Z2cSurface(SurfaceModel::hirzebruch(e)));
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(s) };
        Ok(())
    })
}

/// Blows up one more point; the input handle is left untouched.
///
/// # Safety
/// `surface` must be a live handle, `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn z2c_surface_blow_up(
    surface: *const Z2cSurface,
    out: *mut *mut Z2cSurface,
) -> Z2cStatus {
    guard(|| {
        if surface.is_null() || out.is_null() {
            return Err(null("surface or out"));
        }
        // SAFETY: caller contract.
        let s = unsafe { &(*surface).0 };
        let label = format!("P{}", s.blowups().len() + 1);
        let blown = Box::new(Z2cSurface(s.blow_up(PointTag::Label(label))));
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(blown) };
        Ok(())
    })
}

/// # Safety
/// `surface` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn z2c_surface_free(surface: *mut Z2cSurface) {
    if !surface.is_null() {
        // SAFETY: allocated by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(surface) });
    }
}

/// Number of coordinates in a class: `2 + blow-ups`.
///
/// # Safety
/// `surface` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn z2c_surface_basis_size(surface: *const Z2cSurface) -> usize {
    if surface.is_null() {
        return 0;
    }
    // SAFETY: caller contract.
    unsafe { (*surface).0.basis_size() }
}

/// # Safety
/// `a` and `b` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn z2c_surface_intersect(
    surface: *const Z2cSurface,
    a: *const i64,
    b: *const i64,
    len: usize,
    out: *mut i64,
) -> Z2cStatus {
    guard(|| {
        if surface.is_null() || out.is_null() {
            return Err(null("surface or out"));
        }
        // SAFETY: caller contract.
        let s = unsafe { &(*surface).0 };
        let a = s
            .class(unsafe { coords(a, len) }?.to_vec())
            .map_err(core_err)?;
        let b = s
            .class(unsafe { coords(b, len) }?.to_vec())
            .map_err(core_err)?;
        let v = s.intersect(&a, &b).map_err(core_err)?;
        // SAFETY: checked non-null above.
        unsafe { *out = v };
        Ok(())
    })
}

/// Writes the canonical class into `buf`, which holds `len` values.
///
/// # Safety
/// `buf` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn z2c_surface_canonical_class(
    surface: *const Z2cSurface,
    buf: *mut i64,
    len: usize,
) -> Z2cStatus {
    guard(|| {
        if surface.is_null() || buf.is_null() {
            return Err(null("surface or buf"));
        }
        // SAFETY: caller contract.
        let s = unsafe { &(*surface).0 };
        let k = s.canonical_class();
        if len != k.coords().len() {
            return Err((
                Z2cStatus::InvalidArgument,
                format!("buffer holds {len} values, class has {}", k.coords().len()),
            ));
        }
        // SAFETY: caller contract, length checked.
        unsafe { std::slice::from_raw_parts_mut(buf, len) }.copy_from_slice(k.coords());
        Ok(())
    })
}

/// `h⁰` of a class, with positive exceptional parts split off as fixed
/// components.
///
/// # Safety
/// `class_coords` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn z2c_surface_h0(
    surface: *const Z2cSurface,
    class_coords: *const i64,
    len: usize,
    out: *mut u64,
) -> Z2cStatus {
    guard(|| {
        if surface.is_null() || out.is_null() {
            return Err(null("surface or out"));
        }
        // SAFETY: caller contract.
        let s = unsafe { &(*surface).0 };
        let d = s
            .class(unsafe { coords(class_coords, len) }?.to_vec())
            .map_err(core_err)?;
        let h = s.h0_split(&d).map_err(core_err)?;
        // SAFETY: checked non-null above.
        unsafe { *out = h };
        Ok(())
    })
}

/// # Safety
/// `k` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn z2c_validate_point_type(
    k: *const i64,
    len: usize,
    out: *mut bool,
) -> Z2cStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let k = unsafe { coords(k, len) }?;
        // SAFETY: checked non-null above.
        unsafe { *out = cover::validate_point_type(k) };
        Ok(())
    })
}

/// Builds family `id` (1 to 9) at parameter `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn z2c_family_build(
    id: u32,
    n: i64,
    out: *mut *mut Z2cFamilyReport,
) -> Z2cStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let r = build_family(id, n).map_err(core_err)?;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(Box::new(Z2cFamilyReport(r))) };
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn z2c_family_free(report: *mut Z2cFamilyReport) {
    if !report.is_null() {
        // SAFETY: allocated by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(report) });
    }
}

/// # Safety
/// `report` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn z2c_family_summary(
    report: *const Z2cFamilyReport,
    out: *mut Z2cSummary,
) -> Z2cStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            return Err(null("report or out"));
        }
        // SAFETY: caller contract.
        let r = unsafe { &(*report).0 };
        let summary = Z2cSummary {
            family: r.id.get(),
            n: r.n,
            k2: r.invariants.k2,
            pg: r.invariants.pg,
            chi: r.invariants.chi,
            q: r.invariants.q,
            map_degree: r.map_degree,
            image_degree: r.image_degree,
            bpf: r.bpf,
            has_nodes: r.nodes.is_some(),
            nodes: r.nodes.unwrap_or(0),
            consistent: r.consistent(),
        };
        // SAFETY: checked non-null above.
        unsafe { *out = summary };
        Ok(())
    })
}

/// The report as JSON, including building data and tower. Free with
/// [`z2c_string_free`].
///
/// # Safety
/// `report` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn z2c_family_json(
    report: *const Z2cFamilyReport,
    out: *mut *mut c_char,
) -> Z2cStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            return Err(null("report or out"));
        }
        // SAFETY: caller contract.
        let r = unsafe { &(*report).0 };
        let s = into_c_string(render::family(r, render::Format::Json))?;
        // SAFETY: checked non-null above.
        unsafe { *out = s };
        Ok(())
    })
}

/// The nine-row table as CSV. Free with [`z2c_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn z2c_table_csv(n: i64, out: *mut *mut c_char) -> Z2cStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let rows = theorem_table(n).map_err(core_err)?;
        let s = into_c_string(render::table_csv(&rows))?;
        // SAFETY: checked non-null above.
        unsafe { *out = s };
        Ok(())
    })
}

/// Runs the self-check suite over `n_lo..=n_hi`. Returns
/// `VerificationFailed` if any check fails; `summary`, if non-null, receives
/// the text report either way and must be freed with [`z2c_string_free`].
///
/// # Safety
/// `summary` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn z2c_verify(n_lo: i64, n_hi: i64, summary: *mut *mut c_char) -> Z2cStatus {
    guard(|| {
        let s = verify::run(n_lo, n_hi, None).map_err(core_err)?;
        if !summary.is_null() {
            let text = into_c_string(render::verify(&s, render::Format::Text))?;
            // SAFETY: checked non-null above.
            unsafe { *summary = text };
        }
        if s.all_passed() {
            Ok(())
        } else {
            let failed: Vec<&str> = s
                .checks
                .iter()
                .filter(|c| c.failed > 0)
                .map(|c| c.name)
                .collect();
            Err((
                Z2cStatus::VerificationFailed,
                format!("failed checks: {}", failed.join(", ")),
            ))
        }
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn z2c_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version string"),
        };
    VERSION.as_ptr()
}
