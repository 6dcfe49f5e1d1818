//! C ABI over `netkernel`.
//!
//! Objects cross the boundary as opaque handles created by
//! `nk_*_from_json` or `nk_network_read` and released by the matching
//! `nk_*_free`. Every fallible call returns an [`NkStatus`]; on failure a
//! message is available from [`nk_last_error`] on the same thread until
//! the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use netkernel::gp::{GpError, SpaceTimeDesign};
use netkernel::kernels::{CovarianceFunction, Kernel, KernelConfig, ValidityVerdict};
use netkernel::metrics::{distance_matrix, MetricKind};
use netkernel::network::io::{parse_network, read_network};
use netkernel::network::{Network, PointOnNetwork};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    NotPositiveDefinite = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NkMetric {
    Geodesic = 0,
    Resistance = 1,
    Euclidean = 2,
}

impl From<NkMetric> for MetricKind {
    fn from(m: NkMetric) -> Self {
        match m {
            NkMetric::Geodesic => MetricKind::Geodesic,
            NkMetric::Resistance => MetricKind::Resistance,
            NkMetric::Euclidean => MetricKind::AmbientEuclidean,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NkVerdict {
    Valid = 0,
    Invalid = 1,
    Unknown = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NkPointKind {
    Vertex = 0,
    Edge = 1,
}

/// A location on a network. `offset` is ignored for vertices.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NkPoint {
    pub kind: NkPointKind,
    pub ref_id: u64,
    pub offset: f64,
}

/// Opaque network handle.
pub struct NkNetwork(Network);

/// Opaque kernel handle.
pub struct NkKernel(Kernel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

type Result<T> = std::result::Result<T, NkStatus>;

fn fail<T>(status: NkStatus, msg: impl Into<String>) -> Result<T> {
    set_error(msg);
    Err(status)
}

fn guard(f: impl FnOnce() -> Result<()>) -> NkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NkStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            NkStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str> {
    if p.is_null() {
        return fail(NkStatus::NullPointer, "null string");
    }
    match CStr::from_ptr(p).to_str() {
        Ok(s) => Ok(s),
        Err(_) => fail(NkStatus::InvalidUtf8, "string is not UTF-8"),
    }
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T> {
    match p.as_ref() {
        Some(r) => Ok(r),
        None => fail(NkStatus::NullPointer, "null handle"),
    }
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T> {
    match p.as_mut() {
        Some(r) => Ok(r),
        None => fail(NkStatus::NullPointer, "null output pointer"),
    }
}

unsafe fn slice_arg<'a, T>(p: *const T, n: usize) -> Result<&'a [T]> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(NkStatus::NullPointer, "null array");
    }
    Ok(std::slice::from_raw_parts(p, n))
}

fn to_points(net: &Network, pts: &[NkPoint]) -> Result<Vec<PointOnNetwork>> {
    pts.iter()
        .map(|p| {
            match p.kind {
                NkPointKind::Vertex => net.vertex_point(p.ref_id),
                NkPointKind::Edge => net.point(p.ref_id, p.offset),
            }
            .or_else(|e| fail(NkStatus::InvalidArgument, e.to_string()))
        })
        .collect()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failing call on this thread, or null. The pointer is
/// valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn nk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Parses a network from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn nk_network_from_json(json: *const c_char, out: *mut *mut NkNetwork) -> NkStatus {
    guard(|| {
        let out = out_arg(out)?;
        let text = str_arg(json)?;
        match parse_network(text, Path::new("<memory>")) {
            Ok(net) => {
                *out = Box::into_raw(Box::new(NkNetwork(net)));
                Ok(())
            }
            Err(e) => fail(NkStatus::Parse, e.to_string()),
        }
    })
}

/// Reads a network JSON file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn nk_network_read(path: *const c_char, out: *mut *mut NkNetwork) -> NkStatus {
    guard(|| {
        let out = out_arg(out)?;
        let path = str_arg(path)?;
        match read_network(path) {
            Ok(net) => {
                *out = Box::into_raw(Box::new(NkNetwork(net)));
                Ok(())
            }
            Err(e @ netkernel::network::io::IoError::Io { .. }) => fail(NkStatus::Io, e.to_string()),
            Err(e) => fail(NkStatus::Parse, e.to_string()),
        }
    })
}

/// # Safety
/// `net` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nk_network_free(net: *mut NkNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Vertex and edge counts.
///
/// # Safety
/// `net` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn nk_network_size(
    net: *const NkNetwork,
    vertices: *mut usize,
    edges: *mut usize,
) -> NkStatus {
    guard(|| {
        let net = &ref_arg(net)?.0;
        *out_arg(vertices)? = net.vertex_count();
        *out_arg(edges)? = net.edge_count();
        Ok(())
    })
}

/// Largest geodesic distance between two vertices.
///
/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nk_network_diameter(net: *const NkNetwork, out: *mut f64) -> NkStatus {
    guard(|| {
        *out_arg(out)? = ref_arg(net)?.0.diameter();
        Ok(())
    })
}

/// Writes 1 if every edge is a shortest path between its endpoints, else 0.
///
/// # Safety
/// `net` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nk_network_is_distance_consistent(net: *const NkNetwork, out: *mut i32) -> NkStatus {
    guard(|| {
        *out_arg(out)? = ref_arg(net)?.0.is_distance_consistent() as i32;
        Ok(())
    })
}

/// Parses a kernel config (`{"model": ...}`) and checks its parameters.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn nk_kernel_from_json(json: *const c_char, out: *mut *mut NkKernel) -> NkStatus {
    guard(|| {
        let out = out_arg(out)?;
        let text = str_arg(json)?;
        let cfg: KernelConfig = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(e) => return fail(NkStatus::Parse, e.to_string()),
        };
        match cfg.build() {
            Ok(k) => {
                *out = Box::into_raw(Box::new(NkKernel(k)));
                Ok(())
            }
            Err(e) => fail(NkStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `k` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nk_kernel_free(k: *mut NkKernel) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Covariance at spatial distance `d` and time lag `u`.
///
/// # Safety
/// `k` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nk_kernel_eval(k: *const NkKernel, d: f64, u: f64, out: *mut f64) -> NkStatus {
    guard(|| {
        let k = &ref_arg(k)?.0;
        let out = out_arg(out)?;
        if !(d >= 0.0 && d.is_finite() && u >= 0.0 && u.is_finite()) {
            return fail(NkStatus::InvalidArgument, "d and u must be finite and nonnegative");
        }
        *out = k.cov(d, u);
        Ok(())
    })
}

/// Validity verdict of `k` on the topology of `net`. The verdict's rule or
/// reason is left in [`nk_last_error`].
///
/// # Safety
/// `k` and `net` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nk_kernel_validity(
    k: *const NkKernel,
    net: *const NkNetwork,
    out: *mut NkVerdict,
) -> NkStatus {
    guard(|| {
        let v = ref_arg(k)?.0.validity(&ref_arg(net)?.0.classify_topology());
        let out = out_arg(out)?;
        set_error(v.to_string());
        *out = match v {
            ValidityVerdict::Valid { .. } => NkVerdict::Valid,
            ValidityVerdict::Invalid { .. } => NkVerdict::Invalid,
            ValidityVerdict::Unknown { .. } => NkVerdict::Unknown,
        };
        Ok(())
    })
}

/// Fills `out` (row-major, `n * n`) with pairwise distances.
///
/// # Safety
/// `points` must hold `n` entries and `out` room for `n * n` doubles.
#[no_mangle]
pub unsafe extern "C" fn nk_distance_matrix(
    net: *const NkNetwork,
    points: *const NkPoint,
    n: usize,
    metric: NkMetric,
    out: *mut f64,
) -> NkStatus {
    guard(|| {
        let net = &ref_arg(net)?.0;
        let pts = to_points(net, slice_arg(points, n)?)?;
        let dm = match distance_matrix(net, &pts, metric.into()) {
            Ok(d) => d,
            Err(e) => return fail(NkStatus::InvalidArgument, e.to_string()),
        };
        if n > 0 {
            if out.is_null() {
                return fail(NkStatus::NullPointer, "null output array");
            }
            std::slice::from_raw_parts_mut(out, n * n).copy_from_slice(dm.values());
        }
        Ok(())
    })
}

/// Zero-mean Gaussian log-likelihood of `y` under `k` plus `nugget` on the
/// diagonal, observed at `points` and `times`.
///
/// # Safety
/// `points`, `times` and `y` must each hold `n` entries.
#[no_mangle]
pub unsafe extern "C" fn nk_loglik(
    net: *const NkNetwork,
    k: *const NkKernel,
    points: *const NkPoint,
    times: *const f64,
    y: *const f64,
    n: usize,
    nugget: f64,
    out: *mut f64,
) -> NkStatus {
    guard(|| {
        let net = &ref_arg(net)?.0;
        let k = &ref_arg(k)?.0;
        let out = out_arg(out)?;
        let pts = to_points(net, slice_arg(points, n)?)?;
        let times = slice_arg(times, n)?.to_vec();
        let y = slice_arg(y, n)?;
        let r = SpaceTimeDesign::new(net, pts, times, k.time_kind())
            .and_then(|design| netkernel::gp::loglik(&design, k, nugget, y));
        match r {
            Ok(v) => {
                *out = v;
                Ok(())
            }
            Err(e @ GpError::NotPositiveDefinite { .. }) => fail(NkStatus::NotPositiveDefinite, e.to_string()),
            Err(e) => fail(NkStatus::InvalidArgument, e.to_string()),
        }
    })
}
