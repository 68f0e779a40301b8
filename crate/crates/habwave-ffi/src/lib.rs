//! C ABI for the habwave growth–dispersal library.
//!
//! The surface follows the usual handle-and-status conventions:
//!
//! - Kernels, habitats, and grids are opaque handles created by `hw_*_new`
//!   style constructors and released by the matching `hw_*_free`. Handles are
//!   never shared between the library and the caller: the caller owns what a
//!   constructor returns and must free it exactly once.
//! - Every fallible function returns an [`hw_status`]; out-parameters are
//!   written only when the return value is `HW_STATUS_OK`.
//! - On failure a human-readable message is stored per thread and can be
//!   fetched with [`hw_last_error`]. [`hw_status_name`] gives a static label
//!   for the code itself.
//! - Density fields cross the boundary as plain `double` arrays laid out on
//!   the grid returned by [`hw_grid_points`], so callers keep full control of
//!   allocation.
//!
//! Internal panics are caught at the boundary and reported as
//! `HW_STATUS_INTERNAL` instead of unwinding into foreign frames.

#![allow(non_camel_case_types)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, UnwindSafe};

use habwave_core::{
    fixedpoint, spectral, speeds, Classification, Error, Habitat, Kernel, Side, SpatialGrid,
};

/// Result code of every fallible call in this interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum hw_status {
    /// Success; all out-parameters are valid.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A parameter was out of range, non-finite, or inconsistent.
    InvalidArgument = 2,
    /// A standing modelling assumption of the requested routine fails.
    Hypothesis = 3,
    /// An iteration exhausted its budget before reaching its tolerance.
    NoConvergence = 4,
    /// The requested exponential moment does not exist.
    Diverges = 5,
    /// A caller-provided buffer is shorter than the data it must receive.
    BufferTooSmall = 6,
    /// Unexpected internal failure (I/O, panic); details via `hw_last_error`.
    Internal = 7,
}

/// Direction toward one of the two spatial infinities.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum hw_side {
    /// Toward `x -> -inf`.
    Minus = 0,
    /// Toward `x -> +inf`.
    Plus = 1,
}

impl From<hw_side> for Side {
    fn from(side: hw_side) -> Side {
        match side {
            hw_side::Minus => Side::Minus,
            hw_side::Plus => Side::Plus,
        }
    }
}

/// Shape of a computed stationary state.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum hw_classification {
    /// Sup norm at round-off scale: the trivial state.
    Zero = 0,
    /// Nontrivial, but vanishing toward both infinities.
    Pulse = 1,
    /// Connects zero on the left to the right-limit level on the right.
    Front = 2,
    /// Sits at the right-limit level on both sides.
    Uniform = 3,
}

impl From<Classification> for hw_classification {
    fn from(class: Classification) -> hw_classification {
        match class {
            Classification::Zero => hw_classification::Zero,
            Classification::Pulse => hw_classification::Pulse,
            Classification::Front => hw_classification::Front,
            Classification::Uniform => hw_classification::Uniform,
        }
    }
}

/// Opaque handle to a dispersal kernel.
pub struct hw_kernel {
    inner: Kernel,
}

/// Opaque handle to a heterogeneous growth habitat.
pub struct hw_habitat {
    inner: Habitat,
}

/// Opaque handle to a uniform spatial grid.
pub struct hw_grid {
    inner: SpatialGrid,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

/// Records `message` as this thread's last error and passes `status` through.
fn fail(status: hw_status, message: impl std::fmt::Display) -> hw_status {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).unwrap_or_default();
    });
    status
}

/// Maps a library error onto the closest status code and records its message.
fn fail_err(err: Error) -> hw_status {
    let status = match err {
        Error::InvalidParameter { .. }
        | Error::GridMismatch(_)
        | Error::InsufficientTruncation { .. }
        | Error::Precondition(_) => hw_status::InvalidArgument,
        Error::MgfDiverges { .. } => hw_status::Diverges,
        Error::Hypothesis(_) => hw_status::Hypothesis,
        Error::NoConvergence { .. } | Error::MonotonicityViolation { .. } => {
            hw_status::NoConvergence
        }
        Error::Io(_) | Error::Csv(_) => hw_status::Internal,
    };
    fail(status, err)
}

/// Runs `body`, converting a panic into `HW_STATUS_INTERNAL` so no unwind
/// ever crosses the C boundary.
fn guarded(body: impl FnOnce() -> hw_status + UnwindSafe) -> hw_status {
    match catch_unwind(body) {
        Ok(status) => status,
        Err(_) => fail(hw_status::Internal, "internal panic"),
    }
}

/// Boxes a freshly constructed value into a caller-owned handle.
///
/// # Safety
/// `out` must be non-null (checked by callers before invoking this).
unsafe fn emit<H>(out: *mut *mut H, handle: H) -> hw_status {
    *out = Box::into_raw(Box::new(handle));
    hw_status::Ok
}

/// Returns a static, NUL-terminated label for a status code.
#[no_mangle]
pub extern "C" fn hw_status_name(status: hw_status) -> *const c_char {
    let name: &'static [u8] = match status {
        hw_status::Ok => b"ok\0",
        hw_status::NullPointer => b"null pointer\0",
        hw_status::InvalidArgument => b"invalid argument\0",
        hw_status::Hypothesis => b"hypothesis violation\0",
        hw_status::NoConvergence => b"no convergence\0",
        hw_status::Diverges => b"diverges\0",
        hw_status::BufferTooSmall => b"buffer too small\0",
        hw_status::Internal => b"internal error\0",
    };
    name.as_ptr().cast()
}

/// Copies this thread's most recent error message into `buf` as a
/// NUL-terminated string.
///
/// Returns `HW_STATUS_BUFFER_TOO_SMALL` when the message had to be truncated
/// to fit (the buffer still receives a NUL-terminated prefix), and
/// `HW_STATUS_NULL_POINTER` when `buf` is null or `cap` is zero.
///
/// # Safety
/// `buf` must point to at least `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hw_last_error(buf: *mut c_char, cap: usize) -> hw_status {
    if buf.is_null() || cap == 0 {
        return hw_status::NullPointer;
    }
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes();
        let copied = bytes.len().min(cap - 1);
        std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast(), copied);
        *buf.add(copied) = 0;
        if copied < bytes.len() {
            hw_status::BufferTooSmall
        } else {
            hw_status::Ok
        }
    })
}

/// Creates a uniform grid of `points` nodes spanning `[x_min, x_max]`.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle that must
/// be released with [`hw_grid_free`].
#[no_mangle]
pub unsafe extern "C" fn hw_grid_new(
    x_min: f64,
    x_max: f64,
    points: usize,
    out: *mut *mut hw_grid,
) -> hw_status {
    if out.is_null() {
        return hw_status::NullPointer;
    }
    guarded(|| match SpatialGrid::new(x_min, x_max, points) {
        Ok(grid) => emit(out, hw_grid { inner: grid }),
        Err(err) => fail_err(err),
    })
}

/// Releases a grid handle. Null is ignored.
///
/// # Safety
/// `grid` must be a handle returned by [`hw_grid_new`] that has not been
/// freed yet, or null.
#[no_mangle]
pub unsafe extern "C" fn hw_grid_free(grid: *mut hw_grid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of nodes of a grid; zero for a null handle.
///
/// # Safety
/// `grid` must be a live grid handle or null.
#[no_mangle]
pub unsafe extern "C" fn hw_grid_len(grid: *const hw_grid) -> usize {
    if grid.is_null() {
        return 0;
    }
    (*grid).inner.len()
}

/// Writes the grid's node coordinates into `out[0 .. len)`.
///
/// `len` must be at least [`hw_grid_len`].
///
/// # Safety
/// `grid` must be a live grid handle and `out` must point to at least `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hw_grid_points(
    grid: *const hw_grid,
    out: *mut f64,
    len: usize,
) -> hw_status {
    if grid.is_null() || out.is_null() {
        return hw_status::NullPointer;
    }
    let inner = (*grid).inner;
    if len < inner.len() {
        return fail(
            hw_status::BufferTooSmall,
            format!("grid has {} nodes but the buffer holds {len}", inner.len()),
        );
    }
    for (i, x) in inner.points().enumerate() {
        *out.add(i) = x;
    }
    hw_status::Ok
}

/// Creates a Gaussian dispersal kernel with the given mean and variance.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle that must
/// be released with [`hw_kernel_free`].
#[no_mangle]
pub unsafe extern "C" fn hw_kernel_gaussian(
    mean: f64,
    variance: f64,
    out: *mut *mut hw_kernel,
) -> hw_status {
    if out.is_null() {
        return hw_status::NullPointer;
    }
    guarded(|| match Kernel::gaussian(mean, variance) {
        Ok(kernel) => emit(out, hw_kernel { inner: kernel }),
        Err(err) => fail_err(err),
    })
}

/// Creates a two-sided exponential (Laplace) kernel with the given decay
/// rate, shifted by `shift`.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle that must
/// be released with [`hw_kernel_free`].
#[no_mangle]
pub unsafe extern "C" fn hw_kernel_laplace(
    rate: f64,
    shift: f64,
    out: *mut *mut hw_kernel,
) -> hw_status {
    if out.is_null() {
        return hw_status::NullPointer;
    }
    guarded(|| match Kernel::laplace(rate, shift) {
        Ok(kernel) => emit(out, hw_kernel { inner: kernel }),
        Err(err) => fail_err(err),
    })
}

/// Releases a kernel handle. Null is ignored.
///
/// # Safety
/// `kernel` must be a handle returned by a kernel constructor that has not
/// been freed yet, or null.
#[no_mangle]
pub unsafe extern "C" fn hw_kernel_free(kernel: *mut hw_kernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// Evaluates the kernel's moment generating function at `mu`.
///
/// Fails with `HW_STATUS_DIVERGES` when the exponential moment does not
/// exist at `mu`.
///
/// # Safety
/// `kernel` must be a live kernel handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hw_kernel_mgf(
    kernel: *const hw_kernel,
    mu: f64,
    out: *mut f64,
) -> hw_status {
    if kernel.is_null() || out.is_null() {
        return hw_status::NullPointer;
    }
    let kernel = &(*kernel).inner;
    guarded(|| match kernel.mgf(mu) {
        Ok(value) => {
            *out = value;
            hw_status::Ok
        }
        Err(err) => fail_err(err),
    })
}

/// Creates a habitat whose growth is Beverton-Holt with a sigmoid coefficient
/// profile rising from `rate_minus` (left) to `rate_plus` (right).
///
/// Requires `0 < rate_minus < 1 < rate_plus`, `carrying > 0`, and
/// `steepness > 0`.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle that must
/// be released with [`hw_habitat_free`].
#[no_mangle]
pub unsafe extern "C" fn hw_habitat_beverton_holt(
    rate_minus: f64,
    rate_plus: f64,
    carrying: f64,
    steepness: f64,
    out: *mut *mut hw_habitat,
) -> hw_status {
    if out.is_null() {
        return hw_status::NullPointer;
    }
    guarded(
        || match Habitat::beverton_holt(rate_minus, rate_plus, carrying, steepness) {
            Ok(habitat) => emit(out, hw_habitat { inner: habitat }),
            Err(err) => fail_err(err),
        },
    )
}

/// Creates the localized-patch habitat: coefficient `beta * exp(-x^2)`,
/// vanishing toward both infinities, with a saturating nonlinearity.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle that must
/// be released with [`hw_habitat_free`].
#[no_mangle]
pub unsafe extern "C" fn hw_habitat_gaussian_patch(
    beta: f64,
    out: *mut *mut hw_habitat,
) -> hw_status {
    if out.is_null() {
        return hw_status::NullPointer;
    }
    guarded(|| match Habitat::gaussian_patch(beta) {
        Ok(habitat) => emit(out, hw_habitat { inner: habitat }),
        Err(err) => fail_err(err),
    })
}

/// Creates the patch-plus-ramp habitat: the pointwise maximum of the
/// localized patch `beta * exp(-x^2)` and a ramp rising to the supercritical
/// right-limit level, with the same saturating nonlinearity.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle that must
/// be released with [`hw_habitat_free`].
#[no_mangle]
pub unsafe extern "C" fn hw_habitat_patch_with_ramp(
    beta: f64,
    out: *mut *mut hw_habitat,
) -> hw_status {
    if out.is_null() {
        return hw_status::NullPointer;
    }
    guarded(|| match Habitat::patch_with_ramp(beta) {
        Ok(habitat) => emit(out, hw_habitat { inner: habitat }),
        Err(err) => fail_err(err),
    })
}

/// Releases a habitat handle. Null is ignored.
///
/// # Safety
/// `habitat` must be a handle returned by a habitat constructor that has not
/// been freed yet, or null.
#[no_mangle]
pub unsafe extern "C" fn hw_habitat_free(habitat: *mut hw_habitat) {
    if !habitat.is_null() {
        drop(Box::from_raw(habitat));
    }
}

/// Linear growth coefficient of the habitat in the limit toward one side.
///
/// # Safety
/// `habitat` must be a live habitat handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hw_habitat_coefficient_limit(
    habitat: *const hw_habitat,
    side: hw_side,
    out: *mut f64,
) -> hw_status {
    if habitat.is_null() || out.is_null() {
        return hw_status::NullPointer;
    }
    *out = (*habitat).inner.coefficient_limit(side.into());
    hw_status::Ok
}

/// Spreading speed of the linear operator with constant coefficient `coef`
/// and the given kernel, toward the given side.
///
/// On success writes the speed to `c_star` and the minimizing decay exponent
/// to `mu_star` (either pointer may be null to skip that value).
///
/// # Safety
/// `kernel` must be a live kernel handle; `c_star` and `mu_star` must each be
/// null or valid.
#[no_mangle]
pub unsafe extern "C" fn hw_spreading_speed(
    coef: f64,
    kernel: *const hw_kernel,
    side: hw_side,
    c_star: *mut f64,
    mu_star: *mut f64,
) -> hw_status {
    if kernel.is_null() {
        return hw_status::NullPointer;
    }
    let kernel = &(*kernel).inner;
    guarded(|| match speeds::spreading_speed(coef, kernel, side.into()) {
        Ok(report) => {
            if !c_star.is_null() {
                *c_star = report.c_star;
            }
            if !mu_star.is_null() {
                *mu_star = report.mu_star;
            }
            hw_status::Ok
        }
        Err(err) => fail_err(err),
    })
}

/// Advances a density field by `steps` applications of the growth-dispersal
/// operator, in place.
///
/// `state` holds the field's values on the grid's nodes; `len` must be at
/// least the grid length, and only the first grid-length entries are read
/// and written.
///
/// # Safety
/// `habitat`, `kernel`, and `grid` must be live handles; `state` must point
/// to at least `len` readable and writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hw_evolve(
    habitat: *const hw_habitat,
    kernel: *const hw_kernel,
    grid: *const hw_grid,
    state: *mut f64,
    len: usize,
    steps: usize,
) -> hw_status {
    if habitat.is_null() || kernel.is_null() || grid.is_null() || state.is_null() {
        return hw_status::NullPointer;
    }
    let habitat = &(*habitat).inner;
    let kernel = &(*kernel).inner;
    let grid = (*grid).inner;
    if len < grid.len() {
        return fail(
            hw_status::BufferTooSmall,
            format!("grid has {} nodes but the state buffer holds {len}", grid.len()),
        );
    }
    let values = std::slice::from_raw_parts(state, grid.len()).to_vec();
    guarded(move || {
        let op = match habwave_core::EvolutionOp::new(habitat.clone(), kernel.clone(), grid) {
            Ok(op) => op,
            Err(err) => return fail_err(err),
        };
        let mut field = match habwave_core::Field::from_values(grid, values) {
            Ok(field) => field,
            Err(err) => return fail_err(err),
        };
        for _ in 0..steps {
            field = match op.apply(&field) {
                Ok(next) => next,
                Err(err) => return fail_err(err),
            };
        }
        std::ptr::copy_nonoverlapping(field.values().as_ptr(), state, grid.len());
        hw_status::Ok
    })
}

/// Computes the largest stationary state below the constant cap by monotone
/// descent, writing it into `state`.
///
/// `len` must be at least the grid length. On success the optional
/// out-parameters receive the re-measured residual and the state's shape
/// classification. Fails with `HW_STATUS_NO_CONVERGENCE` when `max_iters`
/// steps do not reach `tol`.
///
/// # Safety
/// `habitat`, `kernel`, and `grid` must be live handles; `state` must point
/// to at least `len` writable doubles; `residual` and `classification` must
/// each be null or valid.
#[no_mangle]
pub unsafe extern "C" fn hw_fixed_point(
    habitat: *const hw_habitat,
    kernel: *const hw_kernel,
    grid: *const hw_grid,
    cap: f64,
    tol: f64,
    max_iters: usize,
    state: *mut f64,
    len: usize,
    residual: *mut f64,
    classification: *mut hw_classification,
) -> hw_status {
    if habitat.is_null() || kernel.is_null() || grid.is_null() || state.is_null() {
        return hw_status::NullPointer;
    }
    let habitat = &(*habitat).inner;
    let kernel = &(*kernel).inner;
    let grid = (*grid).inner;
    if len < grid.len() {
        return fail(
            hw_status::BufferTooSmall,
            format!("grid has {} nodes but the state buffer holds {len}", grid.len()),
        );
    }
    guarded(move || {
        let op = match habwave_core::EvolutionOp::new(habitat.clone(), kernel.clone(), grid) {
            Ok(op) => op,
            Err(err) => return fail_err(err),
        };
        match fixedpoint::solve_from_cap(&op, cap, tol, max_iters) {
            Ok(result) => {
                std::ptr::copy_nonoverlapping(result.field.values().as_ptr(), state, grid.len());
                if !residual.is_null() {
                    *residual = result.residual;
                }
                if !classification.is_null() {
                    *classification = result.classification.into();
                }
                hw_status::Ok
            }
            Err(err) => fail_err(err),
        }
    })
}

/// Spectral radius of the patch-driven linearization with strength `beta`,
/// estimated by power iteration on the given grid.
///
/// # Safety
/// `kernel` and `grid` must be live handles; `rho` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hw_power_radius(
    beta: f64,
    kernel: *const hw_kernel,
    grid: *const hw_grid,
    tol: f64,
    rho: *mut f64,
) -> hw_status {
    if kernel.is_null() || grid.is_null() || rho.is_null() {
        return hw_status::NullPointer;
    }
    let kernel = &(*kernel).inner;
    let grid = (*grid).inner;
    guarded(move || match spectral::power_radius(beta, kernel, grid, tol) {
        Ok(report) => {
            *rho = report.rho;
            hw_status::Ok
        }
        Err(err) => fail_err(err),
    })
}
