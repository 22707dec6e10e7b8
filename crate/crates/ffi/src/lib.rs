//! C ABI for `divbar`.
//!
//! Objects are opaque handles created by `*_build`/`*_from_toml` and
//! released by the matching `*_free`. Every fallible function returns a
//! [`DivbarStatus`] and writes results through out-pointers; on failure the
//! message is available from [`divbar_last_error_message`] on the same
//! thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use divbar::config::ModelConfig;
use divbar::dist::counting_pmf;
use divbar::dividend::{barrier_value, certify_optimality, find_b_star, CertifyingRule};
use divbar::scale::{build_scale_grid, scale_derivative, ScaleFunctionGrid};
use divbar::sim::{simulate_dividends, SimulationConfig};
use divbar::{Error, RiskModel};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivbarStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Domain = 4,
    Evaluation = 5,
    Extrapolation = 6,
    InsufficientData = 7,
    DegenerateBarrier = 8,
    GridTooShort = 9,
    OutOfRange = 10,
    Panic = 99,
}

/// Certifying result of an optimality certificate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivbarRule {
    Thm41 = 0,
    Thm42 = 1,
    Cor41 = 2,
    Thm43 = 3,
    Lemma52Direct = 4,
    Conjecture1 = 5,
    Conjecture2 = 6,
    None = 7,
}

/// Parsed model configuration.
pub struct DivbarModel {
    config: ModelConfig,
    model: RiskModel,
}

/// Tabulated scale function.
pub struct DivbarScaleGrid {
    grid: ScaleFunctionGrid,
}

/// One row of a scale grid.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DivbarGridRow {
    pub x: f64,
    pub w: f64,
    pub w1: f64,
    pub w2: f64,
    pub err: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivbarCertificate {
    pub b_star: f64,
    pub w1_min: f64,
    pub rule: DivbarRule,
    pub conjectural: bool,
    pub grid_minimum_confirmed: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DivbarSimulation {
    pub estimate: f64,
    pub std_error: f64,
    pub ruin_probability: f64,
    pub paths: usize,
    pub horizon: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    // interior NULs cannot occur in our messages, but never fail here
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(DivbarStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Config { .. } => DivbarStatus::Config,
            Error::Domain { .. } => DivbarStatus::Domain,
            Error::Evaluation(_) => DivbarStatus::Evaluation,
            Error::Extrapolation { .. } => DivbarStatus::Extrapolation,
            Error::InsufficientData { .. } => DivbarStatus::InsufficientData,
            Error::DegenerateBarrier { .. } => DivbarStatus::DegenerateBarrier,
            Error::GridTooShort { .. } => DivbarStatus::GridTooShort,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(DivbarStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DivbarStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            DivbarStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            DivbarStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

fn rule_code(rule: CertifyingRule) -> DivbarRule {
    match rule {
        CertifyingRule::CompletelyMonotoneClaims => DivbarRule::Thm41,
        CertifyingRule::DiscreteCmWithDfrClaims => DivbarRule::Thm42,
        CertifyingRule::GeometricOrLogarithmicWithDfrClaims => DivbarRule::Cor41,
        CertifyingRule::LogConvexPmfWithExponentialClaims => DivbarRule::Thm43,
        CertifyingRule::LogConvexCompoundDensity => DivbarRule::Lemma52Direct,
        CertifyingRule::LogConvexPmfAndDensity => DivbarRule::Conjecture1,
        CertifyingRule::DfrPmfAndClaims => DivbarRule::Conjecture2,
        CertifyingRule::None => DivbarRule::None,
    }
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call into the library from this thread.
#[no_mangle]
pub extern "C" fn divbar_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static label of a rule code, e.g. `"Thm4.1"`; null for an unknown code.
#[no_mangle]
pub extern "C" fn divbar_rule_label(rule: i32) -> *const c_char {
    let s: &'static CStr = match rule {
        0 => c"Thm4.1",
        1 => c"Thm4.2",
        2 => c"Cor4.1",
        3 => c"Thm4.3",
        4 => c"Lemma5.2-direct",
        5 => c"Conjecture1",
        6 => c"Conjecture2",
        7 => c"None",
        _ => return ptr::null(),
    };
    s.as_ptr()
}

/// Parse a NUL-terminated TOML configuration.
///
/// # Safety
/// `toml` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn divbar_model_from_toml(toml: *const c_char, out: *mut *mut DivbarModel) -> DivbarStatus {
    guard(|| {
        if toml.is_null() {
            return Err(null("toml"));
        }
        let text = CStr::from_ptr(toml)
            .to_str()
            .map_err(|e| Failure(DivbarStatus::InvalidUtf8, e.to_string()))?;
        let config = ModelConfig::from_toml_str(text)?;
        let model = config.risk_model()?;
        let handle = Box::into_raw(Box::new(DivbarModel { config, model }));
        put(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// # Safety
/// `model` must come from [`divbar_model_from_toml`] and not be used
/// afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn divbar_model_free(model: *mut DivbarModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// The discount rate `control.q` of the configuration.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn divbar_model_q(model: *const DivbarModel, out: *mut f64) -> DivbarStatus {
    guard(|| put(out, get(model, "model")?.config.control.q, "out"))
}

/// Laplace exponent `ψ(s)` for `s >= 0`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn divbar_model_psi(model: *const DivbarModel, s: f64, out: *mut f64) -> DivbarStatus {
    guard(|| put(out, get(model, "model")?.model.psi(s)?, "out"))
}

/// Right inverse `ρ(q)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn divbar_model_rho(model: *const DivbarModel, q: f64, out: *mut f64) -> DivbarStatus {
    guard(|| put(out, get(model, "model")?.model.rho(q)?, "out"))
}

/// Tabulate the scale function at rate `q`. `n = 0` and a non-positive or
/// NaN `x_max` select the configured (or automatic) values.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn divbar_scale_grid_build(
    model: *const DivbarModel,
    q: f64,
    n: usize,
    x_max: f64,
    out: *mut *mut DivbarScaleGrid,
) -> DivbarStatus {
    guard(|| {
        let m = get(model, "model")?;
        let opts = m
            .config
            .scale_options((n > 0).then_some(n), (x_max > 0.0).then_some(x_max));
        let grid = build_scale_grid(&m.model, q, &opts)?;
        let handle = Box::into_raw(Box::new(DivbarScaleGrid { grid }));
        put(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// # Safety
/// `grid` must come from [`divbar_scale_grid_build`] and not be used
/// afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn divbar_scale_grid_free(grid: *mut DivbarScaleGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of rows (`N + 1`).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn divbar_scale_grid_len(grid: *const DivbarScaleGrid, out: *mut usize) -> DivbarStatus {
    guard(|| put(out, get(grid, "grid")?.grid.n() + 1, "out"))
}

/// Row `i` of the grid.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn divbar_scale_grid_row(
    grid: *const DivbarScaleGrid,
    i: usize,
    out: *mut DivbarGridRow,
) -> DivbarStatus {
    guard(|| {
        let g = &get(grid, "grid")?.grid;
        let r = g.row(i).ok_or_else(|| {
            Failure(
                DivbarStatus::OutOfRange,
                format!("row {i} out of range (grid has {} rows)", g.n() + 1),
            )
        })?;
        put(
            out,
            DivbarGridRow {
                x: r.x,
                w: r.w,
                w1: r.w1,
                w2: r.w2,
                err: r.err,
            },
            "out",
        )
    })
}

/// `W` (order 0), `W'` or `W''` at `x` with an error estimate; `error` may
/// be null.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn divbar_scale_eval(
    grid: *const DivbarScaleGrid,
    x: f64,
    order: u8,
    value: *mut f64,
    error: *mut f64,
) -> DivbarStatus {
    guard(|| {
        let est = scale_derivative(&get(grid, "grid")?.grid, x, order)?;
        put(value, est.value, "value")?;
        if !error.is_null() {
            error.write(est.error);
        }
        Ok(())
    })
}

/// Optimal barrier and `W'(b*)`; `w1_min` may be null.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn divbar_find_b_star(
    grid: *const DivbarScaleGrid,
    b_star: *mut f64,
    w1_min: *mut f64,
) -> DivbarStatus {
    guard(|| {
        let (b, w1) = find_b_star(&get(grid, "grid")?.grid)?;
        put(b_star, b, "b_star")?;
        if !w1_min.is_null() {
            w1_min.write(w1);
        }
        Ok(())
    })
}

/// Value `V_b(x)` of the barrier strategy at level `b`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn divbar_barrier_value(
    grid: *const DivbarScaleGrid,
    b: f64,
    x: f64,
    out: *mut f64,
) -> DivbarStatus {
    guard(|| put(out, barrier_value(&get(grid, "grid")?.grid, b, x)?, "out"))
}

/// Locate and certify the optimal barrier.
///
/// # Safety
/// Pointers must be valid; `grid` must be built from `model`.
#[no_mangle]
pub unsafe extern "C" fn divbar_certify(
    model: *const DivbarModel,
    grid: *const DivbarScaleGrid,
    out: *mut DivbarCertificate,
) -> DivbarStatus {
    guard(|| {
        let cert = certify_optimality(&get(model, "model")?.model, &get(grid, "grid")?.grid)?;
        put(
            out,
            DivbarCertificate {
                b_star: cert.b_star,
                w1_min: cert.w1_min,
                rule: rule_code(cert.rule),
                conjectural: cert.conjectural,
                grid_minimum_confirmed: cert.grid_minimum_confirmed,
            },
            "out",
        )
    })
}

/// Monte Carlo estimate of `V_b(x)` discounted at the configured `q`;
/// `b = INFINITY` means no barrier.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn divbar_simulate_dividends(
    model: *const DivbarModel,
    b: f64,
    x: f64,
    replications: usize,
    dt: f64,
    seed: u64,
    out: *mut DivbarSimulation,
) -> DivbarStatus {
    guard(|| {
        let m = get(model, "model")?;
        let cfg = SimulationConfig::new(m.config.control.q, replications, dt, seed);
        cfg.validate()?;
        let r = simulate_dividends(&m.model, b, x, &cfg)?;
        put(
            out,
            DivbarSimulation {
                estimate: r.estimate,
                std_error: r.std_error,
                ruin_probability: r.ruin_probability,
                paths: r.paths,
                horizon: r.horizon,
            },
            "out",
        )
    })
}

/// `P(N_t = n)` for the claim-counting process.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn divbar_counting_pmf(
    model: *const DivbarModel,
    t: f64,
    n: usize,
    out: *mut f64,
) -> DivbarStatus {
    guard(|| {
        let m = &get(model, "model")?.model;
        put(out, counting_pmf(m.compounder(), m.lambda(), t, n)?, "out")
    })
}
