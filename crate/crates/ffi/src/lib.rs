//! C ABI for the continet planner.
//!
//! Objects are opaque handles: create them with the `*_default`, `*_parse`,
//! `*_load`, `*_run` or `*_find` functions and release each with its `*_free`.
//! Fallible calls return a [`ContinetStatus`]; the message of the most recent
//! failure on the calling thread is available from [`continet_last_error`].
//! Every `char *` handed out through an out-parameter belongs to the caller and
//! must be released with [`continet_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use continet::aco::RouteResult;
use continet::dataset::GeoPoint;
use continet::gateways::select_pcgs;
use continet::metrics::haversine;
use continet::pipeline::{
    assignments_csv, costs_csv, geojson, plan_jobs, routes_csv, run_plan, traversals_csv,
    write_outputs, ContinentalPlan, Inputs, JobKind, RunConfig,
};
use continet::Error;

/// Result of a fallible call. The first codes match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinetStatus {
    Ok = 0,
    /// Bad input data, configuration or parameter.
    Validation = 1,
    /// A route could not be found.
    Routing = 2,
    Io = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    OutOfRange = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// CSV tables a plan can render.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinetTable {
    Assignments = 0,
    Routes = 1,
    Traversals = 2,
    Costs = 3,
}

/// Headline costs of a plan.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ContinetTotals {
    pub intra_total: f64,
    pub inter_total: f64,
    pub continental_total: f64,
    /// Only meaningful when `has_unclustered` is set.
    pub unclustered_total: f64,
    pub has_unclustered: bool,
    pub clusters: usize,
    pub jobs: usize,
    pub hops: usize,
}

/// Loaded country, cable and adjacency tables.
pub struct ContinetInputs(Inputs);

/// A run configuration.
pub struct ContinetConfig(RunConfig);

/// The result of a full pipeline run.
pub struct ContinetPlan(ContinentalPlan);

/// One computed route; node names are owned by the handle.
pub struct ContinetRoute {
    result: RouteResult,
    nodes: Vec<CString>,
}

impl ContinetRoute {
    fn new(result: RouteResult) -> Self {
        let nodes = result
            .path
            .iter()
            .map(|n| CString::new(n.as_str()).unwrap_or_default())
            .collect();
        ContinetRoute { result, nodes }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Core(Error),
    Null(&'static str),
    Utf8(&'static str),
    Range(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn status(&self) -> ContinetStatus {
        match self {
            Failure::Core(e) => match e.exit_code() {
                2 => ContinetStatus::Routing,
                3 => ContinetStatus::Io,
                _ => ContinetStatus::Validation,
            },
            Failure::Null(_) => ContinetStatus::NullPointer,
            Failure::Utf8(_) => ContinetStatus::InvalidUtf8,
            Failure::Range(_) => ContinetStatus::OutOfRange,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Null(what) => format!("`{what}` is null"),
            Failure::Utf8(what) => format!("`{what}` is not valid UTF-8"),
            Failure::Range(m) => m.clone(),
        }
    }
}

/// Runs `f`, turning failures and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ContinetStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ContinetStatus::Ok,
        Ok(Err(failure)) => {
            set_last_error(failure.message());
            failure.status()
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            ContinetStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn borrow_mut<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    let slot = borrow_mut(out, "out")?;
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let slot = borrow_mut(out, "out")?;
    let c = CString::new(s).map_err(|_| Failure::Range("string contains a NUL byte".into()))?;
    *slot = c.into_raw();
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn continet_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn continet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Great-circle distance in km; NaN when a coordinate is out of range.
#[no_mangle]
pub extern "C" fn continet_haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    match (GeoPoint::new(lat1, lon1), GeoPoint::new(lat2, lon2)) {
        (Ok(a), Ok(b)) => haversine(a, b),
        _ => f64::NAN,
    }
}

/// The default configuration: AU regions over the bundled tables.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn continet_config_default(out: *mut *mut ContinetConfig) -> ContinetStatus {
    guard(|| put(out, ContinetConfig(RunConfig::default())))
}

/// Parses configuration text (`key = value` lines). Relative paths in it are
/// taken relative to the working directory.
///
/// # Safety
/// `config_text` must be a NUL-terminated string; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn continet_config_parse(
    config_text: *const c_char,
    out: *mut *mut ContinetConfig,
) -> ContinetStatus {
    guard(|| {
        let cfg = RunConfig::parse(text(config_text, "config_text")?, "config")?;
        cfg.validate()?;
        put(out, ContinetConfig(cfg))
    })
}

/// Reads a configuration file; relative paths resolve against its directory.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn continet_config_load(
    path: *const c_char,
    out: *mut *mut ContinetConfig,
) -> ContinetStatus {
    guard(|| {
        let cfg = RunConfig::from_path(Path::new(text(path, "path")?))?;
        cfg.validate()?;
        put(out, ContinetConfig(cfg))
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn continet_config_set_seed(config: *mut ContinetConfig, seed: u64) -> ContinetStatus {
    guard(|| {
        borrow_mut(config, "config")?.0.seed = seed;
        Ok(())
    })
}

/// Evaluates the ants of an iteration concurrently.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn continet_config_set_parallel(
    config: *mut ContinetConfig,
    parallel: bool,
) -> ContinetStatus {
    guard(|| {
        borrow_mut(config, "config")?.0.aco.parallel = parallel;
        Ok(())
    })
}

/// Canonical text form of the configuration.
///
/// # Safety
/// `config` must be a live handle; `out` a valid string slot.
#[no_mangle]
pub unsafe extern "C" fn continet_config_to_text(
    config: *const ContinetConfig,
    out: *mut *mut c_char,
) -> ContinetStatus {
    guard(|| put_string(out, borrow(config, "config")?.0.to_text()))
}

/// # Safety
/// `config` must be NULL or a handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn continet_config_free(config: *mut ContinetConfig) {
    free(config)
}

/// The bundled reference tables.
///
/// # Safety
/// `out` must be a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn continet_inputs_reference(out: *mut *mut ContinetInputs) -> ContinetStatus {
    guard(|| put(out, ContinetInputs(Inputs::reference())))
}

/// Loads the tables named by `config` (bundled ones where it names none).
///
/// # Safety
/// `config` must be a live handle; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn continet_inputs_load(
    config: *const ContinetConfig,
    out: *mut *mut ContinetInputs,
) -> ContinetStatus {
    guard(|| {
        let inputs = Inputs::load(&borrow(config, "config")?.0)?;
        put(out, ContinetInputs(inputs))
    })
}

/// Number of countries, or 0 for NULL.
///
/// # Safety
/// `inputs` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn continet_inputs_country_count(inputs: *const ContinetInputs) -> usize {
    inputs.as_ref().map_or(0, |i| i.0.dataset.len())
}

/// Countries with at least `threshold` cable landings, as
/// `country_id,landings` CSV.
///
/// # Safety
/// `inputs` must be a live handle; `out` a valid string slot.
#[no_mangle]
pub unsafe extern "C" fn continet_inputs_pcgs(
    inputs: *const ContinetInputs,
    threshold: u32,
    out: *mut *mut c_char,
) -> ContinetStatus {
    guard(|| {
        let landings = borrow(inputs, "inputs")?.0.dataset.landings();
        let mut csv = String::from("country_id,landings\n");
        for id in select_pcgs(&landings, threshold) {
            csv.push_str(&format!("{id},{}\n", landings[&id]));
        }
        put_string(out, csv)
    })
}

/// # Safety
/// `inputs` must be NULL or a handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn continet_inputs_free(inputs: *mut ContinetInputs) {
    free(inputs)
}

/// Runs the whole pipeline.
///
/// # Safety
/// `config` and `inputs` must be live handles; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn continet_plan_run(
    config: *const ContinetConfig,
    inputs: *const ContinetInputs,
    out: *mut *mut ContinetPlan,
) -> ContinetStatus {
    guard(|| {
        let plan = run_plan(&borrow(config, "config")?.0, &borrow(inputs, "inputs")?.0)?;
        put(out, ContinetPlan(plan))
    })
}

/// # Safety
/// `plan` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn continet_plan_totals(
    plan: *const ContinetPlan,
    out: *mut ContinetTotals,
) -> ContinetStatus {
    guard(|| {
        let p = &borrow(plan, "plan")?.0;
        let s = &p.summary;
        *borrow_mut(out, "out")? = ContinetTotals {
            intra_total: s.intra_total,
            inter_total: s.inter_total,
            continental_total: s.continental_total,
            unclustered_total: s.unclustered_total.unwrap_or(f64::NAN),
            has_unclustered: s.unclustered_total.is_some(),
            clusters: p.clusters.len(),
            jobs: p.jobs.len(),
            hops: p.total_hops(),
        };
        Ok(())
    })
}

/// Label, member count and traversal cost of cluster `index`. Any of the
/// out-parameters may be NULL.
///
/// # Safety
/// `plan` must be a live handle; non-NULL out-parameters must be valid.
#[no_mangle]
pub unsafe extern "C" fn continet_plan_cluster(
    plan: *const ContinetPlan,
    index: usize,
    label: *mut *mut c_char,
    members: *mut usize,
    cost: *mut f64,
) -> ContinetStatus {
    guard(|| {
        let p = &borrow(plan, "plan")?.0;
        let (l, n, c) = p.summary.per_cluster.get(index).ok_or_else(|| {
            Failure::Range(format!("cluster {index} of {}", p.summary.per_cluster.len()))
        })?;
        if !label.is_null() {
            put_string(label, l.clone())?;
        }
        if let Some(m) = members.as_mut() {
            *m = *n;
        }
        if let Some(x) = cost.as_mut() {
            *x = *c;
        }
        Ok(())
    })
}

/// Renders one of the plan's CSV tables.
///
/// # Safety
/// `plan` must be a live handle; `out` a valid string slot.
#[no_mangle]
pub unsafe extern "C" fn continet_plan_csv(
    plan: *const ContinetPlan,
    table: ContinetTable,
    out: *mut *mut c_char,
) -> ContinetStatus {
    guard(|| {
        let p = &borrow(plan, "plan")?.0;
        let csv = match table {
            ContinetTable::Assignments => assignments_csv(p),
            ContinetTable::Routes => routes_csv(p),
            ContinetTable::Traversals => traversals_csv(p),
            ContinetTable::Costs => costs_csv(p),
        };
        put_string(out, csv)
    })
}

/// GeoJSON FeatureCollection of the plan.
///
/// # Safety
/// `plan` and `inputs` must be live handles; `out` a valid string slot.
#[no_mangle]
pub unsafe extern "C" fn continet_plan_geojson(
    plan: *const ContinetPlan,
    inputs: *const ContinetInputs,
    out: *mut *mut c_char,
) -> ContinetStatus {
    guard(|| {
        let v = geojson(&borrow(plan, "plan")?.0, &borrow(inputs, "inputs")?.0.dataset)?;
        put_string(out, v.to_string())
    })
}

/// Writes every export plus `manifest.json` into `dir`.
///
/// # Safety
/// Handles must be live; `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn continet_plan_write(
    plan: *const ContinetPlan,
    config: *const ContinetConfig,
    inputs: *const ContinetInputs,
    dir: *const c_char,
) -> ContinetStatus {
    guard(|| {
        write_outputs(
            &borrow(plan, "plan")?.0,
            &borrow(config, "config")?.0,
            &borrow(inputs, "inputs")?.0,
            Path::new(text(dir, "dir")?),
        )?;
        Ok(())
    })
}

/// # Safety
/// `plan` must be NULL or a handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn continet_plan_free(plan: *mut ContinetPlan) {
    free(plan)
}

/// Routes `source` to a gateway of its own cluster, exactly as the plan
/// would, without running the other jobs.
///
/// # Safety
/// Handles must be live; `source` a NUL-terminated string; `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn continet_route_find(
    config: *const ContinetConfig,
    inputs: *const ContinetInputs,
    source: *const c_char,
    out: *mut *mut ContinetRoute,
) -> ContinetStatus {
    guard(|| {
        let cfg = &borrow(config, "config")?.0;
        let inputs = &borrow(inputs, "inputs")?.0;
        let source = text(source, "source")?;
        let (_, _, jobs) = plan_jobs(cfg, inputs)?;
        let job = jobs
            .iter()
            .find(|j| j.kind == JobKind::Intra && j.source.as_deref() == Some(source))
            .ok_or_else(|| Failure::Core(Error::UnknownId(source.to_string())))?;
        let result = job.run(inputs).map_err(|e| e.in_stage("routing"))?;
        put(out, ContinetRoute::new(result))
    })
}

/// Total route cost, or NaN for NULL.
///
/// # Safety
/// `route` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn continet_route_trc(route: *const ContinetRoute) -> f64 {
    route.as_ref().map_or(f64::NAN, |r| r.result.trc)
}

/// Number of nodes on the path, or 0 for NULL.
///
/// # Safety
/// `route` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn continet_route_len(route: *const ContinetRoute) -> usize {
    route.as_ref().map_or(0, |r| r.nodes.len())
}

/// Node `index` of the path, or NULL when out of range. The string is owned
/// by the route and lives until the route is freed.
///
/// # Safety
/// `route` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn continet_route_node(route: *const ContinetRoute, index: usize) -> *const c_char {
    route
        .as_ref()
        .and_then(|r| r.nodes.get(index))
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// # Safety
/// `route` must be NULL or a handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn continet_route_free(route: *mut ContinetRoute) {
    free(route)
}
