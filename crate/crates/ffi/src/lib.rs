//! C ABI over the core library.
//!
//! Every fallible call returns a [`QmbStatus`]; on failure the message is
//! available from [`qmb_last_error`] on the same thread. Objects are opaque
//! handles released with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use qmlbench::embedding::{embed, EmbeddingKind, EmbeddingSpec};
use qmlbench::harness::{metrics, run_suite, write_outputs, RunOptions, Suite};
use qmlbench::kernel::{self, KernelConfig, KernelParams};
use qmlbench::linalg::Matrix;
use qmlbench::qnn::{self, AnsatzKind, QnnConfig, QnnParams};
use qmlbench::sim::{Gate, GateKind, StateVector, C64};
use qmlbench::svm::{self, SvcModel, SvcSettings};
use qmlbench::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmbStatus {
    Ok = 0,
    Config = 1,
    Dimension = 2,
    Gate = 3,
    Normalization = 4,
    Usage = 5,
    Convergence = 6,
    Parse = 7,
    Io = 8,
    NullPointer = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmbEmbedding {
    AngleX = 0,
    AngleY = 1,
    AngleZ = 2,
    Amplitude = 3,
    Iqp = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmbGate {
    H = 0,
    Rx = 1,
    Ry = 2,
    Rz = 3,
    U3 = 4,
    Cnot = 5,
    Cz = 6,
    Crx = 7,
    Crz = 8,
    MultiRz = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmbMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Opaque statevector.
pub struct QmbState(StateVector);

/// Opaque QNN circuit configuration.
pub struct QmbQnn(QnnConfig);

/// Opaque fitted SVC.
pub struct QmbSvc(SvcModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> QmbStatus {
    match err {
        Error::Config(_) => QmbStatus::Config,
        Error::Dimension { .. } => QmbStatus::Dimension,
        Error::Gate(_) => QmbStatus::Gate,
        Error::Normalization(_) => QmbStatus::Normalization,
        Error::Usage(_) => QmbStatus::Usage,
        Error::Convergence { .. } => QmbStatus::Convergence,
        Error::Parse { .. } | Error::Json(_) | Error::Csv(_) => QmbStatus::Parse,
        Error::Io(_) => QmbStatus::Io,
        Error::Stage { source, .. } | Error::Experiment { source, .. } => status_of(source),
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QmbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QmbStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer passed for {what}"));
            QmbStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic".into());
            QmbStatus::Panic
        }
    }
}

unsafe fn slice_in<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn slice_out<'a, T>(p: *mut T, len: usize, what: &'static str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn str_in<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Lib(Error::Usage(format!("{what} is not valid UTF-8"))))
}

unsafe fn matrix_in(p: *const f64, rows: usize, cols: usize, what: &'static str) -> Result<Matrix, Fail> {
    Ok(Matrix::new(rows, cols, slice_in(p, rows * cols, what)?.to_vec())?)
}

fn embedding_kind(e: QmbEmbedding) -> EmbeddingKind {
    match e {
        QmbEmbedding::AngleX => EmbeddingKind::AngleX,
        QmbEmbedding::AngleY => EmbeddingKind::AngleY,
        QmbEmbedding::AngleZ => EmbeddingKind::AngleZ,
        QmbEmbedding::Amplitude => EmbeddingKind::Amplitude,
        QmbEmbedding::Iqp => EmbeddingKind::Iqp,
    }
}

fn gate_kind(g: QmbGate) -> GateKind {
    match g {
        QmbGate::H => GateKind::H,
        QmbGate::Rx => GateKind::RX,
        QmbGate::Ry => GateKind::RY,
        QmbGate::Rz => GateKind::RZ,
        QmbGate::U3 => GateKind::U3,
        QmbGate::Cnot => GateKind::CNOT,
        QmbGate::Cz => GateKind::CZ,
        QmbGate::Crx => GateKind::CRX,
        QmbGate::Crz => GateKind::CRZ,
        QmbGate::MultiRz => GateKind::MultiRZ,
    }
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length, or 0 when no
/// error has been recorded.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null when `len` is 0.
#[no_mangle]
pub unsafe extern "C" fn qmb_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// New `|0…0⟩` register.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn qmb_state_new(n_qubits: usize, out: *mut *mut QmbState) -> QmbStatus {
    guard(|| {
        let slot = out_ptr(out, "out")?;
        *slot = Box::into_raw(Box::new(QmbState(StateVector::zero(n_qubits)?)));
        Ok(())
    })
}

/// Encode `x` (length `len`) into a new register.
///
/// # Safety
/// `x` must point to `len` doubles; `out` must be a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn qmb_embed(
    kind: QmbEmbedding,
    iqp_repeats: usize,
    x: *const f64,
    len: usize,
    n_qubits: usize,
    out: *mut *mut QmbState,
) -> QmbStatus {
    guard(|| {
        let slot = out_ptr(out, "out")?;
        let mut spec = EmbeddingSpec::new(embedding_kind(kind));
        if kind == QmbEmbedding::Iqp {
            spec.iqp_repeats = iqp_repeats;
        }
        let state = embed(slice_in(x, len, "x")?, n_qubits, &spec)?;
        *slot = Box::into_raw(Box::new(QmbState(state)));
        Ok(())
    })
}

/// Apply one gate. `params` holds the gate's angles, `wires` its qubits
/// (control first for controlled gates).
///
/// # Safety
/// `state` must be a live handle; `params`/`wires` must hold the given counts.
#[no_mangle]
pub unsafe extern "C" fn qmb_state_apply(
    state: *mut QmbState,
    gate: QmbGate,
    params: *const f64,
    n_params: usize,
    wires: *const usize,
    n_wires: usize,
) -> QmbStatus {
    guard(|| {
        let s = out_ptr(state, "state")?;
        let g = Gate::new(
            gate_kind(gate),
            slice_in(params, n_params, "params")?,
            slice_in(wires, n_wires, "wires")?,
        )?;
        s.0.apply(&g)?;
        Ok(())
    })
}

/// Number of amplitudes (`2^n`) of a register, or 0 for a null handle.
///
/// # Safety
/// `state` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qmb_state_dim(state: *const QmbState) -> usize {
    state.as_ref().map_or(0, |s| s.0.amplitudes().len())
}

/// Write real and imaginary parts of every amplitude.
///
/// # Safety
/// `re` and `im` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qmb_state_amplitudes(
    state: *const QmbState,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> QmbStatus {
    guard(|| {
        let s = state.as_ref().ok_or(Fail::Null("state"))?;
        let amps: &[C64] = s.0.amplitudes();
        if len != amps.len() {
            return Err(Error::Dimension {
                expected: amps.len(),
                got: len,
                context: "amplitude buffer length".into(),
            }
            .into());
        }
        let (re, im) = (slice_out(re, len, "re")?, slice_out(im, len, "im")?);
        for (i, a) in amps.iter().enumerate() {
            re[i] = a.re;
            im[i] = a.im;
        }
        Ok(())
    })
}

/// Basis-state probabilities.
///
/// # Safety
/// `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qmb_state_probabilities(state: *const QmbState, out: *mut f64, len: usize) -> QmbStatus {
    guard(|| {
        let s = state.as_ref().ok_or(Fail::Null("state"))?;
        let p = s.0.probabilities();
        if len != p.len() {
            return Err(Error::Dimension {
                expected: p.len(),
                got: len,
                context: "probability buffer length".into(),
            }
            .into());
        }
        slice_out(out, len, "out")?.copy_from_slice(&p);
        Ok(())
    })
}

/// # Safety
/// `state` must be a handle from this library, or null. It is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn qmb_state_free(state: *mut QmbState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Build a QNN configuration. `ansatz` is a name such as `"u_su4"`.
///
/// # Safety
/// `ansatz` must be a NUL-terminated string; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn qmb_qnn_new(
    n_qubits: usize,
    ansatz: *const c_char,
    layers: usize,
    pooling: bool,
    embedding: QmbEmbedding,
    out: *mut *mut QmbQnn,
) -> QmbStatus {
    guard(|| {
        let slot = out_ptr(out, "out")?;
        let name = str_in(ansatz, "ansatz")?;
        let kind = AnsatzKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::Config(format!("unknown ansatz {name:?}")))?;
        let mut cfg = QnnConfig::new(n_qubits, kind, EmbeddingSpec::new(embedding_kind(embedding)));
        cfg.layers = layers;
        cfg.pooling = pooling;
        cfg.validate()?;
        *slot = Box::into_raw(Box::new(QmbQnn(cfg)));
        Ok(())
    })
}

/// Trainable parameter count, or 0 for a null handle.
///
/// # Safety
/// `qnn` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qmb_qnn_param_count(qnn: *const QmbQnn) -> usize {
    qnn.as_ref().map_or(0, |q| q.0.param_count())
}

/// `P(qubit 0 = 1)` for one input.
///
/// # Safety
/// `params` must hold `n_params` doubles, `x` `len` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qmb_qnn_forward(
    qnn: *const QmbQnn,
    params: *const f64,
    n_params: usize,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> QmbStatus {
    guard(|| {
        let q = qnn.as_ref().ok_or(Fail::Null("qnn"))?;
        let p = QnnParams::new(&q.0, slice_in(params, n_params, "params")?.to_vec())?;
        *out_ptr(out, "out")? = qnn::forward(&q.0, &p, slice_in(x, len, "x")?)?;
        Ok(())
    })
}

/// # Safety
/// `qnn` must be a handle from this library, or null.
#[no_mangle]
pub unsafe extern "C" fn qmb_qnn_free(qnn: *mut QmbQnn) {
    if !qnn.is_null() {
        drop(Box::from_raw(qnn));
    }
}

/// Fill `out` (`rows × rows`, row-major) with the fidelity-kernel Gram
/// matrix of `x` (`rows × cols`, row-major) for an untrained kernel.
///
/// # Safety
/// `x` must hold `rows·cols` doubles and `out` `rows·rows` doubles.
#[no_mangle]
pub unsafe extern "C" fn qmb_kernel_gram(
    n_qubits: usize,
    layers: usize,
    embedding: QmbEmbedding,
    x: *const f64,
    rows: usize,
    cols: usize,
    out: *mut f64,
) -> QmbStatus {
    guard(|| {
        let mut cfg = KernelConfig::new(n_qubits, EmbeddingSpec::new(embedding_kind(embedding)));
        cfg.layers = layers;
        let xm = matrix_in(x, rows, cols, "x")?;
        let k = kernel::gram(&cfg, &KernelParams::zeros(&cfg), &xm)?;
        slice_out(out, rows * rows, "out")?.copy_from_slice(k.data());
        Ok(())
    })
}

/// Fit an SVC on a precomputed `m × m` Gram matrix with labels ±1.
///
/// # Safety
/// `gram` must hold `m·m` doubles, `labels` `m` values; `out` a valid slot.
#[no_mangle]
pub unsafe extern "C" fn qmb_svc_fit(
    gram: *const f64,
    labels: *const i8,
    m: usize,
    c: f64,
    out: *mut *mut QmbSvc,
) -> QmbStatus {
    guard(|| {
        let slot = out_ptr(out, "out")?;
        let k = matrix_in(gram, m, m, "gram")?;
        let settings = SvcSettings {
            c,
            ..SvcSettings::default()
        };
        let model = svm::fit_precomputed(&k, slice_in(labels, m, "labels")?, &settings)?;
        *slot = Box::into_raw(Box::new(QmbSvc(model)));
        Ok(())
    })
}

/// Decision value from kernel values against the `m` training samples.
///
/// # Safety
/// `k_row` must hold `m` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qmb_svc_decision(svc: *const QmbSvc, k_row: *const f64, m: usize, out: *mut f64) -> QmbStatus {
    guard(|| {
        let s = svc.as_ref().ok_or(Fail::Null("svc"))?;
        *out_ptr(out, "out")? = s.0.decision_from_kernel_row(slice_in(k_row, m, "k_row")?)?;
        Ok(())
    })
}

/// Dual objective of the fitted model.
///
/// # Safety
/// `svc` must be a live handle or null (returns NaN).
#[no_mangle]
pub unsafe extern "C" fn qmb_svc_objective(svc: *const QmbSvc) -> f64 {
    svc.as_ref().map_or(f64::NAN, |s| s.0.objective)
}

/// # Safety
/// `svc` must be a handle from this library, or null.
#[no_mangle]
pub unsafe extern "C" fn qmb_svc_free(svc: *mut QmbSvc) {
    if !svc.is_null() {
        drop(Box::from_raw(svc));
    }
}

/// Accuracy, precision, recall and F1 with label 1 as positive.
///
/// # Safety
/// `pred` and `truth` must hold `len` bytes; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qmb_metrics(pred: *const u8, truth: *const u8, len: usize, out: *mut QmbMetrics) -> QmbStatus {
    guard(|| {
        let m = metrics(slice_in(pred, len, "pred")?, slice_in(truth, len, "truth")?)?;
        *out_ptr(out, "out")? = QmbMetrics {
            accuracy: m.accuracy,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
        };
        Ok(())
    })
}

/// Run a suite file and write result tables into `out_dir`. `repeats` of 0
/// keeps each experiment's own count.
///
/// # Safety
/// `suite_path` and `out_dir` must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn qmb_run_suite(
    suite_path: *const c_char,
    out_dir: *const c_char,
    seed: u64,
    repeats: usize,
    parallel: usize,
) -> QmbStatus {
    guard(|| {
        let suite = Suite::load(str_in(suite_path, "suite_path")?)?;
        let opts = RunOptions {
            repeats: (repeats > 0).then_some(repeats),
            parallel,
        };
        let reports = run_suite(&suite, seed, opts)?;
        write_outputs(&reports, seed, str_in(out_dir, "out_dir")?)?;
        Ok(())
    })
}
