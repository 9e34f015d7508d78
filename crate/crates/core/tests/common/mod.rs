//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use qmlbench::linalg::Matrix;
use qmlbench::rng;
use qmlbench::sim::{Gate, GateKind};

pub type C = Complex<f64>;

fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

fn pauli(name: char) -> DMatrix<C> {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match name {
        'I' => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => unreachable!(),
    }
}

/// exp(−iθP/2) for a Pauli matrix P.
fn rot(p: &DMatrix<C>, theta: f64) -> DMatrix<C> {
    let (s, co) = (theta / 2.0).sin_cos();
    pauli('I') * c(co, 0.0) - p * c(0.0, s)
}

fn projector(bit: usize) -> DMatrix<C> {
    let mut m = DMatrix::zeros(2, 2);
    m[(bit, bit)] = c(1.0, 0.0);
    m
}

/// Kronecker chain over `n` wires with qubit 0 as the least significant
/// factor; wires absent from `ops` get the identity.
fn chain(n: usize, ops: &[(usize, DMatrix<C>)]) -> DMatrix<C> {
    let mut out = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for q in (0..n).rev() {
        let f = ops
            .iter()
            .find(|(w, _)| *w == q)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| pauli('I'));
        out = out.kronecker(&f);
    }
    out
}

fn single(kind: GateKind, p: &[f64]) -> DMatrix<C> {
    match kind {
        GateKind::H => (pauli('X') + pauli('Z')) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        GateKind::RX | GateKind::CRX => rot(&pauli('X'), p[0]),
        GateKind::RY => rot(&pauli('Y'), p[0]),
        GateKind::RZ | GateKind::CRZ => rot(&pauli('Z'), p[0]),
        GateKind::U3 => {
            // RZ(φ)·RY(θ)·RZ(λ) with the global phase that makes the top-left entry real
            let m = rot(&pauli('Z'), p[1]) * rot(&pauli('Y'), p[0]) * rot(&pauli('Z'), p[2]);
            m * C::from_polar(1.0, (p[1] + p[2]) / 2.0)
        }
        GateKind::CNOT => pauli('X'),
        GateKind::CZ => pauli('Z'),
        GateKind::MultiRZ => unreachable!(),
    }
}

/// Full `2^n × 2^n` unitary of one gate.
pub fn dense_gate(n: usize, gate: &Gate) -> DMatrix<C> {
    let w = &gate.wires;
    match gate.kind {
        GateKind::MultiRZ => {
            let (s, co) = (gate.params[0] / 2.0).sin_cos();
            let zz = chain(n, &[(w[0], pauli('Z')), (w[1], pauli('Z'))]);
            chain(n, &[]) * c(co, 0.0) - zz * c(0.0, s)
        }
        k if k.is_controlled() => {
            let u = single(k, &gate.params);
            chain(n, &[(w[0], projector(0))]) + chain(n, &[(w[0], projector(1)), (w[1], u)])
        }
        k => chain(n, &[(w[0], single(k, &gate.params))]),
    }
}

/// Apply a circuit to |0…0⟩ by dense matrix products.
pub fn dense_run(n: usize, gates: &[Gate]) -> DVector<C> {
    let mut u = chain(n, &[]);
    for g in gates {
        u = dense_gate(n, g) * u;
    }
    u.column(0).into_owned()
}

pub fn random_gate(n: usize, r: &mut impl Rng) -> Gate {
    let kinds: Vec<GateKind> = [
        GateKind::H,
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::U3,
        GateKind::CNOT,
        GateKind::CZ,
        GateKind::CRX,
        GateKind::CRZ,
        GateKind::MultiRZ,
    ]
    .into_iter()
    .filter(|k| k.wire_count() <= n)
    .collect();
    let kind = kinds[r.random_range(0..kinds.len())];
    let params: Vec<f64> = (0..kind.param_arity())
        .map(|_| r.random_range(-std::f64::consts::PI..std::f64::consts::PI) * 2.0)
        .collect();
    let a = r.random_range(0..n);
    let wires = if kind.wire_count() == 2 {
        let mut b = r.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        vec![a, b]
    } else {
        vec![a]
    };
    Gate::new(kind, &params, &wires).unwrap()
}

/// Maximum of the SVM dual `Σα − ½ αᵀQα` over `0 ≤ α ≤ C`, `yᵀα = 0`,
/// found by enumerating every assignment of each α to {0, C, free} and
/// solving the equality-constrained stationarity system on the free set.
pub fn brute_force_dual(k: &Matrix, y: &[i8], cap: f64) -> f64 {
    let m = y.len();
    assert!(m <= 8, "brute force is exponential in the sample count");
    let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
    let q = DMatrix::from_fn(m, m, |i, j| yf[i] * yf[j] * k[(i, j)]);
    let objective = |a: &DVector<f64>| a.sum() - 0.5 * (a.transpose() * &q * a)[(0, 0)];
    let mut best = 0.0f64;
    let faces = 3usize.pow(m as u32);
    for code in 0..faces {
        let mut state = vec![0u8; m];
        let mut c0 = code;
        for s in state.iter_mut() {
            *s = (c0 % 3) as u8;
            c0 /= 3;
        }
        let free: Vec<usize> = (0..m).filter(|&i| state[i] == 2).collect();
        let mut alpha = DVector::from_fn(m, |i, _| if state[i] == 1 { cap } else { 0.0 });
        if !free.is_empty() {
            let f = free.len();
            let mut lhs = DMatrix::zeros(f + 1, f + 1);
            let mut rhs = DVector::zeros(f + 1);
            let qa = &q * &alpha;
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    lhs[(r, s)] = q[(i, j)];
                }
                lhs[(r, f)] = yf[i];
                lhs[(f, r)] = yf[i];
                rhs[r] = 1.0 - qa[i];
            }
            rhs[f] = -(0..m).map(|i| yf[i] * alpha[i]).sum::<f64>();
            let svd = lhs.clone().svd(true, true);
            let Ok(sol) = svd.solve(&rhs, 1e-12) else {
                continue;
            };
            // singular systems may be inconsistent; skip those faces
            if (&lhs * &sol - &rhs).amax() > 1e-9 {
                continue;
            }
            for (r, &i) in free.iter().enumerate() {
                alpha[i] = sol[r];
            }
        }
        let feasible = alpha.iter().all(|&a| (-1e-12..=cap + 1e-12).contains(&a))
            && (0..m).map(|i| yf[i] * alpha[i]).sum::<f64>().abs() < 1e-9;
        if feasible {
            best = best.max(objective(&alpha));
        }
    }
    best
}

/// Two well-separated Gaussian blobs in 16 dimensions, `per` rows each.
pub fn two_clusters(per: usize, seed: u64) -> Matrix {
    let mut r = rng::seeded(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut rows = Vec::new();
    for cl in 0..2 {
        for _ in 0..per {
            rows.push((0..16).map(|_| 10.0 * cl as f64 + normal.sample(&mut r)).collect::<Vec<f64>>());
        }
    }
    Matrix::from_rows(&rows).unwrap()
}

pub fn random_matrix(rows: usize, cols: usize, r: &mut impl Rng) -> Matrix {
    let data = (0..rows * cols).map(|_| r.random_range(-2.0..2.0)).collect();
    Matrix::new(rows, cols, data).unwrap()
}

pub fn to_nalgebra(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}
