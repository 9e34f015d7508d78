//! In-place amplitude kernels. Callers guarantee wire validity.

use super::{Mat2, Mat4, C64};

/// Visit every index whose bit `q` is clear.
#[inline]
fn for_each_pair(len: usize, q: usize, mut f: impl FnMut(usize, usize)) {
    let stride = 1usize << q;
    let mut base = 0;
    while base < len {
        for i in base..base + stride {
            f(i, i + stride);
        }
        base += stride << 1;
    }
}

/// Visit every index with both bits `a` and `b` clear (`a != b`).
#[inline]
fn for_each_quad(len: usize, a: usize, b: usize, mut f: impl FnMut(usize)) {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let lo_s = 1usize << lo;
    let hi_s = 1usize << hi;
    let mut h = 0;
    while h < len {
        let mut m = h;
        while m < h + hi_s {
            for i in m..m + lo_s {
                f(i);
            }
            m += lo_s << 1;
        }
        h += hi_s << 1;
    }
}

pub fn apply_1q(amps: &mut [C64], q: usize, m: &Mat2) {
    let [[a, b], [c, d]] = *m;
    for_each_pair(amps.len(), q, |i, j| {
        let (x, y) = (amps[i], amps[j]);
        amps[i] = a * x + b * y;
        amps[j] = c * x + d * y;
    });
}

pub fn apply_diag_1q(amps: &mut [C64], q: usize, d0: C64, d1: C64) {
    for_each_pair(amps.len(), q, |i, j| {
        amps[i] *= d0;
        amps[j] *= d1;
    });
}

pub fn apply_controlled_1q(amps: &mut [C64], control: usize, target: usize, m: &Mat2) {
    let [[a, b], [c, d]] = *m;
    let cbit = 1usize << control;
    let tbit = 1usize << target;
    for_each_quad(amps.len(), control, target, |i| {
        let (i, j) = (i | cbit, i | cbit | tbit);
        let (x, y) = (amps[i], amps[j]);
        amps[i] = a * x + b * y;
        amps[j] = c * x + d * y;
    });
}

pub fn apply_controlled_diag(amps: &mut [C64], control: usize, target: usize, d0: C64, d1: C64) {
    let cbit = 1usize << control;
    let tbit = 1usize << target;
    for_each_quad(amps.len(), control, target, |i| {
        amps[i | cbit] *= d0;
        amps[i | cbit | tbit] *= d1;
    });
}

/// Multiply by `even` where bits `a` and `b` agree, `odd` otherwise.
pub fn apply_parity_phase(amps: &mut [C64], a: usize, b: usize, even: C64, odd: C64) {
    let abit = 1usize << a;
    let bbit = 1usize << b;
    for_each_quad(amps.len(), a, b, |i| {
        amps[i] *= even;
        amps[i | abit] *= odd;
        amps[i | bbit] *= odd;
        amps[i | abit | bbit] *= even;
    });
}

/// Local index is `bit(w0) + 2·bit(w1)`.
pub fn apply_mat4(amps: &mut [C64], w0: usize, w1: usize, m: &Mat4) {
    let b0 = 1usize << w0;
    let b1 = 1usize << w1;
    for_each_quad(amps.len(), w0, w1, |i| {
        let idx = [i, i | b0, i | b1, i | b0 | b1];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &k) in idx.iter().enumerate() {
            let row = &m[r];
            amps[k] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
    });
}

/// `M[a][c] = Σ_rest conj(bra[a, rest]) · ket[c, rest]` over the wire pair,
/// so that `⟨bra| (A ⊗ I) |ket⟩ = Σ A[a][c] · M[a][c]`.
pub fn pair_overlap(bra: &[C64], ket: &[C64], w0: usize, w1: usize) -> Mat4 {
    let b0 = 1usize << w0;
    let b1 = 1usize << w1;
    let mut m = [[C64::ZERO; 4]; 4];
    for_each_quad(bra.len(), w0, w1, |i| {
        let idx = [i, i | b0, i | b1, i | b0 | b1];
        let l = [bra[idx[0]].conj(), bra[idx[1]].conj(), bra[idx[2]].conj(), bra[idx[3]].conj()];
        let k = [ket[idx[0]], ket[idx[1]], ket[idx[2]], ket[idx[3]]];
        for a in 0..4 {
            for c in 0..4 {
                m[a][c] += l[a] * k[c];
            }
        }
    });
    m
}

/// `Σ conj(a_i) b_i`.
pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    let mut acc = C64::ZERO;
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * y;
    }
    acc
}

/// Probability mass where bit `q` is set.
pub fn prob_one(amps: &[C64], q: usize) -> f64 {
    let mut p = 0.0;
    for_each_pair(amps.len(), q, |_, j| p += amps[j].norm_sqr());
    p
}

/// Zero out amplitudes where bit `q` is clear (projector onto `|1⟩_q`).
pub fn project_one(amps: &mut [C64], q: usize) {
    for_each_pair(amps.len(), q, |i, _| amps[i] = C64::ZERO);
}

pub fn dagger4(m: &Mat4) -> Mat4 {
    let mut out = [[C64::ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = m[c][r].conj();
        }
    }
    out
}

pub fn matmul4(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[C64::ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let mut acc = C64::ZERO;
            for k in 0..4 {
                acc += a[r][k] * b[k][c];
            }
            out[r][c] = acc;
        }
    }
    out
}

pub fn identity4() -> Mat4 {
    let mut m = [[C64::ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = C64::ONE;
    }
    m
}
