//! Reference modular data: affine su(2) at level k, unitary Virasoro minimal
//! models and pointed cyclic categories.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::modular::{CMatrix, ModularData, C64};

fn phase(x: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * x)
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Kac-Peterson data for affine su(2) at level `k`; labels `0..=k`.
pub fn su2_level(k: i64) -> Result<ModularData> {
    if k < 0 {
        return Err(Error::InvalidParameters(format!("level {k} is negative")));
    }
    let n = (k + 1) as usize;
    let kk = (k + 2) as f64;
    let norm = (2.0 / kk).sqrt();
    let s = CMatrix::from_fn(n, n, |a, b| {
        C64::new(norm * (PI * ((a + 1) * (b + 1)) as f64 / kk).sin(), 0.0)
    });
    let twists = (0..n)
        .map(|a| phase((a * (a + 2)) as f64 / (4.0 * kk)))
        .collect();
    let labels = (0..n).map(|a| a.to_string()).collect();
    ModularData::new(format!("su2_{k}"), labels, s, twists)
}

/// Kac-table representatives `(r,s)`, `1 <= r < p`, `1 <= s < q`, modulo
/// `(r,s) ~ (p-r, q-s)`, keeping the lexicographically smaller one.
pub fn kac_labels(p: i64, q: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for r in 1..p {
        for s in 1..q {
            let rep = (r, s).min((p - r, q - s));
            if !out.contains(&rep) {
                out.push(rep);
            }
        }
    }
    out.sort();
    out
}

/// Conformal weight `h_{r,s} = ((qr - ps)^2 - (p-q)^2) / (4pq)`.
pub fn kac_weight(p: i64, q: i64, r: i64, s: i64) -> f64 {
    (((q * r - p * s).pow(2) - (p - q).pow(2)) as f64) / ((4 * p * q) as f64)
}

/// Unitary Virasoro minimal model `M(p, q)` with `q = p + 1`.
///
/// Labels are Kac-table representatives written `(r,s)`. The first row of S is positive.
pub fn minimal_model(p: i64, q: i64) -> Result<ModularData> {
    if p < 2 || q <= p {
        return Err(Error::InvalidParameters(format!(
            "minimal model needs 2 <= p < q, got ({p},{q})"
        )));
    }
    if gcd(p, q) != 1 {
        return Err(Error::InvalidParameters(format!("({p},{q}) are not coprime")));
    }
    if q != p + 1 {
        return Err(Error::InvalidParameters(format!(
            "M({p},{q}) is not unitary, so its S-matrix has no positive first row"
        )));
    }
    let labels = kac_labels(p, q);
    let n = labels.len();
    let (pf, qf) = (p as f64, q as f64);
    let norm = 2.0 * 2f64.sqrt() / (pf * qf).sqrt();
    let mut s = CMatrix::from_fn(n, n, |i, j| {
        let (r, s) = labels[i];
        let (rho, sigma) = labels[j];
        let sign = if (1 + s * rho + r * sigma) % 2 == 0 { 1.0 } else { -1.0 };
        let v = norm
            * sign
            * (PI * qf / pf * (r * rho) as f64).sin()
            * (PI * pf / qf * (s * sigma) as f64).sin();
        C64::new(v, 0.0)
    });
    if s[(0, 0)].re < 0.0 {
        s = -s;
    }
    let twists = labels
        .iter()
        .map(|&(r, s)| phase(kac_weight(p, q, r, s)))
        .collect();
    let names = labels.iter().map(|(r, s)| format!("({r},{s})")).collect();
    ModularData::new(format!("M({p},{q})"), names, s, twists)
}

/// Pointed data on `Z_n` with `θ_j = exp(πi t j²/n)`, `s_jk = n^{-1/2} exp(2πi t jk/n)`.
///
/// Requires `gcd(n, t) = 1` (nondegenerate pairing) and `n t` even (twists
/// well defined modulo `n`).
pub fn pointed_cyclic(n: i64, t: i64) -> Result<ModularData> {
    if n < 1 {
        return Err(Error::InvalidParameters(format!("n = {n} must be positive")));
    }
    if gcd(n, t) != 1 {
        return Err(Error::InvalidParameters(format!(
            "degenerate pairing: gcd({n}, {t}) != 1"
        )));
    }
    if (n * t) % 2 != 0 {
        return Err(Error::InvalidParameters(format!(
            "degenerate form: n t = {} is odd, so the twist is not defined modulo {n}",
            n * t
        )));
    }
    let size = n as usize;
    let nf = n as f64;
    let norm = 1.0 / nf.sqrt();
    let s = CMatrix::from_fn(size, size, |j, k| {
        phase((t * (j * k) as i64).rem_euclid(n) as f64 / nf) * norm
    });
    let twists = (0..size)
        .map(|j| phase((t * (j * j) as i64).rem_euclid(2 * n) as f64 / (2.0 * nf)))
        .collect();
    let labels = (0..size).map(|j| j.to_string()).collect();
    ModularData::new(format!("Z{n}_{t}"), labels, s, twists)
}
