//! Shared numerical kernels: finite-difference stencil weights on
//! arbitrary grids and adaptive Gauss-Legendre quadrature.

use crate::error::{Error, Result};
use crate::scalar::{fl, rf, Cx, RealScalar};
use nalgebra::ComplexField;
use std::sync::OnceLock;

/// Weights of the `m`-th derivative at `z` on the grid `x`
/// (Fornberg's recurrence; exact rational arithmetic is representable in
/// `f64` for the small integer offsets used here).
pub fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    assert!(n > m, "need more than m+1 grid points");
    let mut c = vec![vec![0.0f64; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

/// Symmetric integer offsets giving a 4th-order central stencil for the
/// `m`-th derivative.
pub fn central_offsets(m: usize) -> Vec<i64> {
    let p = ((m + 3) / 2) as i64;
    (-p..=p).collect()
}

/// Unit-spacing weights matching [`central_offsets`]; scale by `h^{-m}`.
pub fn central_weights(m: usize) -> (Vec<i64>, Vec<f64>) {
    let offsets = central_offsets(m);
    let xs: Vec<f64> = offsets.iter().map(|&o| o as f64).collect();
    let w = fornberg_weights(0.0, &xs, m);
    (offsets, w)
}

const GAUSS_POINTS: usize = 15;

fn gauss_legendre_nodes(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0f64, 0.0f64); n];
    let half = (n + 1) / 2;
    for i in 0..half {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = (((2 * j + 1) as f64) * x * p1 - (j as f64) * p2) / (j as f64 + 1.0);
            }
            dp = (n as f64) * (x * p0 - p1) / (x * x - 1.0);
            let dx = p0 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    out
}

fn g15() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| gauss_legendre_nodes(GAUSS_POINTS))
}

fn panel<R: RealScalar, F: Fn(R) -> Cx<R>>(f: &F, a: R, b: R) -> Cx<R> {
    let half = (b - a) * rf::<R>(0.5);
    let mid = (a + b) * rf::<R>(0.5);
    let mut acc = Cx::new(R::zero(), R::zero());
    for &(x, w) in g15() {
        let t = mid + half * rf::<R>(x);
        acc += f(t) * Cx::new(rf::<R>(w), R::zero());
    }
    acc * Cx::new(half, R::zero())
}

/// Adaptive Gauss-Legendre integration of a complex-valued scalar function:
/// 15-point panels, bisected until a panel agrees with its two halves to
/// the requested tolerance.
pub fn integrate_adaptive<R: RealScalar, F: Fn(R) -> Cx<R>>(
    f: F,
    a: R,
    b: R,
    tol: R,
) -> Result<Cx<R>> {
    const MAX_DEPTH: usize = 48;
    fn recurse<R: RealScalar, F: Fn(R) -> Cx<R>>(
        f: &F,
        a: R,
        b: R,
        whole: Cx<R>,
        tol: R,
        depth: usize,
    ) -> Result<Cx<R>> {
        let mid = (a + b) * rf::<R>(0.5);
        let left = panel(f, a, mid);
        let right = panel(f, mid, b);
        let refined = left + right;
        let err = (refined - whole).modulus();
        if err <= tol * (R::one() + refined.modulus()) {
            return Ok(refined);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::InvalidInput(format!(
                "adaptive quadrature failed to converge (residual {:.3e})",
                fl(err)
            )));
        }
        let half_tol = tol * rf::<R>(0.5);
        Ok(recurse(f, a, mid, left, half_tol, depth + 1)?
            + recurse(f, mid, b, right, half_tol, depth + 1)?)
    }
    if a == b {
        return Ok(Cx::new(R::zero(), R::zero()));
    }
    let whole = panel(&f, a, b);
    recurse(&f, a, b, whole, tol, 0)
}
