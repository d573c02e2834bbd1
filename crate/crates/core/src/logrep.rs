//! Logarithmic representations of the first-order generator.
//!
//! With a shift `kappa` clearing the spectrum of `U(t,s) + kappa I` off
//! the branch cut, the shifted logarithm `a(t,s) = Log(U(t,s) + kappa I)`
//! is always defined and acts as an alternative generator: the original
//! `A_1(t)` is recovered either as
//! `(I - kappa e^{-a})^{-1} d/dt a`  or as
//! `(I + kappa U(s,t)) d/dt Log(U(t,s) + kappa I)`,
//! the latter requiring `U` to be invertible (group case). Both recoveries
//! are exact under the commuting structures; a general structure still
//! evaluates but carries no recovery guarantee.

use crate::error::{Error, Result};
use crate::evolution::{EvolutionFamily, TimeGrid};
use crate::funcalc::{principal_log, CalcConfig};
use crate::linalg::{operator_exp, spectrum, CVector, Operator};
use crate::numeric::central_weights;
use crate::scalar::{cxr, fl, rf, Cx, RealScalar};

/// Shifted logarithm `a(t,s) = Log(U(t,s) + kappa I)` together with the
/// shift that produced it.
#[derive(Debug, Clone)]
pub struct ShiftedLog<R: RealScalar> {
    pub kappa: Cx<R>,
    pub a: Operator<R>,
    pub t: R,
    pub s: R,
}

/// How `d/dt` of the shifted logarithm is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMode {
    /// `[d/dt U(t,s)] (U(t,s) + kappa I)^{-1}`, valid under the commuting
    /// structures.
    Analytic,
    /// 4th-order central difference of `t -> Log(U(t,s) + kappa I)`; the
    /// independent cross-check path.
    FiniteDifference,
}

/// Shift selection: `kappa = 1 + max spectral_radius(U(t,s))` over all
/// ordered grid pairs. Every eigenvalue of `U + kappa I` then has real
/// part at least 1, clearing the branch cut uniformly on the grid.
pub fn select_kappa<R: RealScalar>(
    ev: &EvolutionFamily<R>,
    grid: &TimeGrid<R>,
) -> Result<Cx<R>> {
    let pts = grid.points();
    let mut max_radius = R::zero();
    for i in 0..pts.len() {
        for j in i..pts.len() {
            let u = ev.propagate(pts[j], pts[i])?;
            let rho = spectrum(&u)?.spectral_radius;
            if rho > max_radius {
                max_radius = rho;
            }
        }
    }
    Ok(Cx::new(R::one() + max_radius, R::zero()))
}

/// `a(t,s) = Log(U(t,s) + kappa I)` with its exponential round trip
/// re-verified against `U + kappa I`.
pub fn alt_generator<R: RealScalar>(
    ev: &EvolutionFamily<R>,
    t: R,
    s: R,
    kappa: Cx<R>,
    cfg: &CalcConfig<R>,
) -> Result<ShiftedLog<R>> {
    let u = ev.propagate(t, s)?;
    let shifted = u.shift(kappa);
    let a = principal_log(&shifted, cfg)?;
    let roundtrip = operator_exp(&a).try_sub(&shifted)?.norm_fro();
    let bound = rf::<R>(1e-9) * (R::one() + u.norm_fro());
    if roundtrip > bound {
        return Err(Error::QuadratureNonconvergence {
            nodes: cfg.max_nodes,
            delta: fl(roundtrip),
        });
    }
    Ok(ShiftedLog { kappa, a, t, s })
}

/// `d/dt a(t,s)` in the requested mode.
pub fn dt_alt_generator<R: RealScalar>(
    ev: &EvolutionFamily<R>,
    t: R,
    s: R,
    kappa: Cx<R>,
    mode: DerivativeMode,
    cfg: &CalcConfig<R>,
) -> Result<Operator<R>> {
    match mode {
        DerivativeMode::Analytic => {
            let du = ev.dt_evolution(t, s, 1)?;
            let shifted = ev.propagate(t, s)?.shift(kappa);
            let inv = shifted.inverse_default()?;
            du.try_mul(&inv)
        }
        DerivativeMode::FiniteDifference => {
            let h = ev.config().fd_step(1, ev.horizon());
            let (offsets, weights) = central_weights(1);
            let p = rf::<R>(*offsets.last().unwrap() as f64);
            let (lo, hi) = (t - p * h, t + p * h);
            if lo < s || hi > ev.horizon() {
                return Err(Error::StencilOutOfRange {
                    lo: fl(lo),
                    hi: fl(hi),
                    s: fl(s),
                    horizon: fl(ev.horizon()),
                });
            }
            let mut acc = Operator::zeros(ev.dim());
            for (&o, &w) in offsets.iter().zip(&weights) {
                let tau = t + rf::<R>(o as f64) * h;
                let log = alt_generator(ev, tau, s, kappa, cfg)?.a;
                acc = acc.try_add(&log.scale(cxr(w)))?;
            }
            Ok(acc.scale(Cx::new(R::one() / h, R::zero())))
        }
    }
}

/// Recover `A_1(t)` as `(I - kappa e^{-a(t,s)})^{-1} d/dt a(t,s)`.
/// Only the semigroup property of `U` is needed.
pub fn recover_generator_alt<R: RealScalar>(
    ev: &EvolutionFamily<R>,
    t: R,
    s: R,
    kappa: Cx<R>,
    mode: DerivativeMode,
    cfg: &CalcConfig<R>,
) -> Result<Operator<R>> {
    let a = alt_generator(ev, t, s, kappa, cfg)?.a;
    let da = dt_alt_generator(ev, t, s, kappa, mode, cfg)?;
    let exp_neg_a = operator_exp(&(-&a));
    let front = Operator::identity(ev.dim()).try_sub(&exp_neg_a.scale(kappa))?;
    front.inverse_default()?.try_mul(&da)
}

/// Recover `A_1(t)` as `(I + kappa U(s,t)) d/dt Log(U(t,s) + kappa I)`
/// with `U(s,t) = U(t,s)^{-1}` (the group case).
pub fn recover_generator_original<R: RealScalar>(
    ev: &EvolutionFamily<R>,
    t: R,
    s: R,
    kappa: Cx<R>,
    mode: DerivativeMode,
    cfg: &CalcConfig<R>,
) -> Result<Operator<R>> {
    let u = ev.propagate(t, s)?;
    let u_rev = u.inverse_default()?;
    let da = dt_alt_generator(ev, t, s, kappa, mode, cfg)?;
    let front = Operator::identity(ev.dim()).try_add(&u_rev.scale(kappa))?;
    front.try_mul(&da)
}

/// `|e^{-a(t,s)} - e^{a(s,t)}|`: zero in the unshifted group case, and
/// strictly positive for generic nonzero shifts, measuring how far the
/// shifted logarithm is from a group representation.
pub fn nongroup_discrepancy<R: RealScalar>(
    ev: &EvolutionFamily<R>,
    t: R,
    s: R,
    kappa: Cx<R>,
    cfg: &CalcConfig<R>,
) -> Result<R> {
    let u = ev.propagate(t, s)?;
    let a_ts = principal_log(&u.shift(kappa), cfg)?;
    let forward = operator_exp(&(-&a_ts));
    let u_rev = u.inverse_default()?;
    let a_st = principal_log(&u_rev.shift(kappa), cfg)?;
    let backward = operator_exp(&a_st);
    Ok(forward.try_sub(&backward)?.norm_fro())
}

/// Residual of the vector identity
/// `[d/dt Log(U + kappa I)] x = (U + kappa I)^{-1} A(t) U x`,
/// with the left side finite-differenced through the contour logarithm and
/// the right side assembled from the generator; relative to `|x|`.
pub fn dt_log_identity_check<R: RealScalar>(
    ev: &EvolutionFamily<R>,
    t: R,
    s: R,
    kappa: Cx<R>,
    x: &CVector<R>,
    cfg: &CalcConfig<R>,
) -> Result<R> {
    if !ev.generator().commutation_hypothesis() {
        return Err(Error::InvalidInput(
            "the derivative identity is asserted only for constant or commuting structures"
                .into(),
        ));
    }
    let norm_x = x.norm();
    if !(norm_x > R::zero()) {
        return Err(Error::InvalidInput("need a nonzero probe vector".into()));
    }
    let da = dt_alt_generator(ev, t, s, kappa, DerivativeMode::FiniteDifference, cfg)?;
    let lhs = da.apply(x)?;
    let u = ev.propagate(t, s)?;
    let a1 = ev.generator().eval(t)?;
    let rhs_vec = a1.apply(&u.apply(x)?)?;
    let rhs = u.shift(kappa).solve_vector(&rhs_vec)?;
    Ok((lhs - rhs).norm() / norm_x)
}

/// Similarity consistency of the representation:
/// `|A_1 - (I - kappa e^{-a})^{-1} A_1 (I - kappa e^{-a})|`, which must
/// vanish when the family commutes.
pub fn similarity_consistency<R: RealScalar>(
    ev: &EvolutionFamily<R>,
    t: R,
    s: R,
    kappa: Cx<R>,
    cfg: &CalcConfig<R>,
) -> Result<R> {
    let a = alt_generator(ev, t, s, kappa, cfg)?.a;
    let exp_neg_a = operator_exp(&(-&a));
    let g = Operator::identity(ev.dim()).try_sub(&exp_neg_a.scale(kappa))?;
    let a1 = ev.generator().eval(t)?;
    let conjugated = g.inverse_default()?.try_mul(&a1)?.try_mul(&g)?;
    Ok(a1.try_sub(&conjugated)?.norm_fro())
}
