use serde::Serialize;

use super::{bisect, fixed_points, ModelParams};
use crate::error::{Error, Result};

const MAX_ODE_STEP: f64 = 1e-3;

fn check_k(k: usize) -> Result<()> {
    if k < 3 {
        Err(Error::InvalidParameters(format!("k = {k} must be at least 3")))
    } else {
        Ok(())
    }
}

pub fn theta_of_lambda(lambda: f64) -> f64 {
    -(-lambda).exp_m1()
}

/// `λ(z) = −log(1−z) − z/((k−1)(1−z))`, the `λ` at which `z` is a double
/// fixed point.
pub fn lambda_of_z(z: f64, k: usize) -> f64 {
    -(-z).ln_1p() - z / ((k - 1) as f64 * (1.0 - z))
}

/// `((k−1)/(k−2))^{k−2}`.
pub fn d_min(k: usize) -> Result<f64> {
    check_k(k)?;
    let r = (k - 1) as f64 / (k - 2) as f64;
    Ok(r.powi(k as i32 - 2))
}

/// Largest `d` at which `λ = 0` leaves `α^* = 0`.
pub fn d_core(k: usize) -> Result<f64> {
    check_k(k)?;
    let has_core = |d: f64| fixed_points(&ModelParams { d, k, lambda: 0.0 }).alpha_sup > 0.0;
    let (mut lo, mut hi) = (d_min(k)?, k as f64);
    debug_assert!(!has_core(lo) && has_core(hi));
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if has_core(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `d` at which `Φ(α^*) = Φ(0)` for `λ = 0`.
pub fn d_sat(k: usize) -> Result<f64> {
    check_k(k)?;
    let gap = |d: f64| {
        let p = ModelParams { d, k, lambda: 0.0 };
        let r = fixed_points(&p);
        r.phi_sup - r.phi_sub
    };
    let lo = d_core(k)? + 1e-9;
    Ok(bisect(gap, lo, k as f64))
}

/// The two roots of `d(k−1)z^{k−2}(1−z) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZRoots {
    pub z_sub: f64,
    pub z_sup: f64,
    /// `d = d_min`: both roots sit at `(k−2)/(k−1)`.
    pub degenerate: bool,
}

pub fn z_roots(d: f64, k: usize) -> Result<ZRoots> {
    let dm = d_min(k)?;
    let z_dag = (k - 2) as f64 / (k - 1) as f64;
    if (d - dm).abs() <= 1e-12 * dm {
        return Ok(ZRoots {
            z_sub: z_dag,
            z_sup: z_dag,
            degenerate: true,
        });
    }
    if d < dm {
        return Err(Error::NoRoots(format!("d = {d} is below d_min = {dm}")));
    }
    let g = |z: f64| d * (k - 1) as f64 * z.powi(k as i32 - 2) * (1.0 - z) - 1.0;
    Ok(ZRoots {
        z_sub: bisect(g, 0.0, z_dag),
        z_sup: bisect(g, z_dag, 1.0),
        degenerate: false,
    })
}

/// Thresholds for width `k`, and for a given `d` the window in `λ` and `θ`
/// where two stable fixed points coexist together with `λ_cond` inside it.
/// Fields that do not apply at the given `d` are `None`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdSet {
    pub k: usize,
    pub d_min: f64,
    pub d_core: f64,
    pub d_sat: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// `z_*`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_sub: Option<f64>,
    /// `z^*`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_sup: Option<f64>,
    /// `λ_*`: above it only the upper fixed point survives.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_sub: Option<f64>,
    /// `λ^*`: below it only the lower fixed point exists; clamped at 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_sup: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_sub: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_sup: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_cond: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_cond: Option<f64>,
}

pub fn thresholds(k: usize) -> Result<ThresholdSet> {
    Ok(ThresholdSet {
        k,
        d_min: d_min(k)?,
        d_core: d_core(k)?,
        d_sat: d_sat(k)?,
        d: None,
        z_sub: None,
        z_sup: None,
        lambda_sub: None,
        lambda_sup: None,
        theta_sub: None,
        theta_sup: None,
        lambda_cond: None,
        theta_cond: None,
    })
}

pub fn thresholds_at(d: f64, k: usize) -> Result<ThresholdSet> {
    let mut t = thresholds(k)?;
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::InvalidParameters(format!("d = {d} must be finite and nonnegative")));
    }
    t.d = Some(d);
    if d >= t.d_min {
        let z = z_roots(d, k)?;
        let ls = lambda_of_z(z.z_sub, k);
        let lu = lambda_of_z(z.z_sup, k).max(0.0);
        t.z_sub = Some(z.z_sub);
        t.z_sup = Some(z.z_sup);
        t.lambda_sub = Some(ls);
        t.lambda_sup = Some(lu);
        t.theta_sub = Some(theta_of_lambda(ls));
        t.theta_sup = Some(theta_of_lambda(lu));
    }
    if d > t.d_min && d < t.d_sat {
        let l = lambda_cond_bisection(d, k)?;
        t.lambda_cond = Some(l);
        t.theta_cond = Some(theta_of_lambda(l));
    }
    Ok(t)
}

fn check_cond_regime(d: f64, k: usize) -> Result<(f64, f64)> {
    let (dm, ds) = (d_min(k)?, d_sat(k)?);
    if !(d > dm && d < ds) {
        return Err(Error::OutOfRegime(format!("d = {d} outside (d_min, d_sat) = ({dm}, {ds})")));
    }
    Ok((dm, ds))
}

/// `λ_cond` as the `λ` where `Φ(α^*) = Φ(α_*)`, by bisection over
/// `(λ^*, λ_*)`.
pub fn lambda_cond_bisection(d: f64, k: usize) -> Result<f64> {
    check_cond_regime(d, k)?;
    let z = z_roots(d, k)?;
    let lo = lambda_of_z(z.z_sup, k).max(0.0);
    let hi = lambda_of_z(z.z_sub, k);
    // At λ^* the upper root is a tangency that may be missed, giving a gap
    // of exactly 0; the gap is negative on the whole open interval below
    // λ_cond, so zero counts as negative.
    let side = |lambda: f64| {
        let r = fixed_points(&ModelParams { d, k, lambda });
        if r.phi_sup - r.phi_sub > 0.0 {
            1.0
        } else {
            -1.0
        }
    };
    Ok(bisect(side, lo, hi))
}

fn cond_slope(d: f64, k: usize, lambda: f64) -> f64 {
    let r = fixed_points(&ModelParams { d, k, lambda });
    let (a, b) = (r.alpha_sup, r.alpha_sub);
    let ki = k as i32;
    let ratio = if a - b < super::DEGENERATE_GAP {
        k as f64 * a.powi(ki - 1)
    } else {
        (a.powi(ki) - b.powi(ki)) / (a - b)
    };
    -ratio / k as f64
}

/// `λ_cond` at each of `ds` by RK4 integration of
/// `dλ/dd = −(α^{*k} − α_*^k)/(k(α^* − α_*))` from `(d_sat, 0)` downwards.
/// Steps are at most `1e−3` and land exactly on every requested point.
pub fn lambda_cond_ode_grid(ds: &[f64], k: usize) -> Result<Vec<f64>> {
    for &d in ds {
        check_cond_regime(d, k)?;
    }
    let start = d_sat(k)?;
    let mut order: Vec<usize> = (0..ds.len()).collect();
    order.sort_by(|&i, &j| ds[j].total_cmp(&ds[i]));
    let mut out = vec![0.0; ds.len()];
    let (mut x, mut y) = (start, 0.0);
    for i in order {
        let target = ds[i];
        let steps = ((x - target) / MAX_ODE_STEP).ceil().max(1.0) as usize;
        let h = (target - x) / steps as f64;
        for s in 0..steps {
            let x0 = x + h * s as f64;
            let k1 = cond_slope(x0, k, y);
            let k2 = cond_slope(x0 + 0.5 * h, k, (y + 0.5 * h * k1).max(0.0));
            let k3 = cond_slope(x0 + 0.5 * h, k, (y + 0.5 * h * k2).max(0.0));
            let k4 = cond_slope(x0 + h, k, (y + h * k3).max(0.0));
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        x = target;
        out[i] = y;
    }
    Ok(out)
}

pub fn lambda_cond_ode(d: f64, k: usize) -> Result<f64> {
    Ok(lambda_cond_ode_grid(&[d], k)?[0])
}

/// `(λ_cond, θ_cond)` for `d ∈ (d_min, d_sat)`.
pub fn lambda_cond(d: f64, k: usize) -> Result<(f64, f64)> {
    let l = lambda_cond_bisection(d, k)?;
    Ok((l, theta_of_lambda(l)))
}
