//! Asymptotic theory: the map `φ`, the potential `Φ`, their fixed points,
//! the thresholds in `d` and `θ`, the condensation line `λ_cond`, the success
//! probability of BPGD below `d_min`, and the predictions the experiments
//! compare against.

pub mod quadrature;
mod thresholds;

pub use thresholds::{
    d_core, d_min, d_sat, lambda_cond, lambda_cond_bisection, lambda_cond_ode, lambda_cond_ode_grid, lambda_of_z,
    theta_of_lambda, thresholds, thresholds_at, z_roots, ThresholdSet, ZRoots,
};

use serde::Serialize;

use crate::error::{Error, Result};

/// Iteration cap for bisection; the bracket hits machine resolution sooner.
const BISECT_ITERS: usize = 200;
/// Two fixed points closer than this are reported as one.
pub const DEGENERATE_GAP: f64 = 1e-8;

/// `(d, k, λ)` with `θ = 1 − e^{−λ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    pub d: f64,
    pub k: usize,
    pub lambda: f64,
}

impl ModelParams {
    pub fn new(d: f64, k: usize, lambda: f64) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidParameters(format!("k = {k} must be at least 3")));
        }
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameters(format!("d = {d} must be finite and nonnegative")));
        }
        if lambda.is_nan() || lambda < 0.0 {
            return Err(Error::InvalidParameters(format!("λ = {lambda} must be nonnegative")));
        }
        Ok(ModelParams { d, k, lambda })
    }

    pub fn from_theta(d: f64, k: usize, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::InvalidParameters(format!("θ = {theta} must lie in [0, 1)")));
        }
        ModelParams::new(d, k, -(-theta).ln_1p())
    }

    pub fn theta(&self) -> f64 {
        theta_of_lambda(self.lambda)
    }

}

fn check_unit(z: f64) -> Result<()> {
    if (0.0..=1.0).contains(&z) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("z = {z} outside [0, 1]")))
    }
}

fn phi_raw(z: f64, p: &ModelParams) -> f64 {
    -(-p.lambda - p.d * z.powi(p.k as i32 - 1)).exp_m1()
}

fn phi_prime_raw(z: f64, p: &ModelParams) -> f64 {
    let k = p.k as i32;
    p.d * f64::from(k - 1) * z.powi(k - 2) * (-p.lambda - p.d * z.powi(k - 1)).exp()
}

fn big_phi_raw(z: f64, p: &ModelParams) -> f64 {
    let (d, k) = (p.d, p.k as i32);
    let kf = f64::from(k);
    (-p.lambda - d * z.powi(k - 1)).exp() - d * (kf - 1.0) / kf * z.powi(k) + d * z.powi(k - 1) - d / kf
}

/// `φ(z) = 1 − exp(−λ − d z^{k−1})`.
pub fn phi(z: f64, p: &ModelParams) -> Result<f64> {
    check_unit(z)?;
    Ok(phi_raw(z, p))
}

pub fn phi_prime(z: f64, p: &ModelParams) -> Result<f64> {
    check_unit(z)?;
    Ok(phi_prime_raw(z, p))
}

/// `Φ(z) = exp(−λ − d z^{k−1}) − d(k−1)/k · z^k + d z^{k−1} − d/k`.
pub fn big_phi(z: f64, p: &ModelParams) -> Result<f64> {
    check_unit(z)?;
    Ok(big_phi_raw(z, p))
}

/// `Φ'(z) = d(k−1) z^{k−2} (φ(z) − z)`.
pub fn big_phi_prime(z: f64, p: &ModelParams) -> Result<f64> {
    check_unit(z)?;
    let k = p.k as i32;
    Ok(p.d * f64::from(k - 1) * z.powi(k - 2) * (phi_raw(z, p) - z))
}

/// Root of `f` in `[lo, hi]` given `f(lo)` and `f(hi)` of opposite sign
/// (zero allowed at either end).
pub(crate) fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    let lo_neg = flo < 0.0;
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == lo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FixedPointReport {
    /// Smallest fixed point `α_*`.
    pub alpha_sub: f64,
    /// Largest fixed point `α^*`.
    pub alpha_sup: f64,
    /// The one of the two with the larger `Φ`, `α_*` on ties.
    pub alpha_max: f64,
    pub phi_sub: f64,
    pub phi_sup: f64,
    pub stable_sub: bool,
    pub stable_sup: bool,
    /// The two fixed points coincide to within [`DEGENERATE_GAP`].
    pub degenerate: bool,
}

impl FixedPointReport {
    pub fn phi_max(&self) -> f64 {
        self.phi_sub.max(self.phi_sup)
    }
}

/// Smallest and largest roots of `ζ(z) = φ(z) − z`.
///
/// `φ'` is unimodal on `[0, 1]` and `ζ'(0) = −1`, so `ζ` is decreasing, then
/// possibly increasing, then decreasing. Each monotone piece holds at most
/// one root and is bisected separately.
fn extreme_roots(p: &ModelParams) -> (f64, f64) {
    let zeta = |z: f64| phi_raw(z, p) - z;
    let dzeta = |z: f64| phi_prime_raw(z, p) - 1.0;
    let k = p.k as f64;
    // Peak of φ'.
    let z_peak = if p.d > 0.0 {
        ((k - 2.0) / (p.d * (k - 1.0))).powf(1.0 / (k - 1.0)).min(1.0)
    } else {
        1.0
    };
    if dzeta(z_peak) <= 0.0 {
        let r = bisect(zeta, 0.0, 1.0);
        return (r, r);
    }
    let z1 = bisect(dzeta, 0.0, z_peak);
    let z2 = if dzeta(1.0) >= 0.0 { 1.0 } else { bisect(dzeta, z_peak, 1.0) };
    if zeta(z2) - zeta(z1) < 1e-14 {
        // A bump below rounding level, as at the triple root when d = d_min.
        let r = bisect(zeta, 0.0, 1.0);
        return (r, r);
    }
    let low = (zeta(z1) <= 0.0).then(|| bisect(zeta, 0.0, z1));
    let high = (zeta(z2) >= 0.0).then(|| bisect(zeta, z2, 1.0));
    match (low, high) {
        (Some(a), Some(b)) => (a, b),
        (Some(a), None) => (a, a),
        (None, Some(b)) => (b, b),
        (None, None) => unreachable!("ζ changes sign on [0, 1]"),
    }
}

/// `α_*` and `α^*` with their potentials.
pub fn fixed_points(p: &ModelParams) -> FixedPointReport {
    let (mut lo, mut hi) = extreme_roots(p);
    let degenerate = hi - lo < DEGENERATE_GAP;
    if degenerate {
        let mid = 0.5 * (lo + hi);
        lo = mid;
        hi = mid;
    }
    let phi_sub = big_phi_raw(lo, p);
    let phi_sup = big_phi_raw(hi, p);
    FixedPointReport {
        alpha_sub: lo,
        alpha_sup: hi,
        alpha_max: if phi_sup > phi_sub { hi } else { lo },
        phi_sub,
        phi_sup,
        stable_sub: phi_prime_raw(lo, p) < 1.0,
        stable_sup: phi_prime_raw(hi, p) < 1.0,
        degenerate,
    }
}

/// Fixed point reached by iterating `z ← φ(z)` from `start`; slow near
/// tangency.
pub fn iterate_phi(p: &ModelParams, start: f64, max_iters: usize, tol: f64) -> f64 {
    let mut z = start;
    for _ in 0..max_iters {
        let next = phi_raw(z, p);
        if (next - z).abs() <= tol {
            return next;
        }
        z = next;
    }
    z
}

/// `lim nul(A_t)/n = Φ(α_max)` at `θ = t/n`.
pub fn nullity_prediction(d: f64, k: usize, theta: f64) -> Result<f64> {
    let p = ModelParams::from_theta(d, k, theta)?;
    Ok(fixed_points(&p).phi_max())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GwMode {
    /// `p^(0) = 0`; converges to the null fraction.
    Null,
    /// `p^(0) = 1`; converges to the non-uniform fraction.
    Frozen,
}

/// `p^(ℓ) = 1 − exp(−d (1 − e^{−λ}(1 − p^(ℓ−1)))^{k−1})`.
pub fn gw_wp_recursion(p: &ModelParams, ell: usize, mode: GwMode) -> f64 {
    let mut q = match mode {
        GwMode::Null => 0.0,
        GwMode::Frozen => 1.0,
    };
    let decay = (-p.lambda).exp();
    for _ in 0..ell {
        q = -(-p.d * (1.0 - decay * (1.0 - q)).powi(p.k as i32 - 1)).exp_m1();
    }
    q
}

/// Probability that BPGD succeeds, for `0 ≤ d < d_min`.
pub fn success_probability(d: f64, k: usize) -> Result<f64> {
    Ok((-success_exponent(d, k, |f| quadrature::gauss_kronrod(f, 0.0, 1.0, 1e-13))?).exp())
}

/// The same exponent through adaptive Simpson, for cross-checking.
pub fn success_probability_simpson(d: f64, k: usize) -> Result<f64> {
    Ok((-success_exponent(d, k, |f| quadrature::adaptive_simpson(f, 0.0, 1.0, 1e-13))?).exp())
}

fn success_exponent(d: f64, k: usize, integrate: impl FnOnce(&dyn Fn(f64) -> f64) -> f64) -> Result<f64> {
    ModelParams::new(d, k, 0.0)?;
    let dm = d_min(k)?;
    if d >= dm - 1e-9 {
        return Err(Error::OutOfRegime(format!("d = {d} is not below d_min = {dm}")));
    }
    let km = (k - 1) as f64;
    let ki = k as i32;
    let integrand = |z: f64| z.powi(2 * ki - 4) * (1.0 - z) / (1.0 - d * km * z.powi(ki - 2) * (1.0 - z));
    let integral = integrate(&integrand);
    Ok(d * d * km * km / 4.0 * integral)
}

/// UCP trajectory in the limit, normalised by `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryPrediction {
    pub theta: f64,
    pub alpha_sub: f64,
    /// Fraction of variables still unassigned.
    pub n_hat: f64,
    /// `m_hat[ℓ]`: clauses of length `ℓ` per variable, `ℓ = 0..=k`. The
    /// entries for `ℓ < 2` are the formal terms of the binomial sum.
    pub m_hat: Vec<f64>,
    /// `f = d(k−1)(1−α_*)α_*^{k−2}`, the branching rate of unit clauses.
    pub f: f64,
}

impl TrajectoryPrediction {
    /// Probability of a conflict at step `t` out of `n`.
    pub fn conflict_probability(&self, n: usize, t: usize) -> f64 {
        let f = self.f;
        f * f / (4.0 * (n - t) as f64 * (1.0 - f) * (1.0 - f))
    }
}

fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn ucp_trajectory_prediction(d: f64, k: usize, theta: f64) -> Result<TrajectoryPrediction> {
    let p = ModelParams::from_theta(d, k, theta)?;
    let dm = d_min(k)?;
    if d > dm {
        let ds = d_sat(k)?;
        if d >= ds {
            return Err(Error::OutOfRegime(format!("d = {d} is not below d_sat = {ds}")));
        }
        let z = z_roots(d, k)?;
        let theta_sub = theta_of_lambda(lambda_of_z(z.z_sub, k));
        if theta >= theta_sub {
            return Err(Error::OutOfRegime(format!("θ = {theta} is not below θ_* = {theta_sub}")));
        }
    }
    let a = fixed_points(&p).alpha_sub;
    let ki = k as i32;
    let m_hat = (0..=k)
        .map(|l| d / k as f64 * binomial(k, l) * (1.0 - a).powi(l as i32) * a.powi(ki - l as i32))
        .collect();
    Ok(TrajectoryPrediction {
        theta,
        alpha_sub: a,
        n_hat: 1.0 - a,
        m_hat,
        f: d * (k - 1) as f64 * (1.0 - a) * a.powi(ki - 2),
    })
}

/// `(1/4) ∫₀¹ f(θ)² / ((1−θ)(1−f(θ))²) dθ`, the limiting expected number of
/// conflicts, for `d < d_min`.
pub fn expected_conflicts(d: f64, k: usize) -> Result<f64> {
    let dm = d_min(k)?;
    if d >= dm - 1e-9 {
        return Err(Error::OutOfRegime(format!("d = {d} is not below d_min = {dm}")));
    }
    let rate = |theta: f64| {
        if theta >= 1.0 {
            return 0.0;
        }
        let p = ModelParams::from_theta(d, k, theta).expect("valid");
        let a = fixed_points(&p).alpha_sub;
        let f = d * (k - 1) as f64 * (1.0 - a) * a.powi(k as i32 - 2);
        f * f / ((1.0 - theta) * (1.0 - f) * (1.0 - f))
    };
    Ok(0.25 * quadrature::gauss_kronrod(rate, 0.0, 1.0, 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(d: f64, k: usize, lambda: f64) -> ModelParams {
        ModelParams::new(d, k, lambda).unwrap()
    }

    #[test]
    fn phi_boundary_values() {
        let p = params(2.4, 3, 0.0);
        assert_eq!(phi(0.0, &p).unwrap(), 0.0);
        let q = params(0.0, 4, 0.7);
        for z in [0.0, 0.3, 1.0] {
            assert!((phi(z, &q).unwrap() - (1.0 - (-0.7f64).exp())).abs() < 1e-15);
        }
        let r = params(1.7, 5, 0.2);
        assert!((phi(1.0, &r).unwrap() - (1.0 - (-1.9f64).exp())).abs() < 1e-15);
        assert!(phi(1.1, &r).is_err());
        assert!(big_phi(-0.1, &r).is_err());
    }

    #[test]
    fn big_phi_at_zero() {
        let p = params(2.4, 3, 0.3);
        assert!((big_phi(0.0, &p).unwrap() - ((-0.3f64).exp() - 0.8)).abs() < 1e-15);
        let q = params(2.4, 3, 0.0);
        assert!((big_phi(0.0, &q).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1.0, 2, 0.0).is_err());
        assert!(ModelParams::new(-1.0, 3, 0.0).is_err());
        assert!(ModelParams::new(1.0, 3, -0.1).is_err());
        assert!(ModelParams::from_theta(1.0, 3, 1.0).is_err());
        let p = ModelParams::from_theta(1.0, 3, 0.25).unwrap();
        assert!((p.theta() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn fixed_points_with_d_zero() {
        let p = params(0.0, 3, 0.4);
        let r = fixed_points(&p);
        let want = 1.0 - (-0.4f64).exp();
        assert!((r.alpha_sub - want).abs() < 1e-12 && (r.alpha_sup - want).abs() < 1e-12);
    }

    #[test]
    fn fixed_points_at_lambda_zero_below_core() {
        let r = fixed_points(&params(2.3, 3, 0.0));
        assert_eq!(r.alpha_sub, 0.0);
        assert_eq!(r.alpha_sup, 0.0);
        let r = fixed_points(&params(2.6, 3, 0.0));
        assert_eq!(r.alpha_sub, 0.0);
        assert!(r.alpha_sup > 0.5);
    }

    #[test]
    fn two_fixed_points_inside_window() {
        // λ^* ≈ 0.0279 < 0.08 < λ_* ≈ 0.1407 at k=3, d=2.4.
        let p = params(2.4, 3, 0.08);
        let r = fixed_points(&p);
        assert!(!r.degenerate);
        assert!(r.alpha_sub + 0.1 < r.alpha_sup);
        for a in [r.alpha_sub, r.alpha_sup] {
            assert!((phi(a, &p).unwrap() - a).abs() < 1e-12);
        }
        assert!(r.stable_sub && r.stable_sup);
        // Iteration from the ends reaches the same points.
        assert!((iterate_phi(&p, 0.0, 100_000, 1e-15) - r.alpha_sub).abs() < 1e-10);
        assert!((iterate_phi(&p, 1.0, 100_000, 1e-15) - r.alpha_sup).abs() < 1e-10);
    }

    #[test]
    fn one_fixed_point_outside_window() {
        for lambda in [0.01, 0.35] {
            let r = fixed_points(&params(2.4, 3, lambda));
            assert!((r.alpha_sup - r.alpha_sub).abs() < 1e-12, "λ {lambda}");
        }
    }

    #[test]
    fn stationary_points_of_big_phi() {
        let p = params(2.4, 3, 0.2);
        let r = fixed_points(&p);
        let h = 1e-6;
        for a in [r.alpha_sub, r.alpha_sup] {
            let fd = (big_phi_raw(a + h, &p) - big_phi_raw(a - h, &p)) / (2.0 * h);
            assert!(fd.abs() < 1e-9, "Φ'({a}) ≈ {fd}");
            assert!(big_phi_prime(a, &p).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn alpha_max_tie_goes_low() {
        let p = params(0.0, 3, 0.2);
        let r = fixed_points(&p);
        assert_eq!(r.alpha_max, r.alpha_sub);
    }

    #[test]
    fn near_tangency_is_degenerate() {
        // At d = d_min and λ = λ(z†) all three fixed points meet at z† = 1/2.
        let r = fixed_points(&params(2.0, 3, lambda_of_z(0.5, 3)));
        assert!(r.degenerate);
        assert_eq!(r.alpha_sub, r.alpha_sup);
        assert!((r.alpha_sub - 0.5).abs() < 1e-4);
        // At λ_* only the lower one is double; the upper one stays apart.
        let l = lambda_of_z(z_roots(2.4, 3).unwrap().z_sub, 3);
        let r = fixed_points(&params(2.4, 3, l));
        assert!(!r.degenerate && r.alpha_sup > r.alpha_sub + 0.3);
    }

    #[test]
    fn nullity_prediction_cases() {
        assert!((nullity_prediction(2.0, 3, 0.0).unwrap() - (1.0 - 2.0 / 3.0)).abs() < 1e-12);
        assert!((nullity_prediction(0.0, 3, 0.3).unwrap() - 0.7).abs() < 1e-12);
        let (_, theta_c) = lambda_cond(2.4, 3).unwrap();
        let below = nullity_prediction(2.4, 3, theta_c - 1e-4).unwrap();
        let above = nullity_prediction(2.4, 3, theta_c + 1e-4).unwrap();
        let pb = ModelParams::from_theta(2.4, 3, theta_c - 1e-4).unwrap();
        let pa = ModelParams::from_theta(2.4, 3, theta_c + 1e-4).unwrap();
        // α_max jumps from α_* to α^*; Φ(α_max) itself is continuous.
        assert_eq!(fixed_points(&pb).alpha_max, fixed_points(&pb).alpha_sub);
        assert_eq!(fixed_points(&pa).alpha_max, fixed_points(&pa).alpha_sup);
        assert!(fixed_points(&pa).alpha_max - fixed_points(&pb).alpha_max > 0.3);
        assert!((below - above).abs() < 1e-3);
    }

    #[test]
    fn gw_recursion() {
        let p = params(2.4, 3, -(-0.1f64).ln_1p());
        assert_eq!(gw_wp_recursion(&p, 0, GwMode::Null), 0.0);
        assert_eq!(gw_wp_recursion(&p, 0, GwMode::Frozen), 1.0);
        assert_eq!(gw_wp_recursion(&params(0.0, 3, 0.5), 1, GwMode::Null), 0.0);
        let r = fixed_points(&p);
        let theta = p.theta();
        let null = gw_wp_recursion(&p, 200, GwMode::Null);
        assert!((null - (r.alpha_sub - theta) / (1.0 - theta)).abs() < 1e-10);
        let frozen = gw_wp_recursion(&p, 200, GwMode::Frozen);
        assert!((frozen - (r.alpha_sup - theta) / (1.0 - theta)).abs() < 1e-10);
    }

    #[test]
    fn success_probability_rules_agree() {
        let gk = success_probability(1.0, 3).unwrap();
        let si = success_probability_simpson(1.0, 3).unwrap();
        assert!((gk - si).abs() < 1e-8);
        assert!(gk > 0.0 && gk < 1.0);
        assert!(success_probability(1e-4, 3).unwrap() > 1.0 - 1e-8);
        assert_eq!(success_probability(0.0, 3).unwrap(), 1.0);
        assert!(matches!(success_probability(2.0, 3), Err(Error::OutOfRegime(_))));
        assert!(matches!(success_probability(2.0 - 1e-10, 3), Err(Error::OutOfRegime(_))));
        assert!(success_probability(2.5, 4).is_err());
    }

    #[test]
    fn success_probability_decreases() {
        for k in [3, 4, 5] {
            let dm = d_min(k).unwrap();
            let mut prev = 1.0;
            for i in 1..=50 {
                let d = dm * i as f64 / 51.0;
                let s = success_probability(d, k).unwrap();
                assert!(s < prev, "k {k} d {d}");
                prev = s;
            }
        }
    }

    #[test]
    fn conflict_count_matches_success_exponent() {
        for (d, k) in [(0.5, 3), (1.0, 3), (1.5, 3), (1.9, 3), (1.5, 4), (2.0, 5)] {
            let c = expected_conflicts(d, k).unwrap();
            let s = success_probability(d, k).unwrap();
            assert!((c + s.ln()).abs() < 1e-6, "d {d} k {k}: {c} vs {}", -s.ln());
        }
    }

    #[test]
    fn trajectory_initial_conditions() {
        let t = ucp_trajectory_prediction(1.5, 3, 0.0).unwrap();
        assert_eq!(t.n_hat, 1.0);
        assert!((t.m_hat[3] - 0.5).abs() < 1e-15);
        assert!(t.m_hat[..3].iter().all(|&m| m == 0.0));
        let t = ucp_trajectory_prediction(1.5, 4, 0.4).unwrap();
        let total: f64 = t.m_hat.iter().sum();
        assert!((total - 1.5 / 4.0).abs() < 1e-14);
        assert!((t.n_hat - (1.0 - t.alpha_sub)).abs() < 1e-15);
    }

    #[test]
    fn trajectory_refuses_past_theta_sub() {
        let th = thresholds_at(2.4, 3).unwrap();
        let theta_sub = th.theta_sub.unwrap();
        assert!(ucp_trajectory_prediction(2.4, 3, theta_sub - 0.01).is_ok());
        assert!(matches!(
            ucp_trajectory_prediction(2.4, 3, theta_sub + 0.01),
            Err(Error::OutOfRegime(_))
        ));
        assert!(ucp_trajectory_prediction(2.9, 3, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn phi_is_nondecreasing(d in 0.0f64..6.0, k in 3usize..8, lambda in 0.0f64..3.0,
                                a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let p = params(d, k, lambda);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(phi(lo, &p).unwrap() <= phi(hi, &p).unwrap());
        }

        #[test]
        fn fixed_points_are_extreme(d in 0.0f64..6.0, k in 3usize..8, lambda in 0.0f64..2.0) {
            let p = params(d, k, lambda);
            let r = fixed_points(&p);
            prop_assert!(r.alpha_sub <= r.alpha_sup);
            for a in [r.alpha_sub, r.alpha_sup] {
                prop_assert!((phi_raw(a, &p) - a).abs() < 1e-9);
            }
            // No fixed point below α_* or above α^*: ζ keeps its sign there.
            for i in 0..200 {
                let z = i as f64 / 200.0;
                if z < r.alpha_sub - 1e-6 {
                    prop_assert!(phi_raw(z, &p) - z > 0.0);
                }
                if z > r.alpha_sup + 1e-6 {
                    prop_assert!(phi_raw(z, &p) - z < 0.0);
                }
            }
            prop_assert!(r.phi_max() >= r.phi_sub && r.phi_max() >= r.phi_sup);
        }

        #[test]
        fn iterates_are_monotone(d in 0.0f64..5.0, k in 3usize..6, lambda in 0.0f64..2.0) {
            let p = params(d, k, lambda);
            let (mut up, mut down) = (0.0, 1.0);
            for _ in 0..50 {
                let (nu, nd) = (phi_raw(up, &p), phi_raw(down, &p));
                prop_assert!(nu >= up && nd <= down);
                up = nu;
                down = nd;
            }
        }
    }
}
