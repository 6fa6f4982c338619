//! Physical parameters, the piecewise coefficient k(t), the growth exponent λ,
//! the idealized trajectory α(t), the classical flow, and the Graf phase
//! integral.

use crate::error::{QsError, Result};
use crate::potential::PotentialSpec;
use crate::quadrature;
use serde::{Deserialize, Serialize};

/// Spatial dimension. Fixed: the whole lab runs in the plane.
pub const DIM: usize = 2;

pub type Vec2 = [f64; 2];

/// Larger root of λ(λ−1) = σ.
pub fn lambda_of_sigma(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(QsError::Domain(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    Ok(0.5 * (1.0 + (1.0 + 4.0 * sigma).sqrt()))
}

/// Physical constants of a run. λ is always derived from σ.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub rho: f64,
}

impl ModelParams {
    pub fn new(omega: f64, sigma: f64, rho: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(QsError::Domain(format!(
                "omega must be positive, got {omega}"
            )));
        }
        let lambda = lambda_of_sigma(sigma)?;
        if !(rho > 1.0 / lambda && rho < 1.0) {
            return Err(QsError::Domain(format!(
                "rho must lie in (1/lambda, 1) = ({:.6}, 1), got {rho}",
                1.0 / lambda
            )));
        }
        Ok(ModelParams {
            omega,
            sigma,
            lambda,
            rho,
        })
    }

    /// Continuity default: ω = √σ makes k(t) continuous at |t| = 1.
    pub fn continuous(sigma: f64, rho: f64) -> Result<Self> {
        Self::new(sigma.sqrt(), sigma, rho)
    }

    /// σ ≤ 2 ⇔ λ ≤ 2 ⇔ ρ may exceed 1/2 (short-range-style proof branch).
    pub fn short_range_branch(&self) -> bool {
        self.sigma <= 2.0
    }

    pub fn dim(&self) -> usize {
        DIM
    }
}

/// Repulsive coefficient: ω² inside |t| ≤ 1, σ/t² outside.
pub fn k_coeff(t: f64, params: &ModelParams) -> f64 {
    if t.abs() <= 1.0 {
        params.omega * params.omega
    } else {
        params.sigma / (t * t)
    }
}

/// Idealized classical trajectory α(t): sinh(ωt)/ω inside, ±|t|^λ/(2λ−1)
/// outside. Odd in t, discontinuous at |t| = 1 in general.
pub fn alpha(t: f64, params: &ModelParams) -> f64 {
    let om = params.omega;
    if t.abs() <= 1.0 {
        (om * t).sinh() / om
    } else {
        let lam = params.lambda;
        t.signum() * t.abs().powf(lam) / (2.0 * lam - 1.0)
    }
}

/// Classical trajectory with the action accumulated along it.
#[derive(Debug, Clone)]
pub struct ClassicalPath {
    pub times: Vec<f64>,
    pub q: Vec<Vec2>,
    pub p: Vec<Vec2>,
    /// S(t) = ∫ [p²/2 + k q²/2] dτ from t0.
    pub action: Vec<f64>,
}

impl ClassicalPath {
    pub fn last(&self) -> (f64, Vec2, Vec2, f64) {
        let i = self.times.len() - 1;
        (self.times[i], self.q[i], self.p[i], self.action[i])
    }
}

/// One RK4 step of (q, p, S) under q̇ = p, ṗ = k(t) q, Ṡ = p²/2 + k q²/2.
/// Shared by the classical flow and the split-step frame advance so the two
/// agree bit for bit.
pub fn rk4_frame_step(
    t: f64,
    dt: f64,
    q: Vec2,
    p: Vec2,
    s: f64,
    params: &ModelParams,
) -> (Vec2, Vec2, f64) {
    #[derive(Clone, Copy)]
    struct St {
        q: Vec2,
        p: Vec2,
        s: f64,
    }
    let deriv = |t: f64, st: St| -> St {
        let k = k_coeff(t, params);
        St {
            q: st.p,
            p: [k * st.q[0], k * st.q[1]],
            s: 0.5 * (st.p[0] * st.p[0] + st.p[1] * st.p[1])
                + 0.5 * k * (st.q[0] * st.q[0] + st.q[1] * st.q[1]),
        }
    };
    let add = |a: St, b: St, c: f64| St {
        q: [a.q[0] + c * b.q[0], a.q[1] + c * b.q[1]],
        p: [a.p[0] + c * b.p[0], a.p[1] + c * b.p[1]],
        s: a.s + c * b.s,
    };
    let y = St { q, p, s };
    let k1 = deriv(t, y);
    let k2 = deriv(t + 0.5 * dt, add(y, k1, 0.5 * dt));
    let k3 = deriv(t + 0.5 * dt, add(y, k2, 0.5 * dt));
    let k4 = deriv(t + dt, add(y, k3, dt));
    let mut out = y;
    for i in 0..2 {
        out.q[i] += dt / 6.0 * (k1.q[i] + 2.0 * k2.q[i] + 2.0 * k3.q[i] + k4.q[i]);
        out.p[i] += dt / 6.0 * (k1.p[i] + 2.0 * k2.p[i] + 2.0 * k3.p[i] + k4.p[i]);
    }
    out.s += dt / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
    (out.q, out.p, out.s)
}

/// Split [t0, t1] into RK4 steps of size ≤ dt that never straddle |t| = 1.
pub fn time_mesh(t0: f64, t1: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(QsError::Domain(format!("dt must be positive, got {dt}")));
    }
    if t0 == t1 {
        return Ok(vec![t0]);
    }
    let dir = (t1 - t0).signum();
    let mut knots = vec![t0, t1];
    for b in [-1.0, 1.0] {
        if (b - t0) * dir > 1e-12 && (t1 - b) * dir > 1e-12 {
            knots.push(b);
        }
    }
    knots.sort_by(|a, b| if dir > 0.0 { a.total_cmp(b) } else { b.total_cmp(a) });
    let mut mesh = vec![t0];
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let span = (b - a).abs();
        let n = (span / dt).ceil().max(1.0) as usize;
        let h = (b - a) / n as f64;
        for k in 1..=n {
            mesh.push(if k == n { b } else { a + k as f64 * h });
        }
    }
    Ok(mesh)
}

/// Integrate the quadratic classical flow from t0 to t1 with q(t0) = 0,
/// p(t0) = v. The frame trajectory of every boosted packet.
pub fn classical_flow(
    v: Vec2,
    t0: f64,
    t1: f64,
    dt: f64,
    params: &ModelParams,
) -> Result<ClassicalPath> {
    classical_flow_from(([0.0, 0.0], v, 0.0), t0, t1, dt, params)
}

/// Same integrator with arbitrary initial data (q, p, S) at t0.
pub fn classical_flow_from(
    init: (Vec2, Vec2, f64),
    t0: f64,
    t1: f64,
    dt: f64,
    params: &ModelParams,
) -> Result<ClassicalPath> {
    let mesh = time_mesh(t0, t1, dt)?;
    if t0 != t1 && mesh.len() < 3 {
        return Err(QsError::Domain(format!(
            "dt={dt} too coarse for span [{t0}, {t1}]"
        )));
    }
    let (mut q, mut p, mut s) = init;
    let mut path = ClassicalPath {
        times: Vec::with_capacity(mesh.len()),
        q: Vec::with_capacity(mesh.len()),
        p: Vec::with_capacity(mesh.len()),
        action: Vec::with_capacity(mesh.len()),
    };
    path.times.push(mesh[0]);
    path.q.push(q);
    path.p.push(p);
    path.action.push(s);
    for w in mesh.windows(2) {
        let (ta, tb) = (w[0], w[1]);
        let (nq, np, ns) = rk4_frame_step(ta, tb - ta, q, p, s, params);
        q = nq;
        p = np;
        s = ns;
        path.times.push(tb);
        path.q.push(q);
        path.p.push(p);
        path.action.push(s);
    }
    Ok(path)
}

/// 2×2 fundamental matrix of ẍ = k(t)x from s to t, columns (x, ẋ) for the
/// initial data (1,0) and (0,1). RK4 on the linearized system; this is the
/// covariance-flow oracle the quadratic propagators are checked against.
pub fn fundamental_matrix(s: f64, t: f64, dt: f64, params: &ModelParams) -> Result<[[f64; 2]; 2]> {
    let mesh = time_mesh(s, t, dt)?;
    // Integrate the two basis columns as 1D (q,p) pairs.
    let mut cols = [[1.0, 0.0], [0.0, 1.0]];
    for w in mesh.windows(2) {
        let (ta, tb) = (w[0], w[1]);
        let h = tb - ta;
        for col in cols.iter_mut() {
            let f = |t: f64, y: [f64; 2]| {
                let k = k_coeff(t, params);
                [y[1], k * y[0]]
            };
            let y = *col;
            let k1 = f(ta, y);
            let k2 = f(ta + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
            let k3 = f(ta + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
            let k4 = f(tb, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            col[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            col[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        }
    }
    // Columns are images of (1,0) and (0,1); matrix rows are (x-row, p-row).
    Ok([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]])
}

/// Where to cut an ∫ V^reg(α(τ)v) dτ tail so the integrand is below `eps`,
/// assuming ⟨x⟩^{-ρ}-type decay with amplitude `amp`.
fn graf_cutoff(v_norm: f64, amp: f64, eps: f64, params: &ModelParams) -> f64 {
    if amp <= 0.0 || v_norm <= 0.0 {
        return 2.0;
    }
    // |V(α(t)v)| ≈ amp ⟨α(t) v⟩^{-ρ} with α(t) ≈ t^λ/(2λ−1) for t > 1.
    let lam = params.lambda;
    let r_needed = (amp / eps).powf(1.0 / params.rho).max(1.0);
    let t_outer = ((2.0 * lam - 1.0) * r_needed / v_norm).powf(1.0 / lam);
    t_outer.max(2.0)
}

/// ∫₀^{t_end} V^reg(α(τ)v) dτ. `t_end = ±∞` is accepted (f64::INFINITY) and
/// truncated where the integrand falls below 1e−12 of its scale, with the
/// power-law tail estimated analytically and added to the error budget.
pub fn graf_phase(
    v: Vec2,
    t_end: f64,
    potential: &PotentialSpec,
    params: &ModelParams,
) -> Result<f64> {
    if potential.regular.is_empty() {
        return Ok(0.0);
    }
    if params.lambda * params.rho <= 1.0 {
        return Err(QsError::Domain(format!(
            "graf phase requires lambda*rho > 1, got {}",
            params.lambda * params.rho
        )));
    }
    if t_end == 0.0 {
        return Ok(0.0);
    }
    let v_norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
    let amp = potential.regular_amplitude_scale();
    let sign = t_end.signum();
    let finite_end = if t_end.is_infinite() {
        sign * graf_cutoff(v_norm, amp, 1e-12, params)
    } else {
        t_end
    };
    let mut f = |tau: f64| {
        let a = alpha(tau, params);
        potential.eval_regular([a * v[0], a * v[1]])
    };
    let val = quadrature::integrate_real(&mut f, 0.0, finite_end, 1e-10)?;
    // Analytic tail bound for the truncated part, kept as a sanity check.
    if t_end.is_infinite() {
        let t_c = finite_end.abs();
        let lam = params.lambda;
        let rho = params.rho;
        let tail = if v_norm > 0.0 {
            amp * (v_norm / (2.0 * lam - 1.0)).powf(-rho) * t_c.powf(1.0 - lam * rho)
                / (lam * rho - 1.0)
        } else {
            0.0
        };
        if tail > 1e-9 {
            return Err(QsError::Numerical(format!(
                "graf tail bound {tail:e} above tolerance at cutoff t={t_c}"
            )));
        }
    }
    Ok(val)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{PotentialSpec, RegularTerm};

    fn params(sigma: f64, rho: f64) -> ModelParams {
        ModelParams::continuous(sigma, rho).unwrap()
    }

    #[test]
    fn lambda_examples() {
        assert!((lambda_of_sigma(2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((lambda_of_sigma(6.0).unwrap() - 3.0).abs() < 1e-15);
        assert!((lambda_of_sigma(0.25).unwrap() - 1.2071067811865475).abs() < 1e-15);
        assert!(lambda_of_sigma(0.0).is_err());
        assert!(lambda_of_sigma(-1.0).is_err());
    }

    #[test]
    fn lambda_identity_random_sigma() {
        // λ(λ−1) = σ to 1e−12 relative over 10⁴ draws in (0, 100].
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..10_000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            let sigma = 100.0 * u.max(1e-12);
            let lam = lambda_of_sigma(sigma).unwrap();
            assert!(
                (lam * (lam - 1.0) - sigma).abs() <= 1e-12 * sigma.max(1.0),
                "sigma={sigma}"
            );
        }
    }

    #[test]
    fn k_coeff_branches() {
        let p = ModelParams::new(1.0, 2.0, 0.8).unwrap();
        assert_eq!(k_coeff(0.5, &p), 1.0);
        assert_eq!(k_coeff(2.0, &p), 0.5);
        assert_eq!(k_coeff(-4.0, &p), 0.125);
    }

    #[test]
    fn k_coeff_even_and_continuous_when_matched() {
        let p = params(2.0, 0.8); // omega = sqrt(2)
        for t in [0.1, 0.7, 1.5, 3.0, 20.0] {
            assert_eq!(k_coeff(t, &p), k_coeff(-t, &p));
        }
        let inside = k_coeff(1.0, &p);
        let outside = k_coeff(1.0 + 1e-12, &p);
        assert!((inside - outside).abs() < 1e-9);
    }

    #[test]
    fn alpha_examples_and_oddness() {
        let p = ModelParams::new(1.0, 2.0, 0.8).unwrap();
        assert_eq!(alpha(0.0, &p), 0.0);
        assert!((alpha(2.0, &p) - 4.0 / 3.0).abs() < 1e-12);
        assert!((alpha(1.0, &p) - 1.1752011936438014).abs() < 1e-12);
        for t in [0.3, 0.9, 1.0, 1.7, 5.0] {
            assert_eq!(alpha(-t, &p), -alpha(t, &p));
        }
    }

    #[test]
    fn flow_zero_initial_data() {
        let p = params(2.0, 0.8);
        let path = classical_flow([0.0, 0.0], -3.0, 3.0, 1e-3, &p).unwrap();
        let (_, q, v, s) = path.last();
        assert_eq!(q, [0.0, 0.0]);
        assert_eq!(v, [0.0, 0.0]);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn flow_matches_power_law() {
        // x(t) = c t^λ solves the outer Newton equation; σ=2 ⇒ λ=2, and
        // (q, p)(1) = (1, 2) ⇒ q(3) = 9.
        let p = params(2.0, 0.8);
        let path = classical_flow_from(([1.0, 0.0], [2.0, 0.0], 0.0), 1.0, 3.0, 1e-4, &p).unwrap();
        let (_, q, v, _) = path.last();
        assert!((q[0] - 9.0).abs() / 9.0 < 1e-6, "q = {q:?}");
        assert!((v[0] - 6.0).abs() / 6.0 < 1e-6, "p = {v:?}");
    }

    #[test]
    fn flow_matches_sinh_inside() {
        let p = ModelParams::new(1.0, 2.0, 0.8).unwrap();
        let path = classical_flow([1.0, 0.0], 0.0, 1.0, 1e-4, &p).unwrap();
        for (i, &t) in path.times.iter().enumerate() {
            assert!(
                (path.q[i][0] - t.sinh()).abs() < 1e-8,
                "t={t}, q={}",
                path.q[i][0]
            );
        }
    }

    #[test]
    fn flow_time_reversal() {
        let p = params(2.0, 0.8);
        let fwd = classical_flow([1.3, -0.4], -2.5, 2.5, 1e-3, &p).unwrap();
        let (_, q1, p1, s1) = fwd.last();
        let back = classical_flow_from((q1, p1, s1), 2.5, -2.5, 1e-3, &p).unwrap();
        let (_, q0, p0, _) = back.last();
        assert!(q0[0].abs() < 1e-9 && q0[1].abs() < 1e-9, "q0 = {q0:?}");
        assert!(
            (p0[0] - 1.3).abs() < 1e-9 && (p0[1] + 0.4).abs() < 1e-9,
            "p0 = {p0:?}"
        );
    }

    #[test]
    fn flow_equals_alpha_inside() {
        // For |t| ≤ 1 and q(0)=0, p(0)=v the true flow is α(t)·v.
        let p = params(1.25, 0.8);
        let v = [0.7, -1.1];
        let path = classical_flow(v, 0.0, 1.0, 1e-4, &p).unwrap();
        for (i, &t) in path.times.iter().enumerate() {
            let a = alpha(t, &p);
            for ax in 0..2 {
                assert!(
                    (path.q[i][ax] - a * v[ax]).abs() < 1e-8,
                    "t={t} axis={ax}"
                );
            }
        }
    }

    #[test]
    fn fundamental_matrix_symplectic() {
        let p = params(2.0, 0.8);
        let m = fundamental_matrix(-2.0, 3.0, 1e-3, &p).unwrap();
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert!((det - 1.0).abs() < 1e-9, "det = {det}");
    }

    #[test]
    fn graf_phase_trivial_and_monotone() {
        let p = params(2.0, 0.8);
        let empty = PotentialSpec::default();
        assert_eq!(graf_phase([8.0, 0.0], f64::INFINITY, &empty, &p).unwrap(), 0.0);

        let bump = PotentialSpec::regular_only(vec![RegularTerm::Gaussian {
            amplitude: 1.0,
            center: [0.0, 0.0],
            width: 1.0,
        }]);
        assert_eq!(graf_phase([8.0, 0.0], 0.0, &bump, &p).unwrap(), 0.0);
        let p8 = graf_phase([8.0, 0.0], f64::INFINITY, &bump, &p).unwrap();
        let p16 = graf_phase([16.0, 0.0], f64::INFINITY, &bump, &p).unwrap();
        assert!(p16.abs() < p8.abs(), "phase(16)={p16}, phase(8)={p8}");
    }

    #[test]
    fn graf_phase_power_decay_finite() {
        let p = ModelParams::new(1.0, 6.0, 0.4).unwrap();
        let pow = PotentialSpec::regular_only(vec![RegularTerm::PowerDecay {
            amplitude: 0.75,
            center: [0.0, 1.0],
            rho_eff: 0.4,
        }]);
        let full = graf_phase([8.0, 0.0], f64::INFINITY, &pow, &p).unwrap();
        assert!(full.is_finite() && full.abs() > 0.1, "got {full}");
    }
}
