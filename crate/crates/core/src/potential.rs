//! Analytic potential families with closed-form gradients, plus the decay
//! sampler that checks them against the short-range bounds.

use crate::error::Result;
use crate::physics::{ModelParams, Vec2};
use serde::{Deserialize, Serialize};

/// Regular (C¹) potential terms.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegularTerm {
    /// A e^{−|x−c|²/(2w²)}
    Gaussian {
        amplitude: f64,
        center: Vec2,
        width: f64,
    },
    /// A ⟨x−c⟩^{−ρ_eff}
    PowerDecay {
        amplitude: f64,
        center: Vec2,
        rho_eff: f64,
    },
}

/// Mollified Coulomb-like term A·χ(|r|/R_c)/√(|r|²+ε²) with a smooth compact
/// cutoff χ. Stands in for the paper-class L^q singular part, which a uniform
/// grid cannot represent.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SingularTerm {
    pub amplitude: f64,
    pub center: Vec2,
    pub mollifier_eps: f64,
}

/// Cutoff radius of the singular terms' compact support.
pub const SINGULAR_CUTOFF_RADIUS: f64 = 4.0;

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct PotentialSpec {
    #[serde(default)]
    pub regular: Vec<RegularTerm>,
    #[serde(default)]
    pub singular: Vec<SingularTerm>,
}

/// Smooth bridge: 1 for s ≤ 1/2, 0 for s ≥ 1, C^∞ in between.
fn bump_bridge(s: f64) -> f64 {
    if s <= 0.5 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let f = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
        let a = f(2.0 - 2.0 * s);
        let b = f(2.0 * s - 1.0);
        a / (a + b)
    }
}

fn bump_bridge_deriv(s: f64) -> f64 {
    if s <= 0.5 || s >= 1.0 {
        0.0
    } else {
        // d/ds of f(2−2s)/(f(2−2s)+f(2s−1)) with f(t) = e^{−1/t}.
        let f = |t: f64| (-1.0 / t).exp();
        let fp = |t: f64| (-1.0 / t).exp() / (t * t);
        let u = 2.0 - 2.0 * s;
        let v = 2.0 * s - 1.0;
        let (fu, fv) = (f(u), f(v));
        let (du, dv) = (-2.0 * fp(u), 2.0 * fp(v));
        (du * fv - fu * dv) / ((fu + fv) * (fu + fv))
    }
}

impl RegularTerm {
    fn eval(&self, x: Vec2) -> f64 {
        match *self {
            RegularTerm::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let dx = x[0] - center[0];
                let dy = x[1] - center[1];
                amplitude * (-(dx * dx + dy * dy) / (2.0 * width * width)).exp()
            }
            RegularTerm::PowerDecay {
                amplitude,
                center,
                rho_eff,
            } => {
                let dx = x[0] - center[0];
                let dy = x[1] - center[1];
                let bracket = (1.0 + dx * dx + dy * dy).sqrt();
                amplitude * bracket.powf(-rho_eff)
            }
        }
    }

    fn grad(&self, x: Vec2) -> Vec2 {
        match *self {
            RegularTerm::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let dx = x[0] - center[0];
                let dy = x[1] - center[1];
                let w2 = width * width;
                let val = amplitude * (-(dx * dx + dy * dy) / (2.0 * w2)).exp();
                [-val * dx / w2, -val * dy / w2]
            }
            RegularTerm::PowerDecay {
                amplitude,
                center,
                rho_eff,
            } => {
                let dx = x[0] - center[0];
                let dy = x[1] - center[1];
                let b2 = 1.0 + dx * dx + dy * dy;
                // d/dx ⟨r⟩^{−ρ} = −ρ ⟨r⟩^{−ρ−2} x
                let f = -amplitude * rho_eff * b2.powf(-0.5 * rho_eff - 1.0);
                [f * dx, f * dy]
            }
        }
    }

    fn amplitude(&self) -> f64 {
        match *self {
            RegularTerm::Gaussian { amplitude, .. } => amplitude.abs(),
            RegularTerm::PowerDecay { amplitude, .. } => amplitude.abs(),
        }
    }
}

impl SingularTerm {
    fn eval(&self, x: Vec2) -> f64 {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        let r = (dx * dx + dy * dy).sqrt();
        let chi = bump_bridge(r / SINGULAR_CUTOFF_RADIUS);
        if chi == 0.0 {
            return 0.0;
        }
        let eps2 = self.mollifier_eps * self.mollifier_eps;
        self.amplitude * chi / (r * r + eps2).sqrt()
    }

    fn grad(&self, x: Vec2) -> Vec2 {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        let r2 = dx * dx + dy * dy;
        let r = r2.sqrt();
        if r == 0.0 {
            return [0.0, 0.0];
        }
        let chi = bump_bridge(r / SINGULAR_CUTOFF_RADIUS);
        let chi_p = bump_bridge_deriv(r / SINGULAR_CUTOFF_RADIUS) / SINGULAR_CUTOFF_RADIUS;
        if chi == 0.0 && chi_p == 0.0 {
            return [0.0, 0.0];
        }
        let eps2 = self.mollifier_eps * self.mollifier_eps;
        let root = (r2 + eps2).sqrt();
        // d/dr [χ(r/Rc)/√(r²+ε²)] = χ'/Rc /√(r²+ε²) − χ r (r²+ε²)^{−3/2}
        let dr = chi_p / root - chi * r / (root * root * root);
        let f = self.amplitude * dr / r;
        [f * dx, f * dy]
    }
}

impl PotentialSpec {
    pub fn regular_only(regular: Vec<RegularTerm>) -> Self {
        PotentialSpec {
            regular,
            singular: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.regular.is_empty() && self.singular.is_empty()
    }

    pub fn eval(&self, x: Vec2) -> f64 {
        self.eval_regular(x) + self.eval_singular(x)
    }

    pub fn eval_regular(&self, x: Vec2) -> f64 {
        self.regular.iter().map(|t| t.eval(x)).sum()
    }

    pub fn eval_singular(&self, x: Vec2) -> f64 {
        self.singular.iter().map(|t| t.eval(x)).sum()
    }

    pub fn grad(&self, x: Vec2) -> Vec2 {
        let mut g = self.grad_regular(x);
        for t in &self.singular {
            let gt = t.grad(x);
            g[0] += gt[0];
            g[1] += gt[1];
        }
        g
    }

    pub fn grad_regular(&self, x: Vec2) -> Vec2 {
        let mut g = [0.0, 0.0];
        for t in &self.regular {
            let gt = t.grad(x);
            g[0] += gt[0];
            g[1] += gt[1];
        }
        g
    }

    /// Σ|A| over regular terms; used for tail bounds of Graf-type integrals.
    pub fn regular_amplitude_scale(&self) -> f64 {
        self.regular.iter().map(|t| t.amplitude()).sum()
    }

    /// Shift every term center by d (translation covariance helper).
    pub fn translated(&self, d: Vec2) -> Self {
        let mut out = self.clone();
        for t in &mut out.regular {
            match t {
                RegularTerm::Gaussian { center, .. } | RegularTerm::PowerDecay { center, .. } => {
                    center[0] += d[0];
                    center[1] += d[1];
                }
            }
        }
        for t in &mut out.singular {
            t.center[0] += d[0];
            t.center[1] += d[1];
        }
        out
    }

    /// Largest radius (from the origin) at which any term still has
    /// non-negligible magnitude `eps` relative to its amplitude. Used to pick
    /// V-interaction windows and quadrature cutoffs.
    pub fn support_radius(&self, eps: f64) -> f64 {
        let mut r_max: f64 = 0.0;
        for t in &self.regular {
            let r = match *t {
                RegularTerm::Gaussian { center, width, .. } => {
                    let c = (center[0] * center[0] + center[1] * center[1]).sqrt();
                    c + width * (-2.0 * eps.ln()).sqrt()
                }
                RegularTerm::PowerDecay {
                    center, rho_eff, ..
                } => {
                    let c = (center[0] * center[0] + center[1] * center[1]).sqrt();
                    c + eps.powf(-1.0 / rho_eff)
                }
            };
            r_max = r_max.max(r);
        }
        for t in &self.singular {
            let c = (t.center[0] * t.center[0] + t.center[1] * t.center[1]).sqrt();
            r_max = r_max.max(c + SINGULAR_CUTOFF_RADIUS);
        }
        r_max
    }
}

/// Decay check report.
#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub passed: bool,
    pub worst_ratio: f64,
    /// log-log slope of the ratio across the last two decades of radius.
    pub trend_slope: f64,
}

/// Sample |V^reg| and |∇V^reg| on log-spaced radii up to 10³ and compare
/// against ⟨x⟩^{−ρ−|β|/2} (σ ≤ 2) or ⟨x⟩^{−ρ−|β|} (σ > 2). Passing means the
/// weighted ratios stay bounded, i.e. show no growth trend across decades.
pub fn check_decay(
    potential: &PotentialSpec,
    params: &ModelParams,
    n_samples: usize,
) -> Result<DecayReport> {
    let n = n_samples.max(1);
    if potential.regular.is_empty() {
        return Ok(DecayReport {
            passed: true,
            worst_ratio: 0.0,
            trend_slope: 0.0,
        });
    }
    let grad_weight_exp = if params.sigma <= 2.0 {
        params.rho + 0.5
    } else {
        params.rho + 1.0
    };
    let dirs = 8;
    let mut samples: Vec<(f64, f64)> = Vec::new(); // (log10 r, log10 ratio)
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let r = 10f64.powf(3.0 * (i as f64 + 0.5) / n as f64); // r in (1, 1000]
        let mut ratio_here: f64 = 0.0;
        for d in 0..dirs {
            let th = std::f64::consts::PI * 2.0 * d as f64 / dirs as f64 + 0.37;
            let x = [r * th.cos(), r * th.sin()];
            let bracket = (1.0 + r * r).sqrt();
            let v = potential.eval_regular(x).abs();
            let g = potential.grad_regular(x);
            let gn = (g[0] * g[0] + g[1] * g[1]).sqrt();
            let r0 = v * bracket.powf(params.rho);
            let r1 = gn * bracket.powf(grad_weight_exp);
            ratio_here = ratio_here.max(r0).max(r1);
        }
        worst = worst.max(ratio_here);
        if ratio_here > 0.0 {
            samples.push((r.log10(), ratio_here.log10()));
        }
    }
    // Fit a slope over the last two decades; positive slope means the bound
    // is violated asymptotically.
    let tail: Vec<&(f64, f64)> = samples.iter().filter(|(lr, _)| *lr >= 1.0).collect();
    let slope = if tail.len() >= 2 {
        let n = tail.len() as f64;
        let sx: f64 = tail.iter().map(|(x, _)| x).sum();
        let sy: f64 = tail.iter().map(|(_, y)| y).sum();
        let sxx: f64 = tail.iter().map(|(x, _)| x * x).sum();
        let sxy: f64 = tail.iter().map(|(x, y)| x * y).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    } else {
        0.0
    };
    let passed = worst.is_finite() && slope <= 0.05;
    Ok(DecayReport {
        passed,
        worst_ratio: worst,
        trend_slope: slope,
    })
}
