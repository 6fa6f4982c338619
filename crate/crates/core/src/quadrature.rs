//! Adaptive Simpson quadrature, including a mapped variant for integrals over
//! the whole real line.

use crate::error::{QsError, Result};
use num_complex::Complex;

type C64 = Complex<f64>;

struct Adaptive<'a> {
    f: &'a mut dyn FnMut(f64) -> C64,
    abs_tol: f64,
    evals: usize,
    max_evals: usize,
}

impl<'a> Adaptive<'a> {
    fn eval(&mut self, x: f64) -> Result<C64> {
        self.evals += 1;
        if self.evals > self.max_evals {
            return Err(QsError::Numerical(format!(
                "adaptive quadrature exceeded {} evaluations before reaching tolerance {:e}",
                self.max_evals, self.abs_tol
            )));
        }
        Ok((self.f)(x))
    }

    fn simpson(
        &mut self,
        a: f64,
        b: f64,
        fa: C64,
        fm: C64,
        fb: C64,
        whole: C64,
        tol: f64,
        depth: u32,
    ) -> Result<C64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let h = b - a;
        let left = (h / 12.0) * (fa + 4.0 * flm + fm);
        let right = (h / 12.0) * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 {
            return Err(QsError::Numerical(
                "adaptive quadrature hit maximum recursion depth".into(),
            ));
        }
        if delta.norm() <= 15.0 * tol {
            Ok(left + right + delta / 15.0)
        } else {
            let l = self.simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
            let r = self.simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
            Ok(l + r)
        }
    }
}

/// ∫_a^b f(x) dx to absolute tolerance `abs_tol`.
pub fn integrate(
    f: &mut dyn FnMut(f64) -> C64,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Result<C64> {
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut ad = Adaptive {
        f,
        abs_tol,
        evals: 0,
        max_evals: 4_000_000,
    };
    // Seed with a few panels so narrow features in the middle are not missed.
    let panels = 16;
    let h = (b - a) / panels as f64;
    let mut total = C64::new(0.0, 0.0);
    let tol_per = abs_tol / panels as f64;
    for k in 0..panels {
        let pa = a + k as f64 * h;
        let pb = pa + h;
        let m = 0.5 * (pa + pb);
        let fa = ad.eval(pa)?;
        let fm = ad.eval(m)?;
        let fb = ad.eval(pb)?;
        let whole = (h / 6.0) * (fa + 4.0 * fm + fb);
        total += ad.simpson(pa, pb, fa, fm, fb, whole, tol_per, 48)?;
    }
    Ok(total)
}

/// ∫_{-∞}^{∞} f(t) dt via the substitution t = s/(1-s²), s ∈ (−1, 1).
/// Works for integrands with power-law or faster decay.
pub fn integrate_real_line(f: &mut dyn FnMut(f64) -> C64, abs_tol: f64) -> Result<C64> {
    let mut g = |s: f64| -> C64 {
        let d = 1.0 - s * s;
        if d <= 1e-14 {
            return C64::new(0.0, 0.0);
        }
        let t = s / d;
        let jac = (1.0 + s * s) / (d * d);
        f(t) * jac
    };
    integrate(&mut g, -1.0 + 1e-12, 1.0 - 1e-12, abs_tol)
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    let mut g = |x: f64| C64::new(f(x), 0.0);
    Ok(integrate(&mut g, a, b, abs_tol)?.re)
}
