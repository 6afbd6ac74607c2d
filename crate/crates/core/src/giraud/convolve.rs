//! Convolution of radial kernels on R^n.
//!
//! For |x| = r the convolution reduces to the triangle integral
//! (f⋆g)(r) = ω_{n−2} r^{2−n} ∫∫_{|r−s| ≤ t ≤ r+s} f(s) g(t) s t (2A)^{n−3} dt ds,
//! where A is the area of the triangle with sides r, s, t. The inner
//! integral is parametrised by t = c − w cos φ, which removes the square-root
//! endpoint behaviour for every n.

use crate::error::{Error, Result};
use crate::euclid::gamma::gamma_half_integer;
use crate::euclid::RadialKernel;
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvolutionValue {
    pub value: f64,
    pub error: f64,
}

/// Area of the unit sphere S^{m}.
pub fn sphere_area(m: u32) -> f64 {
    2.0 * PI.powf((m as f64 + 1.0) / 2.0) / gamma_half_integer(m + 1)
}

fn check_inputs(f: &RadialKernel, g: &RadialKernel, n: u32, r: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("radial convolution needs n ≥ 2, got {n}")));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("evaluation radius must be positive, got {r}")));
    }
    for (name, k) in [("f", f), ("g", g)] {
        if k.sing_exp <= -(n as f64) {
            return Err(Error::Domain(format!(
                "{name} ~ r^{} is not locally integrable in dimension {n}",
                k.sing_exp
            )));
        }
    }
    if let (Some((nf, k1)), Some((ng, k2))) = (f.polyharmonic, g.polyharmonic) {
        if nf != n || ng != n {
            return Err(Error::Domain("kernel dimension does not match n".into()));
        }
        if 2 * (k1 + k2) >= n {
            return Err(Error::NotApplicable(format!(
                "G^({k1}) ⋆ G^({k2}) requires 2(k1+k2) < n, here 2·{} ≥ {n}",
                k1 + k2
            )));
        }
    }
    Ok(())
}

/// (f ⋆ g)(r) in R^n with an error estimate.
///
/// `opts` governs the outer integral; the inner one runs a hundred times
/// tighter. Fails with a convergence error carrying the best estimate when
/// the budget is exhausted.
pub fn radial_convolve(
    f: &RadialKernel,
    g: &RadialKernel,
    n: u32,
    r: f64,
    opts: QuadOptions,
) -> Result<ConvolutionValue> {
    check_inputs(f, g, n, r)?;
    let inner_opts = QuadOptions {
        abs_tol: opts.abs_tol * 1e-3,
        rel_tol: opts.rel_tol * 1e-2,
        max_intervals: opts.max_intervals,
    };
    let expo = n as i32 - 3;
    let inner = |s: f64| -> (f64, f64) {
        let big = r + s;
        let small = (r - s).abs();
        let c = 0.5 * (big + small);
        let w = 0.5 * (big - small);
        if w <= 0.0 {
            return (0.0, 0.0);
        }
        let h = |phi: f64| {
            let t = c - w * phi.cos();
            if t <= 0.0 {
                return 0.0;
            }
            let gt = g.eval(t);
            if gt == 0.0 {
                return 0.0;
            }
            let sp = phi.sin();
            let two_area = 0.5 * w * sp * ((big + t) * (t + small)).sqrt();
            gt * t * two_area.powi(expo) * w * sp
        };
        let mut pts = vec![0.0];
        for &b in &g.breaks {
            if b > small && b < big {
                pts.push(((c - b) / w).clamp(-1.0, 1.0).acos());
            }
        }
        if let Some(sg) = g.support {
            if sg > small && sg < big {
                pts.push(((c - sg) / w).clamp(-1.0, 1.0).acos());
            }
        }
        pts.push(PI);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        let res = integrate(h, &pts, inner_opts);
        (res.value, res.error)
    };
    let outer = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let fs = f.eval(s);
        if fs == 0.0 || !fs.is_finite() {
            return 0.0;
        }
        fs * s * inner(s).0
    };

    let mut pts = vec![0.0, r];
    let mut extra: Vec<f64> = f.breaks.clone();
    for &b in g.breaks.iter().chain(g.support.iter()) {
        extra.push(b + r);
        extra.push((b - r).abs());
    }
    extra.push(0.5 * r);
    extra.push(2.0 * r);
    let upper = match (f.support, g.support) {
        (Some(a), Some(b)) => Some(a.min(b + r)),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b + r),
        (None, None) => None,
    };
    for e in extra {
        if e > 0.0 && upper.is_none_or(|u| e < u) {
            pts.push(e);
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();

    let pref = sphere_area(n - 2) / r.powi(n as i32 - 2);
    let res = match upper {
        Some(u) => {
            pts.push(u);
            integrate(outer, &pts, opts)
        }
        None => {
            let last = *pts.last().unwrap();
            let head = integrate(outer, &pts, opts);
            let len = f.decay_length.max(g.decay_length).max(1e-12);
            let tail = integrate_to_infinity(outer, last, len, &[last + 10.0 * len], opts);
            crate::quad::QuadResult {
                value: head.value + tail.value,
                error: head.error + tail.error,
                evals: head.evals + tail.evals,
                converged: head.converged && tail.converged,
            }
        }
    };
    let value = pref * res.value;
    let error = pref * res.error;
    if !res.converged {
        return Err(Error::Convergence {
            msg: format!("radial convolution at r = {r}"),
            best: value,
            err: error,
        });
    }
    Ok(ConvolutionValue { value, error })
}
