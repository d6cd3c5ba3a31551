#![allow(dead_code)]

use qlinear::dmat::{cx, eigenvalues, eye, sigma_max, CMat};
use qlinear::xfer::{tf_eval, StateSpaceTF};
use qlinear::Cx;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        cx(re * s, im * s)
    })
}

/// Random stable system with spectral abscissa in `[-1, -0.1]`.
pub fn random_stable(seed: u64, n: usize, m: usize, p: usize, with_d: bool) -> StateSpaceTF {
    let mut r = rng(seed);
    let raw = gauss(&mut r, n, n).scale(1.0 / (n as f64).sqrt());
    let abscissa = eigenvalues(&raw).unwrap().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let target = r.random_range(0.1..1.0);
    let a = raw - eye(n).scale(abscissa + target);
    let b = gauss(&mut r, n, m);
    let c = gauss(&mut r, p, n);
    let d = if with_d { gauss(&mut r, p, m).scale(0.5) } else { CMat::zeros(p, m) };
    StateSpaceTF::new(a, b, c, d).unwrap()
}

pub fn frob2(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `(1/2π) ∫ ‖G(iω)‖_F² dω` over the real line via `ω = tan θ`, split into
/// panels so narrow resonances are not stepped over.
pub fn h2_by_quadrature(g: &StateSpaceTF) -> f64 {
    let tail = frob2(&(g.c() * g.b()));
    let f = |theta: f64| {
        let half = std::f64::consts::FRAC_PI_2;
        if (theta.abs() - half).abs() < 1e-15 {
            return tail;
        }
        let w = theta.tan();
        let v = frob2(&tf_eval(g, Cx::new(0.0, w)).unwrap());
        v * (1.0 + w * w)
    };
    let half = std::f64::consts::FRAC_PI_2;
    let panels = 64;
    let width = 2.0 * half / panels as f64;
    let scale = 1.0 + tail + frob2(g.b()) * frob2(g.c());
    let total: f64 = (0..panels)
        .map(|k| {
            let a = -half + k as f64 * width;
            adaptive_simpson(&f, a, a + width, 1e-11 * scale)
        })
        .sum();
    (total / (2.0 * std::f64::consts::PI)).sqrt()
}

/// Largest `σ_max(G(iω))` over a dense grid, refined tenfold around the best
/// sample, then polished by golden-section search.
pub fn hinf_by_sampling(g: &StateSpaceTF) -> f64 {
    let sv = |w: f64| sigma_max(&tf_eval(g, Cx::new(0.0, w)).unwrap());
    let rho = g.poles().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut pts: Vec<f64> = vec![0.0];
    let count = 4000;
    for k in 0..count {
        let w = rho * 10f64.powf(-4.0 + 8.0 * k as f64 / (count - 1) as f64);
        pts.push(w);
        pts.push(-w);
    }
    pts.extend(g.poles().iter().map(|z| z.im));
    pts.sort_by(f64::total_cmp);
    let vals: Vec<f64> = pts.iter().map(|&w| sv(w)).collect();
    let (mut best_i, mut best) = (0, vals[0]);
    for (i, &v) in vals.iter().enumerate() {
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = pts[best_i.saturating_sub(1)];
    let hi = pts[(best_i + 1).min(pts.len() - 1)];
    // Tenfold refinement of the bracket.
    let fine: Vec<f64> = (0..=100).map(|k| lo + (hi - lo) * k as f64 / 100.0).collect();
    let (mut a, mut b) = (lo, hi);
    for w in &fine {
        let v = sv(*w);
        if v > best {
            best = v;
            a = (w - (hi - lo) / 100.0).max(lo);
            b = (w + (hi - lo) / 100.0).min(hi);
        }
    }
    // Golden-section polish; the peak is unimodal inside the refined bracket.
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        if sv(x1) > sv(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    best.max(sv(0.5 * (a + b))).max(sigma_max(g.d()))
}

/// `∫₀^∞ ‖C e^{At} B‖_F² dt` by Simpson's rule on the exact propagator.
pub fn impulse_energy(g: &StateSpaceTF) -> f64 {
    let rate = g.poles().iter().map(|z| -z.re).fold(f64::INFINITY, f64::min);
    let speed = g.poles().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let h = 0.02 / speed;
    let horizon = 40.0 / rate;
    let steps = ((horizon / h).ceil() as usize).div_ceil(2) * 2;
    let phi = (g.a() * Cx::new(h, 0.0)).exp();
    let mut x = g.b().clone();
    let mut sum = 0.0;
    for k in 0..=steps {
        let w = if k == 0 || k == steps {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * frob2(&(g.c() * &x));
        x = &phi * x;
    }
    sum * h / 3.0
}
