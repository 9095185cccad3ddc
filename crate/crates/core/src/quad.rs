//! Adaptive quadrature for smooth spectral densities.

use crate::Error;

const MAX_DEPTH: u32 = 60;
// Subdivisions taken unconditionally so narrow features that straddle the
// coarse Simpson nodes (e.g. an integrand vanishing at the midpoint and
// endpoints) cannot trigger a spurious early acceptance.
const MIN_DEPTH: u32 = 6;

/// Adaptive Simpson integration of `f` over `[a, b]`.
///
/// `rel_tol` is interpreted against the magnitude of the running estimate;
/// an absolute floor protects integrals that are genuinely zero.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64, Error> {
    if a == b {
        return Ok(0.0);
    }
    // Rough scale pass to convert the relative tolerance into an absolute one.
    let n = 64;
    let h = (b - a) / n as f64;
    let mut scale = 0.0f64;
    for k in 0..=n {
        scale = scale.max(f(a + h * k as f64).abs());
    }
    let abs_tol = (scale * (b - a).abs() * rel_tol).max(1e-300);

    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, abs_tol, MAX_DEPTH, MIN_DEPTH)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    force: u32,
) -> Result<f64, Error> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if force == 0 && delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureNonConvergence(delta.abs()));
    }
    let next_force = force.saturating_sub(1);
    let l = adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, next_force)?;
    let r = adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, next_force)?;
    Ok(l + r)
}

/// Integrate over the union of possibly overlapping closed intervals,
/// counting overlap regions once.
pub fn integrate_union<F: Fn(f64) -> f64>(
    f: &F,
    intervals: &[(f64, f64)],
    rel_tol: f64,
) -> Result<f64, Error> {
    let mut sorted: Vec<(f64, f64)> = intervals
        .iter()
        .filter(|(a, b)| b > a)
        .copied()
        .collect();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in sorted {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    let mut total = 0.0;
    for (a, b) in merged {
        total += integrate(f, a, b, rel_tol)?;
    }
    Ok(total)
}
