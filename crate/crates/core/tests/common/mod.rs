#![allow(dead_code)]

/// Rounds to the four decimals used in the published segment polynomials.
pub fn printed(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

/// Segment polynomials of the 8-point clamped cubic. `q` is applied to every
/// non-terminating fraction: identity for the exact form, [`printed`] for the
/// published one.
pub fn segment_polynomial(p: &[f64], u: f64, q: impl Fn(f64) -> f64) -> f64 {
    let c = |x: f64| x * x * x;
    match u {
        u if u <= 1.0 => {
            -p[0] * c(u - 1.0) + 0.25 * p[1] * u * (7.0 * u * u - 18.0 * u + 12.0)
                - q(1.0 / 12.0) * p[2] * u * u * (11.0 * u - 18.0)
                + q(1.0 / 6.0) * p[3] * c(u)
        }
        u if u <= 2.0 => {
            -0.25 * p[1] * c(u - 2.0)
                + p[2] * (q(7.0 / 12.0) * c(u) - 3.0 * u * u + 4.5 * u - 1.5)
                - p[3] * (0.5 * c(u) - 2.0 * u * u + 2.0 * u - q(2.0 / 3.0))
                + q(1.0 / 6.0) * p[4] * c(u - 1.0)
        }
        u if u <= 3.0 => {
            -q(1.0 / 6.0) * p[2] * c(u - 3.0)
                + p[3] * (0.5 * c(u) - 4.0 * u * u + 10.0 * u - q(22.0 / 3.0))
                - p[4] * (0.5 * c(u) - 3.5 * u * u + 7.5 * u - q(31.0 / 6.0))
                + q(1.0 / 6.0) * p[5] * c(u - 2.0)
        }
        u if u <= 4.0 => {
            -q(1.0 / 6.0) * p[3] * c(u - 4.0)
                + p[4] * (0.5 * c(u) - 5.5 * u * u + 19.5 * u - q(131.0 / 6.0))
                - p[5] * (q(7.0 / 12.0) * c(u) - 5.75 * u * u + 18.25 * u - q(227.0 / 12.0))
                + 0.25 * p[6] * c(u - 3.0)
        }
        u => {
            -q(1.0 / 6.0) * p[4] * c(u - 5.0)
                + q(1.0 / 12.0) * p[5] * (11.0 * u - 37.0) * (u - 5.0) * (u - 5.0)
                - p[6] * (1.75 * c(u) - 21.75 * u * u + 89.25 * u - 121.25)
                + p[7] * c(u - 4.0)
        }
    }
}

/// Largest pointwise relative deviation of `curve` from the published
/// polynomials on each of the five segments, over 100 samples per segment
/// and both coordinates.
pub fn published_deviation(radii: &[f64], t: &[f64], eval: impl Fn(f64) -> (f64, f64)) -> [f64; 5] {
    let mut out = [0.0; 5];
    for (seg, worst) in out.iter_mut().enumerate() {
        for j in 0..100 {
            let u = seg as f64 + (j as f64 + 0.5) / 100.0;
            let (r, th) = eval(u);
            let r_ref = segment_polynomial(radii, u, printed);
            let t_ref = segment_polynomial(t, u, printed);
            *worst = f64::max(*worst, ((r - r_ref) / r_ref).abs().max(((th - t_ref) / t_ref).abs()));
        }
    }
    out
}
