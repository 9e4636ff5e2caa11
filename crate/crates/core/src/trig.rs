//! Complex trigonometric helpers that stay finite for large imaginary parts.

use num_complex::Complex64 as C64;

/// Principal-branch-free `ln sin z`: any logarithm of `sin z`, accurate even
/// when `|Im z|` is large enough for `sin z` itself to overflow.
pub fn ln_sin(z: C64) -> C64 {
    let i = C64::i();
    if z.im.abs() < 20.0 {
        return z.sin().ln();
    }
    // sin z = (e^{iz} - e^{-iz}) / 2i; factor out the dominant exponential.
    if z.im > 0.0 {
        // e^{-iz} dominates
        let small = (2.0 * i * z).exp();
        -i * z + (1.0 - small).ln() - (2.0 * i).ln() + C64::new(0.0, std::f64::consts::PI)
    } else {
        let small = (-2.0 * i * z).exp();
        i * z + (1.0 - small).ln() - (2.0 * i).ln()
    }
}

pub fn cot(z: C64) -> C64 {
    if z.im.abs() > 20.0 {
        return C64::new(0.0, -z.im.signum());
    }
    z.cos() / z.sin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_sin_matches_direct_where_finite() {
        for z in [
            C64::new(0.3, 25.0),
            C64::new(-1.1, -22.0),
            C64::new(2.0, 0.5),
            C64::new(0.7, 30.0),
        ] {
            let got = ln_sin(z).exp();
            let want = z.sin();
            assert!((got - want).norm() <= 1e-13 * want.norm(), "{z}");
        }
    }

    #[test]
    fn cot_limits() {
        assert!((cot(C64::new(0.4, 0.0)) - 1.0 / 0.4f64.tan()).norm() < 1e-14);
        assert!((cot(C64::new(0.4, 40.0)) - C64::new(0.0, -1.0)).norm() < 1e-14);
    }
}
