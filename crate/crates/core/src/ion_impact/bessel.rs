use std::f64::consts::FRAC_PI_4;

/// Below this the power series is accurate to ~1e-13; above it the
/// optimally truncated Hankel expansion is better than 1e-12.
const SERIES_LIMIT: f64 = 12.0;

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_LIMIT {
        series(x)
    } else {
        hankel(x)
    }
}

fn series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -y / (k * k);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && k > y {
            return sum;
        }
    }
}

fn hankel(x: f64) -> f64 {
    // a_k = Π_{j≤k} (−(2j−1)²) / (k! (8x)^k), summed until terms start to grow.
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut k = 0u32;
    loop {
        k += 1;
        let next = term * -f64::from((2 * k - 1).pow(2)) / (f64::from(k) * 8.0 * x);
        if next.abs() >= term.abs() || k > 60 {
            break;
        }
        term = next;
        let sign = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        if k.is_multiple_of(2) {
            p += sign * term;
        } else {
            q += sign * term;
        }
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}
