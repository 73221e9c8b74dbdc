//! Rounding with a small tolerance, so that products like `0.3 * 10.0`
//! land on the intended integer.

const TOL: f64 = 1e-9;

pub fn ceil(x: f64) -> usize {
    if x <= 0.0 {
        0
    } else {
        (x - TOL).ceil().max(0.0) as usize
    }
}

pub fn floor(x: f64) -> usize {
    if x <= 0.0 {
        0
    } else {
        (x + TOL).floor() as usize
    }
}

pub fn round_half_up(x: f64) -> usize {
    floor(x + 0.5)
}

pub fn log2(n: usize) -> f64 {
    (n.max(1) as f64).log2()
}
