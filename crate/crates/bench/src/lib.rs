//! Fixtures shared by the criterion benches.

use friendly_core::ifs::systems;
use friendly_core::{Ball, DyadicScale, IteratedFunctionSystem};

pub fn cantor() -> IteratedFunctionSystem {
    systems::cantor()
}

pub fn gasket() -> IteratedFunctionSystem {
    systems::sierpinski_gasket()
}

/// `count` balls of radius `r` with pseudo-random centres in `[0, 1]^d`.
pub fn overlapping_balls(count: usize, d: usize, r: f64) -> Vec<Ball> {
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    (0..count)
        .map(|_| Ball::new((0..d).map(|_| next()).collect(), r).expect("positive radius"))
        .collect()
}

/// Integer matrix with entries of about `bits` bits, deterministic.
pub fn integer_matrix(n: usize, bits: u32) -> Vec<Vec<i64>> {
    let m = 1i64 << bits;
    (0..n)
        .map(|i| (0..n).map(|j| ((i * 7919 + j * 104_729 + i * j * 31) as i64 % m) - m / 2).collect())
        .collect()
}

/// A ball of radius `r_n` placed off-centre in the unit cube.
pub fn block_ball(n: u32, d: usize) -> (Ball, DyadicScale) {
    let scale = DyadicScale::new(n, d).expect("valid block");
    let ball = scale.ball(vec![0.377; d]).expect("valid ball");
    (ball, scale)
}
