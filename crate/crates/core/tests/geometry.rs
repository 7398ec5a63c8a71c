use friendly_core::analysis::rationals_in_six_dilate;
use friendly_core::geometry::{affine_basis, distance, integer_determinant};
use friendly_core::{greedy_cover, hyperplane_witness, simplex_volume_times_dfact, Ball, DyadicScale, RationalPoint, Simplex};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn point_in_ball(b: &Ball, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..b.dim()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        if u.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return b.center().iter().zip(&u).map(|(c, x)| c + b.radius() * x).collect();
        }
    }
}

/// Partial-pivot LU determinant in floating point.
fn float_det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs())).unwrap();
        if m[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    det
}

/// Rank of the difference vectors by exact fraction-free elimination,
/// written independently of the library's echelon routine.
fn exact_affine_rank(pts: &[RationalPoint]) -> usize {
    let d = pts[0].dim();
    let q0 = pts[0].denominator();
    let mut rows: Vec<Vec<BigInt>> = pts[1..]
        .iter()
        .map(|p| {
            (0..d)
                .map(|k| &p.numerators()[k] * q0 - &pts[0].numerators()[k] * p.denominator())
                .collect()
        })
        .collect();
    let mut rank = 0;
    for col in 0..d {
        let Some(piv) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        for i in 0..rows.len() {
            if i != rank && !rows[i][col].is_zero() {
                let (a, b) = (rows[rank][col].clone(), rows[i][col].clone());
                for j in 0..d {
                    rows[i][j] = &rows[i][j] * &a - &rows[rank][j] * &b;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn rational(num: &[i64], den: i64) -> RationalPoint {
    RationalPoint::from_i64(num, den).unwrap()
}

const BOUND: i64 = 1 << 30;

fn simplex_strategy() -> impl Strategy<Value = (usize, Vec<(Vec<i64>, i64)>, bool)> {
    (1usize..=3).prop_flat_map(|d| {
        (
            Just(d),
            prop::collection::vec((prop::collection::vec(-BOUND..BOUND, d), 1..BOUND), d + 1),
            any::<bool>(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn greedy_cover_is_disjoint_and_covers(
        d in 1usize..=3,
        count in 1usize..=150,
        r in 0.005f64..0.2,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let balls: Vec<Ball> = (0..count)
            .map(|_| Ball::new((0..d).map(|_| rng.random::<f64>()).collect(), r).unwrap())
            .collect();
        let cover = greedy_cover(&balls).unwrap();
        for (i, a) in cover.chosen.iter().enumerate() {
            for b in &cover.chosen[i + 1..] {
                prop_assert!(distance(a.center(), b.center()) > 2.0 * r);
            }
        }
        for _ in 0..1000 {
            let b = &balls[rng.random_range(0..count)];
            let x = point_in_ball(b, &mut rng);
            prop_assert!(cover.chosen.iter().any(|c| c.dilate(3.0).contains(&x)));
        }
    }

    #[test]
    fn simplex_volume_matches_float_and_rank((d, raw, degenerate) in simplex_strategy()) {
        let mut pts: Vec<RationalPoint> = raw.iter().map(|(p, q)| rational(p, *q)).collect();
        if degenerate && d >= 2 {
            // last vertex becomes the midpoint of the first two
            let (a, b) = (&pts[0], &pts[1]);
            let den = BigInt::from(2) * a.denominator() * b.denominator();
            let num = (0..d)
                .map(|k| &a.numerators()[k] * b.denominator() + &b.numerators()[k] * a.denominator())
                .collect();
            pts[d] = RationalPoint::new(num, den).unwrap();
        }
        let exact = simplex_volume_times_dfact(&Simplex::new(pts.clone()).unwrap());
        let rank = exact_affine_rank(&pts);
        prop_assert_eq!(exact.is_zero(), rank < d);
        prop_assert_eq!(affine_basis(&pts).unwrap().len() - 1, rank);
        if !exact.is_zero() {
            let rows: Vec<Vec<f64>> = pts
                .iter()
                .map(|p| std::iter::once(1.0).chain(p.to_f64()).collect())
                .collect();
            let float = float_det(rows).abs();
            let exact = exact.to_f64().unwrap();
            prop_assert!((float - exact).abs() <= 1e-6 * exact, "float {} exact {}", float, exact);
        }
    }

    #[test]
    fn rationals_near_a_small_ball_lie_on_a_hyperplane(
        d in 1usize..=2,
        n in 1u32..=6,
        center in prop::collection::vec(0.0f64..1.0, 2),
    ) {
        let scale = DyadicScale::new(n, d).unwrap();
        let ball = scale.ball(center[..d].to_vec()).unwrap();
        let pts = rationals_in_six_dilate(&ball, n).unwrap();
        prop_assert!(hyperplane_witness(&pts, &ball, &scale).unwrap().is_plane());
    }
}

#[test]
fn integer_determinant_of_known_matrices() {
    let m = |rows: &[&[i64]]| -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    };
    assert_eq!(integer_determinant(m(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 5]])), BigInt::from(30));
    assert_eq!(integer_determinant(m(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
    assert_eq!(integer_determinant(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]])), BigInt::from(0));
    let big = 1i64 << 40;
    assert_eq!(
        integer_determinant(m(&[&[big, 1], &[1, big]])),
        BigInt::from(big) * BigInt::from(big) - 1
    );
}

#[test]
fn volume_ceiling_identity() {
    for d in 1..=3 {
        for n in 0..=20 {
            let s = DyadicScale::new(n, d).unwrap();
            let lhs = s.kappa() * (6.0 * s.r_n()).powi(d as i32);
            let fact = (1..=d).product::<usize>() as f64;
            let rhs = 2f64.powi(-((d as i32 + 1) * (n as i32 + 1))) / fact;
            assert!((lhs - rhs).abs() <= 1e-12 * rhs, "d={d} n={n}: {lhs} vs {rhs}");
            assert!((s.six_dilate_volume() - s.volume_ceiling()).abs() <= 1e-12 * rhs);
        }
    }
}

#[test]
fn one_dimensional_radius_is_a_constant_multiple_of_the_line_case() {
    // the d = 1 argument works with 2 r_n = 2^{-2(n+1)}; the general
    // formula differs from it by a fixed factor
    let ratios: Vec<f64> = (1..=8)
        .map(|n| {
            let s = DyadicScale::new(n, 1).unwrap();
            (2.0 * s.r_n()) / 2f64.powi(-2 * (n as i32 + 1))
        })
        .collect();
    assert!(ratios.iter().all(|r| (r - ratios[0]).abs() < 1e-12 && *r < 1.0));
}
