use heisenberg_osc::beta::{beta_of_points, Normalization};
use heisenberg_osc::{Ball, Error, Point};
use proptest::prelude::*;

fn cloud(seed: u64, noise: f64) -> Vec<(Point, f64)> {
    use rand::{Rng, SeedableRng};
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..150)
        .map(|_| {
            let e = noise * (2.0 * r.random::<f64>() - 1.0);
            let (y, t) = (1.2 * r.random::<f64>() - 0.6, 0.4 * r.random::<f64>() - 0.2);
            (Point::new(e, y, t), 0.5 + r.random::<f64>())
        })
        .collect()
}

fn beta(points: &[(Point, f64)], ball: &Ball, p: f64) -> f64 {
    beta_of_points(points, ball, p, Normalization::Radius).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scale_invariant(seed in 0u64..10_000, noise in 0.0f64..0.3, l in 0.2f64..5.0, pk in 0usize..3) {
        let p = [1.0, 2.0, f64::INFINITY][pk];
        let pts = cloud(seed, noise);
        let ball = Ball::centered(1.0).unwrap();
        let scaled: Vec<_> = pts.iter().map(|(q, w)| (q.dilate(l).unwrap(), w * l.powi(3))).collect();
        let (a, b) = (beta(&pts, &ball, p), beta(&scaled, &ball.transform(Point::IDENTITY, l).unwrap(), p));
        prop_assert!((a - b).abs() <= 1e-6 * a.max(1e-3), "{} vs {}", a, b);
    }

    #[test]
    fn translation_invariant(seed in 0u64..10_000, noise in 0.0f64..0.3, gx in -2.0f64..2.0, gy in -2.0f64..2.0, gt in -2.0f64..2.0) {
        let g = Point::new(gx, gy, gt);
        let pts = cloud(seed, noise);
        let ball = Ball::centered(1.0).unwrap();
        let moved: Vec<_> = pts.iter().map(|(q, w)| (g.mul(*q), *w)).collect();
        let (a, b) = (beta(&pts, &ball, 1.0), beta(&moved, &ball.transform(g, 1.0).unwrap(), 1.0));
        prop_assert!((a - b).abs() <= 1e-6 * a.max(1e-3), "{} vs {}", a, b);
    }

    #[test]
    fn bounded_by_one_and_monotone(seed in 0u64..10_000, noise in 0.0f64..1.0) {
        let pts = cloud(seed, noise);
        let ball = Ball::centered(1.0).unwrap();
        let vals: Vec<f64> = [1.0, 1.5, 2.0, 4.0, f64::INFINITY]
            .iter()
            .map(|&p| beta_of_points(&pts, &ball, p, Normalization::Mass).unwrap().value)
            .collect();
        for w in vals.windows(2) {
            prop_assert!(w[0] <= w[1] * (1.0 + 1e-9));
        }
        prop_assert!(vals[4] <= 1.0);
    }
}

#[test]
fn points_on_a_plane_give_zero() {
    for theta in [0.0, 0.7, 2.0] {
        let pts: Vec<_> = cloud(1, 0.0).into_iter().map(|(q, w)| (q.rotate(theta), w)).collect();
        for p in [1.0, 2.0, f64::INFINITY] {
            assert!(beta(&pts, &Ball::centered(1.0).unwrap(), p) < 1e-6);
        }
    }
}

#[test]
fn empty_ball_is_an_error() {
    let far = vec![(Point::new(10.0, 0.0, 0.0), 1.0)];
    assert!(matches!(beta_of_points(&far, &Ball::centered(1.0).unwrap(), 1.0, Normalization::Radius), Err(Error::EmptyBall)));
}
