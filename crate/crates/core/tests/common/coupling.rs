//! Exhaustive monotone-coupling enumeration for the discrete Fréchet distance.

use homophily_bench::frechet::Point;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Minimum over every monotone coupling of the maximum coupled distance,
/// by explicit enumeration of lattice paths.
pub fn exhaustive(p: &[Point], q: &[Point]) -> f64 {
    fn walk(p: &[Point], q: &[Point], i: usize, j: usize, worst: f64, best: &mut f64) {
        let worst = worst.max(dist(p[i], q[j]));
        if i + 1 == p.len() && j + 1 == q.len() {
            *best = best.min(worst);
            return;
        }
        if i + 1 < p.len() {
            walk(p, q, i + 1, j, worst, best);
        }
        if j + 1 < q.len() {
            walk(p, q, i, j + 1, worst, best);
        }
        if i + 1 < p.len() && j + 1 < q.len() {
            walk(p, q, i + 1, j + 1, worst, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(p, q, 0, 0, 0.0, &mut best);
    best
}

pub fn random_curve(rng: &mut ChaCha8Rng) -> Vec<Point> {
    let len = rng.random_range(1..=6);
    (0..len).map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]).collect()
}
