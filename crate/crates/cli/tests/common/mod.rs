//! Seeded random matrices shared by the integration targets.
#![allow(dead_code)]

use oprange::linalg::rational;
use oprange::{Field, Matrix, Rational, Tolerance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries `p/q` with `p` in -3..=3 and `q` in 1..=3.
pub fn small_rational(rng: &mut impl Rng) -> Q {
    rational(rng.random_range(-3..=3), rng.random_range(1..=3))
}

pub fn rational_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix<Q> {
    Matrix::from_fn(rows, cols, |_, _| small_rational(rng))
}

pub fn float_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix<f64> {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// How a random pair was drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// `B = T A`, so `B` is dominated by `A`.
    Factored,
    /// Independent entries.
    Random,
    /// `A` of deficient rank, `B` independent.
    LowRankA,
}

pub struct RandomPair<F> {
    pub a: Matrix<F>,
    pub b: Matrix<F>,
    pub shape: Shape,
}

fn pick_shape(rng: &mut impl Rng) -> Shape {
    match rng.random_range(0..3) {
        0 => Shape::Factored,
        1 => Shape::Random,
        _ => Shape::LowRankA,
    }
}

fn pair_with<F: Field, R: Rng>(
    rng: &mut R,
    max_dim: usize,
    draw: &mut impl FnMut(&mut R, usize, usize) -> Matrix<F>,
) -> RandomPair<F> {
    let n = rng.random_range(1..=max_dim);
    let m = rng.random_range(1..=max_dim);
    let k = rng.random_range(1..=max_dim);
    let shape = pick_shape(rng);
    let (a, b) = match shape {
        Shape::Factored => {
            let a = draw(rng, m, n);
            let t = draw(rng, k, m);
            let b = &t * &a;
            (a, b)
        }
        Shape::Random => (draw(rng, m, n), draw(rng, k, n)),
        Shape::LowRankA => {
            let r = rng.random_range(0..=m.min(n).saturating_sub(1));
            let a = &draw(rng, m, r) * &draw(rng, r, n);
            (a, draw(rng, k, n))
        }
    };
    RandomPair { a, b, shape }
}

pub fn rational_pair(rng: &mut impl Rng, max_dim: usize) -> RandomPair<Q> {
    pair_with(rng, max_dim, &mut |r, i, j| rational_matrix(r, i, j))
}

pub fn float_pair(rng: &mut impl Rng, max_dim: usize) -> RandomPair<f64> {
    pair_with(rng, max_dim, &mut |r, i, j| float_matrix(r, i, j))
}

/// Random invertible rational matrix: unit lower times unit upper triangular.
pub fn invertible_rational(rng: &mut impl Rng, n: usize) -> Matrix<Q> {
    let lower = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => small_rational(rng),
        std::cmp::Ordering::Equal => Q::one(),
        std::cmp::Ordering::Less => Q::zero(),
    });
    let upper = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => small_rational(rng),
        std::cmp::Ordering::Equal => rational(rng.random_range(1..=3), 1),
        std::cmp::Ordering::Greater => Q::zero(),
    });
    &lower * &upper
}

/// Rational orthogonal matrix `(I - S)(I + S)^{-1}` for a random skew `S`.
pub fn cayley_orthogonal(rng: &mut impl Rng, n: usize) -> Matrix<Q> {
    let mut s = Matrix::<Q>::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let x = small_rational(rng);
            s[(i, j)] = x.clone();
            s[(j, i)] = -x;
        }
    }
    let id = Matrix::<Q>::identity(n);
    let inverse = Q::pinv(&(&id + &s), &Tolerance::default());
    &(&id - &s) * &inverse
}

pub fn max_diff(x: &Matrix<f64>, y: &Matrix<f64>) -> f64 {
    (x - y).max_abs()
}
