use rand::Rng;

use crate::bits::BitVector;

/// Positions flipped by standard bit mutation: each of the `n` bits
/// independently with probability `rate`. Positions are generated in
/// increasing order by geometric skipping, so the cost is proportional to
/// the number of flips.
pub fn standard_bit_flips<R: Rng + ?Sized>(n: usize, rate: f64, rng: &mut R, out: &mut Vec<usize>) {
    out.clear();
    if rate <= 0.0 {
        return;
    }
    if rate >= 1.0 {
        out.extend(0..n);
        return;
    }
    let ln_q = (-rate).ln_1p();
    let mut pos = 0usize;
    loop {
        // 1 - u lies in (0, 1], so the logarithm is finite.
        let u: f64 = rng.random();
        let skip = ((1.0 - u).ln() / ln_q).floor();
        if skip >= (n - pos) as f64 {
            return;
        }
        pos += skip as usize;
        out.push(pos);
        pos += 1;
        if pos >= n {
            return;
        }
    }
}

/// Number of successes of `n` Bernoulli(`rate`) trials.
pub(crate) fn binomial_count<R: Rng + ?Sized>(
    n: usize,
    rate: f64,
    rng: &mut R,
    scratch: &mut Vec<usize>,
) -> usize {
    standard_bit_flips(n, rate, rng, scratch);
    scratch.len()
}

/// `s` distinct positions of `0..n`, uniformly at random.
pub fn sample_distinct<R: Rng + ?Sized>(n: usize, s: usize, rng: &mut R, out: &mut Vec<usize>) {
    out.clear();
    if s == 1 {
        out.push(rng.random_range(0..n));
        return;
    }
    out.extend(rand::seq::index::sample(rng, n, s.min(n)));
}

/// Uniform crossover: each bit from either parent with probability 1/2.
pub(crate) fn uniform_crossover<R: Rng + ?Sized>(
    a: &BitVector,
    b: &BitVector,
    rng: &mut R,
) -> BitVector {
    let words = a
        .words()
        .iter()
        .zip(b.words())
        .map(|(&x, &y)| {
            let m: u64 = rng.random();
            (x & m) | (y & !m)
        })
        .collect();
    BitVector::from_words(words, a.len())
}
