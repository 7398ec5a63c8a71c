use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::affine::Point;
use super::IteratedFunctionSystem;
use crate::error::{Error, Result};

/// Length of the random digit word behind each sample.
pub const SAMPLE_DEPTH: usize = 40;
const CHUNK: usize = 1024;

/// Stream `stream` of the generator seeded by `seed`. Work split into
/// chunks draws chunk `c` from its own stream, so results do not depend on
/// the number of worker threads.
pub(crate) fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A sample together with its digit word.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedSample {
    pub word: Vec<u8>,
    pub point: Vec<f64>,
}

fn digit(sys: &IteratedFunctionSystem, rng: &mut ChaCha8Rng) -> u8 {
    let u: f64 = rng.random();
    let cum = sys.cumulative_weights();
    cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1) as u8
}

fn image(sys: &IteratedFunctionSystem, word: &[u8]) -> Vec<f64> {
    let mut x: Point = *sys.anchor_padded();
    for &i in word.iter().rev() {
        x = sys.affines()[i as usize].apply(&x);
    }
    x[..sys.dim()].to_vec()
}

fn draw(sys: &IteratedFunctionSystem, count: usize, seed: u64) -> Result<Vec<CodedSample>> {
    if count == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let chunks = count.div_ceil(CHUNK);
    let parts: Vec<Vec<CodedSample>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = sample_rng(seed, c as u64);
            let n = CHUNK.min(count - c * CHUNK);
            (0..n)
                .map(|_| {
                    let word: Vec<u8> = (0..SAMPLE_DEPTH).map(|_| digit(sys, &mut rng)).collect();
                    let point = image(sys, &word);
                    CodedSample { word, point }
                })
                .collect()
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

/// `count` independent draws from `mu`, each the image of the anchor under
/// a random word of length [`SAMPLE_DEPTH`] with digit `i` chosen with
/// probability `ratio_i^delta`. Deterministic in `seed`.
pub fn sample_measure(sys: &IteratedFunctionSystem, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    Ok(draw(sys, count, seed)?.into_iter().map(|s| s.point).collect())
}

pub fn sample_with_words(sys: &IteratedFunctionSystem, count: usize, seed: u64) -> Result<Vec<CodedSample>> {
    draw(sys, count, seed)
}

/// A draw from `mu` conditioned on the cylinder `S_prefix(K)`.
pub(crate) fn sample_in_cylinder(sys: &IteratedFunctionSystem, prefix: &[u8], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut word = prefix.to_vec();
    word.extend((0..SAMPLE_DEPTH).map(|_| digit(sys, rng)));
    image(sys, &word)
}
